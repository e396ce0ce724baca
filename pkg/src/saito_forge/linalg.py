"""Exact dense linear algebra over the coefficient fields.

Everything is deterministic: pivots are chosen leftmost-column first, topmost
row first, never by magnitude, so identical inputs give identical echelon
forms, kernels and ranks on every run.

Two performance paths back the generic routines:

* prime fields: vectorized row reduction on int64 numpy arrays (products stay
  below 2^63 for the moduli this toolkit accepts);
* rationals: fraction-free Bareiss elimination on denominator-cleared integer
  rows for rank/pivot queries, falling back to Fraction arithmetic only for
  reduced-echelon solves where the matrices are small.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .field import Field, PrimeField, Rationals

_NUMPY_SAFE_P = 1 << 31  # p**2 < 2**62 leaves int64 headroom for the row update


def rref(rows: list, field: Field) -> list[int]:
    """In-place reduced row echelon form; returns the pivot column indices."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots = []
    piv = 0
    for c in range(nc):
        r = None
        for i in range(piv, nr):
            if not field.is_zero(rows[i][c]):
                r = i
                break
        if r is None:
            continue
        rows[piv], rows[r] = rows[r], rows[piv]
        inv = field.inv(rows[piv][c])
        rows[piv] = [field.mul(e, inv) for e in rows[piv]]
        prow = rows[piv]
        for i in range(nr):
            if i != piv and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [field.sub(a, field.mul(f, b)) for a, b in zip(rows[i], prow)]
        pivots.append(c)
        piv += 1
        if piv == nr:
            break
    return pivots


def _rows_to_int(rows) -> list[list[int]]:
    out = []
    for row in rows:
        mult = 1
        for e in row:
            if isinstance(e, Fraction) and e.denominator != 1:
                mult = lcm(mult, e.denominator)
        out.append([int(e * mult) if mult != 1 else int(e) for e in row])
    return out


def _bareiss_echelon(rows: list[list[int]]) -> list[int]:
    """Fraction-free forward elimination on integer rows; returns pivot columns."""
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    pivots = []
    piv = 0
    prev = 1
    for c in range(nc):
        r = None
        for i in range(piv, nr):
            if rows[i][c]:
                r = i
                break
        if r is None:
            continue
        rows[piv], rows[r] = rows[r], rows[piv]
        prow = rows[piv]
        pv = prow[c]
        for i in range(piv + 1, nr):
            ri = rows[i]
            f = ri[c]
            rows[i] = [(pv * a - f * b) // prev for a, b in zip(ri, prow)]
        prev = pv
        pivots.append(c)
        piv += 1
        if piv == nr:
            break
    return pivots


def _modp_rref(mat: np.ndarray, p: int) -> list[int]:
    """In-place RREF of an int64 array modulo p; returns pivot columns."""
    nr, nc = mat.shape
    pivots = []
    piv = 0
    for c in range(nc):
        col = mat[piv:, c]
        nz = np.nonzero(col)[0]
        if len(nz) == 0:
            continue
        r = piv + int(nz[0])
        if r != piv:
            mat[[piv, r]] = mat[[r, piv]]
        inv = pow(int(mat[piv, c]), p - 2, p)
        mat[piv] = (mat[piv] * inv) % p
        f = mat[:, c].copy()
        f[piv] = 0
        nzr = np.nonzero(f)[0]
        if len(nzr):
            mat[nzr] = (mat[nzr] - np.outer(f[nzr], mat[piv])) % p
        pivots.append(c)
        piv += 1
        if piv == nr:
            break
    return pivots


def _to_modp_array(rows, p: int) -> np.ndarray:
    mat = np.array(rows, dtype=np.int64) if rows else np.zeros((0, 0), dtype=np.int64)
    return mat % p


def pivot_columns(rows: list, field: Field) -> list[int]:
    """Pivot columns of the matrix under left-to-right elimination.

    A column is a pivot exactly when it is not in the span of the columns to
    its left, which is what ideal-membership queries need.
    """
    if not rows or not rows[0]:
        return []
    if isinstance(field, PrimeField) and field.p < _NUMPY_SAFE_P:
        return _modp_rref(_to_modp_array(rows, field.p), field.p)
    if isinstance(field, Rationals):
        return _bareiss_echelon(_rows_to_int(rows))
    return rref([list(r) for r in rows], field)


def rank(rows: list, field: Field) -> int:
    return len(pivot_columns(rows, field))


def kernel_basis(rows: list, ncols: int, field: Field) -> list[list]:
    """Basis of the right kernel {u : A u = 0}, deterministic.

    Each basis vector has a 1 in one RREF-free column and zeros in the other
    free columns.
    """
    if ncols == 0:
        return []
    if rows and isinstance(field, PrimeField) and field.p < _NUMPY_SAFE_P:
        mat = _to_modp_array(rows, field.p)
        pivots = _modp_rref(mat, field.p)
        reduced = [[int(e) for e in mat[i]] for i in range(len(pivots))]
    else:
        work = [list(r) for r in rows]
        pivots = rref(work, field)
        reduced = work[: len(pivots)]
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for j in free:
        vec = [field.zero] * ncols
        vec[j] = field.one
        for i, pc in enumerate(pivots):
            vec[pc] = field.neg(reduced[i][j])
        basis.append(vec)
    return basis


def solve_affine(rows: list, rhs: list, field: Field):
    """Solve A u = b exactly.

    Returns (particular, kernel) with the canonical particular solution
    (free variables pinned to zero), or (None, kernel) when inconsistent.
    """
    nr = len(rows)
    nc = len(rows[0]) if nr else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = rref(aug, field)
    if pivots and pivots[-1] == nc:
        return None, kernel_basis([r[:nc] for r in aug], nc, field)
    particular = [field.zero] * nc
    for i, pc in enumerate(pivots):
        particular[pc] = aug[i][nc]
    pivot_set = set(pivots)
    free = [c for c in range(nc) if c not in pivot_set]
    basis = []
    for j in free:
        vec = [field.zero] * nc
        vec[j] = field.one
        for i, pc in enumerate(pivots):
            vec[pc] = field.neg(aug[i][j])
        basis.append(vec)
    return particular, basis
