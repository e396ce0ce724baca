"""Exact coefficient fields: arbitrary-precision rationals and prime fields.

Scalars are raw values (``fractions.Fraction`` over the rationals, ints in
``0..p-1`` over a prime field); a field object owns the arithmetic.  Nothing
here ever rounds.
"""

from __future__ import annotations

import random
from fractions import Fraction


class FieldError(Exception):
    pass


class DivisionByZero(FieldError):
    pass


class FieldMismatch(FieldError):
    """Operands tagged with different coefficient fields."""


class ScalarSyntaxError(FieldError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class Rationals:
    """The field of arbitrary-precision rationals.

    Values are ``Fraction`` instances, which keep lowest terms and a positive
    denominator, so equality is canonical for free.
    """

    char = 0

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of 0 in QQ")
        return 1 / Fraction(a)

    def div(self, a, b):
        if b == 0:
            raise DivisionByZero("division by 0 in QQ")
        return Fraction(a) / b

    def is_zero(self, a) -> bool:
        return a == 0

    def parse(self, text: str) -> Fraction:
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                d = int(den)
                if d <= 0:
                    raise ScalarSyntaxError(f"denominator must be a positive integer: {text!r}")
                return Fraction(int(num), d)
            return Fraction(int(text))
        except ValueError as exc:
            raise ScalarSyntaxError(f"not a rational scalar: {text!r}") from exc

    def render(self, a) -> str:
        return str(a)

    def random(self, rng: random.Random, lo: int = -10, hi: int = 10) -> Fraction:
        return Fraction(rng.randint(lo, hi))

    def random_nonzero(self, rng: random.Random, lo: int = -10, hi: int = 10) -> Fraction:
        while True:
            a = self.random(rng, lo, hi)
            if a != 0:
                return a

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"

    def to_spec(self) -> str:
        return "q"


class PrimeField:
    """The prime field F_p; values are ints reduced to ``0..p-1``."""

    def __init__(self, p: int):
        if not _is_prime(p):
            raise FieldError(f"{p} is not prime")
        self.p = p
        self.char = p

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def from_int(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise DivisionByZero(f"inverse of 0 in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def parse(self, text: str) -> int:
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                return self.div(int(num) % self.p, int(den) % self.p)
            return int(text) % self.p
        except ValueError as exc:
            raise ScalarSyntaxError(f"not an F_{self.p} scalar: {text!r}") from exc

    def render(self, a) -> str:
        return str(a % self.p)

    def random(self, rng: random.Random) -> int:
        return rng.randrange(self.p)

    def random_nonzero(self, rng: random.Random) -> int:
        return rng.randrange(1, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"F_{self.p}"

    def to_spec(self) -> str:
        return f"fp:{self.p}"


QQ = Rationals()

Field = Rationals | PrimeField


def field_from_spec(spec: str) -> Field:
    """Parse a field spec string: ``q`` for the rationals, ``fp:P`` for F_P."""
    spec = spec.strip().lower()
    if spec in ("q", "qq"):
        return QQ
    if spec.startswith("fp:"):
        try:
            p = int(spec[3:])
        except ValueError as exc:
            raise FieldError(f"bad field spec {spec!r}") from exc
        return PrimeField(p)
    raise FieldError(f"bad field spec {spec!r} (expected 'q' or 'fp:P')")


def check_char_policy(field: Field, d: int) -> bool:
    """Characteristic 0 or p > 3d, so every integer constant the construction
    divides by (all bounded by 3d in absolute value) is a unit when nonzero."""
    return field.char == 0 or field.char > 3 * d
