"""saito-forge: exact construction and verification of a family of
irreducible homogeneous free divisors in K[x, y, z]."""

from .field import (DivisionByZero, FieldMismatch, PrimeField, QQ, Rationals,
                    field_from_spec)
from .family import (DivisorInstance, ExhaustedRetries, FamilyParams,
                     InvalidParams, build_divisor, instance_from_json,
                     instance_to_json, is_irreducible, legal_pairs,
                     random_instance, validate)
from .poly import Poly, divides, is_squarefree_bivariate, parse, render, split_pure_power
from .column_system import (ColumnSystem, build_column_system,
                            column_cokernel_hilbert, column_syzygy_generator,
                            cokernel_series_coefficient, solve_column_system)
from .saito import (SaitoConstructionFailed, SaitoMatrix, build_saito_matrix,
                    compute_constants, coupling_residual, even_explicit_probe,
                    last_column_residual, last_column_strata,
                    middle_column_residual, verify_saito)
from .oracle import (MacaulayMatrix, SyzygyBasis, expected_multiplicity,
                     freeness_probe, hilbert_function_quotient, ideal_dim,
                     in_kernel_span, jacobian_generators, point_support_check,
                     predicted_quotient_hilbert, resolution_check,
                     syzygy_kernel)

__version__ = "0.1.0"
