"""Proper holomorphic maps of multiply connected plane domains.

Construction and certification of Ahlfors maps, Grunsky maps (the n-to-one
analogues of Riemann maps onto the right half plane / unit disc), and their
higher-degree combinations, built on Szego/Garabedian kernel data from a
Kerzman-Stein boundary integral equation.
"""

from .geom import BoundaryPoint, CurveSpec, Cycle, Domain, load_domain, save_domain
from .grunsky import (GrunskyMap, MapSample, SolverContext, build_boundary,
                      build_interior, cayley, degree, evaluate,
                      real_part_identity_check)
from .harmonic import (FPrimeField, HarmonicMeasure, all_f_prime_fields,
                       f_prime_boundary, harmonic_measure,
                       reflection_quotient_check)
from .periods import (CoefficientVector, PeriodMatrix, cramer_coefficients,
                      period_matrix, solve_coefficients)
from .semigroup import (CombineReport, ProperMap, add_point, boundary_multiplicity,
                        combine, proper_degree, remove_point)
from .szego import (DegenerateBasePointError, KernelMatrix, SzegoSolution,
                    ahlfors_map, find_szego_zeros, garabedian_interior,
                    solve_boundary_base, solve_szego_boundary, szego_interior,
                    szego_rank_check)
from .verify import (PrimitivePairCertificate, PropernessReport, certify,
                     double_quotient_check, primitive_pair,
                     reflection_real_check)

__version__ = "0.1.0"
