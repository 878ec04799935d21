"""multmono: multiplicatively monotone arithmetic functions, direct-factor
mean values, and hermitian multiplicative Toeplitz determinant sequences."""

from .arith import (bougaief_derivative, bougaief_integral, dirichlet_convolve,
                    is_mult_monotone, mult_increasing_envelope,
                    set_of_multiples_indicator)
from .engine import DeterminantSequence, NotNumericallyPD, QC
from .factors import (DirectFactorPair, enumerate_friable, esv_density,
                      friable_pair, friable_split, make_pair, reduce_by_factor,
                      verify_direct_factor)
from .intervals import Interval
from .kernels import (AdditiveSymbol, FractionKernel, MultiplicativeSigma,
                      direct_factor_kernel, hilberdink_kernel, identity_kernel,
                      parse_kernel, sigma_cm_power, sigma_cm_table,
                      sigma_prime_power_rule, sigma_prime_power_table,
                      sigma_recip)
from .means import (alpha_direct_factor, alpha_friable, alpha_limit_estimate,
                    mean_gap_diagnostics, mertens_product,
                    monotone_family_alpha)
from .primes import mobius, mobius_upto, primes_upto
from .sets import IntegerSet, parse_integer_set
from .tabulated import TabulatedFunction, read_csv_artifact
from .toeplitz import (additive_toeplitz_dets, build_multiplicative_matrix,
                       check_ratio_mult_monotone, cm_limit,
                       hilberdink_product_formula,
                       hilberdink_product_formula_exact,
                       incremental_cholesky_dets, prop29_summary,
                       prop30_factorization_check, szego_symbol_tools)

__version__ = "0.1.0"
