"""Prime sums, factorization-exponent entropies, and finite-range bound checks."""

__version__ = "0.1.0"

from .errors import CacheFormatError, DomainError, PrimeEntropyError, RangeError, ResourceError
from .prime_core import (LedgerBlock, PrimeTable, SumLedger, is_prime, ledger_blocks, load_or_sieve,
                         load_prime_cache, prime_count, save_prime_cache, sieve_primes, stream_ledgers,
                         theta)
from .chebyshev_sums import (GenLowerBoundParams, c_sum, gen_lower_bound, pi_via_summation_by_parts,
                             t_sum)
from .exponent_law import (ExponentDistribution, GeometricLaw, SquareFreeDecomposition, entropy,
                           exact_law, geometric_entropy, joint_entropy_bruteforce,
                           marginal_entropy_sum, mean_logN_sum, mean_mu, squarefree_decompose)
from .bound_suite import BOUNDS, BoundReport, ratio_trace, sweep
from .monte_carlo import (EmpiricalLaw, geometric_limit_gap, independence_gap, sample_exponents,
                          tv_distance)
