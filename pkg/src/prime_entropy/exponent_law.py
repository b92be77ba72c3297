"""Exact law of the exponent ``X_p`` of ``p`` in a uniform random ``N`` in ``1..n``.

``P(X_p >= k) = floor(n / p**k) / n``, so every probability is an integer
count over the common denominator ``n``.  Distributions keep those integer
counts; :class:`fractions.Fraction` views are built on demand, and floating
point enters only when a logarithm is taken.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ResourceError
from .prime_core import PrimeTable, is_prime

JOINT_BRUTEFORCE_CAP = 10 ** 5


@dataclass(frozen=True)
class ExponentDistribution:
    """Law of ``X_p`` for ``N`` uniform on ``1..n``.

    ``tail_counts[k-1] = floor(n / p**k)`` for ``k = 1..K`` where ``p**K <= n < p**(K+1)``.
    """

    n: int
    p: int
    tail_counts: tuple[int, ...]

    @property
    def max_exponent(self) -> int:
        return len(self.tail_counts)

    @property
    def pmf_counts(self) -> tuple[int, ...]:
        ge = (self.n,) + self.tail_counts + (0,)
        return tuple(ge[k] - ge[k + 1] for k in range(len(ge) - 1))

    @property
    def tail(self) -> list[Fraction]:
        return [Fraction(c, self.n) for c in self.tail_counts]

    @property
    def pmf(self) -> list[Fraction]:
        return [Fraction(c, self.n) for c in self.pmf_counts]

    def pmf_float(self) -> np.ndarray:
        return np.array(self.pmf_counts, dtype=np.float64) / self.n


@dataclass(frozen=True)
class GeometricLaw:
    """Geometric law on ``{0, 1, 2, ...}`` with mean ``mu``: ``P(k) = mu**k / (1+mu)**(k+1)``."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"geometric mean must be positive, got {self.mu}")

    @property
    def ratio(self) -> float:
        return self.mu / (1.0 + self.mu)

    def pmf(self, k):
        return (1.0 - self.ratio) * self.ratio ** np.asarray(k)

    def tail(self, k):
        """``P(Y >= k)``."""
        return self.ratio ** np.asarray(k)

    def truncation_point(self, eps: float = 1e-15) -> int:
        """Smallest ``k`` with ``P(Y >= k) < eps``."""
        return max(1, math.ceil(math.log(eps) / math.log(self.ratio)))

    def entropy(self) -> float:
        return geometric_entropy(self.mu)


@dataclass(frozen=True)
class SquareFreeDecomposition:
    """``value = m**2 * prod(y)`` with the primes in ``y`` distinct."""

    m: int
    y: dict

    @property
    def squarefree_part(self) -> int:
        return math.prod(self.y)

    def recompose(self) -> int:
        return self.m * self.m * self.squarefree_part


def exact_law(n: int, p: int) -> ExponentDistribution:
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if p > n or not is_prime(p):
        raise DomainError(f"p={p} must be a prime not exceeding n={n}")
    counts = []
    q = p
    while q <= n:  # stops before q can outgrow n * p
        counts.append(n // q)
        q *= p
    return ExponentDistribution(n, p, tuple(counts))


def mean_mu(dist: ExponentDistribution) -> Fraction:
    return Fraction(sum(dist.tail_counts), dist.n)


def _entropy_from_counts(counts, total: int) -> float:
    # H = log total - (1/total) * sum c log c
    return math.log(total) - math.fsum(c * math.log(c) for c in counts if c) / total


def entropy(dist: ExponentDistribution) -> float:
    return _entropy_from_counts(dist.pmf_counts, dist.n)


def geometric_entropy(mu):
    """``(mu+1) log(mu+1) - mu log mu`` in nats, with ``h(0) = 0``."""
    mu_arr = np.asarray(mu, dtype=np.float64)
    if np.any(mu_arr < 0):
        raise DomainError("geometric mean must be nonnegative")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(mu_arr > 0, (mu_arr + 1.0) * np.log1p(mu_arr) - mu_arr * np.log(mu_arr), 0.0)
    return float(out) if np.ndim(mu) == 0 else out


def _primes_upto(n: int, table: PrimeTable) -> np.ndarray:
    table.check(n, lowest=2)
    return table.primes[: table.count(n)]


def marginal_entropy_sum(n: int, table: PrimeTable) -> float:
    """Sum over primes ``p <= n`` of ``H(X_p)``."""
    return math.fsum(entropy(exact_law(n, int(p))) for p in _primes_upto(n, table))


def mean_logN_sum(n: int, table: PrimeTable) -> float:
    """``E[log N] = sum_p mu_p log p`` with each ``mu_p`` exact."""
    terms = []
    for p in _primes_upto(n, table).tolist():
        mu = mean_mu(exact_law(n, p))
        terms.append(mu.numerator * math.log(p) / mu.denominator)
    return math.fsum(terms)


# -- vectorised per-n marginals, used by sweeps ---------------------------


@dataclass(frozen=True)
class MarginalArrays:
    """Per-prime quantities for one ``n``, as parallel arrays over primes ``<= n``."""

    n: int
    primes: np.ndarray
    mu_counts: np.ndarray   # n * mu_p, an exact integer
    entropy: np.ndarray     # H(X_p)
    geom_entropy: np.ndarray  # h(mu_p)

    @property
    def mu(self) -> np.ndarray:
        return self.mu_counts / self.n


def _xlogx(c: np.ndarray) -> np.ndarray:
    cf = c.astype(np.float64)
    out = np.zeros_like(cf)
    pos = cf > 0
    out[pos] = cf[pos] * np.log(cf[pos])
    return out


def marginal_arrays(n: int, table: PrimeTable) -> MarginalArrays:
    primes = _primes_upto(n, table)
    kmax = int(math.log2(n)) + 2
    ge = np.empty((primes.size, kmax + 1), dtype=np.int64)
    ge[:, 0] = n
    q = primes.copy()
    for k in range(1, kmax + 1):
        # once q > n the count is 0; clamp q to avoid overflow
        ge[:, k] = n // q
        q = np.minimum(q * primes, n + 1)
    pmf_counts = ge[:, :-1] - ge[:, 1:]
    mu_counts = ge[:, 1:].sum(axis=1)
    ent = math.log(n) - _xlogx(pmf_counts).sum(axis=1) / n
    return MarginalArrays(n, primes, mu_counts, ent, geometric_entropy(mu_counts / n))


# -- brute force over 1..n -------------------------------------------------


def _smallest_factor_table(n: int) -> np.ndarray:
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    return spf


def factor_exponents(value: int, spf: np.ndarray | None = None) -> dict[int, int]:
    """Prime factorization of ``value`` as ``{p: exponent}``."""
    out: dict[int, int] = {}
    if spf is not None:
        while value > 1:
            p = int(spf[value])
            out[p] = out.get(p, 0) + 1
            value //= p
        return out
    d = 2
    while d * d <= value:
        while value % d == 0:
            out[d] = out.get(d, 0) + 1
            value //= d
        d += 1 if d == 2 else 2
    if value > 1:
        out[value] = out.get(value, 0) + 1
    return out


def joint_entropy_bruteforce(n: int, table: PrimeTable, cap: int = JOINT_BRUTEFORCE_CAP) -> float:
    """Entropy of the exponent vector ``(X_p; p <= n)`` by full enumeration of ``1..n``."""
    if n > cap:
        raise ResourceError(f"brute-force joint entropy capped at n={cap}, got {n}")
    table.check(n, lowest=2)
    spf = _smallest_factor_table(n)
    vectors: Counter = Counter()
    for value in range(1, n + 1):
        # sparse key: the (prime, exponent) pairs with nonzero exponent
        vectors[tuple(sorted(factor_exponents(value, spf).items()))] += 1
    return _entropy_from_counts(vectors.values(), n)


def squarefree_decompose(value: int) -> SquareFreeDecomposition:
    if value < 1:
        raise DomainError(f"value must be >= 1, got {value}")
    m = 1
    y = {}
    for p, e in factor_exponents(int(value)).items():
        m *= p ** (e // 2)
        if e % 2:
            y[p] = 1
    return SquareFreeDecomposition(m, y)

