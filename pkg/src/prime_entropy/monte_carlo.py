"""Sampling uniform integers and comparing their exponent laws against exact
and limiting geometric laws.

Randomness comes from raw 64-bit words of numpy's ``PCG64`` bit generator.
Uniform integers on ``[1, n]`` are obtained by rejection from the full 64-bit
range, so the only thing results depend on is the PCG64 output stream, not on
numpy's higher-level samplers.  Trials are processed in fixed-size chunks,
chunk ``i`` drawing from child ``i`` of ``SeedSequence(seed)``.  The chunk
layout does not depend on how many workers run, so parallel and sequential
runs give identical counts.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, ResourceError
from .exponent_law import exact_law, factor_exponents

GENERATOR = "PCG64"
CHUNK_TRIALS = 1 << 16
CELL_BUDGET = 10 ** 6
MAX_SUBSET = 4
_TWO64 = 1 << 64


@dataclass(frozen=True)
class EmpiricalLaw:
    p: int
    n: int
    trials: int
    counts: dict
    seed: int

    def pmf(self) -> np.ndarray:
        out = np.zeros(max(self.counts) + 1)
        for k, c in self.counts.items():
            out[k] = c / self.trials
        return out

    def to_json(self) -> str:
        body = {
            "generator": GENERATOR,
            "p": self.p,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "counts": {str(k): self.counts[k] for k in sorted(self.counts)},
        }
        return json.dumps(body, sort_keys=True, separators=(",", ":"))


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    child = np.random.SeedSequence(seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(child))


def uniform_integers(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """``size`` draws uniform on ``[1, n]`` by rejection on raw 64-bit words."""
    if not 1 <= n < (1 << 63):
        raise DomainError(f"n must lie in [1, 2**63), got {n}")
    limit = _TWO64 - _TWO64 % n  # accept raw < limit
    out = np.empty(size, dtype=np.uint64)
    filled = 0
    while filled < size:
        raw = rng.bit_generator.random_raw(size - filled)
        if limit < _TWO64:
            raw = raw[raw < np.uint64(limit)]
        out[filled:filled + raw.size] = raw
        filled += raw.size
    return (out % np.uint64(n)).astype(np.int64) + 1


def p_adic_exponents(values: np.ndarray, p: int) -> np.ndarray:
    values = values.copy()
    k = np.zeros(values.size, dtype=np.int64)
    hit = values % p == 0
    while hit.any():
        k[hit] += 1
        values[hit] //= p
        hit &= values % p == 0
    return k


def _chunks(trials: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK_TRIALS, trials - lo)) for i, lo in enumerate(range(0, trials, CHUNK_TRIALS))]


def _run_chunks(fn, trials: int, workers: int):
    chunks = _chunks(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda c: fn(*c), chunks))
    return [fn(*c) for c in chunks]


def _check_prime_arg(n: int, p: int) -> None:
    exact_law(n, p)  # raises DomainError on bad (n, p)


def sample_exponents(n: int, p: int, trials: int, seed: int, workers: int = 1) -> EmpiricalLaw:
    _check_prime_arg(n, p)
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")

    def chunk(index, size):
        ks = p_adic_exponents(uniform_integers(_chunk_rng(seed, index), n, size), p)
        return np.bincount(ks)

    total = Counter()
    for counts in _run_chunks(chunk, trials, workers):
        total.update({k: int(c) for k, c in enumerate(counts) if c})
    return EmpiricalLaw(p, n, trials, dict(sorted(total.items())), seed)


def tv_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Total variation distance between two pmfs indexed ``0, 1, ...``."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    for name, x in (("a", a), ("b", b)):
        if x.size == 0 or np.any(x < 0) or abs(math.fsum(x.tolist()) - 1.0) > 1e-9:
            raise DomainError(f"{name} is not a probability vector")
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    return 0.5 * math.fsum(np.abs(a - b).tolist())


def limiting_pmf(p: int, upto: int) -> list[Fraction]:
    """Exact pmf of the law with ``P(X >= k) = p**-k``, for ``k = 0..upto``, plus its remaining mass."""
    r = Fraction(1, p)
    return [r ** k * (1 - r) for k in range(upto + 1)] + [r ** (upto + 1)]


def geometric_limit_gap(n: int, p: int) -> float:
    """TV distance between the exact law of ``X_p`` and its large-``n`` geometric limit (mean ``1/(p-1)``)."""
    law = exact_law(n, p)
    exact = law.pmf + [Fraction(0)]
    limit = limiting_pmf(p, law.max_exponent)
    return float(sum(abs(x - y) for x, y in zip(exact, limit)) / 2)


def gap_envelope(n: int, p: int) -> float:
    """``2 (K + 2) / n`` with ``K = floor(log n / log p)``; observed to dominate the geometric gap."""
    return 2 * (exact_law(n, p).max_exponent + 2) / n


def independence_gap(n: int, primes: Sequence[int], trials: int, seed: int, workers: int = 1) -> float:
    """TV distance between the sampled joint law of ``(X_p)`` and the product of exact marginals."""
    primes = [int(p) for p in primes]
    if not 1 <= len(primes) <= MAX_SUBSET or len(set(primes)) != len(primes):
        raise DomainError(f"need 1..{MAX_SUBSET} distinct primes, got {primes}")
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    laws = [exact_law(n, p) for p in primes]
    shape = tuple(law.max_exponent + 1 for law in laws)
    if math.prod(shape) > CELL_BUDGET:
        raise ResourceError(f"joint table of shape {shape} exceeds {CELL_BUDGET} cells")

    def chunk(index, size):
        values = uniform_integers(_chunk_rng(seed, index), n, size)
        idx = np.ravel_multi_index([p_adic_exponents(values, p) for p in primes], shape)
        return np.bincount(idx, minlength=math.prod(shape))

    joint = sum(_run_chunks(chunk, trials, workers)) / trials
    product = np.ones(1)
    for law in laws:
        product = np.multiply.outer(product, law.pmf_float()).ravel()
    return 0.5 * math.fsum(np.abs(joint - product).tolist())


def exact_independence_gap(n: int, primes: Sequence[int]) -> Fraction:
    """Exact TV distance between the joint law of ``(X_p)`` and the product of marginals, by enumeration."""
    primes = [int(p) for p in primes]
    laws = [exact_law(n, p) for p in primes]
    joint = Counter()
    for value in range(1, n + 1):
        f = factor_exponents(value)
        joint[tuple(f.get(p, 0) for p in primes)] += 1
    total = Fraction(0)
    for cell in np.ndindex(*(law.max_exponent + 1 for law in laws)):
        prod = Fraction(1)
        for law, k in zip(laws, cell):
            prod *= Fraction(law.pmf_counts[k], n)
        total += abs(Fraction(joint[cell], n) - prod)
    return total / 2
