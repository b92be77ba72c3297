"""Prime generation and cumulative prime sums.

Primes come from a segmented sieve of Eratosthenes with a fixed segment
length, so the working memory of the sieve itself does not grow with the
limit.  A :class:`PrimeTable` keeps the sorted primes together with
compensated prefix sums of

* ``log p``                              (Chebyshev's theta),
* ``log p / p``                          (the sum ``C(n)``),
* ``log p / (p-1) + log(p / (p-1))``     (the sum ``T(n)``),

so that every per-``n`` quantity is a binary search plus an array lookup.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import CacheFormatError, DomainError, RangeError, ResourceError
from .summation import NeumaierSum, compensated_cumsum

SEGMENT_SIZE = 1 << 20
DEFAULT_MEMORY_BUDGET = 1 << 30  # bytes
MAX_LIMIT = (1 << 63) - 1

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags).astype(np.int64)


def estimated_table_bytes(limit: int) -> int:
    """Upper estimate of a table's footprint: primes plus three prefix arrays."""
    if limit < 17:
        count = 7
    else:
        count = int(1.25506 * limit / math.log(limit)) + 1  # Rosser-Schoenfeld
    return 4 * 8 * (count + 1)


def iter_prime_segments(limit: int, segment_size: int = SEGMENT_SIZE) -> Iterator[tuple[int, int, np.ndarray]]:
    """Yield ``(lo, hi, primes)`` for consecutive half-open windows covering ``[0, limit]``."""
    if limit < 2:
        raise DomainError(f"limit must be >= 2, got {limit}")
    if segment_size < 2:
        raise DomainError("segment_size must be >= 2")
    base = _simple_sieve(math.isqrt(limit))
    base_list = base.tolist()
    lo = 0
    while lo <= limit:
        hi = min(lo + segment_size, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            flags[:min(2, hi)] = False
        for p in base_list:
            pp = p * p
            if pp >= hi:
                break
            start = max(pp, -(-lo // p) * p)
            flags[start - lo::p] = False
        yield lo, hi, np.flatnonzero(flags).astype(np.int64) + lo
        lo = hi


@dataclass(frozen=True)
class SumLedger:
    n: int
    pi: int
    theta: float
    c: float
    t: float


@dataclass(frozen=True)
class LedgerBlock:
    """Column-wise ledgers for a contiguous run of ``n``."""

    n: np.ndarray
    pi: np.ndarray
    theta: np.ndarray
    c: np.ndarray
    t: np.ndarray

    def __len__(self) -> int:
        return int(self.n.size)

    def rows(self) -> Iterator[SumLedger]:
        for n, pi, th, c, t in zip(self.n.tolist(), self.pi.tolist(), self.theta.tolist(),
                                   self.c.tolist(), self.t.tolist()):
            yield SumLedger(n, pi, th, c, t)


def prime_terms(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-prime summands of theta, C and T."""
    p = primes.astype(np.float64)
    logp = np.log(p)
    # log(p/(p-1)) via log1p avoids the cancellation in -log(1 - 1/p).
    t_terms = logp / (p - 1.0) + np.log1p(1.0 / (p - 1.0))
    return logp, logp / p, t_terms


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Immutable sorted list of all primes up to ``limit``."""

    limit: int
    primes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.primes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.primes.size)

    def __repr__(self) -> str:
        return f"PrimeTable(limit={self.limit}, count={len(self)})"

    @cached_property
    def _prefixes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        out = []
        for terms in prime_terms(self.primes):
            cum = np.empty(terms.size + 1)
            cum[0] = 0.0
            cum[1:] = compensated_cumsum(terms)
            cum.setflags(write=False)
            out.append(cum)
        return tuple(out)

    @property
    def theta_cum(self) -> np.ndarray:
        """``theta_cum[i]`` is the sum of ``log p`` over the first ``i`` primes."""
        return self._prefixes[0]

    @property
    def c_cum(self) -> np.ndarray:
        return self._prefixes[1]

    @property
    def t_cum(self) -> np.ndarray:
        return self._prefixes[2]

    def check(self, n, lowest: int = 1) -> None:
        lo = int(np.min(n)) if np.ndim(n) else int(n)
        hi = int(np.max(n)) if np.ndim(n) else int(n)
        if lo < lowest or hi > self.limit:
            raise RangeError(f"n={lo if lo < lowest else hi} outside [{lowest}, {self.limit}]")

    def count(self, n):
        """pi(n) for a scalar or an integer array, without range checking."""
        idx = np.searchsorted(self.primes, n, side="right")
        return int(idx) if np.ndim(idx) == 0 else idx

    def ledger(self, n: int) -> SumLedger:
        self.check(n)
        i = self.count(n)
        return SumLedger(int(n), i, float(self.theta_cum[i]), float(self.c_cum[i]), float(self.t_cum[i]))

    def block(self, n_lo: int, n_hi: int) -> LedgerBlock:
        """Ledgers for every ``n`` in ``[n_lo, n_hi]``."""
        self.check([n_lo, n_hi])
        n = np.arange(n_lo, n_hi + 1, dtype=np.int64)
        i = self.count(n)
        return LedgerBlock(n, i, self.theta_cum[i], self.c_cum[i], self.t_cum[i])

    def restricted(self, limit: int) -> "PrimeTable":
        if limit > self.limit:
            raise RangeError(f"cannot extend table from {self.limit} to {limit}")
        if limit < 2:
            raise DomainError(f"limit must be >= 2, got {limit}")
        return PrimeTable(limit, self.primes[: self.count(limit)].copy())


def sieve_primes(limit: int, segment_size: int = SEGMENT_SIZE,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET) -> PrimeTable:
    limit = int(limit)
    if limit < 2:
        raise DomainError(f"limit must be >= 2, got {limit}")
    if limit > MAX_LIMIT:
        raise ResourceError("limit beyond the 64-bit range")
    need = estimated_table_bytes(limit) + segment_size
    if need > memory_budget:
        raise ResourceError(f"limit={limit} needs ~{need} bytes, budget is {memory_budget}")
    chunks = [seg for _, _, seg in iter_prime_segments(limit, segment_size)]
    return PrimeTable(limit, np.concatenate(chunks))


def prime_count(n: int, table: PrimeTable) -> int:
    table.check(n, lowest=2)
    return table.count(n)


def theta(n: int, table: PrimeTable) -> float:
    table.check(n, lowest=2)
    return float(table.theta_cum[table.count(n)])


def ledger_blocks(table: PrimeTable, n_lo: int, n_hi: int,
                  block_size: int = 1 << 16) -> Iterator[LedgerBlock]:
    """Table-backed ledgers over ``[n_lo, n_hi]`` in blocks of ``block_size``."""
    table.check([n_lo, n_hi])
    for a in range(n_lo, n_hi + 1, block_size):
        yield table.block(a, min(a + block_size - 1, n_hi))


def stream_ledger_blocks(n_max: int, segment_size: int = SEGMENT_SIZE) -> Iterator[LedgerBlock]:
    """Sieve and accumulate in one pass; memory stays at one segment."""
    if n_max < 2:
        raise DomainError(f"n_max must be >= 2, got {n_max}")
    accs = [NeumaierSum(), NeumaierSum(), NeumaierSum()]
    pi = 0
    for lo, hi, seg in iter_prime_segments(n_max, segment_size):
        cums = []
        for acc, terms in zip(accs, prime_terms(seg)):
            cum = np.empty(terms.size + 1)
            cum[0] = acc.value
            cum[1:] = compensated_cumsum(terms, acc)
            cums.append(cum)
        n = np.arange(max(lo, 2), hi, dtype=np.int64)
        if n.size:
            i = np.searchsorted(seg, n, side="right")
            yield LedgerBlock(n, pi + i, cums[0][i], cums[1][i], cums[2][i])
        pi += seg.size


def stream_ledgers(n_max: int, segment_size: int = SEGMENT_SIZE) -> Iterator[SumLedger]:
    """One :class:`SumLedger` per ``n = 2..n_max``."""
    for block in stream_ledger_blocks(n_max, segment_size):
        yield from block.rows()


# -- on-disk cache ---------------------------------------------------------

_CACHE_MAGIC = "PRIMECACHE v1"


def save_prime_cache(table: PrimeTable, path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(f"{_CACHE_MAGIC} limit={table.limit} count={len(table)}\n")
        np.savetxt(fh, table.primes, fmt="%d")
    os.replace(tmp, path)


def load_prime_cache(path) -> PrimeTable:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 4 or " ".join(header[:2]) != _CACHE_MAGIC:
            raise CacheFormatError(f"{path}: bad header")
        try:
            fields = dict(item.split("=", 1) for item in header[2:])
            limit, count = int(fields["limit"]), int(fields["count"])
        except (KeyError, ValueError) as exc:
            raise CacheFormatError(f"{path}: bad header fields") from exc
        try:
            primes = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
        except ValueError as exc:
            raise CacheFormatError(f"{path}: non-integer entry") from exc
    if primes.size != count:
        raise CacheFormatError(f"{path}: header count {count}, found {primes.size}")
    if count and primes[-1] > limit:
        raise CacheFormatError(f"{path}: last prime {primes[-1]} exceeds limit {limit}")
    if count > 1 and not np.all(np.diff(primes) > 0):
        raise CacheFormatError(f"{path}: primes not strictly increasing")
    return PrimeTable(limit, primes)


def load_or_sieve(limit: int, cache=None, **kwargs) -> PrimeTable:
    """Return a table for ``limit``, reusing or refreshing ``cache`` when given."""
    if cache is None:
        return sieve_primes(limit, **kwargs)
    cache = Path(cache)
    if cache.exists():
        cached = load_prime_cache(cache)
        if cached.limit >= limit:
            return cached if cached.limit == limit else cached.restricted(limit)
    table = sieve_primes(limit, **kwargs)
    save_prime_cache(table, cache)
    return table
