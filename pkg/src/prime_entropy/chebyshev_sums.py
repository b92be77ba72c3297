"""The sums ``C(n) = sum log p / p`` and ``T(n)``, the anchored lower bound
on ``C(n)``, and the recovery of ``pi(n)`` from ``C`` by summation by parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DomainError
from .prime_core import PrimeTable
from .summation import NeumaierSum, compensated_cumsum


def c_sum(n: int, table: PrimeTable) -> float:
    table.check(n, lowest=1)
    return float(table.c_cum[table.count(n)])


def t_sum(n: int, table: PrimeTable) -> float:
    table.check(n, lowest=2)
    return float(table.t_cum[table.count(n)])


@dataclass(frozen=True)
class GenLowerBoundParams:
    """Coefficients of ``C(n) >= slope * log n + offset`` valid for ``n >= n0``."""

    n0: int
    slope: float
    offset: float

    @classmethod
    def from_anchor(cls, n0: int, table: PrimeTable) -> "GenLowerBoundParams":
        if n0 < 2:
            raise DomainError(f"anchor n0 must be >= 2, got {n0}")
        slope = (1.0 - 1.0 / n0) * (1.0 - 1.0 / (1.0 + math.log(n0)))
        return cls(n0, slope, c_sum(n0, table) - t_sum(n0, table))


def gen_lower_bound(n, params: GenLowerBoundParams):
    """``slope * log n + offset``; accepts a scalar or an array of ``n``."""
    if np.min(n) < params.n0:
        raise DomainError(f"bound anchored at n0={params.n0} does not cover n={np.min(n)}")
    return params.slope * np.log(n) + params.offset


def sumbp_weights(k: np.ndarray) -> np.ndarray:
    """``(k+1)/log(k+1) - k/log k``, rewritten to avoid cancellation at large k."""
    k = np.asarray(k, dtype=np.float64)
    logk = np.log(k)
    logk1 = np.log1p(k)
    return (logk - k * np.log1p(1.0 / k)) / (logk * logk1)


def iter_summation_by_parts(n_hi: int, table: PrimeTable,
                            block_size: int = 1 << 16) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(n, value)`` blocks of the summation-by-parts expression for ``n = 2..n_hi``.

    The weighted sum of ``C(k)`` is carried across blocks in a compensated
    accumulator.  ``block_size`` must be a multiple of the summation chunk so
    the result does not depend on how the range is split.
    """
    table.check(n_hi, lowest=2)
    acc = NeumaierSum()
    for a in range(2, n_hi + 1, block_size):
        k = np.arange(a, min(a + block_size, n_hi + 1), dtype=np.int64)
        ck = table.c_cum[table.count(k)]
        weighted = compensated_cumsum(sumbp_weights(k) * ck, acc)
        kf = k.astype(np.float64)
        yield k, (kf + 1.0) / np.log1p(kf) * ck - weighted


def pi_via_summation_by_parts(n: int, table: PrimeTable) -> float:
    """Reconstruct ``pi(n)`` from ``C(2..n)``; a real value, equal to ``pi(n)`` up to rounding."""
    if n < 3:
        raise DomainError(f"summation-by-parts identity holds for n >= 3, got {n}")
    *_, (k, values) = iter_summation_by_parts(n, table)
    return float(values[-1])
