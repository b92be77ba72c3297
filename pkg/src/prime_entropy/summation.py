"""Compensated summation helpers.

``NeumaierSum`` is a running sum with an error term, for streaming use.
``compensated_cumsum`` produces prefix sums over a numpy array: each chunk's
total is rounded exactly with :func:`math.fsum` and carried through a
``NeumaierSum``, while the within-chunk partial sums come from ``np.cumsum``.
The within-chunk error is bounded by ``chunk * eps`` times the chunk's own
partial sum, which is negligible against the carried total.
"""

from __future__ import annotations

import math

import numpy as np

CHUNK = 1024


class NeumaierSum:
    __slots__ = ("_s", "_c")

    def __init__(self, value: float = 0.0):
        self._s = float(value)
        self._c = 0.0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t

    def add_many(self, xs) -> None:
        self.add(math.fsum(xs))

    @property
    def value(self) -> float:
        return self._s + self._c

    def copy(self) -> "NeumaierSum":
        other = NeumaierSum()
        other._s, other._c = self._s, self._c
        return other

    def __repr__(self) -> str:
        return f"NeumaierSum({self.value!r})"


def compensated_cumsum(terms: np.ndarray, acc: NeumaierSum | None = None) -> np.ndarray:
    """Return running totals of ``terms`` offset by ``acc``; ``acc`` is advanced in place.

    Chunk boundaries are fixed relative to the start of ``terms`` so that two
    calls over the same sequence, split at multiples of ``CHUNK``, give
    bit-identical results.
    """
    terms = np.asarray(terms, dtype=np.float64)
    if acc is None:
        acc = NeumaierSum()
    out = np.empty_like(terms)
    for lo in range(0, terms.size, CHUNK):
        chunk = terms[lo:lo + CHUNK]
        out[lo:lo + CHUNK] = acc.value + np.cumsum(chunk)
        acc.add_many(chunk.tolist())
    return out
