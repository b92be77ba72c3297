"""Exhaustive finite-range checks of the prime-sum inequalities and identities.

Every bound is phrased as ``lhs(n) <= rhs(n)`` and its margin is
``rhs - lhs``.  A sweep walks ``[n_lo, n_hi]`` in contiguous blocks, keeps
the smallest margin (ties go to the smallest ``n``), and classifies the
result:

``holds``          every margin is ``>= 0``
``indeterminate``  some margin is negative but above ``-1e-9 * max(1, |lhs|, |rhs|)``
``fails``          some margin is below that tolerance
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from . import chebyshev_sums as cs
from .errors import DomainError, RangeError, ResourceError
from .exponent_law import entropy, exact_law, geometric_entropy, marginal_arrays, mean_logN_sum
from .prime_core import PrimeTable
from .summation import compensated_cumsum

LOG2 = math.log(2.0)
REL_TOL = 1e-9
SUMBP_TOL = 1e-6
COROLLARY_SLOPE = 86 / 125
COROLLARY_OFFSET = -2.35
PER_N_CAP = 10 ** 4
UB1_CAP = 10 ** 7
BLOCK_SIZE = 1 << 16

Triple = tuple[np.ndarray, np.ndarray, np.ndarray]


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    n_lo: int
    n_hi: int
    holds: bool
    min_margin: float
    argmin_n: int
    status: str
    samples: tuple[tuple[int, float, float], ...] | None = field(default=None, compare=False)

    def record(self) -> dict:
        """The serialized fields, in output column order."""
        row = asdict(self)
        del row["samples"]
        return row


@dataclass(frozen=True)
class Bound:
    """One inequality ``lhs(n) <= rhs(n)``.

    ``evaluate`` maps an array of ``n`` to ``(n, lhs, rhs)`` arrays and must be
    independent across ``n`` so blocks can run in any order.  Bounds that
    carry state from one ``n`` to the next supply ``stream`` instead.
    ``pointwise`` recomputes one ``n`` by a separate route.
    """

    bound_id: str
    statement: str
    first_n: int | Callable[[dict], int]
    pointwise: Callable[[PrimeTable, int, dict], tuple[float, float]]
    evaluate: Callable[[PrimeTable, np.ndarray, dict], Triple] | None = None
    stream: Callable[[PrimeTable, int, int, int, dict], Iterator[Triple]] | None = None
    max_n: int | None = None
    table_limit: Callable[[int], int] = lambda n: n

    def lowest(self, opts: dict) -> int:
        return self.first_n(opts) if callable(self.first_n) else self.first_n


BOUNDS: dict[str, Bound] = {}


def register_bound(bound: Bound) -> Bound:
    BOUNDS[bound.bound_id] = bound
    return bound


def unregister_bound(bound_id: str) -> None:
    BOUNDS.pop(bound_id, None)


def _fsum_primes(table: PrimeTable, n: int, term) -> float:
    return math.fsum(term(p) for p in table.primes[: table.count(n)].tolist())


# -- ledger-based bounds ---------------------------------------------------


def _ledger_bound(bound_id, statement, first_n, lhs_rhs, pointwise, **kw):
    def evaluate(table, n, opts):
        i = table.count(n)
        return (n, *lhs_rhs(table, n.astype(np.float64), i, opts))
    return register_bound(Bound(bound_id, statement, first_n, pointwise, evaluate=evaluate, **kw))


_ledger_bound(
    "theorem2", "log n <= T(n)", 2,
    lambda tb, n, i, o: (np.log(n), tb.t_cum[i]),
    lambda tb, n, o: (math.log(n), _fsum_primes(tb, n, lambda p: math.log(p) / (p - 1) - math.log1p(-1 / p))),
)
_ledger_bound(
    "theorem3", "C(n) <= log n + 2 log 2", 2,
    lambda tb, n, i, o: (tb.c_cum[i], np.log(n) + 2 * LOG2),
    lambda tb, n, o: (_fsum_primes(tb, n, lambda p: math.log(p) / p), math.log(n) + 2 * LOG2),
)
_ledger_bound(
    "corollary1ii", "(86/125) log n - 2.35 <= C(n)", 16,
    lambda tb, n, i, o: (COROLLARY_SLOPE * np.log(n) + COROLLARY_OFFSET, tb.c_cum[i]),
    lambda tb, n, o: (COROLLARY_SLOPE * math.log(n) + COROLLARY_OFFSET,
                      _fsum_primes(tb, n, lambda p: math.log(p) / p)),
)


def _genlb_params(table, opts) -> cs.GenLowerBoundParams:
    return cs.GenLowerBoundParams.from_anchor(opts.get("n0", 16), table)


def _genlb_point(table, n, opts):
    n0 = opts.get("n0", 16)
    slope = (1 - 1 / n0) * (1 - 1 / (1 + math.log(n0)))
    c = lambda m: _fsum_primes(table, m, lambda p: math.log(p) / p)
    t = _fsum_primes(table, n0, lambda p: math.log(p) / (p - 1) - math.log1p(-1 / p))
    return slope * math.log(n) + c(n0) - t, c(n)


_ledger_bound(
    "genlb", "slope(N0) log n + C(N0) - T(N0) <= C(n)", lambda o: o.get("n0", 16),
    lambda tb, n, i, o: (cs.gen_lower_bound(n, _genlb_params(tb, o)), tb.c_cum[i]),
    _genlb_point,
)
_ledger_bound(
    "erdos_theta", "theta(n) <= (2 log 2) n", 2,
    lambda tb, n, i, o: (tb.theta_cum[i], 2 * LOG2 * n),
    lambda tb, n, o: (_fsum_primes(tb, n, math.log), 2 * LOG2 * n),
)


def _erdos_step(table, n, opts):
    lo = table.theta_cum[table.count(n + 1)]
    hi = table.theta_cum[table.count(2 * n + 1)]
    return n, hi - lo, 2 * LOG2 * n.astype(np.float64)


def _erdos_step_point(table, n, opts):
    primes = [p for p in table.primes[: table.count(2 * n + 1)].tolist() if p > n + 1]
    return math.fsum(math.log(p) for p in primes), 2 * LOG2 * n


register_bound(Bound("erdos_step", "sum_{n+1<p<=2n+1} log p <= (2 log 2) n", 2, _erdos_step_point,
                     evaluate=_erdos_step, table_limit=lambda n: 2 * n + 1))

_ledger_bound(
    "chaitin_pi", "log n / (log log n + 1) <= pi(n)", 3,
    lambda tb, n, i, o: (np.log(n) / (np.log(np.log(n)) + 1), i.astype(np.float64)),
    lambda tb, n, o: (math.log(n) / (math.log(math.log(n)) + 1), float(len([p for p in tb.primes.tolist() if p <= n]))),
)
_ledger_bound(
    "squarefree_pi", "log n / (2 log 2) <= pi(n)", 2,
    lambda tb, n, i, o: (np.log(n) / (2 * LOG2), i.astype(np.float64)),
    lambda tb, n, o: (math.log(n) / (2 * LOG2), float(len([p for p in tb.primes.tolist() if p <= n]))),
)


def _isqrt_array(n: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(n.astype(np.float64))).astype(np.int64)
    r -= r * r > n
    r += (r + 1) * (r + 1) <= n
    return r


_ledger_bound(
    "squarefree_entropy", "log n <= log floor(sqrt n) + pi(n) log 2", 2,
    lambda tb, n, i, o: (np.log(n), np.log(_isqrt_array(n.astype(np.int64))) + i * LOG2),
    lambda tb, n, o: (math.log(n), math.log(math.isqrt(n)) + sum(1 for p in tb.primes.tolist() if p <= n) * LOG2),
)


# -- bounds needing more than the ledger -----------------------------------


def _entropy_chain_eval(table, n, opts):
    lhs = np.empty(n.size)
    rhs = np.empty(n.size)
    for j, m in enumerate(n.tolist()):
        arr = marginal_arrays(m, table)
        total = math.fsum(arr.entropy.tolist())
        links = [
            (math.log(m), total),
            (total, float(table.t_cum[arr.primes.size])),
        ]
        gaps = arr.geom_entropy - arr.entropy
        k = int(np.argmin(gaps))
        links.append((float(arr.entropy[k]), float(arr.geom_entropy[k])))
        lhs[j], rhs[j] = min(links, key=lambda lr: lr[1] - lr[0])
    return n, lhs, rhs


def _entropy_chain_point(table, n, opts):
    laws = [exact_law(n, p) for p in table.primes[: table.count(n)].tolist()]
    ents = [entropy(d) for d in laws]
    total = math.fsum(ents)
    t = _fsum_primes(table, n, lambda p: geometric_entropy(1 / (p - 1)))
    links = [(math.log(n), total), (total, t)]
    for d, h in zip(laws, ents):
        mu = sum(d.tail_counts) / d.n
        links.append((h, geometric_entropy(mu)))
    return min(links, key=lambda lr: lr[1] - lr[0])


register_bound(Bound("entropy_chain", "log n <= sum H(X_p) <= T(n), H(X_p) <= h(mu_p)", 2,
                     _entropy_chain_point, evaluate=_entropy_chain_eval, max_n=PER_N_CAP))


def log_factorial_by_prime_powers(n_hi: int, table: PrimeTable) -> np.ndarray:
    """``A[n] = sum_p log p * sum_k floor(n / p**k)`` for ``n = 0..n_hi``.

    Built by adding ``log p`` at every multiple of every prime power and
    accumulating, so ``A[n] / n`` is ``sum_p mu_p log p``.
    """
    if n_hi > UB1_CAP:
        raise ResourceError(f"E[log N] sweep capped at n={UB1_CAP}")
    table.check(n_hi, lowest=2)
    f = np.zeros(n_hi + 1)
    for p in table.primes[: table.count(n_hi)].tolist():
        lp = math.log(p)
        q = p
        while q <= n_hi:
            f[q::q] += lp
            q *= p
    return compensated_cumsum(f)


def _ub1_stream(table, n_lo, n_hi, block_size, opts):
    cum = log_factorial_by_prime_powers(n_hi, table)
    for a in range(n_lo, n_hi + 1, block_size):
        n = np.arange(a, min(a + block_size, n_hi + 1), dtype=np.int64)
        yield n, cum[n] / n, np.log(n.astype(np.float64))


register_bound(Bound("ub1_chain", "sum_p mu_p log p <= log n", 2,
                     lambda tb, n, o: (mean_logN_sum(n, tb), math.log(n)),
                     stream=_ub1_stream, max_n=UB1_CAP))


def _sumbp_stream(table, n_lo, n_hi, block_size, opts):
    for k, values in cs.iter_summation_by_parts(n_hi, table, block_size):
        keep = k >= n_lo
        if keep.any():
            k, values = k[keep], values[keep]
            pi = table.count(k).astype(np.float64)
            yield k, np.abs(values - pi), SUMBP_TOL * pi


def _sumbp_point(table, n, opts):
    pi = float(table.count(n))
    return abs(cs.pi_via_summation_by_parts(n, table) - pi), SUMBP_TOL * pi


register_bound(Bound("sumbp_identity", "|pi_sbp(n) - pi(n)| <= 1e-6 pi(n)", 3, _sumbp_point,
                     stream=_sumbp_stream))


# -- sweep engine ----------------------------------------------------------


@dataclass
class _Running:
    margin: float = math.inf
    argmin: int = -1
    worst_scaled: float = math.inf
    samples: list = field(default_factory=list)

    def absorb(self, n, lhs, rhs, sample_at) -> None:
        margin = rhs - lhs
        j = int(np.argmin(margin))  # first occurrence: smallest n on ties
        if margin[j] < self.margin:
            self.margin, self.argmin = float(margin[j]), int(n[j])
        scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
        self.worst_scaled = min(self.worst_scaled, float(np.min(margin / scale)))
        if sample_at is not None:
            hit = np.isin(n, sample_at)
            self.samples.extend(zip(n[hit].tolist(), lhs[hit].tolist(), rhs[hit].tolist()))


def _sample_points(n_lo: int, n_hi: int, count: int) -> np.ndarray | None:
    if not count:
        return None
    return np.unique(np.geomspace(n_lo, n_hi, count).round().astype(np.int64))


def sweep(bound_id: str, n_lo: int, n_hi: int, table: PrimeTable, *,
          block_size: int = BLOCK_SIZE, workers: int = 1, samples: int = 0, **opts) -> BoundReport:
    """Check one registered bound at every ``n`` in ``[n_lo, n_hi]``."""
    try:
        bound = BOUNDS[bound_id]
    except KeyError:
        raise DomainError(f"unknown bound id {bound_id!r}; known: {', '.join(sorted(BOUNDS))}") from None
    if n_lo < bound.lowest(opts):
        raise DomainError(f"{bound_id} is stated for n >= {bound.lowest(opts)}, got n_lo={n_lo}")
    if n_hi < n_lo:
        raise DomainError(f"empty range [{n_lo}, {n_hi}]")
    if bound.max_n is not None and n_hi > bound.max_n:
        raise ResourceError(f"{bound_id} sweeps are capped at n={bound.max_n}")
    if bound.table_limit(n_hi) > table.limit:
        raise RangeError(f"{bound_id} up to n={n_hi} needs primes to {bound.table_limit(n_hi)}")
    if block_size % 1024:
        raise DomainError("block_size must be a multiple of 1024")

    run = _Running()
    sample_at = _sample_points(n_lo, n_hi, samples)
    if bound.stream is not None:
        for triple in bound.stream(table, n_lo, n_hi, block_size, opts):
            run.absorb(*triple, sample_at)
    else:
        starts = range(n_lo, n_hi + 1, block_size)

        def work(a):
            n = np.arange(a, min(a + block_size, n_hi + 1), dtype=np.int64)
            return bound.evaluate(table, n, opts)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(work, starts))
        else:
            results = map(work, starts)
        for triple in results:  # block order keeps the tie-break deterministic
            run.absorb(*triple, sample_at)

    if run.margin >= 0:
        status = "holds"
    elif run.worst_scaled >= -REL_TOL:
        status = "indeterminate"
    else:
        status = "fails"
    return BoundReport(bound_id, n_lo, n_hi, run.margin >= 0, run.margin, run.argmin, status,
                       tuple(run.samples) if sample_at is not None else None)


def pointwise_margin(bound_id: str, n: int, table: PrimeTable, **opts) -> tuple[float, float, float]:
    """``(lhs, rhs, margin)`` at a single ``n`` via the bound's independent route."""
    lhs, rhs = BOUNDS[bound_id].pointwise(table, n, opts)
    return lhs, rhs, rhs - lhs


def verify_theorem2(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("theorem2", n_lo, n_hi, table, **kw)


def verify_theorem3(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("theorem3", n_lo, n_hi, table, **kw)


def verify_corollary1ii(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("corollary1ii", n_lo, n_hi, table, **kw)


def verify_genLB(n0, n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("genlb", n_lo, n_hi, table, n0=n0, **kw)


def verify_erdos_theta(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("erdos_theta", n_lo, n_hi, table, **kw)


def verify_erdos_step(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("erdos_step", n_lo, n_hi, table, **kw)


def verify_chaitin_pi(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("chaitin_pi", n_lo, n_hi, table, **kw)


def verify_squarefree_pi(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("squarefree_pi", n_lo, n_hi, table, **kw)


def verify_ub1_chain(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("ub1_chain", n_lo, n_hi, table, **kw)


def verify_sumbp_identity(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("sumbp_identity", n_lo, n_hi, table, **kw)


def verify_entropy_chain(n_lo, n_hi, table, **kw) -> BoundReport:
    return sweep("entropy_chain", n_lo, n_hi, table, **kw)


def ratio_trace(points: Sequence[int], table: PrimeTable) -> list[tuple[int, float]]:
    """``(n, C(n) / log n)`` at each point; convergence data only, no verdict."""
    out = []
    for n in points:
        if n < 2:
            raise DomainError(f"ratio trace needs n >= 2, got {n}")
        out.append((int(n), cs.c_sum(n, table) / math.log(n)))
    return out
