"""Command-line interface.

Examples::

    prime-entropy sums --at 1,10,100
    prime-entropy verify --bounds theorem2,theorem3 --n-max 1000
    prime-entropy entropy --n 10 --format json
    prime-entropy sample --n 1000000 --primes 2,3 --trials 100000 --seed 7
    prime-entropy trace --n-max 1000000

Exit status: 0 on success, 1 if a requested bound fails, 2 on usage or
domain errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

from . import __version__
from . import bound_suite as bs
from .chebyshev_sums import t_sum
from .errors import PrimeEntropyError
from .exponent_law import exact_law, marginal_arrays
from .monte_carlo import (gap_envelope, geometric_limit_gap, independence_gap, sample_exponents,
                          tv_distance)
from .prime_core import PrimeTable, load_or_sieve, stream_ledgers

CACHE_ENV = "PRIME_ENTROPY_CACHE"
DEFAULT_BOUNDS = ("theorem2", "theorem3", "corollary1ii", "genlb", "erdos_theta", "erdos_step",
                  "chaitin_pi", "squarefree_pi", "squarefree_entropy", "ub1_chain",
                  "sumbp_identity", "entropy_chain")


class UsageError(PrimeEntropyError):
    pass


# -- serialization ---------------------------------------------------------


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def parse_value(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def write_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], list[dict]]:
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    return columns, [dict(zip(columns, map(parse_value, rec))) for rec in reader]


def _json_value(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_json(meta: dict, columns: Sequence[str], rows: Sequence[dict]) -> str:
    body = {"meta": {"version": __version__, **meta},
            "rows": [{c: _json_value(row.get(c)) for c in columns} for row in rows]}
    return json.dumps(body, indent=2) + "\n"


# -- helpers ---------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _table(args, limit: int) -> PrimeTable:
    cache = os.environ.get(CACHE_ENV) or args.cache
    return load_or_sieve(max(limit, 2), cache)


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required for this command")
    return value


# -- commands --------------------------------------------------------------

LEDGER_COLUMNS = ("n", "pi", "theta", "c", "t")


def cmd_sums(args):
    if args.at:
        if min(args.at) < 1:
            raise UsageError("--at values must be >= 1")
        table = _table(args, max(args.at))
        rows = [vars(table.ledger(n)) if n >= 2 else dict(n=n, pi=0, theta=0.0, c=0.0, t=0.0)
                for n in args.at]
        n_range = [min(args.at), max(args.at)]
    else:
        n_max = _require(args.n_max, "--n-max or --at")
        if n_max < 2:
            raise UsageError("--n-max must be >= 2")
        rows = [vars(ledger) for ledger in stream_ledgers(n_max)]
        n_range = [2, n_max]
    return LEDGER_COLUMNS, rows, {"n_range": n_range}, 0


def _largest_covered(bound, n_lo: int, n_hi: int, limit: int) -> int:
    """Largest n in [n_lo - 1, n_hi] whose sweep fits a table of this limit."""
    lo, hi = n_lo - 1, n_hi
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if bound.table_limit(mid) <= limit:
            lo = mid
        else:
            hi = mid - 1
    return lo


REPORT_COLUMNS = ("bound_id", "n_lo", "n_hi", "holds", "min_margin", "argmin_n", "status")


def cmd_verify(args):
    n_max = _require(args.n_max, "--n-max")
    ids = args.bounds or list(DEFAULT_BOUNDS)
    unknown = [b for b in ids if b not in bs.BOUNDS]
    if unknown:
        raise UsageError(f"unknown bound id(s): {', '.join(unknown)}; known: {', '.join(sorted(bs.BOUNDS))}")
    opts = {"n0": args.n0}
    table = _table(args, n_max)
    rows, status = [], 0
    for bound_id in ids:
        bound = bs.BOUNDS[bound_id]
        n_lo = bound.lowest(opts)
        n_hi = n_max
        if bound.max_n is not None and n_hi > bound.max_n:
            n_hi = bound.max_n
        n_hi = _largest_covered(bound, n_lo, n_hi, table.limit)
        if n_hi != n_max:
            print(f"note: {bound_id} swept to n={n_hi}", file=sys.stderr)
        if n_hi < n_lo:
            raise UsageError(f"{bound_id} needs --n-max >= {n_lo}")
        report = bs.sweep(bound_id, n_lo, n_hi, table, workers=args.workers, **opts)
        if report.status == "fails":
            status = 1
        elif report.status == "indeterminate":
            print(f"warning: {bound_id} margin {report.min_margin:.3g} at n={report.argmin_n} "
                  "is within rounding of zero", file=sys.stderr)
        rows.append(report.record())
    return REPORT_COLUMNS, rows, {"n_range": [2, n_max], "n0": args.n0}, status


ENTROPY_N_CAP = 10 ** 6
ENTROPY_COLUMNS = ("kind", "n", "p", "mu_p", "H", "h_mu", "log_n", "T_n")


def cmd_entropy(args):
    n = _require(args.n, "--n")
    if n < 2:
        raise UsageError("--n must be >= 2")
    if n > ENTROPY_N_CAP:
        raise UsageError(f"--n above {ENTROPY_N_CAP} is not supported for per-prime breakdowns")
    table = _table(args, n)
    arr = marginal_arrays(n, table)
    rows = [dict(kind="prime", n=n, p=p, mu_p=mu, H=h, h_mu=g)
            for p, mu, h, g in zip(arr.primes.tolist(), arr.mu.tolist(),
                                   arr.entropy.tolist(), arr.geom_entropy.tolist())]
    rows.append(dict(kind="total", n=n, H=math.fsum(arr.entropy.tolist()),
                     h_mu=math.fsum(arr.geom_entropy.tolist()), log_n=math.log(n), T_n=t_sum(n, table)))
    return ENTROPY_COLUMNS, rows, {"n_range": [n, n]}, 0


SAMPLE_COLUMNS = ("kind", "p", "k", "count", "empirical", "exact", "metric", "value")


def cmd_sample(args):
    n = _require(args.n, "--n")
    primes = args.primes or [2]
    rows = []
    for p in primes:
        emp = sample_exponents(n, p, args.trials, args.seed, workers=args.workers)
        exact = exact_law(n, p).pmf_float()
        for k in range(exact.size):
            c = emp.counts.get(k, 0)
            rows.append(dict(kind="law", p=p, k=k, count=c, empirical=c / args.trials, exact=float(exact[k])))
        rows.append(dict(kind="metric", p=p, metric="tv_empirical_exact", value=tv_distance(emp.pmf(), exact)))
        rows.append(dict(kind="metric", p=p, metric="geometric_limit_gap", value=geometric_limit_gap(n, p)))
        rows.append(dict(kind="metric", p=p, metric="gap_envelope", value=gap_envelope(n, p)))
    if len(primes) > 1:
        gap = independence_gap(n, primes, args.trials, args.seed, workers=args.workers)
        rows.append(dict(kind="metric", metric="independence_gap", value=gap))
    meta = {"n_range": [n, n], "seed": args.seed, "trials": args.trials, "generator": "PCG64"}
    return SAMPLE_COLUMNS, rows, meta, 0


TRACE_COLUMNS = ("n", "c", "log_n", "ratio")


def cmd_trace(args):
    if args.at:
        points = args.at
    else:
        n_max = _require(args.n_max, "--n-max or --at")
        points = [10 ** e for e in range(1, int(math.log10(n_max)) + 1)]
        if not points or points[-1] != n_max:
            points.append(n_max)
    if min(points) < 2:
        raise UsageError("trace points must be >= 2")
    table = _table(args, max(points))
    rows = [dict(n=n, c=r * math.log(n), log_n=math.log(n), ratio=r) for n, r in bs.ratio_trace(points, table)]
    return TRACE_COLUMNS, rows, {"n_range": [min(points), max(points)]}, 0


COMMANDS = {"sums": cmd_sums, "verify": cmd_verify, "entropy": cmd_entropy,
            "sample": cmd_sample, "trace": cmd_trace}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--cache", help=f"prime cache file (overridden by ${CACHE_ENV})")
    common.add_argument("--workers", type=int, default=1)

    ap = argparse.ArgumentParser(prog="prime-entropy", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sums", parents=[common], help="pi, theta, C and T at chosen n")
    p.add_argument("--at", type=_int_list)
    p.add_argument("--n-max", type=int)

    p = sub.add_parser("verify", parents=[common], help="sweep bounds and report margins")
    p.add_argument("--bounds", type=lambda s: [b.strip() for b in s.split(",") if b.strip()])
    p.add_argument("--n-max", type=int)
    p.add_argument("--n0", type=int, default=16, help="anchor for the genlb bound")

    p = sub.add_parser("entropy", parents=[common], help="per-prime exponent entropies at one n")
    p.add_argument("--n", type=int)

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo exponent laws and gaps")
    p.add_argument("--n", type=int)
    p.add_argument("--primes", type=_int_list)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trace", parents=[common], help="C(n)/log n at chosen n")
    p.add_argument("--at", type=_int_list)
    p.add_argument("--n-max", type=int)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        columns, rows, meta, status = COMMANDS[args.command](args)
    except PrimeEntropyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    meta = {"command": args.command, **meta}
    if args.format == "json":
        sys.stdout.write(write_json(meta, columns, rows))
    else:
        sys.stdout.write(write_csv(columns, rows))
    return status


if __name__ == "__main__":
    raise SystemExit(main())
