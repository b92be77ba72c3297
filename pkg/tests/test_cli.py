import json
import math
import subprocess
import sys

import numpy as np
import pytest

from prime_entropy.bound_suite import Bound, register_bound, unregister_bound
from prime_entropy.cli import main, read_csv, write_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_two_bounds(capsys):
    code, out, _ = run(capsys, "verify", "--bounds", "theorem2,theorem3", "--n-max", "1000")
    assert code == 0
    cols, rows = read_csv(out)
    assert cols == ["bound_id", "n_lo", "n_hi", "holds", "min_margin", "argmin_n", "status"]
    assert [r["bound_id"] for r in rows] == ["theorem2", "theorem3"]
    assert all(r["holds"] is True and r["n_hi"] == 1000 for r in rows)


def test_verify_all_defaults(capsys):
    code, out, err = run(capsys, "verify", "--n-max", "20000")
    assert code == 0
    _, rows = read_csv(out)
    by_id = {r["bound_id"]: r for r in rows}
    assert by_id["entropy_chain"]["n_hi"] == 10_000
    assert by_id["erdos_step"]["n_hi"] == 9_999
    assert all(r["status"] == "holds" for r in rows)
    assert "entropy_chain swept to n=10000" in err


def test_entropy_n10(capsys):
    code, out, _ = run(capsys, "entropy", "--n", "10")
    assert code == 0
    _, rows = read_csv(out)
    primes = [r for r in rows if r["kind"] == "prime"]
    assert [r["p"] for r in primes] == [2, 3, 5, 7]
    assert primes[0]["mu_p"] == 0.8
    total = rows[-1]
    assert total["kind"] == "total"
    assert total["log_n"] == pytest.approx(2.302585092994046)
    assert total["T_n"] == pytest.approx(3.44503768098799)
    assert total["log_n"] <= total["H"] <= total["h_mu"] <= total["T_n"]


def test_sums_at_one(capsys):
    code, out, _ = run(capsys, "sums", "--at", "1,10")
    assert code == 0
    _, rows = read_csv(out)
    assert rows[0] == {"n": 1, "pi": 0, "theta": 0.0, "c": 0.0, "t": 0.0}
    assert rows[1]["c"] == pytest.approx(1.312652433140255)


def test_sums_stream(capsys):
    code, out, _ = run(capsys, "sums", "--n-max", "100")
    _, rows = read_csv(out)
    assert code == 0 and len(rows) == 99 and rows[-1]["pi"] == 25


def test_trace(capsys):
    code, out, _ = run(capsys, "trace", "--n-max", "100000", "--format", "json")
    body = json.loads(out)
    assert code == 0 and body["meta"]["command"] == "trace"
    ratios = [r["ratio"] for r in body["rows"]]
    assert [r["n"] for r in body["rows"]] == [10, 100, 1000, 10_000, 100_000]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))


def test_sample_json(capsys):
    code, out, _ = run(capsys, "sample", "--n", "100000", "--primes", "2,3", "--trials", "50000",
                       "--seed", "4", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["meta"]["seed"] == 4 and body["meta"]["trials"] == 50000
    metrics = {(r["p"], r["metric"]): r["value"] for r in body["rows"] if r["kind"] == "metric"}
    assert metrics[(None, "independence_gap")] < 0.02
    assert metrics[(2, "geometric_limit_gap")] <= metrics[(2, "gap_envelope")]
    laws = [r for r in body["rows"] if r["kind"] == "law" and r["p"] == 2]
    assert sum(r["count"] for r in laws) == 50000
    code2, out2, _ = run(capsys, "sample", "--n", "100000", "--primes", "2,3", "--trials", "50000",
                         "--seed", "4", "--format", "json")
    assert out2 == out


@pytest.mark.parametrize("argv", [
    ["sums", "--at", "1,100", "--format", "csv"],
    ["verify", "--n-max", "3000"],
    ["entropy", "--n", "360"],
    ["sample", "--n", "1000", "--primes", "2,5", "--trials", "2000"],
    ["trace", "--at", "2,10,1000"],
])
def test_csv_round_trip(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    cols, rows = read_csv(out)
    assert write_csv(cols, rows) == out


@pytest.mark.parametrize("argv", [
    ["verify", "--bogus"],
    ["verify"],
    ["verify", "--n-max", "100", "--bounds", "not_a_bound"],
    ["verify", "--n-max", "10", "--bounds", "corollary1ii"],
    ["sums", "--at", "0"],
    ["sums", "--at", "x"],
    ["entropy"],
    ["entropy", "--n", "1"],
    ["sample", "--n", "100", "--primes", "4"],
    ["sample", "--n", "10", "--primes", "11"],
    ["trace", "--at", "1"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_forced_failure_exit_1(capsys):
    register_bound(Bound("test_wrong", "C(n) >= log n (false)", 2,
                         lambda t, n, o: (math.log(n), float(t.c_cum[t.count(n)])),
                         evaluate=lambda t, n, o: (n, np.log(n.astype(float)), t.c_cum[t.count(n)])))
    try:
        code, out, _ = run(capsys, "verify", "--bounds", "theorem2,test_wrong", "--n-max", "500")
    finally:
        unregister_bound("test_wrong")
    assert code == 1
    _, rows = read_csv(out)
    assert rows[1]["status"] == "fails" and rows[1]["holds"] is False


def test_cache_env_overrides_flag(tmp_path, monkeypatch, capsys):
    env_path, flag_path = tmp_path / "env.txt", tmp_path / "flag.txt"
    monkeypatch.setenv("PRIME_ENTROPY_CACHE", str(env_path))
    code, _, _ = run(capsys, "sums", "--at", "50", "--cache", str(flag_path))
    assert code == 0 and env_path.exists() and not flag_path.exists()
    assert env_path.read_text().startswith("PRIMECACHE v1 limit=50 count=15\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "prime_entropy", "sums", "--at", "10"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "n,pi,theta,c,t"
