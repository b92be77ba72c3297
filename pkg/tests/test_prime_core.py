import math

import numpy as np
import pytest

from prime_entropy import (DomainError, RangeError, ResourceError, CacheFormatError, is_prime, load_or_sieve,
                           load_prime_cache, prime_count, save_prime_cache, sieve_primes, stream_ledgers,
                           theta)
from prime_entropy.prime_core import iter_prime_segments, ledger_blocks, stream_ledger_blocks

from conftest import trial_division_is_prime, trial_division_primes


def test_small_limits():
    assert sieve_primes(10).primes.tolist() == [2, 3, 5, 7]
    assert sieve_primes(2).primes.tolist() == [2]
    t = sieve_primes(100)
    assert len(t) == 25 and t.primes[-1] == 97
    assert t.primes.tolist() == trial_division_primes(100)


def test_sieve_matches_trial_division_to_1e5(oracle_primes_1e5):
    assert sieve_primes(10 ** 5).primes.tolist() == oracle_primes_1e5


@pytest.mark.parametrize("segment", [2, 3, 7, 64, 1000, 1 << 20])
def test_segment_size_does_not_change_output(segment):
    assert sieve_primes(5000, segment_size=segment).primes.tolist() == trial_division_primes(5000)


def test_table_is_immutable():
    t = sieve_primes(100)
    with pytest.raises(ValueError):
        t.primes[0] = 4


def test_errors():
    with pytest.raises(DomainError):
        sieve_primes(1)
    with pytest.raises(ResourceError):
        sieve_primes(10 ** 12, memory_budget=1 << 20)
    t = sieve_primes(100)
    with pytest.raises(RangeError):
        prime_count(101, t)
    with pytest.raises(RangeError):
        theta(1, t)


def test_is_prime_against_trial_division():
    for k in range(-3, 5000):
        assert is_prime(k) == trial_division_is_prime(k)
    assert is_prime(2 ** 61 - 1) and not is_prime(2 ** 61 + 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_prime_count_and_theta_examples():
    t = sieve_primes(100)
    assert prime_count(2, t) == 1
    assert prime_count(3, t) == 2
    assert prime_count(100, t) == 25
    assert theta(2, t) == pytest.approx(math.log(2), rel=1e-15)
    assert theta(10, t) == pytest.approx(math.log(210), rel=1e-15)
    assert theta(100, t) == pytest.approx(83.72839039906392, rel=1e-14)  # mpmath oracle


def test_prime_count_oracle_every_n(oracle_primes_1e5):
    t = sieve_primes(10 ** 5)
    n = np.arange(2, 10 ** 5 + 1)
    expected = np.searchsorted(np.array(oracle_primes_1e5), n, side="right")
    assert np.array_equal(t.count(n), expected)


def test_theta_even_equals_preceding_odd(small_table):
    b = small_table.block(3, 20_000)
    even = b.n % 2 == 0
    assert np.array_equal(b.theta[even], b.theta[np.flatnonzero(even) - 1])


def test_stream_ledgers_small():
    rows = list(stream_ledgers(3))
    assert [(r.n, r.pi) for r in rows] == [(2, 1), (3, 2)]
    ten = list(stream_ledgers(10))[-1]
    assert ten.n == 10 and ten.pi == 4
    assert ten.c == pytest.approx(1.312652433140255, rel=1e-14)
    assert ten.t == pytest.approx(3.4450376809879886, rel=1e-14)


def test_stream_matches_pointwise_fsum():
    n_max = 30_000
    primes = trial_division_primes(n_max)
    checkpoints = {2, 3, 97, 1024, 4099, 29_989, 30_000}
    for ledger in stream_ledgers(n_max, segment_size=4096):
        if ledger.n in checkpoints:
            ps = [p for p in primes if p <= ledger.n]
            assert ledger.pi == len(ps)
            assert ledger.theta == pytest.approx(math.fsum(map(math.log, ps)), rel=1e-10)
            assert ledger.c == pytest.approx(math.fsum(math.log(p) / p for p in ps), rel=1e-10)
            assert ledger.t == pytest.approx(
                math.fsum(math.log(p) / (p - 1) - math.log1p(-1 / p) for p in ps), rel=1e-10)


def test_stream_blocks_agree_with_table(small_table):
    streamed = np.concatenate([b.c for b in stream_ledger_blocks(20_000, segment_size=3000)])
    tabled = np.concatenate([b.c for b in ledger_blocks(small_table, 2, 20_000, block_size=777)])
    np.testing.assert_allclose(streamed, tabled, rtol=1e-13)


def test_ledgers_monotone(small_table):
    b = small_table.block(2, 20_000)
    for col in (b.pi, b.theta, b.c, b.t):
        assert np.all(np.diff(col) >= 0)


def test_segments_cover_range():
    spans = [(lo, hi) for lo, hi, _ in iter_prime_segments(1000, 128)]
    assert spans[0][0] == 0 and spans[-1][1] == 1001
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))


def test_cache_round_trip(tmp_path):
    path = tmp_path / "primes.txt"
    t = sieve_primes(1000)
    save_prime_cache(t, path)
    assert path.read_text().splitlines()[0] == "PRIMECACHE v1 limit=1000 count=168"
    loaded = load_prime_cache(path)
    assert loaded.limit == 1000 and np.array_equal(loaded.primes, t.primes)


def test_cache_reuse_and_refresh(tmp_path):
    path = tmp_path / "primes.txt"
    assert len(load_or_sieve(500, path)) == 95
    assert len(load_or_sieve(100, path)) == 25  # restricted from the cached 500
    assert load_prime_cache(path).limit == 500
    assert len(load_or_sieve(1000, path)) == 168
    assert load_prime_cache(path).limit == 1000


@pytest.mark.parametrize("body", [
    "PRIMECACHE v1 limit=10 count=3\n2\n3\n5\n7\n",
    "PRIMECACHE v1 limit=5 count=4\n2\n3\n5\n7\n",
    "PRIMECACHE v2 limit=10 count=4\n2\n3\n5\n7\n",
    "PRIMECACHE v1 limit=10 count=4\n2\n5\n3\n7\n",
    "PRIMECACHE v1 limit=10\n2\n",
])
def test_cache_validation(tmp_path, body):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    with pytest.raises(CacheFormatError):
        load_prime_cache(path)
