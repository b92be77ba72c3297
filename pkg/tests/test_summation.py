import math

import numpy as np
from hypothesis import given, settings, strategies as st

from prime_entropy.summation import CHUNK, NeumaierSum, compensated_cumsum


def test_neumaier_recovers_cancelled_terms():
    acc = NeumaierSum()
    for x in (1.0, 1e100, 1.0, -1e100):
        acc.add(x)
    assert acc.value == 2.0


def test_cumsum_matches_fsum_prefixes():
    rng = np.random.default_rng(3)
    terms = rng.random(5000) * 10.0 ** rng.integers(-8, 8, 5000)
    out = compensated_cumsum(terms)
    for i in (0, 1, 1023, 1024, 2500, 4999):
        exact = math.fsum(terms[: i + 1].tolist())
        assert abs(out[i] - exact) <= 1e-13 * abs(exact)


def test_split_at_chunk_multiples_is_bit_identical():
    terms = np.log(np.arange(2, 10_000, dtype=float))
    whole = compensated_cumsum(terms)
    acc = NeumaierSum()
    parts = np.concatenate([compensated_cumsum(terms[:3 * CHUNK], acc), compensated_cumsum(terms[3 * CHUNK:], acc)])
    assert np.array_equal(whole, parts)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=3000))
def test_final_value_close_to_fsum(xs):
    out = compensated_cumsum(np.array(xs))
    exact = math.fsum(xs)
    scale = math.fsum(abs(x) for x in xs)
    assert abs(out[-1] - exact) <= 1e-15 * max(scale, 1.0)
