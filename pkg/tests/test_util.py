"""Shared helpers: seeded streams, float formatting, compensated sums."""

import numpy as np
import pytest

from olfw.util import (
    child_rng,
    fmt_float,
    fmt_vector,
    kahan_cumsum,
    parallel_map,
    parse_vector,
    worker_count,
)


def test_child_rng_reproducible_and_keyed():
    a = child_rng(1, 7).uniform(size=5)
    b = child_rng(1, 7).uniform(size=5)
    c = child_rng(1, 8).uniform(size=5)
    d = child_rng(2, 7).uniform(size=5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)


def test_child_rng_requires_a_key():
    with pytest.raises(ValueError):
        child_rng()


def test_float_format_round_trips_binary64():
    values = [0.1, 1.0 / 3.0, 1e-300, 1e300, -0.0, 2.0 ** -1074]
    for v in values:
        assert float(fmt_float(v)) == v


def test_vector_format_round_trips():
    x = np.array([0.1, -2.5, 1e-17, 3.0])
    assert np.array_equal(parse_vector(fmt_vector(x)), x)
    assert fmt_vector(np.array([1.0, 0.5])) == "1;0.5"


def test_kahan_cumsum_matches_exact_sum():
    rng = child_rng(950)
    values = rng.uniform(-1.0, 1.0, size=100_000)
    out = kahan_cumsum(values)
    # compare the endpoint against an exact accumulation
    import math
    assert out[-1] == pytest.approx(math.fsum(values), abs=1e-12)
    assert out.shape == values.shape


def test_kahan_cumsum_is_monotone_prefix():
    values = np.full(1000, 0.1)
    out = kahan_cumsum(values)
    assert out[-1] == pytest.approx(100.0, abs=1e-12)
    assert np.all(np.diff(out) > 0.0)


def test_worker_count_env_override(monkeypatch):
    monkeypatch.setenv("OLFW_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("OLFW_THREADS", "bogus")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.setenv("OLFW_THREADS", "0")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.delenv("OLFW_THREADS")
    assert worker_count() >= 1


def test_parallel_map_preserves_order(monkeypatch):
    jobs = list(range(40))
    assert parallel_map(lambda j: j * j, jobs) == [j * j for j in jobs]
    monkeypatch.setenv("OLFW_THREADS", "1")
    assert parallel_map(lambda j: j + 1, jobs) == [j + 1 for j in jobs]
