"""Problem instances: cost laws, utility streams, the ratings dataset."""

import numpy as np
import pytest

from olfw.domains import unit_box_with_cap
from olfw.errors import InputError
from olfw.objectives import check_dr_monotone
from olfw.scenarios import (
    ConstantStream,
    ConstraintDistribution,
    JesterDataset,
    JesterStream,
    LogDetStream,
    QuadraticStream,
    calibrate_cross_terms,
    deterministic_costs,
    load_jester,
    rescale_rating,
    scenario_custom,
    scenario_jester,
    scenario_logdet,
    scenario_quadratic,
    surrogate_range_bound,
    synthetic_ratings,
    uniform_box_costs,
)
from olfw.util import child_rng


# ---------------------------------------------------------------------------
# Cost distributions
# ---------------------------------------------------------------------------

def test_uniform_costs_mean_and_variance():
    dist = uniform_box_costs((0.5, 1.5), (1.5, 2.5))
    assert np.allclose(dist.mean, [1.0, 2.0], atol=1e-15)
    samples = dist.sample_batch(child_rng(940), 100_000)
    assert np.allclose(samples.mean(axis=0), [1.0, 2.0], atol=0.01)
    assert np.allclose(samples.var(axis=0), 1.0 / 12.0, rtol=0.05)
    assert samples.min() >= 0.5
    assert samples.max() <= 2.5


def test_sample_batch_matches_sequential_draws():
    dist = uniform_box_costs((0.1, 0.2, 0.0), (1.0, 0.9, 2.0))
    batch = dist.sample_batch(child_rng(941), 50)
    rng = child_rng(941)
    sequential = np.stack([dist.sample(rng) for _ in range(50)])
    assert np.array_equal(batch, sequential)


def test_deterministic_costs_sample_is_mean():
    dist = deterministic_costs([0.3, 0.7])
    assert dist.kind == "deterministic"
    assert np.array_equal(dist.sample(child_rng(942)), [0.3, 0.7])
    assert dist.trace_covariance == 0.0


def test_cost_distribution_validation():
    with pytest.raises(InputError):
        uniform_box_costs((-0.1, 0.0), (1.0, 1.0))
    with pytest.raises(InputError):
        uniform_box_costs((1.0, 1.0), (0.5, 2.0))
    with pytest.raises(InputError):
        ConstraintDistribution(lo=np.zeros(2), hi=np.full(2, np.inf))


def test_support_norm_bound():
    dist = uniform_box_costs((0.0, 0.0), (3.0, 4.0))
    assert dist.support_norm_bound == pytest.approx(5.0, abs=1e-12)


def test_surrogate_range_bound_envelope():
    dist = uniform_box_costs((0.0, 0.0), (1.0, 1.0))
    domain = unit_box_with_cap(2, 1.0)
    bound = surrogate_range_bound(dist, domain, budget_total=10.0, horizon=100)
    # reach = ||hi|| * max feasible norm = sqrt(2) * 1; per-round budget 0.1
    assert bound == pytest.approx(np.sqrt(2.0) - 0.1, rel=1e-12)


# ---------------------------------------------------------------------------
# Utility streams
# ---------------------------------------------------------------------------

def test_quadratic_stream_replay_is_exact():
    stream = QuadraticStream(n=3)
    first = [next(stream.functions(7)) for _ in range(1)]
    it_a = stream.functions(7)
    it_b = stream.functions(7)
    for _ in range(3):
        qa, qb = next(it_a), next(it_b)
        assert np.array_equal(qa.mat, qb.mat)
        assert np.array_equal(qa.vec, qb.vec)
    assert np.array_equal(first[0].mat, next(stream.functions(7)).mat)
    other = next(stream.functions(8))
    assert not np.array_equal(first[0].mat, other.mat)


def test_quadratic_stream_average_matches_mean_of_rounds():
    stream = QuadraticStream(n=2)
    horizon = 12
    avg = stream.average(5, horizon)
    it = stream.functions(5)
    x = np.array([0.3, 0.8])
    values = [next(it).value(x) for _ in range(horizon)]
    assert avg.value(x) == pytest.approx(np.mean(values), abs=1e-12)


def test_logdet_stream_average_is_pointwise_mean():
    stream = LogDetStream(n=4)
    horizon = 6
    avg = stream.average(3, horizon)
    it = stream.functions(3)
    x = np.full(4, 0.4)
    values = [next(it).value(x) for _ in range(horizon)]
    assert avg.value(x) == pytest.approx(np.mean(values), abs=1e-12)
    grads = np.stack([m.grad(x) for m in avg.members])
    assert np.allclose(avg.grad(x), grads.mean(axis=0), atol=1e-12)


def test_constant_stream_repeats_one_utility():
    from olfw.objectives import generate_quadratic
    q = generate_quadratic(2, rng_seed=1)
    stream = ConstantStream(q)
    it = stream.functions(0)
    assert next(it) is q
    assert next(it) is q
    assert stream.average(0, 10) is q


def test_quadratic_stream_rejects_positive_range():
    with pytest.raises(InputError):
        QuadraticStream(n=2, entry_range=(-1.0, 0.5))


def test_logdet_stream_rejects_small_eigenvalues():
    with pytest.raises(InputError):
        LogDetStream(n=2, eig_range=(0.5, 2.0))


# ---------------------------------------------------------------------------
# Scenario constructors
# ---------------------------------------------------------------------------

def test_scenario_quadratic_defaults():
    s = scenario_quadratic(seed=0, horizon=1000)
    assert s.budget_total == pytest.approx(2000.0)
    assert s.domain.dim == 2
    assert np.allclose(s.constraint_dist.mean, [1.0, 2.0])
    assert s.horizon == 1000


def test_scenario_constants_bound_sampled_gradients():
    s = scenario_quadratic(seed=1, horizon=10)
    it = s.utility_stream.functions(1)
    rng = child_rng(943)
    for _ in range(5):
        f = next(it)
        pts = rng.uniform(size=(20, 2))
        norms = np.linalg.norm(f.grad_rows(pts), axis=1)
        assert norms.max() <= s.constants.utility_grad_bound + 1e-9
        sym = 0.5 * (f.mat + f.mat.T)
        assert np.max(np.abs(np.linalg.eigvalsh(sym))) <= s.constants.smoothness + 1e-9


def test_scenario_logdet_default_budget():
    s = scenario_logdet(seed=0, horizon=100)
    # one tenth of the full-activation mean spend: 0.1 * 100 * (3 * 10)
    assert s.budget_total == pytest.approx(300.0)
    assert s.domain.dim == 10


def test_scenario_custom_rejects_bad_cost_shape():
    from olfw.objectives import generate_quadratic
    q = generate_quadratic(3, rng_seed=2)
    with pytest.raises(InputError, match="cost_lo"):
        scenario_custom(q, cost_lo=(0.1, 0.2), cost_hi=0.5,
                        horizon=10, budget_total=5.0)


def test_scenario_rejects_dimension_mismatch():
    from olfw.scenarios import Scenario
    s = scenario_quadratic(seed=0, horizon=10)
    with pytest.raises(InputError):
        Scenario(name="bad", domain=s.domain, utility_stream=s.utility_stream,
                 constraint_dist=uniform_box_costs((0.0,) * 3, (1.0,) * 3),
                 horizon=10, budget_total=5.0, constants=s.constants, seed=0)


# ---------------------------------------------------------------------------
# Ratings dataset handling
# ---------------------------------------------------------------------------

def test_rescale_rating_frozen_values():
    raw = np.array([-10.0, 10.0, 99.0, 0.0])
    assert np.allclose(rescale_rating(raw), [0.0, 10.0, 5.0, 5.0], atol=1e-12)


def test_load_jester_drops_leading_count_column(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text("2,-10.00,10.00\n1,99.00,0.00\n")
    ds = load_jester(path, expected_items=2)
    assert ds.n_users == 2
    assert ds.n_items == 2
    assert np.allclose(ds.ratings, [[0.0, 10.0], [5.0, 5.0]])


def test_load_jester_plain_rows(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text("-10.00,10.00\n")
    ds = load_jester(path, expected_items=2)
    assert np.allclose(ds.ratings, [[0.0, 10.0]])


def test_load_jester_rejects_out_of_range(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text("0.00,0.00\n0.00,11.00\n")
    with pytest.raises(InputError, match=":2"):
        load_jester(path, expected_items=2)


def test_load_jester_rejects_wrong_column_count(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text("1.0,2.0,3.0,4.0\n")
    with pytest.raises(InputError, match=":1"):
        load_jester(path, expected_items=2)


def test_load_jester_rejects_unparsable(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text("1.0,abc\n")
    with pytest.raises(InputError, match="unparsable"):
        load_jester(path, expected_items=2)


def test_load_jester_empty_file(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text("\n")
    with pytest.raises(InputError, match="no rating rows"):
        load_jester(path, expected_items=2)


def test_synthetic_ratings_range_and_missing_rate():
    raw = synthetic_ratings(200, 50, rng_seed=0, missing_frac=0.1)
    missing = raw == 99.0
    present = raw[~missing]
    assert present.min() >= -9.5
    assert present.max() <= 10.0
    assert abs(missing.mean() - 0.1) <= 0.01


# ---------------------------------------------------------------------------
# Joke recommendation scenario
# ---------------------------------------------------------------------------

def _tiny_dataset(users=40, items=12, seed=0):
    raw = synthetic_ratings(users, items, rng_seed=seed)
    ratings = rescale_rating(raw)
    return JesterDataset(ratings=ratings, user_order=np.arange(users))


def test_calibrate_cross_terms_structure():
    ds = _tiny_dataset()
    cross, eta, excluded = calibrate_cross_terms(ds.ratings, slots=3,
                                                 rng=child_rng(944))
    assert cross.shape == (12, 12)
    assert np.array_equal(cross, cross.T)
    assert np.all(np.diag(cross) == 0.0)
    assert np.all(cross <= 0.0)
    assert eta > 0.0
    assert excluded == int(np.count_nonzero(ds.ratings == 0.0))


def test_jester_scenario_defaults():
    ds = _tiny_dataset()
    s = scenario_jester(ds, seed=0, horizon=30, slots=3)
    assert s.budget_total == pytest.approx(1.5 * 30)
    assert np.allclose(s.constraint_dist.mean, 0.19)
    assert s.domain.cap == 3.0
    assert s.domain.dim == 12


def test_jester_scenario_rounds_are_monotone_dr():
    ds = _tiny_dataset()
    s = scenario_jester(ds, seed=0, horizon=30, slots=3)
    f = next(s.utility_stream.functions(0))
    report = check_dr_monotone(f, s.domain, samples=100, rng_seed=0, tol=1e-9)
    assert report.ok


def test_jester_stream_serves_users_in_order():
    ds = _tiny_dataset()
    s = scenario_jester(ds, seed=0, horizon=5, slots=3)
    it = s.utility_stream.functions(123)
    for t in range(5):
        f = next(it)
        assert np.array_equal(f.vec, ds.ratings[t])


def test_jester_stream_average_vec_is_user_mean():
    ds = _tiny_dataset()
    stream = JesterStream(ratings=ds.ratings,
                          cross_terms=np.zeros((12, 12)),
                          user_order=np.arange(40))
    avg = stream.average(0, 10)
    assert np.allclose(avg.vec, ds.ratings[:10].mean(axis=0), atol=1e-12)


def test_jester_scenario_horizon_exceeds_users():
    ds = _tiny_dataset(users=10)
    with pytest.raises(InputError, match="exceeds"):
        scenario_jester(ds, seed=0, horizon=11, slots=3)


def test_jester_shuffle_is_seeded():
    ds = _tiny_dataset()
    a = scenario_jester(ds, seed=3, horizon=30, slots=3, shuffle_users=True)
    b = scenario_jester(ds, seed=3, horizon=30, slots=3, shuffle_users=True)
    c = scenario_jester(ds, seed=4, horizon=30, slots=3, shuffle_users=True)
    order = lambda s: s.utility_stream.user_order
    assert np.array_equal(order(a), order(b))
    assert not np.array_equal(order(a), order(c))


def test_jester_dataset_rejects_out_of_range():
    with pytest.raises(InputError):
        JesterDataset(ratings=np.array([[11.0, 0.0]]), user_order=np.arange(1))
