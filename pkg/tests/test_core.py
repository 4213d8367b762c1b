"""Solver internals: parameter defaults, the dual, the oracle bank, full runs."""

import numpy as np
import pytest

from olfw.core import (
    OlfwConfig,
    ProblemConstants,
    build_action,
    confidence_margin,
    default_params,
    initial_state,
    lagrangian_grad,
    oga_feedback,
    resolve_params,
    run_olfw,
    surrogate_value,
    update_dual,
    update_empirical_mean,
)
from olfw.domains import unit_box
from olfw.errors import (
    DegenerateProblemError,
    DistributionViolationError,
    InputError,
    OlfwError,
)
from olfw.objectives import CallableUtility, generate_quadratic
from olfw.scenarios import scenario_custom, scenario_quadratic
from olfw.util import child_rng


def simple_constants(grad=2.0, diameter=1.0):
    return ProblemConstants(
        utility_grad_bound=grad,
        cost_norm_bound=1.0,
        smoothness=1.0,
        diameter=diameter,
        value_range=min(1.0, grad * diameter),
        surrogate_range=1.0,
    )


# ---------------------------------------------------------------------------
# Parameter derivation
# ---------------------------------------------------------------------------

def test_default_params_frozen_example():
    # grad bound 2, diameter 1, horizon 100:
    # step = 1 / (2 * 10), oracles = 10, penalty = 4
    step, inner, penalty = default_params(simple_constants(), horizon=100)
    assert step == pytest.approx(0.05, abs=1e-15)
    assert inner == 10
    assert penalty == pytest.approx(4.0, abs=1e-15)


def test_default_params_ceil_oracle_count():
    _, inner, _ = default_params(simple_constants(), horizon=10)
    assert inner == 4


def test_default_params_zero_gradient_degenerate():
    constants = ProblemConstants(
        utility_grad_bound=0.0, cost_norm_bound=0.0, smoothness=0.0,
        diameter=1.0, value_range=0.0, surrogate_range=1.0)
    with pytest.raises(DegenerateProblemError):
        default_params(constants, horizon=10)


def test_resolve_params_respects_overrides():
    config = OlfwConfig(horizon=100, budget_total=50.0, step_size=0.5,
                        inner_iters=3, penalty=7.0)
    assert resolve_params(config, simple_constants()) == (0.5, 3, 7.0)


def test_resolve_params_partial_override():
    config = OlfwConfig(horizon=100, budget_total=50.0, penalty=7.0)
    step, inner, penalty = resolve_params(config, simple_constants())
    assert step == pytest.approx(0.05)
    assert inner == 10
    assert penalty == pytest.approx(7.0)


def test_grad_bound_is_max_of_both():
    c = ProblemConstants(utility_grad_bound=1.0, cost_norm_bound=3.0,
                         smoothness=1.0, diameter=1.0, value_range=1.0,
                         surrogate_range=1.0)
    assert c.grad_bound == 3.0


# ---------------------------------------------------------------------------
# Confidence margin
# ---------------------------------------------------------------------------

def test_confidence_margin_frozen_values():
    # sqrt(2 * log(2 * 100 / 0.05) / t) with unit range
    assert confidence_margin(2, 1.0, 100, 0.05) == pytest.approx(2.8799392, abs=1e-6)
    assert confidence_margin(8, 1.0, 100, 0.05) == pytest.approx(1.4399696, abs=1e-6)


def test_confidence_margin_scales_with_range():
    base = confidence_margin(5, 1.0, 100, 0.05)
    assert confidence_margin(5, 3.0, 100, 0.05) == pytest.approx(3.0 * base, rel=1e-12)


def test_confidence_margin_requires_second_round():
    with pytest.raises(InputError):
        confidence_margin(1, 1.0, 100, 0.05)


def test_confidence_margin_decreases_in_t():
    values = [confidence_margin(t, 1.0, 1000, 0.05) for t in range(2, 50)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_confidence_margin_infinite_range():
    assert confidence_margin(5, np.inf, 100, 0.05) == np.inf


# ---------------------------------------------------------------------------
# Dual and surrogate
# ---------------------------------------------------------------------------

def test_update_dual_frozen_example():
    assert update_dual(1.0, 2.0, 0.1, t=3) == pytest.approx(5.0, abs=1e-15)


def test_update_dual_clamps_negative_surrogate():
    assert update_dual(-0.7, 2.0, 0.1, t=3) == 0.0


def test_update_dual_first_round_is_zero():
    assert update_dual(10.0, 2.0, 0.1, t=1) == 0.0


def test_surrogate_value_rules():
    mean = np.array([1.0, 2.0])
    x = np.array([0.5, 0.5])
    base = 1.5 - 1.0
    assert surrogate_value("I", mean, x, 1.0, margin=0.3) == pytest.approx(base)
    assert surrogate_value("II", mean, x, 1.0, margin=0.3) == pytest.approx(base - 0.3)


# ---------------------------------------------------------------------------
# Oracle bank mechanics
# ---------------------------------------------------------------------------

def test_build_action_prefix_averages():
    points = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    action, intermediates = build_action(points, 3)
    assert np.allclose(action, [2.0 / 3.0, 2.0 / 3.0], atol=1e-15)
    expected = np.array([[0.0, 0.0], [1.0 / 3.0, 0.0], [1.0 / 3.0, 1.0 / 3.0]])
    assert np.allclose(intermediates, expected, atol=1e-15)


def test_initial_state_shapes():
    state = initial_state(4, 3)
    assert state.oracle_points.shape == (4, 3)
    assert np.all(state.oracle_points == 0.0)
    assert state.observed == 0
    assert np.all(state.mean_cost == 0.0)
    assert state.dual == 0.0


def test_update_empirical_mean_matches_batch():
    rng = child_rng(920)
    samples = rng.uniform(0.0, 2.0, size=(10_000, 3))
    state = initial_state(1, 3)
    for s in samples:
        update_empirical_mean(state, s)
    assert state.observed == 10_000
    assert np.allclose(state.mean_cost, samples.mean(axis=0), atol=1e-12)


def test_update_empirical_mean_rejects_negative():
    state = initial_state(1, 2)
    with pytest.raises(DistributionViolationError):
        update_empirical_mean(state, np.array([0.5, -0.1]))


def test_lagrangian_grad_combines_terms():
    q = generate_quadratic(2, rng_seed=40)
    x = np.array([0.3, 0.6])
    mean = np.array([1.0, 2.0])
    g = lagrangian_grad(q, x, dual=1.5, mean_cost=mean)
    assert np.allclose(g, q.grad(x) - 1.5 * mean, atol=1e-12)


def test_oga_feedback_keeps_points_feasible():
    domain = unit_box(2)
    state = initial_state(3, 2)
    rng = child_rng(921)
    for _ in range(50):
        grads = rng.standard_normal((3, 2)) * 5.0
        oga_feedback(state, grads, step_size=0.7, domain=domain)
        for row in state.oracle_points:
            assert domain.contains(row, tol=1e-12)


# ---------------------------------------------------------------------------
# Config validation
# ---------------------------------------------------------------------------

def test_config_rejects_bad_epsilon():
    with pytest.raises(InputError, match="epsilon"):
        OlfwConfig(horizon=10, budget_total=5.0, epsilon=1.5)


def test_config_rejects_unknown_rule():
    with pytest.raises(InputError, match="update_rule"):
        OlfwConfig(horizon=10, budget_total=5.0, update_rule="III")


def test_config_manual_mode_requires_all_knobs():
    with pytest.raises(InputError, match="penalty"):
        OlfwConfig(horizon=10, budget_total=5.0, auto_params=False,
                   step_size=0.1, inner_iters=2)


def test_config_rejects_nonpositive_horizon():
    with pytest.raises(InputError):
        OlfwConfig(horizon=0, budget_total=5.0)


# ---------------------------------------------------------------------------
# Full runs
# ---------------------------------------------------------------------------

def test_run_is_deterministic():
    scenario = scenario_quadratic(seed=3, horizon=60)
    config = OlfwConfig(horizon=60, budget_total=scenario.budget_total)
    a = run_olfw(scenario, config, rng_seed=5)
    b = run_olfw(scenario, config, rng_seed=5)
    assert np.array_equal(a.actions, b.actions)
    assert np.array_equal(a.rewards, b.rewards)
    assert np.array_equal(a.sampled_costs, b.sampled_costs)
    assert np.array_equal(a.duals, b.duals)


def test_run_seeds_change_costs():
    scenario = scenario_quadratic(seed=3, horizon=60)
    config = OlfwConfig(horizon=60, budget_total=scenario.budget_total)
    a = run_olfw(scenario, config, rng_seed=5)
    b = run_olfw(scenario, config, rng_seed=6)
    assert not np.array_equal(a.sampled_costs, b.sampled_costs)


def test_run_trace_shapes_and_cumulants():
    scenario = scenario_quadratic(seed=1, horizon=40)
    config = OlfwConfig(horizon=40, budget_total=scenario.budget_total)
    trace = run_olfw(scenario, config, rng_seed=0)
    assert trace.actions.shape == (40, 2)
    assert np.allclose(trace.cum_utility, np.cumsum(trace.rewards), atol=1e-9)
    assert np.allclose(trace.cum_cost_mean, np.cumsum(trace.cost_mean), atol=1e-9)
    true_mean = scenario.constraint_dist.mean
    assert np.allclose(trace.cost_mean, trace.actions @ true_mean, atol=1e-12)
    # the recorded empirical mean lags one round behind the sample stream
    assert np.all(trace.mean_cost_rows[0] == 0.0)
    assert np.allclose(trace.mean_cost_rows[2],
                       trace.sampled_costs[:2].mean(axis=0), atol=1e-12)


def test_run_all_actions_feasible():
    scenario = scenario_quadratic(seed=2, horizon=50)
    config = OlfwConfig(horizon=50, budget_total=scenario.budget_total)
    trace = run_olfw(scenario, config, rng_seed=1)
    for x in trace.actions:
        assert scenario.domain.contains(x, tol=1e-8)


def test_force_zero_dual_pins_duals():
    scenario = scenario_quadratic(seed=2, horizon=50)
    config = OlfwConfig(horizon=50, budget_total=scenario.budget_total)
    trace = run_olfw(scenario, config, rng_seed=1, force_zero_dual=True,
                     algorithm="meta_fw")
    assert np.all(trace.duals == 0.0)
    assert trace.params["force_zero_dual"] is True
    assert trace.algorithm == "meta_fw"


def test_rule_expectation_has_zero_margins():
    scenario = scenario_quadratic(seed=2, horizon=30)
    config = OlfwConfig(horizon=30, budget_total=scenario.budget_total,
                        update_rule="I")
    trace = run_olfw(scenario, config, rng_seed=1)
    assert np.all(trace.margins == 0.0)


def test_rule_high_probability_margins_shrink():
    scenario = scenario_quadratic(seed=2, horizon=30)
    config = OlfwConfig(horizon=30, budget_total=scenario.budget_total,
                        update_rule="II")
    trace = run_olfw(scenario, config, rng_seed=1)
    assert trace.margins[0] == 0.0
    assert np.all(trace.margins[1:] > 0.0)
    assert np.all(np.diff(trace.margins[1:]) < 0.0)


def test_modular_utility_slack_budget_fills_box():
    # linear reward, budget never binding: the bank climbs to the top corner
    c = np.array([1.0, 0.8])
    utility = CallableUtility(n=2,
                              value_fn=lambda x: float(c @ x),
                              grad_fn=lambda x: c.copy())
    scenario = scenario_custom(utility, cost_lo=0.1, cost_hi=0.1,
                               horizon=500, budget_total=5000.0, seed=0)
    config = OlfwConfig(horizon=500, budget_total=5000.0)
    trace = run_olfw(scenario, config, rng_seed=0)
    assert np.all(trace.duals == 0.0)
    assert np.allclose(trace.actions[-1], [1.0, 1.0], atol=1e-2)


def test_zero_utility_plays_origin():
    utility = CallableUtility(n=2,
                              value_fn=lambda x: 0.0,
                              grad_fn=lambda x: np.zeros(2))
    scenario = scenario_custom(utility, cost_lo=0.2, cost_hi=0.4,
                               horizon=100, budget_total=30.0, seed=0)
    config = OlfwConfig(horizon=100, budget_total=30.0,
                        step_size=0.05, inner_iters=4, penalty=1.0)
    trace = run_olfw(scenario, config, rng_seed=0)
    assert np.all(trace.actions == 0.0)
    assert np.all(trace.rewards == 0.0)
    assert trace.total_mean_cost() == 0.0


class _StubStream:
    def __init__(self, utility, rounds):
        self.utility = utility
        self.rounds = rounds
        self.dim = utility.n

    def functions(self, rng_seed):
        for _ in range(self.rounds):
            yield self.utility


class _NegativeAtRound:
    """Cost sampler that turns negative on a chosen draw."""

    def __init__(self, bad_draw):
        self.mean = np.array([0.5, 0.5])
        self.dim = 2
        self.bad_draw = bad_draw
        self.count = 0

    def sample(self, rng):
        self.count += 1
        if self.count == self.bad_draw:
            return np.array([-0.1, 0.5])
        return np.array([0.5, 0.5])


def _stub_scenario(stream_rounds, dist):
    import olfw.scenarios as scen

    utility = generate_quadratic(2, rng_seed=50)
    return scen.Scenario(
        name="stub",
        domain=unit_box(2),
        utility_stream=_StubStream(utility, stream_rounds),
        constraint_dist=dist,
        horizon=5,
        budget_total=2.0,
        constants=simple_constants(),
        seed=0,
    )


def test_negative_cost_error_names_round():
    scenario = _stub_scenario(10, _NegativeAtRound(3))
    config = OlfwConfig(horizon=5, budget_total=2.0,
                        step_size=0.1, inner_iters=2, penalty=1.0)
    with pytest.raises(DistributionViolationError, match="round 3"):
        run_olfw(scenario, config, rng_seed=0)


def test_exhausted_stream_error_names_round():
    scenario = _stub_scenario(2, _NegativeAtRound(10**9))
    config = OlfwConfig(horizon=5, budget_total=2.0,
                        step_size=0.1, inner_iters=2, penalty=1.0)
    with pytest.raises(OlfwError, match="round 3"):
        run_olfw(scenario, config, rng_seed=0)
