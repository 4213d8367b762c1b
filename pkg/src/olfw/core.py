"""Online Lagrangian Frank-Wolfe.

A bank of projected online gradient ascent oracles is maintained across
rounds.  Each round averages the oracle outputs into the played action,
observes the sampled utility and cost, forms a budget surrogate from the
empirical cost mean, sets the dual multiplier in closed form, and feeds
the Lagrangian gradient at the matching intermediate point back to every
oracle.  A completed run is returned as a trace of per-round records plus
the oracle-level accumulators needed by the after-the-fact certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateProblemError,
    DistributionViolationError,
    InputError,
    OlfwError,
)
from .util import STREAM_CONSTRAINT, child_rng, kahan_cumsum

RULE_EXPECTATION = "I"        # surrogate from the empirical mean alone
RULE_HIGH_PROBABILITY = "II"  # empirical mean shrunk by a confidence margin

CONTAINMENT_TOL = 1e-8


@dataclass(frozen=True)
class ProblemConstants:
    """Instance-level bounds that size the step, penalty, and margins.

    utility_grad_bound caps the gradient norm of every round utility,
    cost_norm_bound caps the norm of every sampled cost vector, and
    grad_bound is the larger of the two.  smoothness bounds the utility
    Hessian spectral norm, diameter is the feasible set diameter,
    value_range bounds |f(x)| over the domain, and surrogate_range bounds
    the absolute budget surrogate |<p, x> - budget/horizon|.
    """

    utility_grad_bound: float
    cost_norm_bound: float
    smoothness: float
    diameter: float
    value_range: float
    surrogate_range: float

    def __post_init__(self):
        for name in (
            "utility_grad_bound",
            "cost_norm_bound",
            "smoothness",
            "diameter",
            "value_range",
            "surrogate_range",
        ):
            v = getattr(self, name)
            if not np.isfinite(v) and not (name == "surrogate_range" and v == np.inf):
                raise InputError("constant %s must be finite, got %r" % (name, v))
            if v < 0.0:
                raise InputError("constant %s must be nonnegative, got %r" % (name, v))
        # value_range can never exceed grad_bound * diameter for a monotone
        # utility anchored at f(0) >= 0
        if self.value_range > self.grad_bound * self.diameter + 1e-9:
            raise InputError(
                "value_range %g exceeds grad_bound*diameter %g"
                % (self.value_range, self.grad_bound * self.diameter)
            )

    @property
    def grad_bound(self) -> float:
        return max(self.utility_grad_bound, self.cost_norm_bound)


@dataclass(frozen=True)
class OlfwConfig:
    """Run parameters.

    step_size, inner_iters, and penalty may be left as None when
    auto_params is on; they are then derived from the problem constants
    at run time.  Explicitly set fields always win over the derived
    defaults, so a sweep can pin one knob while the rest stay automatic.
    """

    horizon: int
    budget_total: float
    update_rule: str = RULE_HIGH_PROBABILITY
    epsilon: float = 0.05
    step_size: float | None = None
    inner_iters: int | None = None
    penalty: float | None = None
    auto_params: bool = True

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise InputError("horizon must be a positive integer, got %r" % (self.horizon,))
        if not self.budget_total > 0.0:
            raise InputError("budget_total must be positive, got %r" % (self.budget_total,))
        if self.update_rule not in (RULE_EXPECTATION, RULE_HIGH_PROBABILITY):
            raise InputError(
                "update_rule must be %r or %r, got %r"
                % (RULE_EXPECTATION, RULE_HIGH_PROBABILITY, self.update_rule)
            )
        if not 0.0 < self.epsilon < 1.0:
            raise InputError("epsilon must lie in (0, 1), got %r" % (self.epsilon,))
        if self.step_size is not None and not self.step_size > 0.0:
            raise InputError("step_size must be positive, got %r" % (self.step_size,))
        if self.inner_iters is not None and (
            int(self.inner_iters) != self.inner_iters or self.inner_iters < 1
        ):
            raise InputError(
                "inner_iters must be a positive integer, got %r" % (self.inner_iters,)
            )
        if self.penalty is not None and not self.penalty > 0.0:
            raise InputError("penalty must be positive, got %r" % (self.penalty,))
        if not self.auto_params:
            missing = [
                name
                for name in ("step_size", "inner_iters", "penalty")
                if getattr(self, name) is None
            ]
            if missing:
                raise InputError(
                    "auto_params is off but %s not set" % ", ".join(missing)
                )


def default_params(constants: ProblemConstants, horizon: int) -> tuple[float, int, float]:
    """Derive (step_size, inner_iters, penalty) from the instance bounds.

    step_size = diameter / (grad_bound * sqrt(horizon)), inner_iters is
    sqrt(horizon) rounded up to stay integral, penalty = grad_bound**2.
    """
    if horizon < 1:
        raise InputError("horizon must be at least 1, got %r" % (horizon,))
    beta = constants.grad_bound
    if beta <= 0.0:
        raise DegenerateProblemError(
            "gradient bound is zero; the default step size is undefined"
        )
    root = math.sqrt(float(horizon))
    step_size = constants.diameter / (beta * root)
    inner_iters = int(math.ceil(root - 1e-12))
    penalty = beta * beta
    return step_size, inner_iters, penalty


def resolve_params(config: OlfwConfig, constants: ProblemConstants) -> tuple[float, int, float]:
    """Fill any unset algorithm knobs from the defaults."""
    if None not in (config.step_size, config.inner_iters, config.penalty):
        return float(config.step_size), int(config.inner_iters), float(config.penalty)
    step_size, inner_iters, penalty = default_params(constants, config.horizon)
    if config.step_size is not None:
        step_size = float(config.step_size)
    if config.inner_iters is not None:
        inner_iters = int(config.inner_iters)
    if config.penalty is not None:
        penalty = float(config.penalty)
    return step_size, inner_iters, penalty


def confidence_margin(t: int, range_bound: float, horizon: int, epsilon: float) -> float:
    """Shrinking deviation allowance for the empirical cost mean at round t.

    The margin sqrt(2 * range_bound**2 * log(2 * horizon / epsilon) / t)
    makes the surrogate conservative except with per-round probability
    epsilon / horizon.  Undefined before the mean has a sample (t < 2).
    """
    if t < 2:
        raise InputError("confidence margin needs t >= 2, got t=%r" % (t,))
    if range_bound == np.inf:
        return np.inf
    # t - 1 samples have been folded into the mean at round t; the bound
    # is stated in terms of the round index itself
    return math.sqrt(2.0 * range_bound * range_bound * math.log(2.0 * horizon / epsilon) / t)


@dataclass
class OlfwState:
    """Mutable per-run state: the oracle bank, cost mean, and dual."""

    round_index: int
    oracle_points: np.ndarray  # (K, n), every row feasible
    cost_sum: np.ndarray       # (n,) compensated sum of observed cost vectors
    cost_comp: np.ndarray      # (n,) Kahan correction for cost_sum
    observed: int              # cost vectors folded into the mean
    mean_cost: np.ndarray      # (n,) cost_sum / observed, zeros before any sample
    dual: float = 0.0


def initial_state(inner_iters: int, n: int) -> OlfwState:
    # oracle points start at the origin, feasible by assumption
    return OlfwState(
        round_index=1,
        oracle_points=np.zeros((inner_iters, n)),
        cost_sum=np.zeros(n),
        cost_comp=np.zeros(n),
        observed=0,
        mean_cost=np.zeros(n),
    )


def update_empirical_mean(state: OlfwState, cost_sample) -> None:
    """Fold one observed cost vector into the running mean.

    Kahan-compensated so ten thousand incremental updates match the batch
    mean to full precision.
    """
    sample = np.asarray(cost_sample, dtype=float)
    if np.any(sample < 0.0):
        raise DistributionViolationError(
            "observed cost vector has negative entries: %s" % (sample,)
        )
    y = sample - state.cost_comp
    total = state.cost_sum + y
    state.cost_comp = (total - state.cost_sum) - y
    state.cost_sum = total
    state.observed += 1
    state.mean_cost = state.cost_sum / state.observed


def surrogate_value(update_rule: str, mean_cost, x, per_round_budget: float, margin: float) -> float:
    """Budget surrogate at x: estimated spend minus the per-round budget.

    The high-probability rule additionally subtracts the confidence
    margin, tightening the constraint while the mean is uncertain.
    """
    value = float(np.dot(mean_cost, x)) - per_round_budget
    if update_rule == RULE_HIGH_PROBABILITY:
        value -= margin
    return value


def update_dual(surrogate_at_action: float, penalty: float, step_size: float, t: int) -> float:
    """Closed-form dual: positive part of the surrogate over penalty*step.

    Round 1 has no cost observation yet, so the dual stays at zero there.
    """
    if t <= 1:
        return 0.0
    return max(surrogate_at_action, 0.0) / (penalty * step_size)


def build_action(oracle_points: np.ndarray, inner_iters: int) -> tuple[np.ndarray, np.ndarray]:
    """Average the oracle outputs into the played action.

    Returns the final action (the mean of all oracle points) and the K
    intermediate partial averages, the k-th being the point at which
    oracle k's gradient feedback is evaluated.
    """
    prefix = np.cumsum(oracle_points, axis=0) / float(inner_iters)
    intermediates = np.vstack([np.zeros((1, oracle_points.shape[1])), prefix[:-1]])
    return prefix[-1], intermediates


def lagrangian_grad(utility, x, dual: float, mean_cost) -> np.ndarray:
    """Gradient of the penalized objective in x: grad f(x) - dual * mean."""
    return utility.grad(x) - dual * np.asarray(mean_cost, dtype=float)


def oga_feedback(state: OlfwState, grads: np.ndarray, step_size: float, domain) -> None:
    """Projected ascent step for every oracle with its own gradient row."""
    state.oracle_points = domain.project_rows(state.oracle_points + step_size * grads)


@dataclass(frozen=True)
class RunTrace:
    """Complete record of one run, one row per round plus oracle totals.

    Array shapes use T for the horizon, n for the dimension, and K for
    the oracle count.  oracle_* fields carry the accumulators needed to
    certify the per-oracle regret bound and the master inequality after
    the run; they are None for policies without an oracle bank.
    """

    algorithm: str
    horizon: int
    budget_total: float
    params: dict
    actions: np.ndarray          # (T, n)
    rewards: np.ndarray          # (T,)
    sampled_costs: np.ndarray    # (T, n)
    cost_realized: np.ndarray    # (T,) <p_t, x_t>
    cost_mean: np.ndarray        # (T,) <p, x_t> against the true mean
    duals: np.ndarray            # (T,)
    surrogates: np.ndarray       # (T,) surrogate value at the played action
    margins: np.ndarray          # (T,) confidence margin, 0 under rule I
    mean_cost_rows: np.ndarray   # (T, n) empirical mean used in round t
    cum_utility: np.ndarray      # (T,) compensated running reward sum
    cum_cost_mean: np.ndarray    # (T,) compensated running mean-cost sum
    oracle_dots: np.ndarray | None = None       # (T, K) <grad, point> per oracle
    oracle_sqnorms: np.ndarray | None = None    # (T, K) squared gradient norms
    oracle_grad_sums: np.ndarray | None = None  # (K, n) summed gradients
    notes: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.actions.shape[1]

    def total_reward(self) -> float:
        return float(self.cum_utility[-1])

    def total_mean_cost(self) -> float:
        return float(self.cum_cost_mean[-1])


def _round_error(exc: OlfwError, t: int) -> OlfwError:
    # keep the concrete error type when it takes a plain message
    message = "round %d: %s" % (t, exc)
    try:
        return type(exc)(message)
    except TypeError:
        return OlfwError(message)


def run_olfw(scenario, config: OlfwConfig, rng_seed: int,
             force_zero_dual: bool = False, algorithm: str = "olfw") -> RunTrace:
    """Run the full algorithm for config.horizon rounds and return the trace.

    The constraint sampler draws from its own child stream of rng_seed so
    that adding other consumers of randomness cannot perturb the cost
    sequence.  With force_zero_dual the dual is pinned at zero every
    round, which turns the run into unconstrained meta Frank-Wolfe while
    still sampling and recording the cost stream.
    """
    domain = scenario.domain
    n = domain.dim
    constants = scenario.constants
    step_size, inner_iters, penalty = resolve_params(config, constants)
    horizon = int(config.horizon)
    per_round_budget = config.budget_total / horizon
    rule = config.update_rule
    high_prob = rule == RULE_HIGH_PROBABILITY

    constraint_rng = child_rng(STREAM_CONSTRAINT, rng_seed)
    utilities = scenario.utility_stream.functions(rng_seed)
    state = initial_state(inner_iters, n)

    actions = np.empty((horizon, n))
    rewards = np.empty(horizon)
    sampled_costs = np.empty((horizon, n))
    cost_realized = np.empty(horizon)
    cost_mean_col = np.empty(horizon)
    duals = np.empty(horizon)
    surrogates = np.empty(horizon)
    margins = np.empty(horizon)
    mean_cost_rows = np.empty((horizon, n))
    oracle_dots = np.empty((horizon, inner_iters))
    oracle_sqnorms = np.empty((horizon, inner_iters))
    oracle_grad_sums = np.zeros((inner_iters, n))

    true_mean = scenario.constraint_dist.mean

    for t in range(1, horizon + 1):
        try:
            try:
                utility = next(utilities)
            except StopIteration:
                raise InputError("utility stream exhausted") from None
            cost_sample = scenario.constraint_dist.sample(constraint_rng)

            x, intermediates = build_action(state.oracle_points, inner_iters)
            if not domain.contains(x, CONTAINMENT_TOL):
                raise OlfwError("played action left the feasible set")

            margin = 0.0
            if high_prob and t >= 2:
                margin = confidence_margin(
                    t, constants.surrogate_range, horizon, config.epsilon
                )
            surrogate = surrogate_value(
                rule, state.mean_cost, x, per_round_budget, margin
            )
            dual = 0.0 if force_zero_dual else update_dual(
                surrogate, penalty, step_size, t
            )
            state.dual = dual
            state.round_index = t

            grads = utility.grad_rows(intermediates)
            if dual != 0.0:
                grads = grads - dual * state.mean_cost

            idx = t - 1
            actions[idx] = x
            rewards[idx] = utility.value(x)
            sampled_costs[idx] = cost_sample
            cost_realized[idx] = float(np.dot(cost_sample, x))
            cost_mean_col[idx] = float(np.dot(true_mean, x))
            duals[idx] = dual
            surrogates[idx] = surrogate
            margins[idx] = margin
            mean_cost_rows[idx] = state.mean_cost
            oracle_dots[idx] = np.einsum("ij,ij->i", grads, state.oracle_points)
            oracle_sqnorms[idx] = np.einsum("ij,ij->i", grads, grads)
            oracle_grad_sums += grads

            oga_feedback(state, grads, step_size, domain)
            update_empirical_mean(state, cost_sample)
        except OlfwError as exc:
            raise _round_error(exc, t) from exc

    params = {
        "algorithm": algorithm,
        "step_size": step_size,
        "inner_iters": inner_iters,
        "penalty": penalty,
        "update_rule": rule,
        "epsilon": config.epsilon,
        "rng_seed": int(rng_seed),
        "auto_params": config.auto_params,
        "force_zero_dual": force_zero_dual,
    }
    return RunTrace(
        algorithm=algorithm,
        horizon=horizon,
        budget_total=float(config.budget_total),
        params=params,
        actions=actions,
        rewards=rewards,
        sampled_costs=sampled_costs,
        cost_realized=cost_realized,
        cost_mean=cost_mean_col,
        duals=duals,
        surrogates=surrogates,
        margins=margins,
        mean_cost_rows=mean_cost_rows,
        cum_utility=kahan_cumsum(rewards),
        cum_cost_mean=kahan_cumsum(cost_mean_col),
        oracle_dots=oracle_dots,
        oracle_sqnorms=oracle_sqnorms,
        oracle_grad_sums=oracle_grad_sums,
    )
