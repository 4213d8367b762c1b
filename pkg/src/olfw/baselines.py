"""Comparison policies sharing the run-trace contract.

Four strategies: uniform random slates, an explore-exploit greedy on
observed ratings, unconstrained meta Frank-Wolfe (the main algorithm with
the dual pinned at zero), and a budget-cautious rule picking the
cheapest-looking items.  All emit the same trace schema as the main
algorithm so metrics and plots stay policy-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    RULE_EXPECTATION,
    RunTrace,
    initial_state,
    run_olfw,
    surrogate_value,
    update_empirical_mean,
)
from .errors import InputError, OlfwError
from .util import STREAM_CONSTRAINT, STREAM_POLICY, child_rng, kahan_cumsum

KIND_UNIFORM = "uniform"
KIND_GREEDY = "greedy"
KIND_META_FW = "meta_fw"
KIND_BUDGET_CAUTIOUS = "budget_cautious"

BASELINE_KINDS = (KIND_UNIFORM, KIND_GREEDY, KIND_META_FW, KIND_BUDGET_CAUTIOUS)

# running-mean prior for never-shown items, the midpoint of the rescaled
# [0, 10] rating scale
UNSEEN_RATING_PRIOR = 5.0


@dataclass(frozen=True)
class BaselinePolicy:
    """Which strategy to run and its knobs.

    slots is the number of items selected per round; explore_prob only
    matters for the greedy policy.
    """

    kind: str
    slots: int = 15
    explore_prob: float = 0.1

    def __post_init__(self):
        if self.kind not in BASELINE_KINDS:
            raise InputError(
                "unknown baseline kind %r, expected one of %s"
                % (self.kind, ", ".join(BASELINE_KINDS))
            )
        if int(self.slots) != self.slots or self.slots < 1:
            raise InputError("slots must be a positive integer, got %r" % (self.slots,))
        if not 0.0 <= self.explore_prob <= 1.0:
            raise InputError(
                "explore_prob must lie in [0, 1], got %r" % (self.explore_prob,)
            )


def uniform_action(n: int, slots: int, rng) -> np.ndarray:
    """Indicator of a uniformly random slots-subset of the n items."""
    if slots > n:
        raise InputError("slots %d exceeds the number of items %d" % (slots, n))
    action = np.zeros(n)
    action[rng.choice(n, size=slots, replace=False)] = 1.0
    return action


def _top_slots(scores: np.ndarray, slots: int) -> np.ndarray:
    # stable top-slots: highest score first, ties to the lowest index
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    action = np.zeros(scores.shape[0])
    action[order[:slots]] = 1.0
    return action


def greedy_action(observed_mean_ratings, slots: int, explore_prob: float, rng) -> np.ndarray:
    """Explore uniformly with probability explore_prob, else pick the
    items with the highest running-mean observed rating."""
    means = np.asarray(observed_mean_ratings, dtype=float)
    if slots > means.shape[0]:
        raise InputError(
            "slots %d exceeds the number of items %d" % (slots, means.shape[0])
        )
    if rng.random() < explore_prob:
        return uniform_action(means.shape[0], slots, rng)
    return _top_slots(means, slots)


def budget_cautious_action(observed_mean_costs, slots: int) -> np.ndarray:
    """Indicator of the slots items with the smallest running-mean cost,
    ties to the lowest index; with no observations yet all means tie."""
    means = np.asarray(observed_mean_costs, dtype=float)
    if slots > means.shape[0]:
        raise InputError(
            "slots %d exceeds the number of items %d" % (slots, means.shape[0])
        )
    return _top_slots(-means, slots)


def meta_fw_run(scenario, config, rng_seed: int) -> RunTrace:
    """Unconstrained run: the dual is forced to zero every round while the
    cost stream is still sampled and recorded for violation accounting."""
    return run_olfw(
        scenario, config, rng_seed, force_zero_dual=True, algorithm=KIND_META_FW
    )


def _rating_vector(utility) -> np.ndarray:
    # greedy observes the per-item ratings of the round, the linear part
    # of the round utility
    vec = getattr(utility, "vec", None)
    if vec is None:
        raise InputError(
            "greedy needs round utilities exposing per-item ratings (vec)"
        )
    return np.asarray(vec, dtype=float)


def run_policy(scenario, policy: BaselinePolicy, config, rng_seed: int) -> RunTrace:
    """Run a slate baseline for config.horizon rounds on the scenario.

    The constraint and utility streams are derived from rng_seed exactly
    as in the main algorithm, so on a shared seed every policy faces the
    same costs and the same round utilities.  meta_fw delegates to the
    main loop with the dual pinned at zero.
    """
    if policy.kind == KIND_META_FW:
        return meta_fw_run(scenario, config, rng_seed)

    domain = scenario.domain
    n = domain.dim
    if policy.slots > n:
        raise InputError("slots %d exceeds the dimension %d" % (policy.slots, n))
    horizon = int(config.horizon)
    per_round_budget = config.budget_total / horizon

    constraint_rng = child_rng(STREAM_CONSTRAINT, rng_seed)
    policy_rng = child_rng(STREAM_POLICY, rng_seed)
    utilities = scenario.utility_stream.functions(rng_seed)
    state = initial_state(1, n)

    greedy = policy.kind == KIND_GREEDY
    rating_sum = np.zeros(n)
    rating_count = np.zeros(n, dtype=int)

    actions = np.empty((horizon, n))
    rewards = np.empty(horizon)
    sampled_costs = np.empty((horizon, n))
    cost_realized = np.empty(horizon)
    cost_mean_col = np.empty(horizon)
    surrogates = np.empty(horizon)
    mean_cost_rows = np.empty((horizon, n))
    true_mean = scenario.constraint_dist.mean

    for t in range(1, horizon + 1):
        try:
            try:
                utility = next(utilities)
            except StopIteration:
                raise InputError("utility stream exhausted") from None
            cost_sample = scenario.constraint_dist.sample(constraint_rng)

            if policy.kind == KIND_UNIFORM:
                x = uniform_action(n, policy.slots, policy_rng)
            elif greedy:
                shown = rating_count > 0
                means = np.full(n, UNSEEN_RATING_PRIOR)
                means[shown] = rating_sum[shown] / rating_count[shown]
                x = greedy_action(means, policy.slots, policy.explore_prob, policy_rng)
            else:
                x = budget_cautious_action(state.mean_cost, policy.slots)

            idx = t - 1
            actions[idx] = x
            rewards[idx] = utility.value(x)
            sampled_costs[idx] = cost_sample
            cost_realized[idx] = float(np.dot(cost_sample, x))
            cost_mean_col[idx] = float(np.dot(true_mean, x))
            surrogates[idx] = surrogate_value(
                RULE_EXPECTATION, state.mean_cost, x, per_round_budget, 0.0
            )
            mean_cost_rows[idx] = state.mean_cost

            if greedy:
                shown_now = x > 0.5
                rating_sum[shown_now] += _rating_vector(utility)[shown_now]
                rating_count[shown_now] += 1
            update_empirical_mean(state, cost_sample)
        except OlfwError as exc:
            raise type(exc)("round %d: %s" % (t, exc)) from exc

    params = {
        "algorithm": policy.kind,
        "slots": int(policy.slots),
        "explore_prob": float(policy.explore_prob),
        "rng_seed": int(rng_seed),
    }
    zeros = np.zeros(horizon)
    return RunTrace(
        algorithm=policy.kind,
        horizon=horizon,
        budget_total=float(config.budget_total),
        params=params,
        actions=actions,
        rewards=rewards,
        sampled_costs=sampled_costs,
        cost_realized=cost_realized,
        cost_mean=cost_mean_col,
        duals=zeros,
        surrogates=surrogates,
        margins=zeros.copy(),
        mean_cost_rows=mean_cost_rows,
        cum_utility=kahan_cumsum(rewards),
        cum_cost_mean=kahan_cumsum(cost_mean_col),
    )
