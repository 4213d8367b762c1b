"""Benchmarks, metrics, concentration validators, and scaling studies.

The offline Frank-Wolfe benchmark fixes the comparator, the two metrics
are regret against (1 - 1/e) times the benchmark total and cumulative
budget violation against the true mean cost, and the validators certify
the concentration facts and the master inequality that a correct run
must satisfy pathwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    OlfwConfig,
    ProblemConstants,
    RunTrace,
    confidence_margin,
    run_olfw,
)
from .domains import Domain, with_budget_halfspace
from .errors import InputError
from .util import STREAM_VALIDATOR, child_rng, parallel_map

APPROX_RATIO = 1.0 - 1.0 / math.e

BENCHMARK_FEASIBILITY_TOL = 1e-6
CERTIFICATE_REL_TOL = 1e-6
SLOPE_CLAMP = 1.0


# ---------------------------------------------------------------------------
# Offline benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchmarkResult:
    """Fixed comparator: the offline Frank-Wolfe point and its total value."""

    x_star: np.ndarray
    total_value: float
    offline_iterations: int


def benchmark_domain(domain: Domain, mean_cost, per_round_budget: float) -> Domain:
    """The feasible set intersected with mean spend <= per-round budget."""
    if per_round_budget < 0.0:
        raise InputError(
            "per-round budget must be nonnegative, got %r" % (per_round_budget,)
        )
    return with_budget_halfspace(domain, mean_cost, per_round_budget)


def solve_benchmark(avg_utility, x_star_domain: Domain,
                    offline_iters: int = 100, horizon: int = 1) -> BenchmarkResult:
    """Offline Frank-Wolfe on the averaged utility over the budgeted set.

    Starts at the origin and takes offline_iters linear-oracle steps of
    length 1/offline_iters; the endpoint carries the (1 - 1/e)
    approximation quality that the regret definition is stated against.
    """
    if offline_iters < 1:
        raise InputError("offline_iters must be >= 1, got %r" % (offline_iters,))
    x = np.zeros(x_star_domain.dim)
    for _ in range(offline_iters):
        v = x_star_domain.lmo(avg_utility.grad(x))
        x = x + v / offline_iters
    if not x_star_domain.contains(x, BENCHMARK_FEASIBILITY_TOL):
        raise InputError("benchmark endpoint left the budgeted feasible set")
    return BenchmarkResult(
        x_star=x,
        total_value=float(horizon) * avg_utility.value(x),
        offline_iterations=int(offline_iters),
    )


def benchmark_for_scenario(scenario, rng_seed: int,
                           offline_iters: int = 100) -> BenchmarkResult:
    """Benchmark against the realized utility average of one seeded run."""
    avg = scenario.utility_stream.average(rng_seed, scenario.horizon)
    constrained = benchmark_domain(
        scenario.domain,
        scenario.constraint_dist.mean,
        scenario.budget_total / scenario.horizon,
    )
    return solve_benchmark(avg, constrained, offline_iters, horizon=scenario.horizon)


def fixed_point_values(scenario, rng_seed: int, x, horizon: int | None = None) -> np.ndarray:
    """Per-round utility values at a fixed action, replaying the seeded stream.

    The pathwise certificates need f_t(x) for every round at the comparator
    point; replaying the stream with the run's seed reproduces the exact
    utility sequence the run saw.
    """
    h = scenario.horizon if horizon is None else int(horizon)
    x = np.asarray(x, dtype=float)
    stream = scenario.utility_stream.functions(rng_seed)
    values = np.empty(h)
    for i in range(h):
        try:
            utility = next(stream)
        except StopIteration:
            raise InputError("utility stream exhausted at round %d" % (i + 1,)) from None
        values[i] = utility.value(x)
    return values


def grid_benchmark(avg_utility, x_star_domain: Domain,
                   step: float = 0.01, horizon: int = 1) -> BenchmarkResult:
    """Brute-force grid maximum for low-dimensional calibration (n <= 3)."""
    n = x_star_domain.dim
    if n > 3:
        raise InputError("grid benchmark is limited to n <= 3, got n=%d" % (n,))
    axes = [
        np.arange(x_star_domain.lower[i], x_star_domain.upper[i] + 0.5 * step, step)
        for i in range(n)
    ]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    best_x = np.zeros(n)
    best_v = avg_utility.value(best_x)
    for point in mesh:
        if not x_star_domain.contains(point, BENCHMARK_FEASIBILITY_TOL):
            continue
        value = avg_utility.value(point)
        if value > best_v:
            best_v = value
            best_x = point
    return BenchmarkResult(
        x_star=np.asarray(best_x, dtype=float),
        total_value=float(horizon) * best_v,
        offline_iterations=0,
    )


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricsReport:
    regret: float
    violation: float
    positive_violation: float
    cumulative_utility: float
    benchmark: BenchmarkResult


def compute_regret(trace: RunTrace, bench: BenchmarkResult) -> float:
    """Shortfall versus (1 - 1/e) times the benchmark total; unclamped."""
    return APPROX_RATIO * bench.total_value - trace.total_reward()


def compute_violation(trace: RunTrace, mean_cost, budget_total: float) -> tuple[float, float]:
    """Cumulative spend against the true mean cost, minus the budget.

    Returns the signed violation and the sum of per-round positive parts,
    the latter for scaling studies.
    """
    per_round = trace.actions @ np.asarray(mean_cost, dtype=float)
    budget_per_round = budget_total / trace.horizon
    violation = float(np.sum(per_round)) - budget_total
    positive = float(np.sum(np.clip(per_round - budget_per_round, 0.0, None)))
    return violation, positive


def metrics_report(trace: RunTrace, bench: BenchmarkResult, mean_cost,
                   budget_total: float) -> MetricsReport:
    violation, positive = compute_violation(trace, mean_cost, budget_total)
    return MetricsReport(
        regret=compute_regret(trace, bench),
        violation=violation,
        positive_violation=positive,
        cumulative_utility=trace.total_reward(),
        benchmark=bench,
    )


# ---------------------------------------------------------------------------
# Concentration validators
# ---------------------------------------------------------------------------

def monte_carlo_mean_error(dist, t: int, replicas: int, rng_seed: int) -> float:
    """Average squared distance between the empirical cost mean after t - 1
    samples and the true mean, across replicas."""
    if t < 2:
        raise InputError("mean-error estimate needs t >= 2, got %r" % (t,))
    if replicas < 1:
        raise InputError("replicas must be >= 1, got %r" % (replicas,))
    rng = child_rng(STREAM_VALIDATOR, rng_seed)
    draws = dist.sample_batch(rng, replicas * (t - 1))
    means = draws.reshape(replicas, t - 1, dist.dim).mean(axis=1)
    errors = np.sum((means - dist.mean) ** 2, axis=1)
    return float(errors.mean())


def expected_mean_error(dist, t: int) -> float:
    """Closed form for the same quantity: covariance trace over t - 1."""
    if t < 2:
        raise InputError("mean-error law needs t >= 2, got %r" % (t,))
    return dist.trace_covariance / (t - 1)


@dataclass(frozen=True)
class CoverageReport:
    """Empirical failure frequencies of the confidence margin."""

    per_round_frequency: np.ndarray  # index 0 is round 2
    per_round_stderr: np.ndarray
    union_frequency: float
    epsilon: float
    horizon: int
    replicas: int

    @property
    def worst_round_frequency(self) -> float:
        return float(self.per_round_frequency.max())


def coverage_check(dist, x, horizon: int, epsilon: float, replicas: int,
                   rng_seed: int, range_bound: float) -> CoverageReport:
    """Frequency of the margin failing to cover the empirical-mean error.

    For each replica stream, the failure event at round t is that the
    empirical-mean surrogate at the fixed point x drifts from its true
    value by more than the round-t confidence margin.  The guarantee is a
    per-round failure probability of at most epsilon / horizon.
    """
    if horizon < 2:
        raise InputError("coverage check needs horizon >= 2, got %r" % (horizon,))
    if replicas < 1:
        raise InputError("replicas must be >= 1, got %r" % (replicas,))
    x = np.asarray(x, dtype=float)
    rng = child_rng(STREAM_VALIDATOR, rng_seed)
    draws = dist.sample_batch(rng, replicas * (horizon - 1))
    draws = draws.reshape(replicas, horizon - 1, dist.dim)
    counts = np.arange(1, horizon, dtype=float)[None, :, None]
    prefix_means = np.cumsum(draws, axis=1) / counts
    drift = np.abs((prefix_means - dist.mean) @ x)
    margins = np.array([
        confidence_margin(t, range_bound, horizon, epsilon)
        for t in range(2, horizon + 1)
    ])
    failures = drift > margins
    freq = failures.mean(axis=0)
    stderr = np.sqrt(freq * (1.0 - freq) / replicas)
    return CoverageReport(
        per_round_frequency=freq,
        per_round_stderr=stderr,
        union_frequency=float(failures.any(axis=1).mean()),
        epsilon=float(epsilon),
        horizon=int(horizon),
        replicas=int(replicas),
    )


# ---------------------------------------------------------------------------
# Pathwise certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MasterInequalityReport:
    lhs: float
    rhs: float
    holds: bool
    slack: float
    dual_surrogate_sum: float


def check_master_inequality(trace: RunTrace, x_fixed, constants: ProblemConstants,
                            f_values_at_x) -> MasterInequalityReport:
    """Pathwise certificate tying the played rewards to any fixed point.

    With the penalty set to the squared gradient bound, the total reward
    shortfall against (1 - 1/e) times the fixed point's value is bounded
    by the smoothness, step, and penalty terms plus the dual-weighted
    surrogate values at the fixed point.  Holding on every run is the
    strongest end-to-end correctness check available.
    """
    params = trace.params
    penalty = float(params["penalty"])
    step_size = float(params["step_size"])
    inner_iters = int(params["inner_iters"])
    beta = constants.grad_bound
    if not math.isclose(penalty, beta * beta, rel_tol=1e-9, abs_tol=0.0):
        raise InputError(
            "certificate requires penalty == grad_bound**2 (%g vs %g)"
            % (penalty, beta * beta)
        )
    x_fixed = np.asarray(x_fixed, dtype=float)
    f_values = np.asarray(f_values_at_x, dtype=float)
    if f_values.shape[0] != trace.horizon:
        raise InputError(
            "need one fixed-point value per round: got %d for horizon %d"
            % (f_values.shape[0], trace.horizon)
        )

    lhs = float(APPROX_RATIO * np.sum(f_values) - np.sum(trace.rewards))
    per_round_budget = trace.budget_total / trace.horizon
    surrogate_at_fixed = (
        trace.mean_cost_rows @ x_fixed - per_round_budget - trace.margins
    )
    dual_term = float(np.sum(trace.duals * surrogate_at_fixed))
    r = constants.diameter
    rhs = (
        constants.smoothness * r * r * trace.horizon / (2.0 * inner_iters)
        + r * r / step_size
        + beta * beta * step_size * trace.horizon
        + dual_term
    )
    slack = rhs - lhs
    return MasterInequalityReport(
        lhs=lhs,
        rhs=rhs,
        holds=lhs <= rhs + CERTIFICATE_REL_TOL * abs(rhs),
        slack=slack,
        dual_surrogate_sum=dual_term,
    )


@dataclass(frozen=True)
class OracleRegretReport:
    lhs: np.ndarray  # per-oracle realized linear regret against the fixed point
    rhs: np.ndarray  # per-oracle bound
    holds: bool


def check_oracle_regret(trace: RunTrace, x_fixed,
                        constants: ProblemConstants) -> OracleRegretReport:
    """Realized projected-ascent regret bound for every oracle instance.

    For oracle k the summed payoff gap against any fixed feasible point is
    at most diameter**2 / step plus step / 2 times the summed squared
    gradient norms, pathwise on every completed run.
    """
    if trace.oracle_dots is None:
        raise InputError("trace carries no oracle accumulators")
    x_fixed = np.asarray(x_fixed, dtype=float)
    step_size = float(trace.params["step_size"])
    lhs = trace.oracle_grad_sums @ x_fixed - np.sum(trace.oracle_dots, axis=0)
    r = constants.diameter
    rhs = r * r / step_size + 0.5 * step_size * np.sum(trace.oracle_sqnorms, axis=0)
    holds = bool(np.all(lhs <= rhs + CERTIFICATE_REL_TOL * np.abs(rhs)))
    return OracleRegretReport(lhs=lhs, rhs=rhs, holds=holds)


# ---------------------------------------------------------------------------
# Scaling studies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingRow:
    horizon: int
    mean_regret: float
    max_regret: float
    mean_violation: float
    mean_positive_violation: float
    max_positive_violation: float


@dataclass(frozen=True)
class ScalingStudy:
    rows: tuple
    regret_slope: float
    violation_slope: float
    regret_clamped: int
    violation_clamped: int


def fit_loglog_slope(horizons, values, clamp: float = SLOPE_CLAMP) -> tuple[float, int]:
    """Least-squares slope of log(max(value, clamp)) against log(horizon)."""
    horizons = np.asarray(horizons, dtype=float)
    values = np.asarray(values, dtype=float)
    clamped = int(np.count_nonzero(values < clamp))
    logs = np.log(np.maximum(values, clamp))
    slope = float(np.polyfit(np.log(horizons), logs, 1)[0])
    return slope, clamped


def scaling_study(scenario_family, horizons, seeds, update_rule: str,
                  offline_iters: int = 100) -> ScalingStudy:
    """Run each horizon at each seed with derived parameters and fit the
    growth rates of the regret and the positive violation.

    scenario_family maps a horizon to a scenario of that length; metrics
    are averaged per horizon before the log-log fit and per-horizon
    maxima are reported alongside.
    """
    horizons = [int(h) for h in horizons]
    if len(horizons) < 2 or any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise InputError("horizons must be strictly increasing with >= 2 entries")
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InputError("at least one seed is required")

    def one_run(job):
        horizon, seed = job
        scenario = scenario_family(horizon)
        config = OlfwConfig(
            horizon=horizon,
            budget_total=scenario.budget_total,
            update_rule=update_rule,
            auto_params=True,
        )
        trace = run_olfw(scenario, config, seed)
        bench = benchmark_for_scenario(scenario, seed, offline_iters)
        report = metrics_report(
            trace, bench, scenario.constraint_dist.mean, scenario.budget_total
        )
        return horizon, report

    jobs = [(h, s) for h in horizons for s in seeds]
    results = parallel_map(one_run, jobs)

    rows = []
    for horizon in horizons:
        reports = [rep for h, rep in results if h == horizon]
        regrets = np.array([rep.regret for rep in reports])
        violations = np.array([rep.violation for rep in reports])
        positives = np.array([rep.positive_violation for rep in reports])
        rows.append(ScalingRow(
            horizon=horizon,
            mean_regret=float(regrets.mean()),
            max_regret=float(regrets.max()),
            mean_violation=float(violations.mean()),
            mean_positive_violation=float(positives.mean()),
            max_positive_violation=float(positives.max()),
        ))
    regret_slope, regret_clamped = fit_loglog_slope(
        horizons, [row.mean_regret for row in rows]
    )
    violation_slope, violation_clamped = fit_loglog_slope(
        horizons, [row.mean_positive_violation for row in rows]
    )
    return ScalingStudy(
        rows=tuple(rows),
        regret_slope=regret_slope,
        violation_slope=violation_slope,
        regret_clamped=regret_clamped,
        violation_clamped=violation_clamped,
    )
