"""Command-line harness.

Subcommands: ``run`` (one scenario, per-run traces plus a summary),
``sweep`` (penalty or step-size sweep averaged over seeds, with a
trade-off plot), ``check`` (invariant suites, pass/fail table),
``jester`` (five-algorithm comparison on a ratings dataset), and
``scaling`` (horizon scaling study with fitted growth slopes).

All randomness flows from the config seed; no command reads the clock
for anything except wall-time reporting, and wall times go only to
metadata.json so every CSV is byte-identical across reruns.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, replace

import numpy as np

from . import __version__
from .baselines import BASELINE_KINDS, BaselinePolicy, run_policy
from .config import (
    SWEEP_DELTA,
    SWEEP_NONE,
    RunPlan,
    build_scenario,
    olfw_config_for,
    parse_config,
)
from .core import OlfwConfig, RULE_HIGH_PROBABILITY, run_olfw
from .domains import unit_box, unit_box_with_cap, with_budget_halfspace
from .errors import ConfigError, OlfwError
from .evaluation import (
    benchmark_for_scenario,
    check_master_inequality,
    check_oracle_regret,
    coverage_check,
    expected_mean_error,
    fixed_point_values,
    metrics_report,
    monte_carlo_mean_error,
    scaling_study,
    solve_benchmark,
)
from .objectives import (
    CallableUtility,
    check_dr_monotone,
    generate_coverage,
    generate_logdet,
    generate_quadratic,
)
from .scenarios import ConstraintDistribution, scenario_quadratic
from .svgplot import line_plot, two_panel_plot
from .util import STREAM_VALIDATOR, child_rng, fmt_float, fmt_vector, parallel_map

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

TRACE_COLUMNS = (
    "t", "x", "f_xt", "cost_realized", "cost_mean",
    "lambda", "g_tilde", "gamma", "cum_utility", "cum_cost_mean",
)
SUMMARY_COLUMNS = (
    "T", "seed", "algorithm", "cum_utility", "R_T", "C_T", "positive_violation",
)


# ---------------------------------------------------------------------------
# Output plumbing
# ---------------------------------------------------------------------------

def _atomic_write(path: str, text: str) -> None:
    # write-then-rename so a crashed run never leaves a truncated file
    tmp = "%s.tmp.%d" % (path, os.getpid())
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def trace_csv_text(trace) -> str:
    lines = [",".join(TRACE_COLUMNS)]
    for i in range(trace.horizon):
        lines.append(",".join((
            str(i + 1),
            fmt_vector(trace.actions[i]),
            fmt_float(trace.rewards[i]),
            fmt_float(trace.cost_realized[i]),
            fmt_float(trace.cost_mean[i]),
            fmt_float(trace.duals[i]),
            fmt_float(trace.surrogates[i]),
            fmt_float(trace.margins[i]),
            fmt_float(trace.cum_utility[i]),
            fmt_float(trace.cum_cost_mean[i]),
        )))
    return "\n".join(lines) + "\n"


def summary_csv_text(rows) -> str:
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in rows:
        lines.append(",".join((
            str(row["T"]),
            str(row["seed"]),
            row["algorithm"],
            fmt_float(row["cum_utility"]),
            fmt_float(row["R_T"]),
            fmt_float(row["C_T"]),
            fmt_float(row["positive_violation"]),
        )))
    return "\n".join(lines) + "\n"


def _say(quiet: bool, text: str) -> None:
    if not quiet:
        print(text)


# ---------------------------------------------------------------------------
# Shared run machinery
# ---------------------------------------------------------------------------

def _load_plan(args) -> RunPlan:
    plan = parse_config(args.config)
    if args.seed is not None:
        plan = replace(plan, seed=args.seed, seeds=())
    if args.out is not None:
        plan = replace(plan, output_dir=args.out)
    return plan


def _execute(plan: RunPlan, scenario, algorithm: str, seed: int,
             step_size=None, penalty=None):
    config = olfw_config_for(plan, scenario, step_size=step_size, penalty=penalty)
    if algorithm == "olfw":
        return run_olfw(scenario, config, seed)
    policy = BaselinePolicy(kind=algorithm, slots=plan.slots)
    return run_policy(scenario, policy, config, seed)


def _scenario_metadata(scenario) -> dict:
    return {
        "name": scenario.name,
        "T": scenario.horizon,
        "budget_total": scenario.budget_total,
        "dim": scenario.domain.dim,
        "seed": scenario.seed,
        "constants": asdict(scenario.constants),
        "info": dict(scenario.info),
    }


def cmd_run(args) -> int:
    try:
        plan = _load_plan(args)
        scenario = build_scenario(plan)
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_USAGE

    os.makedirs(plan.output_dir, exist_ok=True)
    seeds = plan.all_seeds
    try:
        benches = dict(zip(seeds, parallel_map(
            lambda s: benchmark_for_scenario(scenario, s), seeds)))

        def one(job):
            algorithm, seed = job
            start = time.perf_counter()
            trace = _execute(plan, scenario, algorithm, seed)
            return algorithm, seed, trace, time.perf_counter() - start

        jobs = [(a, s) for s in seeds for a in plan.algorithms]
        results = parallel_map(one, jobs)
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_FAILURE

    summary_rows = []
    run_meta = {}
    mean_cost = scenario.constraint_dist.mean
    for algorithm, seed, trace, wall in results:
        report = metrics_report(trace, benches[seed], mean_cost, scenario.budget_total)
        label = "%s_seed%d" % (algorithm, seed)
        trace_path = os.path.join(plan.output_dir, "trace_%s.csv" % (label,))
        _atomic_write(trace_path, trace_csv_text(trace))
        summary_rows.append({
            "T": trace.horizon,
            "seed": seed,
            "algorithm": algorithm,
            "cum_utility": report.cumulative_utility,
            "R_T": report.regret,
            "C_T": report.violation,
            "positive_violation": report.positive_violation,
        })
        run_meta[label] = {
            "params": trace.params,
            "wall_seconds": wall,
            "benchmark_value": benches[seed].total_value,
            "trace": os.path.basename(trace_path),
        }

    _atomic_write(os.path.join(plan.output_dir, "summary.csv"),
                  summary_csv_text(summary_rows))
    _write_json(os.path.join(plan.output_dir, "metadata.json"), {
        "command": "run",
        "scenario": _scenario_metadata(scenario),
        "runs": run_meta,
        "version": __version__,
    })

    _say(args.quiet, "%-14s %6s %14s %12s %12s" % (
        "algorithm", "seed", "cum_utility", "R_T", "C_T"))
    for row in summary_rows:
        _say(args.quiet, "%-14s %6d %14.4f %12.4f %12.4f" % (
            row["algorithm"], row["seed"], row["cum_utility"],
            row["R_T"], row["C_T"]))
    _say(args.quiet, "wrote %d trace file(s) to %s" % (len(results), plan.output_dir))
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        plan = _load_plan(args)
        if plan.sweep_axis == SWEEP_NONE:
            raise ConfigError(["sweep requires delta_values or mu_values"])
        scenario = build_scenario(plan)
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_USAGE

    axis = plan.sweep_axis
    values = plan.delta_values if axis == SWEEP_DELTA else plan.mu_values
    seeds = plan.all_seeds
    os.makedirs(plan.output_dir, exist_ok=True)

    def one(job):
        value, seed = job
        if axis == SWEEP_DELTA:
            trace = _execute(plan, scenario, "olfw", seed, penalty=value)
        else:
            trace = _execute(plan, scenario, "olfw", seed, step_size=value)
        remaining = scenario.budget_total - trace.total_mean_cost()
        return trace.total_reward(), remaining

    start = time.perf_counter()
    try:
        jobs = [(v, s) for v in values for s in seeds]
        results = parallel_map(one, jobs)
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_FAILURE
    wall = time.perf_counter() - start

    utilities = np.array([r[0] for r in results]).reshape(len(values), len(seeds))
    remainings = np.array([r[1] for r in results]).reshape(len(values), len(seeds))
    mean_utility = utilities.mean(axis=1)
    mean_remaining = remainings.mean(axis=1)

    lines = ["%s,mean_utility,mean_remaining_budget" % (axis,)]
    for v, u, r in zip(values, mean_utility, mean_remaining):
        lines.append("%s,%s,%s" % (fmt_float(v), fmt_float(u), fmt_float(r)))
    _atomic_write(os.path.join(plan.output_dir, "sweep_%s.csv" % (axis,)),
                  "\n".join(lines) + "\n")

    svg = line_plot(
        [("sweep over %s" % (axis,), mean_remaining, mean_utility)],
        title="utility against remaining budget",
        xlabel="mean remaining budget",
        ylabel="mean cumulative utility",
    )
    _atomic_write(os.path.join(plan.output_dir, "sweep_%s.svg" % (axis,)), svg)

    _write_json(os.path.join(plan.output_dir, "metadata.json"), {
        "command": "sweep",
        "axis": axis,
        "values": list(values),
        "seeds": list(seeds),
        "scenario": _scenario_metadata(scenario),
        "wall_seconds": wall,
        "version": __version__,
    })
    _say(args.quiet, "swept %d values x %d seeds in %.1fs; outputs in %s"
         % (len(values), len(seeds), wall, plan.output_dir))
    return EXIT_OK


def cmd_scaling(args) -> int:
    try:
        plan = _load_plan(args)
        if not plan.horizon_values:
            raise ConfigError(["scaling requires t_values"])
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_USAGE

    os.makedirs(plan.output_dir, exist_ok=True)
    start = time.perf_counter()
    try:
        study = scaling_study(
            lambda h: build_scenario(plan, horizon_override=h),
            plan.horizon_values, plan.all_seeds, plan.update_rule,
        )
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_FAILURE
    wall = time.perf_counter() - start

    lines = ["T,mean_regret,max_regret,mean_violation,"
             "mean_positive_violation,max_positive_violation"]
    for row in study.rows:
        lines.append(",".join((
            str(row.horizon),
            fmt_float(row.mean_regret),
            fmt_float(row.max_regret),
            fmt_float(row.mean_violation),
            fmt_float(row.mean_positive_violation),
            fmt_float(row.max_positive_violation),
        )))
    _atomic_write(os.path.join(plan.output_dir, "scaling.csv"),
                  "\n".join(lines) + "\n")

    horizons = [row.horizon for row in study.rows]
    log_t = np.log10(horizons)
    log_regret = np.log10([max(row.mean_regret, 1.0) for row in study.rows])
    log_violation = np.log10(
        [max(row.mean_positive_violation, 1.0) for row in study.rows])
    svg = line_plot(
        [("regret", log_t, log_regret), ("positive violation", log_t, log_violation)],
        title="growth against horizon (log-log)",
        xlabel="log10 T",
        ylabel="log10 metric (clamped at 1)",
    )
    _atomic_write(os.path.join(plan.output_dir, "scaling.svg"), svg)

    _write_json(os.path.join(plan.output_dir, "metadata.json"), {
        "command": "scaling",
        "horizons": list(plan.horizon_values),
        "seeds": list(plan.all_seeds),
        "update_rule": plan.update_rule,
        "regret_slope": study.regret_slope,
        "violation_slope": study.violation_slope,
        "regret_clamped": study.regret_clamped,
        "violation_clamped": study.violation_clamped,
        "wall_seconds": wall,
        "version": __version__,
    })
    _say(args.quiet, "regret slope %.3f, positive-violation slope %.3f (%.1fs)"
         % (study.regret_slope, study.violation_slope, wall))
    return EXIT_OK


def cmd_jester(args) -> int:
    try:
        plan = _load_plan(args)
        if plan.scenario_name != "jester":
            raise ConfigError(["the jester command requires scenario = jester"])
        scenario = build_scenario(plan)
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_USAGE

    os.makedirs(plan.output_dir, exist_ok=True)
    algorithms = ("olfw",) + BASELINE_KINDS
    seed = plan.seed

    def one(algorithm):
        start = time.perf_counter()
        trace = _execute(plan, scenario, algorithm, seed)
        return algorithm, trace, time.perf_counter() - start

    try:
        results = parallel_map(one, algorithms)
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_FAILURE

    budget = scenario.budget_total
    header = ["t"]
    for algorithm, _, _ in results:
        header.append("%s_cum_utility" % (algorithm,))
        header.append("%s_spend_minus_budget" % (algorithm,))
    lines = [",".join(header)]
    horizon = scenario.horizon
    for i in range(horizon):
        cells = [str(i + 1)]
        for _, trace, _ in results:
            cells.append(fmt_float(trace.cum_utility[i]))
            cells.append(fmt_float(trace.cum_cost_mean[i] - budget))
        lines.append(",".join(cells))
    _atomic_write(os.path.join(plan.output_dir, "comparison.csv"),
                  "\n".join(lines) + "\n")

    rounds = np.arange(1, horizon + 1)
    utility_series = [(a, rounds, t.cum_utility) for a, t, _ in results]
    spend_series = [(a, rounds, t.cum_cost_mean - budget) for a, t, _ in results]
    svg = two_panel_plot(
        {"series": utility_series, "title": "cumulative utility",
         "xlabel": "round", "ylabel": "utility"},
        {"series": spend_series, "title": "cumulative mean spend minus budget",
         "xlabel": "round", "ylabel": "spend - budget"},
    )
    _atomic_write(os.path.join(plan.output_dir, "comparison.svg"), svg)

    _write_json(os.path.join(plan.output_dir, "metadata.json"), {
        "command": "jester",
        "scenario": _scenario_metadata(scenario),
        "seed": seed,
        "runs": {a: {"params": t.params, "wall_seconds": w,
                     "cum_utility": t.total_reward(),
                     "spend_minus_budget": t.total_mean_cost() - budget}
                 for a, t, w in results},
        "version": __version__,
    })

    _say(args.quiet, "%-16s %14s %18s" % ("algorithm", "cum_utility", "spend - budget"))
    for algorithm, trace, _ in results:
        _say(args.quiet, "%-16s %14.2f %18.2f" % (
            algorithm, trace.total_reward(), trace.total_mean_cost() - budget))
    _say(args.quiet, "outputs in %s" % (plan.output_dir,))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Invariant suites
# ---------------------------------------------------------------------------

def _fd_gradient(utility, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    g = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        g[i] = (utility.value(x + e) - utility.value(x - e)) / (2.0 * h)
    return g


def _gradient_check(utility, domain, points: int, seed: int, tol: float = 1e-5):
    rng = child_rng(STREAM_VALIDATOR, seed, 11)
    lower = np.asarray(domain.lower, dtype=float)
    upper = np.asarray(domain.upper, dtype=float)
    xs = lower + (upper - lower) * rng.uniform(0.05, 0.95, size=(points, domain.dim))
    worst = 0.0
    for x in xs:
        analytic = utility.grad(x)
        fd = _fd_gradient(utility, x)
        rel = float(np.linalg.norm(fd - analytic)
                    / max(1.0, np.linalg.norm(analytic)))
        worst = max(worst, rel)
    return worst <= tol, "max rel err %.2e over %d points" % (worst, points)


def _dr_check(utility, domain, seed: int, expect_ok: bool = True):
    report = check_dr_monotone(utility, domain, samples=500, rng_seed=seed, tol=1e-9)
    detail = "worst grad entry %.2e, worst DR gap %.2e" % (
        report.worst_gradient_entry, report.worst_dr_gap)
    if expect_ok:
        return report.ok, detail
    return not report.dr_ok, detail + " (violation expected)"


def _grid_points(domain, step: float = 0.1) -> np.ndarray:
    axes = [np.arange(domain.lower[i], domain.upper[i] + 0.5 * step, step)
            for i in range(domain.dim)]
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dim)
    keep = [domain.contains(p, 1e-9) for p in mesh]
    return mesh[np.asarray(keep)]


def _lmo_check(seed: int):
    rng = child_rng(STREAM_VALIDATOR, seed, 12)
    worst = 0.0
    for domain in (unit_box(3), unit_box_with_cap(3, 2.0)):
        grid = _grid_points(domain)
        for _ in range(25):
            d = rng.standard_normal(3)
            v = domain.lmo(d)
            if not domain.contains(v, 1e-9):
                return False, "lmo output left the feasible set"
            gap = float(np.max(grid @ d) - np.dot(d, v))
            worst = max(worst, gap)
    return worst <= 1e-2, "max grid-vs-oracle objective gap %.2e" % (worst,)


def _projection_check(seed: int):
    rng = child_rng(STREAM_VALIDATOR, seed, 13)
    worst_vi = -np.inf
    for domain in (unit_box(3), unit_box_with_cap(3, 2.0)):
        grid = _grid_points(domain)
        for _ in range(25):
            y = rng.uniform(-0.5, 1.5, size=3)
            p = domain.project(y)
            if not domain.contains(p, 1e-8):
                return False, "projection left the feasible set"
            if np.linalg.norm(domain.project(p) - p) > 1e-9:
                return False, "projection is not idempotent"
            # Euclidean projection is characterized by <y - p, z - p> <= 0
            # for every feasible z
            vi = float(np.max((grid - p) @ (y - p)))
            worst_vi = max(worst_vi, vi)
    return worst_vi <= 1e-8, "max variational-inequality slack %.2e" % (worst_vi,)


def _benchmark_lp_check():
    c = np.array([1.0, 2.0, 0.5])
    utility = CallableUtility(n=3, value_fn=lambda x: float(c @ x),
                              grad_fn=lambda x: c.copy())
    domain = with_budget_halfspace(unit_box(3), np.ones(3), 1.5)
    bench = solve_benchmark(utility, domain, offline_iters=200)
    from scipy.optimize import linprog

    res = linprog(-c, A_ub=np.ones((1, 3)), b_ub=[1.5],
                  bounds=[(0.0, 1.0)] * 3, method="highs")
    if not res.success:
        return False, "reference LP failed: %s" % (res.message,)
    gap = abs(bench.total_value - (-res.fun))
    return gap <= 1e-2, "|solver - LP| = %.2e" % (gap,)


def _mean_error_check(seed: int):
    dist = ConstraintDistribution(lo=np.zeros(2), hi=np.ones(2))
    mc = monte_carlo_mean_error(dist, t=11, replicas=20000, rng_seed=seed)
    law = expected_mean_error(dist, 11)
    rel = abs(mc - law) / law
    return rel <= 0.03, "MC %.6f vs law %.6f (rel %.3f)" % (mc, law, rel)


def _coverage_check(seed: int):
    scenario = scenario_quadratic(seed=0, horizon=200)
    report = coverage_check(
        scenario.constraint_dist, np.array([0.3, 0.3]), horizon=200,
        epsilon=0.1, replicas=1000, rng_seed=seed,
        range_bound=scenario.constants.surrogate_range,
    )
    allowance = report.epsilon / report.horizon + 3.0 * report.per_round_stderr
    ok = bool(np.all(report.per_round_frequency <= allowance))
    return ok, "worst per-round failure frequency %.4f" % (
        report.worst_round_frequency,)


def _certificate_checks(seed: int):
    """Master inequality and per-oracle bounds on one seeded quadratic run."""
    scenario = scenario_quadratic(seed=0, horizon=500)
    config = OlfwConfig(horizon=500, budget_total=scenario.budget_total,
                        update_rule=RULE_HIGH_PROBABILITY, auto_params=True)
    trace = run_olfw(scenario, config, 0)
    bench = benchmark_for_scenario(scenario, 0)
    fixed_points = ((np.zeros(2), "origin"), (bench.x_star, "benchmark"))

    def master():
        details = []
        ok = True
        for x, label in fixed_points:
            values = fixed_point_values(scenario, 0, x)
            report = check_master_inequality(trace, x, scenario.constants, values)
            ok = ok and report.holds
            details.append("%s slack %.2f" % (label, report.slack))
        return ok, "; ".join(details)

    def oga():
        ok = True
        worst = np.inf
        for x, _ in fixed_points:
            report = check_oracle_regret(trace, x, scenario.constants)
            ok = ok and report.holds
            worst = min(worst, float(np.min(report.rhs - report.lhs)))
        return ok, "min per-oracle slack %.2f" % (worst,)

    return master, oga


def _scaling_check():
    study = scaling_study(
        lambda h: scenario_quadratic(seed=0, horizon=h),
        (256, 1024, 4096), (0, 1, 2, 3, 4), RULE_HIGH_PROBABILITY,
    )
    ok = study.regret_slope < 1.0 and study.violation_slope < 0.9
    return ok, "regret slope %.3f, violation slope %.3f" % (
        study.regret_slope, study.violation_slope)


def cmd_check(args) -> int:
    seed = args.seed if args.seed is not None else 0
    master, oga = _certificate_checks(seed)
    checks = [
        ("gradient_quadratic",
         lambda: _gradient_check(generate_quadratic(2, seed), unit_box(2), 100, seed)),
        ("gradient_logdet",
         lambda: _gradient_check(generate_logdet(10, seed), unit_box(10), 100, seed)),
        ("gradient_multilinear",
         lambda: _gradient_check(generate_coverage(8, seed), unit_box(8), 100, seed)),
        ("dr_quadratic",
         lambda: _dr_check(generate_quadratic(2, seed), unit_box(2), seed)),
        ("dr_logdet",
         lambda: _dr_check(generate_logdet(10, seed), unit_box(10), seed)),
        ("dr_multilinear",
         lambda: _dr_check(generate_coverage(8, seed), unit_box(8), seed)),
        ("dr_counterexample",
         lambda: _dr_check(
             CallableUtility(n=2,
                             value_fn=lambda x: float(x[0] * x[1]),
                             grad_fn=lambda x: np.array([x[1], x[0]])),
             unit_box(2), seed, expect_ok=False)),
        ("lmo_oracle", lambda: _lmo_check(seed)),
        ("projection_oracle", lambda: _projection_check(seed)),
        ("benchmark_lp", _benchmark_lp_check),
        ("mean_error_law", lambda: _mean_error_check(seed)),
        ("margin_coverage", lambda: _coverage_check(seed)),
        ("master_inequality", master),
        ("oga_realization", oga),
    ]
    if args.full:
        checks.append(("scaling_slopes", _scaling_check))

    failures = []
    for name, fn in checks:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except OlfwError as exc:
            ok, detail = False, "error: %s" % (exc,)
        wall = time.perf_counter() - start
        status = "PASS" if ok else "FAIL"
        _say(args.quiet, "%-22s %s  %s (%.2fs)" % (name, status, detail, wall))
        if not ok:
            failures.append(name)

    if failures:
        print("failed checks: %s" % (", ".join(failures),), file=sys.stderr)
        return EXIT_FAILURE
    _say(args.quiet, "all %d checks passed" % (len(checks),))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed (and any seed list)")
    parser.add_argument("--out", default=None,
                        help="override the config output directory")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="olfw",
        description="online monotone DR-submodular maximization under a "
                    "cumulative budget: runs, sweeps, checks, and plots",
    )
    parser.add_argument("--version", action="version",
                        version="olfw %s" % (__version__,))
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in (
        ("run", "run one scenario and write traces plus a summary"),
        ("sweep", "sweep the penalty or step size and plot the trade-off"),
        ("jester", "compare all five algorithms on a ratings dataset"),
        ("scaling", "fit regret/violation growth across horizons"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="path to an INI config file")
        _common_flags(p)

    p = sub.add_parser("check", help="run the invariant suites")
    p.add_argument("--full", action="store_true",
                   help="include the large-horizon scaling point")
    _common_flags(p)

    args = parser.parse_args(argv)
    dispatch = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "jester": cmd_jester,
        "scaling": cmd_scaling,
        "check": cmd_check,
    }
    try:
        return dispatch[args.command](args)
    except ConfigError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_USAGE
    except OlfwError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print("error: %s" % (exc,), file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
