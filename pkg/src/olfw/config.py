"""Config file parsing: INI sections [scenario], [algorithm], [run].

Every key is validated and every offending field is reported in one
error.  A parsed plan resolves scenario defaults, algorithm knobs, the
algorithm list, seeds, sweep value lists, and the output directory; the
same plan can be written back out and re-parsed to an identical plan.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass

import numpy as np

from .baselines import BASELINE_KINDS
from .core import OlfwConfig, RULE_EXPECTATION, RULE_HIGH_PROBABILITY
from .errors import ConfigError
from .objectives import load_set_function
from .scenarios import (
    Scenario,
    load_jester,
    scenario_custom,
    scenario_jester,
    scenario_logdet,
    scenario_quadratic,
)

SCENARIO_NAMES = ("quadratic", "logdet", "jester", "custom")
ALGORITHM_NAMES = ("olfw",) + BASELINE_KINDS

_SCENARIO_KEYS = {
    "scenario", "t", "budget_total", "dataset", "set_function",
    "slots", "shuffle_users", "cost_lo", "cost_hi",
}
_ALGORITHM_KEYS = {
    "update_rule", "epsilon", "mu", "k", "delta", "auto_params", "algorithms",
}
_RUN_KEYS = {
    "seed", "seeds", "output_dir", "delta_values", "mu_values", "t_values",
}

SWEEP_NONE = "none"
SWEEP_DELTA = "delta"
SWEEP_MU = "mu"


@dataclass(frozen=True)
class RunPlan:
    """Fully validated run description parsed from one config file."""

    scenario_name: str
    horizon: int | None = None
    budget_total: float | None = None
    dataset: str | None = None
    set_function: str | None = None
    slots: int = 15
    shuffle_users: bool = False
    cost_lo: tuple | None = None
    cost_hi: tuple | None = None
    update_rule: str = RULE_HIGH_PROBABILITY
    epsilon: float = 0.05
    step_size: float | None = None
    inner_iters: int | None = None
    penalty: float | None = None
    auto_params: bool = True
    algorithms: tuple = ("olfw",)
    seed: int = 0
    seeds: tuple = ()
    output_dir: str = "out"
    delta_values: tuple = ()
    mu_values: tuple = ()
    horizon_values: tuple = ()

    @property
    def sweep_axis(self) -> str:
        if self.delta_values:
            return SWEEP_DELTA
        if self.mu_values:
            return SWEEP_MU
        return SWEEP_NONE

    @property
    def all_seeds(self) -> tuple:
        return self.seeds if self.seeds else (self.seed,)


class _Collector:
    """Typed key readers that record every problem instead of raising."""

    def __init__(self, section: str, raw: dict):
        self.section = section
        self.raw = dict(raw)
        self.problems: list[str] = []

    def note(self, message: str) -> None:
        self.problems.append("[%s] %s" % (self.section, message))

    def take(self, key: str):
        return self.raw.pop(key, None)

    def leftover(self) -> None:
        for key in sorted(self.raw):
            self.note("unknown key %r" % (key,))

    def _typed(self, key: str, cast, kind: str):
        text = self.take(key)
        if text is None:
            return None
        try:
            return cast(text)
        except (ValueError, TypeError):
            self.note("%s must be %s, got %r" % (key, kind, text))
            return None

    def get_int(self, key: str):
        return self._typed(key, lambda s: int(str(s).strip()), "an integer")

    def get_float(self, key: str):
        return self._typed(key, lambda s: float(str(s).strip()), "a number")

    def get_str(self, key: str):
        text = self.take(key)
        return None if text is None else str(text).strip()

    def get_bool(self, key: str):
        text = self.take(key)
        if text is None:
            return None
        lowered = str(text).strip().lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        self.note("%s must be a boolean, got %r" % (key, text))
        return None

    def get_list(self, key: str, cast, kind: str):
        text = self.take(key)
        if text is None:
            return None
        parts = [p.strip() for p in str(text).replace(";", ",").split(",")]
        parts = [p for p in parts if p]
        if not parts:
            self.note("%s must be a nonempty list" % (key,))
            return None
        out = []
        for part in parts:
            try:
                out.append(cast(part))
            except (ValueError, TypeError):
                self.note("%s entries must be %s, got %r" % (key, kind, part))
                return None
        return tuple(out)


def parse_config(path) -> RunPlan:
    """Read and validate one config file; all field errors are reported."""
    if not os.path.exists(path):
        raise ConfigError(["config file not found: %s" % (path,)])
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(["unreadable config %s: %s" % (path, exc)]) from exc

    problems: list[str] = []
    known = {"scenario": _SCENARIO_KEYS, "algorithm": _ALGORITHM_KEYS, "run": _RUN_KEYS}
    for section in parser.sections():
        if section not in known:
            problems.append("unknown section [%s]" % (section,))

    def collector(section: str) -> _Collector:
        raw = dict(parser.items(section)) if parser.has_section(section) else {}
        return _Collector(section, raw)

    sc = collector("scenario")
    al = collector("algorithm")
    rn = collector("run")

    scenario_name = sc.get_str("scenario")
    if scenario_name is None:
        sc.note("scenario is required (one of %s)" % (", ".join(SCENARIO_NAMES),))
    elif scenario_name not in SCENARIO_NAMES:
        sc.note("scenario must be one of %s, got %r"
                % (", ".join(SCENARIO_NAMES), scenario_name))

    horizon = sc.get_int("t")
    if horizon is not None and horizon < 1:
        sc.note("T must be at least 1, got %d" % (horizon,))
    budget_total = sc.get_float("budget_total")
    if budget_total is not None and not budget_total > 0.0:
        sc.note("budget_total must be positive, got %g" % (budget_total,))
    dataset = sc.get_str("dataset")
    set_function = sc.get_str("set_function")
    slots = sc.get_int("slots")
    if slots is not None and slots < 1:
        sc.note("slots must be at least 1, got %d" % (slots,))
    shuffle_users = sc.get_bool("shuffle_users")
    cost_lo = sc.get_list("cost_lo", float, "numbers")
    cost_hi = sc.get_list("cost_hi", float, "numbers")

    update_rule = al.get_str("update_rule")
    if update_rule is not None and update_rule not in (RULE_EXPECTATION,
                                                       RULE_HIGH_PROBABILITY):
        al.note("update_rule must be %r or %r, got %r"
                % (RULE_EXPECTATION, RULE_HIGH_PROBABILITY, update_rule))
    epsilon = al.get_float("epsilon")
    if epsilon is not None and not 0.0 < epsilon < 1.0:
        al.note("epsilon must lie in (0, 1), got %g" % (epsilon,))
    step_size = al.get_float("mu")
    if step_size is not None and not step_size > 0.0:
        al.note("mu must be positive, got %g" % (step_size,))
    inner_iters = al.get_int("k")
    if inner_iters is not None and inner_iters < 1:
        al.note("K must be at least 1, got %d" % (inner_iters,))
    penalty = al.get_float("delta")
    if penalty is not None and not penalty > 0.0:
        al.note("delta must be positive, got %g" % (penalty,))
    auto_params = al.get_bool("auto_params")
    algorithms = al.get_list("algorithms", str, "algorithm names")
    if algorithms is not None:
        for name in algorithms:
            if name not in ALGORITHM_NAMES:
                al.note("unknown algorithm %r (expected %s)"
                        % (name, ", ".join(ALGORITHM_NAMES)))

    seed = rn.get_int("seed")
    seeds = rn.get_list("seeds", int, "integers")
    output_dir = rn.get_str("output_dir")
    delta_values = rn.get_list("delta_values", float, "numbers")
    if delta_values is not None and any(v <= 0.0 for v in delta_values):
        rn.note("delta_values must be positive")
    mu_values = rn.get_list("mu_values", float, "numbers")
    if mu_values is not None and any(v <= 0.0 for v in mu_values):
        rn.note("mu_values must be positive")
    horizon_values = rn.get_list("t_values", int, "integers")
    if horizon_values is not None:
        if len(horizon_values) < 2 or any(
            b <= a for a, b in zip(horizon_values, horizon_values[1:])
        ):
            rn.note("t_values must be strictly increasing with >= 2 entries")
    if delta_values and mu_values:
        rn.note("delta_values and mu_values are mutually exclusive")

    for coll in (sc, al, rn):
        coll.leftover()
        problems.extend(coll.problems)

    if scenario_name == "jester" and dataset is None:
        problems.append("[scenario] jester requires a dataset path")
    if scenario_name == "logdet" and budget_total is None:
        problems.append("[scenario] logdet requires budget_total "
                        "(the family has no canonical budget)")
    if scenario_name == "custom":
        for key, val in (("set_function", set_function), ("t", horizon),
                         ("budget_total", budget_total), ("cost_lo", cost_lo),
                         ("cost_hi", cost_hi)):
            if val is None:
                problems.append("[scenario] custom requires %s" % (key,))

    if problems:
        raise ConfigError(problems)

    plan = RunPlan(
        scenario_name=scenario_name,
        horizon=horizon,
        budget_total=budget_total,
        dataset=dataset,
        set_function=set_function,
        slots=15 if slots is None else slots,
        shuffle_users=bool(shuffle_users) if shuffle_users is not None else False,
        cost_lo=cost_lo,
        cost_hi=cost_hi,
        update_rule=update_rule if update_rule else RULE_HIGH_PROBABILITY,
        epsilon=0.05 if epsilon is None else epsilon,
        step_size=step_size,
        inner_iters=inner_iters,
        penalty=penalty,
        auto_params=True if auto_params is None else auto_params,
        algorithms=algorithms if algorithms else ("olfw",),
        seed=0 if seed is None else seed,
        seeds=seeds if seeds else (),
        output_dir=output_dir if output_dir else "out",
        delta_values=delta_values if delta_values else (),
        mu_values=mu_values if mu_values else (),
        horizon_values=horizon_values if horizon_values else (),
    )
    return plan


def write_config(plan: RunPlan, path) -> None:
    """Emit a plan as a config file that parses back to an identical plan."""
    parser = configparser.ConfigParser()
    scenario: dict[str, str] = {"scenario": plan.scenario_name}
    if plan.horizon is not None:
        scenario["t"] = str(plan.horizon)
    if plan.budget_total is not None:
        scenario["budget_total"] = repr(plan.budget_total)
    if plan.dataset is not None:
        scenario["dataset"] = plan.dataset
    if plan.set_function is not None:
        scenario["set_function"] = plan.set_function
    scenario["slots"] = str(plan.slots)
    scenario["shuffle_users"] = "true" if plan.shuffle_users else "false"
    if plan.cost_lo is not None:
        scenario["cost_lo"] = ",".join(repr(v) for v in plan.cost_lo)
    if plan.cost_hi is not None:
        scenario["cost_hi"] = ",".join(repr(v) for v in plan.cost_hi)
    parser["scenario"] = scenario

    algorithm: dict[str, str] = {
        "update_rule": plan.update_rule,
        "epsilon": repr(plan.epsilon),
        "auto_params": "true" if plan.auto_params else "false",
        "algorithms": ",".join(plan.algorithms),
    }
    if plan.step_size is not None:
        algorithm["mu"] = repr(plan.step_size)
    if plan.inner_iters is not None:
        algorithm["k"] = str(plan.inner_iters)
    if plan.penalty is not None:
        algorithm["delta"] = repr(plan.penalty)
    parser["algorithm"] = algorithm

    run: dict[str, str] = {
        "seed": str(plan.seed),
        "output_dir": plan.output_dir,
    }
    if plan.seeds:
        run["seeds"] = ",".join(str(s) for s in plan.seeds)
    if plan.delta_values:
        run["delta_values"] = ",".join(repr(v) for v in plan.delta_values)
    if plan.mu_values:
        run["mu_values"] = ",".join(repr(v) for v in plan.mu_values)
    if plan.horizon_values:
        run["t_values"] = ",".join(str(v) for v in plan.horizon_values)
    parser["run"] = run

    with open(path, "w", encoding="utf-8") as fh:
        parser.write(fh)


def build_scenario(plan: RunPlan, horizon_override: int | None = None) -> Scenario:
    """Construct the scenario a plan describes, applying family defaults."""
    name = plan.scenario_name
    horizon = horizon_override if horizon_override is not None else plan.horizon
    if name == "quadratic":
        kwargs = {"seed": plan.seed}
        if horizon is not None:
            kwargs["horizon"] = horizon
        if plan.budget_total is not None:
            kwargs["budget_total"] = plan.budget_total
        elif horizon is not None:
            kwargs["budget_total"] = 2.0 * horizon
        if plan.cost_lo is not None and plan.cost_hi is not None:
            kwargs["cost_lo"] = plan.cost_lo
            kwargs["cost_hi"] = plan.cost_hi
        return scenario_quadratic(**kwargs)
    if name == "logdet":
        kwargs = {"seed": plan.seed, "budget_total": plan.budget_total}
        if horizon is not None:
            kwargs["horizon"] = horizon
        if plan.cost_lo is not None and plan.cost_hi is not None:
            kwargs["cost_lo"] = np.asarray(plan.cost_lo)
            kwargs["cost_hi"] = np.asarray(plan.cost_hi)
        return scenario_logdet(**kwargs)
    if name == "jester":
        dataset = load_jester(plan.dataset)
        return scenario_jester(
            dataset,
            seed=plan.seed,
            horizon=horizon,
            budget_total=plan.budget_total,
            slots=plan.slots,
            shuffle_users=plan.shuffle_users,
        )
    if name == "custom":
        utility = load_set_function(plan.set_function)
        return scenario_custom(
            utility,
            cost_lo=plan.cost_lo,
            cost_hi=plan.cost_hi,
            horizon=horizon,
            budget_total=plan.budget_total,
            seed=plan.seed,
        )
    raise ConfigError(["unknown scenario %r" % (name,)])


def olfw_config_for(plan: RunPlan, scenario: Scenario,
                    step_size: float | None = None,
                    penalty: float | None = None) -> OlfwConfig:
    """Algorithm config for one run, with optional sweep overrides."""
    return OlfwConfig(
        horizon=scenario.horizon,
        budget_total=scenario.budget_total,
        update_rule=plan.update_rule,
        epsilon=plan.epsilon,
        step_size=step_size if step_size is not None else plan.step_size,
        inner_iters=plan.inner_iters,
        penalty=penalty if penalty is not None else plan.penalty,
        auto_params=plan.auto_params,
    )
