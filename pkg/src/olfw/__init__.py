"""Online monotone DR-submodular maximization under a budget constraint.

The package bundles the Lagrangian Frank-Wolfe online algorithm, slate
baselines, feasible-set oracles, utility families with certificates,
benchmark solvers, concentration validators, and a command-line harness
for reproducible experiments.
"""

from .baselines import (
    BASELINE_KINDS,
    BaselinePolicy,
    budget_cautious_action,
    greedy_action,
    meta_fw_run,
    run_policy,
    uniform_action,
)
from .config import (
    RunPlan,
    build_scenario,
    olfw_config_for,
    parse_config,
    write_config,
)
from .core import (
    OlfwConfig,
    OlfwState,
    ProblemConstants,
    RULE_EXPECTATION,
    RULE_HIGH_PROBABILITY,
    RunTrace,
    build_action,
    confidence_margin,
    default_params,
    lagrangian_grad,
    oga_feedback,
    resolve_params,
    run_olfw,
    surrogate_value,
    update_dual,
    update_empirical_mean,
)
from .domains import (
    Domain,
    box,
    box_with_cap,
    unit_box,
    unit_box_with_cap,
    with_budget_halfspace,
)
from .errors import (
    CapacityError,
    ConfigError,
    DegenerateProblemError,
    DistributionViolationError,
    GenerationError,
    InputError,
    OlfwError,
    SingularityError,
    UnsupportedOperationError,
)
from .evaluation import (
    BenchmarkResult,
    CoverageReport,
    MasterInequalityReport,
    MetricsReport,
    benchmark_for_scenario,
    check_master_inequality,
    check_oracle_regret,
    compute_regret,
    compute_violation,
    coverage_check,
    expected_mean_error,
    fixed_point_values,
    grid_benchmark,
    metrics_report,
    monte_carlo_mean_error,
    scaling_study,
    solve_benchmark,
)
from .objectives import (
    CallableUtility,
    LogDetUtility,
    MultilinearUtility,
    QuadraticUtility,
    check_dr_monotone,
    estimate_constants,
    generate_coverage,
    generate_logdet,
    generate_quadratic,
    load_set_function,
)
from .scenarios import (
    ConstantStream,
    ConstraintDistribution,
    JesterDataset,
    JesterStream,
    LogDetStream,
    QuadraticStream,
    Scenario,
    deterministic_costs,
    load_jester,
    sample_constraint,
    scenario_custom,
    scenario_jester,
    scenario_logdet,
    scenario_quadratic,
    synthetic_ratings,
    uniform_box_costs,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
