"""Scenario construction: cost distributions, utility streams, datasets.

A scenario bundles everything one run needs: the feasible set, a seeded
stream of round utilities, the stochastic cost distribution, the horizon
and budget, and certified problem constants sized analytically for the
family.  Three builders cover the benchmark experiments: random monotone
quadratics on the plane, random log-determinant objectives, and a joke
recommendation problem driven by a ratings matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .core import ProblemConstants
from .domains import Domain, unit_box, unit_box_with_cap
from .errors import GenerationError, InputError
from .objectives import (
    QuadraticUtility,
    check_dr_monotone,
    draw_logdet,
    draw_quadratic,
    estimate_constants,
)
from .util import STREAM_STRUCTURE, STREAM_UTILITY, child_rng

RATING_SENTINEL = 99.0   # raw-scale marker for a missing rating
RATING_RAW_LOW = -10.0
RATING_RAW_HIGH = 10.0
RATING_MISSING_VALUE = 5.0  # rescaled value assigned to missing ratings

KIND_UNIFORM_BOX = "uniform_box"
KIND_DETERMINISTIC = "deterministic"


# ---------------------------------------------------------------------------
# Stochastic cost model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintDistribution:
    """Per-round cost vector law: independent uniforms on [lo_i, hi_i].

    lo == hi collapses to a deterministic cost.  The support must be
    nonnegative so that observed costs can never be negative.
    """

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise InputError("cost bounds must be equal-length vectors")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise InputError("cost bounds must be finite")
        if np.any(lo < 0.0):
            raise InputError("cost support must be nonnegative")
        if np.any(lo > hi):
            raise InputError("cost lower bounds exceed upper bounds")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    @property
    def kind(self) -> str:
        return KIND_DETERMINISTIC if np.array_equal(self.lo, self.hi) else KIND_UNIFORM_BOX

    @property
    def mean(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def covariance_diag(self) -> np.ndarray:
        return (self.hi - self.lo) ** 2 / 12.0

    @property
    def trace_covariance(self) -> float:
        return float(np.sum(self.covariance_diag))

    @property
    def support_norm_bound(self) -> float:
        return float(np.linalg.norm(self.hi))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        if self.kind == KIND_DETERMINISTIC:
            return self.mean
        return rng.uniform(self.lo, self.hi)

    def sample_batch(self, rng: np.random.Generator, count: int) -> np.ndarray:
        if self.kind == KIND_DETERMINISTIC:
            return np.tile(self.mean, (count, 1))
        return rng.uniform(self.lo, self.hi, size=(count, self.dim))


def uniform_box_costs(lo, hi) -> ConstraintDistribution:
    return ConstraintDistribution(lo=np.asarray(lo, dtype=float),
                                  hi=np.asarray(hi, dtype=float))


def deterministic_costs(p) -> ConstraintDistribution:
    p = np.asarray(p, dtype=float)
    return ConstraintDistribution(lo=p, hi=p.copy())


def sample_constraint(dist: ConstraintDistribution, rng: np.random.Generator) -> np.ndarray:
    """One cost vector draw."""
    return dist.sample(rng)


# ---------------------------------------------------------------------------
# Utility streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticStream:
    """Fresh random monotone quadratic each round."""

    n: int
    entry_range: tuple[float, float] = (-1.0, 0.0)

    def __post_init__(self):
        lo, hi = self.entry_range
        if not (lo <= hi <= 0.0):
            raise InputError(
                "quadratic entry range must satisfy lo <= hi <= 0, got %r"
                % (self.entry_range,)
            )

    @property
    def dim(self) -> int:
        return self.n

    def functions(self, rng_seed: int):
        rng = child_rng(STREAM_UTILITY, rng_seed)
        while True:
            yield draw_quadratic(rng, self.n, self.entry_range)

    def average(self, rng_seed: int, horizon: int) -> QuadraticUtility:
        # the realized average of quadratics is the quadratic of the
        # averaged coefficients; replay the exact per-round draw order
        rng = child_rng(STREAM_UTILITY, rng_seed)
        mat = np.zeros((self.n, self.n))
        vec = np.zeros(self.n)
        for _ in range(horizon):
            q = draw_quadratic(rng, self.n, self.entry_range)
            mat += q.mat
            vec += q.vec
        return QuadraticUtility(mat=mat / horizon, vec=vec / horizon)


@dataclass(frozen=True)
class AveragedUtility:
    """Pointwise average of a fixed list of utilities."""

    members: tuple

    @property
    def n(self) -> int:
        return self.members[0].n

    def value(self, x) -> float:
        return float(np.mean([m.value(x) for m in self.members]))

    def grad(self, x) -> np.ndarray:
        total = np.zeros(self.n)
        for m in self.members:
            total += m.grad(x)
        return total / len(self.members)

    def value_and_grad(self, x):
        return self.value(x), self.grad(x)

    def grad_rows(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        total = np.zeros_like(xs)
        for m in self.members:
            total += m.grad_rows(xs)
        return total / len(self.members)


@dataclass(frozen=True)
class LogDetStream:
    """Fresh random log-determinant utility each round.

    Eigenvalues at least 1 keep every instance monotone (the shifted
    kernel stays positive semidefinite).
    """

    n: int
    eig_range: tuple[float, float] = (2.0, 3.0)

    def __post_init__(self):
        lo, hi = self.eig_range
        if not 1.0 <= lo <= hi:
            raise InputError(
                "eigenvalue range must satisfy 1 <= lo <= hi, got %r"
                % (self.eig_range,)
            )

    @property
    def dim(self) -> int:
        return self.n

    def functions(self, rng_seed: int):
        rng = child_rng(STREAM_UTILITY, rng_seed)
        while True:
            yield draw_logdet(rng, self.n, self.eig_range)

    def average(self, rng_seed: int, horizon: int) -> AveragedUtility:
        rng = child_rng(STREAM_UTILITY, rng_seed)
        members = tuple(draw_logdet(rng, self.n, self.eig_range) for _ in range(horizon))
        return AveragedUtility(members=members)


@dataclass(frozen=True)
class JesterStream:
    """One served user per round: linear part from the user's ratings,
    quadratic part from the shared nonpositive cross-term matrix."""

    ratings: np.ndarray      # (users, items) rescaled to [0, 10]
    cross_terms: np.ndarray  # (items, items) symmetric, zero diagonal, <= 0
    user_order: np.ndarray   # permutation of user indices

    @property
    def dim(self) -> int:
        return self.ratings.shape[1]

    def functions(self, rng_seed: int):
        # the user sequence is structural; the run seed plays no role here
        for user in self.user_order:
            yield QuadraticUtility(mat=self.cross_terms, vec=self.ratings[user])

    def average(self, rng_seed: int, horizon: int) -> QuadraticUtility:
        if horizon > self.user_order.shape[0]:
            raise InputError(
                "horizon %d exceeds the %d served users"
                % (horizon, self.user_order.shape[0])
            )
        mean_vec = self.ratings[self.user_order[:horizon]].mean(axis=0)
        return QuadraticUtility(mat=self.cross_terms, vec=mean_vec)


@dataclass(frozen=True)
class ConstantStream:
    """The same utility every round."""

    utility: object

    @property
    def dim(self) -> int:
        return self.utility.n

    def functions(self, rng_seed: int):
        while True:
            yield self.utility

    def average(self, rng_seed: int, horizon: int):
        return self.utility


# ---------------------------------------------------------------------------
# Scenario bundle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """Everything one run needs, immutable and shareable across threads."""

    name: str
    domain: Domain
    utility_stream: object
    constraint_dist: ConstraintDistribution
    horizon: int
    budget_total: float
    constants: ProblemConstants
    seed: int
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.horizon < 1:
            raise InputError("horizon must be at least 1, got %r" % (self.horizon,))
        if not self.budget_total > 0.0:
            raise InputError(
                "budget_total must be positive, got %r" % (self.budget_total,)
            )
        if self.constraint_dist.dim != self.domain.dim:
            raise InputError(
                "cost dimension %d != domain dimension %d"
                % (self.constraint_dist.dim, self.domain.dim)
            )


def surrogate_range_bound(dist: ConstraintDistribution, domain: Domain,
                          budget_total: float, horizon: int) -> float:
    """Envelope of |<cost, x> - budget/horizon| over the support and domain."""
    per_round = budget_total / horizon
    if per_round == np.inf:
        return np.inf
    reach = dist.support_norm_bound * domain.max_point_norm()
    return max(reach - per_round, per_round)


def _spot_check_stream(stream, domain, seed: int, count: int = 2,
                       samples: int = 20) -> None:
    functions = stream.functions(seed)
    for i in range(count):
        report = check_dr_monotone(next(functions), domain,
                                   samples=samples, rng_seed=seed + i, tol=1e-9)
        if not report.ok:
            raise GenerationError(
                "scenario stream failed the monotone/DR spot check: "
                "worst gradient entry %.3e, worst gap %.3e"
                % (report.worst_gradient_entry, report.worst_dr_gap)
            )


def scenario_quadratic(seed: int = 0, horizon: int = 1000,
                       budget_total: float | None = None, n: int = 2,
                       entry_range: tuple[float, float] = (-1.0, 0.0),
                       cost_lo=None, cost_hi=None) -> Scenario:
    """Random monotone quadratics on the unit box.

    Defaults: two coordinates, horizon 1000, per-round budget 2 against
    costs uniform on [0.5, 1.5] x [1.5, 2.5] (mean vector (1, 2)).  The
    quadratic coefficients are uniform in entry_range and recalibrated so
    the gradient vanishes exactly at the all-ones corner.
    """
    if budget_total is None:
        budget_total = 2.0 * horizon
    if cost_lo is None or cost_hi is None:
        if n != 2:
            raise InputError("cost bounds are required when n != 2")
        cost_lo, cost_hi = (0.5, 1.5), (1.5, 2.5)
    domain = unit_box(n)
    dist = uniform_box_costs(cost_lo, cost_hi)
    stream = QuadraticStream(n=n, entry_range=entry_range)
    _spot_check_stream(stream, domain, seed)

    largest = max(abs(entry_range[0]), abs(entry_range[1]))
    # entries of the symmetrized matrix stay in the same range, so each
    # gradient coordinate is at most n * largest in magnitude on the box
    utility_grad_bound = largest * n ** 1.5
    constants = ProblemConstants(
        utility_grad_bound=utility_grad_bound,
        cost_norm_bound=dist.support_norm_bound,
        smoothness=largest * n,
        diameter=domain.diameter(),
        value_range=0.5 * largest * n * n,
        surrogate_range=surrogate_range_bound(dist, domain, budget_total, horizon),
    )
    return Scenario(
        name="quadratic",
        domain=domain,
        utility_stream=stream,
        constraint_dist=dist,
        horizon=int(horizon),
        budget_total=float(budget_total),
        constants=constants,
        seed=int(seed),
    )


def scenario_logdet(seed: int = 0, horizon: int = 4900,
                    budget_total: float | None = None, n: int = 10,
                    eig_range: tuple[float, float] = (2.0, 3.0),
                    cost_lo=None, cost_hi=None) -> Scenario:
    """Random log-determinant utilities on the unit box.

    Defaults: ten coordinates, horizon 4900, costs uniform on [0.3, 5.7]
    per coordinate (mean 3).  The budget has no canonical value for this
    family; when omitted it is set to one tenth of the full-activation
    mean spend per round, which keeps the constraint active.
    """
    if cost_lo is None:
        cost_lo = np.full(n, 0.3)
    if cost_hi is None:
        cost_hi = np.full(n, 5.7)
    domain = unit_box(n)
    dist = uniform_box_costs(cost_lo, cost_hi)
    if budget_total is None:
        budget_total = 0.1 * horizon * float(np.dot(dist.mean, domain.upper))
    stream = LogDetStream(n=n, eig_range=eig_range)
    _spot_check_stream(stream, domain, seed)

    shift = eig_range[1] - 1.0
    # the gradient is antitone, so its norm peaks at the origin where each
    # coordinate equals a diagonal entry of the shifted kernel
    constants = ProblemConstants(
        utility_grad_bound=np.sqrt(n) * shift,
        cost_norm_bound=dist.support_norm_bound,
        smoothness=shift * shift,
        diameter=domain.diameter(),
        value_range=n * np.log(eig_range[1]),
        surrogate_range=surrogate_range_bound(dist, domain, budget_total, horizon),
    )
    return Scenario(
        name="logdet",
        domain=domain,
        utility_stream=stream,
        constraint_dist=dist,
        horizon=int(horizon),
        budget_total=float(budget_total),
        constants=constants,
        seed=int(seed),
    )


def _cost_bound_vector(values, n: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float))
    if arr.shape == (1,):
        return np.full(n, arr[0])
    if arr.shape != (n,):
        raise InputError(
            "%s must be a scalar or a length-%d vector, got shape %s"
            % (name, n, arr.shape)
        )
    return arr


def scenario_custom(utility, cost_lo, cost_hi, horizon: int,
                    budget_total: float, seed: int = 0) -> Scenario:
    """A fixed user-supplied utility every round on the unit box.

    Constants are sampled rather than analytic: the gradient bound comes
    from inflated probe maxima, floored so the exact peak value stays
    consistent with it, and the peak itself sits at the all-ones corner
    because the utility must be monotone.
    """
    n = utility.n
    domain = unit_box(n)
    dist = uniform_box_costs(
        _cost_bound_vector(cost_lo, n, "cost_lo"),
        _cost_bound_vector(cost_hi, n, "cost_hi"),
    )
    stream = ConstantStream(utility)
    _spot_check_stream(stream, domain, seed, count=1)
    estimated = estimate_constants(utility, domain, samples=64, rng_seed=seed)
    value_range = float(utility.value(domain.upper))
    grad_bound = max(estimated.lipschitz, value_range / domain.diameter())
    constants = ProblemConstants(
        utility_grad_bound=grad_bound,
        cost_norm_bound=dist.support_norm_bound,
        smoothness=estimated.smoothness,
        diameter=domain.diameter(),
        value_range=value_range,
        surrogate_range=surrogate_range_bound(dist, domain, budget_total, horizon),
    )
    return Scenario(
        name="custom",
        domain=domain,
        utility_stream=stream,
        constraint_dist=dist,
        horizon=int(horizon),
        budget_total=float(budget_total),
        constants=constants,
        seed=int(seed),
    )


# ---------------------------------------------------------------------------
# Joke recommendation dataset
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class JesterDataset:
    """Ratings rescaled to [0, 10], one row per user, plus the serve order."""

    ratings: np.ndarray
    user_order: np.ndarray

    def __post_init__(self):
        if self.ratings.ndim != 2:
            raise InputError("ratings must be a 2-d matrix")
        if np.any(self.ratings < 0.0) or np.any(self.ratings > 10.0):
            raise InputError("rescaled ratings must lie in [0, 10]")

    @property
    def n_users(self) -> int:
        return self.ratings.shape[0]

    @property
    def n_items(self) -> int:
        return self.ratings.shape[1]


def rescale_rating(raw: np.ndarray) -> np.ndarray:
    """Map raw [-10, 10] ratings to [0, 10]; the missing sentinel maps to 5."""
    raw = np.asarray(raw, dtype=float)
    out = 0.5 * (raw + 10.0)
    out[raw == RATING_SENTINEL] = RATING_MISSING_VALUE
    return out


def load_jester(path, expected_items: int = 100) -> JesterDataset:
    """Read a comma-separated ratings file, one user per row.

    Rows of expected_items + 1 columns are treated as having a leading
    rating-count column, which is dropped.  Raw values must be in
    [-10, 10] or the missing sentinel.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            if len(parts) == expected_items + 1:
                parts = parts[1:]  # leading column is the per-user rating count
            if len(parts) != expected_items:
                raise InputError(
                    "%s:%d: expected %d rating columns, got %d"
                    % (path, lineno, expected_items, len(parts))
                )
            try:
                values = np.array([float(p) for p in parts])
            except ValueError:
                raise InputError(
                    "%s:%d: unparsable rating entry" % (path, lineno)
                ) from None
            bad = (values != RATING_SENTINEL) & (
                (values < RATING_RAW_LOW) | (values > RATING_RAW_HIGH)
            )
            if np.any(bad):
                raise InputError(
                    "%s:%d: rating %r outside [%g, %g]"
                    % (path, lineno, float(values[bad][0]),
                       RATING_RAW_LOW, RATING_RAW_HIGH)
                )
            rows.append(rescale_rating(values))
    if not rows:
        raise InputError("%s: no rating rows found" % (path,))
    ratings = np.vstack(rows)
    return JesterDataset(ratings=ratings, user_order=np.arange(ratings.shape[0]))


def synthetic_ratings(users: int, items: int, rng_seed: int,
                      missing_frac: float = 0.1) -> np.ndarray:
    """Raw-scale synthetic ratings matrix with missing sentinels.

    Each joke gets a quality level, each user a disposition offset; the
    sum plus noise is clipped away from the raw minimum so every rescaled
    rating stays strictly positive.
    """
    rng = child_rng(STREAM_STRUCTURE, rng_seed)
    quality = rng.uniform(-5.0, 7.0, size=items)
    disposition = rng.uniform(-2.0, 2.0, size=(users, 1))
    noise = rng.normal(0.0, 2.0, size=(users, items))
    raw = np.clip(quality + disposition + noise, -9.5, 10.0)
    missing = rng.uniform(size=raw.shape) < missing_frac
    raw[missing] = RATING_SENTINEL
    return raw


def calibrate_cross_terms(ratings: np.ndarray, slots: int,
                          rng: np.random.Generator) -> tuple[np.ndarray, float, int]:
    """Nonpositive cross-term matrix scaled to keep every user's utility monotone.

    Raw weights u_ij are uniform in [0, 1).  The scale is the largest eta
    such that every rating exceeds eta times the worst feasible cross-term
    load on its coordinate, the load being the top-slots sum of the
    symmetrized weights.  Zero ratings cannot support any positive eta, so
    they are excluded from the minimum and counted.
    """
    users, items = ratings.shape
    raw = rng.uniform(0.0, 1.0, size=(items, items))
    np.fill_diagonal(raw, 0.0)
    pair = raw + raw.T
    # worst feasible load per coordinate: the slots largest pair weights
    sorted_pair = np.sort(pair, axis=1)[:, ::-1]
    load = sorted_pair[:, :slots].sum(axis=1)

    excluded = int(np.count_nonzero(ratings == 0.0))
    masked = np.where(ratings > 0.0, ratings, np.inf)
    col_min = masked.min(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(load > 0.0, col_min / load, np.inf)
    eta = float(np.min(ratios))
    if not np.isfinite(eta):
        raise GenerationError("cross-term calibration degenerate: no usable ratings")
    theta = -eta * raw
    cross = theta + theta.T
    np.fill_diagonal(cross, 0.0)
    return cross, eta, excluded


def scenario_jester(dataset: JesterDataset, seed: int = 0,
                    horizon: int | None = None,
                    budget_total: float | None = None, slots: int = 15,
                    cost_lo: float = 0.03, cost_hi: float = 0.35,
                    shuffle_users: bool = False) -> Scenario:
    """Joke recommendation: at most `slots` of the items per round.

    One user is served per round, in dataset order unless shuffled by the
    scenario seed.  Costs are i.i.d. uniform per item and the default
    budget is 1.5 per round.
    """
    items = dataset.n_items
    structure_rng = child_rng(STREAM_STRUCTURE, seed)
    user_order = dataset.user_order
    if shuffle_users:
        user_order = structure_rng.permutation(dataset.n_users)
    if horizon is None:
        horizon = dataset.n_users
    if horizon > user_order.shape[0]:
        raise InputError(
            "horizon %d exceeds the %d available users" % (horizon, dataset.n_users)
        )
    if budget_total is None:
        budget_total = 1.5 * horizon

    served = user_order[:horizon]
    cross, eta, excluded = calibrate_cross_terms(
        dataset.ratings[served], slots, structure_rng
    )
    domain = unit_box_with_cap(items, float(slots))
    dist = uniform_box_costs(np.full(items, cost_lo), np.full(items, cost_hi))
    stream = JesterStream(ratings=dataset.ratings, cross_terms=cross,
                          user_order=served)

    info = {"eta": eta, "excluded_zero_ratings": excluded}
    if excluded == 0:
        _spot_check_stream(stream, domain, seed)
    else:
        report = check_dr_monotone(
            next(stream.functions(seed)), domain, samples=20, rng_seed=seed
        )
        info["spot_check_ok"] = report.ok

    col_max = dataset.ratings[served].max(axis=0)
    sorted_load = np.sort(-cross, axis=1)[:, ::-1][:, :slots].sum(axis=1)
    grad_bound = float(np.linalg.norm(np.maximum(col_max, sorted_load)))
    top_slot_sums = np.sort(dataset.ratings[served], axis=1)[:, ::-1][:, :slots].sum(axis=1)
    constants = ProblemConstants(
        utility_grad_bound=grad_bound,
        cost_norm_bound=dist.support_norm_bound,
        smoothness=float(np.max(np.abs(np.linalg.eigvalsh(cross)))),
        diameter=domain.diameter(),
        value_range=float(top_slot_sums.max()),
        surrogate_range=surrogate_range_bound(dist, domain, budget_total, horizon),
    )
    return Scenario(
        name="jester",
        domain=domain,
        utility_stream=stream,
        constraint_dist=dist,
        horizon=int(horizon),
        budget_total=float(budget_total),
        constants=constants,
        seed=int(seed),
        info=info,
    )
