"""Feasible-set geometry: boxes, boxes with a coordinate-sum cap, and boxes
intersected with at most two nonnegative-normal halfspaces.

The solver needs three primitives: Euclidean projection (boxes and capped
boxes only), a linear maximization oracle over every kind, and the Euclidean
diameter.  Halfspace domains exist to house the offline benchmark set, which
is the action set intersected with the mean-budget constraint.

All domains are immutable and every operation is pure, so instances are safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError, UnsupportedOperationError

PROJECT_TOL = 1e-10      # absolute tolerance on the cap multiplier
PROJECT_MAX_ITERS = 200
CONTAINS_TOL = 1e-8

KIND_BOX = "box"
KIND_BOX_CAP = "box_cap"
KIND_BOX_HALFSPACES = "box_halfspaces"


@dataclass(frozen=True)
class Domain:
    """Box [lower, upper], optionally with sum(x) <= cap or a'x <= b rows.

    ``cap`` and ``halfspaces`` are mutually exclusive: a capped box that needs
    an extra halfspace is re-encoded with the cap as an explicit (1, cap) row
    (see ``with_budget_halfspace``).  The origin must be feasible.
    """

    lower: np.ndarray
    upper: np.ndarray
    cap: float | None = None
    halfspaces: tuple = ()

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise InputError(f"bounds must be equal-length vectors, got {lower.shape} and {upper.shape}")
        if lower.size == 0:
            raise InputError("empty domain")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise InputError("non-finite bound")
        if np.any(lower > upper):
            raise InputError("lower bound exceeds upper bound")
        if np.any(lower > 0) or np.any(upper < 0):
            raise InputError("the origin must be feasible (lower <= 0 <= upper)")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.cap is not None and self.halfspaces:
            raise InputError("cap and halfspaces are mutually exclusive; encode the cap as a halfspace row")
        if self.cap is not None:
            cap = float(self.cap)
            if not np.isfinite(cap) or cap < 0:
                raise InputError("cap must be finite and >= 0 (origin feasibility)")
            if np.sum(lower) > cap:
                raise CapacityError(f"cap {cap} below the minimum coordinate sum {np.sum(lower)}")
            object.__setattr__(self, "cap", cap)
        rows = []
        for a, b in self.halfspaces:
            a = np.asarray(a, dtype=float)
            b = float(b)
            if a.shape != lower.shape:
                raise InputError(f"halfspace normal shape {a.shape} != dimension {lower.shape}")
            if np.any(a < 0):
                raise UnsupportedOperationError("halfspace normals must be nonnegative")
            if b < 0:
                raise InputError("halfspace offset must be >= 0 (origin feasibility)")
            rows.append((a, b))
        if len(rows) > 2:
            raise InputError("at most 2 halfspaces supported")
        object.__setattr__(self, "halfspaces", tuple(rows))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def kind(self) -> str:
        if self.halfspaces:
            return KIND_BOX_HALFSPACES
        if self.cap is not None:
            return KIND_BOX_CAP
        return KIND_BOX

    # -- membership ---------------------------------------------------------

    def contains(self, x, tol: float = CONTAINS_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise InputError(f"expected vector of shape ({self.dim},), got {x.shape}")
        if np.any(x < self.lower - tol) or np.any(x > self.upper + tol):
            return False
        if self.cap is not None and np.sum(x) > self.cap + tol:
            return False
        for a, b in self.halfspaces:
            if a @ x > b + tol:
                return False
        return True

    # -- projection ---------------------------------------------------------

    def project(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dim,):
            raise InputError(f"expected vector of shape ({self.dim},), got {y.shape}")
        return self.project_rows(y[None, :])[0]

    def project_rows(self, ys) -> np.ndarray:
        """Row-wise Euclidean projection; the single-vector path delegates here
        so batched and scalar calls agree bit-for-bit."""
        ys = np.asarray(ys, dtype=float)
        if ys.ndim != 2 or ys.shape[1] != self.dim:
            raise InputError(f"expected rows of shape (m, {self.dim}), got {ys.shape}")
        if self.halfspaces:
            raise UnsupportedOperationError("projection onto halfspace domains is not supported")
        out = np.clip(ys, self.lower, self.upper)
        if self.cap is None:
            return out
        over = out.sum(axis=1) > self.cap
        if not np.any(over):
            return out
        out[over] = self._project_capped(ys[over])
        return out

    def _project_capped(self, ys: np.ndarray) -> np.ndarray:
        """KKT form of the capped projection: x = clamp(y - tau) with tau >= 0
        solving sum(clamp(y - tau)) = cap, found by bisection per row.

        The bracket keeps sum(clamp(y - hi)) <= cap at all times, so taking
        tau = hi at the stopping width always returns a feasible point.
        Converged rows freeze, which makes the batched iterates identical to
        running each row alone.
        """
        m = ys.shape[0]
        lo = np.zeros(m)
        hi = np.max(ys - self.lower, axis=1)

        def capped_sum(tau):
            return np.clip(ys - tau[:, None], self.lower, self.upper).sum(axis=1)

        for _ in range(PROJECT_MAX_ITERS):
            active = (hi - lo) > PROJECT_TOL
            if not np.any(active):
                break
            mid = 0.5 * (lo + hi)
            over = capped_sum(mid) > self.cap
            lo = np.where(active & over, mid, lo)
            hi = np.where(active & ~over, mid, hi)
        return np.clip(ys - hi[:, None], self.lower, self.upper)

    # -- linear maximization oracle ------------------------------------------

    def lmo(self, direction) -> np.ndarray:
        direction = np.asarray(direction, dtype=float)
        if direction.shape != (self.dim,):
            raise InputError(f"expected vector of shape ({self.dim},), got {direction.shape}")
        if not np.all(np.isfinite(direction)):
            raise InputError("non-finite entry in direction")
        if self.kind == KIND_BOX:
            return np.where(direction > 0, self.upper, self.lower)
        if self.kind == KIND_BOX_CAP:
            return self._lmo_knapsack(direction, np.ones(self.dim), self.cap)
        if len(self.halfspaces) == 1:
            a, b = self.halfspaces[0]
            return self._lmo_knapsack(direction, a, b)
        return self._lmo_lp(direction)

    def _lmo_knapsack(self, direction: np.ndarray, weights: np.ndarray, budget: float) -> np.ndarray:
        """Exact fractional knapsack for a box plus one nonnegative-weight row.

        Coordinates with nonpositive direction stay at the lower bound
        (deterministic tie rule); zero-weight profitable coordinates are free
        and go straight to the upper bound; the rest are raised in order of
        direction/weight, ties broken by lowest index, with the last raise
        fractional.
        """
        x = np.array(self.lower, dtype=float)
        remaining = budget - float(weights @ x)
        gain = direction > 0
        free = gain & (weights == 0)
        x[free] = self.upper[free]
        paid = np.flatnonzero(gain & (weights > 0))
        if paid.size == 0 or remaining <= 0:
            return x
        ratios = direction[paid] / weights[paid]
        order = paid[np.lexsort((paid, -ratios))]
        for i in order:
            if remaining <= 0:
                break
            room = self.upper[i] - x[i]
            raise_i = min(room, remaining / weights[i])
            x[i] += raise_i
            remaining -= raise_i * weights[i]
        return x

    def _lmo_lp(self, direction: np.ndarray) -> np.ndarray:
        from scipy.optimize import linprog

        a_ub = np.stack([a for a, _ in self.halfspaces])
        b_ub = np.array([b for _, b in self.halfspaces])
        res = linprog(-direction, A_ub=a_ub, b_ub=b_ub,
                      bounds=list(zip(self.lower, self.upper)), method="highs")
        if not res.success:
            raise InputError(f"linear oracle LP failed: {res.message}")
        return np.asarray(res.x, dtype=float)

    # -- geometry ------------------------------------------------------------

    def diameter(self) -> float:
        if self.kind == KIND_BOX:
            return float(np.linalg.norm(self.upper - self.lower))
        if self.kind == KIND_BOX_CAP:
            return self._diameter_capped()
        raise UnsupportedOperationError("diameter of halfspace domains is not supported")

    def _diameter_capped(self) -> float:
        """Exact diameter of {0 <= x <= u, sum(x) <= M}.

        The squared distance decomposes per coordinate, and for zero lower
        bounds the two extremal points always use disjoint supports (one side
        at zero wherever the other is positive).  Each side then solves
        max sum(x^2) under its own copy of the cap, whose optimum saturates
        capacities in decreasing order (greedy allocation majorizes every
        other feasible allocation and sum(x^2) is Schur-convex).  Uniform
        boxes reduce to a split-size enumeration; small non-uniform boxes
        enumerate the support bipartition exhaustively.
        """
        if np.any(self.lower != 0):
            raise UnsupportedOperationError("cap diameter requires zero lower bounds")
        u = self.upper
        n = self.dim
        if np.all(u == u[0]):
            u0 = float(u[0])
            if u0 == 0.0:
                return 0.0
            best = 0.0
            for s1 in range(n + 1):
                best = max(best, self._uniform_fill_sq(s1, u0) + self._uniform_fill_sq(n - s1, u0))
            return float(np.sqrt(best))
        if n > 16:
            raise UnsupportedOperationError(
                "exact cap diameter for non-uniform boxes is limited to n <= 16")

        def side_value(caps: np.ndarray) -> float:
            caps = np.sort(caps)[::-1]
            total, budget = 0.0, float(self.cap)
            for c in caps:
                take = min(c, budget)
                total += take * take
                budget -= take
                if budget <= 0:
                    break
            return total

        best = 0.0
        idx = np.arange(n)
        for mask in range(1 << n):
            take = (mask >> idx & 1).astype(bool)
            best = max(best, side_value(u[take]) + side_value(u[~take]))
        return float(np.sqrt(best))

    def _uniform_fill_sq(self, support: int, u0: float) -> float:
        """max sum(x^2) over `support` coordinates with x_i <= u0, sum <= cap."""
        if support <= 0:
            return 0.0
        full = min(support, int(self.cap // u0))
        value = full * u0 * u0
        if full < support:
            r = min(self.cap - full * u0, u0)
            value += r * r
        return value

    def max_point_norm(self) -> float:
        """max ||x|| over the domain; feeds the surrogate range bound."""
        if self.kind == KIND_BOX:
            return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))
        if self.kind == KIND_BOX_CAP:
            if np.any(self.lower != 0):
                raise UnsupportedOperationError("cap max-norm requires zero lower bounds")
            caps = np.sort(self.upper)[::-1]
            total, budget = 0.0, float(self.cap)
            for c in caps:
                take = min(c, budget)
                total += take * take
                budget -= take
                if budget <= 0:
                    break
            return float(np.sqrt(total))
        raise UnsupportedOperationError("max-norm of halfspace domains is not supported")


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def box(lower, upper) -> Domain:
    return Domain(lower=np.asarray(lower, dtype=float), upper=np.asarray(upper, dtype=float))


def unit_box(n: int) -> Domain:
    if n < 1:
        raise InputError("n must be >= 1")
    return Domain(lower=np.zeros(n), upper=np.ones(n))


def box_with_cap(lower, upper, cap: float) -> Domain:
    return Domain(lower=np.asarray(lower, dtype=float), upper=np.asarray(upper, dtype=float),
                  cap=float(cap))


def unit_box_with_cap(n: int, cap: float) -> Domain:
    if n < 1:
        raise InputError("n must be >= 1")
    return Domain(lower=np.zeros(n), upper=np.ones(n), cap=float(cap))


def with_budget_halfspace(domain: Domain, normal, offset: float) -> Domain:
    """Intersect a domain with a'x <= offset (used to build benchmark sets).

    A cap is re-encoded as an explicit all-ones halfspace so the result stays
    within the two-row limit.
    """
    normal = np.asarray(normal, dtype=float)
    rows = list(domain.halfspaces)
    if domain.cap is not None:
        rows.append((np.ones(domain.dim), float(domain.cap)))
    rows.append((normal, float(offset)))
    return Domain(lower=domain.lower, upper=domain.upper, cap=None, halfspaces=tuple(rows))
