"""Monotone DR-submodular utility families and their certificates.

Three concrete families are provided, all normalized so f(0) = 0:

* ``QuadraticUtility``   f(x) = 1/2 x'Hx + h'x with H element-wise <= 0.
* ``LogDetUtility``      f(x) = log det(diag(x)(L - I) + I) with L symmetric PSD.
* ``MultilinearUtility`` the multilinear extension of a monotone submodular
  set function, evaluated by exact subset enumeration (ground sets n <= 12).

DR-submodularity here means the gradient is element-wise antitone: x <= y
component-wise implies grad f(x) >= grad f(y) component-wise.  Together with
monotonicity (nonnegative gradient) this gives the up-concavity inequality
f(x + u) <= f(x) + <grad f(x), u> for u >= 0, which is what the Frank-Wolfe
style analysis of the solver consumes.

``check_dr_monotone`` is a sampled checker usable on arbitrary closures;
``estimate_constants`` produces Lipschitz/smoothness bounds, exact for
quadratics and sampled-with-safety-factor otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

import numpy as np

from .errors import GenerationError, InputError, SingularityError
from .util import child_rng

# Tolerances shared by the certificates in this module.
CERT_TOL = 1e-9
CHOL_PIVOT_FLOOR = 1e-12  # squared-diagonal floor in the Cholesky factor
SAFETY_FACTOR = 1.25      # inflation applied to sampled (non-exact) constants

MULTILINEAR_MAX_GROUND = 12


@runtime_checkable
class UtilityFunction(Protocol):
    """Anything with a dimension, a value and a gradient."""

    n: int

    def value(self, x: np.ndarray) -> float: ...

    def grad(self, x: np.ndarray) -> np.ndarray: ...

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]: ...

    def grad_rows(self, xs: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class FunctionConstants:
    """Gradient-norm (Lipschitz) and smoothness upper bounds for one function."""

    lipschitz: float
    smoothness: float

    def __post_init__(self):
        if not (np.isfinite(self.lipschitz) and self.lipschitz >= 0):
            raise InputError(f"lipschitz must be finite and >= 0, got {self.lipschitz}")
        if not (np.isfinite(self.smoothness) and self.smoothness >= 0):
            raise InputError(f"smoothness must be finite and >= 0, got {self.smoothness}")


def _as_vector(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise InputError(f"expected vector of shape ({n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError("non-finite entry in input vector")
    return x


def _as_rows(xs, n: int) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != n:
        raise InputError(f"expected rows of shape (m, {n}), got {xs.shape}")
    return xs


@dataclass(frozen=True)
class QuadraticUtility:
    """f(x) = 1/2 x'Hx + h'x with every entry of H <= 0.

    The value and gradient only see the symmetric part S = (H + H')/2, which
    inherits the sign constraint.  Element-wise nonpositive S makes the
    gradient S x + h antitone, so the function is DR-submodular by
    construction; monotonicity on a given domain is a separate certificate
    (see ``certify_monotone``) because it couples H with h.
    """

    mat: np.ndarray
    vec: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        vec = np.asarray(self.vec, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"H must be square, got shape {mat.shape}")
        if vec.shape != (mat.shape[0],):
            raise InputError(f"h must have shape ({mat.shape[0]},), got {vec.shape}")
        if not (np.all(np.isfinite(mat)) and np.all(np.isfinite(vec))):
            raise InputError("non-finite entry in quadratic coefficients")
        if np.any(mat > 0):
            raise InputError("H must be element-wise <= 0 for DR-submodularity")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "_sym", 0.5 * (mat + mat.T))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def value(self, x) -> float:
        x = _as_vector(x, self.n)
        return float(0.5 * x @ (self.mat @ x) + self.vec @ x)

    def grad(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        return self._sym @ x + self.vec

    def value_and_grad(self, x) -> tuple[float, np.ndarray]:
        return self.value(x), self.grad(x)

    def grad_rows(self, xs) -> np.ndarray:
        xs = _as_rows(xs, self.n)
        return xs @ self._sym + self.vec

    def certify_monotone(self, domain, tol: float = CERT_TOL):
        """Exact monotonicity certificate against a box/box-with-cap domain.

        The gradient is affine with element-wise nonpositive linear part, so
        its i-th coordinate is minimized at the feasible point that loads the
        most-negative row entries.  That point is exactly the domain's linear
        maximization oracle applied to -S_i, making the certificate exact.

        Returns (ok, worst_slack, worst_coordinate).
        """
        s = self._sym
        worst = np.inf
        worst_i = -1
        for i in range(self.n):
            x = domain.lmo(-s[i])
            slack = self.vec[i] + s[i] @ x
            if slack < worst:
                worst = slack
                worst_i = i
        return bool(worst >= -tol), float(worst), int(worst_i)


@dataclass(frozen=True)
class LogDetUtility:
    """f(x) = log det(diag(x)(L - I) + I) for symmetric PSD L.

    grad_i f(x) = [(L - I) A(x)^{-1}]_{ii} with A(x) = diag(x)(L - I) + I.
    The determinant is evaluated through the symmetric congruence
    I + diag(sqrt(x)) (L - I) diag(sqrt(x)), which shares its determinant
    with A(x) and admits a Cholesky factorization whenever A is positive
    definite on the support of x.  Gradients use an explicit inverse of the
    n-by-n system per evaluation: clarity over micro-optimization.
    """

    mat: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InputError(f"L must be square, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise InputError("non-finite entry in L")
        if not np.allclose(mat, mat.T, atol=1e-10):
            raise InputError("L must be symmetric")
        mat = 0.5 * (mat + mat.T)
        eigs = np.linalg.eigvalsh(mat)
        if eigs.min() < -1e-9:
            raise InputError(f"L must be PSD, found eigenvalue {eigs.min():.3e}")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "_b", mat - np.eye(mat.shape[0]))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def _system(self, x: np.ndarray) -> np.ndarray:
        return x[:, None] * self._b + np.eye(self.n)

    def value(self, x) -> float:
        x = _as_vector(x, self.n)
        xc = np.maximum(x, 0.0)  # guard tiny negative fp residue from projections
        s = np.sqrt(xc)
        sym = np.eye(self.n) + (s[:, None] * self._b) * s[None, :]
        try:
            chol = np.linalg.cholesky(sym)
        except np.linalg.LinAlgError:
            raise SingularityError("A(x) is not positive definite at this point") from None
        diag = np.diagonal(chol)
        if np.min(diag) ** 2 < CHOL_PIVOT_FLOOR:
            raise SingularityError("A(x) is numerically singular (pivot underflow)")
        return float(2.0 * np.sum(np.log(diag)))

    def grad(self, x) -> np.ndarray:
        x = _as_vector(x, self.n)
        a = self._system(np.maximum(x, 0.0))
        try:
            inv = np.linalg.inv(a)
        except np.linalg.LinAlgError:
            raise SingularityError("A(x) is singular at this point") from None
        return np.einsum("ij,ji->i", self._b, inv)

    def value_and_grad(self, x) -> tuple[float, np.ndarray]:
        return self.value(x), self.grad(x)

    def grad_rows(self, xs) -> np.ndarray:
        xs = _as_rows(xs, self.n)
        xc = np.maximum(xs, 0.0)
        a = xc[:, :, None] * self._b[None, :, :] + np.eye(self.n)
        try:
            inv = np.linalg.inv(a)
        except np.linalg.LinAlgError:
            raise SingularityError("A(x) is singular at one of the points") from None
        return np.einsum("ij,kji->ki", self._b, inv)


@dataclass(frozen=True)
class MultilinearUtility:
    """Multilinear extension of a monotone submodular set function.

    ``set_values[m]`` is F(S) for the subset whose membership bitmask is m
    (bit i set means element i is in S).  Evaluation enumerates all 2^n
    subsets exactly, so the ground set is capped at n = 12.

    Construction checks, exhaustively over the subset lattice:
      F(empty) = 0, monotonicity F(S + i) >= F(S), and the pairwise marginal
      condition F(S + i) + F(S + j) >= F(S + i + j) + F(S), which is
      equivalent to submodularity.
    """

    ground_size: int
    set_values: np.ndarray

    def __post_init__(self):
        n = int(self.ground_size)
        if not (1 <= n <= MULTILINEAR_MAX_GROUND):
            raise InputError(f"ground size must be in [1, {MULTILINEAR_MAX_GROUND}], got {n}")
        vals = np.asarray(self.set_values, dtype=float)
        if vals.shape != (1 << n,):
            raise InputError(f"need {1 << n} subset values for n = {n}, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise InputError("non-finite subset value")
        if abs(vals[0]) > 1e-12:
            raise InputError(f"F(empty set) must be 0, got {vals[0]}")
        masks = np.arange(1 << n)
        for i in range(n):
            bit = 1 << i
            without = masks[(masks & bit) == 0]
            if np.any(vals[without | bit] < vals[without] - 1e-12):
                raise InputError(f"set function is not monotone at element {i}")
        for i in range(n):
            for j in range(i + 1, n):
                bi, bj = 1 << i, 1 << j
                s = masks[((masks & bi) == 0) & ((masks & bj) == 0)]
                lhs = vals[s | bi] + vals[s | bj]
                rhs = vals[s | bi | bj] + vals[s]
                if np.any(lhs < rhs - 1e-12):
                    raise InputError(f"set function is not submodular at pair ({i}, {j})")
        object.__setattr__(self, "ground_size", n)
        object.__setattr__(self, "set_values", vals)
        bits = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
        object.__setattr__(self, "_bits", bits)

    @property
    def n(self) -> int:
        return self.ground_size

    def _factors(self, x: np.ndarray) -> np.ndarray:
        # factor[m, i] = x_i if element i is in subset m else 1 - x_i
        b = self._bits
        return b * x[None, :] + (1.0 - b) * (1.0 - x[None, :])

    def _check_unit_box(self, x: np.ndarray) -> np.ndarray:
        if np.any(x < -1e-9) or np.any(x > 1 + 1e-9):
            raise InputError("multilinear extension needs x in [0, 1]^n")
        return np.clip(x, 0.0, 1.0)

    def value(self, x) -> float:
        x = self._check_unit_box(_as_vector(x, self.n))
        w = np.prod(self._factors(x), axis=1)
        return float(w @ self.set_values)

    def grad(self, x) -> np.ndarray:
        return self.value_and_grad(x)[1]

    def value_and_grad(self, x) -> tuple[float, np.ndarray]:
        """grad_i = f(x with x_i = 1) - f(x with x_i = 0), exact for multilinear f.

        Products with coordinate i left out come from prefix/suffix scans, so
        zero factors are handled without any division.
        """
        x = self._check_unit_box(_as_vector(x, self.n))
        f = self._factors(x)
        m, n = f.shape
        pre = np.ones((m, n + 1))
        np.cumprod(f, axis=1, out=pre[:, 1:])
        suf = np.ones((m, n + 1))
        suf[:, :-1] = np.cumprod(f[:, ::-1], axis=1)[:, ::-1]
        without = pre[:, :-1] * suf[:, 1:]
        value = float(pre[:, -1] @ self.set_values)
        sign = 2.0 * self._bits - 1.0
        grad = (self.set_values[:, None] * sign * without).sum(axis=0)
        return value, grad

    def grad_rows(self, xs) -> np.ndarray:
        xs = _as_rows(xs, self.n)
        return np.stack([self.value_and_grad(row)[1] for row in xs])


@dataclass(frozen=True)
class CallableUtility:
    """Wrap raw closures so checkers and the solver can consume them."""

    n: int
    value_fn: Callable[[np.ndarray], float]
    grad_fn: Callable[[np.ndarray], np.ndarray]

    def value(self, x) -> float:
        return float(self.value_fn(_as_vector(x, self.n)))

    def grad(self, x) -> np.ndarray:
        return np.asarray(self.grad_fn(_as_vector(x, self.n)), dtype=float)

    def value_and_grad(self, x) -> tuple[float, np.ndarray]:
        return self.value(x), self.grad(x)

    def grad_rows(self, xs) -> np.ndarray:
        xs = _as_rows(xs, self.n)
        return np.stack([self.grad(row) for row in xs])


# ---------------------------------------------------------------------------
# Sampled certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DrCheckReport:
    monotone_ok: bool
    dr_ok: bool
    samples: int
    worst_gradient_entry: float
    worst_dr_gap: float
    monotone_witness: tuple | None = None
    dr_witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.monotone_ok and self.dr_ok


def _feasible_cloud(domain, count: int, rng: np.random.Generator) -> np.ndarray:
    """Feasible points for any supported domain kind, no projection needed.

    Vertices come from the linear oracle at random directions; convex
    combinations of vertex pairs and segments toward 0 (feasible because the
    domain is convex and contains the origin) fill in the interior.
    """
    m = max(4, (count + 2) // 3)
    dirs = rng.standard_normal((m, domain.dim))
    verts = np.stack([domain.lmo(d) for d in dirs])
    lam = rng.uniform(size=(m, 1))
    mixes = lam * verts + (1.0 - lam) * np.roll(verts, 1, axis=0)
    scaled = mixes * rng.uniform(size=(m, 1))
    cloud = np.concatenate([verts, mixes, scaled])
    return cloud[:count] if count <= len(cloud) else cloud


def _sample_ordered_pairs(domain, samples: int, rng: np.random.Generator):
    """Pairs x <= y with both feasible.

    y is a feasible cloud point; x_i = min(u_i * y_i, y_i) with u uniform in
    [0, 1] shrinks each coordinate toward zero without ever exceeding y, so x
    stays inside every box bound, cap, and nonnegative-normal halfspace that
    y satisfies.
    """
    ys = _feasible_cloud(domain, samples, rng)
    xs = np.minimum(ys * rng.uniform(0.0, 1.0, size=ys.shape), ys)
    return xs, ys


def check_dr_monotone(f: UtilityFunction, domain, samples: int = 200,
                      rng_seed: int = 0, tol: float = CERT_TOL) -> DrCheckReport:
    """Sampled monotonicity + DR (antitone gradient) check.

    Draws ordered pairs x <= y in the domain and verifies grad f >= -tol at
    the sampled points and grad f(x) >= grad f(y) - tol coordinate-wise.
    Witness points for the worst violation are kept in the report.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    if getattr(f, "n", None) != domain.dim:
        raise InputError(f"function dimension {getattr(f, 'n', None)} != domain dimension {domain.dim}")
    rng = child_rng(rng_seed)
    xs, ys = _sample_ordered_pairs(domain, samples, rng)
    gx = f.grad_rows(xs)
    gy = f.grad_rows(ys)

    allg = np.concatenate([gx, gy])
    allp = np.concatenate([xs, ys])
    worst_entry_idx = np.unravel_index(np.argmin(allg), allg.shape)
    worst_entry = float(allg[worst_entry_idx])
    monotone_witness = None
    if worst_entry < -tol:
        monotone_witness = (allp[worst_entry_idx[0]].copy(), int(worst_entry_idx[1]), worst_entry)

    gaps = gx - gy  # DR wants this >= 0 coordinate-wise
    worst_gap_idx = np.unravel_index(np.argmin(gaps), gaps.shape)
    worst_gap = float(gaps[worst_gap_idx])
    dr_witness = None
    if worst_gap < -tol:
        r, c = worst_gap_idx
        dr_witness = (xs[r].copy(), ys[r].copy(), int(c), worst_gap)

    return DrCheckReport(
        monotone_ok=worst_entry >= -tol,
        dr_ok=worst_gap >= -tol,
        samples=samples,
        worst_gradient_entry=worst_entry,
        worst_dr_gap=worst_gap,
        monotone_witness=monotone_witness,
        dr_witness=dr_witness,
    )


def estimate_constants(f: UtilityFunction, domain, samples: int = 64,
                       rng_seed: int = 0) -> FunctionConstants:
    """Lipschitz (max gradient norm) and smoothness bounds for one function.

    Quadratics are exact: the gradient is affine, so its norm is maximized at
    a vertex (probed through the linear oracle), and the smoothness constant
    is the spectral norm of the symmetric part.  Other families are sampled
    and inflated by a 1.25 safety factor; smoothness comes from the Frobenius
    norm of central-difference Hessians at the probe points.
    """
    if samples < 2:
        raise InputError("samples must be >= 2")
    rng = child_rng(rng_seed)
    if isinstance(f, QuadraticUtility):
        dirs = rng.standard_normal((max(32, samples), f.n))
        pts = [domain.lmo(d) for d in dirs]
        pts.append(np.zeros(f.n))
        pts.append(np.array(domain.lower, dtype=float))
        grads = f.grad_rows(np.stack(pts))
        lipschitz = float(np.max(np.linalg.norm(grads, axis=1)))
        smoothness = float(np.max(np.abs(np.linalg.eigvalsh(f._sym))))
        return FunctionConstants(lipschitz=lipschitz, smoothness=smoothness)

    pts = np.concatenate([_feasible_cloud(domain, samples, rng),
                          np.zeros((1, domain.dim))])
    grads = f.grad_rows(pts)
    lipschitz = SAFETY_FACTOR * float(np.max(np.linalg.norm(grads, axis=1)))

    h = 1e-5
    span = np.asarray(domain.upper, dtype=float) - np.asarray(domain.lower, dtype=float)
    interior = np.clip(pts[:: max(1, len(pts) // 16)],
                       np.asarray(domain.lower) + h * span,
                       np.asarray(domain.upper) - h * span)
    worst = 0.0
    eye = np.eye(f.n)
    for x in interior:
        cols = []
        for i in range(f.n):
            step = h * max(span[i], 1.0)
            cols.append((f.grad(x + step * eye[i]) - f.grad(x - step * eye[i])) / (2 * step))
        hess = np.stack(cols, axis=1)
        worst = max(worst, float(np.linalg.norm(hess, "fro")))
    return FunctionConstants(lipschitz=lipschitz, smoothness=SAFETY_FACTOR * worst)


# ---------------------------------------------------------------------------
# Random instance generators
# ---------------------------------------------------------------------------

def draw_quadratic(rng: np.random.Generator, n: int,
                   entry_range: tuple[float, float]) -> QuadraticUtility:
    """One random monotone DR quadratic; shared by the seeded generator and streams.

    Entries are drawn i.i.d. uniform in ``entry_range`` and symmetrized; the
    quadratic form only sees the symmetric part, and symmetrizing is what
    makes the companion linear term h = -H'1 an exact monotonicity
    calibration (the gradient at the all-ones corner is then exactly zero).
    """
    lo, hi = entry_range
    raw = rng.uniform(lo, hi, size=(n, n))
    sym = 0.5 * (raw + raw.T)
    h = -sym.T @ np.ones(n)
    return QuadraticUtility(mat=sym, vec=h)


def generate_quadratic(n: int, rng_seed: int,
                       entry_range: tuple[float, float] = (-1.0, 0.0),
                       domain=None) -> QuadraticUtility:
    """Seeded random quadratic with an asserted monotonicity certificate."""
    if n < 1:
        raise InputError("n must be >= 1")
    lo, hi = entry_range
    if not (lo <= hi <= 0.0):
        raise InputError(f"entry range must satisfy lo <= hi <= 0, got ({lo}, {hi})")
    q = draw_quadratic(child_rng(rng_seed), n, entry_range)
    if domain is None:
        from .domains import unit_box
        domain = unit_box(n)
    ok, worst, worst_i = q.certify_monotone(domain, tol=1e-12)
    if not ok:
        raise GenerationError(
            f"monotonicity certificate failed at coordinate {worst_i} (slack {worst:.3e})")
    return q


def draw_logdet(rng: np.random.Generator, n: int,
                eig_range: tuple[float, float]) -> LogDetUtility:
    """One random log-det instance: L = Q' diag(d) Q with Q a random rotation."""
    lo, hi = eig_range
    for _ in range(10):
        gauss = rng.standard_normal((n, n))
        q, r = np.linalg.qr(gauss)
        if np.min(np.abs(np.diagonal(r))) > 1e-10:
            break
    else:
        raise GenerationError("could not orthonormalize a random basis in 10 tries")
    d = rng.uniform(lo, hi, size=n)
    mat = (q.T * d) @ q
    return LogDetUtility(mat=0.5 * (mat + mat.T))


def generate_logdet(n: int, rng_seed: int,
                    eig_range: tuple[float, float] = (2.0, 3.0)) -> LogDetUtility:
    """Seeded random log-det utility with eigenvalues verified in range."""
    if n < 1:
        raise InputError("n must be >= 1")
    lo, hi = eig_range
    if not (0.0 <= lo <= hi):
        raise InputError(f"eigenvalue range must satisfy 0 <= lo <= hi, got ({lo}, {hi})")
    inst = draw_logdet(child_rng(rng_seed), n, eig_range)
    eigs = np.linalg.eigvalsh(inst.mat)
    if eigs.min() < lo - 1e-9 or eigs.max() > hi + 1e-9:
        raise GenerationError(
            f"spectrum [{eigs.min():.12f}, {eigs.max():.12f}] escaped [{lo}, {hi}]")
    return inst


def generate_coverage(n: int, rng_seed: int, universe: int | None = None,
                      cover_prob: float = 0.35) -> MultilinearUtility:
    """Seeded random weighted-coverage set function as a multilinear utility.

    Element i covers each of the ``universe`` items independently with
    probability ``cover_prob``; F(S) is the total weight of items covered by
    S.  Coverage functions are monotone and submodular by construction, and
    the MultilinearUtility constructor re-verifies both exhaustively.
    """
    if not (1 <= n <= MULTILINEAR_MAX_GROUND):
        raise InputError(f"ground size must be in [1, {MULTILINEAR_MAX_GROUND}], got {n}")
    if not 0.0 < cover_prob <= 1.0:
        raise InputError(f"cover_prob must lie in (0, 1], got {cover_prob}")
    m = 3 * n if universe is None else int(universe)
    if m < 1:
        raise InputError(f"universe size must be >= 1, got {m}")
    rng = child_rng(rng_seed)
    covers = (rng.random((n, m)) < cover_prob).astype(np.int64)
    weights = rng.uniform(0.5, 1.5, size=m)
    masks = np.arange(1 << n)
    bits = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int64)
    hit_counts = bits @ covers
    vals = (hit_counts > 0).astype(float) @ weights
    return MultilinearUtility(ground_size=n, set_values=vals)


# ---------------------------------------------------------------------------
# Set-function table files
# ---------------------------------------------------------------------------

def load_set_function(path) -> MultilinearUtility:
    """Read a subset-value table: one line per subset, '<bitmask> <value>'.

    Blank lines and '#' comments are allowed.  The table must cover all 2^n
    bitmasks for some n <= 12, each exactly once.
    """
    entries: dict[int, float] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected '<bitmask> <value>', got {line!r}")
            try:
                mask = int(parts[0])
                val = float(parts[1])
            except ValueError:
                raise InputError(f"{path}:{lineno}: unparsable entry {line!r}") from None
            if mask < 0:
                raise InputError(f"{path}:{lineno}: negative bitmask {mask}")
            if mask in entries:
                raise InputError(f"{path}:{lineno}: duplicate bitmask {mask}")
            entries[mask] = val
    if not entries:
        raise InputError(f"{path}: empty set-function table")
    size = len(entries)
    n = size.bit_length() - 1
    if (1 << n) != size or max(entries) != size - 1:
        raise InputError(
            f"{path}: table must cover all 2^n bitmasks exactly once (got {size} rows, max mask {max(entries)})")
    vals = np.array([entries[m] for m in range(size)], dtype=float)
    return MultilinearUtility(ground_size=n, set_values=vals)
