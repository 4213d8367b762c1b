"""Utility families: gradient oracles, DR certificates, generators, tables."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from olfw.domains import unit_box
from olfw.errors import GenerationError, InputError, SingularityError
from olfw.objectives import (
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
from olfw.util import child_rng


def fd_gradient(utility, x, h=1e-6):
    """Central-difference gradient, the independent oracle for analytic grads."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.size)
    for i in range(x.size):
        e = np.zeros(x.size)
        e[i] = h
        out[i] = (utility.value(x + e) - utility.value(x - e)) / (2.0 * h)
    return out


def interior_points(n, count, seed):
    rng = child_rng(900, seed)
    return rng.uniform(0.05, 0.95, size=(count, n))


def max_rel_gradient_error(utility, points):
    worst = 0.0
    for x in points:
        g = utility.grad(x)
        fd = fd_gradient(utility, x)
        worst = max(worst, np.linalg.norm(fd - g) / max(1.0, np.linalg.norm(g)))
    return worst


# ---------------------------------------------------------------------------
# Quadratic family
# ---------------------------------------------------------------------------

def test_quadratic_value_frozen_example():
    # hand computation: 0.5 * x'Sx + h'x with S = H here (already symmetric)
    q = QuadraticUtility(mat=np.array([[-1.0, -0.5], [-0.5, 0.0]]),
                         vec=np.array([2.0, 1.0]))
    x = np.array([1.0, 0.5])
    assert q.value(x) == pytest.approx(1.75, abs=1e-12)
    assert np.allclose(q.grad(x), np.array([2.0 - 1.25, 1.0 - 0.5]), atol=1e-12)


def test_quadratic_gradient_matches_finite_difference():
    q = generate_quadratic(2, rng_seed=7)
    worst = max_rel_gradient_error(q, interior_points(2, 100, 1))
    assert worst <= 1e-5


def test_quadratic_rejects_positive_entry():
    with pytest.raises(InputError):
        QuadraticUtility(mat=np.array([[0.0, 0.1], [0.1, 0.0]]), vec=np.zeros(2))


def test_quadratic_asymmetric_uses_symmetric_part():
    q = QuadraticUtility(mat=np.array([[-1.0, -0.8], [-0.2, -1.0]]), vec=np.zeros(2))
    s = 0.5 * (q.mat + q.mat.T)
    x = np.array([0.3, 0.9])
    assert q.value(x) == pytest.approx(0.5 * x @ s @ x, abs=1e-12)
    assert np.allclose(q.grad(x), s @ x, atol=1e-12)


def test_generated_quadratic_gradient_vanishes_at_ones():
    # the linear term is calibrated so the all-ones corner is the exact
    # monotonicity boundary
    q = generate_quadratic(5, rng_seed=3)
    assert np.linalg.norm(q.grad(np.ones(5))) <= 1e-12


def test_generated_quadratic_certificate():
    q = generate_quadratic(4, rng_seed=11)
    ok, worst, _ = q.certify_monotone(unit_box(4))
    assert ok
    assert worst >= -1e-12


# ---------------------------------------------------------------------------
# Log-det family
# ---------------------------------------------------------------------------

def test_logdet_value_frozen_diagonal_case():
    # L = 2I decouples: f(x) = sum log(1 + x_i), grad_i = 1 / (1 + x_i)
    f = LogDetUtility(mat=2.0 * np.eye(2))
    x = np.array([0.5, 0.25])
    assert f.value(x) == pytest.approx(np.log(1.5) + np.log(1.25), abs=1e-12)
    assert np.allclose(f.grad(x), [1 / 1.5, 1 / 1.25], atol=1e-12)


def test_logdet_gradient_matches_finite_difference():
    f = generate_logdet(10, rng_seed=5)
    worst = max_rel_gradient_error(f, interior_points(10, 100, 2))
    assert worst <= 1e-5


def test_logdet_value_zero_at_origin():
    f = generate_logdet(6, rng_seed=1)
    assert f.value(np.zeros(6)) == pytest.approx(0.0, abs=1e-12)


def test_logdet_singular_raises():
    # eigenvalues (0, 2): A(1) = L is singular
    f = LogDetUtility(mat=np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(SingularityError):
        f.value(np.ones(2))


def test_logdet_rejects_indefinite():
    with pytest.raises(InputError):
        LogDetUtility(mat=np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_generate_logdet_spectrum_in_range():
    f = generate_logdet(8, rng_seed=9, eig_range=(2.0, 3.0))
    eigs = np.linalg.eigvalsh(f.mat)
    assert eigs.min() >= 2.0 - 1e-9
    assert eigs.max() <= 3.0 + 1e-9


def test_logdet_grad_rows_matches_pointwise():
    f = generate_logdet(4, rng_seed=2)
    xs = interior_points(4, 6, 3)
    rows = f.grad_rows(xs)
    for row, x in zip(rows, xs):
        assert np.allclose(row, f.grad(x), atol=1e-12)


# ---------------------------------------------------------------------------
# Multilinear family
# ---------------------------------------------------------------------------

def _tiny_set_function():
    # n = 2 coverage-style table: F({0}) = 1, F({1}) = 2, F({0,1}) = 2.5
    return MultilinearUtility(ground_size=2,
                              set_values=np.array([0.0, 1.0, 2.0, 2.5]))


def test_multilinear_value_frozen_example():
    f = _tiny_set_function()
    x = np.array([0.4, 0.7])
    # closed form: x0(1-x1) F({0}) + (1-x0)x1 F({1}) + x0 x1 F({0,1})
    expected = 0.4 * 0.3 * 1.0 + 0.6 * 0.7 * 2.0 + 0.4 * 0.7 * 2.5
    assert f.value(x) == pytest.approx(expected, abs=1e-12)


def test_multilinear_gradient_is_marginal_difference():
    f = _tiny_set_function()
    x = np.array([0.4, 0.7])
    g = f.grad(x)
    for i in range(2):
        hi = x.copy()
        lo = x.copy()
        hi[i] = 1.0
        lo[i] = 0.0
        assert g[i] == pytest.approx(f.value(hi) - f.value(lo), abs=1e-12)


def test_multilinear_gradient_matches_finite_difference():
    f = generate_coverage(8, rng_seed=4)
    worst = max_rel_gradient_error(f, interior_points(8, 100, 5))
    assert worst <= 1e-5


def test_multilinear_rejects_nonzero_empty_value():
    with pytest.raises(InputError):
        MultilinearUtility(ground_size=1, set_values=np.array([0.5, 1.0]))


def test_multilinear_rejects_nonmonotone():
    with pytest.raises(InputError):
        MultilinearUtility(ground_size=2,
                           set_values=np.array([0.0, 1.0, 2.0, 0.5]))


def test_multilinear_rejects_supermodular():
    # F({0}) + F({1}) < F({0,1}) + F({}) violates submodularity
    with pytest.raises(InputError):
        MultilinearUtility(ground_size=2,
                           set_values=np.array([0.0, 1.0, 1.0, 3.0]))


def test_multilinear_rejects_wrong_table_size():
    with pytest.raises(InputError):
        MultilinearUtility(ground_size=3, set_values=np.zeros(4))


def test_generate_coverage_full_set_is_maximum():
    f = generate_coverage(6, rng_seed=8)
    assert f.set_values[-1] == pytest.approx(f.set_values.max())
    assert f.set_values[0] == 0.0


# ---------------------------------------------------------------------------
# DR / monotonicity certificates
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("utility,n", [
    (generate_quadratic(2, rng_seed=21), 2),
    (generate_logdet(10, rng_seed=22), 10),
    (generate_coverage(8, rng_seed=23), 8),
])
def test_dr_check_passes_generated_families(utility, n):
    report = check_dr_monotone(utility, unit_box(n), samples=500,
                               rng_seed=0, tol=1e-9)
    assert report.ok


def test_dr_check_rejects_positive_cross_term():
    # f(x) = x0 x1 is monotone on [0,1]^2 but its gradient grows with x,
    # the opposite of the DR requirement
    f = CallableUtility(n=2,
                        value_fn=lambda x: float(x[0] * x[1]),
                        grad_fn=lambda x: np.array([x[1], x[0]]))
    report = check_dr_monotone(f, unit_box(2), samples=500, rng_seed=0)
    assert not report.dr_ok
    assert report.dr_witness is not None


def test_dr_check_flags_nonmonotone():
    f = CallableUtility(n=2,
                        value_fn=lambda x: float(-x[0] + 0.1 * x[1]),
                        grad_fn=lambda x: np.array([-1.0, 0.1]))
    report = check_dr_monotone(f, unit_box(2), samples=100, rng_seed=0)
    assert not report.monotone_ok
    assert report.monotone_witness is not None


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), pair_seed=st.integers(0, 10_000))
def test_quadratic_gradient_antitone_property(seed, pair_seed):
    q = generate_quadratic(3, rng_seed=seed)
    rng = child_rng(901, pair_seed)
    y = rng.uniform(size=3)
    x = y * rng.uniform(size=3)  # x <= y coordinate-wise
    assert np.all(q.grad(x) >= q.grad(y) - 1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), pair_seed=st.integers(0, 10_000))
def test_coverage_value_monotone_property(seed, pair_seed):
    f = generate_coverage(5, rng_seed=seed)
    rng = child_rng(902, pair_seed)
    y = rng.uniform(size=5)
    x = y * rng.uniform(size=5)
    assert f.value(y) >= f.value(x) - 1e-9


# ---------------------------------------------------------------------------
# Constant estimation
# ---------------------------------------------------------------------------

def test_estimate_constants_quadratic_exact():
    q = generate_quadratic(2, rng_seed=31)
    est = estimate_constants(q, unit_box(2))
    s = 0.5 * (q.mat + q.mat.T)
    corners = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
    lip = max(np.linalg.norm(q.grad(c)) for c in corners)
    assert est.lipschitz == pytest.approx(lip, rel=1e-9)
    assert est.smoothness == pytest.approx(np.max(np.abs(np.linalg.eigvalsh(s))),
                                           rel=1e-9)


def test_estimate_constants_covers_sampled_gradients():
    f = generate_logdet(5, rng_seed=32)
    est = estimate_constants(f, unit_box(5))
    rng = child_rng(903)
    pts = rng.uniform(size=(200, 5))
    norms = np.linalg.norm(f.grad_rows(pts), axis=1)
    assert norms.max() <= est.lipschitz + 1e-9


# ---------------------------------------------------------------------------
# Set-function tables
# ---------------------------------------------------------------------------

def test_load_set_function_round_trip(tmp_path):
    f = _tiny_set_function()
    path = tmp_path / "table.txt"
    lines = ["# comment", ""]
    lines += ["%d %s" % (m, f.set_values[m]) for m in range(4)]
    path.write_text("\n".join(lines) + "\n")
    loaded = load_set_function(path)
    assert loaded.ground_size == 2
    assert np.allclose(loaded.set_values, f.set_values)


def test_load_set_function_missing_mask(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("0 0\n1 1\n2 1\n")
    with pytest.raises(InputError):
        load_set_function(path)


def test_load_set_function_duplicate_mask(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("0 0\n1 1\n1 2\n")
    with pytest.raises(InputError, match="3"):
        load_set_function(path)


def test_load_set_function_bad_line_reports_position(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("0 0\nnope\n")
    with pytest.raises(InputError, match=":2"):
        load_set_function(path)


def test_load_set_function_empty(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# nothing\n")
    with pytest.raises(InputError):
        load_set_function(path)


def test_generate_coverage_rejects_large_ground():
    with pytest.raises(InputError):
        generate_coverage(13, rng_seed=0)


def test_generate_quadratic_rejects_positive_range():
    with pytest.raises(InputError):
        generate_quadratic(2, rng_seed=0, entry_range=(-1.0, 0.5))
