import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from pathfinder import numerics as nm


def sym(a):
    return 0.5 * (a + a.T)


def test_backends_listed():
    assert "python" in nm.available_backends()


def test_unknown_backend():
    with pytest.raises(ValueError):
        nm.set_backend("fortran")


def test_lu_solve_identity(backend):
    assert np.array_equal(nm.lu_solve(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])


def test_lu_singular(backend):
    with pytest.raises(nm.SingularMatrix):
        nm.lu_solve([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])


def test_lu_needs_pivoting(backend):
    x = nm.lu_solve([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0])
    assert np.allclose(x, [3.0, 2.0])


def test_dimension_and_finiteness(backend):
    with pytest.raises(nm.DimensionMismatch):
        nm.lu_solve(np.eye(2), [1.0, 2.0, 3.0])
    with pytest.raises(nm.NonFiniteValue):
        nm.lu_solve(np.eye(2), [1.0, math.nan])


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-1, 1)), arrays(np.float64, 6, elements=st.floats(-1, 1)))
def test_lu_residual_property(a, b):
    a = a + 7.0 * np.eye(6)  # diagonally dominant, well conditioned
    x = nm.lu_solve(a, b)
    assert np.linalg.norm(a @ x - b) <= 1e-12 * (1 + np.linalg.norm(b))


def test_cholesky_matches_numpy(backend, rng):
    a = rng.standard_normal((8, 8))
    a = a @ a.T + 8 * np.eye(8)
    L = nm.cholesky(a).factor
    assert np.allclose(L, np.linalg.cholesky(a), atol=1e-12)


def test_cholesky_rejects_indefinite(backend):
    with pytest.raises(nm.NotPositiveDefinite):
        nm.cholesky([[1.0, 0.0], [0.0, -1.0]])


def test_cholesky_rejects_unsymmetric(backend):
    with pytest.raises(nm.NotSymmetric):
        nm.cholesky([[2.0, 1.0], [0.0, 2.0]])


def test_ldlt_inertia_diagonal(backend):
    assert nm.ldlt_inertia(np.diag([3.0, -1.0, 2.0, -5.0])) == (2, 2, 0)


def test_ldlt_needs_2x2_pivot(backend):
    # zero diagonal forces a 2x2 block
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    f = nm.ldlt(a)
    assert f.inertia == (1, 1, 0)
    assert np.allclose(f.solve([1.0, 2.0]), [2.0, 1.0])


def test_ldlt_singular_counts_zero(backend):
    assert nm.ldlt_inertia(np.array([[1.0, 1.0], [1.0, 1.0]])) == (1, 0, 1)


def test_inertia_agrees_with_eigenvalues(backend, rng):
    for _ in range(20):
        a = sym(rng.standard_normal((7, 7)))
        w = np.linalg.eigvalsh(a)
        assert nm.ldlt_inertia(a) == (int((w > 0).sum()), int((w < 0).sum()), 0)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (5, 5), elements=st.floats(-10, 10)))
def test_ldlt_solve_property(a):
    a = sym(a)
    w = np.linalg.eigvalsh(a)
    if np.min(np.abs(w)) < 1e-3 * max(1.0, np.max(np.abs(w))):
        return
    b = np.arange(1.0, 6.0)
    x = nm.ldlt(a).solve(b)
    assert np.linalg.norm(a @ x - b) <= 1e-8 * np.linalg.norm(b) * np.linalg.cond(a)


def test_sym_eig_against_numpy(backend, rng):
    a = sym(rng.standard_normal((9, 9)))
    w, V = nm.sym_eig(a)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-11)
    assert np.allclose(V.T @ V, np.eye(9), atol=1e-11)
    assert np.allclose(a @ V, V * w, atol=1e-10)


def test_generalized_eig_b_orthonormal(backend, rng):
    a = sym(rng.standard_normal((6, 6)))
    b = rng.standard_normal((6, 6))
    b = b @ b.T + 6 * np.eye(6)
    w, V = nm.sym_generalized_eig(a, b, 3)
    assert w.shape == (3,) and V.shape == (6, 3)
    assert np.allclose(V.T @ b @ V, np.eye(3), atol=1e-10)
    assert np.allclose(a @ V, b @ V * w, atol=1e-10)
    full = np.sort(np.linalg.eigvals(np.linalg.solve(b, a)).real)
    assert np.allclose(w, full[:3], atol=1e-10)


def test_generalized_eig_count_range(backend):
    with pytest.raises(nm.DimensionMismatch):
        nm.sym_generalized_eig(np.eye(2), np.eye(2), 3)


def test_backends_agree(rng):
    if len(nm.available_backends()) < 2:
        pytest.skip("compiled kernels not built")
    a = sym(rng.standard_normal((12, 12)))
    out = {}
    for name in ("compiled", "python"):
        nm.set_backend(name)
        f = nm.ldlt(a)
        out[name] = (f.inertia, f.solve(np.ones(12)), nm.sym_eig(a)[0])
    nm.set_backend("compiled")
    assert out["compiled"][0] == out["python"][0]
    assert np.allclose(out["compiled"][1], out["python"][1], rtol=1e-12)
    assert np.allclose(out["compiled"][2], out["python"][2], atol=1e-12)
