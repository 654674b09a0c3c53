"""Dense linear algebra substrate: LU, Cholesky, LDL^T inertia, symmetric eigensolvers.

Vectors and matrices are plain float64 numpy arrays. The inner loops live in
``_kernels`` (compiled) with ``_kernels_py`` as a drop-in fallback; the backend
is picked at import time and can be switched with :func:`set_backend` or the
``PATHFINDER_KERNELS=python`` environment variable.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None

LU_PIVOT_RTOL = 1e-14
ZERO_PIVOT_RTOL = 1e-12
SYMMETRY_RTOL = 1e-12
JACOBI_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class NumericsError(ArithmeticError):
    """Base class for failures of the dense kernels."""


class SingularMatrix(NumericsError):
    pass


class NotSymmetric(NumericsError, ValueError):
    pass


class NotPositiveDefinite(NumericsError):
    pass


class DimensionMismatch(NumericsError, ValueError):
    pass


class NonFiniteValue(NumericsError, ValueError):
    pass


def available_backends() -> list[str]:
    return (["compiled"] if _kernels_c is not None else []) + ["python"]


def _initial_backend():
    if os.environ.get("PATHFINDER_KERNELS", "").lower() == "python" or _kernels_c is None:
        return "python", _kernels_py
    return "compiled", _kernels_c


BACKEND, _k = _initial_backend()


def set_backend(name: str) -> None:
    """Select ``"compiled"`` or ``"python"`` kernels for subsequent calls."""
    global BACKEND, _k
    if name == "compiled":
        if _kernels_c is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        BACKEND, _k = name, _kernels_c
    elif name == "python":
        BACKEND, _k = name, _kernels_py
    else:
        raise ValueError(f"unknown backend {name!r}")


def kernels():
    """The active kernel module (used by :mod:`pathfinder.mappedbasis`)."""
    return _k


def as_vec(x, n: int | None = None) -> np.ndarray:
    """Copy ``x`` into a finite float64 vector, optionally checking its length."""
    v = np.array(x, dtype=np.float64).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"expected length {n}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteValue("vector has NaN or Inf entries")
    return v


def as_mat(a, square: bool = True) -> np.ndarray:
    m = np.array(a, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteValue("matrix has NaN or Inf entries")
    return m


def _scale(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def check_symmetric(a: np.ndarray) -> None:
    if a.size and np.max(np.abs(a - a.T)) > SYMMETRY_RTOL * _scale(a):
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative")


@dataclass(frozen=True)
class Factorization:
    """A factored square matrix that can solve linear systems.

    ``kind`` is one of ``"lu"``, ``"cholesky"``, ``"ldlt"``. For ``ldlt`` the
    block-diagonal D is stored as ``d`` (diagonal) and ``e`` (sub-diagonal
    of 2x2 blocks) and ``inertia`` holds (n_pos, n_neg, n_zero).
    """

    kind: str
    factor: np.ndarray
    perm: np.ndarray | None = None
    d: np.ndarray | None = None
    e: np.ndarray | None = None
    inertia: tuple[int, int, int] | None = None

    @property
    def n(self) -> int:
        return self.factor.shape[0]

    def solve(self, b) -> np.ndarray:
        b = as_vec(b, self.n)
        if self.kind == "lu":
            return _k.lu_solve(self.factor, self.perm, b)
        if self.kind == "cholesky":
            return _k.back_sub_t(self.factor, _k.forward_sub(self.factor, b))
        if self.kind == "ldlt":
            if self.inertia[2]:
                raise SingularMatrix("LDL^T factor has zero pivots")
            y = _k.forward_sub(self.factor, b[self.perm])
            z = _solve_block_diag(self.d, self.e, y)
            x = np.empty_like(b)
            x[self.perm] = _k.back_sub_t(self.factor, z)
            return x
        raise ValueError(self.kind)


def _blocks(d: np.ndarray, e: np.ndarray):
    """Yield (start, size) of the 1x1 / 2x2 blocks of a block-diagonal D."""
    n = d.shape[0]
    k = 0
    while k < n:
        if k + 1 < n and e[k] != 0.0:
            yield k, 2
            k += 2
        else:
            yield k, 1
            k += 1


def _solve_block_diag(d, e, y):
    z = np.empty_like(y)
    for k, size in _blocks(d, e):
        if size == 1:
            z[k] = y[k] / d[k]
        else:
            blk = np.array([[d[k], e[k]], [e[k], d[k + 1]]])
            det = blk[0, 0] * blk[1, 1] - blk[0, 1] ** 2
            z[k] = (blk[1, 1] * y[k] - blk[0, 1] * y[k + 1]) / det
            z[k + 1] = (blk[0, 0] * y[k + 1] - blk[0, 1] * y[k]) / det
    return z


def lu(a) -> Factorization:
    """LU factorization with partial pivoting.

    Raises SingularMatrix when a pivot falls below 1e-14 * max|A|.
    """
    a = as_mat(a)
    tol = LU_PIVOT_RTOL * _scale(a)
    factor, piv, info = _k.lu_factor(a, tol)
    if info >= 0:
        raise SingularMatrix(f"pivot {max(info, 0)} is below {tol:.3g}")
    return Factorization("lu", factor, perm=piv)


def lu_solve(a, b) -> np.ndarray:
    """Solve ``A x = b`` by LU with partial pivoting."""
    a = as_mat(a)
    return lu(a).solve(as_vec(b, a.shape[0]))


def cholesky(a) -> Factorization:
    a = as_mat(a)
    check_symmetric(a)
    L, info = _k.cholesky(a)
    if info >= 0:
        raise NotPositiveDefinite(f"Cholesky breakdown at column {info}")
    return Factorization("cholesky", L)


def ldlt(a) -> Factorization:
    """Symmetric indefinite LDL^T (Bunch-Parlett pivoting) with inertia."""
    a = as_mat(a)
    check_symmetric(a)
    tol = ZERO_PIVOT_RTOL * _scale(a)
    L, d, e, perm = _k.ldlt(a, tol)
    pos = neg = zero = 0
    for k, size in _blocks(d, e):
        if size == 1:
            ev = (d[k],)
        else:
            # eigenvalues of the symmetric 2x2 block
            m = 0.5 * (d[k] + d[k + 1])
            r = math.hypot(0.5 * (d[k] - d[k + 1]), e[k])
            ev = (m + r, m - r)
        for v in ev:
            if abs(v) <= tol:
                zero += 1
            elif v > 0:
                pos += 1
            else:
                neg += 1
    return Factorization("ldlt", L, perm=perm, d=d, e=e, inertia=(pos, neg, zero))


def ldlt_inertia(a) -> tuple[int, int, int]:
    """(n_pos, n_neg, n_zero) of a symmetric matrix via Sylvester's law of inertia."""
    return ldlt(a).inertia


def sym_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """All eigenpairs of a symmetric matrix by cyclic Jacobi, ascending."""
    a = as_mat(a)
    check_symmetric(a)
    a = 0.5 * (a + a.T)
    w, V, _, converged = _k.jacobi_eigh(a, JACOBI_RTOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise NumericsError("Jacobi iteration did not converge in 100 sweeps")
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def sym_generalized_eig(a, b, count: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Smallest ``count`` eigenpairs of ``A phi = lam B phi``, B positive definite.

    Reduces with B = L L^T to the standard problem for L^-1 A L^-T and maps
    the eigenvectors back, so the returned columns are B-orthonormal.
    Returns ``(values, vectors)`` with values ascending.
    """
    a = as_mat(a)
    b = as_mat(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"A is {a.shape}, B is {b.shape}")
    check_symmetric(a)
    n = a.shape[0]
    count = n if count is None else count
    if not 0 <= count <= n:
        raise DimensionMismatch(f"count must be in [0, {n}], got {count}")
    L = cholesky(b).factor
    # C = L^-1 A L^-T
    Y = _k.forward_sub(L, a)
    C = _k.forward_sub(L, Y.T.copy())
    w, V = sym_eig(0.5 * (C + C.T))
    phi = _k.back_sub_t(L, V[:, :count].copy())
    return w[:count].copy(), phi.reshape(n, count)
