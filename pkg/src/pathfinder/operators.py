"""The black-box operator bundle shared by every solver.

A model exposes the external force P, the residual R(u) = F_int(u) - P, the
load-scaled residual R(u, lam) = F_int(u) - lam * P, the linear stiffness
K_L = K(0), the mass matrix M and the tangent K(u). Assembly failures are
raised as :class:`AssemblyError`; solvers catch them and reject the step.
"""
from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import as_vec


class OpStatus(enum.Enum):
    SUCCESS = "Success"
    ASSEMBLY_ERROR = "AssemblyError"
    NOT_CONVERGED = "NotConverged"


class AssemblyError(RuntimeError):
    """An operator could not be evaluated at the requested state."""


class OperatorSet:
    """Base class for models.

    Subclasses implement :meth:`internal_force`, :meth:`external_force` and
    :meth:`jacobian`; everything else has a default built from those.
    ``mass`` is optional (raise ``NotImplementedError`` when absent), as are
    ``d_jacobian`` and the displacement-control pair ``control``/``reaction``.
    """

    n_dof: int = 0

    def internal_force(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def external_force(self) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def force(self) -> np.ndarray:
        return np.array(self.external_force(), dtype=np.float64)

    def residual(self, u) -> np.ndarray:
        u = as_vec(u, self.n_dof)
        return self.internal_force(u) - self.external_force()

    def al_residual(self, u, lam: float) -> np.ndarray:
        u = as_vec(u, self.n_dof)
        return self.internal_force(u) - lam * self.external_force()

    def stiffness(self) -> np.ndarray:
        return self.jacobian(np.zeros(self.n_dof))

    def mass(self) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no mass matrix")

    d_jacobian = None
    control = None
    reaction = None

    @property
    def has_control(self) -> bool:
        return callable(self.control) and callable(self.reaction)

    def copy(self) -> "OperatorSet":
        """An independent copy for use from another execution context."""
        return copy.deepcopy(self)


class FunctionOperatorSet(OperatorSet):
    """Operators given as plain callables, in the style of lambda-defined ops.

    ``residual_fn(u)`` returns R(u) = F_int(u) - P and ``jacobian_fn(u)`` its
    derivative. ``force`` defaults to ``-residual_fn(0)``.
    """

    def __init__(self, n_dof: int, residual_fn: Callable, jacobian_fn: Callable,
                 force=None, mass=None):
        self.n_dof = n_dof
        self._residual_fn = residual_fn
        self._jacobian_fn = jacobian_fn
        P = -np.asarray(residual_fn(np.zeros(n_dof)), dtype=np.float64) if force is None else force
        self._force = as_vec(P, n_dof)
        self._mass = None if mass is None else np.atleast_2d(np.asarray(mass, dtype=np.float64))

    def external_force(self):
        return self._force

    def internal_force(self, u):
        return np.asarray(self._residual_fn(u), dtype=np.float64).reshape(-1) + self._force

    def residual(self, u):
        u = as_vec(u, self.n_dof)
        return np.asarray(self._residual_fn(u), dtype=np.float64).reshape(-1)

    def al_residual(self, u, lam: float):
        # lam == 1 must reproduce residual() exactly
        r = self.residual(u)
        return r if lam == 1.0 else r + (1.0 - lam) * self._force

    def jacobian(self, u):
        return np.atleast_2d(np.asarray(self._jacobian_fn(as_vec(u, self.n_dof)), dtype=np.float64))

    def mass(self):
        if self._mass is None:
            return super().mass()
        return self._mass


@dataclass
class ConsistencyReport:
    """Outcome of :func:`check_consistency`."""

    errors: list[float] = field(default_factory=list)
    status: OpStatus = OpStatus.SUCCESS
    message: str = ""
    threshold: float = 1e-5

    @property
    def max_error(self) -> float:
        return max(self.errors) if self.errors else 0.0

    @property
    def passed(self) -> bool:
        return self.status is OpStatus.SUCCESS and self.max_error <= self.threshold


def fd_jacobian(ops: OperatorSet, u: np.ndarray, h: float) -> np.ndarray:
    """Central finite-difference Jacobian of ``ops.residual`` at ``u``."""
    n = ops.n_dof
    K = np.empty((n, n))
    for j in range(n):
        du = np.zeros(n)
        du[j] = h
        K[:, j] = (ops.residual(u + du) - ops.residual(u - du)) / (2.0 * h)
    return K


def check_consistency(ops: OperatorSet, u_samples, h: float | None = None,
                      threshold: float = 1e-5) -> ConsistencyReport:
    """Compare ``ops.jacobian`` against central differences of ``ops.residual``.

    The error per sample is max|K - K_fd| / max(max|K|, max|K_fd|). With
    ``h=None`` the step is 1e-6 * (1 + |u|) per sample.
    """
    report = ConsistencyReport(threshold=threshold)
    try:
        for u in u_samples:
            u = as_vec(u, ops.n_dof)
            step = 1e-6 * (1.0 + float(np.linalg.norm(u))) if h is None else h
            K = ops.jacobian(u)
            K_fd = fd_jacobian(ops, u, step)
            scale = max(float(np.max(np.abs(K))), float(np.max(np.abs(K_fd))), 1e-300)
            report.errors.append(float(np.max(np.abs(K - K_fd))) / scale)
    except AssemblyError as exc:
        report.errors.clear()
        report.status = OpStatus.ASSEMBLY_ERROR
        report.message = str(exc)
    return report


class PoisonedOperatorSet(OperatorSet):
    """Wraps a model and fails assembly once ``|u|`` exceeds ``threshold``.

    Used to exercise every solver's failure path.
    """

    def __init__(self, inner: OperatorSet, threshold: float):
        self.inner = inner
        self.threshold = threshold
        self.n_dof = inner.n_dof
        self.gamma = 0.0

    def _check(self, u):
        # a prescribed displacement counts towards the state norm
        size = float(np.hypot(np.linalg.norm(u), self.gamma))
        if not np.all(np.isfinite(u)) or size > self.threshold:
            raise AssemblyError(f"assembly refused at |u| = {size:.6g}")

    @property
    def has_control(self) -> bool:
        return self.inner.has_control

    def control(self, gamma: float) -> None:
        self.inner.control(gamma)
        self.gamma = float(gamma)

    def reaction(self, u) -> float:
        self._check(u)
        return self.inner.reaction(u)

    def external_force(self):
        return self.inner.external_force()

    def internal_force(self, u):
        self._check(u)
        return self.inner.internal_force(u)

    def jacobian(self, u):
        self._check(u)
        return self.inner.jacobian(u)

    def stiffness(self):
        return self.inner.stiffness()

    def mass(self):
        return self.inner.mass()
