"""Modal and linear buckling eigenanalysis."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics as nm
from .io import write_csv
from .operators import OperatorSet


class DegenerateGeometricStiffness(nm.NumericsError):
    """K(u_L) - K_L vanishes: the model has no geometric stiffness."""


@dataclass(frozen=True)
class EigenPair:
    """``value`` is omega^2 (modal) or the raw buckling eigenvalue."""

    value: float
    vector: np.ndarray

    @property
    def frequency(self) -> float:
        """Angular frequency sqrt(omega^2); NaN for a negative value."""
        return math.sqrt(self.value) if self.value >= 0 else math.nan

    @property
    def load_factor(self) -> float:
        """Critical load factor of a buckling pair: the load at which K_L + lam * dK is singular."""
        return -self.value


def modal(ops: OperatorSet, count: int | None = None) -> list[EigenPair]:
    """Smallest ``count`` solutions of K_L phi = omega^2 M phi, M-orthonormal."""
    K = ops.stiffness()
    M = ops.mass()
    w, V = nm.sym_generalized_eig(K, M, count)
    return [EigenPair(float(w[i]), V[:, i].copy()) for i in range(w.size)]


def buckling(ops: OperatorSet, count: int | None = None) -> list[EigenPair]:
    """Linear buckling about the linear state u_L = K_L^-1 P.

    Solves K_L phi = lam (K(u_L) - K_L) phi through the K_L-reduced pencil
    dK phi = mu K_L phi, lam = 1 / mu; modes are K_L-orthonormal. Values are
    the raw lam of that equation. With this sign convention a compressive
    instability has lam < 0 and critical load factor -lam, so pairs are
    ordered by smallest |lam| with positive load factors (negative raw lam)
    first. Directions with mu = 0 (infinite lam) are dropped.
    """
    KL = nm.as_mat(ops.stiffness())
    n = KL.shape[0]
    uL = nm.lu_solve(KL, ops.force())
    dK = ops.jacobian(uL) - KL
    dK = 0.5 * (dK + dK.T)
    if float(np.max(np.abs(dK), initial=0.0)) <= 1e-14 * float(np.max(np.abs(KL), initial=0.0)):
        raise DegenerateGeometricStiffness("K(u_L) - K_L is zero: no geometric nonlinearity")
    mu, V = nm.sym_generalized_eig(dK, KL, n)
    tol = 1e-12 * float(np.max(np.abs(mu)))
    pairs = [EigenPair(1.0 / float(mu[i]), V[:, i].copy()) for i in range(n) if abs(mu[i]) > tol]
    pairs.sort(key=lambda p: (p.load_factor <= 0, abs(p.value)))
    return pairs if count is None else pairs[:count]


def write_modes_csv(path, pairs: list[EigenPair]) -> None:
    """One column per mode; the header row holds the eigenvalues."""
    header = [format(p.value, ".17g") for p in pairs]
    n = pairs[0].vector.size if pairs else 0
    rows = [[p.vector[i] for p in pairs] for i in range(n)]
    write_csv(path, header, rows)
