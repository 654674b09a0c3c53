"""Static solvers: Newton-Raphson, dynamic relaxation, composition and
displacement control.

Convergence is measured as |R| <= tolF * ref, where ref is |P| when the load
is nonzero. Under pure displacement control (P = 0) ref falls back to
max(1, |reaction|) and the target never drops below 1e-14.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import numerics as nm
from .operators import AssemblyError, OperatorSet

RESIDUAL_FLOOR = 1e-14
DIVERGENCE_FACTOR = 1e12


class SolverStatus(enum.Enum):
    CONVERGED = "Converged"
    NOT_CONVERGED = "NotConverged"
    ASSEMBLY_ERROR = "AssemblyError"
    DIVERGED = "Diverged"


@dataclass(frozen=True)
class StaticConfig:
    """Solver settings.

    ``dt``, ``alpha`` and ``damping`` only affect dynamic relaxation:
    ``alpha=None`` picks the mass scaling automatically and ``damping=0``
    selects kinetic damping.
    """

    tolF: float = 1e-6
    tolU: float = 1e-14
    max_iterations: int = 100
    dt: float = 1.0
    alpha: float | None = None
    damping: float = 0.0

    def __post_init__(self):
        if not self.tolF > 0 or not self.tolU > 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.damping < 0:
            raise ValueError("damping must be non-negative")


DR_DEFAULTS = StaticConfig(tolF=1e-4, max_iterations=100000)


@dataclass
class StaticResult:
    u: np.ndarray
    iterations: int
    residual_norm: float
    status: SolverStatus
    message: str = ""
    history: list = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is SolverStatus.CONVERGED


def reference_norm(ops: OperatorSet, u=None, lam: float = 1.0) -> float:
    p = abs(lam) * float(np.linalg.norm(ops.force())) if lam is not None else 0.0
    if p > 0:
        return p
    if ops.has_control and u is not None:
        try:
            return max(1.0, abs(float(ops.reaction(u))))
        except AssemblyError:
            return 1.0
    return 1.0


def _target(cfg, ref):
    return max(cfg.tolF * ref, RESIDUAL_FLOOR)


def newton_solve(ops: OperatorSet, cfg: StaticConfig = StaticConfig(), u0=None,
                 lam: float | None = None) -> StaticResult:
    """Newton-Raphson on R(u) = 0, or on R(u, lam) = 0 when ``lam`` is given.

    Without ``u0`` the iteration starts from the linear solution K_L u = P.
    Stops with Converged once |R| <= tolF * ref; an update smaller than
    tolU * (1 + |u|) without meeting the residual test counts as stagnation.
    """
    n = ops.n_dof

    def resid(u):
        return ops.residual(u) if lam is None else ops.al_residual(u, lam)

    u = np.zeros(n) if u0 is None else nm.as_vec(u0, n)
    history = []
    try:
        if u0 is None and n:
            P = ops.force() * (1.0 if lam is None else lam)
            u = nm.lu_solve(ops.stiffness(), P)
        pn = float(np.linalg.norm(ops.force()))
        ref = pn if pn > 0 else reference_norm(ops, u)
        target = _target(cfg, ref)
        R = resid(u)
        rn = float(np.linalg.norm(R))
        history.append((0, rn / ref, 0.0))
        it = 0
        while rn > target:
            if it == cfg.max_iterations:
                return StaticResult(u, it, rn, SolverStatus.NOT_CONVERGED,
                                    f"no convergence in {cfg.max_iterations} iterations", history)
            it += 1
            du = nm.lu_solve(ops.jacobian(u), -R)
            u_new = u + du
            if not np.all(np.isfinite(u_new)):
                return StaticResult(u, it, rn, SolverStatus.DIVERGED, "non-finite iterate", history)
            u = u_new
            R = resid(u)
            rn = float(np.linalg.norm(R))
            dn = float(np.linalg.norm(du))
            history.append((it, rn / ref, dn))
            if rn > target and dn <= cfg.tolU * (1.0 + float(np.linalg.norm(u))):
                return StaticResult(u, it, rn, SolverStatus.NOT_CONVERGED, "stagnated", history)
        return StaticResult(u, it, rn, SolverStatus.CONVERGED, history=history)
    except AssemblyError as exc:
        return StaticResult(u, len(history), math.inf, SolverStatus.ASSEMBLY_ERROR, str(exc), history)
    except nm.SingularMatrix as exc:
        return StaticResult(u, len(history), math.inf, SolverStatus.NOT_CONVERGED,
                            f"singular Jacobian: {exc}", history)


def lumped_diagonal(M: np.ndarray) -> np.ndarray:
    """Diagonal of M if it is diagonal, else its row sums."""
    off = M - np.diag(np.diag(M))
    d = np.diag(M).copy() if not np.any(off) else M.sum(axis=1)
    if np.any(d <= 0):
        raise nm.NotPositiveDefinite("lumped mass has non-positive entries")
    return d


def auto_mass_scaling(K: np.ndarray, m: np.ndarray, dt: float) -> float:
    """alpha with dt * sqrt(max_row |K| / (alpha * min m)) = 0.5."""
    kmax = float(np.max(np.sum(np.abs(K), axis=1))) if K.size else 0.0
    if kmax <= 0:
        return 1.0
    return 4.0 * dt * dt * kmax / float(np.min(m))


def dr_solve(ops: OperatorSet, cfg: StaticConfig = DR_DEFAULTS, u0=None) -> StaticResult:
    """Dynamic relaxation with a lumped, scaled mass.

    Central differences in pseudo-time on alpha*M u'' + C u' = -R(u). With
    ``damping=0`` kinetic damping is used: when the kinetic energy drops the
    state is rewound to the assumed mid-interval peak, velocities are reset
    and the march restarts from v = -dt/2 M^-1 R. Otherwise C = damping * M.
    ``history`` records (step, |R|/ref, kinetic energy, peak flag).
    """
    n = ops.n_dof
    u = np.zeros(n) if u0 is None else nm.as_vec(u0, n)
    u_start_norm = float(np.linalg.norm(u))
    try:
        m = lumped_diagonal(ops.mass()) if n else np.zeros(0)
        dt = cfg.dt
        alpha = cfg.alpha if cfg.alpha is not None else auto_mass_scaling(ops.stiffness(), m, dt)
        m = alpha * m
        ref = reference_norm(ops, u)
        target = _target(cfg, ref)
        c = cfg.damping
        R = ops.residual(u)
        rn = float(np.linalg.norm(R))
        history = []
        v = np.zeros(n)
        restart = True
        ek_prev = 0.0
        for step in range(cfg.max_iterations + 1):
            if rn <= target:
                return StaticResult(u, step, rn, SolverStatus.CONVERGED, history=history)
            if step == cfg.max_iterations:
                break
            if restart:
                v = -0.5 * dt * R / m
                restart = False
            elif c > 0:
                v = ((1.0 - 0.5 * c * dt) * v - dt * R / m) / (1.0 + 0.5 * c * dt)
            else:
                v = v - dt * R / m
            u_new = u + dt * v
            ek = 0.5 * float(v @ (m * v))
            peak = c == 0 and ek < ek_prev
            if peak:
                # rewind to mid-interval peak: u_t - dt/2 v_{t-1/2}
                u_new = u_new - 1.5 * dt * v - 0.5 * dt * dt * R / m
                ek_prev = 0.0
                restart = True
            else:
                ek_prev = ek
            u = u_new
            un = float(np.linalg.norm(u))
            if not np.isfinite(un) or un > DIVERGENCE_FACTOR * (1.0 + u_start_norm):
                return StaticResult(u, step + 1, rn, SolverStatus.DIVERGED,
                                    f"|u| = {un:.3g} exceeds the divergence bound", history)
            R = ops.residual(u)
            rn = float(np.linalg.norm(R))
            history.append((step + 1, rn / ref, ek, peak))
        return StaticResult(u, cfg.max_iterations, rn, SolverStatus.NOT_CONVERGED,
                            f"no convergence in {cfg.max_iterations} steps", history)
    except AssemblyError as exc:
        return StaticResult(u, 0, math.inf, SolverStatus.ASSEMBLY_ERROR, str(exc))


Solver = Callable[[OperatorSet, "np.ndarray | None"], StaticResult]


def newton_stage(cfg: StaticConfig = StaticConfig()) -> Solver:
    return lambda ops, u0: newton_solve(ops, cfg, u0)


def dr_stage(cfg: StaticConfig = DR_DEFAULTS) -> Solver:
    return lambda ops, u0: dr_solve(ops, cfg, u0)


def composite_solve(stages: Sequence[Solver], ops: OperatorSet, u0=None) -> StaticResult:
    """Run solvers in sequence, each starting from the previous iterate.

    A non-final stage that does not converge hands over its last iterate;
    assembly failure or divergence aborts. Status comes from the last stage.
    """
    if not stages:
        raise ValueError("composite_solve needs at least one stage")
    u = u0
    total = 0
    history = []
    res = None
    for i, stage in enumerate(stages):
        res = stage(ops, u)
        total += res.iterations
        history.append((i, res.status.value, res.iterations, res.residual_norm))
        if res.status in (SolverStatus.ASSEMBLY_ERROR, SolverStatus.DIVERGED):
            return replace(res, iterations=total, history=history,
                           message=f"stage {i}: {res.message}")
        u = res.u
    if len(stages) == 1:
        return res
    return replace(res, iterations=total, history=history)


@dataclass
class ControlPoint:
    gamma: float
    u: np.ndarray
    reaction: float


@dataclass
class ControlPath:
    points: list
    completed: bool
    status: SolverStatus = SolverStatus.CONVERGED
    message: str = ""


def displacement_control(ops: OperatorSet, gammas, solver: Solver | None = None,
                         u0=None) -> ControlPath:
    """Step a prescribed displacement through ``gammas`` (strictly monotone).

    Each solve starts from the previous solution. Stops at the first
    failed step and returns the points gathered so far.
    """
    if not ops.has_control:
        raise ValueError(f"{type(ops).__name__} has no control hook")
    g = [float(x) for x in gammas]
    d = np.diff(g)
    if len(g) > 1 and not (np.all(d > 0) or np.all(d < 0)):
        raise ValueError("displacement schedule must be strictly monotone")
    solver = solver or newton_stage()
    u = np.zeros(ops.n_dof) if u0 is None else nm.as_vec(u0, ops.n_dof)
    points = []
    for gamma in g:
        ops.control(gamma)
        res = solver(ops, u)
        if not res.converged:
            return ControlPath(points, False, res.status, f"gamma={gamma}: {res.message}")
        u = res.u
        try:
            reaction = float(ops.reaction(u))
        except AssemblyError as exc:
            return ControlPath(points, False, SolverStatus.ASSEMBLY_ERROR, str(exc))
        points.append(ControlPoint(gamma, u.copy(), reaction))
    return ControlPath(points, True)
