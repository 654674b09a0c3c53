"""Arc-length continuation.

Steppers for load control, Riks (hyperplane) and Crisfield (sphere), a
driver loop that halves the arc length on failure and monitors stability
through the inertia of K(u), an extended system for singular points and a
branch switch at bifurcations.

The constraint metric is d(w1, w2)^2 = |u1 - u2|^2 + psi^2 (lam1 - lam2)^2 P.P.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics as nm
from .io import read_csv, write_csv, write_json
from .operators import AssemblyError, OperatorSet


class ContinuationError(RuntimeError):
    pass


class StepFailed(ContinuationError):
    """A step was rejected; the driver reduces the arc length and retries."""

    status = "NotConverged"


class ComplexRoots(StepFailed):
    status = "ComplexRoots"


class StepAssemblyError(StepFailed):
    status = "AssemblyError"


class BadBracket(ContinuationError, ValueError):
    pass


class SingularPointNotConverged(ContinuationError):
    pass


class BranchSwitchFailed(ContinuationError):
    pass


class Stepper(enum.Enum):
    LOAD = "load"
    RIKS = "riks"
    CRISFIELD = "crisfield"


@dataclass(frozen=True)
class ContinuationConfig:
    """Driver settings. ``dl`` is the base arc length (a load increment for load control)."""

    stepper: str = "crisfield"
    dl: float = 0.05
    steps: int = 100
    psi: float = 1.0
    tolF: float = 1e-10
    max_iterations: int = 25
    dl_min_factor: float = 1e-8
    predictor: str = "tangent"
    forward: bool = True
    singular: bool = False
    branch_switch: bool = False
    tau_rel: float = 1e-3
    lam_max: float | None = None

    def __post_init__(self):
        Stepper(self.stepper)
        if not self.dl > 0:
            raise ValueError("dl must be positive")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if not self.psi > 0:
            raise ValueError("psi must be positive")
        if not self.tolF > 0:
            raise ValueError("tolF must be positive")
        if self.predictor not in ("tangent", "secant"):
            raise ValueError("predictor must be 'tangent' or 'secant'")
        if not 0 < self.dl_min_factor < 1:
            raise ValueError("dl_min_factor must lie in (0, 1)")


@dataclass
class PathPoint:
    u: np.ndarray
    lam: float
    stability: int = 0
    step: int = 0
    dl: float = 0.0
    converged: bool = True
    level: int = 0
    interval_id: tuple = ()


@dataclass
class SingularPoint:
    u: np.ndarray
    lam: float
    phi: np.ndarray
    kind: str  # "Limit" or "Bifurcation"
    iterations: int = 0


@dataclass
class ContinuationState:
    """Current point, previous increment and arc length."""

    u: np.ndarray
    lam: float
    dl: float
    dl0: float
    psi: float = 1.0
    du_prev: np.ndarray | None = None
    dlam_prev: float = 0.0
    stability: int = 0
    step: int = 0

    def reset_length(self) -> None:
        self.dl = self.dl0

    def reduce_length(self, factor: float = 0.5) -> None:
        self.dl *= factor

    @property
    def has_previous(self) -> bool:
        return self.du_prev is not None and (np.any(self.du_prev) or self.dlam_prev != 0.0)


@dataclass
class StepOutcome:
    u: np.ndarray
    lam: float
    du: np.ndarray
    dlam: float
    iterations: int


@dataclass
class EquilibriumPath:
    points: list = field(default_factory=list)
    status: str = "Completed"
    reason: str = ""
    singular_points: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def aborted(self) -> bool:
        return self.status != "Completed"

    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    def displacements(self) -> np.ndarray:
        return np.array([p.u for p in self.points])

    def header(self, n_dof: int, extra: bool = False):
        h = ["step", "lambda"] + [f"u_{i}" for i in range(n_dof)] + ["stability", "dl"]
        return h + ["level", "interval_id"] if extra else h

    def rows(self, extra: bool = False):
        for p in self.points:
            row = [int(p.step), p.lam, *p.u.tolist(), int(p.stability), p.dl]
            if extra:
                row += [int(p.level), ":".join(str(i) for i in p.interval_id)]
            yield row

    def write_csv(self, path, n_dof: int, extra: bool = False) -> None:
        write_csv(path, self.header(n_dof, extra), self.rows(extra))

    def to_dict(self, extra: bool = False) -> dict:
        pts = []
        for p in self.points:
            d = {"step": int(p.step), "lambda": float(p.lam), "u": [float(x) for x in p.u],
                 "stability": int(p.stability), "dl": float(p.dl)}
            if extra:
                d["level"] = int(p.level)
                d["interval_id"] = list(p.interval_id)
            pts.append(d)
        return {"status": self.status, "reason": self.reason, "points": pts,
                "singular_points": [{"lambda": float(s.lam), "kind": s.kind,
                                     "u": [float(x) for x in s.u], "phi": [float(x) for x in s.phi]}
                                    for s in self.singular_points],
                "events": self.events}

    def write_json(self, path, extra: bool = False) -> None:
        write_json(path, self.to_dict(extra))

    @classmethod
    def read_csv(cls, path) -> "EquilibriumPath":
        header, rows = read_csv(path)
        n = sum(1 for h in header if h.startswith("u_"))
        pts = []
        for r in rows:
            p = PathPoint(u=np.array(r[2:2 + n], dtype=float), lam=float(r[1]),
                          stability=int(r[2 + n]), step=int(r[0]), dl=float(r[3 + n]))
            if "level" in header:
                p.level = int(r[4 + n])
                tag = r[5 + n]
                if isinstance(tag, float):  # a single index reads back as a number
                    p.interval_id = (int(tag),)
                else:
                    p.interval_id = tuple(int(x) for x in tag.split(":")) if tag else ()
            pts.append(p)
        return cls(points=pts)


def metric_norm(du, dlam, psi, P2) -> float:
    return math.sqrt(float(du @ du) + psi * psi * dlam * dlam * P2)


def _metric_dot(du1, dl1, du2, dl2, psi, P2) -> float:
    return float(du1 @ du2) + psi * psi * dl1 * dl2 * P2


def _call(fn, *args):
    try:
        out = fn(*args)
    except AssemblyError as exc:
        raise StepAssemblyError(str(exc)) from exc
    return out


def _factor(K):
    try:
        return nm.lu(K)
    except nm.SingularMatrix as exc:
        raise StepFailed(f"singular tangent: {exc}") from exc
    except nm.NonFiniteValue as exc:
        raise StepFailed(str(exc)) from exc


def _tol(ops, cfg):
    return cfg.tolF * max(float(np.linalg.norm(ops.force())), 1e-300)


def _check_finite(*arrs):
    for a in arrs:
        if not np.all(np.isfinite(a)):
            raise StepFailed("non-finite iterate")


def step_load_control(state: ContinuationState, ops: OperatorSet,
                      cfg: ContinuationConfig) -> StepOutcome:
    """Advance lam by dl (signed by ``forward``) and Newton-correct u at fixed lam."""
    P = ops.force()
    dlam = state.dl if cfg.forward else -state.dl
    lam = state.lam + dlam
    K = _call(ops.jacobian, state.u)
    du = dlam * _factor(K).solve(P)
    tol = _tol(ops, cfg)
    for it in range(cfg.max_iterations + 1):
        u = state.u + du
        _check_finite(u)
        R = _call(ops.al_residual, u, lam)
        if float(np.linalg.norm(R)) <= tol:
            return StepOutcome(u, lam, du, dlam, it)
        if it == cfg.max_iterations:
            break
        du = du - _factor(_call(ops.jacobian, u)).solve(R)
    raise StepFailed(f"load control did not converge at lambda={lam:.6g}")


def _predictor(state, ops, cfg, P, P2, direction):
    psi = state.psi
    dl = state.dl
    if direction is not None:
        d_u, d_l = direction
        nrm = metric_norm(d_u, d_l, psi, P2)
        if nrm == 0:
            raise StepFailed("zero predictor direction")
        return dl * d_u / nrm, dl * d_l / nrm
    if not state.has_previous:
        # pure load predictor: du = 0 and the constraint fixes dlam
        s = 1.0 if cfg.forward else -1.0
        return np.zeros_like(state.u), s * dl / (psi * math.sqrt(P2))
    if cfg.predictor == "tangent":
        try:
            dut = nm.lu(_call(ops.jacobian, state.u)).solve(P)
        except nm.SingularMatrix:
            dut = None
        if dut is not None:
            dlam = dl / metric_norm(dut, 1.0, psi, P2)
            sign = _metric_dot(state.du_prev, state.dlam_prev, dut, 1.0, psi, P2)
            dlam = dlam if sign >= 0 else -dlam
            return dlam * dut, dlam
    nrm = metric_norm(state.du_prev, state.dlam_prev, psi, P2)
    return dl * state.du_prev / nrm, dl * state.dlam_prev / nrm


def _arc_step(state, ops, cfg, spherical, direction=None) -> StepOutcome:
    P = ops.force()
    P2 = float(P @ P)
    if P2 == 0:
        raise ContinuationError("arc-length methods need a nonzero load vector")
    psi = state.psi
    psi2P2 = psi * psi * P2
    dl = state.dl
    du, dlam = _predictor(state, ops, cfg, P, P2, direction)
    du0, dlam0 = du.copy(), dlam
    tol = _tol(ops, cfg)
    for it in range(cfg.max_iterations + 1):
        u = state.u + du
        lam = state.lam + dlam
        _check_finite(u)
        R = _call(ops.al_residual, u, lam)
        if float(np.linalg.norm(R)) <= tol:
            return StepOutcome(u, lam, du, dlam, it)
        if it == cfg.max_iterations:
            break
        F = _factor(_call(ops.jacobian, u))
        du_R = -F.solve(R)
        du_P = F.solve(P)
        if spherical:
            base = du + du_R
            a = float(du_P @ du_P) + psi2P2
            b = 2.0 * (float(du_P @ base) + psi2P2 * dlam)
            c = float(base @ base) + psi2P2 * dlam * dlam - dl * dl
            disc = b * b - 4.0 * a * c
            if disc < 0:
                raise ComplexRoots(f"complex roots (discriminant {disc:.3g}) at lambda={lam:.6g}")
            sq = math.sqrt(disc)
            q = -0.5 * (b + math.copysign(sq, b))
            roots = (q / a, c / q) if q != 0 else (0.0, 0.0)
            best = None
            for r in roots:
                cand_u = base + r * du_P
                cand_l = dlam + r
                cos = _metric_dot(du, dlam, cand_u, cand_l, psi, P2)
                if best is None or cos > best[0]:
                    best = (cos, cand_u, cand_l)
            du, dlam = best[1], best[2]
        else:
            den = float(du0 @ du_P) + psi2P2 * dlam0
            if den == 0:
                raise StepFailed("Riks hyperplane is tangent to the load direction")
            dd = -float(du0 @ du_R) / den
            du = du + du_R + dd * du_P
            dlam = dlam + dd
    raise StepFailed(f"arc-length corrector did not converge near lambda={state.lam + dlam:.6g}")


def step_riks(state, ops, cfg, direction=None) -> StepOutcome:
    """Predictor of length dl, corrections on the hyperplane normal to it."""
    return _arc_step(state, ops, cfg, spherical=False, direction=direction)


def step_crisfield(state, ops, cfg, direction=None) -> StepOutcome:
    """Spherical constraint |du|^2 + psi^2 dlam^2 P.P = dl^2 at every iteration."""
    return _arc_step(state, ops, cfg, spherical=True, direction=direction)


_STEPPERS = {Stepper.LOAD: step_load_control, Stepper.RIKS: step_riks, Stepper.CRISFIELD: step_crisfield}


def stability_index(ops: OperatorSet, u) -> int:
    """Number of negative eigenvalues of K(u), from the LDL^T inertia."""
    K = _call(ops.jacobian, u)
    return nm.ldlt_inertia(0.5 * (K + K.T))[1]


# ------------------------------------------------------------ singular points

def _dKphi(ops, u, phi):
    """Columns d(K(u) phi)/du_j by two-sided differences along unit vectors."""
    n = u.size
    h = 1e-6 * (1.0 + float(np.linalg.norm(u)))
    D = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        D[:, j] = (_call(ops.jacobian, u + e) @ phi - _call(ops.jacobian, u - e) @ phi) / (2.0 * h)
    return D


def compute_singular_point(ops: OperatorSet, bracket, tol: float = 1e-8,
                           max_iterations: int = 50, limit_threshold: float = 0.1) -> SingularPoint:
    """Solve [R(u, lam); K(u) phi; |phi| - 1] = 0 between two path points.

    Starts from the bracket midpoint with phi the eigenvector of the
    smallest-magnitude eigenvalue of K there. The Newton matrix is singular
    at symmetric bifurcations, so each update is the minimum-norm
    least-squares step. Convergence needs all three blocks below ``tol``
    (scaled by |P|, max|K| and 1) and a relative update below ``tol``.
    """
    p1, p2 = bracket
    if p1.stability == p2.stability:
        raise BadBracket(f"stability indices agree ({p1.stability})")
    P = ops.force()
    Pn = float(np.linalg.norm(P))
    n = ops.n_dof
    u = 0.5 * (p1.u + p2.u)
    lam = 0.5 * (p1.lam + p2.lam)
    try:
        w, V = nm.sym_eig(_sym(ops.jacobian(u)))
        phi = V[:, int(np.argmin(np.abs(w)))].copy()
        step = math.inf
        for it in range(max_iterations + 1):
            K = ops.jacobian(u)
            R = ops.al_residual(u, lam)
            Kphi = K @ phi
            pn = float(np.linalg.norm(phi))
            Kscale = float(np.max(np.abs(K)))
            if (float(np.linalg.norm(R)) <= tol * Pn and float(np.linalg.norm(Kphi)) <= tol * Kscale * pn
                    and abs(pn - 1.0) <= tol and step <= tol):
                kind = "Limit" if abs(float(phi @ P)) > limit_threshold * pn * Pn else "Bifurcation"
                return SingularPoint(u, lam, phi / pn, kind, it)
            if it == max_iterations:
                break
            J = np.zeros((2 * n + 1, 2 * n + 1))
            J[:n, :n] = K
            J[:n, n] = -P
            J[n:2 * n, :n] = _dKphi(ops, u, phi)
            J[n:2 * n, n + 1:] = K
            J[2 * n, n + 1:] = phi / pn
            G = np.concatenate([R, Kphi, [pn - 1.0]])
            dx = np.linalg.lstsq(J, -G, rcond=None)[0]
            step = max(float(np.linalg.norm(dx[:n])) / (1.0 + float(np.linalg.norm(u))),
                       abs(float(dx[n])) / (1.0 + abs(lam)),
                       float(np.linalg.norm(dx[n + 1:])))
            u = u + dx[:n]
            lam = lam + dx[n]
            phi = phi + dx[n + 1:]
            if not (np.all(np.isfinite(u)) and np.all(np.isfinite(phi)) and math.isfinite(lam)):
                break
    except AssemblyError as exc:
        raise SingularPointNotConverged(f"assembly failed: {exc}") from exc
    raise SingularPointNotConverged("extended system did not converge")


def _sym(K):
    return 0.5 * (K + K.T)


def switch_branch(point: SingularPoint, ops: OperatorSet, tau_rel: float, dl0: float,
                  cfg: ContinuationConfig = ContinuationConfig()):
    """Leave a bifurcation along the critical mode.

    The perturbation tau * phi, tau = tau_rel * dl0 / |phi|, seeds the
    predictor direction; one step of length dl0 along it from the singular
    point is corrected on the hyperplane normal to phi, which holds the
    mode amplitude fixed while u and lam settle onto the secondary branch.
    Fails when the converged component along phi does not exceed 10 tau.

    Returns (PathPoint, ContinuationState) ready for further stepping.
    """
    if point.kind != "Bifurcation":
        raise BranchSwitchFailed(f"cannot switch branches at a {point.kind} point")
    pn = float(np.linalg.norm(point.phi))
    tau = tau_rel * dl0 / pn
    if not tau > 0:
        raise BranchSwitchFailed("zero perturbation leaves the solution on the primary branch")
    st = ContinuationState(u=point.u.copy(), lam=point.lam, dl=dl0, dl0=dl0, psi=cfg.psi)
    try:
        out = step_riks(st, ops, cfg, direction=(tau * point.phi, 0.0))
    except StepFailed as exc:
        raise BranchSwitchFailed(f"corrector failed: {exc}") from exc
    amp = abs(float((out.u - point.u) @ point.phi)) / pn
    if not amp > max(10.0 * tau, 1e-300):
        raise BranchSwitchFailed(f"returned to the primary branch (amplitude {amp:.3g} <= 10 tau)")
    st.u, st.lam = out.u, out.lam
    st.du_prev, st.dlam_prev = out.du, out.dlam
    st.stability = stability_index(ops, out.u)
    pp = PathPoint(out.u, out.lam, st.stability, dl=dl0)
    return pp, st


# ------------------------------------------------------------ driver

def run(cfg: ContinuationConfig, ops: OperatorSet, u0=None, lam0: float = 0.0,
        state: ContinuationState | None = None) -> EquilibriumPath:
    """Trace the equilibrium path for ``cfg.steps`` steps.

    Failed steps halve dl until it drops below dl_min_factor * dl0, which
    aborts the run; a success restores dl0. A change of the stability index
    optionally triggers the singular-point solve and, at a bifurcation, a
    single branch switch. The start point is not part of the output.
    """
    stepper = _STEPPERS[Stepper(cfg.stepper)]
    path = EquilibriumPath()
    if state is None:
        u = np.zeros(ops.n_dof) if u0 is None else nm.as_vec(u0, ops.n_dof)
        state = ContinuationState(u=u, lam=float(lam0), dl=cfg.dl, dl0=cfg.dl, psi=cfg.psi)
        try:
            state.stability = stability_index(ops, u)
        except StepFailed as exc:
            path.status, path.reason = "Aborted", f"{exc.status}: {exc}"
            return path
    dl_min = cfg.dl_min_factor * state.dl0
    switched = False
    prev_point = PathPoint(state.u.copy(), state.lam, state.stability, step=state.step)
    k = 0
    while k < cfg.steps:
        try:
            out = stepper(state, ops, cfg)
            stab = stability_index(ops, out.u)
        except StepFailed as exc:
            state.reduce_length(0.5)
            if state.dl < dl_min:
                path.status, path.reason = "Aborted", f"{exc.status}: {exc}"
                return path
            continue
        state.step += 1
        k += 1
        point = PathPoint(out.u, out.lam, stab, step=state.step, dl=state.dl)
        path.points.append(point)
        state.u, state.lam = out.u, out.lam
        state.du_prev, state.dlam_prev = out.du, out.dlam
        changed = stab != state.stability
        state.stability = stab
        state.reset_length()
        if changed:
            path.events.append({"step": state.step, "type": "stability_change",
                                "from": prev_point.stability, "to": stab})
            if cfg.singular:
                try:
                    sp = compute_singular_point(ops, (prev_point, point))
                    path.singular_points.append(sp)
                    if cfg.branch_switch and not switched and sp.kind == "Bifurcation":
                        bp, bstate = switch_branch(sp, ops, cfg.tau_rel, state.dl0, cfg)
                        switched = True
                        state.step += 1
                        bp.step = state.step
                        path.points.append(bp)
                        path.events.append({"step": state.step, "type": "branch_switch"})
                        state.u, state.lam = bstate.u, bstate.lam
                        state.du_prev, state.dlam_prev = bstate.du_prev, bstate.dlam_prev
                        state.stability = bstate.stability
                        point = bp
                except (SingularPointNotConverged, BranchSwitchFailed) as exc:
                    path.events.append({"step": state.step, "type": "singular_point_failed",
                                        "reason": str(exc)})
        prev_point = point
        if cfg.lam_max is not None and abs(state.lam) > cfg.lam_max:
            break
    return path
