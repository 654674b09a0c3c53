"""Hyperelastic material points in principal stretches.

Three families share a deviatoric/volumetric split,

    Psi = W(lam_bar) + K/2 (J - 1)^2,   lam_bar_i = J^(-1/3) lam_i,

with W the Neo-Hookean, Mooney-Rivlin or Ogden isochoric energy and K the
bulk modulus E / (3 (1 - 2 nu)). Incompressible materials (nu = 0.5) drop the
volumetric term and are evaluated at J = 1 with a Lagrange pressure.

All stress functions are written with array operations only, so they accept
complex stretches; :func:`uniaxial_solve` uses that for complex-step
derivatives of the lateral stress.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

# Ogden's rubber fit (alpha_p, mu_p in Pa), rescaled so sum(mu_p alpha_p)/2 = mu.
OGDEN_DEFAULT = ((1.3, 6.3e5), (5.0, 1.2e3), (-2.0, -1.0e4))


class MaterialError(ValueError):
    pass


class InvalidStretch(MaterialError):
    pass


class NoConvergence(MaterialError, ArithmeticError):
    pass


@dataclass(frozen=True)
class MaterialParams:
    """Material constants. ``nu == 0.5`` selects the incompressible law."""

    model: str = "NH"
    E: float = 1.5e6 * 2 * (1 + 0.45)
    nu: float = 0.45
    ratio: float = 7.0
    ogden: tuple[tuple[float, float], ...] | None = None
    rho: float = 1000.0
    thickness: float = 1e-3

    def __post_init__(self):
        model = self.model.upper()
        object.__setattr__(self, "model", model)
        if model not in ("NH", "MR", "OG"):
            raise MaterialError(f"model must be NH, MR or OG, got {self.model!r}")
        if not self.E > 0:
            raise MaterialError(f"E must be positive, got {self.E}")
        if not -1.0 < self.nu <= 0.5:
            raise MaterialError(f"nu must lie in (-1, 0.5], got {self.nu}")
        if model == "MR" and not self.ratio > 0:
            raise MaterialError(f"ratio must be positive, got {self.ratio}")
        if self.thickness <= 0:
            raise MaterialError(f"thickness must be positive, got {self.thickness}")
        if model == "OG":
            pairs = self.ogden if self.ogden is not None else tuple((m, a) for a, m in OGDEN_DEFAULT)
            s = sum(m * a for m, a in pairs) / 2.0
            if s <= 0:
                raise MaterialError("Ogden pairs must give sum(mu_p alpha_p) > 0")
            scaled = tuple((m * self.mu / s, a) for m, a in pairs)
            object.__setattr__(self, "ogden", scaled)

    @classmethod
    def from_mu(cls, model: str, mu: float, nu: float, **kw) -> "MaterialParams":
        return cls(model=model, E=2.0 * mu * (1.0 + nu), nu=nu, **kw)

    @classmethod
    def from_mapping(cls, data: dict) -> "MaterialParams":
        """Build from flat key/value text fields (see :func:`pathfinder.io.read_kv`)."""
        known = {"model", "E", "nu", "mu", "ratio", "rho", "thickness", "ogden"}
        unknown = set(data) - known
        if unknown:
            raise MaterialError(f"unknown material keys: {sorted(unknown)}")
        kw = {}
        model = str(data.get("model", "NH"))
        nu = float(data.get("nu", 0.45))
        for key in ("ratio", "rho", "thickness"):
            if key in data:
                kw[key] = float(data[key])
        if "ogden" in data:
            vals = [float(v) for v in str(data["ogden"]).replace(";", ",").split(",") if v.strip()]
            if len(vals) % 2:
                raise MaterialError("ogden expects mu_1,alpha_1,mu_2,alpha_2,...")
            kw["ogden"] = tuple(zip(vals[::2], vals[1::2]))
        if "mu" in data:
            return cls.from_mu(model, float(data["mu"]), nu, **kw)
        return cls(model=model, E=float(data.get("E", 1.5e6 * 2 * 1.45)), nu=nu, **kw)

    @property
    def incompressible(self) -> bool:
        return self.nu == 0.5

    @property
    def mu(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def bulk(self) -> float:
        if self.incompressible:
            return math.inf
        return self.E / (3.0 * (1.0 - 2.0 * self.nu))

    @property
    def mu1(self) -> float:
        return self.mu * self.ratio / (1.0 + self.ratio) if self.model == "MR" else self.mu

    @property
    def mu2(self) -> float:
        return self.mu / (1.0 + self.ratio) if self.model == "MR" else 0.0


@dataclass(frozen=True)
class StretchState:
    """Principal stretches, volume ratio and principal Cauchy stresses."""

    lambda1: float
    lambda2: float
    lambda3: float
    J: float
    stress: tuple[float, float, float]

    @property
    def sigma(self) -> float:
        """Axial Cauchy stress."""
        return self.stress[0]


def _check(stretches):
    if any(not (np.real(s) > 0) for s in stretches):
        raise InvalidStretch(f"principal stretches must be positive, got {stretches}")


def _iso_energy(p: MaterialParams, lb):
    if p.model == "NH":
        return 0.5 * p.mu * (sum(x ** 2 for x in lb) - 3.0)
    if p.model == "MR":
        i1 = sum(x ** 2 for x in lb)
        i2 = lb[0] ** 2 * lb[1] ** 2 + lb[1] ** 2 * lb[2] ** 2 + lb[0] ** 2 * lb[2] ** 2
        return 0.5 * p.mu1 * (i1 - 3.0) + 0.5 * p.mu2 * (i2 - 3.0)
    return sum(m / a * (sum(x ** a for x in lb) - 3.0) for m, a in p.ogden)


def _iso_grad(p: MaterialParams, lb):
    """dW/dlam_bar_i for each principal direction."""
    if p.model == "NH":
        return [p.mu * x for x in lb]
    if p.model == "MR":
        i1 = sum(x ** 2 for x in lb)
        return [p.mu1 * x + p.mu2 * x * (i1 - x ** 2) for x in lb]
    return [sum(m * x ** (a - 1.0) for m, a in p.ogden) for x in lb]


def strain_energy(p: MaterialParams, l1, l2, l3):
    """Strain energy per unit reference volume.

    For incompressible materials the caller must supply l1 * l2 * l3 = 1.
    """
    _check((l1, l2, l3))
    lam = (l1, l2, l3)
    if p.incompressible:
        return _iso_energy(p, lam)
    J = l1 * l2 * l3
    lb = [J ** (-1.0 / 3.0) * x for x in lam]
    return _iso_energy(p, lb) + 0.5 * p.bulk * (J - 1.0) ** 2


def kirchhoff_stress(p: MaterialParams, l1, l2, l3):
    """Principal Kirchhoff stresses tau_i = lam_i dPsi/dlam_i.

    For incompressible materials this is the constitutive part only; the
    physical stress is tau_i - p_hydro.
    """
    _check((l1, l2, l3))
    lam = (l1, l2, l3)
    if p.incompressible:
        g = _iso_grad(p, lam)
        return [x * gi for x, gi in zip(lam, g)]
    J = l1 * l2 * l3
    lb = [J ** (-1.0 / 3.0) * x for x in lam]
    g = _iso_grad(p, lb)
    t = [x * gi for x, gi in zip(lb, g)]
    mean = sum(t) / 3.0
    vol = p.bulk * (J - 1.0) * J
    return [ti - mean + vol for ti in t]


def cauchy_stress(p: MaterialParams, l1, l2, l3):
    """Principal Cauchy stresses of a compressible material (tau / J)."""
    if p.incompressible:
        raise MaterialError("incompressible Cauchy stress needs a pressure; use uniaxial_solve")
    J = l1 * l2 * l3
    return [t / J for t in kirchhoff_stress(p, l1, l2, l3)]


def _lateral_stress(p, lam, s):
    # sigma_3 of the state (lam, s, s); J > 0 so the sign equals that of tau_3
    return kirchhoff_stress(p, lam, s, s)[2] / (lam * s * s)


def _dlateral(p, lam, s):
    h = 1e-20 * s
    return float(np.imag(_lateral_stress(p, lam, complex(s, h)))) / h


def uniaxial_solve(p: MaterialParams, lam: float, tol: float = 1e-10,
                   max_iter: int = 100) -> StretchState:
    """Plane-stress uniaxial tension state at axial stretch ``lam``.

    Incompressible: lateral stretches are lam^-1/2 and the pressure cancels
    the through-thickness stress. Compressible: the lateral stretch solves
    sigma_2 = sigma_3 = 0 by bracketed Newton (complex-step slope) from the
    linear-elastic guess lam^-nu, to |sigma_lateral| <= tol * mu.
    """
    if not lam > 0:
        raise InvalidStretch(f"stretch must be positive, got {lam}")
    if p.incompressible:
        s = lam ** -0.5
        tau = kirchhoff_stress(p, lam, s, s)
        return StretchState(lam, s, s, 1.0, (float(tau[0] - tau[2]), 0.0, 0.0))

    target = tol * p.mu
    s = lam ** (-p.nu)
    lo, hi = 0.0, math.inf
    for _ in range(max_iter):
        g = _lateral_stress(p, lam, s)
        if abs(g) <= target:
            sig = cauchy_stress(p, lam, s, s)
            return StretchState(lam, s, s, lam * s * s, (float(sig[0]), float(sig[1]), float(sig[2])))
        # g increases with s: shrink the bracket around the root
        if g > 0:
            hi = min(hi, s)
        else:
            lo = max(lo, s)
        dg = _dlateral(p, lam, s)
        s_new = s - g / dg if dg > 0 else math.nan
        if not (lo < s_new < hi):
            s_new = 0.5 * (lo + hi) if math.isfinite(hi) else 2.0 * s
        s = s_new
    raise NoConvergence(f"lateral stretch did not converge at lam={lam}")


class TensionState(enum.Enum):
    TAUT = "Taut"
    WRINKLED = "Wrinkled"
    SLACK = "Slack"


def classify_tension(principal_stress, principal_strain) -> TensionState:
    """Tension-field state from sorted in-plane principal values (s1 >= s2, e1 >= e2)."""
    _, s2 = principal_stress
    e1, _ = principal_strain
    if s2 > 0:
        return TensionState.TAUT
    if e1 <= 0:
        return TensionState.SLACK
    return TensionState.WRINKLED


def tension_field_stress(principal_stress, principal_strain, slack_value: float = 0.0):
    """Principal stresses with the slack state set to ``slack_value``.

    Taut and wrinkled states are returned unchanged; no wrinkled-state
    modification is applied.
    """
    state = classify_tension(principal_stress, principal_strain)
    if state is TensionState.SLACK:
        return state, (slack_value, slack_value)
    return state, tuple(principal_stress)
