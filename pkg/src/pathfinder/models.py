"""Benchmark models with exact residuals and analytic tangents.

Every class here is an :class:`~pathfinder.operators.OperatorSet`. Trusses use
Green strain, so residuals are polynomial in the displacements and the
tangents are exact.
"""
from __future__ import annotations

import math

import numpy as np

from .materials import MaterialParams
from .operators import AssemblyError, OperatorSet


class InvalidConfig(ValueError):
    """A model parameter is out of range; ``field`` names it."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _positive(field, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise InvalidConfig(field, f"must be positive and finite, got {value}")
    return value


# ---------------------------------------------------------------- springs

class LinearSpring(OperatorSet):
    """R(u) = k u - F for one DoF.

    With ``driven=True`` the spring end is prescribed through
    :meth:`control`, no DoF remains and :meth:`reaction` returns k * gamma.
    """

    def __init__(self, k: float = 1.0, F: float = 1.0, m: float = 1.0, driven: bool = False):
        self.k = _positive("k", k)
        self.F = float(F)
        self.m = _positive("m", m)
        self.driven = bool(driven)
        self.gamma = 0.0
        self.n_dof = 0 if driven else 1

    def external_force(self):
        return np.zeros(0) if self.driven else np.array([self.F])

    def internal_force(self, u):
        return np.zeros(0) if self.driven else self.k * np.asarray(u, dtype=float)

    def jacobian(self, u):
        return np.zeros((0, 0)) if self.driven else np.array([[self.k]])

    def mass(self):
        return np.zeros((0, 0)) if self.driven else np.array([[self.m]])

    @property
    def has_control(self) -> bool:
        return self.driven

    def control(self, gamma: float) -> None:
        if not self.driven:
            raise AttributeError("spring is not displacement driven")
        self.gamma = float(gamma)

    def reaction(self, u) -> float:
        return self.k * self.gamma


class SpringMassChain(OperatorSet):
    """N equal masses joined by N + 1 equal springs between fixed walls.

    The load is ``load`` on every mass; the model is linear.
    """

    def __init__(self, N: int = 5, k: float = 1.0, m: float = 1.0, load: float = 1.0,
                 lumped: bool = True):
        if int(N) != N or N < 1:
            raise InvalidConfig("N", f"must be a positive integer, got {N}")
        self.n_dof = int(N)
        self.k = _positive("k", k)
        self.m = _positive("m", m)
        self.load = float(load)
        n = self.n_dof
        self._K = (np.diag(np.full(n, 2.0 * self.k)) - np.diag(np.full(n - 1, self.k), 1)
                   - np.diag(np.full(n - 1, self.k), -1))

    def external_force(self):
        return np.full(self.n_dof, self.load)

    def internal_force(self, u):
        return self._K @ np.asarray(u, dtype=float)

    def jacobian(self, u):
        return self._K.copy()

    def mass(self):
        return self.m * np.eye(self.n_dof)

    def frequencies_exact(self) -> np.ndarray:
        j = np.arange(1, self.n_dof + 1)
        return 2.0 * math.sqrt(self.k / self.m) * np.sin(j * math.pi / (2.0 * (self.n_dof + 1)))


# ---------------------------------------------------------------- trusses

def _bar(X, d, EA, L0):
    """Green-strain bar: strain, end force on node j, and its 2x2 (dim x dim) tangent."""
    x = X + d
    eps = (X @ d + 0.5 * d @ d) / (L0 * L0)
    f = EA * eps * x / L0
    k = EA / L0 * (np.outer(x, x) / (L0 * L0) + eps * np.eye(X.shape[0]))
    return eps, f, k


def vmtruss_analytic_path(a: float, h: float, EA: float, P_ref: float, u_y):
    """Load factor on the symmetric von Mises truss at apex drop ``u_y``.

    Green-strain closed form, lambda = EA/(P_ref L0^3) (h - u) u (2h - u),
    zero at u = 0, h and 2h. Accepts scalars or arrays.
    """
    L0 = math.hypot(a, h)
    u = np.asarray(u_y, dtype=float)
    lam = EA / (P_ref * L0 ** 3) * (h - u) * u * (2.0 * h - u)
    return float(lam) if lam.ndim == 0 else lam


def vmtruss_limit_points(a: float, h: float, EA: float, P_ref: float):
    """Apex drops and load factors of the two limit points, in closed form."""
    drops = (h * (1.0 - 1.0 / math.sqrt(3.0)), h * (1.0 + 1.0 / math.sqrt(3.0)))
    return [(w, vmtruss_analytic_path(a, h, EA, P_ref, w)) for w in drops]


class VonMisesTruss(OperatorSet):
    """Two-bar shallow arch with supports at (-a, 0), (a, 0) and apex at (0, h).

    DoFs are the apex displacements (u_x, w) with w the downward drop; the
    load P_ref acts downward, so P = (0, P_ref). ``symmetric=True`` keeps w
    only. ``driven=True`` prescribes w through :meth:`control`, leaves u_x
    free and reports the conjugate vertical reaction.
    """

    def __init__(self, a: float = 1.0, h: float = 0.5, EA: float = 30.0, P_ref: float = 1.0,
                 symmetric: bool = False, driven: bool = False, node_mass: float = 1.0):
        self.a = _positive("a", a)
        self.h = _positive("h", h)
        self.EA = _positive("EA", EA)
        self.P_ref = _positive("P_ref", P_ref)
        self.node_mass = _positive("node_mass", node_mass)
        if symmetric and driven:
            raise InvalidConfig("driven", "the driven truss needs the lateral DoF")
        self.symmetric = bool(symmetric)
        self.driven = bool(driven)
        self.gamma = 0.0
        self.L0 = math.hypot(self.a, self.h)
        self.n_dof = 1 if (symmetric or driven) else 2

    def _full(self, u):
        u = np.asarray(u, dtype=float)
        if self.symmetric:
            return np.array([0.0, u[0]])
        if self.driven:
            return np.array([u[0], self.gamma])
        return u

    def _assemble(self, q):
        T = np.array([1.0, -1.0])  # drop coordinate -> y-up coordinate
        d = T * q
        f = np.zeros(2)
        K = np.zeros((2, 2))
        for sx in (1.0, -1.0):
            _, fb, kb = _bar(np.array([sx * self.a, self.h]), d, self.EA, self.L0)
            f += fb
            K += kb
        return T * f, K * np.outer(T, T)

    def _select(self):
        if self.symmetric:
            return [1]
        if self.driven:
            return [0]
        return [0, 1]

    def external_force(self):
        if self.driven:
            return np.zeros(1)
        return np.array([self.P_ref]) if self.symmetric else np.array([0.0, self.P_ref])

    def internal_force(self, u):
        f, _ = self._assemble(self._full(u))
        return f[self._select()]

    def jacobian(self, u):
        _, K = self._assemble(self._full(u))
        idx = self._select()
        return K[np.ix_(idx, idx)]

    def mass(self):
        return self.node_mass * np.eye(self.n_dof)

    @property
    def has_control(self) -> bool:
        return self.driven

    def control(self, gamma: float) -> None:
        if not self.driven:
            raise AttributeError("truss is not displacement driven")
        self.gamma = float(gamma)

    def reaction(self, u) -> float:
        f, _ = self._assemble(self._full(u))
        return float(f[1])

    def analytic_lambda(self, w):
        return vmtruss_analytic_path(self.a, self.h, self.EA, self.P_ref, w)

    def limit_points(self):
        return vmtruss_limit_points(self.a, self.h, self.EA, self.P_ref)


class TrussLattice(OperatorSet):
    """Pin-jointed Green-strain truss in 2-D or 3-D.

    ``fixed`` lists (node, direction) pairs held at zero, ``loads`` maps node
    to load vector, ``springs`` lists grounded (node, direction, k) springs
    and ``driver`` is an optional (node, direction) pair prescribed through
    :meth:`control`. Free DoFs are ordered node by node.
    """

    def __init__(self, nodes, members, EA, fixed=(), loads=None, springs=(), driver=None,
                 node_mass: float = 1.0):
        self.nodes = np.array(nodes, dtype=float)
        if self.nodes.ndim != 2 or self.nodes.shape[1] not in (2, 3):
            raise InvalidConfig("nodes", "expected an (n, 2) or (n, 3) coordinate array")
        n_nodes, self.dim = self.nodes.shape
        self.members = [(int(i), int(j)) for i, j in members]
        EA = np.broadcast_to(np.asarray(EA, dtype=float), (len(self.members),))
        self.EA = EA.copy()
        self.L0 = []
        for m, (i, j) in enumerate(self.members):
            if not (0 <= i < n_nodes and 0 <= j < n_nodes) or i == j:
                raise InvalidConfig("members", f"member {m} has bad connectivity ({i}, {j})")
            _positive(f"EA[{m}]", self.EA[m])
            L = float(np.linalg.norm(self.nodes[j] - self.nodes[i]))
            if L <= 0:
                raise InvalidConfig("members", f"member {m} has zero length")
            self.L0.append(L)
        n_total = n_nodes * self.dim
        fixed_dofs = {self._dof(n, c) for n, c in fixed}
        self.springs = [(self._dof(n, c), _positive("spring k", k)) for n, c, k in springs]
        self.driver = None if driver is None else self._dof(*driver)
        if self.driver is not None:
            fixed_dofs.add(self.driver)
        self.free = np.array([g for g in range(n_total) if g not in fixed_dofs], dtype=np.intp)
        self.n_dof = int(self.free.size)
        self.n_total = n_total
        P = np.zeros(n_total)
        for node, vec in (loads or {}).items():
            P[node * self.dim:(node + 1) * self.dim] += np.asarray(vec, dtype=float)
        self._P_full = P
        self.node_mass = _positive("node_mass", node_mass)
        self.gamma = 0.0

    def _dof(self, node, comp):
        if not (0 <= comp < self.dim) or not (0 <= node < self.nodes.shape[0]):
            raise InvalidConfig("dof", f"bad (node, direction) = ({node}, {comp})")
        return int(node) * self.dim + int(comp)

    def _expand(self, u):
        U = np.zeros(self.n_total)
        U[self.free] = u
        if self.driver is not None:
            U[self.driver] = self.gamma
        return U

    def _assemble(self, U, want_k=True):
        dim = self.dim
        f = np.zeros(self.n_total)
        K = np.zeros((self.n_total, self.n_total)) if want_k else None
        for m, (i, j) in enumerate(self.members):
            si = slice(i * dim, (i + 1) * dim)
            sj = slice(j * dim, (j + 1) * dim)
            X = self.nodes[j] - self.nodes[i]
            d = U[sj] - U[si]
            _, fb, kb = _bar(X, d, self.EA[m], self.L0[m])
            f[sj] += fb
            f[si] -= fb
            if want_k:
                K[sj, sj] += kb
                K[si, si] += kb
                K[si, sj] -= kb
                K[sj, si] -= kb
        for g, k in self.springs:
            f[g] += k * U[g]
            if want_k:
                K[g, g] += k
        return f, K

    def external_force(self):
        return self._P_full[self.free].copy()

    def internal_force(self, u):
        f, _ = self._assemble(self._expand(u), want_k=False)
        return f[self.free]

    def jacobian(self, u):
        _, K = self._assemble(self._expand(u))
        return K[np.ix_(self.free, self.free)]

    def mass(self):
        return self.node_mass * np.eye(self.n_dof)

    def member_forces(self, u_full) -> np.ndarray:
        """Second Piola-Kirchhoff member forces EA * eps for a full-length displacement."""
        U = np.asarray(u_full, dtype=float)
        dim = self.dim
        out = np.empty(len(self.members))
        for m, (i, j) in enumerate(self.members):
            X = self.nodes[j] - self.nodes[i]
            d = U[j * dim:(j + 1) * dim] - U[i * dim:(i + 1) * dim]
            out[m] = self.EA[m] * (X @ d + 0.5 * d @ d) / self.L0[m] ** 2
        return out

    @property
    def has_control(self) -> bool:
        return self.driver is not None

    def control(self, gamma: float) -> None:
        if self.driver is None:
            raise AttributeError("lattice has no driver DoF")
        self.gamma = float(gamma)

    def reaction(self, u) -> float:
        f, _ = self._assemble(self._expand(u), want_k=False)
        return float(f[self.driver])


def two_bar_column(L: float = 1.0, k_s: float = 1.0, P_ref: float = 0.5,
                   EA: float = 1e7) -> TrussLattice:
    """Vertical 2-bar column, pinned base, top on a vertical roller.

    A lateral spring k_s holds the middle joint; P_ref pushes the top down.
    Free DoFs: (joint x, joint y, top y). See :func:`column_critical_load`.
    """
    L = _positive("L", L)
    return TrussLattice(
        nodes=[(0.0, 0.0), (0.0, L), (0.0, 2.0 * L)],
        members=[(0, 1), (1, 2)],
        EA=_positive("EA", EA),
        fixed=[(0, 0), (0, 1), (2, 0)],
        loads={2: (0.0, -_positive("P_ref", P_ref))},
        springs=[(1, 0, _positive("k_s", k_s))],
    )


def column_critical_load(L: float, k_s: float, P_ref: float, EA: float, linearized: bool = True):
    """Critical load factor of :func:`two_bar_column`.

    ``linearized=True`` gives the eigenvalue of the buckling pencil built
    from the linear prebuckling state; ``False`` gives the exact
    bifurcation on the nonlinear trivial branch.
    """
    if linearized:
        return k_s * L / (2.0 * P_ref - P_ref * P_ref / EA)
    return k_s * L / (2.0 * P_ref) * math.sqrt(1.0 - k_s * L / EA)


def column_postbuckling_lambda(L: float, lam_cr: float, w):
    """Inextensible post-buckling branch lambda = lam_cr * cos(theta), sin(theta) = w / L."""
    return lam_cr * np.sqrt(1.0 - (np.asarray(w, dtype=float) / L) ** 2)


# ---------------------------------------------------------------- membrane

_GAUSS = (-1.0 / math.sqrt(3.0), 1.0 / math.sqrt(3.0))
_LEVI = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _energy_terms(mat: MaterialParams):
    """Energy density as monomials c * a^i * d^j * s^k in a = tr C, d = det C, s = lam3^2."""
    if mat.model not in ("NH", "MR"):
        raise InvalidConfig("model", "the membrane element supports NH and MR only")
    mu1, mu2 = mat.mu1, mat.mu2
    third = 1.0 / 3.0
    if mat.incompressible:
        # s = 1/d substituted
        terms = [(0.5 * mu1, 1, 0.0), (0.5 * mu1, 0, -1.0)]
        if mu2:
            terms += [(0.5 * mu2, 0, 1.0), (0.5 * mu2, 1, -1.0)]
        return [(c, i, j, 0.0) for c, i, j in terms]
    terms = [(0.5 * mu1, 1, -third, -third), (0.5 * mu1, 0, -third, 2 * third)]
    if mu2:
        terms += [(0.5 * mu2, 0, third, -2 * third), (0.5 * mu2, 1, -2 * third, third)]
    K = mat.bulk
    terms += [(0.5 * K, 0, 1.0, 1.0), (-K, 0, 0.5, 0.5)]
    return terms


def _mono(terms, a, d, s, da, dd, ds):
    """Sum of the monomials differentiated da, dd, ds times (da <= 1)."""
    total = 0.0
    for c, i, j, k in terms:
        if da > i:
            continue
        coef = c
        for r in range(dd):
            coef *= j - r
        for r in range(ds):
            coef *= k - r
        if coef == 0.0:
            continue
        total += coef * a ** (i - da) * d ** (j - dd) * s ** (k - ds)
    return total


class MembraneState:
    """Condensed energy derivatives at one Gauss point."""

    __slots__ = ("s", "Fa", "Fd", "Faa", "Fad", "Fdd")


def _condense(terms, incompressible, nu, a, d):
    st = MembraneState()
    if incompressible:
        st.s = 1.0 / d
        st.Fa = _mono(terms, a, d, 1.0, 1, 0, 0)
        st.Fd = _mono(terms, a, d, 1.0, 0, 1, 0)
        st.Faa = 0.0
        st.Fad = _mono(terms, a, d, 1.0, 1, 1, 0)
        st.Fdd = _mono(terms, a, d, 1.0, 0, 2, 0)
        return st
    # plane stress: solve df/ds = 0 for s from the linear-elastic estimate
    s = d ** (-nu / (1.0 - nu))
    for _ in range(100):
        g = _mono(terms, a, d, s, 0, 0, 1)
        gs = _mono(terms, a, d, s, 0, 0, 2)
        step = g / gs
        s_new = s - step
        if s_new <= 0:
            s_new = 0.5 * s
        if abs(s_new - s) <= 1e-15 * s:
            s = s_new
            break
        s = s_new
    fs_s = _mono(terms, a, d, s, 0, 0, 2)
    fa_s = _mono(terms, a, d, s, 1, 0, 1)
    fd_s = _mono(terms, a, d, s, 0, 1, 1)
    st.s = s
    st.Fa = _mono(terms, a, d, s, 1, 0, 0)
    st.Fd = _mono(terms, a, d, s, 0, 1, 0)
    st.Faa = -fa_s * fa_s / fs_s
    st.Fad = _mono(terms, a, d, s, 1, 1, 0) - fa_s * fd_s / fs_s
    st.Fdd = _mono(terms, a, d, s, 0, 2, 0) - fd_s * fd_s / fs_s
    return st


class UniaxialMembraneElement(OperatorSet):
    """One bilinear plane-stress membrane element L x W x t under edge tension.

    Nodes (0,0), (L,0), (L,W), (0,W). The left edge is held in x and the
    bottom edge in y; the right edge carries a dead load ``sigma * t * W``
    split between its two nodes. Free DoFs: node 1 x, node 2 x, node 2 y,
    node 3 y. ``driven=True`` prescribes the right-edge x displacement
    instead, leaving node 2 y and node 3 y free.

    The through-thickness stretch follows from the plane-stress condition
    (compressible) or from J = 1 (incompressible), condensed at each Gauss
    point. NH and MR materials are supported.
    """

    def __init__(self, material: MaterialParams | None = None, L: float = 1.0, W: float = 1.0,
                 sigma: float = 1.0e6, driven: bool = False, lumped: bool = False):
        self.material = material if material is not None else MaterialParams.from_mu("NH", 1.5e6, 0.45)
        self.terms = _energy_terms(self.material)
        self.L = _positive("L", L)
        self.W = _positive("W", W)
        self.t = self.material.thickness
        self.sigma = float(sigma)
        self.driven = bool(driven)
        self.lumped = bool(lumped)
        self.gamma = 0.0
        self.X = np.array([[0.0, 0.0], [self.L, 0.0], [self.L, self.W], [0.0, self.W]])
        # full DoF order: node-major (x, y)
        self.free = np.array([5, 7] if driven else [2, 4, 5, 7], dtype=np.intp)
        self.n_dof = self.free.size
        self._gp = []
        for xi in _GAUSS:
            for eta in _GAUSS:
                N = 0.25 * np.array([(1 - xi) * (1 - eta), (1 + xi) * (1 - eta),
                                     (1 + xi) * (1 + eta), (1 - xi) * (1 + eta)])
                dN = 0.25 * np.array([[-(1 - eta), -(1 - xi)], [(1 - eta), -(1 + xi)],
                                      [(1 + eta), (1 + xi)], [-(1 + eta), (1 - xi)]])
                Jm = self.X.T @ dN
                B = dN @ np.linalg.inv(Jm)  # (4 nodes, 2) dN/dX
                self._gp.append((N, B, float(np.linalg.det(Jm))))

    def _expand(self, u):
        U = np.zeros(8)
        U[self.free] = u
        if self.driven:
            U[2] = U[4] = self.gamma
        return U

    def _gp_kinematics(self, U, B):
        Un = U.reshape(4, 2)
        F = np.eye(2) + Un.T @ B
        a = float(np.sum(F * F))
        D = float(np.linalg.det(F))
        # gradients wrt the 8 full DoFs (node-major)
        ga = 2.0 * (B @ F.T).reshape(-1)             # d a / d u_{n,k} = 2 sum_j F_kj B_nj
        cof = np.array([[F[1, 1], -F[1, 0]], [-F[0, 1], F[0, 0]]])
        gD = (B @ cof.T).reshape(-1)
        Ha = np.kron(2.0 * (B @ B.T), np.eye(2))
        cross = np.outer(B[:, 0], B[:, 1]) - np.outer(B[:, 1], B[:, 0])
        HD = np.kron(cross, _LEVI)
        return a, D, ga, gD, Ha, HD

    def _assemble(self, U, want_k=True):
        f = np.zeros(8)
        K = np.zeros((8, 8)) if want_k else None
        for _, B, detJ in self._gp:
            a, D, ga, gD, Ha, HD = self._gp_kinematics(U, B)
            if not D > 0:
                raise AssemblyError("element inverted (det F <= 0)")
            d = D * D
            st = _condense(self.terms, self.material.incompressible, self.material.nu, a, d)
            gd = 2.0 * D * gD
            w = self.t * detJ
            f += w * (st.Fa * ga + st.Fd * gd)
            if want_k:
                Hd = 2.0 * np.outer(gD, gD) + 2.0 * D * HD
                K += w * (st.Faa * np.outer(ga, ga) + st.Fad * (np.outer(ga, gd) + np.outer(gd, ga))
                          + st.Fdd * np.outer(gd, gd) + st.Fa * Ha + st.Fd * Hd)
        return f, K

    def _load_full(self):
        P = np.zeros(8)
        if not self.driven:
            P[2] = P[4] = 0.5 * self.sigma * self.t * self.W
        return P

    def external_force(self):
        return self._load_full()[self.free]

    def internal_force(self, u):
        f, _ = self._assemble(self._expand(u), want_k=False)
        return f[self.free]

    def jacobian(self, u):
        _, K = self._assemble(self._expand(u))
        return K[np.ix_(self.free, self.free)]

    def mass(self):
        rho_t = self.material.rho * self.t
        Mn = np.zeros((4, 4))
        for N, _, detJ in self._gp:
            Mn += rho_t * detJ * np.outer(N, N)
        if self.lumped:
            Mn = np.diag(Mn.sum(axis=1))
        M = np.kron(Mn, np.eye(2))
        return M[np.ix_(self.free, self.free)]

    @property
    def has_control(self) -> bool:
        return self.driven

    def control(self, gamma: float) -> None:
        if not self.driven:
            raise AttributeError("element is not displacement driven")
        self.gamma = float(gamma)

    def reaction(self, u) -> float:
        f, _ = self._assemble(self._expand(u), want_k=False)
        return float(f[2] + f[4])

    def stretch_state(self, u):
        """(lambda1, lambda2, lambda3, J) averaged over the Gauss points."""
        U = self._expand(u)
        out = []
        for _, B, _ in self._gp:
            F = np.eye(2) + U.reshape(4, 2).T @ B
            C = F.T @ F
            D = float(np.linalg.det(F))
            st = _condense(self.terms, self.material.incompressible, self.material.nu,
                           float(np.trace(C)), D * D)
            l3 = math.sqrt(st.s)
            out.append((math.sqrt(C[0, 0]), math.sqrt(C[1, 1]), l3, D * l3))
        return tuple(float(v) for v in np.mean(out, axis=0))


# ---------------------------------------------------------------- factory

def _bool(v):
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes", "on")
    return bool(v)


MODEL_NAMES = ("spring", "chain", "vmtruss", "column", "membrane")


def make_operator_set(config) -> OperatorSet:
    """Build a model from a flat mapping with a ``model`` key.

    Keys besides ``model`` are the constructor arguments of the chosen
    model; values may be strings (as read from a key-value file).
    """
    cfg = dict(config)
    name = str(cfg.pop("model", "")).lower()
    if name not in MODEL_NAMES:
        raise InvalidConfig("model", f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    try:
        ops = _build(name, cfg)
    except InvalidConfig:
        raise
    except (TypeError, ValueError) as exc:
        raise InvalidConfig(name, str(exc)) from exc
    if cfg:
        raise InvalidConfig(sorted(cfg)[0], f"unknown key for model {name!r}")
    return ops


def _build(name, cfg):
    def num(key, default):
        return float(cfg.pop(key, default))

    def opt(keys):
        return {k: float(cfg.pop(k)) for k in keys if k in cfg}

    if name == "spring":
        return LinearSpring(k=num("k", 1.0), F=num("F", 1.0), m=num("m", 1.0),
                            driven=_bool(cfg.pop("driven", False)))
    if name == "chain":
        N = num("N", 5)
        if N != int(N):
            raise InvalidConfig("N", f"must be an integer, got {N}")
        return SpringMassChain(N=int(N), k=num("k", 1.0), m=num("m", 1.0), load=num("load", 1.0))
    if name == "vmtruss":
        return VonMisesTruss(symmetric=_bool(cfg.pop("symmetric", False)),
                             driven=_bool(cfg.pop("driven", False)),
                             **opt(("a", "h", "EA", "P_ref", "node_mass")))
    if name == "column":
        return two_bar_column(**opt(("L", "k_s", "P_ref", "EA")))
    mat = cfg.pop("material", None)
    if mat is not None and not isinstance(mat, MaterialParams):
        mat = MaterialParams.from_mapping(mat)
    return UniaxialMembraneElement(mat, driven=_bool(cfg.pop("driven", False)),
                                   lumped=_bool(cfg.pop("lumped", False)), **opt(("L", "W", "sigma")))
