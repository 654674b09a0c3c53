"""B-spline bases and mapped (globally smooth) bases phi = A psi in 1-D.

``smooth_1d_interface`` joins two clamped patches that meet at a point.
The value-carrying end functions of both patches and their slope-carrying
neighbours are fused into two global functions

    phi_a = psi_L[-2] + a psi_L[-1] + a psi_R[0]
    phi_b = psi_R[1] + (1-a) psi_L[-1] + (1-a) psi_R[0]

with a = s_L / (s_L + s_R), where s_L and s_R are the end slopes of the
value functions. This is C1 across the joint and keeps the partition of
unity; for equal spans a = 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nm
from .io import write_csv


class OutOfDomain(ValueError):
    pass


class IncompatibleBases(ValueError):
    pass


@dataclass(frozen=True)
class BSplineBasis:
    degree: int
    knots: tuple

    def __post_init__(self):
        p = self.degree
        k = np.asarray(self.knots, dtype=float)
        if p < 0:
            raise ValueError("degree must be non-negative")
        if k.ndim != 1 or k.size < 2 * (p + 1) or not np.all(np.isfinite(k)):
            raise ValueError("knot vector too short or not finite")
        if np.any(np.diff(k) < 0):
            raise ValueError("knot vector must be nondecreasing")
        if np.any(k[: p + 1] != k[0]) or np.any(k[-(p + 1):] != k[-1]):
            raise ValueError("end knots must have multiplicity p+1")
        if k[0] == k[-1]:
            raise ValueError("empty domain")
        object.__setattr__(self, "knots", tuple(float(x) for x in k))

    @classmethod
    def uniform(cls, degree: int, a: float, b: float, spans: int) -> "BSplineBasis":
        inner = np.linspace(a, b, spans + 1)
        return cls(degree, tuple([a] * degree + list(inner) + [b] * degree))

    @property
    def size(self) -> int:
        return len(self.knots) - self.degree - 1

    @property
    def domain(self) -> tuple:
        return self.knots[0], self.knots[-1]


def eval_bspline(basis: BSplineBasis, xi: float, derivative_order: int = 0) -> np.ndarray:
    """All ``basis.size`` function values (or derivatives) at ``xi``."""
    if derivative_order not in (0, 1, 2):
        raise ValueError("derivative_order must be 0, 1 or 2")
    a, b = basis.domain
    xi = float(xi)
    if not a <= xi <= b:
        raise OutOfDomain(f"xi={xi!r} outside [{a}, {b}]")
    p, n = basis.degree, basis.size
    out = np.zeros(n)
    if derivative_order > p:
        return out
    k = nm.kernels()
    knots = np.asarray(basis.knots)
    span = k.find_span(knots, p, n, xi)
    ders = np.asarray(k.basis_ders(knots, p, span, xi, derivative_order))
    out[span - p: span + 1] = ders[derivative_order]
    return out


@dataclass(frozen=True)
class MappedBasis:
    """phi(xi) = A psi(xi); ``offsets[i]`` is the first local index of patch i."""

    bases: tuple
    rows: tuple
    cols: tuple
    vals: tuple
    n_global: int
    offsets: tuple = field(default=())

    def __post_init__(self):
        if not self.offsets:
            off, acc = [], 0
            for b in self.bases:
                off.append(acc)
                acc += b.size
            object.__setattr__(self, "offsets", tuple(off))
        hit = np.zeros(self.n_global, dtype=bool)
        hit[list(self.rows)] = True
        if not hit.all():
            raise ValueError("every row of A needs a nonzero entry")

    @property
    def n_local(self) -> int:
        return sum(b.size for b in self.bases)

    def matrix(self) -> np.ndarray:
        A = np.zeros((self.n_global, self.n_local))
        np.add.at(A, (np.array(self.rows, dtype=int), np.array(self.cols, dtype=int)), self.vals)
        return A

    def triplets(self):
        return list(zip(self.rows, self.cols, self.vals))

    def write_csv(self, path) -> None:
        write_csv(path, ["row", "col", "value"], self.triplets())


def identity_map(basis: BSplineBasis) -> MappedBasis:
    n = basis.size
    return MappedBasis((basis,), tuple(range(n)), tuple(range(n)), (1.0,) * n, n)


def eval_mapped(mb: MappedBasis, xi: float, derivative_order: int = 0) -> np.ndarray:
    """Global values A psi(xi).

    Local functions outside the patch containing ``xi`` are zero; a point
    shared by two patches is evaluated on the left one.
    """
    if derivative_order not in (0, 1, 2):
        raise ValueError("derivative_order must be 0, 1 or 2")
    xi = float(xi)
    inside = [i for i, b in enumerate(mb.bases) if b.domain[0] <= xi <= b.domain[1]]
    if not inside:
        raise OutOfDomain(f"xi={xi!r} outside every patch")
    psi = np.zeros(mb.n_local)
    b, off = mb.bases[inside[0]], mb.offsets[inside[0]]
    psi[off: off + b.size] = eval_bspline(b, xi, derivative_order)
    out = np.zeros(mb.n_global)
    np.add.at(out, np.array(mb.rows, dtype=int), np.array(mb.vals) * psi[np.array(mb.cols, dtype=int)])
    return out


def smooth_1d_interface(left: BSplineBasis, right: BSplineBasis) -> MappedBasis:
    """C1 mapped basis over two clamped patches joined at left's end = right's start."""
    p = left.degree
    if right.degree != p:
        raise IncompatibleBases(f"degrees differ: {p} vs {right.degree}")
    if p < 1:
        raise IncompatibleBases("degree 0 bases cannot be made C1")
    if left.knots[-1] != right.knots[0]:
        raise IncompatibleBases("patches do not meet: left end != right start")
    # clamped ends are checked by BSplineBasis; the joint needs p+1 on both sides
    joint = left.knots[-1]
    if sum(k == joint for k in left.knots) != p + 1 or sum(k == joint for k in right.knots) != p + 1:
        raise IncompatibleBases("joint knot multiplicity must be exactly p+1 on each side")
    nL, nR = left.size, right.size
    if nL < 2 or nR < 2:
        raise IncompatibleBases("each patch needs at least two functions")
    sL = eval_bspline(left, joint, 1)[nL - 1]
    sR = -eval_bspline(right, joint, 1)[0]
    a = sL / (sL + sR)

    rows, cols, vals = [], [], []

    def put(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(float(v))

    for i in range(nL - 2):
        put(i, i, 1.0)
    ga, gb = nL - 2, nL - 1
    put(ga, nL - 2, 1.0)
    put(ga, nL - 1, a)
    put(ga, nL, a)
    put(gb, nL - 1, 1.0 - a)
    put(gb, nL, 1.0 - a)
    put(gb, nL + 1, 1.0)
    for j in range(2, nR):
        put(nL + j - 2, nL + j, 1.0)
    return MappedBasis((left, right), tuple(rows), tuple(cols), tuple(vals), nL + nR - 2)


def example_instance() -> MappedBasis:
    """Two quadratic patches on [0, 1] and [1, 2] with 8 uniform spans each."""
    return smooth_1d_interface(BSplineBasis.uniform(2, 0.0, 1.0, 8), BSplineBasis.uniform(2, 1.0, 2.0, 8))


def sample(mb: MappedBasis, n: int = 200, derivative_order: int = 0):
    """(xs, values) on n points spanning all patches; values has shape (n, n_global)."""
    lo = min(b.domain[0] for b in mb.bases)
    hi = max(b.domain[1] for b in mb.bases)
    xs = np.linspace(lo, hi, n)
    return xs, np.array([eval_mapped(mb, x, derivative_order) for x in xs])


def write_samples_csv(path, mb: MappedBasis, n: int = 200) -> None:
    xs, vals = sample(mb, n)
    header = ["xi"] + [f"phi_{k}" for k in range(mb.n_global)]
    write_csv(path, header, [[x, *row] for x, row in zip(xs, vals)])
