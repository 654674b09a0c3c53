import math

import numpy as np
import pytest

from pathfinder import eigen
from pathfinder.io import read_csv
from pathfinder.models import (LinearSpring, SpringMassChain, column_critical_load, two_bar_column)
from pathfinder.operators import FunctionOperatorSet


@pytest.mark.parametrize("N", [1, 2, 5, 9])
def test_chain_frequencies(backend, N):
    ch = SpringMassChain(N=N, k=3.0, m=2.0)
    pairs = eigen.modal(ch)
    got = np.array([p.frequency for p in pairs])
    assert np.allclose(got, ch.frequencies_exact(), rtol=1e-10)
    V = np.column_stack([p.vector for p in pairs])
    assert np.abs(V.T @ ch.mass() @ V - np.eye(N)).max() <= 1e-9


def test_modal_count():
    assert len(eigen.modal(SpringMassChain(N=5), 3)) == 3


def test_spring_frequency():
    assert math.isclose(eigen.modal(LinearSpring(k=4.0, m=1.0))[0].frequency, 2.0)


def test_column_buckling_matches_formula(backend):
    col = two_bar_column()
    pairs = eigen.buckling(col)
    first = pairs[0]
    assert first.value < 0 < first.load_factor
    assert math.isclose(first.load_factor, column_critical_load(1.0, 1.0, 0.5, 1e7), rel_tol=1e-9)
    # the mode is lateral: joint x dominates
    assert abs(first.vector[0]) > 1e3 * abs(first.vector[1])


def test_buckling_degenerate_on_linear_model():
    with pytest.raises(eigen.DegenerateGeometricStiffness):
        eigen.buckling(SpringMassChain())


def test_buckling_of_a_designed_pencil():
    # K(u) = K_L + u_0 G with u_L = (1, 0): the pencil K_L phi = lam G phi
    KL = np.diag([2.0, 5.0])
    G = np.diag([-1.0, -1.0])

    def R(u):
        return KL @ u + 0.5 * u[0] * (G @ u) - np.array([2.0, 0.0])

    def K(u):
        return KL + u[0] * G + 0.5 * np.outer(G @ u, [1.0, 0.0])

    ops = FunctionOperatorSet(2, R, K, force=np.array([2.0, 0.0]))
    uL = np.linalg.solve(KL, ops.force())
    dK = 0.5 * (ops.jacobian(uL) - KL + (ops.jacobian(uL) - KL).T)
    ref = sorted(np.linalg.eigvals(np.linalg.solve(dK, KL)).real, key=lambda v: (-v <= 0, abs(v)))
    got = [p.value for p in eigen.buckling(ops)]
    assert np.allclose(got, ref, rtol=1e-12)


def test_write_modes_csv(tmp_path):
    pairs = eigen.modal(SpringMassChain(N=3))
    eigen.write_modes_csv(tmp_path / "m.csv", pairs)
    header, rows = read_csv(tmp_path / "m.csv")
    assert [float(h) for h in header] == [p.value for p in pairs]
    assert len(rows) == 3
