import math

import numpy as np
import pytest

from pathfinder.models import LinearSpring, UniaxialMembraneElement, VonMisesTruss
from pathfinder.operators import FunctionOperatorSet, PoisonedOperatorSet
from pathfinder.statics import (DR_DEFAULTS, SolverStatus, StaticConfig, auto_mass_scaling,
                                composite_solve, displacement_control, dr_solve, dr_stage,
                                lumped_diagonal, newton_solve, newton_stage)


def cubic():
    return FunctionOperatorSet(1, lambda u: u + u ** 3 - 2.0,
                               lambda u: np.array([[1.0 + 3.0 * u[0] ** 2]]), mass=[[1.0]])


def test_linear_spring_one_iteration():
    res = newton_solve(LinearSpring(k=4.0, F=2.0), u0=np.zeros(1))
    assert res.converged and res.iterations == 1
    assert res.u[0] == 0.5


def test_newton_quadratic_convergence():
    res = newton_solve(cubic(), StaticConfig(tolF=1e-14), u0=np.array([3.0]))
    assert res.converged and math.isclose(res.u[0], 1.0, rel_tol=1e-14)
    rel = [h[1] for h in res.history if h[1] > 0]
    # the error ratio e_{k+1} / e_k^2 stays bounded in the asymptotic regime
    ratios = [rel[i + 1] / rel[i] ** 2 for i in range(len(rel) - 1) if rel[i] < 1e-2]
    assert ratios and max(ratios) < 10


def test_max_iterations_zero():
    res = newton_solve(cubic(), StaticConfig(max_iterations=0), u0=np.array([3.0]))
    assert res.status is SolverStatus.NOT_CONVERGED and res.iterations == 0


def test_already_converged_takes_no_iterations():
    res = newton_solve(cubic(), u0=np.array([1.0]))
    assert res.converged and res.iterations == 0


def test_singular_jacobian_reported():
    ops = FunctionOperatorSet(1, lambda u: u ** 2 - 1.0, lambda u: np.array([[2.0 * u[0]]]))
    res = newton_solve(ops, u0=np.zeros(1))
    assert res.status is SolverStatus.NOT_CONVERGED and "singular" in res.message


def test_newton_on_truss_matches_closed_form():
    vm = VonMisesTruss()
    lam = 0.5 * vm.limit_points()[0][1]
    res = newton_solve(vm, StaticConfig(tolF=1e-12), u0=np.zeros(2), lam=lam)
    assert res.converged
    assert abs(vm.analytic_lambda(res.u[1]) - lam) < 1e-12


def test_assembly_error_status():
    res = newton_solve(PoisonedOperatorSet(cubic(), 0.5), u0=np.zeros(1))
    assert res.status is SolverStatus.ASSEMBLY_ERROR
    assert np.all(np.isfinite(res.u))


def test_mass_helpers():
    assert np.array_equal(lumped_diagonal(np.diag([1.0, 2.0])), [1.0, 2.0])
    assert np.array_equal(lumped_diagonal(np.array([[2.0, 1.0], [1.0, 2.0]])), [3.0, 3.0])
    alpha = auto_mass_scaling(np.array([[4.0]]), np.array([1.0]), 1.0)
    # dt * sqrt(k / (alpha m)) = 1/2
    assert math.isclose(math.sqrt(4.0 / alpha), 0.5)


@pytest.mark.parametrize("damping", [0.0, 0.5])
def test_dr_converges_on_cubic(damping):
    res = dr_solve(cubic(), StaticConfig(tolF=1e-8, max_iterations=100000, damping=damping))
    assert res.converged and abs(res.u[0] - 1.0) < 1e-7


def test_dr_kinetic_damping_detects_peaks():
    res = dr_solve(cubic(), StaticConfig(tolF=1e-8, max_iterations=100000))
    assert any(h[3] for h in res.history)


def test_dr_step_budget():
    res = dr_solve(cubic(), StaticConfig(tolF=1e-12, max_iterations=3))
    assert res.status is SolverStatus.NOT_CONVERGED


def test_dr_and_newton_agree_on_membrane():
    el = UniaxialMembraneElement()
    nr = newton_solve(el, StaticConfig(tolF=1e-6))
    dr = dr_solve(el, DR_DEFAULTS)
    assert nr.converged and dr.converged
    assert np.linalg.norm(dr.u - nr.u) <= 1e-3 * np.linalg.norm(nr.u)


def test_composite():
    el = UniaxialMembraneElement()
    res = composite_solve([dr_stage(), newton_stage(StaticConfig(tolF=1e-6))], el)
    assert res.converged
    assert np.linalg.norm(el.residual(res.u)) <= 1e-6 * np.linalg.norm(el.force())
    assert len(res.history) == 2
    single = composite_solve([newton_stage()], el)
    assert single.history == newton_solve(el).history
    with pytest.raises(ValueError):
        composite_solve([], el)


def test_composite_aborts_on_assembly_error():
    res = composite_solve([dr_stage(), newton_stage()], PoisonedOperatorSet(UniaxialMembraneElement(), 0.01))
    assert res.status is SolverStatus.ASSEMBLY_ERROR and len(res.history) == 1


def test_displacement_control_vmtruss_reaction():
    vm = VonMisesTruss(driven=True)
    path = displacement_control(vm, np.linspace(0.05, 1.0, 20))
    assert path.completed and len(path.points) == 20
    for p in path.points:
        assert abs(p.reaction - vm.analytic_lambda(p.gamma)) < 1e-10


def test_displacement_control_spring_reference_fallback():
    s = LinearSpring(driven=True)
    path = displacement_control(s, [0.5, 1.0])
    assert path.completed and [p.reaction for p in path.points] == [0.5, 1.0]


def test_displacement_control_rejects_non_monotone():
    with pytest.raises(ValueError):
        displacement_control(VonMisesTruss(driven=True), [0.1, 0.3, 0.2])
    with pytest.raises(ValueError):
        displacement_control(VonMisesTruss(), [0.1])


def test_displacement_control_partial_on_poison():
    vm = PoisonedOperatorSet(VonMisesTruss(driven=True), 0.5)
    path = displacement_control(vm, np.linspace(0.1, 1.0, 10))
    assert not path.completed and 0 < len(path.points) < 10
