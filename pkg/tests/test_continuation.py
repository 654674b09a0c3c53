import math

import numpy as np
import pytest

from pathfinder.continuation import (BadBracket, BranchSwitchFailed, ComplexRoots, ContinuationConfig,
                                     ContinuationError, ContinuationState, EquilibriumPath, PathPoint,
                                     compute_singular_point, run, stability_index, step_crisfield,
                                     switch_branch)
from pathfinder.models import (LinearSpring, VonMisesTruss, column_critical_load,
                               column_postbuckling_lambda, two_bar_column)
from pathfinder.operators import FunctionOperatorSet, PoisonedOperatorSet


def vm_distance(vm, p):
    # upper bound on the distance to the analytic curve (0, w, lam(w))
    return math.hypot(p.u[0], p.lam - vm.analytic_lambda(p.u[1]))


def test_config_validation():
    with pytest.raises(ValueError):
        ContinuationConfig(stepper="arc")
    with pytest.raises(ValueError):
        ContinuationConfig(dl=0.0)
    with pytest.raises(ValueError):
        ContinuationConfig(predictor="cubic")


@pytest.mark.parametrize("stepper", ["load", "riks", "crisfield"])
def test_linear_spring_is_a_straight_line(stepper):
    s = LinearSpring(k=2.0, F=1.0)
    path = run(ContinuationConfig(stepper=stepper, dl=0.1, steps=5), s)
    assert not path.aborted and len(path.points) == 5
    for p in path.points:
        assert abs(p.u[0] - p.lam * 0.5) < 1e-12


def test_first_step_is_pure_load_predictor():
    s = LinearSpring(k=2.0, F=4.0)
    st = ContinuationState(u=np.zeros(1), lam=0.0, dl=0.1, dl0=0.1)
    out = step_crisfield(st, s, ContinuationConfig())
    # linear problem: constraint |du|^2 + dlam^2 |P|^2 = dl^2 with du = 2 dlam
    assert math.isclose(out.dlam, 0.1 / math.sqrt(4.0 + 16.0), rel_tol=1e-12)
    assert math.isclose(math.hypot(out.du[0], 4.0 * out.dlam), 0.1, rel_tol=1e-12)


@pytest.mark.parametrize("stepper", ["riks", "crisfield"])
def test_vmtruss_snap_through(stepper):
    vm = VonMisesTruss()
    path = run(ContinuationConfig(stepper=stepper, dl=0.05, steps=140, singular=True), vm)
    assert not path.aborted
    assert max(vm_distance(vm, p) for p in path.points) < 1e-6
    flips = [e for e in path.events if e["type"] == "stability_change"]
    assert [(e["from"], e["to"]) for e in flips] == [(0, 1), (1, 0)]
    lims = sorted(sp.lam for sp in path.singular_points)
    assert all(sp.kind == "Limit" for sp in path.singular_points)
    (_, l1), (_, l2) = vm.limit_points()
    assert np.allclose(lims, sorted([l1, l2]), atol=1e-9)
    # the path passes the snap: lambda goes negative and the apex drops past 2h
    assert min(path.lambdas()) < 0 and max(p.u[1] for p in path.points) > 1.0


def test_load_control_snaps_past_limit_point():
    vm = VonMisesTruss()
    path = run(ContinuationConfig(stepper="load", dl=0.1, steps=15), vm)
    assert not path.aborted
    w = [p.u[1] for p in path.points]
    # lambda is monotone, so the apex has to jump to the far stable branch
    assert max(np.diff(w)) > 0.5
    assert max(vm_distance(vm, p) for p in path.points) < 1e-9
    assert all(p.stability == 0 for p in path.points)


def test_arc_length_needs_load():
    ops = FunctionOperatorSet(1, lambda u: u, lambda u: np.eye(1), force=np.zeros(1))
    st = ContinuationState(u=np.zeros(1), lam=0.0, dl=0.1, dl0=0.1)
    with pytest.raises(ContinuationError):
        step_crisfield(st, ops, ContinuationConfig())


def test_lam_max_stops_run():
    path = run(ContinuationConfig(stepper="load", dl=0.1, steps=100, lam_max=0.45), LinearSpring())
    assert len(path.points) == 5 and not path.aborted


def test_stability_index():
    vm = VonMisesTruss()
    assert stability_index(vm, np.zeros(2)) == 0
    assert stability_index(vm, np.array([0.0, 0.5])) == 1


def test_bad_bracket():
    vm = VonMisesTruss()
    p = PathPoint(np.zeros(2), 0.0, 0)
    with pytest.raises(BadBracket):
        compute_singular_point(vm, (p, p))


def column_bifurcation():
    col = two_bar_column()
    lam_nl = column_critical_load(1.0, 1.0, 0.5, 1e7, linearized=False)
    path = run(ContinuationConfig(dl=0.005, steps=120), col)
    i = next(k for k, p in enumerate(path.points) if p.stability)
    sp = compute_singular_point(col, (path.points[i - 1], path.points[i]))
    return col, lam_nl, sp


def test_column_bifurcation_point():
    col, lam_nl, sp = column_bifurcation()
    assert sp.kind == "Bifurcation"
    assert abs(sp.lam - lam_nl) < 1e-9
    assert abs(sp.phi[0]) > 0.999


def test_branch_switch_and_postbuckling():
    col, lam_nl, sp = column_bifurcation()
    tau_rel = 1e-3
    bp, st = switch_branch(sp, col, tau_rel, 0.005)
    assert abs(bp.u[0]) > 10 * tau_rel * 0.005
    lam_ref = column_postbuckling_lambda(1.0, lam_nl, bp.u[0])
    assert abs(bp.lam - lam_ref) < 1e-3
    with pytest.raises(BranchSwitchFailed):
        switch_branch(sp, col, 0.0, 0.005)


def test_branch_switch_refuses_limit_point():
    vm = VonMisesTruss()
    path = run(ContinuationConfig(dl=0.05, steps=40, singular=True), vm)
    with pytest.raises(BranchSwitchFailed):
        switch_branch(path.singular_points[0], vm, 1e-3, 0.05)


def test_near_tangent_complex_roots():
    # on the post-buckled column a full-length corrector misses the sphere
    col, lam_nl, sp = column_bifurcation()
    bp, st = switch_branch(sp, col, 1e-3, 0.005)
    with pytest.raises(ComplexRoots):
        step_crisfield(st, col, ContinuationConfig(dl=0.005))


def test_run_with_branch_switch():
    col = two_bar_column()
    lam_cr = column_critical_load(1.0, 1.0, 0.5, 1e7, linearized=False)
    path = run(ContinuationConfig(dl=0.005, steps=160, singular=True, branch_switch=True,
                                  lam_max=1.5), col)
    assert any(e["type"] == "branch_switch" for e in path.events)
    k = next(i for i, e in enumerate(path.events) if e["type"] == "branch_switch")
    post = [p for p in path.points if p.step >= path.events[k]["step"]]
    assert len(post) > 5
    for p in post:
        w = p.u[0]
        ref_drop = lam_cr * w * w / 2.0
        assert abs((lam_cr - p.lam) - ref_drop) <= 0.05 * ref_drop


def test_poisoned_run_aborts_with_partial_path():
    vm = PoisonedOperatorSet(VonMisesTruss(), 0.3)
    path = run(ContinuationConfig(dl=0.05, steps=100), vm)
    assert path.aborted and "AssemblyError" in path.reason
    assert 0 < len(path.points) < 100
    assert all(np.all(np.isfinite(p.u)) for p in path.points)


def test_csv_round_trip_bit_identical(tmp_path):
    vm = VonMisesTruss()
    path = run(ContinuationConfig(dl=0.05, steps=30), vm)
    path.points[3].level, path.points[3].interval_id = 2, (3, 0, 1)
    path.points[4].interval_id = (7,)
    path.points[5].interval_id = (3, 5)
    for extra in (False, True):
        f = tmp_path / f"p{extra}.csv"
        path.write_csv(f, 2, extra)
        back = EquilibriumPath.read_csv(f)
        for a, b in zip(path.points, back.points):
            assert np.array_equal(a.u, b.u) and a.lam == b.lam and a.step == b.step
            assert a.stability == b.stability and a.dl == b.dl
            if extra:
                assert a.level == b.level and a.interval_id == b.interval_id


def test_json_output(tmp_path):
    import json
    path = run(ContinuationConfig(dl=0.05, steps=40, singular=True), VonMisesTruss())
    path.write_json(tmp_path / "p.json")
    data = json.loads((tmp_path / "p.json").read_text())
    assert data["status"] == "Completed" and len(data["points"]) == 40
    assert data["singular_points"][0]["kind"] == "Limit"
