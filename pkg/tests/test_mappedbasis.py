import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pathfinder.io import read_csv
from pathfinder.mappedbasis import (BSplineBasis, IncompatibleBases, OutOfDomain, eval_bspline,
                                    eval_mapped, example_instance, identity_map, sample,
                                    smooth_1d_interface, write_samples_csv)

H = 1e-6


def one_sided_jump(mb, x=1.0):
    """|phi'(x-) - phi'(x+)| from second-order one-sided differences."""
    f = lambda t: eval_mapped(mb, t)
    left = (3 * f(x) - 4 * f(x - H) + f(x - 2 * H)) / (2 * H)
    right = (-3 * f(x) + 4 * f(x + H) - f(x + 2 * H)) / (2 * H)
    return np.abs(left - right)


def test_bernstein_values(backend):
    b = BSplineBasis(2, (0, 0, 0, 1, 1, 1))
    assert np.array_equal(eval_bspline(b, 0.0), [1.0, 0.0, 0.0])
    assert np.allclose(eval_bspline(b, 0.5), [0.25, 0.5, 0.25], atol=1e-15)
    assert np.array_equal(eval_bspline(b, 1.0), [0.0, 0.0, 1.0])


def test_derivatives_against_closed_form(backend):
    b = BSplineBasis(2, (0, 0, 0, 1, 1, 1))
    x = 0.3
    assert np.allclose(eval_bspline(b, x, 1), [-2 * (1 - x), 2 - 4 * x, 2 * x])
    assert np.allclose(eval_bspline(b, x, 2), [2, -4, 2])
    assert not np.any(eval_bspline(BSplineBasis(1, (0, 0, 1, 1)), x, 2))


def test_basis_validation():
    with pytest.raises(ValueError):
        BSplineBasis(2, (0, 0, 1, 1))
    with pytest.raises(ValueError):
        BSplineBasis(1, (0, 0, 1, 0.5, 1, 1))
    with pytest.raises(OutOfDomain):
        eval_bspline(BSplineBasis(1, (0, 0, 1, 1)), 1.5)
    with pytest.raises(ValueError):
        eval_bspline(BSplineBasis(1, (0, 0, 1, 1)), 0.5, 3)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.lists(st.floats(0.01, 0.99), min_size=0, max_size=6), st.floats(0, 1))
def test_partition_of_unity_property(p, inner, x):
    b = BSplineBasis(p, tuple([0.0] * (p + 1) + sorted(inner) + [1.0] * (p + 1)))
    v = eval_bspline(b, x)
    assert abs(v.sum() - 1.0) <= 1e-12 and np.all(v >= -1e-15)
    assert abs(eval_bspline(b, x, 1).sum()) <= 1e-8 * (1 + np.abs(eval_bspline(b, x, 1)).max())


def test_local_support():
    b = BSplineBasis.uniform(2, 0.0, 1.0, 8)
    v = eval_bspline(b, 0.3)
    assert np.count_nonzero(v) == 3


def test_identity_map():
    b = BSplineBasis.uniform(3, 0.0, 2.0, 5)
    mb = identity_map(b)
    for x in np.linspace(0, 2, 13):
        assert np.array_equal(eval_mapped(mb, x), eval_bspline(b, x))


def test_example_dimensions_and_coefficients():
    mb = example_instance()
    A = mb.matrix()
    assert A.shape == (18, 20) and mb.n_local == 20
    # zero-based indices of the coefficients phi_9 and phi_10
    assert A[8, 8] == 1.0 and A[8, 9] == 0.5 and A[8, 10] == 0.5
    assert A[9, 11] == 1.0 and A[9, 9] == 0.5 and A[9, 10] == 0.5
    assert np.count_nonzero(A[8]) == 3 and np.count_nonzero(A[9]) == 3
    assert all(np.count_nonzero(A[k]) == 1 for k in range(18) if k not in (8, 9))


def test_example_interior_preserved():
    mb = example_instance()
    left, right = mb.bases
    for x in (0.1, 0.4, 0.7):
        assert np.array_equal(eval_mapped(mb, x)[:8], eval_bspline(left, x)[:8])
    for x in (1.3, 1.6, 1.9):
        assert np.array_equal(eval_mapped(mb, x)[10:], eval_bspline(right, x)[2:])


def test_example_joint_values_and_unity():
    mb = example_instance()
    v = eval_mapped(mb, 1.0)
    assert np.count_nonzero(v) == 2 and v[8] == 0.5 and v[9] == 0.5
    _, vals = sample(mb, 200)
    assert np.abs(vals.sum(axis=1) - 1.0).max() <= 1e-12


def test_example_c1():
    assert one_sided_jump(example_instance()).max() <= 1e-8


def test_c1_is_not_automatic():
    # the unmapped end functions have a slope jump at the joint
    left, right = example_instance().bases
    dl = eval_bspline(left, 1.0, 1)[-1]
    dr = eval_bspline(right, 1.0, 1)[0]
    assert abs(dl - dr) > 1.0


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_bernstein_patches(p):
    mb = smooth_1d_interface(BSplineBasis(p, (0.0,) * (p + 1) + (1.0,) * (p + 1)),
                             BSplineBasis(p, (1.0,) * (p + 1) + (2.5,) * (p + 1)))
    assert mb.n_global == 2 * p
    assert one_sided_jump(mb).max() <= 1e-8
    _, vals = sample(mb, 101)
    assert np.abs(vals.sum(axis=1) - 1.0).max() <= 1e-12


def test_unequal_spans():
    mb = smooth_1d_interface(BSplineBasis(2, (0, 0, 0, 0.3, 1, 1, 1)),
                             BSplineBasis(2, (1, 1, 1, 1.1, 1.7, 2, 2, 2)))
    assert one_sided_jump(mb).max() <= 1e-8
    assert np.abs(sample(mb, 150)[1].sum(axis=1) - 1.0).max() <= 1e-12


def test_incompatible():
    with pytest.raises(IncompatibleBases):
        smooth_1d_interface(BSplineBasis(2, (0, 0, 0, 1, 1, 1)), BSplineBasis(3, (1, 1, 1, 1, 2, 2, 2, 2)))
    with pytest.raises(IncompatibleBases):
        smooth_1d_interface(BSplineBasis(2, (0, 0, 0, 1, 1, 1)), BSplineBasis(2, (1.5, 1.5, 1.5, 2, 2, 2)))
    with pytest.raises(OutOfDomain):
        eval_mapped(example_instance(), 2.5)


def test_csv_exports(tmp_path):
    mb = example_instance()
    mb.write_csv(tmp_path / "A.csv")
    header, rows = read_csv(tmp_path / "A.csv")
    assert header == ["row", "col", "value"] and len(rows) == 22
    write_samples_csv(tmp_path / "s.csv", mb, 50)
    header, rows = read_csv(tmp_path / "s.csv")
    assert len(header) == 19 and len(rows) == 50
