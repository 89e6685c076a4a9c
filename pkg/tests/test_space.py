import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fplab.errors import InvalidParameterError, InvalidPlanError, MapFormatError
from fplab.space import (
    SamplePlan,
    box,
    finite,
    interval,
    load_distance_matrix,
    load_finite_space,
    sample_points,
    verify_metric_axioms,
    write_distance_matrix,
)


def test_grid_interval_three_points():
    assert sample_points(interval(0, 1), SamplePlan("grid", 3)) == [0.0, 0.5, 1.0]


def test_grid_interval_endpoints_only():
    assert sample_points(interval(0, 1), SamplePlan("grid", 2)) == [0.0, 1.0]


def test_grid_finite_full_enumeration():
    space = finite(np.ones((4, 4)) - np.eye(4))
    assert sample_points(space, SamplePlan("grid", 4)) == [0, 1, 2, 3]


def test_grid_finite_too_many_points():
    space = finite([[0, 1], [1, 0]])
    with pytest.raises(InvalidPlanError, match="count"):
        sample_points(space, SamplePlan("grid", 3))


def test_grid_box_count_and_membership():
    space = box([(0, 1), (-2, 2), (5, 6)])
    pts = sample_points(space, SamplePlan("grid", 50))
    assert len(pts) == 50
    assert len(set(pts)) == 50
    assert all(space.contains(x) for x in pts)


@pytest.mark.parametrize("space", [interval(-3, 2), box([(0, 1), (0, 1)]), finite(np.zeros((7, 7)))])
def test_random_plan_is_deterministic_and_in_space(space):
    plan = SamplePlan("random", 40, seed=2024)
    a, b = sample_points(space, plan), sample_points(space, plan)
    assert a == b
    assert all(space.contains(x) for x in a)
    assert sample_points(space, SamplePlan("random", 40, seed=2025)) != a


@pytest.mark.parametrize("kwargs", [dict(count=0), dict(mode="sobol"), dict(seed=-1), dict(seed=2**64)])
def test_bad_plans(kwargs):
    with pytest.raises(InvalidPlanError):
        SamplePlan(**kwargs)


def test_membership():
    I = interval(0, 1)
    assert I.contains(0.0) and I.contains(1.0) and not I.contains(1.0000001)
    B = box([(0, 1), (0, 1)])
    assert B.contains((0.5, 1.0)) and not B.contains((0.5,)) and not B.contains((2.0, 0.0))
    F = finite(np.zeros((3, 3)))
    assert F.contains(2) and not F.contains(3) and not F.contains(0.5)


def test_bad_spaces():
    with pytest.raises(InvalidParameterError):
        interval(1, 0)
    with pytest.raises(InvalidParameterError):
        finite([[0, 1, 2], [1, 0, 2]])


def test_standard_metric_axioms_pass_with_zero_violation():
    report = verify_metric_axioms(interval(0, 1), SamplePlan("grid", 10))
    assert report.passed
    assert all(r.max_violation == 0.0 for r in report.results)


def test_two_point_metric_passes():
    assert verify_metric_axioms(finite([[0, 1], [1, 0]]), SamplePlan("grid", 2)).passed


def test_corrupted_matrix_fails_symmetry_with_witness():
    report = verify_metric_axioms(finite([[0, 5], [4, 0]]), SamplePlan("grid", 2))
    sym = report["symmetry"]
    assert not sym.passed
    assert sym.witness == (0, 1)
    assert sym.max_violation == 1.0
    assert report["identity"].passed


def test_triangle_violation_detected():
    # d(0,2) = 5 > d(0,1) + d(1,2) = 2
    m = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    tri = verify_metric_axioms(finite(m), SamplePlan("grid", 3))["triangle"]
    assert not tri.passed
    assert tri.max_violation == 3.0
    assert tri.witness == (0, 1, 2)


def test_positivity_and_identity_violations():
    m = [[0.5, 0, 1], [0, 0, 1], [1, 1, 0]]
    report = verify_metric_axioms(finite(m), SamplePlan("grid", 3))
    assert not report["identity"].passed and report["identity"].witness == (0,)
    assert not report["positivity"].passed and report["positivity"].witness == (0, 1)


def test_triangle_subsampling_is_reproducible():
    plan = SamplePlan("grid", 120)
    a = verify_metric_axioms(interval(0, 1), plan)
    b = verify_metric_axioms(interval(0, 1), plan)
    assert a.triples_subsampled
    assert a.to_dict() == b.to_dict()


def test_custom_metric_is_used():
    space = interval(0, 1)
    from fplab.space import MetricSpace

    discrete = MetricSpace("interval", (0.0,), (1.0,), metric=lambda x, y: float(x != y))
    assert discrete.distance(0.1, 0.2) == 1.0
    assert verify_metric_axioms(discrete, SamplePlan("grid", 5)).passed
    squared = MetricSpace("interval", (0.0,), (1.0,), metric=lambda x, y: (x - y) ** 2)
    assert not verify_metric_axioms(squared, SamplePlan("grid", 5))["triangle"].passed
    assert space.distance(0.25, 1.0) == 0.75


def test_matrix_file_roundtrip(tmp_path):
    m = np.array([[0, 1.5, 2], [1.5, 0, 0.1], [2, 0.1, 0]])
    path = tmp_path / "d.txt"
    write_distance_matrix(path, m)
    assert path.read_text().splitlines()[0] == "3"
    np.testing.assert_array_equal(load_distance_matrix(path), m)
    assert load_finite_space(path).size == 3


@pytest.mark.parametrize("text", ["", "x\n", "2\n0 1\n", "2\n0 1\n1\n", "2\n0 a\n1 0\n"])
def test_bad_matrix_files(tmp_path, text):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(MapFormatError):
        load_distance_matrix(path)


@settings(max_examples=40, deadline=None)
@given(
    a=st.floats(-1e3, 1e3),
    width=st.floats(1e-3, 1e3),
    count=st.integers(3, 60),
    seed=st.integers(0, 2**64 - 1),
    mode=st.sampled_from(["grid", "random"]),
)
def test_interval_metric_has_zero_violation_on_every_plan(a, width, count, seed, mode):
    space = interval(a, a + width)
    plan = SamplePlan(mode, count, seed)
    pts = sample_points(space, plan)
    assert pts == sample_points(space, plan)
    assert all(space.contains(x) for x in pts)
    report = verify_metric_axioms(space, plan)
    for r in report.results:
        if r.name == "positivity" and len(set(pts)) < len(pts):
            continue
        assert r.max_violation == 0.0, r


@settings(max_examples=25, deadline=None)
@given(count=st.integers(1, 30), dim=st.integers(1, 4))
def test_box_grid_emits_exactly_count_members(count, dim):
    space = box([(0, 1)] * dim)
    pts = sample_points(space, SamplePlan("grid", count))
    assert len(pts) == count
    assert all(space.contains(x) for x in pts)
