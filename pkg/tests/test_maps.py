import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fplab.errors import InvalidParameterError, MapFormatError
from fplab.maps import (
    PiecewiseLinear,
    closure_violations,
    format_piecewise,
    gallery_constant,
    gallery_linear_scale,
    gallery_paper_piecewise,
    iterate,
    load_piecewise_map,
    parse_piecewise,
    piecewise_map,
    random_piecewise,
    table_map,
)
from fplab.space import SamplePlan, finite, interval, sample_points

GRID = SamplePlan("grid", 1000)


def gallery():
    return [
        gallery_paper_piecewise(),
        gallery_linear_scale(0.9),
        gallery_linear_scale(0.0),
        gallery_constant(0.5),
        piecewise_map(random_piecewise(7)),
    ]


def test_gallery_piecewise_values():
    T = gallery_paper_piecewise()
    assert T(0.0) == 1.0
    assert T(0.75) == 0.5
    assert T(0.5) == 0.5
    assert T.fixed_point == 0.5
    assert "not Banach" in T.notes


def test_gallery_piecewise_second_iterate_is_half():
    assert iterate(gallery_paper_piecewise(), 0.0, 2) == 0.5


def test_linear_scale():
    T = gallery_linear_scale(0.9)
    assert T(1.0) == 0.9
    assert iterate(T, 1.0, 2) == pytest.approx(0.81, abs=1e-15)
    assert T.banach_constant == 0.9 and T.fixed_point == 0.0
    assert iterate(gallery_linear_scale(0.5), 1.0, 3) == 0.125
    Z = gallery_linear_scale(0.0)
    assert all(Z(x) == 0.0 for x in (-1.0, -0.3, 0.0, 0.7, 1.0))


@pytest.mark.parametrize("lam", [1.0, 1.5, -0.1])
def test_linear_scale_rejects_bad_lambda(lam):
    with pytest.raises(InvalidParameterError, match="lambda"):
        gallery_linear_scale(lam)


def test_constant_map():
    C = gallery_constant(0.5)
    assert C(0.123) == 0.5
    assert iterate(C, 0.9, 7) == 0.5
    with pytest.raises(InvalidParameterError):
        gallery_constant(1.5)


def test_iterate_rejects_nonpositive_p():
    with pytest.raises(InvalidParameterError):
        iterate(gallery_constant(0.5), 0.1, 0)


@pytest.mark.parametrize("T", gallery(), ids=lambda T: T.name)
def test_gallery_closure_on_grid(T):
    assert closure_violations(T, sample_points(T.space, GRID)) == []


@pytest.mark.parametrize("T", gallery(), ids=lambda T: T.name)
def test_iterate_single_step_is_apply(T):
    for x in sample_points(T.space, SamplePlan("grid", 17)):
        assert iterate(T, x, 1) == T(x)


@pytest.mark.parametrize("T", gallery(), ids=lambda T: T.name)
@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_iterate_commutes_with_apply(T, p):
    for x in sample_points(T.space, SamplePlan("grid", 33)):
        assert iterate(T, T(x), p) == T(iterate(T, x, p))


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.0, 1.0), p=st.integers(1, 6), q=st.integers(1, 6), seed=st.integers(0, 50))
def test_iterate_composition(x, p, q, seed):
    T = piecewise_map(random_piecewise(seed))
    assert iterate(T, x, p + q) == iterate(T, iterate(T, x, p), q)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0.0, 1.0))
def test_gallery_piecewise_square_is_exactly_half(x):
    assert iterate(gallery_paper_piecewise(), x, 2) == 0.5


def test_piecewise_half_open_pieces():
    pw = PiecewiseLinear(0.0, 1.0, ((0.0, 0.5, -1.0, 1.0), (0.5, 1.0, 0.0, 0.5)))
    T = piecewise_map(pw)
    assert T(0.0) == 1.0
    assert T(0.25) == 0.75
    # 0.5 starts the second piece under the half-open convention.
    assert T(0.5) == 0.5
    assert T(1.0) == 0.5


def test_piecewise_file_roundtrip(tmp_path):
    text = "interval 0 1\n0 0.5 -1 1\n0.5 1 0 0.5\n"
    path = tmp_path / "tent.pwl"
    path.write_text(text)
    T = load_piecewise_map(path)
    hand = {0.0: 1.0, 0.5: 0.5, 1.0: 0.5}
    for x, y in hand.items():
        assert T(x) == y
    again = parse_piecewise(format_piecewise(T.apply))
    assert again == T.apply
    for x in T.apply.breakpoints():
        assert again(x) == T(x)


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty"),
        ("interval 0\n0 1 0 0\n", "interval a b"),
        ("interval 0 1\n0 0.5 1\n", "x_lo x_hi"),
        ("interval 0 1\n0 0.4 1 0\n0.5 1 0 0\n", "gap"),
        ("interval 0 1\n0.1 1 0 0\n", "first piece"),
        ("interval 0 1\n0 0.9 0 0\n", "last piece"),
        ("interval 0 1\n0 1 one 0\n", "non-numeric"),
    ],
)
def test_piecewise_parse_errors(text, match):
    with pytest.raises(MapFormatError, match=match):
        parse_piecewise(text)


def test_piecewise_closure_enforced():
    with pytest.raises(MapFormatError, match="outside"):
        piecewise_map(PiecewiseLinear(0.0, 1.0, ((0.0, 1.0, 2.0, 0.0),)))


def test_table_map():
    space = finite(np.ones((3, 3)) - np.eye(3))
    T = table_map(space, [1, 2, 2])
    assert [iterate(T, 0, k) for k in (1, 2, 3)] == [1, 2, 2]
    with pytest.raises(InvalidParameterError):
        table_map(space, [0, 1])
    with pytest.raises(InvalidParameterError):
        table_map(space, [0, 1, 3])


def test_power_map():
    T = gallery_linear_scale(0.5)
    S = T.power(3)
    assert S(1.0) == 0.125
    assert S.banach_constant == 0.125


def test_random_piecewise_is_closed_and_seeded():
    for seed in range(30):
        pw = random_piecewise(seed, n_pieces=5)
        assert pw == random_piecewise(seed, n_pieces=5)
        T = piecewise_map(pw)
        assert closure_violations(T, sample_points(interval(0, 1), GRID)) == []
