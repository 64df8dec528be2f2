import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from garsia_kit.boundary import (
    TWO_PI,
    ArcSet,
    BoundaryFunction,
    CircleGrid,
    arc_measure,
    combine,
    fourier_coeffs,
    make_grid,
)
from garsia_kit.errors import ParameterError, ShapeError


@pytest.mark.parametrize("log2_n", [3, 10, 14, 22])
def test_make_grid_sizes(log2_n):
    g = make_grid(log2_n)
    assert g.n == 2**log2_n
    assert g.log2_n == log2_n
    assert g.weight == 1.0 / g.n


@pytest.mark.parametrize("bad", [2, 23, True, 4.0])
def test_make_grid_rejects(bad):
    with pytest.raises(ParameterError):
        make_grid(bad)


@pytest.mark.parametrize("n", [6, 100, 4])
def test_circle_grid_power_of_two(n):
    with pytest.raises(ParameterError):
        CircleGrid(n)


def test_grid_radii_follow_spacing():
    g = make_grid(14)
    assert g.r_quad_max == pytest.approx(1 - 16 * g.spacing)
    assert g.delta_trace == pytest.approx(8 * g.spacing)
    assert np.allclose(np.abs(g.nodes), 1.0)


def test_arcset_wraps_and_merges():
    arcs = ArcSet.from_pairs([(6.0, 7.0), (0.5, 1.0), (0.9, 1.2)])
    # [6, 7) wraps to [6, 2 pi) and [0, 7 - 2 pi), which overlaps [0.5, 1.2)
    flat = [x for pair in arcs.to_list() for x in pair]
    assert flat == pytest.approx([0.0, 1.2, 6.0, TWO_PI])
    assert arc_measure(arcs) == pytest.approx((1.2 + TWO_PI - 6.0) / TWO_PI)


def test_arcset_full_circle():
    assert ArcSet.from_pairs([(1.0, 1.0 + 7.0)]).arcs == ((0.0, TWO_PI),)
    assert arc_measure(ArcSet.full()) == 1.0


@pytest.mark.parametrize("pair", [(1.0, 1.0), (2.0, 1.0)])
def test_arcset_rejects_empty_arc(pair):
    with pytest.raises(ParameterError):
        ArcSet.from_pairs([pair])


@given(
    st.lists(
        st.tuples(st.floats(0, TWO_PI), st.floats(1e-3, 2.0)),
        min_size=1,
        max_size=5,
    )
)
def test_complement_measure(pairs):
    arcs = ArcSet.from_pairs([(a, a + l) for a, l in pairs])
    assert arc_measure(arcs) + arc_measure(arcs.complement()) == pytest.approx(1.0, abs=1e-12)
    theta = np.linspace(0, TWO_PI, 997, endpoint=False)
    assert not np.any(arcs.contains(theta) & arcs.complement().contains(theta))


@pytest.mark.parametrize("k", [0, 1, 3, 17])
def test_fourier_coeffs_of_cosine(k, small_grid):
    f = BoundaryFunction.from_callable(lambda z: np.real(z**k), small_grid)
    spec = fourier_coeffs(f)
    coeff = dict(zip(spec.k.tolist(), spec.coef))
    assert spec[k] == coeff[k]
    expect = 1.0 if k == 0 else 0.5
    assert coeff[k] == pytest.approx(expect, abs=1e-14)
    assert coeff[-k] == pytest.approx(expect, abs=1e-14)
    others = [abs(c) for j, c in coeff.items() if abs(j) != k]
    assert max(others) < 1e-14


def test_boundary_function_algebra(small_grid):
    f = BoundaryFunction.from_callable(lambda z: z, small_grid)
    g = BoundaryFunction.constant(2.0, small_grid)
    assert np.allclose((f * g).values, 2 * f.values)
    assert np.allclose((f - f).values, 0)
    assert np.allclose(abs(f).values, 1.0)
    assert np.allclose(f.conj().values * f.values, 1.0)
    assert f.sup_norm() == pytest.approx(1.0)
    assert f.oscillation() == pytest.approx(0.0, abs=1e-15)
    assert f.mean() == pytest.approx(0.0, abs=1e-15)


def test_boundary_function_shape_checks(small_grid):
    with pytest.raises(ShapeError):
        BoundaryFunction(small_grid, np.zeros(3))
    other = BoundaryFunction.constant(1.0, make_grid(8))
    with pytest.raises(ShapeError):
        combine("add", BoundaryFunction.constant(1.0, small_grid), other)


def test_boundary_values_are_read_only(small_grid):
    f = BoundaryFunction.constant(1.0, small_grid)
    with pytest.raises(ValueError):
        f.values[0] = 2.0
