import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import quad_harmonic_measure
from garsia_kit.boundary import TWO_PI, BoundaryFunction, make_grid
from garsia_kit.errors import DomainError, LogIntegrabilityError, ParameterError
from garsia_kit.factorization import (
    BlaschkeSpec,
    OuterSpec,
    PolynomialModulus,
    SingularSpec,
    StepModulus,
    blaschke_eval,
    blaschke_log_abs,
    inner_eval,
    max_modulus_set,
    outer_eval,
    outer_log_abs,
    outer_modulus,
    singular_eval,
    singular_log_abs,
    spectrum,
)
from garsia_kit.poisson import DiskPoint
from garsia_kit.specs import Polynomial

zero_st = st.tuples(st.floats(0, 0.97), st.floats(0, TWO_PI))


@given(st.lists(zero_st, min_size=1, max_size=8))
def test_blaschke_vanishes_and_is_unimodular(zeros):
    b = BlaschkeSpec(tuple(zeros))
    g = make_grid(8)
    assert np.allclose(np.abs(blaschke_eval(b, g.nodes)), 1.0, atol=1e-12)
    for a in b.zeros:
        assert abs(blaschke_eval(b, a)) < 1e-12


@given(st.lists(zero_st, min_size=1, max_size=8), st.floats(0, 0.9), st.floats(0, TWO_PI))
def test_blaschke_log_abs_consistent(zeros, r, t):
    b = BlaschkeSpec(tuple(zeros))
    z = r * np.exp(1j * t)
    val = abs(blaschke_eval(b, z))
    if val > 1e-300:
        assert blaschke_log_abs(b, z) == pytest.approx(np.log(val), abs=1e-9)


def test_blaschke_conventions():
    assert blaschke_eval(BlaschkeSpec((0.0,)), 0.3 + 0.1j) == pytest.approx(-(0.3 + 0.1j))
    b = BlaschkeSpec(((0.5, 0.0),))
    # (|a|/a)(a - z)/(1 - conj(a) z) at z = 0 is |a|
    assert blaschke_eval(b, 0.0) == pytest.approx(0.5)
    assert b.blaschke_sum() == pytest.approx(0.5)
    assert BlaschkeSpec((DiskPoint(0.5, 1.0),)).zeros[0] == pytest.approx(0.5 * np.exp(1j))
    with pytest.raises(ParameterError):
        BlaschkeSpec((1.2,))
    with pytest.raises(ParameterError):
        BlaschkeSpec((0.5,), const=2.0)


def test_singular_oracle_values():
    s = SingularSpec(((0.0, 1.0),))
    assert singular_eval(s, 0.0) == pytest.approx(np.exp(-1.0))
    assert singular_eval(s, 0.5) == pytest.approx(np.exp(-3.0))
    assert singular_log_abs(s, 0.5) == pytest.approx(-3.0)
    # the value at the atom itself is reported as 1
    assert singular_eval(s, 1.0) == 1.0


def test_singular_large_mass_log_form():
    s = SingularSpec(((np.pi, 2000.0),))
    assert singular_log_abs(s, 0.0) == pytest.approx(-2000.0)
    assert singular_eval(s, 0.0) == 0.0


def test_singular_unimodular_off_atoms():
    s = SingularSpec(((0.3, 0.7), (2.0, 1.5)))
    g = make_grid(10)
    away = np.min(np.abs(np.angle(g.nodes[:, None] / np.exp(1j * np.array([0.3, 2.0])))), axis=1) > 1e-3
    assert np.allclose(np.abs(singular_eval(s, g.nodes[away])), 1.0, atol=1e-12)


@pytest.mark.parametrize("atoms", [((0.0, -1.0),), ((1.0, 1.0), (1.0, 2.0))])
def test_singular_rejects(atoms):
    with pytest.raises(ParameterError):
        SingularSpec(atoms)


def test_inner_eval_is_product():
    b, s = BlaschkeSpec((0.3j,)), SingularSpec(((1.0, 0.5),))
    z = 0.2 - 0.1j
    assert inner_eval(b, s, z) == pytest.approx(blaschke_eval(b, z) * singular_eval(s, z))


@pytest.mark.parametrize(
    "coeffs",
    [(0.5, 0.5), (-2.0, 1.0), (0.25, 0.0, 1.0), (1.0, 2.0 + 1.0j, 0.3)],
)
def test_polynomial_modulus_jensen(coeffs, grid):
    pm = PolynomialModulus(coeffs)
    # Jensen's formula against the sampled route (zeros on the circle included)
    sampled = OuterSpec(BoundaryFunction(grid, pm.sample(grid)))
    assert pm.log_mean() == pytest.approx(sampled.log_mean(), abs=1e-9)
    outer = np.polyval(pm.outer_coefficients()[::-1], grid.nodes)
    assert np.allclose(np.abs(outer), pm.sample(grid), atol=1e-12)
    roots = np.roots(pm.outer_coefficients()[::-1])
    assert np.all(np.abs(roots) >= 1 - 1e-12)


def test_polynomial_modulus_outer_matches_sampled_route(grid):
    pm = PolynomialModulus((0.5, 0.5))
    closed = OuterSpec(pm)
    sampled = OuterSpec(BoundaryFunction(grid, pm.sample(grid)))
    z = np.array([0.0, 0.3 + 0.4j, -0.5])
    assert np.allclose(outer_eval(closed, z), (1 + z) / 2, atol=1e-14)
    assert np.allclose(outer_eval(sampled, z), (1 + z) / 2, atol=1e-10)


@pytest.mark.parametrize("power", [1, 2, 3])
def test_sampled_log_mean_with_zero_on_a_node(power, grid):
    # log |2 sin(t/2)|^p has mean zero; the zero sits on the node t = 0
    eta = np.abs(2 * np.sin(grid.theta / 2)) ** power
    spec = OuterSpec(BoundaryFunction(grid, eta))
    assert spec.log_mean() == pytest.approx(0.0, abs=1e-8)


def test_step_outer_oracle():
    # Frozen from quadrature: exp(-omega_0.4([0, 1))) and exp(-1/(2 pi)).
    spec = OuterSpec(StepModulus([(0.0, 1.0)], [-1.0], 0.0))
    assert outer_modulus(spec, 0.4) == pytest.approx(0.7495700007713891, abs=1e-14)
    assert outer_modulus(spec, 0.4) == pytest.approx(np.exp(-quad_harmonic_measure(0.4, 0.0, 1.0)), abs=1e-13)
    assert outer_eval(spec, 0.0) == pytest.approx(0.8528642033144647, abs=1e-14)


def test_step_modulus_log_mean_and_sampling(grid):
    eta = StepModulus([(0.0, 1.0), (2.0, 2.5)], [-1.0, np.log(3.0)], np.log(2.0))
    assert eta.log_mean() == pytest.approx(np.mean(eta.log_sample(grid)), abs=2e-3)
    assert np.allclose(np.log(eta.sample(grid)), eta.log_sample(grid))
    with pytest.raises(LogIntegrabilityError):
        StepModulus([(0.0, 1.0)], [-np.inf])
    with pytest.raises(ParameterError):
        StepModulus([(0.0, 1.0)], [0.0, 1.0])


def test_outer_spec_zero_runs(small_grid):
    eta = np.ones(small_grid.n)
    eta[10] = 0.0
    OuterSpec(BoundaryFunction(small_grid, eta))  # an isolated zero is tolerated
    eta[10:14] = 0.0
    with pytest.raises(LogIntegrabilityError):
        OuterSpec(BoundaryFunction(small_grid, eta))
    wrap = np.ones(small_grid.n)
    wrap[[0, 1, -1, -2]] = 0.0
    with pytest.raises(LogIntegrabilityError):
        OuterSpec(BoundaryFunction(small_grid, wrap))


def test_outer_spec_domain_checks(small_grid):
    with pytest.raises(DomainError):
        OuterSpec(BoundaryFunction(small_grid, -np.ones(small_grid.n)))
    with pytest.raises(DomainError):
        OuterSpec(BoundaryFunction(small_grid, 1j * np.ones(small_grid.n)))
    with pytest.raises(ParameterError):
        OuterSpec(object())


def test_outer_boundary_values_modulus(grid):
    spec = OuterSpec(BoundaryFunction(grid, 2.0 + np.cos(grid.theta)))
    vals = spec.boundary_values(grid)
    assert np.allclose(np.abs(vals), 2.0 + np.cos(grid.theta))
    # log |O(z)| is the Poisson integral of log eta
    z = 0.6j
    expect = np.mean(np.log(2.0 + np.cos(grid.theta)) * (1 - abs(z) ** 2) / np.abs(grid.nodes - z) ** 2)
    assert outer_log_abs(spec, z) == pytest.approx(expect, abs=1e-12)


def test_spectrum_clusters_boundary_zeros():
    zeros = [(1 - 2.0**-m, 0.001 * (m % 2)) for m in range(8, 12)] + [(0.5, 2.0)]
    b = BlaschkeSpec(tuple(zeros))
    s = SingularSpec(((np.pi, 1.0),))
    sig = spectrum(b, s)
    assert len(sig.interior_zeros) == 5
    assert sig.boundary_angles == pytest.approx((0.0005, np.pi), abs=1e-3)
    assert spectrum(BlaschkeSpec(), SingularSpec()).empty


def test_max_modulus_set(grid):
    mm = max_modulus_set(Polynomial((0.5, 0.5)), grid=grid)
    assert mm.sup == pytest.approx(1.0)
    assert mm.contains_angle(0.0, 1e-2)
    assert not mm.contains_angle(np.pi, 1e-2)
    assert not mm.whole_disk
    const = max_modulus_set(BoundaryFunction.constant(2.0, grid))
    assert const.whole_disk and const.sup == 2.0
