import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from garsia_kit.boundary import TWO_PI, ArcSet, BoundaryFunction, make_grid
from garsia_kit.errors import DomainError, LogIntegrabilityError, ParameterError, PreconditionError
from garsia_kit.factorization import BlaschkeSpec, SingularSpec
from garsia_kit.garsia import SearchConfig
from garsia_kit.geometry import (
    default_perturbations,
    extreme_probe,
    inner_characterization_experiment,
    lipschitz_garsia_norm,
    nonextreme_decompose,
    parallelogram_check,
)
from garsia_kit.specs import (
    Blaschke,
    Conjugate,
    Constant,
    Identity,
    Indicator,
    Polynomial,
    Scale,
    SingularInner,
)

LIPSCHITZ_QUARTER = (4 / 3) ** 0.5 * (2 / 3) ** 0.25  # 1.043389720048858

coeffs = st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=1, max_size=4)
arc = st.tuples(st.floats(0, TWO_PI), st.floats(0.05, 3.0))


def _poly_or_step(draw_coeffs, draw_arc, conj):
    p = Polynomial(tuple(draw_coeffs))
    step = Indicator(ArcSet.from_pairs([(draw_arc[0], draw_arc[0] + draw_arc[1])]))
    return (Conjugate(p) if conj else p) + step


@given(coeffs, arc, st.booleans(), coeffs, arc, st.booleans())
def test_parallelogram_identity_exact(c1, a1, j1, c2, a2, j2):
    f, g = _poly_or_step(c1, a1, j1), _poly_or_step(c2, a2, j2)
    rng = np.random.default_rng(0)
    z = np.sqrt(rng.uniform(0, 0.81, 100)) * np.exp(2j * np.pi * rng.uniform(size=100))
    assert parallelogram_check(f, g, z) <= 1e-10


def test_parallelogram_identity_sampled(small_grid):
    f = BoundaryFunction.from_callable(lambda z: np.exp(np.real(z)) + 1j * np.imag(z**2), small_grid)
    g = BoundaryFunction.from_callable(lambda z: np.abs(z - 0.5), small_grid)
    z = np.array([0.0, 0.4j, -0.8 + 0.1j])
    assert parallelogram_check(f, g, z) <= 1e-10
    with pytest.raises(ParameterError):
        parallelogram_check(f, Identity(), z)


def test_lipschitz_norm_oracle():
    est = lipschitz_garsia_norm(Identity(), 0.25)
    assert est.lower_bound == pytest.approx(LIPSCHITZ_QUARTER, abs=1e-6)
    assert est.argmax.r == pytest.approx(1 / 3, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.45])
def test_lipschitz_norm_identity_family(alpha):
    # sqrt(1 - r^2) (1 - r)^-alpha peaks at r = alpha / (1 - alpha)
    r = alpha / (1 - alpha)
    expect = np.sqrt((1 - r * r) * (1 - r) ** (-2 * alpha))
    est = lipschitz_garsia_norm(Identity(), alpha)
    assert est.lower_bound == pytest.approx(expect, abs=1e-6)
    assert est.argmax.r == pytest.approx(r, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.0, 0.5, -0.1, 1.0])
def test_lipschitz_alpha_range(alpha):
    with pytest.raises(ParameterError):
        lipschitz_garsia_norm(Identity(), alpha)


def test_default_perturbations_are_bounded(small_grid):
    for g in default_perturbations():
        assert g.sample(small_grid).sup_norm() <= 0.5 + 1e-12


@pytest.mark.slow
def test_extreme_probe_around_minus_z():
    res = extreme_probe(Scale(-1.0, Identity()), default_perturbations() + [Constant(5.0)])
    assert res.violations == [False, False, False]
    assert all(m >= -1e-9 for m in res.margins)
    # a constant perturbation leaves Phi unchanged
    assert res.margins[2] == pytest.approx(0.0, abs=1e-12)
    assert res.oscillations[2] == 0.0


def test_extreme_probe_preconditions():
    with pytest.raises(PreconditionError, match="expected 1"):
        extreme_probe(Polynomial((0.5, 0.5)), [])
    with pytest.raises(PreconditionError, match="Attained"):
        extreme_probe(SingularInner(SingularSpec(((0.0, 1.0),))), [])


@pytest.mark.slow
def test_nonextreme_decompose_analytic(grid):
    dec = nonextreme_decompose(Polynomial((0.5, 0.5)), "analytic", grid=grid)
    assert dec.midpoint_check <= 1e-12
    assert dec.modulus_check <= 1e-10
    assert max(dec.sup_norms) <= 1 + 1e-9
    assert max(dec.norms) <= 1 + 1e-6
    assert dec.valid
    assert dec.to_dict()["valid"] is True


def test_nonextreme_decompose_real_mode(small_grid):
    phi = Scale(0.5, Constant(1.0) + 0.5 * (Identity() + Conjugate(Identity())))
    cfg = SearchConfig(n_r=16, n_theta=32, m_max=8)
    B = BlaschkeSpec(((0.5, 0.0),))
    dec = nonextreme_decompose(phi, "real", B=B, cfg=cfg, grid=small_grid)
    assert dec.valid
    assert dec.distinctness > 0.5


def test_nonextreme_decompose_rejections(small_grid):
    B = BlaschkeSpec((0.5,))
    with pytest.raises(DomainError):
        nonextreme_decompose(Identity(), "real", B=B, grid=small_grid)
    with pytest.raises(LogIntegrabilityError):
        nonextreme_decompose(Identity(), "analytic", B=B, grid=small_grid)
    with pytest.raises(PreconditionError):
        nonextreme_decompose(Polynomial((0.25, 0.25)), "analytic", B=B, grid=small_grid)
    with pytest.raises(ParameterError):
        nonextreme_decompose(Identity(), "imaginary", B=B, grid=small_grid)


@pytest.mark.slow
@pytest.mark.parametrize(
    "h, verdict",
    [
        (SingularInner(SingularSpec(((0.0, 1.0),))), "extreme"),
        (Polynomial((0.5, 0.5)), "non-extreme"),
    ],
)
def test_inner_characterization(h, verdict):
    report = inner_characterization_experiment(h, BlaschkeSpec(((0.5, 0.0),)))
    assert report["verdict"] == verdict


def test_inner_characterization_needs_zeros():
    with pytest.raises(ParameterError):
        inner_characterization_experiment(Identity(), BlaschkeSpec())
