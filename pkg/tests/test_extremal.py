import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import quad_harmonic_measure
from garsia_kit.boundary import TWO_PI, make_grid
from garsia_kit.errors import ParameterError
from garsia_kit.extremal import (
    SECTION5_COLUMNS,
    EvidenceVerdict,
    LadderConfig,
    Section5Config,
    WitnessSequence,
    build_extremal_blaschke,
    check_inner_identity,
    check_product_identity,
    disk_algebra_test,
    inner_factors,
    outer_extremal_witness,
    product_extremal_witness,
    section5_build,
    section5_csv,
    section5_report,
)
from garsia_kit.factorization import BlaschkeSpec, PolynomialModulus, SingularSpec, StepModulus
from garsia_kit.poisson import DiskPoint
from garsia_kit.specs import (
    Blaschke,
    Constant,
    Identity,
    Outer,
    Polynomial,
    Product,
    Scale,
    SingularInner,
)

HALFPLUS = Polynomial((0.5, 0.5))
zero_st = st.tuples(st.floats(0, 0.98), st.floats(0, TWO_PI))
points_st = st.lists(st.tuples(st.floats(0, 0.9), st.floats(0, TWO_PI)), min_size=1, max_size=10).map(
    lambda ps: np.array([r * np.exp(1j * t) for r, t in ps])
)


def _ladder_blaschke(angle, K=12):
    return Blaschke(BlaschkeSpec(tuple((1 - 2.0**-m, angle) for m in range(1, K + 1))))


# -- identities -------------------------------------------------------------------


@given(st.lists(zero_st, min_size=1, max_size=8), points_st)
def test_inner_identity_blaschke(zeros, z):
    assert check_inner_identity(Blaschke(BlaschkeSpec(tuple(zeros))), z) <= 1e-8


@given(
    st.lists(st.tuples(st.floats(0, TWO_PI), st.floats(0.05, 3.0)), min_size=1, max_size=3, unique_by=lambda a: round(a[0], 3)),
    points_st,
)
def test_inner_identity_singular(atoms, z):
    assert check_inner_identity(SingularInner(SingularSpec(tuple(atoms))), z) <= 1e-8


def test_inner_identity_numeric_route(grid):
    z = np.array([0.1, 0.5j, -0.7 + 0.2j])
    b = Blaschke(BlaschkeSpec(((0.5, 0.3), (0.8, 2.0))))
    assert check_inner_identity(b, z, method="numeric", grid=grid) <= 1e-8


@pytest.mark.parametrize(
    "F",
    [
        HALFPLUS,
        Polynomial((0.1, -0.3j, 0.2, 0.0, 0.4)),
        Outer(PolynomialModulus((2.0, 1.0))),
        Outer(Scale(0.5, Identity()) + Constant(1.0)),
    ],
)
@given(zeros=st.lists(zero_st, min_size=1, max_size=5), z=points_st)
def test_product_identity(F, zeros, z):
    I = Product([Blaschke(BlaschkeSpec(tuple(zeros))), SingularInner(SingularSpec(((1.0, 0.5),)))])
    assert check_product_identity(I, F, z) <= 1e-8


def test_identities_need_analytic_specs():
    from garsia_kit.specs import Conjugate

    with pytest.raises(ParameterError):
        check_inner_identity(Conjugate(Identity()), [0.1])
    with pytest.raises(ParameterError):
        check_product_identity(Identity(), Conjugate(Identity()), [0.1])


# -- inner factors and witnesses --------------------------------------------------


def test_inner_factors_of_products():
    I = Product([Blaschke(BlaschkeSpec((0.5,))), SingularInner(SingularSpec(((1.0, 2.0),))), Identity()])
    b, s = inner_factors(I)
    assert sorted(abs(a) for a in b.zeros) == pytest.approx([0.0, 0.5])
    assert s.atoms == ((1.0, 2.0),)
    z = 0.3 - 0.2j
    from garsia_kit.factorization import inner_eval

    assert inner_eval(b, s, z) == pytest.approx(I.value(z))


def test_witness_sequence_validation():
    with pytest.raises(ParameterError):
        WitnessSequence([DiskPoint(0.5), DiskPoint(0.5)])
    with pytest.raises(ParameterError):
        WitnessSequence([DiskPoint(0.5)], {"x": [1.0, 2.0]})
    ws = WitnessSequence([DiskPoint(0.5), DiskPoint(0.75, 1.0)], {"x": [1.0, 2.0]})
    assert ws.blaschke_sum == pytest.approx(0.75)
    d = json.loads(ws.to_json())
    assert d["witnesses"][1] == {"r": 0.75, "theta": 1.0, "x": 2.0}


def test_outer_witness_evidence_for_deep_step():
    # eta = e^{-5000} on a short arc: near its edge P eta ~ 1 while P(log 1/eta) >= 10
    ws = outer_extremal_witness(StepModulus([(0.0, 0.1)], [-5000.0]))
    assert ws.verdict is EvidenceVerdict.EVIDENCE


def test_outer_witness_no_evidence_for_smooth_eta():
    ws = outer_extremal_witness(Outer(PolynomialModulus((0.5, 0.5))))
    assert ws.verdict is EvidenceVerdict.NO_EVIDENCE
    assert ws.notes["max_P_log_inv_eta"] < 10


@pytest.mark.parametrize("angle, verdict", [(0.0, EvidenceVerdict.EVIDENCE), (np.pi, EvidenceVerdict.NO_EVIDENCE)])
def test_product_witness_dichotomy(angle, verdict):
    ws = product_extremal_witness(HALFPLUS, _ladder_blaschke(angle, 20), LadderConfig(m_max=20))
    assert ws.verdict is verdict


@pytest.mark.parametrize(
    "F, angle, expect",
    [(HALFPLUS, 0.0, True), (HALFPLUS, np.pi, False), (Constant(0.5), np.pi, True)],
)
def test_disk_algebra_test(F, angle, expect):
    assert disk_algebra_test(F, _ladder_blaschke(angle)) is expect


def test_ladder_config_validation():
    with pytest.raises(ParameterError):
        LadderConfig(m_max=0)
    with pytest.raises(ParameterError):
        LadderConfig(tol_P=1.0)
    assert LadderConfig(m_max=3).radii() == pytest.approx([0.5, 0.75, 0.875])


# -- the extremal Blaschke construction -----------------------------------------------


def test_build_extremal_blaschke_oracle():
    build = build_extremal_blaschke(HALFPLUS, 12, phi=HALFPLUS)
    # P(|1 + zeta|^2 / 4)(r) = (1 + r) / 2, maximal at angle 0
    expect = [(2 - 2.0**-n) / 2 for n in range(1, 13)]
    assert build.witnesses.functionals["P_eta2"] == pytest.approx(expect, abs=1e-14)
    assert [p.theta for p in build.witnesses.points] == [0.0] * 12
    assert build.max_residual <= 1e-8
    assert build.witnesses.functionals["Phi_Bphi"][-1] >= 0.99
    assert build.blaschke.truncation_count == 12


def test_build_extremal_blaschke_without_phi():
    build = build_extremal_blaschke(HALFPLUS, 4)
    assert build.max_residual is None
    with pytest.raises(ParameterError):
        build_extremal_blaschke(HALFPLUS, 0)


# -- Section 5 -------------------------------------------------------------------------


def test_section5_config_defaults_and_arcs():
    cfg = Section5Config(K=4)
    alpha, beta = cfg.endpoints()
    assert alpha == pytest.approx([0.0, 1.0, 1.5, 1.75, 1.875])
    assert beta == pytest.approx([0.5, 1.25, 1.625, 1.8125])
    assert cfg.depths == pytest.approx([2.0**-k * k**-0.5 for k in range(1, 5)])


@pytest.mark.parametrize(
    "kwargs",
    [{"K": 0}, {"K": 49}, {"K": 2, "l": (0.5,)}, {"K": 2, "eps": (0.5, 1.5)}, {"K": 4, "l": (0.99,) * 4}, {"K": 2.0}],
)
def test_section5_config_validation(kwargs):
    with pytest.raises(ParameterError):
        Section5Config(**kwargs)


def test_section5_first_row_against_quadrature():
    res = section5_build()
    cfg = res.config
    alpha, beta = cfg.endpoints()
    z1 = res.witnesses.points[0].z
    p_eta = 1 - sum((1 - e) * quad_harmonic_measure(z1, b, a) for e, b, a in zip(cfg.epsilons, beta, alpha[1:]))
    row = section5_report(result=res)["rows"][0]
    assert row[1] == pytest.approx(p_eta, abs=1e-12)
    assert row[1] == pytest.approx(0.8692548075065238, abs=1e-14)
    assert row[3] == pytest.approx(quad_harmonic_measure(z1, alpha[0], beta[0]), abs=1e-12)


def test_section5_frozen_last_row():
    rep = section5_report(Section5Config(K=12))
    k, p_eta, p_log, omega_i, lower = rep["rows"][-1]
    assert k == 12
    assert p_eta == pytest.approx(0.7492825743613257, abs=1e-13)
    assert p_log == pytest.approx(1.9697602426551981, abs=1e-13)
    assert lower <= p_log


def test_section5_log_integral():
    K = 12
    rep = section5_report(Section5Config(K=K))
    closed = np.log(2) / (2 * np.pi) * (2 - (K + 2) * 2.0**-K)
    assert rep["log_integral_exact"] == pytest.approx(closed, abs=1e-15)
    assert abs(rep["log_integral_grid"] - rep["log_integral_exact"]) <= 2 * K / rep["grid_n"]
    assert rep["log_integral_limit"] == pytest.approx(0.220636, abs=1e-6)


def test_section5_csv_layout():
    text = section5_csv(section5_report(Section5Config(K=3)))
    lines = text.split("\n")
    assert lines[0] == ",".join(SECTION5_COLUMNS)
    assert len(lines) == 5 and lines[-1] == ""
    assert all(len(line.split(",")) == 5 for line in lines[:-1])


def test_section5_outer_witness_falls_short():
    res = section5_build()
    ws = outer_extremal_witness(res.outer, extra_points=res.witnesses.points)
    # P(log 1/eta) <= sum_k log(1/eps_k) omega(J_k) stays far below L_min = 10 at K = 12
    assert ws.verdict is EvidenceVerdict.NO_EVIDENCE
    assert ws.notes["max_P_log_inv_eta"] < 12 * np.log(2)
