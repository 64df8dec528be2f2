"""Geometry of the unit ball of BMO under the Garsia norm.

Covers the parallelogram identity for ``Phi``, probes around norm-attaining
unit-norm functions (extreme points), the explicit midpoint decompositions
``f = (B phi_1 + B phi_2) / 2`` of non-extreme points, the Lipschitz-Garsia
norms and the inner-function characterization experiment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import ArcSet, BoundaryFunction, CircleGrid
from .errors import DomainError, LogIntegrabilityError, ParameterError, PreconditionError
from .extremal import build_extremal_blaschke
from .factorization import BlaschkeSpec, OuterSpec
from .garsia import NormEstimate, PhiEvaluator, SearchConfig, Verdict, _search, garsia_norm, sup_norm
from .poisson import as_complex
from .specs import (
    Blaschke,
    Conjugate,
    Constant,
    FunctionSpec,
    Identity,
    Indicator,
    Modulus,
    Outer,
    Product,
    Scale,
    Sum,
    exact_parts,
)

__all__ = [
    "Decomposition",
    "ProbeResult",
    "default_perturbations",
    "extreme_probe",
    "inner_characterization_experiment",
    "lipschitz_garsia_norm",
    "nonextreme_decompose",
    "parallelogram_check",
]


def parallelogram_check(f, g, points, grid: CircleGrid | None = None) -> float:
    """``max |2 Phi_f + 2 Phi_g - Phi_{f+g} - Phi_{f-g}|`` over ``points``.

    Specs use the closed-form route when all four functions admit one and the
    numeric route otherwise, so that the four values are computed alike.
    """
    z = np.atleast_1d(as_complex(points))
    if isinstance(f, FunctionSpec) and isinstance(g, FunctionSpec):
        fs = [f, g, Sum([f, g]), Sum([f, Scale(-1.0, g)])]
        method = "auto" if all(exact_parts(s) is not None for s in fs) else "numeric"
    elif isinstance(f, BoundaryFunction) and isinstance(g, BoundaryFunction):
        fs = [f, g, f + g, f - g]
        method = "numeric"
    else:
        raise ParameterError("f and g must both be specs or both be sampled")
    vals = [PhiEvaluator(s, grid, method)(z) for s in fs]
    res = 2 * vals[0] + 2 * vals[1] - vals[2] - vals[3]
    return float(np.max(np.abs(res)))


@dataclass
class ProbeResult:
    """Margins ``max(||f+g||_G, ||f-g||_G) - 1`` per perturbation."""

    margins: list
    norms: list
    oscillations: list
    violations: list

    def to_dict(self) -> dict:
        return {
            "margins": self.margins,
            "norms": self.norms,
            "oscillations": self.oscillations,
            "violations": self.violations,
        }


def default_perturbations() -> list:
    """Mean-zero step bump and a conjugate-analytic perturbation."""
    half = Indicator(ArcSet.from_pairs([(0.0, np.pi)]))
    return [
        Scale(0.3, Sum([half, Constant(-0.5)])),
        Scale(0.5, Conjugate(Identity())),
    ]


def _oscillation(g, grid: CircleGrid) -> float:
    if isinstance(g, Constant):
        return 0.0
    vals = g.sample(grid).values if isinstance(g, FunctionSpec) else g.values
    return float(np.max(np.abs(vals - vals[0])))


def extreme_probe(
    f: FunctionSpec,
    perturbations: Sequence[FunctionSpec] | None = None,
    cfg: SearchConfig | None = None,
    grid: CircleGrid | None = None,
) -> ProbeResult:
    """Check the assertable form of the extreme-point theorem around ``f``.

    Preconditions: ``f`` is norm attaining with ``||f||_G = 1`` (within
    ``1e-6``).  For every perturbation ``g`` the margin
    ``max(||f+g||_G, ||f-g||_G) - 1`` is reported; a violation is flagged when
    both perturbed norms are at most ``1 - 1e-6`` while ``g`` oscillates by
    more than ``1e-6``.
    """
    grid = grid or CircleGrid()
    cfg = cfg or SearchConfig()
    est = garsia_norm(f, cfg, grid)
    if est.attained is not Verdict.ATTAINED:
        raise PreconditionError(f"is_norm_attaining(f) returned {est.attained}, expected Attained")
    if abs(est.lower_bound - 1.0) > 1e-6:
        raise PreconditionError(f"garsia_norm(f) = {est.lower_bound:.9f}, expected 1 within 1e-6")
    margins, norms, oscs, viol = [], [], [], []
    for g in perturbations if perturbations is not None else default_perturbations():
        plus = garsia_norm(Sum([f, g]), cfg, grid).lower_bound
        minus = garsia_norm(Sum([f, Scale(-1.0, g)]), cfg, grid).lower_bound
        osc = _oscillation(g, grid)
        margins.append(max(plus, minus) - 1.0)
        norms.append((plus, minus))
        oscs.append(osc)
        viol.append(bool(plus <= 1 - 1e-6 and minus <= 1 - 1e-6 and osc > 1e-6))
    return ProbeResult(margins, norms, oscs, viol)


@dataclass
class Decomposition:
    """``f = B phi`` written as the midpoint of ``B phi_1`` and ``B phi_2``."""

    B: BlaschkeSpec
    phi1: BoundaryFunction
    phi2: BoundaryFunction
    g: BoundaryFunction
    mode: str
    midpoint_check: float
    modulus_check: float
    sup_norms: tuple
    norms: tuple
    distinctness: float
    extras: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return (
            self.midpoint_check <= 1e-12
            and self.modulus_check <= 1e-10
            and max(self.sup_norms) <= 1 + 1e-9
            and max(self.norms) <= 1 + 1e-6
            and self.distinctness > 1e-6
        )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "zeros": [[abs(a), float(np.angle(a)) % (2 * np.pi)] for a in self.B.zeros],
            "midpoint_check": self.midpoint_check,
            "modulus_check": self.modulus_check,
            "sup_norms": list(self.sup_norms),
            "norms": list(self.norms),
            "distinctness": self.distinctness,
            "valid": self.valid,
            **self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def nonextreme_decompose(
    phi: FunctionSpec,
    mode: str = "analytic",
    K: int = 12,
    B: BlaschkeSpec | None = None,
    cfg: SearchConfig | None = None,
    grid: CircleGrid | None = None,
) -> Decomposition:
    """Build ``g``, ``phi_1 = phi + g``, ``phi_2 = phi - g`` and verify the decomposition.

    ``mode="real"`` takes ``g = 1 - |phi|``; ``mode="analytic"`` takes the outer
    function with modulus ``1 - |phi|``.  ``B`` defaults to
    ``build_extremal_blaschke(|phi|, K)``.
    """
    if mode not in ("real", "analytic"):
        raise ParameterError(f"mode must be 'real' or 'analytic', got {mode!r}")
    grid = grid or CircleGrid()
    cfg = cfg or SearchConfig()
    vals = phi.sample(grid).values
    mod = np.abs(vals)
    if abs(mod.max() - 1.0) > 1e-9:
        raise PreconditionError(f"grid sup |phi| = {mod.max():.12f}, expected 1 within 1e-9")
    if mode == "real":
        if mod.max() - mod.min() <= 1e-6:
            raise DomainError("|phi| is constant on the circle: the non-unimodular hypothesis fails")
        g_vals = (1.0 - mod).astype(complex)
    else:
        if not phi.analytic:
            raise ParameterError("analytic mode needs an analytic phi")
        try:
            outer = OuterSpec(BoundaryFunction(grid, np.maximum(1.0 - mod, 0.0)))
        except LogIntegrabilityError as exc:
            raise LogIntegrabilityError(
                f"log(1 - |phi|) is not integrable; phi behaves like an extreme point of ball(H^inf): {exc}"
            ) from exc
        g_vals = outer.boundary_values(grid)
    g = BoundaryFunction(grid, g_vals)
    phi1 = BoundaryFunction(grid, vals + g_vals)
    phi2 = BoundaryFunction(grid, vals - g_vals)
    if B is None:
        B = build_extremal_blaschke(Modulus(phi), K, grid=grid).blaschke
    b = Blaschke(B).sample(grid).values
    f = b * vals
    bp1, bp2 = b * phi1.values, b * phi2.values
    midpoint = float(np.max(np.abs(f - 0.5 * (bp1 + bp2))))
    diff = np.abs(bp1 - bp2)
    modulus = float(np.max(np.abs(diff - 2.0 * (1.0 - mod))))
    sups = (phi1.sup_norm(), phi2.sup_norm())
    norms = tuple(garsia_norm(BoundaryFunction(grid, v), cfg).lower_bound for v in (bp1, bp2))
    return Decomposition(
        B, phi1, phi2, g, mode, midpoint, modulus, sups, norms, float(diff.max() - diff.min()),
        {"log_integral_one_minus_abs_phi": float(np.mean(np.log(np.maximum(1.0 - mod, 1e-300))))},
    )


def lipschitz_garsia_norm(
    f, alpha: float, cfg: SearchConfig | None = None, grid: CircleGrid | None = None
) -> NormEstimate:
    """``sup_z Phi_f(z)^{1/2} / (1 - |z|)^alpha`` for ``0 < alpha < 1/2``.

    Examples
    --------
    >>> from garsia_kit.specs import Identity
    >>> est = lipschitz_garsia_norm(Identity(), 0.25)
    >>> round(est.lower_bound, 6), round(est.argmax.r, 3)
    (1.04339, 0.333)
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 0.5:
        raise ParameterError(f"alpha must lie in (0, 1/2), got {alpha}")
    cfg = cfg or SearchConfig()

    def weight(r):
        return (1.0 - np.asarray(r)) ** (-2.0 * alpha)

    est = _search(PhiEvaluator(f, grid), cfg, weight)
    est.search_log["alpha"] = alpha
    return est


def inner_characterization_experiment(
    h: FunctionSpec,
    B: BlaschkeSpec,
    cfg: SearchConfig | None = None,
    grid: CircleGrid | None = None,
) -> dict:
    """Classify ``B h`` as an extreme point (``h`` inner) or give its midpoint decomposition."""
    grid = grid or CircleGrid()
    cfg = cfg or SearchConfig()
    if not B.zeros:
        raise ParameterError("B must be a nonconstant Blaschke product")
    if abs(sup_norm(h, grid) - 1.0) > 1e-9:
        raise PreconditionError("grid sup |h| must equal 1 within 1e-9")
    if h.is_inner_like():
        dev = 0.0
    else:
        dev = float(np.max(np.abs(np.abs(h.sample(grid).values) - 1.0)))
    report: dict = {"unimodular_deviation": dev}
    f = Product([Blaschke(B), h])
    if dev <= 1e-6:
        est = garsia_norm(f, cfg, grid)
        probe = extreme_probe(f, None, cfg, grid) if est.attained is Verdict.ATTAINED else None
        ok = est.attained is Verdict.ATTAINED and abs(est.lower_bound - 1.0) <= 1e-6
        ok = ok and probe is not None and not any(probe.violations)
        report.update(
            branch="inner",
            has_zero=True,
            norm=est.to_dict(),
            probe=None if probe is None else probe.to_dict(),
            verdict="extreme" if ok else "Inconclusive",
        )
        return report
    try:
        dec = nonextreme_decompose(h, "analytic", B=B, cfg=cfg, grid=grid)
    except (LogIntegrabilityError, PreconditionError, ParameterError) as exc:
        report.update(branch="none", verdict="Inconclusive", reason=str(exc))
        return report
    report.update(branch="non-extreme", decomposition=dec.to_dict(), verdict="non-extreme" if dec.valid else "Inconclusive")
    return report
