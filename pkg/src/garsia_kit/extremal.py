"""G-extremality criteria, witness searches and the explicit constructions.

A bounded ``f`` is G-extremal when ``||f||_G = ||f||_inf``.  The criteria
checked here are limit statements along sequences ``z_n -> T``; numerically
they become ladder checks over a finite prefix of radii ``1 - 2**-m`` with
declared checkpoints (``tol_P``, ``L_min``, the ``|I|`` ladder).  Nothing in
this module certifies a limit; each verdict says what the finite prefix
shows.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .boundary import TWO_PI, ArcSet, BoundaryFunction, CircleGrid
from .errors import DegenerateInputError, LogIntegrabilityError, ParameterError
from .factorization import (
    BlaschkeSpec,
    OuterSpec,
    SingularSpec,
    StepModulus,
    max_modulus_set,
    outer_log_abs,
    spectrum,
)
from .garsia import PhiEvaluator, SearchConfig, garsia_norm, sup_norm
from .poisson import DiskPoint, as_complex, extend, harmonic_measure, poisson_on_circle
from .specs import (
    Blaschke,
    Constant,
    FunctionSpec,
    Identity,
    Modulus,
    Outer,
    Product,
    Scale,
    SingularInner,
)

__all__ = [
    "BlaschkeBuild",
    "EvidenceVerdict",
    "LadderConfig",
    "Section5Config",
    "Section5Result",
    "WitnessSequence",
    "build_extremal_blaschke",
    "check_inner_identity",
    "check_product_identity",
    "disk_algebra_test",
    "inner_factors",
    "outer_extremal_witness",
    "product_extremal_witness",
    "section5_build",
    "section5_csv",
    "section5_report",
]


class EvidenceVerdict(str, Enum):
    EVIDENCE = "Extremal-evidence"
    NO_EVIDENCE = "NoEvidence"

    def __str__(self):
        return self.value


@dataclass
class WitnessSequence:
    """Disk points with strictly increasing radii and named functionals."""

    points: list
    functionals: dict = field(default_factory=dict)
    verdict: EvidenceVerdict | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        radii = [p.r for p in self.points]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ParameterError("witness radii must be strictly increasing")
        for name, vals in self.functionals.items():
            if len(vals) != len(self.points):
                raise ParameterError(f"functional {name!r} has {len(vals)} values for {len(self.points)} points")

    @property
    def blaschke_sum(self) -> float:
        """``sum (1 - r_k)``, recorded as the summability certificate."""
        return float(sum(1.0 - p.r for p in self.points))

    def to_dict(self) -> dict:
        return {
            "verdict": None if self.verdict is None else str(self.verdict),
            "witnesses": [
                {"r": p.r, "theta": p.theta, **{k: float(v[i]) for k, v in self.functionals.items()}}
                for i, p in enumerate(self.points)
            ],
            "sum_one_minus_r": self.blaschke_sum,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _points(points) -> np.ndarray:
    return np.atleast_1d(as_complex(points))


# -- the inner identities ----------------------------------------------------


def check_inner_identity(I: FunctionSpec, points, method: str = "auto", grid: CircleGrid | None = None) -> float:
    """``max |Phi_I(z) - (1 - |I(z)|^2)|`` over ``points``.

    Examples
    --------
    >>> from garsia_kit.specs import Identity
    >>> check_inner_identity(Identity(), [0.0, 0.5, 0.3j]) < 1e-15
    True
    """
    if not I.analytic:
        raise ParameterError("the inner identity needs an analytic spec")
    z = _points(points)
    lhs = PhiEvaluator(I, grid, method)(z)
    rhs = 1.0 - np.abs(I.value(z)) ** 2
    return float(np.max(np.abs(lhs - rhs)))


def check_product_identity(
    I: FunctionSpec, F: FunctionSpec, points, method: str = "auto", grid: CircleGrid | None = None
) -> float:
    """``max |Phi_{IF}(z) - Phi_F(z) - |F(z)|^2 (1 - |I(z)|^2)|`` over ``points``."""
    if not (I.analytic and F.analytic):
        raise ParameterError("the product identity needs analytic I and F")
    z = _points(points)
    lhs = PhiEvaluator(Product([I, F]), grid, method)(z)
    rhs = PhiEvaluator(F, grid, method)(z) + np.abs(F.value(z)) ** 2 * (1.0 - np.abs(I.value(z)) ** 2)
    return float(np.max(np.abs(lhs - rhs)))


# -- inner factor extraction -------------------------------------------------


def inner_factors(I: FunctionSpec) -> tuple[BlaschkeSpec, SingularSpec]:
    """Split an inner spec into its Blaschke and atomic singular parts."""
    zeros: list = []
    atoms: list = []
    const = 1.0 + 0j

    def walk(node):
        nonlocal const
        if isinstance(node, Blaschke):
            zeros.extend(node.spec.zeros)
            const *= node.spec.const
        elif isinstance(node, SingularInner):
            atoms.extend(node.spec.atoms)
        elif isinstance(node, Identity):
            zeros.append(0j)
            const *= -1.0
        elif isinstance(node, Constant) and node.is_inner_like():
            const *= node.c
        elif isinstance(node, Product):
            for it in node.items:
                walk(it)
        elif isinstance(node, Scale) and abs(abs(node.c) - 1) < 1e-15:
            const *= node.c
            walk(node.spec)
        else:
            raise ParameterError(f"{type(node).__name__} is not an inner factor")

    walk(I)
    merged: dict = {}
    for t, m in atoms:
        key = round(t % TWO_PI, 15)
        merged[key] = merged.get(key, 0.0) + m
    return BlaschkeSpec(tuple(zeros), const / abs(const)), SingularSpec(tuple(merged.items()))


# -- witness searches --------------------------------------------------------


@dataclass(frozen=True)
class LadderConfig:
    """Radii ``1 - 2**-m`` for ``m = 1..m_max``, ``n_theta`` angles per radius.

    ``tol_P`` is the closeness required of the sup-norm functional, ``L_min``
    the checkpoint for ``P(log 1/eta)`` and ``ladder_I`` the exponent of the
    ``|I| <= 10**-ladder_I`` checkpoint.
    """

    m_max: int = 20
    n_theta: int = 1024
    tol_P: float = 1e-2
    L_min: float = 10.0
    ladder_I: int = 8

    def __post_init__(self):
        if self.m_max < 1 or self.n_theta < 8:
            raise ParameterError("m_max >= 1 and n_theta >= 8 are required")
        if not (0 < self.tol_P < 1 and self.L_min > 0 and self.ladder_I >= 1):
            raise ParameterError("tol_P in (0,1), L_min > 0 and ladder_I >= 1 are required")

    def radii(self) -> np.ndarray:
        return 1.0 - 2.0 ** -np.arange(1, self.m_max + 1, dtype=float)

    def angles(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n_theta) / self.n_theta


def _as_outer(eta) -> Outer:
    if isinstance(eta, Outer):
        return eta
    if isinstance(eta, OuterSpec):
        return Outer(eta.eta, floor=eta.floor)
    return Outer(eta)


def _poisson_eta(outer: Outer):
    """``z -> P eta(z)`` (closed form for step moduli, numeric otherwise)."""
    eta = outer.eta
    if isinstance(eta, StepModulus):
        base = np.exp(eta.log_base)

        def pe(z):
            out = base + np.zeros(np.shape(z))
            for (a, b), lv in zip(eta.arcs, eta.log_values):
                out = out + (np.exp(lv) - base) * harmonic_measure(z, ArcSet.from_pairs([(a, b)]))
            return out

        return pe
    spec = outer.outer_spec()
    grid = spec.eta.grid if isinstance(spec.eta, BoundaryFunction) else CircleGrid()
    bf = BoundaryFunction(grid, spec.eta_values(grid))
    return lambda z: np.real(extend(bf, z))


def _ring_functionals(outer: Outer, r: float, n_theta: int):
    """``(P eta, P log eta)`` on the ring ``r e^{2 pi i j / n_theta}`` or ``None``.

    Sampled moduli whose grid is a multiple of ``n_theta`` use one FFT per
    ring instead of pointwise quadrature.
    """
    if isinstance(outer.eta, StepModulus):
        return None
    spec = outer.outer_spec()
    grid = spec.eta.grid if isinstance(spec.eta, BoundaryFunction) else CircleGrid()
    if grid.n % n_theta:
        return None
    stride = grid.n // n_theta
    key = ("ring_data", grid)
    if key not in outer._outer:
        eta = BoundaryFunction(grid, spec.eta_values(grid))
        outer._outer[key] = (eta, spec.log_eta(grid))
    eta, log_eta = outer._outer[key]
    pe = np.real(poisson_on_circle(eta, r))[::stride]
    pl = np.real(poisson_on_circle(log_eta, r))[::stride]
    return pe, pl


def outer_extremal_witness(eta, cfg: LadderConfig | None = None, extra_points: Sequence | None = None) -> WitnessSequence:
    """Ladder search for points with ``P eta -> ||eta||`` and ``P(log 1/eta) -> infinity``.

    At each radius the angle maximizing
    ``min(P eta / ||eta||, min(P(log 1/eta) / L_min, 1))`` is kept (smallest
    angle index on ties).  ``extra_points`` (for instance the explicit
    Section-5 points) join the candidate set.  The verdict is
    ``Extremal-evidence`` iff some witness has ``P eta >= (1 - tol_P) ||eta||``
    together with ``P(log 1/eta) >= L_min``.
    """
    cfg = cfg or LadderConfig()
    outer = _as_outer(eta)
    spec = outer.outer_spec()
    eta_sup = sup_norm(outer) if isinstance(outer.eta, StepModulus) else float(np.max(spec.eta_values(CircleGrid())))
    if not eta_sup > 0:
        raise LogIntegrabilityError("eta vanishes identically")
    pe = _poisson_eta(outer)

    def functionals(z):
        p = pe(z) / eta_sup
        lg = -np.asarray(outer_log_abs(spec, z))
        return p, lg, np.minimum(p, np.minimum(lg / cfg.L_min, 1.0))

    cands = []
    theta = cfg.angles()
    for r in cfg.radii():
        ring = _ring_functionals(outer, r, cfg.n_theta)
        if ring is None:
            p, lg, obj = functionals(r * np.exp(1j * theta))
        else:
            p, lg = ring[0] / eta_sup, -ring[1]
            obj = np.minimum(p, np.minimum(lg / cfg.L_min, 1.0))
        j = int(np.argmax(obj))
        cands.append((r, theta[j], p[j], lg[j]))
    for w in extra_points or []:
        w = complex(as_complex(w))
        p, lg, _ = functionals(np.array([w]))
        cands.append((abs(w), float(np.angle(w)) % TWO_PI, p[0], lg[0]))
    cands.sort(key=lambda c: c[0])
    kept = []
    for c in cands:  # keep radii strictly increasing
        if kept and c[0] <= kept[-1][0]:
            if min(c[2], c[3] / cfg.L_min) > min(kept[-1][2], kept[-1][3] / cfg.L_min):
                kept[-1] = c
            continue
        kept.append(c)
    ok = [c[2] >= 1.0 - cfg.tol_P and c[3] >= cfg.L_min for c in kept]
    ws = WitnessSequence(
        [DiskPoint(c[0], c[1]) for c in kept],
        {"P_eta": [c[2] * eta_sup for c in kept], "P_log_inv_eta": [c[3] for c in kept]},
        EvidenceVerdict.EVIDENCE if any(ok) else EvidenceVerdict.NO_EVIDENCE,
        {"eta_sup": eta_sup, "tol_P": cfg.tol_P, "L_min": cfg.L_min, "max_P_log_inv_eta": float(max(c[3] for c in kept))},
    )
    return ws


def product_extremal_witness(F: FunctionSpec, I: FunctionSpec, cfg: LadderConfig | None = None) -> WitnessSequence:
    """Ladder search for points with ``|F| -> ||F||_inf`` and ``I -> 0``.

    Candidates are, per radius, the angle maximizing
    ``min(|F|/||F||, min(-log10 |I| / ladder_I, 1))``, plus the zeros of
    ``I``.  ``Extremal-evidence`` iff some witness has
    ``|F| >= (1 - tol_P) ||F||`` and ``|I| <= 10**-ladder_I``.
    """
    cfg = cfg or LadderConfig()
    if not (F.analytic and I.analytic):
        raise ParameterError("F and I must be analytic specs")
    b, _ = inner_factors(I)
    f_sup = sup_norm(F)
    if not f_sup > 0:
        raise DegenerateInputError("F vanishes identically")

    def functionals(z):
        fa = np.abs(F.value(z)) / f_sup
        li = np.asarray(I.log_abs(z), dtype=float) / np.log(10.0)
        return fa, li, np.minimum(fa, np.minimum(-li / cfg.ladder_I, 1.0))

    cands = []
    theta = cfg.angles()
    for r in cfg.radii():
        z = r * np.exp(1j * theta)
        fa, li, obj = functionals(z)
        j = int(np.argmax(obj))
        cands.append((r, theta[j], fa[j], li[j]))
    for a in b.zeros:
        fa, li, _ = functionals(np.array([a]))
        cands.append((abs(a), float(np.angle(a)) % TWO_PI, fa[0], li[0]))
    cands.sort(key=lambda c: (c[0], -min(c[2], -c[3] / cfg.ladder_I)))
    kept = []
    for c in cands:
        if kept and c[0] <= kept[-1][0]:
            continue
        kept.append(c)
    ok = [c[2] >= 1.0 - cfg.tol_P and c[3] <= -cfg.ladder_I for c in kept]
    return WitnessSequence(
        [DiskPoint(min(c[0], np.nextafter(1.0, 0)), c[1]) for c in kept],
        {"abs_F": [c[2] * f_sup for c in kept], "abs_I": [10.0 ** c[3] for c in kept]},
        EvidenceVerdict.EVIDENCE if any(ok) else EvidenceVerdict.NO_EVIDENCE,
        {"F_sup": f_sup, "tol_P": cfg.tol_P, "ladder_I": cfg.ladder_I},
    )


def disk_algebra_test(
    F: FunctionSpec,
    I: FunctionSpec,
    tol_angle: float = 1e-2,
    tol: float = 1e-6,
    grid: CircleGrid | None = None,
) -> bool:
    """``M(F) cap sigma(I) != empty`` with angular tolerance ``tol_angle``."""
    b, s = inner_factors(I)
    sig = spectrum(b, s, tol_angle=tol_angle)
    mm = max_modulus_set(F, tol=tol, grid=grid or CircleGrid())
    if mm.whole_disk and not sig.empty:
        return True
    return any(mm.contains_angle(t, tol_angle) for t in sig.boundary_angles)


# -- the extremal Blaschke construction ---------------------------------------


@dataclass
class BlaschkeBuild:
    blaschke: BlaschkeSpec
    witnesses: WitnessSequence
    max_residual: float | None

    def to_dict(self) -> dict:
        out = self.witnesses.to_dict()
        out["zeros"] = [[abs(a), float(np.angle(a)) % TWO_PI] for a in self.blaschke.zeros]
        out["truncation_count"] = self.blaschke.truncation_count
        out["max_residual"] = self.max_residual
        return out


def build_extremal_blaschke(
    eta: FunctionSpec,
    K: int = 12,
    phi: FunctionSpec | None = None,
    n_theta: int = 1024,
    grid: CircleGrid | None = None,
) -> BlaschkeBuild:
    """Zeros ``z_n`` at radii ``1 - 2**-n`` maximizing ``P(eta^2)`` over an angle grid.

    ``eta`` is a spec whose modulus is the boundary function ``eta``; it is
    normalized to ``||eta||_inf = 1``.  When ``phi`` (analytic, ``|phi| = eta``
    on the circle) is given, ``Phi_{B phi}(z_n)`` is evaluated and compared
    with ``P(eta^2)(z_n)``; the largest discrepancy is ``max_residual``.
    """
    if K < 1:
        raise ParameterError("K must be at least 1")
    grid = grid or CircleGrid()
    mod = eta if isinstance(eta, Modulus) else Modulus(eta)
    sup = sup_norm(mod, grid)
    if not sup > 0:
        raise DegenerateInputError("eta vanishes identically")
    form = mod.modsq_form()
    if form is not None:
        p_eta2 = lambda z: np.real(form.poisson(z)) / sup**2  # noqa: E731
    else:
        sq = BoundaryFunction(grid, np.abs(mod.sample(grid).values) ** 2)
        p_eta2 = lambda z: np.real(extend(sq, z)) / sup**2  # noqa: E731
    theta = TWO_PI * np.arange(n_theta) / n_theta
    zeros, vals = [], []
    for n in range(1, K + 1):
        r = 1.0 - 2.0**-n
        v = p_eta2(r * np.exp(1j * theta))
        j = int(np.argmax(v))  # first index wins ties
        zeros.append(DiskPoint(r, theta[j]))
        vals.append(float(v[j]))
    B = BlaschkeSpec(tuple(zeros))
    funcs = {"P_eta2": vals}
    residual = None
    if phi is not None:
        z = np.array([p.z for p in zeros])
        ev = PhiEvaluator(Product([Blaschke(B), Scale(1.0 / sup, phi)]), grid)
        phis = np.atleast_1d(ev(z))
        funcs["Phi_Bphi"] = phis.tolist()
        residual = float(np.max(np.abs(phis - np.asarray(vals))))
    ws = WitnessSequence(zeros, funcs, None, {"eta_sup": sup, "truncation_count": K})
    return BlaschkeBuild(B, ws, residual)


# -- Section 5 ------------------------------------------------------------------


@dataclass(frozen=True)
class Section5Config:
    """Depth ``K`` and the sequences ``l_k``, ``eps_k``, ``d_k`` (``k = 1..K``).

    Defaults are ``l_k = eps_k = 2**-k`` and ``d_k = k**-0.5 * 2**-k``.
    """

    K: int = 12
    l: tuple | None = None
    eps: tuple | None = None
    d: tuple | None = None

    def __post_init__(self):
        if isinstance(self.K, bool) or not isinstance(self.K, (int, np.integer)) or self.K < 1:
            raise ParameterError(f"K must be a positive integer, got {self.K!r}")
        if self.K > 48:
            raise ParameterError("K > 48 puts arc lengths below double resolution near t = 2")
        for name in ("l", "eps", "d"):
            seq = getattr(self, name)
            if seq is not None:
                seq = tuple(float(v) for v in seq)
                if len(seq) != self.K:
                    raise ParameterError(f"{name} needs exactly K = {self.K} entries")
                if not all(0.0 < v < 1.0 for v in seq):
                    raise ParameterError(f"{name} entries must lie in (0, 1)")
                object.__setattr__(self, name, seq)
        if sum(self.lengths) > np.pi:
            raise ParameterError(f"sum of l_k is {sum(self.lengths):.6g} > pi")

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.K + 1, dtype=float)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.l) if self.l is not None else 2.0**-self.ks

    @property
    def epsilons(self) -> np.ndarray:
        return np.asarray(self.eps) if self.eps is not None else 2.0**-self.ks

    @property
    def depths(self) -> np.ndarray:
        return np.asarray(self.d) if self.d is not None else self.ks**-0.5 * 2.0**-self.ks

    def endpoints(self):
        """``alpha_1 = 0``, ``beta_k = alpha_k + l_k``, ``alpha_{k+1} = beta_k + l_k``."""
        alpha, beta = [0.0], []
        for lk in self.lengths:
            beta.append(alpha[-1] + lk)
            alpha.append(beta[-1] + lk)
        return np.asarray(alpha), np.asarray(beta)


@dataclass
class Section5Result:
    config: Section5Config
    eta_step: StepModulus
    outer: Outer
    I_arcs: list
    J_arcs: list
    witnesses: WitnessSequence
    log_integral_exact: float
    log_integral_grid: float
    grid: CircleGrid

    def eta(self) -> BoundaryFunction:
        return BoundaryFunction(self.grid, self.eta_step.sample(self.grid))


def section5_build(cfg: Section5Config | None = None, grid: CircleGrid | None = None) -> Section5Result:
    """Arcs ``I_k``, ``J_k``, the step modulus ``eta`` and the points ``z_k``."""
    cfg = cfg or Section5Config()
    grid = grid or CircleGrid()
    alpha, beta = cfg.endpoints()
    I_arcs = [(alpha[k], beta[k]) for k in range(cfg.K)]
    J_arcs = [(beta[k], alpha[k + 1]) for k in range(cfg.K)]
    eps = cfg.epsilons
    eta = StepModulus(J_arcs, np.log(eps), 0.0)
    t = 0.5 * (alpha[:-1] + beta)
    pts = [DiskPoint(1.0 - dk, tk) for dk, tk in zip(cfg.depths, t)]
    exact = float(np.sum(cfg.lengths * np.log(1.0 / eps)) / TWO_PI)
    grid_val = float(np.mean(-eta.log_sample(grid)))
    ws = WitnessSequence(pts, {}, None, {"t_k": t.tolist()})
    return Section5Result(cfg, eta, Outer(eta), I_arcs, J_arcs, ws, exact, grid_val, grid)


def section5_report(cfg: Section5Config | None = None, result: Section5Result | None = None) -> dict:
    """Per-k rows ``(k, P eta(z_k), P(log 1/eta)(z_k), omega(I_k), omega(J_k) log(1/eps_k))``.

    All quantities use closed-form harmonic measure of arcs; ``trends`` holds
    one strict-monotonicity flag per column (over all ``k`` and over ``k >= 3``).
    """
    res = result or section5_build(cfg)
    cfg = res.config
    z = np.array([p.z for p in res.witnesses.points])
    eps = cfg.epsilons
    omega_J = np.array([[harmonic_measure(zk, ArcSet.from_pairs([J])) for J in res.J_arcs] for zk in z])
    p_eta = 1.0 - omega_J @ (1.0 - eps)
    p_log = omega_J @ np.log(1.0 / eps)
    omega_I = np.array([harmonic_measure(zk, ArcSet.from_pairs([Ik])) for zk, Ik in zip(z, res.I_arcs)])
    lower = np.diag(omega_J) * np.log(1.0 / eps)
    rows = [
        (k + 1, float(p_eta[k]), float(p_log[k]), float(omega_I[k]), float(lower[k])) for k in range(cfg.K)
    ]
    cols = {"P_eta": p_eta, "P_log_inv_eta": p_log, "omega_I": omega_I, "omega_J_log_inv_eps": lower}

    def rising(v):
        return bool(np.all(np.diff(v) > 0))

    trends = {name: {"all": rising(v), "k>=3": rising(v[2:])} for name, v in cols.items()}
    return {
        "rows": rows,
        "trends": trends,
        "log_integral_exact": res.log_integral_exact,
        "log_integral_grid": res.log_integral_grid,
        "log_integral_limit": float(np.log(2.0) / np.pi),
        "grid_n": res.grid.n,
    }


SECTION5_COLUMNS = ("k", "P_eta", "P_log_inv_eta", "omega_I", "omega_J_log_inv_eps")


def section5_csv(report: dict) -> str:
    """Five-column CSV with a header row, ``\\n`` line ends and 17 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SECTION5_COLUMNS)
    for k, *vals in report["rows"]:
        w.writerow([k, *(format(v, ".17g") for v in vals)])
    return buf.getvalue()
