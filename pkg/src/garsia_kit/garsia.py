"""The Garsia function, the Garsia norm and norm attainment.

``Phi_f(z) = P(|f|^2)(z) - |Pf(z)|^2`` is the Poisson-averaged variance of
``f`` seen from ``z``.  Two evaluation routes exist:

``exact``
    available for many :class:`~garsia_kit.specs.FunctionSpec` trees (inner
    factors, polynomials, outer functions with polynomial or step moduli,
    indicators of arcs); no quadrature is involved.
``numeric``
    for sampled data: both Poisson integrals are computed from the grid
    samples, by kernel quadrature where it is resolved and spectrally beyond.

The supremum over the open disk is searched by a coarse polar grid, a
multistart coordinate ascent and radial probes at ``r = 1 - 2**-m``; the
result is a certified lower bound plus a three-valued attainment verdict.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from .boundary import TWO_PI, BoundaryFunction, CircleGrid
from .errors import AccuracyError, NumericalConsistencyError, ParameterError
from .poisson import DiskPoint, as_complex, extend, extend_quadrature, poisson_kernel, poisson_on_circle
from .specs import FunctionSpec, Outer, exact_parts
from .factorization import StepModulus

__all__ = [
    "NormEstimate",
    "PhiEvaluator",
    "SearchConfig",
    "Verdict",
    "extremal_gap",
    "garsia_norm",
    "is_norm_attaining",
    "phi",
    "phi_oracle",
    "sup_norm",
    "superharmonic_check",
    "superharmonic_slack",
]

NEG_TOL = 1e-12


class Verdict(str, Enum):
    ATTAINED = "Attained"
    NOT_ATTAINED = "NotAttained"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("GARSIA_THREADS", "1")))
    except ValueError:
        return 1


class PhiEvaluator:
    """Vectorized ``Phi_f`` on a fixed route.

    Parameters
    ----------
    f : FunctionSpec or BoundaryFunction
        Function to analyse.
    grid : CircleGrid, optional
        Grid used to sample specs on the numeric route (default ``2**14``).
    method : {"auto", "exact", "numeric"}
        ``auto`` takes the exact route whenever the spec admits one.
    """

    def __init__(self, f, grid: CircleGrid | None = None, method: str = "auto"):
        if method not in ("auto", "exact", "numeric"):
            raise ParameterError(f"unknown method {method!r}")
        self.exact = None
        if isinstance(f, FunctionSpec) and method != "numeric":
            self.exact = exact_parts(f)
            if self.exact is None and method == "exact":
                raise ParameterError("no closed-form route for this spec")
        if isinstance(f, BoundaryFunction):
            if method == "exact":
                raise ParameterError("sampled data only support the numeric route")
            grid = f.grid
        self.grid = grid or CircleGrid()
        self.spec = f if isinstance(f, FunctionSpec) else None
        self._samples = f if isinstance(f, BoundaryFunction) else None
        self.method = self.exact.route if self.exact is not None else "numeric"
        self.sup_sq = sup_norm(f, self.grid) ** 2
        # grid data carry no information past the resolved radius
        self.r_limit = None if self.method == "exact" else self.grid.r_quad_max

    @property
    def samples(self) -> BoundaryFunction:
        if self._samples is None:
            self._samples = self.spec.sample(self.grid)
        return self._samples

    @property
    def modsq(self) -> BoundaryFunction:
        s = self.samples
        key = "modsq"
        if key not in s._cache:
            s._cache[key] = BoundaryFunction(s.grid, np.abs(s.values) ** 2)
        return s._cache[key]

    def _clamp(self, v):
        v = np.asarray(v, dtype=float)
        tol = NEG_TOL * max(1.0, self.sup_sq)
        if np.any(v < -tol):
            raise NumericalConsistencyError(
                f"Phi = {float(v.min()):.3e} is negative beyond roundoff ({self.method} route)"
            )
        return np.maximum(v, 0.0)

    def __call__(self, z):
        z = as_complex(z)
        if self.exact is not None:
            raw = self.exact.phi(z)
        else:
            raw = np.real(extend(self.modsq, z)) - np.abs(extend(self.samples, z)) ** 2
        out = self._clamp(raw)
        return float(out) if np.ndim(z) == 0 else out

    def key(self, z):
        """Secondary ordering key (``-log |f(z)|^2`` for inner-like data, else 0)."""
        z = as_complex(z)
        if self.exact is not None:
            d = self.exact.log_deficit(z)
            if d is not None:
                return -np.asarray(d, dtype=float)
        return np.zeros(np.shape(z))

    def ring(self, r: float, n_theta: int):
        """``Phi`` at ``r e^{2 pi i j / n_theta}``; one FFT pair on the numeric route."""
        theta = TWO_PI * np.arange(n_theta) / n_theta
        if self.exact is not None or self.grid.n % n_theta or r == 0.0:
            return self(r * np.exp(1j * theta))
        stride = self.grid.n // n_theta
        pm = np.real(poisson_on_circle(self.modsq, r))[::stride]
        pf = poisson_on_circle(self.samples, r)[::stride]
        return self._clamp(pm - np.abs(pf) ** 2)


def phi(f, z, grid: CircleGrid | None = None, method: str = "auto"):
    """``Phi_f(z) = P(|f|^2)(z) - |Pf(z)|^2``.

    Negative values down to ``-1e-12 * max(1, sup|f|^2)`` are clamped to zero;
    anything more negative raises :class:`NumericalConsistencyError`.

    Examples
    --------
    >>> from garsia_kit.specs import Identity
    >>> round(phi(Identity(), 0.5), 12)
    0.75
    """
    return PhiEvaluator(f, grid, method)(z)


def phi_oracle(f, z, grid: CircleGrid | None = None, check: bool = False):
    """Deviation form ``int |f - Pf(z)|^2 d omega_z`` by direct kernel quadrature.

    Independent of :func:`phi` in the order of operations; with ``check`` the
    two numeric routes are compared and a disagreement beyond
    ``1e-10 * (1 + sup|f|^2)`` raises :class:`NumericalConsistencyError`.
    """
    bf = f if isinstance(f, BoundaryFunction) else f.sample(grid or CircleGrid())
    z = as_complex(z)
    zs = np.atleast_1d(z)
    if np.any(np.abs(zs) > bf.grid.r_quad_max):
        raise AccuracyError("deviation-form quadrature needs |z| <= r_quad_max")
    w = np.atleast_1d(extend_quadrature(bf, zs))
    out = np.empty(zs.shape)
    for i, (zi, wi) in enumerate(zip(zs, w)):
        ker = poisson_kernel(zi, bf.grid.theta)
        out[i] = np.sum(ker * np.abs(bf.values - wi) ** 2) / bf.n
    if check:
        ref = np.atleast_1d(PhiEvaluator(bf)(zs))
        scale = 1.0 + bf.sup_norm() ** 2
        if np.max(np.abs(ref - out)) > 1e-10 * scale:
            raise NumericalConsistencyError(
                f"deviation-form quadrature disagrees with phi by {np.max(np.abs(ref - out)):.3e}"
            )
    return float(out[0]) if np.ndim(z) == 0 else out


def sup_norm(f, grid: CircleGrid | None = None) -> float:
    """``||f||_inf``: exact for inner-like specs and step moduli, grid sup otherwise."""
    if isinstance(f, BoundaryFunction):
        return f.sup_norm()
    if f.is_inner_like():
        return 1.0
    if isinstance(f, Outer) and isinstance(f.eta, StepModulus):
        return float(np.exp(max([f.eta.log_base, *f.eta.log_values])))
    return f.sample(grid or CircleGrid()).sup_norm()


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the supremum search.

    Attributes
    ----------
    n_r, n_theta : int
        Coarse polar grid (radii from 0 to ``r_max``, equispaced angles).
    r_max : float or None
        Interior search radius; ``None`` means the grid's ``r_quad_max``.
    max_iter : int
        Iteration cap for each coordinate ascent.
    step_floor : float
        Ascent stops once both steps fall below this size.
    multistart : int
        Number of coarse maxima used as ascent seeds.
    m_max : int
        Deepest radial probe ``r = 1 - 2**-m_max``.
    n_probe_angles : int
        Top angles refined at each probe radius.
    delta_att : float
        Attainment margin in radius.
    tie_tol : float
        Scores closer than this are compared by the secondary key, then by
        smaller radius, then by smaller angle.
    """

    n_r: int = 64
    n_theta: int = 256
    r_max: float | None = None
    max_iter: int = 400
    step_floor: float = 1e-11
    multistart: int = 6
    m_max: int = 24
    n_probe_angles: int = 3
    delta_att: float = 0.02
    tie_tol: float = 1e-14

    def __post_init__(self):
        for name in ("n_r", "n_theta", "max_iter", "multistart", "m_max", "n_probe_angles"):
            if int(getattr(self, name)) < 1:
                raise ParameterError(f"{name} must be positive")
        if self.r_max is not None and not 0.0 < self.r_max < 1.0:
            raise ParameterError(f"r_max must lie in (0, 1), got {self.r_max}")
        if not (self.delta_att > 0 and self.step_floor > 0 and self.tie_tol >= 0):
            raise ParameterError("delta_att and step_floor must be positive")

    def radius(self, grid: CircleGrid) -> float:
        return grid.r_quad_max if self.r_max is None else float(self.r_max)


@dataclass
class NormEstimate:
    """Outcome of a supremum search.

    ``lower_bound`` is ``sqrt`` of the best objective value found (for the
    plain Garsia norm, ``lower_bound**2 == phi(argmax)``).
    """

    lower_bound: float
    argmax: DiskPoint
    attained: Verdict
    boundary_trend: list
    search_log: dict = field(default_factory=dict)

    @property
    def objective_max(self) -> float:
        return self.lower_bound**2

    def to_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "argmax": {"r": self.argmax.r, "theta": self.argmax.theta},
            "attained": str(self.attained),
            "boundary_trend": [[r, v] for r, v in self.boundary_trend],
            "search_log": self.search_log,
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True, indent=2)

    def trend_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "max_phi"])
        for r, v in self.boundary_trend:
            w.writerow([format(r, ".17g"), format(v, ".17g")])
        return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


class _Objective:
    """Score ``Phi(z) * weight(r)`` with a tie-breaking key."""

    def __init__(self, ev: PhiEvaluator, weight: Callable | None):
        self.ev = ev
        self.weight = weight
        self.n_evals = 0

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        self.n_evals += z.size
        s = np.atleast_1d(self.ev(z))
        if self.weight is not None:
            return s * self.weight(np.abs(z)), np.zeros(z.shape)
        return s, np.atleast_1d(self.ev.key(z))

    def ring(self, r, n_theta):
        self.n_evals += n_theta
        s = np.atleast_1d(self.ev.ring(r, n_theta))
        z = r * np.exp(1j * TWO_PI * np.arange(n_theta) / n_theta)
        if self.weight is not None:
            return s * self.weight(np.full(n_theta, r)), np.zeros(n_theta)
        return s, np.atleast_1d(self.ev.key(z)) if self.ev.exact is not None else np.zeros(n_theta)


def _better(a, b, tie_tol) -> bool:
    """Strict comparison of ``(score, key)`` pairs."""
    if a[0] > b[0] + tie_tol * max(1.0, abs(b[0])):
        return True
    if a[0] < b[0] - tie_tol * max(1.0, abs(b[0])):
        return False
    return a[1] > b[1]


def _rank(scores, keys, r, idx, tie_tol):
    """Indices sorted best first under the documented tie rule."""
    best = np.max(scores)
    tol = tie_tol * max(1.0, abs(best))
    # bucket the scores so that values within tolerance compare by key
    bucket = np.floor((best - scores) / max(tol, 1e-300)) if tol > 0 else -scores
    bucket = np.where(np.isfinite(bucket), bucket, np.inf)
    return np.lexsort((idx, r, -np.nan_to_num(keys, posinf=1e308), bucket))


def _ascent(obj: _Objective, z0: complex, r_max: float, h_r: float, h_t: float, cfg: SearchConfig):
    r, t = abs(z0), float(np.angle(z0)) % TWO_PI
    cur = tuple(x[0] for x in obj(r * np.exp(1j * t)))
    for _ in range(cfg.max_iter):
        if h_r < cfg.step_floor and h_t < cfg.step_floor:
            break
        cand = [
            (min(r + h_r, r_max), t),
            (max(r - h_r, 0.0), t),
            (r, t + h_t),
            (r, t - h_t),
        ]
        pts = np.array([cr * np.exp(1j * ct) for cr, ct in cand])
        s, k = obj(pts)
        moved = False
        for j in range(4):
            if _better((s[j], k[j]), cur, cfg.tie_tol):
                r, t = cand[j][0], cand[j][1] % TWO_PI
                cur = (s[j], k[j])
                moved = True
                break
        if not moved:
            h_r *= 0.5
            h_t *= 0.5
    return r, t, cur


def _probe_ring(obj: _Objective, r: float, cfg: SearchConfig, seeds: list):
    s, k = obj.ring(r, cfg.n_theta)
    theta = TWO_PI * np.arange(cfg.n_theta) / cfg.n_theta
    order = _rank(s, k, np.full(s.shape, r), np.arange(s.size), cfg.tie_tol)
    best = (s[order[0]], k[order[0]], theta[order[0]])
    starts = [theta[i] for i in order[: cfg.n_probe_angles]] + list(seeds)
    h = TWO_PI / cfg.n_theta
    for t0 in starts:
        t, ht = t0, h
        cur = tuple(x[0] for x in obj(r * np.exp(1j * t)))
        for _ in range(cfg.max_iter):
            if ht < cfg.step_floor * max(1e-6, 1.0 - r):
                break
            ss, kk = obj(r * np.exp(1j * np.array([t + ht, t - ht])))
            if _better((ss[0], kk[0]), cur, cfg.tie_tol):
                t, cur = t + ht, (ss[0], kk[0])
            elif _better((ss[1], kk[1]), cur, cfg.tie_tol):
                t, cur = t - ht, (ss[1], kk[1])
            else:
                ht *= 0.5
        if _better(cur, best[:2], cfg.tie_tol):
            best = (cur[0], cur[1], t % TWO_PI)
    return best


def _search(ev: PhiEvaluator, cfg: SearchConfig, weight=None) -> NormEstimate:
    obj = _Objective(ev, weight)
    r_max = cfg.radius(ev.grid)
    radii = np.linspace(0.0, r_max, cfg.n_r)
    theta = TWO_PI * np.arange(cfg.n_theta) / cfg.n_theta

    workers = _workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda r: obj.ring(r, cfg.n_theta), radii))
    else:
        rows = [obj.ring(r, cfg.n_theta) for r in radii]
    S = np.concatenate([row[0] for row in rows])
    K = np.concatenate([row[1] for row in rows])
    R = np.repeat(radii, cfg.n_theta)
    T = np.tile(theta, cfg.n_r)
    IDX = np.tile(np.arange(cfg.n_theta), cfg.n_r)
    order = _rank(S, K, R, IDX, cfg.tie_tol)
    coarse_best = float(S[order[0]])

    seeds, seen = [], set()
    for i in order:
        cell = (int(round(R[i] / max(r_max, 1e-300) * (cfg.n_r - 1))) // 2, int(IDX[i]) // 4)
        if cell in seen:
            continue
        seen.add(cell)
        seeds.append(i)
        if len(seeds) >= cfg.multistart:
            break

    h_r = r_max / max(cfg.n_r - 1, 1)
    h_t = TWO_PI / cfg.n_theta
    interior = None
    for i in seeds:
        r, t, cur = _ascent(obj, R[i] * np.exp(1j * T[i]), r_max, h_r, h_t, cfg)
        cand = (cur[0], cur[1], r, t)
        if interior is None or _better(cand[:2], interior[:2], cfg.tie_tol):
            interior = cand
        elif not _better(interior[:2], cand[:2], cfg.tie_tol) and r < interior[2]:
            interior = cand

    # radial probes towards the circle along the best outer angles
    outer_row = rows[-1]
    top_angles = [theta[j] for j in np.argsort(-outer_row[0], kind="stable")[: cfg.n_probe_angles]]
    top_angles.append(interior[3])
    trend, trend_keys, trend_angles = [], [], []
    seeds_t = list(top_angles)
    probe_radii = [1.0 - 2.0**-m for m in range(1, cfg.m_max + 1)]
    if ev.r_limit is not None:
        probe_radii = [r for r in probe_radii if r < ev.r_limit] + [ev.r_limit]
    for r in probe_radii:
        s, k, t = _probe_ring(obj, r, cfg, seeds_t)
        trend.append((r, float(s)))
        trend_keys.append(float(k))
        trend_angles.append(float(t))
        seeds_t = [t]

    # probes inside the search disk are interior candidates as well
    for (r, s), k, t in zip(trend, trend_keys, trend_angles):
        if r <= r_max and _better((s, k), interior[:2], cfg.tie_tol):
            interior = (s, k, r, t)
    best = interior
    for (r, s), k, t in zip(trend, trend_keys, trend_angles):
        if _better((s, k), best[:2], cfg.tie_tol):
            best = (s, k, r, t)

    attained = _verdict(interior, trend, trend_keys, r_max, cfg)
    value = float(best[0])
    log = {
        "method": ev.method,
        "weighted": weight is not None,
        "r_max": r_max,
        "coarse_best": coarse_best,
        "interior_best": float(interior[0]),
        "interior_argmax": {"r": float(interior[2]), "theta": float(interior[3])},
        "trend_keys": trend_keys,
        "trend_angles": trend_angles,
        "n_evals": obj.n_evals,
        "probe_limit": ev.r_limit,
    }
    return NormEstimate(float(np.sqrt(value)), DiskPoint(min(best[2], np.nextafter(1.0, 0)), best[3]), attained, trend, log)


def _verdict(interior, trend, trend_keys, r_max, cfg) -> Verdict:
    pairs = [(s, k) for (_, s), k in zip(trend, trend_keys)]
    outside = [p for (r, _), p in zip(trend, pairs) if r > r_max] or pairs[-1:]
    tmax = outside[0]
    for p in outside[1:]:
        if _better(p, tmax, cfg.tie_tol):
            tmax = p
    inner_pair = interior[:2]
    if interior[2] <= r_max - cfg.delta_att and not _better(tmax, inner_pair, cfg.tie_tol):
        return Verdict.ATTAINED
    tail = pairs[-5:]
    rising = all(_better(b, a, cfg.tie_tol) for a, b in zip(tail, tail[1:]))
    if rising and _better(tmax, inner_pair, cfg.tie_tol):
        return Verdict.NOT_ATTAINED
    return Verdict.INCONCLUSIVE


def garsia_norm(f, cfg: SearchConfig | None = None, grid: CircleGrid | None = None, method: str = "auto") -> NormEstimate:
    """Lower bound for ``||f||_G = sup_z Phi_f(z)^{1/2}`` with an attainment verdict.

    The verdict is ``Attained`` when the interior maximizer sits at least
    ``delta_att`` inside ``r_max`` and no radial probe beats it;
    ``NotAttained`` when the last five probe values strictly increase and
    dominate the interior; ``Inconclusive`` otherwise.
    """
    cfg = cfg or SearchConfig()
    return _search(PhiEvaluator(f, grid, method), cfg)


def is_norm_attaining(f, cfg: SearchConfig | None = None, grid: CircleGrid | None = None) -> Verdict:
    """Attainment verdict of :func:`garsia_norm`."""
    return garsia_norm(f, cfg, grid).attained


def superharmonic_slack(f, z, rho: float, n_circle: int = 256, grid: CircleGrid | None = None, r_max: float | None = None):
    """``Phi_f(z)`` minus the mean of ``Phi_f`` over ``|w - z| = rho``."""
    ev = f if isinstance(f, PhiEvaluator) else PhiEvaluator(f, grid)
    z = complex(as_complex(z))
    lim = ev.grid.r_quad_max if r_max is None else r_max
    if not rho > 0 or abs(z) + rho > lim:
        raise ParameterError(f"circle |w - z| = {rho} leaves the search disk r <= {lim:.6f}")
    w = z + rho * np.exp(1j * TWO_PI * np.arange(n_circle) / n_circle)
    return ev(z) - float(np.mean(ev(w)))


def superharmonic_check(f, z, rho: float, n_circle: int = 256, grid: CircleGrid | None = None) -> bool:
    """True iff ``Phi_f(z) >= mean_{|w-z|=rho} Phi_f(w) - 1e-9``."""
    return superharmonic_slack(f, z, rho, n_circle, grid) >= -1e-9


def extremal_gap(f, cfg: SearchConfig | None = None, grid: CircleGrid | None = None) -> float:
    """``||f||_inf - ||f||_G`` lower-bound estimate; about 0 signals G-extremality."""
    est = garsia_norm(f, cfg, grid)
    return sup_norm(f, grid) - est.lower_bound
