"""Blaschke products, atomic singular inner functions and outer functions.

Inner factors are evaluated directly from their zeros and atoms.  Outer
functions are built from a boundary modulus ``eta`` through the Herglotz
integral of ``log eta``; three representations of ``eta`` are supported:

* a sampled :class:`~garsia_kit.boundary.BoundaryFunction` (spectral route),
* :class:`PolynomialModulus`, ``eta = |p|`` for a polynomial ``p`` (closed form
  by reflecting the zeros of ``p`` that lie inside the disk),
* :class:`StepModulus`, a piecewise-constant ``eta`` on finitely many arcs
  (closed form through arc Herglotz integrals).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .boundary import TWO_PI, ArcSet, BoundaryFunction, CircleGrid
from .errors import DomainError, LogIntegrabilityError, ParameterError
from .poisson import DiskPoint, arc_herglotz, as_complex, herglotz_fourier

__all__ = [
    "BlaschkeSpec",
    "MaxModulusSet",
    "OuterSpec",
    "PolynomialModulus",
    "SingularSpec",
    "SpectrumSet",
    "StepModulus",
    "blaschke_eval",
    "blaschke_log_abs",
    "inner_eval",
    "max_modulus_set",
    "outer_eval",
    "outer_log_abs",
    "outer_modulus",
    "singular_eval",
    "singular_log_abs",
    "spectrum",
]


def _to_point(z) -> complex:
    if isinstance(z, DiskPoint):
        return z.z
    if isinstance(z, (list, tuple)) and len(z) == 2:
        r, theta = (float(v) for v in z)
        return DiskPoint(r, theta).z
    w = complex(z)
    if not abs(w) < 1.0:
        raise ParameterError(f"Blaschke zero {w} is not inside the unit disk")
    return w


def _eval_points(z):
    """Like :func:`as_complex` but admits points on the closed disk."""
    if isinstance(z, DiskPoint):
        return z.z
    if isinstance(z, (list, tuple)):
        z = [p.z if isinstance(p, DiskPoint) else p for p in z]
    return complex(z) if np.ndim(z) == 0 else np.asarray(z, dtype=complex)


@dataclass(frozen=True)
class BlaschkeSpec:
    """Finite Blaschke product; zeros may repeat.  ``const`` is unimodular."""

    zeros: tuple = ()
    const: complex = 1.0 + 0.0j

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(_to_point(a) for a in self.zeros))
        c = complex(self.const)
        if abs(abs(c) - 1.0) > 1e-12:
            raise ParameterError(f"unimodular constant has modulus {abs(c)}")
        object.__setattr__(self, "const", c)

    @property
    def truncation_count(self) -> int:
        return len(self.zeros)

    def blaschke_sum(self) -> float:
        """``sum (1 - |z_j|)``, finite for every finite list."""
        return float(sum(1.0 - abs(a) for a in self.zeros))


def _blaschke_factor(a: complex, z):
    if a == 0:
        return -z
    # |a|/a via the angle stays unimodular even for denormal a
    return np.exp(-1j * np.angle(a)) * (a - z) / (1.0 - np.conj(a) * z)


def blaschke_eval(spec: BlaschkeSpec, z):
    """``c prod_j (|a_j|/a_j)(a_j - z)/(1 - conj(a_j) z)``, factor by factor.

    ``z`` may be a DiskPoint, a complex number or array on the closed disk.
    A zero at the origin contributes the factor ``-z``.
    """
    z = _eval_points(z)
    out = spec.const * np.ones_like(z, dtype=complex)
    for a in spec.zeros:
        out = out * _blaschke_factor(a, z)
    return complex(out) if np.ndim(out) == 0 else out


def blaschke_log_abs(spec: BlaschkeSpec, z):
    """``log |B(z)|`` accumulated in log form (no underflow for many zeros)."""
    z = _eval_points(z)
    out = np.zeros(np.shape(z))
    with np.errstate(divide="ignore"):
        for a in spec.zeros:
            out = out + np.log(np.abs(a - z)) - np.log(np.abs(1.0 - np.conj(a) * z))
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SingularSpec:
    """Atomic singular measure: ``(angle, mass)`` pairs with positive masses."""

    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(t) % TWO_PI, float(m)) for t, m in self.atoms)
        for t, m in atoms:
            if not m > 0:
                raise ParameterError(f"atom mass must be positive, got {m}")
        angles = sorted(t for t, _ in atoms)
        if any(b - a < 1e-15 for a, b in zip(angles, angles[1:])):
            raise ParameterError("atom angles must be distinct")
        object.__setattr__(self, "atoms", atoms)

    @property
    def total_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))


def _herglotz_atoms(spec: SingularSpec, z):
    out = np.zeros(np.shape(z), dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        for t, m in spec.atoms:
            zeta = np.exp(1j * t)
            out = out + m * (zeta + z) / (zeta - z)
    return out


def singular_eval(spec: SingularSpec, z):
    """``exp(-sum_j m_j (zeta_j + z)/(zeta_j - z))``.

    On the circle the value at an atom is undefined; it is reported as 1.
    """
    z = _eval_points(z)
    h = _herglotz_atoms(spec, z)
    bad = ~np.isfinite(h)
    out = np.exp(-np.where(bad, 0.0, h))
    return complex(out) if np.ndim(out) == 0 else out


def singular_log_abs(spec: SingularSpec, z):
    """``log |S(z)| = -sum_j m_j P(z, zeta_j)``; exact for arbitrarily large masses."""
    z = as_complex(z)
    out = -_herglotz_atoms(spec, z).real
    return float(out) if np.ndim(out) == 0 else out


def inner_eval(b: BlaschkeSpec, s: SingularSpec, z):
    """``c B(z) S(z)``."""
    out = np.asarray(blaschke_eval(b, z)) * np.asarray(singular_eval(s, z))
    return complex(out) if np.ndim(out) == 0 else out


# -- outer functions -----------------------------------------------------------


class PolynomialModulus:
    """``eta = |p(zeta)|`` for a polynomial given by ascending coefficients."""

    def __init__(self, coeffs: Sequence[complex]):
        c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
        if c.size == 0:
            raise LogIntegrabilityError("eta = |0| is not log-integrable")
        self.coeffs = c
        self.roots = np.roots(c[::-1]) if c.size > 1 else np.array([], dtype=complex)
        self.lead = c[-1]

    def __repr__(self):
        return f"PolynomialModulus({self.coeffs.tolist()!r})"

    def sample(self, grid: CircleGrid) -> np.ndarray:
        return np.abs(np.polyval(self.coeffs[::-1], grid.nodes))

    def log_mean(self) -> float:
        out = np.log(abs(self.lead))
        for a in self.roots:
            if abs(a) >= 1.0:
                out += np.log(abs(a))
        return float(out)

    def log_herglotz(self, z):
        z = as_complex(z)
        out = self.log_mean() + np.zeros(np.shape(z), dtype=complex)
        for a in self.roots:
            if abs(a) >= 1.0:
                out = out + np.log(1.0 - z / a)
            else:
                out = out + np.log(1.0 - np.conj(a) * z)
        return complex(out) if np.ndim(out) == 0 else out

    def outer_coefficients(self) -> np.ndarray:
        """Ascending coefficients of the outer polynomial with modulus ``eta``."""
        poly = np.array([1.0 + 0j])
        for a in self.roots:
            fac = [1.0, -1.0 / a] if abs(a) >= 1.0 else [1.0, -np.conj(a)]
            poly = np.convolve(poly, fac)
        return np.exp(self.log_mean()) * poly


class StepModulus:
    """Piecewise-constant ``eta``: ``base`` off the arcs, ``exp(log_values[i])`` on arc ``i``.

    Values are carried as logarithms so very small levels (``log(1/eps)`` in
    the thousands) stay representable.
    """

    def __init__(self, arcs: Sequence[Sequence[float]], log_values: Sequence[float], log_base: float = 0.0):
        self.arcs = [tuple(map(float, a)) for a in arcs]
        self.log_values = np.asarray(log_values, dtype=float)
        self.log_base = float(log_base)
        if len(self.arcs) != self.log_values.size:
            raise ParameterError("one log value per arc is required")
        if not np.all(np.isfinite(self.log_values)) or not np.isfinite(self.log_base):
            raise LogIntegrabilityError("step modulus has a zero level")
        ArcSet.from_pairs(self.arcs) if self.arcs else None

    def __repr__(self):
        return f"StepModulus({len(self.arcs)} arcs)"

    def sample(self, grid: CircleGrid) -> np.ndarray:
        out = np.full(grid.n, self.log_base)
        for (a, b), lv in zip(self.arcs, self.log_values):
            out[ArcSet.from_pairs([(a, b)]).contains(grid.theta)] = lv
        return np.exp(out)

    def log_sample(self, grid: CircleGrid) -> np.ndarray:
        out = np.full(grid.n, self.log_base)
        for (a, b), lv in zip(self.arcs, self.log_values):
            out[ArcSet.from_pairs([(a, b)]).contains(grid.theta)] = lv
        return out

    def log_mean(self) -> float:
        out = self.log_base
        for (a, b), lv in zip(self.arcs, self.log_values):
            out += (lv - self.log_base) * (b - a) / TWO_PI
        return float(out)

    def log_herglotz(self, z):
        z = as_complex(z)
        out = self.log_base + np.zeros(np.shape(z), dtype=complex)
        for (a, b), lv in zip(self.arcs, self.log_values):
            out = out + (lv - self.log_base) * arc_herglotz(z, a, b)
        return complex(out) if np.ndim(out) == 0 else out


def _longest_circular_run(mask: np.ndarray) -> int:
    if mask.all():
        return mask.size
    if not mask.any():
        return 0
    # rotate so the array starts just after a False entry
    start = int(np.argmin(mask)) + 1
    m = np.roll(mask, -start)
    best = run = 0
    for v in m:
        run = run + 1 if v else 0
        best = max(best, run)
    return best


def _zero_nodes(eta: np.ndarray, floor: float) -> np.ndarray:
    """Nodes sitting on a zero of ``eta``: floored, or tiny next to both neighbours."""
    nb = np.minimum(np.roll(eta, 1), np.roll(eta, -1))
    return (eta <= floor) | (eta < 1e-6 * nb)


def _fill_zero_nodes(log_eta: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Replace ``log eta`` at zero nodes by the value the trapezoid rule needs.

    Near a zero ``eta ~ c |t|^p``; the order ``p`` is read off the two
    nearest regular nodes on each side.  Since
    ``prod_{j=1}^{n-1} 2 sin(pi j / n) = n``, the equal-weight rule integrates
    ``p log|2 sin(t/2)|`` exactly once the zero node carries ``p log(h / 2 pi)``,
    i.e. ``log eta(d h) - p log(2 pi d)`` for a neighbour at distance ``d h``.
    Keeping the raw sample instead (or the floor) would add
    ``log(eta_node) / n`` to every Poisson average of ``log eta``.
    """
    out = log_eta.copy()
    n = mask.size
    good = np.nonzero(~mask)[0]
    if good.size < 4:
        return out
    for i in np.nonzero(mask)[0]:
        pos = np.searchsorted(good, i)
        fills = []
        for near, far in ((good[pos - 1], good[pos - 2]), (good[pos % good.size], good[(pos + 1) % good.size])):
            d1 = min((i - near) % n, (near - i) % n)
            d2 = min((i - far) % n, (far - i) % n)
            p = (log_eta[far] - log_eta[near]) / np.log(d2 / d1) if d2 > d1 else 1.0
            p = float(np.clip(p, 0.0, 8.0))
            fills.append(log_eta[near] - p * np.log(TWO_PI * d1))
        out[i] = 0.5 * (fills[0] + fills[1])
    return out


@dataclass(frozen=True, eq=False)
class OuterSpec:
    """Outer function with boundary modulus ``eta``.

    ``eta`` is a nonnegative :class:`BoundaryFunction`, a
    :class:`PolynomialModulus` or a :class:`StepModulus`.  Sampled moduli are
    clamped below by ``floor`` before logarithms are taken.  A run of
    ``max_zero_run`` or more consecutive nodes at or below the floor is read
    as vanishing on a set of positive measure and rejected.
    """

    eta: object
    floor: float = 1e-300
    max_zero_run: int = 4
    _log_eta: BoundaryFunction = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if not self.floor > 0:
            raise ParameterError("floor must be positive")
        if isinstance(self.eta, BoundaryFunction):
            vals = self.eta.values
            if np.max(np.abs(vals.imag)) > 1e-12 * max(1.0, np.max(np.abs(vals))):
                raise DomainError("eta must be real-valued")
            eta = vals.real
            if np.any(eta < -1e-14):
                raise DomainError("eta must be nonnegative")
            low = eta <= self.floor
            if _longest_circular_run(low) >= self.max_zero_run:
                raise LogIntegrabilityError(
                    f"eta vanishes on {int(low.sum())} nodes (a run of "
                    f"{_longest_circular_run(low)}); log eta is not integrable"
                )
            log_eta = np.log(np.maximum(eta, self.floor))
            zero = _zero_nodes(eta, self.floor)
            if zero.any() and not zero.all():
                log_eta = _fill_zero_nodes(log_eta, zero)
            if not np.isfinite(log_eta.mean()):
                raise LogIntegrabilityError("grid mean of log eta is not finite")
            object.__setattr__(self, "_log_eta", BoundaryFunction(self.eta.grid, log_eta))
        elif not hasattr(self.eta, "log_herglotz"):
            raise ParameterError(f"unsupported eta representation {type(self.eta).__name__}")

    @property
    def is_sampled(self) -> bool:
        return self._log_eta is not None

    def log_eta(self, grid: CircleGrid | None = None) -> BoundaryFunction:
        if self._log_eta is not None:
            return self._log_eta
        if hasattr(self.eta, "log_sample"):
            return BoundaryFunction(grid, self.eta.log_sample(grid))
        eta = self.eta.sample(grid)
        log_eta = np.log(np.maximum(eta, self.floor))
        zero = _zero_nodes(eta, self.floor)
        if zero.any() and not zero.all():
            log_eta = _fill_zero_nodes(log_eta, zero)
        return BoundaryFunction(grid, log_eta)

    def eta_values(self, grid: CircleGrid | None = None) -> np.ndarray:
        if self._log_eta is not None:
            return self.eta.values.real
        return self.eta.sample(grid)

    def log_mean(self) -> float:
        if self._log_eta is not None:
            return float(self._log_eta.values.real.mean())
        return self.eta.log_mean()

    def log_herglotz(self, z):
        if self._log_eta is not None:
            return herglotz_fourier(self._log_eta, z)
        return self.eta.log_herglotz(z)

    def boundary_values(self, grid: CircleGrid) -> np.ndarray:
        """``eta e^{i Q(log eta)}`` at the nodes: modulus exactly ``eta``."""
        from .poisson import conjugate

        log_eta = self.log_eta(grid)
        phase = conjugate(log_eta).values.real
        h0 = self.log_herglotz(0.0)
        # the Herglotz normalization makes the phase vanish at the origin
        return self.eta_values(grid) * np.exp(1j * (phase + h0.imag))


def outer_log_abs(spec: OuterSpec, z):
    """``P(log eta)(z)``."""
    h = spec.log_herglotz(as_complex(z))
    return float(np.real(h)) if np.ndim(h) == 0 else np.real(h)


def outer_modulus(spec: OuterSpec, z):
    """``|O_eta(z)| = exp(P(log eta)(z))``."""
    return np.exp(outer_log_abs(spec, z))


def outer_eval(spec: OuterSpec, z):
    """``O_eta(z) = exp(int (zeta+z)/(zeta-z) log eta dm)``."""
    out = np.exp(spec.log_herglotz(as_complex(z)))
    return complex(out) if np.ndim(out) == 0 else out


# -- spectra and max-modulus sets ---------------------------------------------


class SpectrumSet(NamedTuple):
    """Interior zeros plus boundary angles of ``sigma(I)``."""

    interior_zeros: tuple
    boundary_angles: tuple

    @property
    def empty(self) -> bool:
        return not self.interior_zeros and not self.boundary_angles


def _circ_dist(a, b):
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi)
    return d


def _circular_mean(angles):
    return float(np.angle(np.mean(np.exp(1j * np.asarray(angles)))) % TWO_PI)


def spectrum(
    b: BlaschkeSpec,
    s: SingularSpec,
    tol_angle: float = 1e-2,
    tol_radial: float = 1e-2,
    min_cluster: int = 2,
) -> SpectrumSet:
    """Numerical surrogate for ``sigma(I) = closure(Z_I u supp mu_I)``.

    Zeros with ``|z| > 1 - tol_radial`` are grouped by angle (consecutive gaps
    at most ``tol_angle``); each group with at least ``min_cluster`` members
    contributes its circular-mean angle.  Atom angles always belong.
    """
    near = sorted(float(np.angle(a)) % TWO_PI for a in b.zeros if abs(a) > 1.0 - tol_radial)
    clusters = []
    if near:
        groups = [[near[0]]]
        for t in near[1:]:
            if t - groups[-1][-1] <= tol_angle:
                groups[-1].append(t)
            else:
                groups.append([t])
        if len(groups) > 1 and near[0] + TWO_PI - near[-1] <= tol_angle:
            groups[0] = groups.pop() + groups[0]
        clusters = [_circular_mean(g) for g in groups if len(g) >= min_cluster]
    angles = clusters + [t for t, _ in s.atoms]
    merged = []
    for t in sorted(angles):
        if not merged or _circ_dist(t, merged[-1]) > tol_angle:
            merged.append(t)
    if len(merged) > 1 and _circ_dist(merged[0], merged[-1]) <= tol_angle:
        merged.pop()
    return SpectrumSet(tuple(b.zeros), tuple(merged))


class MaxModulusSet(NamedTuple):
    """``M(F)``: boundary arcs where ``|F|`` is maximal; ``whole_disk`` iff F is constant."""

    arcs: ArcSet
    whole_disk: bool
    sup: float

    def contains_angle(self, theta: float, tol: float = 0.0) -> bool:
        t = float(theta) % TWO_PI
        for a, b in self.arcs.arcs:
            if a - tol <= t < b + tol:
                return True
            if _circ_dist(t, a) <= tol or _circ_dist(t, b) <= tol:
                return True
        return False


def max_modulus_set(F, tol: float = 1e-6, grid: CircleGrid | None = None) -> MaxModulusSet:
    """Grid angles where ``|F| >= (1 - tol) max |F|``, merged into arcs.

    ``F`` is a :class:`BoundaryFunction` or anything with ``sample(grid)``.
    """
    if not isinstance(F, BoundaryFunction):
        F = F.sample(grid or CircleGrid())
    grid = F.grid
    mod = np.abs(F.values)
    top = float(mod.max())
    sel = mod >= (1.0 - tol) * top
    h = grid.spacing
    constant = float(np.max(np.abs(F.values - F.values[0]))) <= tol * max(top, 1e-300)
    if sel.all():
        return MaxModulusSet(ArcSet.full(), constant, top)
    pairs, j, n = [], 0, grid.n
    while j < n:
        if sel[j]:
            k = j
            while k + 1 < n and sel[k + 1]:
                k += 1
            pairs.append((grid.theta[j] - h / 2, grid.theta[k] + h / 2))
            j = k + 1
        else:
            j += 1
    return MaxModulusSet(ArcSet.from_pairs(pairs), constant, top)
