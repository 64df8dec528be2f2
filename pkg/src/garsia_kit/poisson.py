"""Poisson extension, harmonic measure and the conjugate-function transform.

Two independent routes extend a sampled boundary function into the disk:

* :func:`extend_quadrature` sums the Poisson kernel against the samples;
* :func:`extend_fourier` sums ``hat_f(k) r^{|k|} e^{ik theta}``.

They agree to roundoff wherever the kernel is resolved by the grid, which is
what :data:`CircleGrid.r_quad_max` encodes.  Harmonic measure of arcs is done
in closed form and stays accurate arbitrarily close to the circle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import TWO_PI, ArcSet, BoundaryFunction
from .errors import AccuracyError, DomainError, ParameterError

__all__ = [
    "DiskPoint",
    "arc_herglotz",
    "as_complex",
    "conjugate",
    "extend",
    "extend_fourier",
    "extend_quadrature",
    "harmonic_measure",
    "herglotz_fourier",
    "poisson_kernel",
    "poisson_on_circle",
]

_CHUNK = 256


@dataclass(frozen=True)
class DiskPoint:
    """A point ``r e^{i theta}`` of the open unit disk, kept in polar form."""

    r: float
    theta: float = 0.0

    def __post_init__(self):
        r = float(self.r)
        if not 0.0 <= r < 1.0:
            raise ParameterError(f"DiskPoint radius must lie in [0, 1), got {r}")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @classmethod
    def from_complex(cls, z: complex) -> "DiskPoint":
        return cls(abs(z), float(np.angle(z)))

    @property
    def z(self) -> complex:
        return self.r * complex(np.cos(self.theta), np.sin(self.theta))

    def __complex__(self):
        return self.z


def as_complex(z):
    """Coerce a DiskPoint, complex number or array of either to complex form.

    Raises :class:`ParameterError` if any point is outside the open disk.
    """
    if isinstance(z, DiskPoint):
        return z.z
    if isinstance(z, (list, tuple)):
        z = np.array([p.z if isinstance(p, DiskPoint) else complex(p) for p in z])
    if np.ndim(z) == 0:
        w = complex(z)
        if not abs(w) < 1.0:
            raise ParameterError(f"point {w} is not inside the unit disk")
        return w
    w = np.asarray(z, dtype=complex)
    if w.size and not np.all(np.abs(w) < 1.0):
        raise ParameterError("all points must lie inside the unit disk")
    return w


def poisson_kernel(z, zeta_angle):
    """``(1 - |z|^2) / |e^{i phi} - z|^2``; broadcasts over both arguments."""
    z = as_complex(z)
    zeta = np.exp(1j * np.asarray(zeta_angle, dtype=float))
    out = (1.0 - np.abs(z) ** 2) / np.abs(zeta - z) ** 2
    return float(out) if np.ndim(out) == 0 else out


def _chunked(z, func):
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    flat, res = z.ravel(), out.ravel()
    for i in range(0, flat.size, _CHUNK):
        res[i : i + _CHUNK] = func(flat[i : i + _CHUNK])
    return out


def _scalar_or_array(z, out):
    return complex(out[0]) if np.ndim(z) == 0 else out


def extend_quadrature(f: BoundaryFunction, z):
    """Poisson extension by equal-weight kernel quadrature.

    Refuses points beyond ``f.grid.r_quad_max`` with :class:`AccuracyError`.
    """
    z = as_complex(z)
    r_lim = f.grid.r_quad_max
    if np.any(np.abs(z) > r_lim):
        raise AccuracyError(
            f"kernel quadrature unresolved for |z| > {r_lim:.6f} on n={f.n}; use extend_fourier"
        )
    nodes, vals = f.grid.nodes, f.values

    def run(w):
        ker = (1.0 - np.abs(w[:, None]) ** 2) / np.abs(nodes[None, :] - w[:, None]) ** 2
        return ker @ vals / f.n

    return _scalar_or_array(z, _chunked(z, run))


def _fourier_parts(f: BoundaryFunction):
    c = f.fft_coefficients()
    half = f.n // 2
    pos = c[:half]  # k = 0 .. half-1
    neg = np.concatenate(([0.0], c[::-1][: half - 1]))  # k = 0, -1, .., -(half-1)
    return pos, neg, c[half], half


def extend_fourier(f: BoundaryFunction, z, return_tail: bool = False):
    """Spectral Poisson extension ``sum_k hat_f(k) r^{|k|} e^{ik theta}``, ``|k| <= n/2``.

    The Nyquist term is split evenly between ``+n/2`` and ``-n/2`` so real data
    extend to real values.  With ``return_tail`` a heuristic bound on the
    discarded ``|k| > n/2`` part is returned as well, assuming the spectrum
    does not grow past the Nyquist index.
    """
    z = as_complex(z)
    pos, neg, nyq, half = _fourier_parts(f)
    k = np.arange(half)

    def run(w):
        wp = np.power(w[:, None], k[None, :])
        wm = np.power(np.conj(w)[:, None], k[None, :])
        r = np.abs(w)
        nyq_term = nyq * r**half * np.cos(half * np.angle(w))
        return wp @ pos + wm @ neg + nyq_term

    val = _scalar_or_array(z, _chunked(z, run))
    if not return_tail:
        return val
    r = np.abs(z)
    edge = max(abs(nyq), abs(pos[-1]), abs(neg[-1]))
    tail = 2.0 * edge * r ** (half + 1) / np.maximum(1.0 - r, 1e-300)
    return val, tail


def extend(f: BoundaryFunction, z):
    """Quadrature where it is trusted, spectral summation beyond ``r_quad_max``."""
    z = as_complex(z)
    if np.ndim(z) == 0:
        if abs(z) <= f.grid.r_quad_max:
            return extend_quadrature(f, z)
        return extend_fourier(f, z)
    out = np.empty(z.shape, dtype=complex)
    inner = np.abs(z) <= f.grid.r_quad_max
    if inner.any():
        out[inner] = extend_quadrature(f, z[inner])
    if (~inner).any():
        out[~inner] = extend_fourier(f, z[~inner])
    return out


def poisson_on_circle(f: BoundaryFunction, r: float) -> np.ndarray:
    """``Pf(r e^{i theta_j})`` at every grid angle, by one inverse FFT."""
    if not 0.0 <= r < 1.0:
        raise ParameterError(f"radius must lie in [0, 1), got {r}")
    n = f.n
    k = np.abs(np.fft.fftfreq(n, 1.0 / n))
    return np.fft.ifft(f.fft_coefficients() * r**k) * n


def herglotz_fourier(f: BoundaryFunction, z):
    """``int (zeta + z)/(zeta - z) f dm`` for real ``f``, summed spectrally.

    Equals ``hat_f(0) + 2 sum_{k>0} hat_f(k) z^k``; its real part is ``Pf``
    and its imaginary part the harmonic conjugate vanishing at 0.
    """
    z = as_complex(z)
    pos, _, nyq, half = _fourier_parts(f)
    k = np.arange(half)
    coef = 2.0 * pos.copy()
    coef[0] = pos[0].real

    def run(w):
        return np.power(w[:, None], k[None, :]) @ coef + nyq.real * w**half

    return _scalar_or_array(z, _chunked(z, run))


def _unit(theta):
    return np.exp(1j * theta)


def _subtended(z, a, b):
    """Angle subtended at ``z`` by the arc ``[a, b)`` with ``b - a <= pi``."""
    raw = np.angle((_unit(b) - z) * np.conj(_unit(a) - z))
    half = 0.5 * (b - a)
    # true angle lies in (L/2, pi + L/2); raw < -pi/2 only on the far branch
    return np.where(raw < -0.5 * np.pi, raw + TWO_PI, np.maximum(raw, half))


def _mobius_image_length(z, a, b):
    """Length of the image of ``[a, b)`` under ``w -> (w - z)/(1 - conj(z) w)``."""
    za, zb = _unit(a), _unit(b)
    ma = (za - z) / (1.0 - np.conj(z) * za)
    mb = (zb - z) / (1.0 - np.conj(z) * zb)
    raw = np.mod(np.angle(mb * np.conj(ma)), TWO_PI)
    guess = 2.0 * _subtended(z, a, b) - (b - a)
    # snap the mod-2pi ambiguity to the branch picked by the subtended angle
    return raw + TWO_PI * np.round((guess - raw) / TWO_PI)


def _pieces(arcs: ArcSet):
    for a, b in arcs.arcs:
        m = max(1, int(np.ceil((b - a) / np.pi - 1e-12)))
        edges = np.linspace(a, b, m + 1)
        yield from zip(edges[:-1], edges[1:])


def harmonic_measure(z, arcs: ArcSet):
    """``omega_z(E)`` for a finite union of arcs, via Mobius image lengths.

    Exact up to roundoff for every ``|z| < 1``; the full circle has measure
    exactly one.
    """
    z = as_complex(z)
    if arcs.arcs == ((0.0, TWO_PI),):
        return 1.0 if np.ndim(z) == 0 else np.ones(np.shape(z))
    total = np.zeros(np.shape(z))
    for a, b in _pieces(arcs):
        total = total + _mobius_image_length(z, a, b)
    out = np.clip(total / TWO_PI, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def arc_herglotz(z, a: float, b: float):
    """``int_{[a,b)} (zeta + z)/(zeta - z) dm(zeta)`` in closed form.

    Real part is ``omega_z([a, b))``; imaginary part is
    ``-(1/pi) log(|e^{ib} - z| / |e^{ia} - z|)``.
    """
    z = as_complex(z)
    omega = harmonic_measure(z, ArcSet.from_pairs([(a, b)]))
    if b - a >= TWO_PI:
        return omega + 0j if np.ndim(z) == 0 else omega.astype(complex)
    log_ratio = np.log(np.abs(_unit(b) - z)) - np.log(np.abs(_unit(a) - z))
    out = omega - 1j * log_ratio / np.pi
    return complex(out) if np.ndim(out) == 0 else out


def conjugate(f: BoundaryFunction) -> BoundaryFunction:
    """Boundary trace of the harmonic conjugate (multiplier ``-i sign(k)``).

    The mean is sent to zero, as is the Nyquist coefficient.
    """
    if not f.is_real():
        raise DomainError("conjugate() needs a real-valued boundary function")
    n = f.n
    c = f.fft_coefficients()
    mult = -1j * np.sign(np.fft.fftfreq(n, 1.0 / n))
    mult[n // 2] = 0.0
    vals = np.fft.ifft(c * mult) * n
    return BoundaryFunction(f.grid, vals.real)
