"""Sampled functions on the unit circle.

The circle carries normalized arc length ``m`` (total mass one).  Every
boundary function lives on an equispaced :class:`CircleGrid` and all integrals
against ``m`` are equal-weight (trapezoidal) sums, which are spectrally
accurate for smooth periodic integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, ShapeError

TWO_PI = 2.0 * np.pi

__all__ = [
    "ArcSet",
    "BoundaryFunction",
    "CircleGrid",
    "Spectrum",
    "arc_measure",
    "combine",
    "fourier_coeffs",
    "make_grid",
]


@dataclass(frozen=True)
class CircleGrid:
    """Equispaced nodes ``theta_j = 2 pi j / n`` with weight ``1/n`` each."""

    n: int = 2**14

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n < 8 or n & (n - 1):
            raise ParameterError(f"grid size must be a power of two >= 8, got {n!r}")

    @property
    def log2_n(self) -> int:
        return int(self.n).bit_length() - 1

    @property
    def weight(self) -> float:
        return 1.0 / self.n

    @cached_property
    def theta(self) -> np.ndarray:
        t = TWO_PI * np.arange(self.n) / self.n
        t.setflags(write=False)
        return t

    @cached_property
    def nodes(self) -> np.ndarray:
        z = np.exp(1j * self.theta)
        z.setflags(write=False)
        return z

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def r_quad_max(self) -> float:
        """Largest radius at which kernel quadrature is trusted."""
        return 1.0 - 16.0 * self.spacing

    @property
    def delta_trace(self) -> float:
        """Radial offset used for boundary traces of inner factors."""
        return 8.0 * self.spacing


def make_grid(log2_n: int = 14) -> CircleGrid:
    """Return the grid with ``2**log2_n`` nodes, ``3 <= log2_n <= 22``."""
    if isinstance(log2_n, bool) or not isinstance(log2_n, (int, np.integer)):
        raise ParameterError(f"log2_n must be an integer, got {log2_n!r}")
    if not 3 <= log2_n <= 22:
        raise ParameterError(f"log2_n must lie in [3, 22], got {log2_n}")
    return CircleGrid(2 ** int(log2_n))


@dataclass(frozen=True)
class ArcSet:
    """Finite union of disjoint half-open arcs ``[alpha, beta)`` inside ``[0, 2 pi]``."""

    arcs: tuple = ()

    def __post_init__(self):
        arcs = tuple(sorted((float(a), float(b)) for a, b in self.arcs))
        for a, b in arcs:
            if not (0.0 <= a < b <= TWO_PI):
                raise ParameterError(f"arc [{a}, {b}) is not inside [0, 2pi] with a < b")
        for (a0, b0), (a1, b1) in zip(arcs, arcs[1:]):
            if a1 < b0:
                raise ParameterError(f"arcs [{a0}, {b0}) and [{a1}, {b1}) overlap")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> "ArcSet":
        """Build from arbitrary ``[alpha, beta)`` pairs, reducing angles mod 2 pi.

        A pair with ``beta - alpha >= 2 pi`` denotes the full circle; pairs that
        wrap past ``2 pi`` are split in two.  Overlaps are merged.
        """
        pieces = []
        for a, b in pairs:
            a, b = float(a), float(b)
            if b <= a:
                raise ParameterError(f"arc [{a}, {b}) must have alpha < beta")
            if b - a >= TWO_PI:
                pieces.append((0.0, TWO_PI))
                continue
            a0 = a % TWO_PI
            b0 = a0 + (b - a)
            if b0 <= TWO_PI:
                pieces.append((a0, b0))
            else:
                pieces.append((a0, TWO_PI))
                pieces.append((0.0, b0 - TWO_PI))
        pieces.sort()
        merged = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        return cls(tuple(merged))

    @classmethod
    def full(cls) -> "ArcSet":
        return cls(((0.0, TWO_PI),))

    def contains(self, theta) -> np.ndarray:
        """Membership mask for angles already reduced to ``[0, 2 pi)``."""
        theta = np.asarray(theta, dtype=float)
        mask = np.zeros(theta.shape, dtype=bool)
        for a, b in self.arcs:
            mask |= (theta >= a) & (theta < b)
        return mask

    def complement(self) -> "ArcSet":
        out, start = [], 0.0
        for a, b in self.arcs:
            if a > start:
                out.append((start, a))
            start = b
        if start < TWO_PI:
            out.append((start, TWO_PI))
        return ArcSet(tuple(out))

    @property
    def endpoint_count(self) -> int:
        return 2 * len(self.arcs)

    def to_list(self) -> list:
        return [[a, b] for a, b in self.arcs]


def arc_measure(arcs: ArcSet) -> float:
    """Normalized length ``sum (beta - alpha) / 2 pi``."""
    return float(sum(b - a for a, b in arcs.arcs) / TWO_PI)


class Spectrum(NamedTuple):
    """Discrete Fourier coefficients ``hat_f(k)`` for ``-n/2 < k <= n/2``."""

    k: np.ndarray
    coef: np.ndarray

    def __getitem__(self, key):
        if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
            idx = np.nonzero(self.k == key)[0]
            if idx.size == 0:
                return 0.0 + 0.0j
            return complex(self.coef[idx[0]])
        return tuple.__getitem__(self, key)


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """Complex samples of a function on the circle, one per grid node."""

    grid: CircleGrid
    values: np.ndarray
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.grid.n,):
            raise ShapeError(f"expected {self.grid.n} samples, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, func, grid: CircleGrid) -> "BoundaryFunction":
        """Sample ``func(zeta)`` at the grid nodes ``zeta = e^{i theta_j}``."""
        return cls(grid, np.broadcast_to(func(grid.nodes), (grid.n,)))

    @classmethod
    def constant(cls, c, grid: CircleGrid) -> "BoundaryFunction":
        return cls(grid, np.full(grid.n, complex(c)))

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def real(self) -> np.ndarray:
        return self.values.real

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.values))))
        return bool(np.max(np.abs(self.values.imag)) <= tol * scale)

    def mean(self) -> complex:
        return complex(np.mean(self.values))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def oscillation(self) -> float:
        """``sup |f| - inf |f|`` over the grid."""
        a = np.abs(self.values)
        return float(a.max() - a.min())

    def fft_coefficients(self) -> np.ndarray:
        """Cached coefficients in numpy FFT order (index ``j`` is frequency ``j`` mod n)."""
        c = self._cache.get("fft")
        if c is None:
            c = np.fft.fft(self.values) / self.n
            c.setflags(write=False)
            self._cache["fft"] = c
        return c

    def __add__(self, other):
        return combine("add", self, other)

    def __sub__(self, other):
        return combine("add", self, combine("scale", -1.0, other))

    def __mul__(self, other):
        if isinstance(other, BoundaryFunction):
            return combine("mul", self, other)
        return combine("scale", other, self)

    __rmul__ = __mul__

    def __neg__(self):
        return combine("scale", -1.0, self)

    def __abs__(self):
        return combine("modulus", self)

    def conj(self):
        return combine("conjugate", self)


def fourier_coeffs(f: BoundaryFunction) -> Spectrum:
    """``hat_f(k) = int conj(zeta)^k f dm`` by the grid quadrature."""
    n = f.n
    c = f.fft_coefficients()
    k = np.arange(-n // 2 + 1, n // 2 + 1)
    return Spectrum(k, c[k % n])


def _same_grid(fs):
    grid = fs[0].grid
    for g in fs[1:]:
        if g.grid != grid:
            raise ShapeError(f"grid mismatch: n={grid.n} vs n={g.grid.n}")
    return grid


def combine(op: str, *args) -> BoundaryFunction:
    """Pointwise algebra on boundary functions sharing one grid.

    ``op`` is one of ``add`` (any number of operands), ``mul`` (any number),
    ``scale`` (``(c, f)``), ``modulus`` (``(f,)``) or ``conjugate`` (``(f,)``).
    """
    if op == "add":
        grid = _same_grid(args)
        return BoundaryFunction(grid, np.sum([f.values for f in args], axis=0))
    if op == "mul":
        grid = _same_grid(args)
        return BoundaryFunction(grid, np.prod([f.values for f in args], axis=0))
    if op == "scale":
        c, f = args
        return BoundaryFunction(f.grid, complex(c) * f.values)
    if op == "modulus":
        (f,) = args
        return BoundaryFunction(f.grid, np.abs(f.values))
    if op == "conjugate":
        (f,) = args
        return BoundaryFunction(f.grid, np.conj(f.values))
    raise ParameterError(f"unknown combine op {op!r}")
