"""Symbolic function descriptions that can be sampled or evaluated exactly.

A :class:`FunctionSpec` is a finite tree whose leaves are indicators of arc
unions, inner factors, outer functions, polynomials and constants, combined
by sums, products, scalings, conjugation and moduli.  Every tree can be
sampled onto a :class:`~garsia_kit.boundary.CircleGrid`.

Many trees also admit an *exact* interior route.  On the circle a tree may
reduce to a trigonometric polynomial or to a step function on arcs; both have
closed-form Poisson extensions (monomials and harmonic measure).  Inner
factors are unimodular on the circle, so they drop out of ``|f|^2``.  When
both ``P(|f|^2)(z)`` and ``Pf(z)`` are available in closed form the Garsia
function is evaluated without any quadrature, which is what keeps the
interior identities accurate to roundoff arbitrarily close to the circle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable

import numpy as np

from .boundary import TWO_PI, ArcSet, BoundaryFunction, CircleGrid
from .errors import ParameterError, ShapeError, SpecError
from .factorization import (
    BlaschkeSpec,
    OuterSpec,
    PolynomialModulus,
    SingularSpec,
    StepModulus,
    blaschke_eval,
    blaschke_log_abs,
    outer_eval,
    outer_log_abs,
    singular_eval,
    singular_log_abs,
)
from .poisson import as_complex, harmonic_measure

__all__ = [
    "Blaschke",
    "Conjugate",
    "Constant",
    "FunctionSpec",
    "Identity",
    "Indicator",
    "Modulus",
    "Outer",
    "Polynomial",
    "Product",
    "Scale",
    "SingularInner",
    "SampledForm",
    "StepForm",
    "Sum",
    "TrigPoly",
    "dump_spec",
    "exact_parts",
    "load_spec",
    "parse_spec",
    "sample",
]


# -- closed-form boundary representations -------------------------------------


class TrigPoly:
    """Finite Laurent polynomial ``sum_k c_k zeta^k`` on the circle."""

    def __init__(self, coef: dict):
        self.coef = {int(k): complex(v) for k, v in coef.items() if v != 0}

    @classmethod
    def const(cls, c) -> "TrigPoly":
        return cls({0: c})

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self.coef)
        for k, v in other.coef.items():
            out[k] = out.get(k, 0) + v
        return TrigPoly(out)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        out: dict = {}
        for j, a in self.coef.items():
            for k, b in other.coef.items():
                out[j + k] = out.get(j + k, 0) + a * b
        return TrigPoly(out)

    def scale(self, c) -> "TrigPoly":
        return TrigPoly({k: c * v for k, v in self.coef.items()})

    def conj(self) -> "TrigPoly":
        return TrigPoly({-k: np.conj(v) for k, v in self.coef.items()})

    def is_const(self) -> bool:
        return all(k == 0 for k in self.coef)

    def const_value(self) -> complex:
        return self.coef.get(0, 0j)

    def sample(self, theta) -> np.ndarray:
        out = np.zeros(np.shape(theta), dtype=complex)
        for k, v in self.coef.items():
            out = out + v * np.exp(1j * k * np.asarray(theta))
        return out

    def poisson(self, z):
        out = np.zeros(np.shape(z), dtype=complex)
        for k, v in self.coef.items():
            out = out + v * (z**k if k >= 0 else np.conj(z) ** (-k))
        return out


class StepForm:
    """Piecewise-constant function: ``values[i]`` on ``[breaks[i], breaks[i+1])`` cyclically.

    With no breaks the function is the constant ``values[0]``.
    """

    def __init__(self, breaks, values):
        self.breaks = np.asarray(breaks, dtype=float)
        self.values = np.asarray(values, dtype=complex)
        if self.breaks.size == 0 and self.values.size != 1:
            raise ParameterError("a constant step form carries exactly one value")
        if self.breaks.size and self.values.size != self.breaks.size:
            raise ParameterError("one value per step piece is required")

    @classmethod
    def const(cls, c) -> "StepForm":
        return cls([], [c])

    @classmethod
    def indicator(cls, arcs: ArcSet, inside=1.0, outside=0.0) -> "StepForm":
        if not arcs.arcs:
            return cls.const(outside)
        if arcs.arcs == ((0.0, TWO_PI),):
            return cls.const(inside)
        pts = sorted({p % TWO_PI for a, b in arcs.arcs for p in (a, b)})
        probe = cls([], [0])
        probe.breaks = np.asarray(pts)
        mids = probe._midpoints()
        vals = np.where(arcs.contains(mids), inside, outside)
        return cls(pts, vals)

    def _midpoints(self) -> np.ndarray:
        b = self.breaks
        nxt = np.append(b[1:], b[0] + TWO_PI)
        return np.mod(0.5 * (b + nxt), TWO_PI)

    def is_const(self) -> bool:
        return self.breaks.size == 0

    def const_value(self) -> complex:
        return complex(self.values[0])

    def at(self, theta) -> np.ndarray:
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        if self.is_const():
            return np.full(theta.shape, self.values[0])
        idx = np.searchsorted(self.breaks, theta, side="right") - 1
        return self.values[idx]  # idx = -1 wraps to the last piece

    def _binary(self, other: "StepForm", op) -> "StepForm":
        if self.is_const() and other.is_const():
            return StepForm.const(op(self.values[0], other.values[0]))
        pts = np.unique(np.concatenate([self.breaks, other.breaks]))
        tmp = StepForm(pts, np.zeros(pts.size))
        mids = tmp._midpoints()
        return StepForm(pts, op(self.at(mids), other.at(mids)))

    def __add__(self, other):
        return self._binary(other, np.add)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def scale(self, c) -> "StepForm":
        return StepForm(self.breaks, c * self.values)

    def conj(self) -> "StepForm":
        return StepForm(self.breaks, np.conj(self.values))

    def modulus(self) -> "StepForm":
        return StepForm(self.breaks, np.abs(self.values))

    def sample(self, theta) -> np.ndarray:
        return self.at(theta)

    def pieces(self):
        b = self.breaks
        nxt = np.append(b[1:], b[0] + TWO_PI)
        return list(zip(b, nxt, self.values))

    def poisson(self, z):
        if self.is_const():
            return self.values[0] + np.zeros(np.shape(z), dtype=complex)
        out = np.zeros(np.shape(z), dtype=complex)
        for a, b, v in self.pieces():
            if v != 0:
                out = out + v * harmonic_measure(z, ArcSet.from_pairs([(a, b)]))
        return out


class SampledForm:
    """Grid samples standing in for a boundary function with no closed form.

    Its Poisson extension is numeric (quadrature inside ``r_quad_max``,
    spectral beyond), so a Garsia route using it is reported as ``hybrid``.
    """

    def __init__(self, bf: BoundaryFunction):
        self.bf = bf

    def is_const(self) -> bool:
        return False

    def __add__(self, other):
        return SampledForm(self.bf + other.bf)

    def __mul__(self, other):
        return SampledForm(self.bf * other.bf)

    def scale(self, c) -> "SampledForm":
        return SampledForm(self.bf * c)

    def conj(self) -> "SampledForm":
        return SampledForm(self.bf.conj())

    def poisson(self, z):
        from .poisson import extend

        return extend(self.bf, z)


def _form_mul(a, b):
    if a is None or b is None:
        return None
    if isinstance(a, TrigPoly) and a.is_const():
        return b.scale(a.const_value())
    if isinstance(b, TrigPoly) and b.is_const():
        return a.scale(b.const_value())
    if isinstance(a, StepForm) and a.is_const():
        return b.scale(a.const_value())
    if isinstance(b, StepForm) and b.is_const():
        return a.scale(b.const_value())
    if type(a) is type(b):
        return a * b
    return None


def _form_add(a, b):
    if a is None or b is None:
        return None
    if type(a) is type(b):
        return a + b
    for x, y in ((a, b), (b, a)):
        if x.is_const():
            c = x.const_value()
            return y + (TrigPoly.const(c) if isinstance(y, TrigPoly) else StepForm.const(c))
    return None


# -- the spec tree ------------------------------------------------------------


def _cplx(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ParameterError(f"complex numbers are [re, im] pairs, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _cplx_json(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


class FunctionSpec:
    """Base class of the function-description tree."""

    #: analytic in the disk (so that ``Pf`` is the function itself)
    analytic = False

    def sample(self, grid: CircleGrid) -> BoundaryFunction:
        return BoundaryFunction(grid, self._sample(grid))

    def _sample(self, grid: CircleGrid) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def value(self, z):
        """Value of the analytic function at interior points."""
        raise ParameterError(f"{type(self).__name__} is not analytic in the disk")

    def log_abs(self, z):
        """``log |f(z)|`` for analytic specs, accumulated without underflow."""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.value(z)))

    def boundary_form(self):
        """TrigPoly or StepForm equal to ``f`` on the circle, or ``None``."""
        return None

    def modsq_form(self):
        """TrigPoly or StepForm equal to ``|f|^2`` on the circle, or ``None``."""
        f = self.boundary_form()
        return None if f is None else _form_mul(f, f.conj())

    def is_inner_like(self) -> bool:
        """True if ``|f| = 1`` on the circle and ``f`` is analytic."""
        return False

    def children(self) -> tuple:
        return ()

    def to_json(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({json.dumps(self.to_json())})"

    # algebra sugar
    def __add__(self, other):
        return Sum([self, other])

    def __mul__(self, other):
        if isinstance(other, FunctionSpec):
            return Product([self, other])
        return Scale(other, self)

    __rmul__ = __mul__

    def __neg__(self):
        return Scale(-1.0, self)

    def __sub__(self, other):
        return Sum([self, Scale(-1.0, other)])


@dataclass(frozen=True, repr=False)
class Constant(FunctionSpec):
    c: complex = 0.0

    analytic = True

    def __post_init__(self):
        object.__setattr__(self, "c", _cplx(self.c))

    def _sample(self, grid):
        return np.full(grid.n, self.c)

    def value(self, z):
        return self.c + np.zeros(np.shape(z), dtype=complex)

    def boundary_form(self):
        return TrigPoly.const(self.c)

    def is_inner_like(self):
        return abs(abs(self.c) - 1.0) < 1e-15

    def to_json(self):
        return {"type": "constant", "value": _cplx_json(self.c)}


@dataclass(frozen=True, repr=False)
class Identity(FunctionSpec):
    analytic = True

    def _sample(self, grid):
        return np.array(grid.nodes)

    def value(self, z):
        return np.asarray(z, dtype=complex) + 0j

    def boundary_form(self):
        return TrigPoly({1: 1.0})

    def is_inner_like(self):
        return True

    def to_json(self):
        return {"type": "identity"}


@dataclass(frozen=True, repr=False)
class Polynomial(FunctionSpec):
    """``sum_k coeffs[k] z^k`` (ascending order)."""

    coeffs: tuple = (0.0,)

    analytic = True

    def __post_init__(self):
        c = tuple(_cplx(v) for v in self.coeffs)
        if not c:
            raise ParameterError("polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", c)

    def _sample(self, grid):
        return np.polyval(self.coeffs[::-1], grid.nodes)

    def value(self, z):
        return np.polyval(self.coeffs[::-1], np.asarray(z, dtype=complex))

    def boundary_form(self):
        return TrigPoly(dict(enumerate(self.coeffs)))

    def to_json(self):
        return {"type": "polynomial", "coeffs": [_cplx_json(c) for c in self.coeffs]}


@dataclass(frozen=True, repr=False)
class Indicator(FunctionSpec):
    arcs: ArcSet = ArcSet()

    def __post_init__(self):
        if not isinstance(self.arcs, ArcSet):
            object.__setattr__(self, "arcs", ArcSet.from_pairs(self.arcs))

    def _sample(self, grid):
        return self.arcs.contains(grid.theta).astype(complex)

    def boundary_form(self):
        return StepForm.indicator(self.arcs)

    def to_json(self):
        return {"type": "indicator", "arcs": self.arcs.to_list()}


@dataclass(frozen=True, repr=False)
class Blaschke(FunctionSpec):
    """Finite Blaschke product, sampled on the circle itself (it is continuous there)."""

    spec: BlaschkeSpec = BlaschkeSpec()
    polar: tuple | None = None  # zeros as parsed, kept so JSON round trips exactly

    analytic = True

    def _sample(self, grid):
        return blaschke_eval(self.spec, grid.nodes)

    def value(self, z):
        return blaschke_eval(self.spec, z)

    def log_abs(self, z):
        return blaschke_log_abs(self.spec, z)

    def boundary_form(self):
        if any(a != 0 for a in self.spec.zeros):
            return None
        m = len(self.spec.zeros)  # zeros at the origin: c (-z)^m
        return TrigPoly({m: self.spec.const * (-1.0) ** m})

    def modsq_form(self):
        return TrigPoly.const(1.0)

    def is_inner_like(self):
        return True

    def to_json(self):
        out = {
            "type": "blaschke",
            "zeros": [list(p) for p in self.polar]
            if self.polar is not None
            else [[abs(a), float(np.angle(a)) % TWO_PI] for a in self.spec.zeros],
        }
        if self.spec.const != 1:
            out["const"] = _cplx_json(self.spec.const)
        return out


@dataclass(frozen=True, repr=False)
class SingularInner(FunctionSpec):
    """Atomic singular inner function.

    Sampled on the circle itself (unimodular values, 1 at an atom node) unless
    ``trace`` is set, in which case radius ``1 - delta_trace`` is used.
    """

    spec: SingularSpec = SingularSpec()
    trace: bool = False

    analytic = True

    def _sample(self, grid):
        rad = 1.0 - grid.delta_trace if self.trace else 1.0
        return singular_eval(self.spec, rad * grid.nodes)

    def value(self, z):
        return singular_eval(self.spec, z)

    def log_abs(self, z):
        return singular_log_abs(self.spec, z)

    def boundary_form(self):
        return None if self.spec.atoms else TrigPoly.const(1.0)

    def modsq_form(self):
        return TrigPoly.const(1.0)

    def is_inner_like(self):
        return True

    def to_json(self):
        out = {"type": "singular", "atoms": [[t, m] for t, m in self.spec.atoms]}
        if self.trace:
            out["trace"] = True
        return out


class Outer(FunctionSpec):
    """Outer function with boundary modulus ``eta``.

    ``eta`` may be a :class:`PolynomialModulus`, a :class:`StepModulus`, a
    nonnegative :class:`BoundaryFunction`, or another :class:`FunctionSpec`
    whose modulus is sampled on demand.
    """

    analytic = True

    def __init__(self, eta, floor: float = 1e-300):
        self.eta = eta
        self.floor = float(floor)
        self._outer: dict = {}
        if isinstance(eta, (PolynomialModulus, StepModulus, BoundaryFunction)):
            self._outer[None] = OuterSpec(eta, floor=self.floor)
        elif not isinstance(eta, FunctionSpec):
            raise ParameterError(f"unsupported eta {type(eta).__name__}")

    @property
    def symbolic(self) -> bool:
        return isinstance(self.eta, (PolynomialModulus, StepModulus))

    def outer_spec(self, grid: CircleGrid | None = None) -> OuterSpec:
        if None in self._outer:
            return self._outer[None]
        if grid is None:
            grid = CircleGrid()
        if grid not in self._outer:
            eta = BoundaryFunction(grid, np.abs(self.eta.sample(grid).values))
            self._outer[grid] = OuterSpec(eta, floor=self.floor)
        return self._outer[grid]

    def _sample(self, grid):
        if isinstance(self.eta, PolynomialModulus):
            return np.polyval(self.eta.outer_coefficients()[::-1], grid.nodes)
        if isinstance(self.eta, BoundaryFunction) and self.eta.grid != grid:
            raise ShapeError(f"eta lives on n={self.eta.grid.n}, requested n={grid.n}")
        return self.outer_spec(grid).boundary_values(grid)

    def value(self, z):
        return outer_eval(self.outer_spec(), as_complex(z))

    def log_abs(self, z):
        return outer_log_abs(self.outer_spec(), as_complex(z))

    def boundary_form(self):
        if isinstance(self.eta, PolynomialModulus):
            return TrigPoly(dict(enumerate(self.eta.outer_coefficients())))
        return None

    def modsq_form(self):
        if isinstance(self.eta, PolynomialModulus):
            p = TrigPoly(dict(enumerate(self.eta.coeffs)))
            return p * p.conj()
        if not self.symbolic:
            spec = self.outer_spec()
            grid = spec.eta.grid if isinstance(spec.eta, BoundaryFunction) else None
            return SampledForm(BoundaryFunction(grid, spec.eta_values(grid) ** 2))
        if isinstance(self.eta, StepModulus):
            form = StepForm.indicator(ArcSet(), outside=np.exp(2 * self.eta.log_base))
            for (a, b), lv in zip(self.eta.arcs, self.eta.log_values):
                piece = StepForm.indicator(ArcSet.from_pairs([(a, b)]), 1.0, 0.0)
                form = form + piece.scale(np.exp(2 * lv) - np.exp(2 * self.eta.log_base))
            return form
        return None

    def to_json(self):
        eta = self.eta
        if isinstance(eta, PolynomialModulus):
            e = {"type": "polynomial_modulus", "coeffs": [_cplx_json(c) for c in eta.coeffs]}
        elif isinstance(eta, StepModulus):
            e = {
                "type": "step",
                "arcs": [list(a) for a in eta.arcs],
                "log_values": eta.log_values.tolist(),
                "log_base": eta.log_base,
            }
        elif isinstance(eta, BoundaryFunction):
            e = {"type": "samples", "values": eta.values.real.tolist()}
        else:
            e = eta.to_json()
        return {"type": "outer", "eta": e}


class _Node(FunctionSpec):
    def __init__(self, items: Iterable[FunctionSpec]):
        self.items = tuple(items)
        if not self.items:
            raise ParameterError(f"{type(self).__name__} needs at least one operand")
        for it in self.items:
            if not isinstance(it, FunctionSpec):
                raise ParameterError(f"operand {it!r} is not a FunctionSpec")
        self.analytic = all(it.analytic for it in self.items)

    def children(self):
        return self.items


class Sum(_Node):
    def _sample(self, grid):
        return np.sum([it._sample(grid) for it in self.items], axis=0)

    def value(self, z):
        if not self.analytic:
            return super().value(z)
        return sum(it.value(z) for it in self.items)

    def log_abs(self, z):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.value(z)))

    def boundary_form(self):
        out = self.items[0].boundary_form()
        for it in self.items[1:]:
            out = _form_add(out, it.boundary_form())
        return out

    def to_json(self):
        return {"type": "sum", "terms": [it.to_json() for it in self.items]}


class Product(_Node):
    def _sample(self, grid):
        return np.prod([it._sample(grid) for it in self.items], axis=0)

    def value(self, z):
        if not self.analytic:
            return super().value(z)
        out = 1.0
        for it in self.items:
            out = out * it.value(z)
        return out

    def log_abs(self, z):
        if not self.analytic:
            return super().log_abs(z)
        return sum(np.asarray(it.log_abs(z), dtype=float) for it in self.items)

    def boundary_form(self):
        out = self.items[0].boundary_form()
        for it in self.items[1:]:
            out = _form_mul(out, it.boundary_form())
        return out

    def modsq_form(self):
        out = None
        for it in self.items:
            m = it.modsq_form()
            out = m if out is None else _form_mul(out, m)
            if out is None:
                return None
        return out

    def is_inner_like(self):
        return all(it.is_inner_like() for it in self.items)

    def to_json(self):
        return {"type": "product", "factors": [it.to_json() for it in self.items]}


class Scale(FunctionSpec):
    def __init__(self, c, spec: FunctionSpec):
        self.c = _cplx(c)
        self.spec = spec
        self.analytic = spec.analytic

    def children(self):
        return (self.spec,)

    def _sample(self, grid):
        return self.c * self.spec._sample(grid)

    def value(self, z):
        return self.c * self.spec.value(z)

    def log_abs(self, z):
        with np.errstate(divide="ignore"):
            return np.log(abs(self.c)) + self.spec.log_abs(z)

    def boundary_form(self):
        f = self.spec.boundary_form()
        return None if f is None else f.scale(self.c)

    def modsq_form(self):
        m = self.spec.modsq_form()
        return None if m is None else m.scale(abs(self.c) ** 2)

    def is_inner_like(self):
        return abs(abs(self.c) - 1.0) < 1e-15 and self.spec.is_inner_like()

    def to_json(self):
        return {"type": "scale", "c": _cplx_json(self.c), "spec": self.spec.to_json()}


class Conjugate(FunctionSpec):
    def __init__(self, spec: FunctionSpec):
        self.spec = spec

    def children(self):
        return (self.spec,)

    def _sample(self, grid):
        return np.conj(self.spec._sample(grid))

    def boundary_form(self):
        f = self.spec.boundary_form()
        return None if f is None else f.conj()

    def modsq_form(self):
        return self.spec.modsq_form()

    def to_json(self):
        return {"type": "conjugate", "spec": self.spec.to_json()}


class Modulus(FunctionSpec):
    def __init__(self, spec: FunctionSpec):
        self.spec = spec

    def children(self):
        return (self.spec,)

    def _sample(self, grid):
        return np.abs(self.spec._sample(grid)).astype(complex)

    def boundary_form(self):
        f = self.spec.boundary_form()
        if isinstance(f, StepForm):
            return f.modulus()
        if isinstance(f, TrigPoly) and f.is_const():
            return TrigPoly.const(abs(f.const_value()))
        if self.spec.is_inner_like():
            return TrigPoly.const(1.0)
        return None

    def modsq_form(self):
        return self.spec.modsq_form()

    def to_json(self):
        return {"type": "modulus", "spec": self.spec.to_json()}


def sample(spec: FunctionSpec, grid: CircleGrid) -> BoundaryFunction:
    """Evaluate ``spec`` at the nodes of ``grid``."""
    return spec.sample(grid)


# -- exact interior route ------------------------------------------------------


def _exact_poisson(spec: FunctionSpec):
    """Callable ``z -> Pf(z)`` in closed form, or ``None``."""
    if spec.analytic:
        return spec.value
    if isinstance(spec, Conjugate):
        inner = _exact_poisson(spec.spec)
        return None if inner is None else (lambda z: np.conj(inner(z)))
    if isinstance(spec, Scale):
        inner = _exact_poisson(spec.spec)
        return None if inner is None else (lambda z: spec.c * inner(z))
    if isinstance(spec, Sum):
        parts = [_exact_poisson(it) for it in spec.items]
        if all(p is not None for p in parts):
            return lambda z: sum(p(z) for p in parts)
    form = spec.boundary_form()
    if form is not None:
        return form.poisson
    return None


class ExactParts:
    """Closed-form ``P(|f|^2)`` and ``Pf`` for a spec, plus a log-deficit key.

    ``log_deficit(z)`` is ``log |f(z)|^2`` when ``P(|f|^2)`` is a constant and
    ``f`` is analytic: then ``Phi_f = const - |f(z)|^2`` and the log form keeps
    comparisons strict after ``Phi`` rounds to its supremum.
    """

    def __init__(self, modsq, pf, spec: FunctionSpec):
        self.modsq = modsq
        self.pf = pf
        self.spec = spec
        self.const_modsq = modsq.is_const()
        self.route = "hybrid" if isinstance(modsq, SampledForm) else "exact"

    def p_modsq(self, z):
        return np.real(self.modsq.poisson(z))

    def phi(self, z):
        z = as_complex(z)
        out = self.p_modsq(z) - np.abs(self.pf(z)) ** 2
        return float(out) if np.ndim(out) == 0 else np.asarray(out, dtype=float)

    def log_deficit(self, z):
        if not (self.const_modsq and self.spec.analytic):
            return None
        return 2.0 * np.asarray(self.spec.log_abs(as_complex(z)), dtype=float)


def exact_parts(spec: FunctionSpec) -> ExactParts | None:
    """Closed-form Garsia route for ``spec`` or ``None`` if unavailable."""
    if not isinstance(spec, FunctionSpec):
        return None
    if isinstance(spec, Sum):
        # Phi ignores additive constants, so they are dropped before analysis
        rest = [it for it in spec.items if not isinstance(it, Constant)]
        if not rest:
            return exact_parts(Constant(0.0))
        if len(rest) < len(spec.items):
            return exact_parts(rest[0] if len(rest) == 1 else Sum(rest))
    modsq = spec.modsq_form()
    pf = _exact_poisson(spec)
    if modsq is None or pf is None:
        return None
    return ExactParts(modsq, pf, spec)


# -- JSON ---------------------------------------------------------------------


def _need(node: dict, key: str, path: str):
    if key not in node:
        raise SpecError(f"missing field {key!r}", path)
    return node[key]


def _num(v, path: str) -> complex:
    try:
        return _cplx(v)
    except (TypeError, ValueError, ParameterError) as exc:
        raise SpecError(f"not a number: {v!r}", path) from exc


def _pairs(v, path: str) -> list:
    if not isinstance(v, list):
        raise SpecError("expected a list of pairs", path)
    out = []
    for i, p in enumerate(v):
        if not (isinstance(p, list) and len(p) == 2):
            raise SpecError("expected a [x, y] pair", f"{path}[{i}]")
        try:
            out.append((float(p[0]), float(p[1])))
        except (TypeError, ValueError) as exc:
            raise SpecError("pair entries must be real numbers", f"{path}[{i}]") from exc
    return out


def _parse_eta(node, path: str):
    if isinstance(node, list):
        return BoundaryFunction(CircleGrid(len(node)), np.asarray(node, dtype=float))
    if not isinstance(node, dict):
        raise SpecError("eta must be an object or a list of samples", path)
    kind = node.get("type")
    if kind == "halfplus":
        return PolynomialModulus([0.5, 0.5])
    if kind == "polynomial_modulus":
        coeffs = _need(node, "coeffs", path)
        return PolynomialModulus([_num(c, f"{path}.coeffs[{i}]") for i, c in enumerate(coeffs)])
    if kind == "step":
        arcs = _pairs(_need(node, "arcs", path), f"{path}.arcs")
        if "log_values" in node:
            logs = [float(v) for v in node["log_values"]]
        else:
            vals = [float(v) for v in _need(node, "values", path)]
            if any(v <= 0 for v in vals):
                raise SpecError("step values must be positive", f"{path}.values")
            logs = list(np.log(vals))
        base = float(node.get("log_base", np.log(float(node.get("base", 1.0)))))
        return StepModulus(arcs, logs, base)
    if kind == "samples":
        vals = _need(node, "values", path)
        try:
            return BoundaryFunction(CircleGrid(len(vals)), np.asarray(vals, dtype=float))
        except ParameterError as exc:
            raise SpecError(str(exc), f"{path}.values") from exc
    return _parse(node, path)


def _parse(node, path: str = "$") -> FunctionSpec:
    if not isinstance(node, dict):
        raise SpecError("expected an object with a 'type' field", path)
    kind = _need(node, "type", path)
    try:
        if kind == "constant":
            return Constant(_num(_need(node, "value", path), f"{path}.value"))
        if kind == "identity":
            return Identity()
        if kind == "polynomial":
            coeffs = _need(node, "coeffs", path)
            return Polynomial(tuple(_num(c, f"{path}.coeffs[{i}]") for i, c in enumerate(coeffs)))
        if kind == "indicator":
            return Indicator(ArcSet.from_pairs(_pairs(_need(node, "arcs", path), f"{path}.arcs")))
        if kind == "blaschke":
            zeros = _pairs(_need(node, "zeros", path), f"{path}.zeros")
            for i, (r, _) in enumerate(zeros):
                if not 0.0 <= r < 1.0:
                    raise SpecError(f"zero radius must lie in [0, 1), got {r}", f"{path}.zeros[{i}]")
            const = _num(node.get("const", 1.0), f"{path}.const")
            polar = tuple((float(r), float(t)) for r, t in zeros)
            return Blaschke(BlaschkeSpec(tuple(zeros), const), polar)
        if kind == "singular":
            atoms = _pairs(_need(node, "atoms", path), f"{path}.atoms")
            return SingularInner(SingularSpec(tuple(atoms)), bool(node.get("trace", False)))
        if kind == "outer":
            return Outer(_parse_eta(_need(node, "eta", path), f"{path}.eta"))
        if kind in ("sum", "product"):
            key = "terms" if kind == "sum" else "factors"
            items = _need(node, key, path)
            if not isinstance(items, list) or not items:
                raise SpecError(f"{key!r} must be a nonempty list", path)
            parsed = [_parse(it, f"{path}.{key}[{i}]") for i, it in enumerate(items)]
            return Sum(parsed) if kind == "sum" else Product(parsed)
        if kind == "scale":
            return Scale(_num(_need(node, "c", path), f"{path}.c"), _parse(_need(node, "spec", path), f"{path}.spec"))
        if kind == "conjugate":
            return Conjugate(_parse(_need(node, "spec", path), f"{path}.spec"))
        if kind == "modulus":
            return Modulus(_parse(_need(node, "spec", path), f"{path}.spec"))
    except SpecError:
        raise
    except (ParameterError, ShapeError, ValueError) as exc:
        raise SpecError(str(exc), path) from exc
    raise SpecError(f"unknown spec type {kind!r}", f"{path}.type")


def parse_spec(obj: Any) -> FunctionSpec:
    """Build a spec from decoded JSON; errors carry a ``$.path`` locator."""
    return _parse(obj, "$")


def load_spec(text: str) -> FunctionSpec:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})") from exc
    return parse_spec(obj)


def dump_spec(spec: FunctionSpec) -> str:
    """Canonical JSON (sorted keys, compact separators)."""
    return json.dumps(spec.to_json(), sort_keys=True, separators=(",", ":"))
