"""Residual of a polynomial differential expression for bound truncated series.

An expression is a sum of terms ``P(vars) * prod_f (D^m_f unknown_f) ** power_f`` where P is a polynomial in the
independent variables whose coefficients may depend on named parameters. Evaluation substitutes series for the
unknowns and returns the residual series together with the multi-index window inside which every coefficient is
fully determined by the inputs.
"""

import logging
import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Mapping, Optional, Sequence, Set, Tuple

from seriesflow.core.series import (Backend, Index, Scalar, SeriesK, add, diffK, evalK, identity, infer_backend,
                                    is_zero, max_abs, mul_polynomial, mulK, powK, truncate, zeros)
from seriesflow.util.constants import FLOAT_TOLERANCE
from seriesflow.util.misc import (BackendMismatch, CapMismatch, InvalidParameter, OrderError, UnboundParameter,
                                  UnboundUnknown)

log = logging.getLogger(__name__)

Monomial = Tuple[str, ...]


class ParamCoeff:
    """Polynomial in named parameters with rational coefficients, such as ``2*alpha + 2*delta``.

    >>> str(ParamCoeff.param("alpha", 2) + ParamCoeff.param("delta", 2))
    '2*alpha + 2*delta'
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Sequence[str], object]] = None):
        cleaned: Dict[Monomial, Fraction] = {}
        for monomial, value in (terms or {}).items():
            key = tuple(sorted(monomial))
            cleaned[key] = cleaned.get(key, Fraction(0)) + Fraction(value)
        self.terms = {k: v for k, v in cleaned.items() if v != 0}

    @classmethod
    def const(cls, value) -> "ParamCoeff":
        return cls({(): value})

    @classmethod
    def param(cls, name: str, value=1) -> "ParamCoeff":
        return cls({(name,): value})

    @staticmethod
    def lift(value) -> "ParamCoeff":
        if isinstance(value, ParamCoeff):
            return value
        if isinstance(value, numbers.Rational):
            return ParamCoeff.const(value)
        raise InvalidParameter(f"Expression coefficients must be rational, got {value!r}.")

    def parameters(self) -> Set[str]:
        return {name for monomial in self.terms for name in monomial}

    def is_zero(self) -> bool:
        return not self.terms

    def bind(self, values: Mapping[str, object], convert: Optional[Callable] = None):
        """Evaluate with the given parameter values.

        Args:
            values: Parameter values by name.
            convert: Applied to the rational coefficients before they meet the values, e.g. float.
        """
        convert = convert or (lambda c: c)
        total = convert(Fraction(0))
        for monomial, coefficient in self.terms.items():
            value = convert(coefficient)
            for name in monomial:
                if name not in values:
                    raise UnboundParameter(f"No value given for parameter '{name}'.")
                value = value * values[name]
            total = total + value
        return total

    def __add__(self, other):
        other = ParamCoeff.lift(other)
        merged = dict(self.terms)
        for k, v in other.terms.items():
            merged[k] = merged.get(k, Fraction(0)) + v
        return ParamCoeff(merged)

    __radd__ = __add__

    def __neg__(self):
        return ParamCoeff({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-ParamCoeff.lift(other))

    def __mul__(self, other):
        other = ParamCoeff.lift(other)
        product: Dict[Monomial, Fraction] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                product[key] = product.get(key, Fraction(0)) + v1 * v2
        return ParamCoeff(product)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, numbers.Rational):
            other = ParamCoeff.const(other)
        if not isinstance(other, ParamCoeff):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for monomial, value in sorted(self.terms.items()):
            names = "*".join(monomial)
            if not names:
                parts.append(str(value))
            elif value == 1:
                parts.append(names)
            elif value == -1:
                parts.append(f"-{names}")
            else:
                parts.append(f"{value}*{names}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"ParamCoeff({self})"


@dataclass(frozen=True)
class Factor:
    """An unknown differentiated ``derivative[a]`` times along each axis, raised to a power."""

    unknown: str
    derivative: Index
    power: int = 1


@dataclass(frozen=True)
class Term:
    """Polynomial coefficient times a product of factors."""

    polynomial: Tuple[Tuple[Index, ParamCoeff], ...]
    factors: Tuple[Factor, ...] = ()
    label: str = ""


@dataclass(frozen=True)
class PolyDiffExpression:
    """Sum of terms over a fixed set of independent variables."""

    axes: Tuple[str, ...]
    terms: Tuple[Term, ...]
    name: str = ""

    def __post_init__(self):
        for term in self.terms:
            for degree, _ in term.polynomial:
                if len(degree) != len(self.axes) or any(d < 0 for d in degree):
                    raise CapMismatch(f"Polynomial degree {degree} does not fit axes {self.axes}.")
            for f in term.factors:
                if len(f.derivative) != len(self.axes) or any(d < 0 for d in f.derivative):
                    raise CapMismatch(f"Derivative orders {f.derivative} of '{f.unknown}' do not fit axes "
                                      f"{self.axes}.")
                if f.power < 1:
                    raise InvalidParameter(f"Factor powers must be at least 1, got {f.power}.")

    def __add__(self, other: "PolyDiffExpression") -> "PolyDiffExpression":
        if self.axes != other.axes:
            raise CapMismatch(f"Cannot add expressions over axes {self.axes} and {other.axes}.")
        return PolyDiffExpression(self.axes, self.terms + other.terms, self.name or other.name)

    def __neg__(self) -> "PolyDiffExpression":
        terms = tuple(Term(tuple((d, -c) for d, c in t.polynomial), t.factors, t.label) for t in self.terms)
        return PolyDiffExpression(self.axes, terms, self.name)

    def __sub__(self, other: "PolyDiffExpression") -> "PolyDiffExpression":
        return self + (-other)

    def unknowns(self) -> Set[str]:
        return {f.unknown for t in self.terms for f in t.factors}

    def parameters(self) -> Set[str]:
        return {p for t in self.terms for _, c in t.polynomial for p in c.parameters()}

    def labels(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(t.label for t in self.terms))

    def select(self, label: str) -> "PolyDiffExpression":
        """Sub-expression made of the terms with the given label."""
        return PolyDiffExpression(self.axes, tuple(t for t in self.terms if t.label == label), self.name)

    def describe(self) -> str:
        lines = []
        for t in self.terms:
            poly = " + ".join(f"({c})*{_monomial_str(self.axes, d)}" for d, c in t.polynomial)
            factors = " * ".join(_factor_str(self.axes, f) for f in t.factors) or "1"
            lines.append(f"[{poly}] * {factors}")
        return "\n".join(lines)


def _monomial_str(axes, degree) -> str:
    parts = [a if d == 1 else f"{a}^{d}" for a, d in zip(axes, degree) if d]
    return "*".join(parts) or "1"


def _factor_str(axes, f: Factor) -> str:
    derivs = "".join(a * d for a, d in zip(axes, f.derivative))
    name = f"{f.unknown}_{derivs}" if derivs else f.unknown
    return name if f.power == 1 else f"{name}^{f.power}"


def factor(unknown: str, axes: Sequence[str], power: int = 1, **orders: int) -> Factor:
    """Build a factor from derivative orders given by axis name, e.g. ``factor("u", axes, x=1)``."""
    unknown_axes = set(orders) - set(axes)
    if unknown_axes:
        raise CapMismatch(f"Unknown axes {sorted(unknown_axes)} for derivative of '{unknown}'.")
    return Factor(unknown, tuple(orders.get(a, 0) for a in axes), power)


def term(axes: Sequence[str], polynomial: Mapping, *factors: Factor, label: str = "") -> Term:
    """Build a term. Polynomial keys are multidegrees, or plain integers for a single axis."""
    poly: Dict[Index, ParamCoeff] = {}
    for degree, coefficient in polynomial.items():
        if isinstance(degree, numbers.Integral):
            degree = (int(degree),)
        degree = tuple(degree)
        poly[degree] = poly.get(degree, ParamCoeff()) + ParamCoeff.lift(coefficient)
    items = tuple((d, c) for d, c in sorted(poly.items(), key=lambda item: item[0]) if not c.is_zero())
    return Term(items, tuple(factors), label)


@dataclass
class ResidualReport:
    """Outcome of evaluating an expression on bound series."""

    residual: Optional[SeriesK]
    trustworthy_order: Index
    max_abs: Scalar
    exact_zero: bool
    conclusive: bool
    backend: Backend
    tolerance: Optional[float] = None
    label: str = ""

    @property
    def passed(self) -> bool:
        return self.conclusive and self.exact_zero

    @property
    def first_nonzero(self) -> Optional[Index]:
        """Multi-index of the first coefficient that breaks the zero verdict, in lexicographic order."""
        if self.residual is None:
            return None
        limit = self.tolerance or 0.0
        for index, value in self.residual.items():
            if self.backend is Backend.EXACT or abs(value) > limit:
                return index
        return None

    def summary(self) -> str:
        if not self.conclusive:
            return f"{self.label or 'residual'}: inconclusive, no trustworthy coefficients"
        verdict = "zero" if self.exact_zero else f"NONZERO at {self.first_nonzero}"
        return (f"{self.label or 'residual'}: {verdict} up to order {self.trustworthy_order} "
                f"(max |r| = {float(self.max_abs):.3g})")

    def as_dict(self) -> dict:
        """Plain values for the verdict section of a document."""
        first = self.first_nonzero
        return {
            "label": self.label,
            "passed": self.passed,
            "exact_zero": self.exact_zero,
            "conclusive": self.conclusive,
            "trustworthy_order": list(self.trustworthy_order),
            "max_abs": self.max_abs,
            "first_nonzero": list(first) if first is not None else None,
            "tolerance": self.tolerance
        }


@dataclass
class _BoundTerm:
    polynomial: Dict[Index, Scalar]
    factors: Tuple[Factor, ...]
    order: Optional[Index] = None
    lowest: Index = field(default_factory=tuple)


def _backend_for(expression: PolyDiffExpression, bindings: Mapping[str, SeriesK],
                 params: Mapping[str, object]) -> Backend:
    used = [bindings[u] for u in sorted(expression.unknowns())]
    backends = {s.backend for s in used}
    if len(backends) > 1:
        raise BackendMismatch("All bound series must use the same backend.")
    if backends:
        return backends.pop()
    return infer_backend(params.values())


def _check_bindings(expression: PolyDiffExpression, bindings: Mapping[str, SeriesK]):
    for unknown in sorted(expression.unknowns()):
        if unknown not in bindings:
            raise UnboundUnknown(f"Expression refers to unknown '{unknown}' but no series is bound to it.")
        if bindings[unknown].axes != expression.axes:
            raise CapMismatch(f"Series bound to '{unknown}' has axes {bindings[unknown].axes}, "
                              f"expected {expression.axes}.")


def _bind_parameters(params: Mapping[str, object], backend: Backend) -> Dict[str, Scalar]:
    return {name: backend.coerce(value) for name, value in params.items()}


def _bind_terms(expression: PolyDiffExpression, params: Dict[str, Scalar], backend: Backend,
                bindings: Mapping[str, SeriesK]):
    convert = float if backend is Backend.FLOAT else None
    bound = []
    for t in expression.terms:
        poly = {}
        for degree, coefficient in t.polynomial:
            value = coefficient.bind(params, convert)
            if value != 0:
                poly[degree] = value
        if not poly:
            continue
        lowest = tuple(min(d[a] for d in poly) for a in range(len(expression.axes)))
        order = None
        if t.factors:
            order = tuple(
                min(bindings[f.unknown].caps[a] - f.derivative[a] for f in t.factors) + lowest[a]
                for a in range(len(expression.axes)))
        bound.append(_BoundTerm(poly, t.factors, order, lowest))
    return bound


def trustworthy_order(expression: PolyDiffExpression, bindings: Mapping[str, SeriesK],
                      params: Optional[Mapping[str, object]] = None) -> Index:
    """Window of multi-indices whose residual coefficients are fully determined by the bound series."""
    params = params or {}
    _check_bindings(expression, bindings)
    backend = _backend_for(expression, bindings, params)
    bound = _bind_terms(expression, _bind_parameters(params, backend), backend, bindings)
    return _window(bound, len(expression.axes))


def _window(bound, ndim: int) -> Index:
    finite = [b.order for b in bound if b.order is not None]
    if finite:
        return tuple(min(o[a] for o in finite) for a in range(ndim))
    if bound:
        return tuple(max(d[a] for b in bound for d in b.polynomial) for a in range(ndim))
    return (0,) * ndim


def _factor_series(f: Factor, series: SeriesK, need: Index, cache: Dict) -> SeriesK:
    key = (f.unknown, f.derivative, f.power, need)
    if key not in cache:
        result = truncate(series, tuple(n + d for n, d in zip(need, f.derivative)))
        for axis, m in enumerate(f.derivative):
            result = diffK(result, axis, m)
        cache[key] = powK(result, f.power)
    return cache[key]


def evaluate(expression: PolyDiffExpression, bindings: Mapping[str, SeriesK],
             params: Optional[Mapping[str, object]] = None, tolerance: Optional[float] = None) -> ResidualReport:
    """Substitute series into an expression and return the residual within its trustworthy window.

    Args:
        expression: The expression to evaluate.
        bindings: Series for every unknown the expression refers to, all over the expression's axes.
        params: Values for the parameters used by the polynomial coefficients.
        tolerance: Relative tolerance for the float backend verdict. The absolute threshold is
            tolerance * (1 + largest input coefficient magnitude).
    """
    params = params or {}
    _check_bindings(expression, bindings)
    backend = _backend_for(expression, bindings, params)
    bound = _bind_terms(expression, _bind_parameters(params, backend), backend, bindings)
    window = _window(bound, len(expression.axes))
    ndim = len(expression.axes)

    if any(w < 0 for w in window):
        log.warning("Residual of %s has no trustworthy coefficients (window %s)", expression.name or "expression",
                    window)
        return ResidualReport(None, window, backend.zero(), True, False, backend, label=expression.name)

    log.debug("Evaluating %s with %d terms, trustworthy order %s", expression.name or "expression", len(bound),
              window)
    residual = zeros(window, expression.axes, backend)
    cache: Dict = {}
    for b in bound:
        need = tuple(w - lo for w, lo in zip(window, b.lowest))
        if any(n < 0 for n in need):
            # Every monomial of this term lies beyond the window
            continue
        product = None
        for f in b.factors:
            series = _factor_series(f, bindings[f.unknown], need, cache)
            product = series if product is None else mulK(product, series)
        if product is None:
            product = identity(need, expression.axes, backend)
        residual = add(residual, mul_polynomial(product, b.polynomial, caps=window))

    scaled = None
    if backend is Backend.FLOAT:
        inputs = [max_abs(bindings[u]) for u in expression.unknowns()]
        scaled = (FLOAT_TOLERANCE if tolerance is None else tolerance) * (1 + max(inputs, default=0.0))
        zero = is_zero(residual, scaled)
    else:
        zero = is_zero(residual)
    report = ResidualReport(residual, window, max_abs(residual), zero, True, backend, scaled, expression.name)
    if not zero:
        log.debug("Residual of %s is nonzero at %s", expression.name or "expression", report.first_nonzero)
    return report


def coefficient(expression: PolyDiffExpression, bindings: Mapping[str, SeriesK], params: Optional[Mapping] = None,
                index: Sequence[int] = ()) -> Scalar:
    """Single residual coefficient. Raises OrderError outside the trustworthy window."""
    report = evaluate(expression, bindings, params)
    if report.residual is None:
        raise OrderError(f"Residual has no trustworthy coefficients (window {report.trustworthy_order}).")
    return report.residual[tuple(index)]


def evaluate_pointwise(expression: PolyDiffExpression, bindings: Mapping[str, SeriesK],
                       params: Optional[Mapping[str, object]] = None,
                       point: Sequence = ()) -> Scalar:
    """Value of the expression at a point when the truncated series are taken as polynomials."""
    params = params or {}
    _check_bindings(expression, bindings)
    backend = _backend_for(expression, bindings, params)
    values = _bind_parameters(params, backend)
    convert = float if backend is Backend.FLOAT else None
    point = [float(x) for x in point] if backend is Backend.FLOAT else list(point)
    if len(point) != len(expression.axes):
        raise CapMismatch(f"Point {point} does not match axes {expression.axes}.")

    cache: Dict[Tuple[str, Index], Scalar] = {}

    def factor_value(f: Factor):
        key = (f.unknown, f.derivative)
        if key not in cache:
            series = bindings[f.unknown]
            if any(m > c for m, c in zip(f.derivative, series.caps)):
                cache[key] = backend.zero()
            else:
                for axis, m in enumerate(f.derivative):
                    series = diffK(series, axis, m)
                cache[key] = evalK(series, point)
        return cache[key] ** f.power

    total = backend.zero()
    for t in expression.terms:
        poly_value = backend.zero()
        for degree, c in t.polynomial:
            poly_value += c.bind(values, convert) * math.prod(x ** d for x, d in zip(point, degree))
        if poly_value == 0:
            continue
        for f in t.factors:
            poly_value = poly_value * factor_value(f)
        total += poly_value
    return total
