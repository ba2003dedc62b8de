"""Dense truncated power series in one or more variables, over exact rationals or IEEE doubles.

A series over the axes ``(x1, ..., xK)`` stores the coefficient of ``x1**i1 * ... * xK**iK`` for every multi-index
with ``0 <= ia <= cap_a``. Every stored coefficient is trustworthy, so the caps are the order of the series, and
reading past them is an error rather than an implicit zero. Operations return series whose caps shrink to the
multi-indices that are fully determined by their inputs.

    >>> a = Series1([1, 1])
    >>> mul1(a, a).coefficients()
    [Fraction(1, 1), Fraction(2, 1)]
"""

import logging
import math
import numbers
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from seriesflow.util.misc import BackendMismatch, CapMismatch, InvalidParameter, OrderError

log = logging.getLogger(__name__)

Scalar = Union[Fraction, float]
Index = Tuple[int, ...]
AxisRef = Union[str, int]


class Backend(Enum):
    """Numeric representation used for all coefficients of a series."""

    EXACT = "exact"
    FLOAT = "float"

    @property
    def dtype(self):
        """Numpy dtype used for coefficient arrays."""
        return object if self is Backend.EXACT else np.float64

    def zero(self) -> Scalar:
        return Fraction(0) if self is Backend.EXACT else 0.0

    def one(self) -> Scalar:
        return Fraction(1) if self is Backend.EXACT else 1.0

    def coerce(self, value) -> Scalar:
        """Convert a literal to this backend, refusing to silently mix exact and float values."""
        if isinstance(value, bool):
            raise InvalidParameter(f"Boolean {value!r} is not a coefficient.")
        if self is Backend.EXACT:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, numbers.Integral):
                return Fraction(int(value))
            if isinstance(value, numbers.Real):
                raise BackendMismatch(f"Float value {value!r} given to the exact backend. Use a rational such as "
                                      f"'1/10', or switch to the float backend.")
        else:
            if isinstance(value, Fraction):
                raise BackendMismatch(f"Exact value {value} given to the float backend. Convert the series "
                                      f"explicitly with to_backend().")
            if isinstance(value, numbers.Real):
                return float(value)
        raise InvalidParameter(f"Unsupported coefficient type: {type(value).__name__}")

    @classmethod
    def of(cls, value) -> Optional["Backend"]:
        """Return the backend a literal belongs to, or None for integers which fit both."""
        if isinstance(value, Fraction):
            return cls.EXACT
        if isinstance(value, numbers.Integral):
            return None
        if isinstance(value, numbers.Real):
            return cls.FLOAT
        return None


def infer_backend(values: Iterable, default: Backend = Backend.EXACT) -> Backend:
    """Find the common backend of a collection of literals.

    Raises:
        BackendMismatch: If both exact rationals and floats are present.
    """
    found = None
    for value in values:
        backend = Backend.of(value)
        if backend is None:
            continue
        if found is None:
            found = backend
        elif backend is not found:
            raise BackendMismatch("Exact rationals and floats cannot be mixed in one computation.")
    return found or default


def parse_scalar(text: Union[str, int, float, Fraction], backend: Backend) -> Scalar:
    """Parse a user supplied number such as '5/48', '-3' or '0.25' into the given backend.

    >>> parse_scalar("5/48", Backend.EXACT)
    Fraction(5, 48)
    >>> parse_scalar("1/4", Backend.FLOAT)
    0.25
    """
    if not isinstance(text, str):
        if backend is Backend.FLOAT and isinstance(text, Fraction):
            return float(text)
        return backend.coerce(text)
    try:
        if backend is Backend.EXACT:
            return Fraction(text.strip())
        if "/" in text:
            return float(Fraction(text.strip()))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise InvalidParameter(f"Could not read {text!r} as a number.")


def to_mpf(value) -> "mpmath.mpf":
    """Convert a coefficient or evaluation point to an mpmath float at the current working precision."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


class SeriesK:
    """Truncated power series over named axes, with one cap (order) per axis."""

    __slots__ = ("_array", "axes", "backend")

    def __init__(self, coefficients, axes: Sequence[str], backend: Optional[Backend] = None):
        """Create a series from a nested sequence or array of coefficients.

        Args:
            coefficients: Coefficients indexed by multi-index. The shape along each axis is cap + 1.
            axes: Names of the variables, one per array dimension.
            backend: Backend to use. Inferred from the coefficient types if not given.
        """
        axes = tuple(axes)
        if len(set(axes)) != len(axes) or not axes:
            raise CapMismatch(f"Axis names must be unique and non-empty, got {axes}.")
        raw = np.asarray(coefficients, dtype=object)
        if raw.ndim != len(axes):
            raise CapMismatch(f"Coefficient array has {raw.ndim} dimensions but {len(axes)} axes were named.")
        if 0 in raw.shape:
            raise OrderError("A series needs at least its constant coefficient along every axis.")
        if backend is None:
            backend = infer_backend(raw.flat)
        values = [backend.coerce(v) for v in raw.flat]
        array = np.empty(raw.shape, dtype=backend.dtype)
        array.flat[:] = values
        array.flags.writeable = False
        self._array = array
        self.axes = axes
        self.backend = backend

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the coefficient array."""
        return self._array

    @property
    def caps(self) -> Index:
        return tuple(n - 1 for n in self._array.shape)

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def axis_index(self, axis: AxisRef) -> int:
        """Resolve an axis name or position."""
        if isinstance(axis, str):
            try:
                return self.axes.index(axis)
            except ValueError:
                raise CapMismatch(f"Series has no axis '{axis}', axes are {self.axes}.")
        if not 0 <= axis < self.ndim:
            raise CapMismatch(f"Axis position {axis} out of range for axes {self.axes}.")
        return axis

    def __getitem__(self, index: Union[int, Sequence[int]]) -> Scalar:
        if isinstance(index, numbers.Integral):
            index = (index,)
        index = tuple(int(i) for i in index)
        if len(index) != self.ndim:
            raise CapMismatch(f"Index {index} does not match axes {self.axes}.")
        for i, cap, axis in zip(index, self.caps, self.axes):
            if i < 0 or i > cap:
                raise OrderError(f"Coefficient {index} is beyond the trustworthy order {self.caps} "
                                 f"(axis '{axis}').")
        value = self._array[index]
        return float(value) if self.backend is Backend.FLOAT else value

    def items(self) -> Iterator[Tuple[Index, Scalar]]:
        """Yield (multi-index, coefficient) for every nonzero coefficient in lexicographic order."""
        for index in zip(*np.nonzero(self._array)):
            index = tuple(int(i) for i in index)
            yield index, self[index]

    def __eq__(self, other):
        if not isinstance(other, SeriesK):
            return NotImplemented
        return (self.axes == other.axes and self.backend is other.backend and self.caps == other.caps
                and bool(np.all(self._array == other._array)))

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(axes={self.axes}, caps={self.caps}, backend={self.backend.value})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, neg(other))

    def __neg__(self):
        return neg(self)

    def __mul__(self, other):
        if isinstance(other, SeriesK):
            return mulK(self, other)
        return scale(self, other)

    def __rmul__(self, other):
        return scale(self, other)

    def __pow__(self, n: int):
        return powK(self, n)


class Series1(SeriesK):
    """Truncated power series in a single variable."""

    __slots__ = ()

    def __init__(self, coefficients, backend: Optional[Backend] = None, axis: str = "x"):
        super().__init__(coefficients, (axis,), backend)

    @property
    def order(self) -> int:
        return self.caps[0]

    def coefficients(self) -> List[Scalar]:
        return [self[i] for i in range(self.order + 1)]


def _new(array: np.ndarray, axes: Sequence[str], backend: Backend) -> SeriesK:
    """Wrap an already validated array without copying or coercing it."""
    obj = object.__new__(Series1 if len(axes) == 1 else SeriesK)
    array.flags.writeable = False
    obj._array = array
    obj.axes = tuple(axes)
    obj.backend = backend
    return obj


def _zeros_array(caps: Sequence[int], backend: Backend) -> np.ndarray:
    shape = tuple(c + 1 for c in caps)
    if backend is Backend.EXACT:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape, dtype=np.float64)


def weights(values: Iterable[int], backend: Backend) -> np.ndarray:
    """Build an array of integer weights in the representation of the backend.

    Exact arrays keep Python integers so that products with Fractions stay exact.
    """
    values = list(values)
    if backend is Backend.EXACT:
        array = np.empty(len(values), dtype=object)
        array[:] = [int(v) if isinstance(v, numbers.Integral) else v for v in values]
        return array
    return np.array(values, dtype=np.float64)


def _check_caps(caps: Sequence[int], axes: Sequence[str]) -> Index:
    caps = tuple(int(c) for c in caps)
    if len(caps) != len(axes):
        raise CapMismatch(f"Caps {caps} do not match axes {tuple(axes)}.")
    if any(c < 0 for c in caps):
        raise OrderError(f"Caps must be non-negative, got {caps}.")
    return caps


def _check_compatible(a: SeriesK, b: SeriesK):
    if a.backend is not b.backend:
        raise BackendMismatch(f"Cannot combine a {a.backend.value} series with a {b.backend.value} series.")
    if a.axes != b.axes:
        raise CapMismatch(f"Cannot combine series over axes {a.axes} and {b.axes}.")


def _box(array: np.ndarray, caps: Sequence[int]) -> np.ndarray:
    return array[tuple(slice(0, c + 1) for c in caps)]


def zeros(caps: Sequence[int], axes: Sequence[str], backend: Backend = Backend.EXACT) -> SeriesK:
    """Series with all coefficients zero up to the given caps."""
    caps = _check_caps(caps, axes)
    return _new(_zeros_array(caps, backend), axes, backend)


def constant(value, caps: Sequence[int], axes: Sequence[str], backend: Backend = Backend.EXACT) -> SeriesK:
    """Series equal to a constant, trustworthy up to the given caps."""
    caps = _check_caps(caps, axes)
    array = _zeros_array(caps, backend)
    array[(0,) * len(caps)] = backend.coerce(value)
    return _new(array, axes, backend)


def identity(caps: Sequence[int], axes: Sequence[str], backend: Backend = Backend.EXACT) -> SeriesK:
    """The series 1 up to the given caps."""
    return constant(1, caps, axes, backend)


def monomial(degrees: Sequence[int], caps: Sequence[int], axes: Sequence[str], coefficient=1,
             backend: Backend = Backend.EXACT) -> SeriesK:
    """Series ``coefficient * prod x_a ** degrees_a``, with caps at least as large as the degrees."""
    caps = _check_caps(caps, axes)
    degrees = tuple(degrees)
    if any(d > c for d, c in zip(degrees, caps)):
        raise OrderError(f"Monomial degree {degrees} exceeds caps {caps}.")
    array = _zeros_array(caps, backend)
    array[degrees] = backend.coerce(coefficient)
    return _new(array, axes, backend)


def from_items(items: Iterable[Tuple[Sequence[int], Scalar]], caps: Sequence[int], axes: Sequence[str],
               backend: Backend) -> SeriesK:
    """Build a series from (multi-index, value) pairs. Missing entries are zero."""
    caps = _check_caps(caps, axes)
    array = _zeros_array(caps, backend)
    for index, value in items:
        index = tuple(int(i) for i in index)
        if len(index) != len(caps) or any(i < 0 or i > c for i, c in zip(index, caps)):
            raise CapMismatch(f"Coefficient index {index} lies outside caps {caps}.")
        array[index] = backend.coerce(value)
    return _new(array, axes, backend)


def from_array(array: np.ndarray, axes: Sequence[str], backend: Backend) -> SeriesK:
    """Copy a coefficient array that was computed in the given backend into a series."""
    array = np.array(array, dtype=backend.dtype, copy=True)
    if array.ndim != len(axes) or 0 in array.shape:
        raise CapMismatch(f"Array of shape {array.shape} does not fit axes {tuple(axes)}.")
    return _new(array, axes, backend)


def truncate(a: SeriesK, caps: Sequence[Optional[int]]) -> SeriesK:
    """Drop coefficients beyond the given caps. None keeps an axis as it is."""
    caps = tuple(c if n is None else n for c, n in zip(a.caps, caps))
    if len(caps) != a.ndim:
        raise CapMismatch(f"Caps {caps} do not match axes {a.axes}.")
    for new, old, axis in zip(caps, a.caps, a.axes):
        if new < 0 or new > old:
            raise OrderError(f"Cannot truncate axis '{axis}' of order {old} to {new}.")
    if caps == a.caps:
        return a
    return _new(_box(a.array, caps), a.axes, a.backend)


def to_backend(a: SeriesK, backend: Backend) -> SeriesK:
    """Convert a series to another backend. Floats become the exact rational of their binary value."""
    if a.backend is backend:
        return a
    convert = float if backend is Backend.FLOAT else Fraction
    array = np.empty(a.array.shape, dtype=backend.dtype)
    array.flat[:] = [convert(v) for v in a.array.flat]
    return _new(array, a.axes, backend)


def neg(a: SeriesK) -> SeriesK:
    return _new(-a.array, a.axes, a.backend)


def add(a: SeriesK, b: SeriesK) -> SeriesK:
    """Sum of two series, trustworthy up to the smaller cap along each axis."""
    _check_compatible(a, b)
    caps = tuple(min(p, q) for p, q in zip(a.caps, b.caps))
    return _new(_box(a.array, caps) + _box(b.array, caps), a.axes, a.backend)


def scale(a: SeriesK, value) -> SeriesK:
    """Multiply every coefficient by a scalar of the same backend."""
    value = a.backend.coerce(value)
    return _new(a.array * value, a.axes, a.backend)


def mulK(a: SeriesK, b: SeriesK) -> SeriesK:
    """Cauchy product, trustworthy up to the smaller cap along each axis.

    The loop runs over the nonzero coefficients of the sparser operand and adds a shifted, scaled copy of the other.
    """
    _check_compatible(a, b)
    caps = tuple(min(p, q) for p, q in zip(a.caps, b.caps))
    left, right = _box(a.array, caps), _box(b.array, caps)
    if np.count_nonzero(left) > np.count_nonzero(right):
        left, right = right, left
    out = _zeros_array(caps, a.backend)
    for index in zip(*np.nonzero(left)):
        dest = tuple(slice(i, c + 1) for i, c in zip(index, caps))
        source = tuple(slice(0, c - i + 1) for i, c in zip(index, caps))
        out[dest] += left[index] * right[source]
    return _new(out, a.axes, a.backend)


def powK(a: SeriesK, n: int) -> SeriesK:
    """Integer power by repeated multiplication. The zeroth power is the identity series of the same caps."""
    if n < 0:
        raise InvalidParameter(f"Negative powers of a series are not supported (got {n}).")
    if n == 0:
        return identity(a.caps, a.axes, a.backend)
    result = a
    for _ in range(n - 1):
        result = mulK(result, a)
    return result


def diffK(a: SeriesK, axis: AxisRef, m: int = 1) -> SeriesK:
    """Differentiate m times along one axis.

    The coefficient at s becomes ``(s+m)!/s! * c[s+m]`` and the cap along the axis drops by m.
    """
    if m < 0:
        raise InvalidParameter(f"Derivative order must be non-negative, got {m}.")
    ax = a.axis_index(axis)
    if m == 0:
        return a
    cap = a.caps[ax]
    if cap < m:
        raise OrderError(f"Cannot differentiate {m} times along '{a.axes[ax]}': the order there is only {cap}.")
    w = weights((math.prod(range(s + 1, s + m + 1)) for s in range(cap - m + 1)), a.backend)
    shape = [1] * a.ndim
    shape[ax] = len(w)
    sliced = a.array[(slice(None),) * ax + (slice(m, None),)]
    return _new(sliced * w.reshape(shape), a.axes, a.backend)


def shiftK(a: SeriesK, degrees: Union[Sequence[int], Mapping[str, int]]) -> SeriesK:
    """Multiply by a monomial: coefficients move up by the degree and so do the caps."""
    if isinstance(degrees, Mapping):
        degrees = tuple(degrees.get(axis, 0) for axis in a.axes)
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) != a.ndim or any(d < 0 for d in degrees):
        raise InvalidParameter(f"Invalid monomial degrees {degrees} for axes {a.axes}.")
    array = _zeros_array(tuple(c + d for c, d in zip(a.caps, degrees)), a.backend)
    array[tuple(slice(d, None) for d in degrees)] = a.array
    return _new(array, a.axes, a.backend)


def mul_polynomial(a: SeriesK, polynomial: Mapping[Sequence[int], Scalar],
                   caps: Optional[Sequence[int]] = None) -> SeriesK:
    """Multiply by a polynomial given as {multidegree: coefficient}.

    The product is trustworthy up to the caps of the series plus the smallest degree of the polynomial along each
    axis. A smaller window can be requested with caps.
    """
    terms = []
    for degree, coefficient in polynomial.items():
        degree = tuple(int(d) for d in degree)
        if len(degree) != a.ndim:
            raise CapMismatch(f"Polynomial degree {degree} does not match axes {a.axes}.")
        coefficient = a.backend.coerce(coefficient)
        if coefficient != 0:
            terms.append((degree, coefficient))
    if not terms:
        return zeros(caps if caps is not None else a.caps, a.axes, a.backend)
    lowest = tuple(min(d[ax] for d, _ in terms) for ax in range(a.ndim))
    limit = tuple(c + d for c, d in zip(a.caps, lowest))
    if caps is None:
        caps = limit
    caps = _check_caps(caps, a.axes)
    if any(c > m for c, m in zip(caps, limit)):
        raise OrderError(f"Requested caps {caps} exceed the trustworthy caps {limit} of the product.")
    out = _zeros_array(caps, a.backend)
    for degree, coefficient in terms:
        if any(d > c for d, c in zip(degree, caps)):
            continue
        dest = tuple(slice(d, c + 1) for d, c in zip(degree, caps))
        source = tuple(slice(0, c - d + 1) for d, c in zip(degree, caps))
        out[dest] += coefficient * a.array[source]
    return _new(out, a.axes, a.backend)


def evalK(a: SeriesK, point: Union[Sequence, Mapping[str, object]]):
    """Evaluate the truncated polynomial at a point with nested Horner schemes.

    The point may hold Fractions, floats or mpmath numbers. Exact coefficients are converted to mpmath when the
    point is an mpmath number.
    """
    if isinstance(point, Mapping):
        missing = [axis for axis in a.axes if axis not in point]
        if missing:
            raise CapMismatch(f"Evaluation point lacks a value for axes {missing}.")
        point = [point[axis] for axis in a.axes]
    point = list(point)
    if len(point) != a.ndim:
        raise CapMismatch(f"Evaluation point {point} does not match axes {a.axes}.")
    values = a.array
    if any(isinstance(x, (mpmath.mpf, mpmath.mpc)) for x in point):
        converted = np.empty(values.shape, dtype=object)
        converted.flat[:] = [to_mpf(v) for v in values.flat]
        values = converted
    elif a.backend is Backend.FLOAT:
        point = [float(x) for x in point]
    for x in reversed(point):
        acc = values[..., -1]
        for k in range(values.shape[-1] - 2, -1, -1):
            acc = acc * x + values[..., k]
        values = acc
    if isinstance(values, np.generic):
        return values.item()
    return values


def max_abs(a: SeriesK) -> Scalar:
    """Largest coefficient magnitude."""
    if a.backend is Backend.EXACT:
        return max(abs(v) for v in a.array.flat)
    return float(np.max(np.abs(a.array)))


def is_zero(a: SeriesK, tolerance: float = 0.0) -> bool:
    """Check whether every coefficient is zero (within tolerance for the float backend)."""
    if a.backend is Backend.EXACT:
        return not np.any(a.array)
    return bool(np.all(np.abs(a.array) <= tolerance))


def _require_single(a: SeriesK) -> SeriesK:
    if a.ndim != 1:
        raise CapMismatch(f"Expected a series in one variable, got axes {a.axes}.")
    return a


def mul1(a: SeriesK, b: SeriesK) -> SeriesK:
    return mulK(_require_single(a), _require_single(b))


def pow1(a: SeriesK, n: int) -> SeriesK:
    return powK(_require_single(a), n)


def diff1(a: SeriesK, m: int = 1) -> SeriesK:
    return diffK(_require_single(a), 0, m)


def shift_monomial(a: SeriesK, d: int) -> SeriesK:
    return shiftK(_require_single(a), (d,))


def eval1(a: SeriesK, x):
    return evalK(_require_single(a), (x,))
