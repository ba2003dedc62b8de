"""Recursive construction and verification of the series solution of the shifted sixth Painlevé equation."""

from dataclasses import dataclass, fields
from typing import Dict, Optional, Sequence, Tuple

from seriesflow.core.equations import builtin_pvi_shifted
from seriesflow.core.residual import ResidualReport, evaluate
from seriesflow.core.series import Backend, Scalar, Series1, infer_backend, parse_scalar
from seriesflow.modules.pvi.members import MEMBERS, Member, MemberSequences, signed_sum
from seriesflow.util.constants import FLOAT_TOLERANCE
from seriesflow.util.misc import InvalidParameter, MissingCoefficient, OrderError, SingularSeed, get_logger

log = get_logger(__name__)


@dataclass(frozen=True)
class PviParams:
    """The four constants of the sixth Painlevé equation."""

    alpha: Scalar
    beta: Scalar
    gamma: Scalar
    delta: Scalar

    def as_dict(self) -> Dict[str, Scalar]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def backend(self) -> Backend:
        return infer_backend(self.as_dict().values())

    def to(self, backend: Backend) -> "PviParams":
        return PviParams(**{k: parse_scalar(v, backend) for k, v in self.as_dict().items()})


def check_seed(a0: Scalar):
    """The recurrence divides by 8 a0 (a0^2 - 1)."""
    if a0 == 0 or a0 == 1 or a0 == -1:
        raise SingularSeed(f"a0 = {a0} makes the recurrence singular; a0 must not be 0, 1 or -1.")


@dataclass(frozen=True)
class PviSeed:
    """Initial values y(0) = a0 and y'(0) = a1 in the shifted variable."""

    a0: Scalar
    a1: Scalar

    def __post_init__(self):
        check_seed(self.a0)


def next_coefficient(i: int, coefficients: Sequence[Scalar], params: PviParams,
                     members: Sequence[Member] = MEMBERS) -> Scalar:
    """Compute a_(i+2) from a_0..a_(i+1).

    The coefficient identity at x^i is linear in a_(i+2), which only enters members 5 and 16 through their
    j = 0 summand. Solving for it gives

        a_(i+2) = (rhs* - lhs*) / (8 a0 (i+2)(i+1)(a0^2 - 1))

    where the starred sums use members 5 and 16 without that summand.
    """
    if i < 0:
        raise InvalidParameter(f"Recurrence index must be non-negative, got {i}.")
    if len(coefficients) < i + 2:
        raise MissingCoefficient(f"a_{i + 2} needs a_0..a_{i + 1}, but only {len(coefficients)} coefficients "
                                 f"are known.")
    a0 = coefficients[0]
    check_seed(a0)
    backend = infer_backend(list(coefficients) + list(params.as_dict().values()))
    convert = float if backend is Backend.FLOAT else None
    sequences = MemberSequences(coefficients[:i + 2])
    lhs, rhs = sequences.sides(i, params.as_dict(), members, convert, starred=True)
    return (rhs - lhs) / (8 * a0 * (i + 2) * (i + 1) * (a0 * a0 - 1))


def solve(params: PviParams, seed: PviSeed, order: int, backend: Optional[Backend] = None,
          members: Sequence[Member] = MEMBERS) -> Series1:
    """Series solution y = sum_(n <= order) a_n x^n around the shifted singular point x = 0.

    Args:
        params: Equation constants.
        seed: a0 and a1.
        order: Highest power to compute, at least 1.
        backend: Backend to compute in. Inferred from the parameter and seed types when not given.
    """
    if order < 1:
        raise InvalidParameter(f"The solution order must be at least 1, got {order}.")
    values = list(params.as_dict().values()) + [seed.a0, seed.a1]
    backend = backend or infer_backend(values)
    params = params.to(backend)
    coefficients = [backend.coerce(seed.a0), backend.coerce(seed.a1)]
    for i in range(order - 1):
        coefficients.append(next_coefficient(i, coefficients, params, members))
    log.debug("Computed %d PVI coefficients with the %s backend", order + 1, backend.value)
    return Series1(coefficients, backend)


def verify(series: Series1, params: PviParams, tolerance: Optional[float] = None) -> ResidualReport:
    """Residual of the shifted equation for a candidate series; zero up to order N - 2 for a solution of order N."""
    return evaluate(builtin_pvi_shifted(), {"y": series}, params.to(series.backend).as_dict(), tolerance)


@dataclass
class CrossCheck:
    """Comparison of the member expansion with the residual engine, coefficient by coefficient."""

    agree: bool
    i_max: int
    index: Optional[int] = None
    engine_value: Optional[Scalar] = None
    member_value: Optional[Scalar] = None
    terms: Tuple[str, ...] = ()

    def __bool__(self):
        return self.agree

    def summary(self) -> str:
        if self.agree:
            return f"Members agree with the residual engine for i = 0..{self.i_max}"
        return (f"Members disagree with the residual engine at i = {self.index}: engine {self.engine_value}, "
                f"members {self.member_value}; differing terms: {', '.join(self.terms) or '-'}")


def _close(a: Scalar, b: Scalar, backend: Backend, tolerance: float) -> bool:
    if backend is Backend.EXACT:
        return a == b
    return abs(a - b) <= tolerance * (1 + max(abs(a), abs(b)))


def members_vs_engine(i_max: int, params: PviParams, seed: Optional[PviSeed] = None,
                      series: Optional[Series1] = None, members: Sequence[Member] = MEMBERS,
                      tolerance: float = FLOAT_TOLERANCE) -> CrossCheck:
    """Check that the 65 members reproduce the residual engine's coefficients for i = 0..i_max.

    The series defaults to the solution of order i_max + 2 for the given seed. Any series of sufficient order can be
    given instead, in which case both sides are generally nonzero.
    """
    if series is None:
        if seed is None:
            raise InvalidParameter("Either a seed or a series is needed for the cross-check.")
        series = solve(params, seed, i_max + 2)
    if series.order < i_max + 2:
        raise OrderError(f"Cross-checking up to i = {i_max} needs a series of order {i_max + 2}, "
                         f"got {series.order}.")
    backend = series.backend
    params = params.to(backend)
    convert = float if backend is Backend.FLOAT else None
    expression = builtin_pvi_shifted()
    report = evaluate(expression, {"y": series}, params.as_dict())
    sequences = MemberSequences(series.coefficients())
    for i in range(i_max + 1):
        engine = report.residual[i]
        total = signed_sum(sequences, i, params.as_dict(), members, convert)
        if _close(engine, total, backend, tolerance):
            continue
        differing = []
        for label in expression.labels():
            residual = evaluate(expression.select(label), {"y": series}, params.as_dict()).residual
            # A term without unknowns is a polynomial, zero beyond its degree
            part = residual[i] if i <= residual.caps[0] else backend.zero()
            part_members = signed_sum(sequences, i, params.as_dict(), members, convert, labels=(label,))
            if not _close(part, part_members, backend, tolerance):
                differing.append(label)
        log.warning("Member expansion differs from the residual engine at i=%d (terms: %s)", i,
                    ", ".join(differing))
        return CrossCheck(False, i_max, i, engine, total, tuple(differing))
    return CrossCheck(True, i_max)
