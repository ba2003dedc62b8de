"""Coefficient-level expansion of the shifted sixth Painlevé equation.

Substituting ``y = sum a_n x^n`` into the shifted equation turns every term into a finite sum of members. Member
``k`` contributes ``c_k * [F_k]_(i - d_k)`` to the coefficient of ``x^i``, where ``F_k`` is a product of the
sequences

    Y[n] = a_n,   P[n] = (n+1) a_(n+1),   Q[n] = (n+2)(n+1) a_(n+2)

and ``[.]_n`` denotes the n:th coefficient of their Cauchy product. Members 1-16 come from the left-hand side, 17-65
from the right-hand side. The members are evaluated with plain nested sums over Python lists, independently of the
series arithmetic used by the residual engine.
"""

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from seriesflow.core.residual import ParamCoeff
from seriesflow.core.series import Backend, Scalar, infer_backend
from seriesflow.util.misc import MissingCoefficient

# Members whose recurrence form starts the outer sum at j = 1, leaving out the a_(i+2) contribution
STARRED = frozenset({5, 16})

_NAMES = (("y", "y"), ("p", "y'"), ("q", "y''"))


def _source_label(factors: str) -> str:
    parts = []
    for letter, name in _NAMES:
        n = factors.count(letter)
        if n:
            parts.append(name if n == 1 else f"{name}^{n}")
    return " ".join(parts) or "1"


@dataclass(frozen=True)
class Member:
    """One summand of the coefficient identity at x^i.

    Attributes:
        id: Member number, 1 to 65.
        coefficient: Signed constant or parameter polynomial multiplying the product.
        factors: Sequence letters of the product, e.g. "yyyq" for Y*Y*Y*Q.
        shift: Power of x carried by the member; it contributes from i = shift onwards.
        exact: Member only contributes at i == shift (the constant terms).
    """

    id: int
    coefficient: ParamCoeff
    factors: str
    shift: int
    exact: bool = False

    @property
    def side(self) -> str:
        return "lhs" if self.id <= 16 else "rhs"

    @property
    def sign(self) -> int:
        return 1 if self.side == "lhs" else -1

    @property
    def source(self) -> str:
        """Label of the term of the equation this member expands."""
        return _source_label(self.factors)

    def applies(self, i: int) -> bool:
        return i == self.shift if self.exact else i >= self.shift


_a = ParamCoeff.param("alpha")
_b = ParamCoeff.param("beta")
_g = ParamCoeff.param("gamma")
_d = ParamCoeff.param("delta")


def _family(first: int, factors: str, coefficients: Sequence, top_shift: int) -> List[Member]:
    """Consecutive members sharing one product, with shifts counting down from top_shift."""
    return [Member(first + n, ParamCoeff.lift(c), factors, top_shift - n) for n, c in enumerate(coefficients)]


MEMBERS: Tuple[Member, ...] = tuple(
    _family(1, "yyyq", [2, -12, 26, -24, 8], 4)
    + _family(6, "yyq", [-2, 12, -26, 24, -8], 5)
    + _family(11, "yq", [2, -14, 38, -50, 32, -8], 5)
    + _family(17, "yypp", [3, -18, 39, -36, 12], 4)
    + _family(22, "ypp", [-2, 12, -26, 24, -8], 5)
    + _family(27, "pp", [1, -7, 19, -25, 16, -4], 5)
    + _family(33, "yyyp", [-4, 18, -26, 12], 3)
    + _family(37, "yyp", [-2, 14, -36, 40, -16], 4)
    + _family(42, "yp", [2, -10, 18, -14, 4], 4)
    + [Member(47, 2 * _a, "yyyyyy", 0),
       Member(48, -4 * _a, "yyyyy", 1)]
    + _family(49, "yyyy", [2 * _a + 2 * _d,
                           4 * _a + 2 * _b + 2 * _g - 6 * _d,
                           -4 * _a - 2 * _b - 4 * _g + 4 * _d], 2)
    + _family(52, "yyy", [-4 * _a - 4 * _b - 4 * _g - 4 * _d,
                          4 * _a + 4 * _b + 12 * _g + 12 * _d,
                          -8 * _g - 8 * _d], 2)
    + _family(55, "yy", [2 * _b + 2 * _g,
                         2 * _a + 2 * _b - 8 * _g + 2 * _d,
                         -4 * _a - 8 * _b + 10 * _g - 6 * _d,
                         2 * _a + 4 * _b - 4 * _g + 4 * _d], 3)
    + _family(59, "y", [-4 * _b, 8 * _b, -4 * _b], 3)
    + [Member(62 + n, ParamCoeff.lift(c), "", 3 - n, exact=True) for n, c in
       enumerate([2 * _b, -6 * _b, 6 * _b, -2 * _b])]
)


def _cauchy(s: Sequence, t: Sequence) -> list:
    n = min(len(s), len(t))
    return [sum(s[j] * t[m - j] for j in range(m + 1)) for m in range(n)]


class MemberSequences:
    """Y, P and Q built from a coefficient prefix, with cached products."""

    def __init__(self, coefficients: Sequence[Scalar]):
        a = list(coefficients)
        self.known = len(a)
        self.base = {
            "y": a,
            "p": [(n + 1) * a[n + 1] for n in range(len(a) - 1)],
            "q": [(n + 2) * (n + 1) * a[n + 2] for n in range(len(a) - 2)],
        }
        self._products: Dict[str, list] = {}

    def product(self, factors: str) -> list:
        if len(factors) == 1:
            return self.base[factors]
        if factors not in self._products:
            self._products[factors] = _cauchy(self.product(factors[:-1]), self.base[factors[-1]])
        return self._products[factors]

    def _missing(self, member: Member, i: int, needed: int):
        raise MissingCoefficient(f"Member {member.id} at i={i} needs a_{needed}, but only a_0..a_{self.known - 1} "
                                 f"are known.")

    def raw(self, member: Member, i: int, starred: bool = True):
        """The product coefficient of a member at x^i, without its constant or parameter coefficient."""
        n = i - member.shift
        if not member.factors:
            return 1
        top = {"y": 0, "p": 1, "q": 2}[member.factors[-1]]
        if starred and member.id in STARRED:
            head = self.product(member.factors[:-1])
            last = self.base[member.factors[-1]]
            if n > 0 and (len(head) <= n or len(last) < n):
                self._missing(member, i, n - 1 + top)
            return sum(head[j] * last[n - j] for j in range(1, n + 1))
        sequence = self.product(member.factors)
        if len(sequence) <= n:
            self._missing(member, i, n + top)
        return sequence[n]

    def value(self, member: Member, i: int, params: Mapping[str, Scalar], convert=None, starred: bool = True):
        """Member contribution at x^i including its coefficient, zero where the member does not apply."""
        if not member.applies(i):
            return 0
        return member.coefficient.bind(params, convert) * self.raw(member, i, starred)

    def sides(self, i: int, params: Mapping[str, Scalar], members: Sequence[Member] = MEMBERS,
              convert=None, starred: bool = True) -> Tuple[Scalar, Scalar]:
        """Sum of left-hand and right-hand side members at x^i."""
        lhs = rhs = 0
        for member in members:
            value = self.value(member, i, params, convert, starred)
            if member.side == "lhs":
                lhs += value
            else:
                rhs += value
        return lhs, rhs


def member(member_id: int, members: Sequence[Member] = MEMBERS) -> Member:
    for m in members:
        if m.id == member_id:
            return m
    raise KeyError(member_id)


def member_value(member_id: int, i: int, coefficients: Sequence[Scalar], params: Mapping[str, Scalar],
                 starred: bool = True, members: Sequence[Member] = MEMBERS) -> Scalar:
    """Value of one member at x^i for the given coefficient prefix.

    Members 5 and 16 use their recurrence form (outer sum from j = 1) unless starred is False.

    Raises:
        MissingCoefficient: If the prefix is too short for the member at this i.
    """
    backend = infer_backend(list(coefficients) + list(params.values()))
    convert = float if backend is Backend.FLOAT else None
    value = MemberSequences(coefficients).value(member(member_id, members), i, params, convert, starred)
    return backend.coerce(value)


def signed_sum(sequences: MemberSequences, i: int, params: Mapping[str, Scalar],
               members: Sequence[Member] = MEMBERS, convert=None, labels: Optional[Sequence[str]] = None):
    """Left-hand side minus right-hand side over all (or the labelled) full members at x^i."""
    total = 0
    for m in members:
        if labels is None or m.source in labels:
            total += m.sign * sequences.value(m, i, params, convert, starred=False)
    return total
