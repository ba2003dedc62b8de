"""Utility functions for testing seriesflow with pytest."""

import itertools
import math
import random
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import pytest

from seriesflow.__main__ import main
from seriesflow.core.series import Backend, SeriesK, from_items


def rational(rng: random.Random, size: int = 5, nonzero: bool = False) -> Fraction:
    """Random small rational p/q with |p| <= size and 1 <= q <= size."""
    while True:
        value = Fraction(rng.randint(-size, size), rng.randint(1, size))
        if value or not nonzero:
            return value


def random_items(rng: random.Random, caps: Sequence[int], density: float = 0.7) -> Dict[Tuple[int, ...], Fraction]:
    """Random coefficients as a dict over the box given by caps."""
    items = {}
    for index in itertools.product(*(range(c + 1) for c in caps)):
        if rng.random() < density:
            items[index] = rational(rng)
    return items


def random_series(rng: random.Random, caps: Sequence[int], axes: Sequence[str],
                  backend: Backend = Backend.EXACT) -> SeriesK:
    items = random_items(rng, caps)
    if backend is Backend.FLOAT:
        items = {k: float(v) for k, v in items.items()}
    return from_items(items.items(), caps, axes, backend)


def naive_product(a: Dict[tuple, Fraction], b: Dict[tuple, Fraction], caps: Sequence[int]) -> Dict[tuple, Fraction]:
    """Multiply two polynomials term by term and drop monomials beyond caps."""
    out: Dict[tuple, Fraction] = {}
    for (i, x), (j, y) in itertools.product(a.items(), b.items()):
        index = tuple(p + q for p, q in zip(i, j))
        if all(n <= c for n, c in zip(index, caps)):
            out[index] = out.get(index, Fraction(0)) + x * y
    return {k: v for k, v in out.items() if v}


def as_dict(series: SeriesK) -> Dict[tuple, Fraction]:
    return dict(series.items())


def kron_flatten(series: SeriesK) -> List:
    """Coefficients in row-major order of the multi-index."""
    return list(series.array.flat)


def taylor(kind: str, order: int, scale: Fraction = Fraction(1)) -> List[Fraction]:
    """Taylor coefficients of sin, cos or exp of scale*x about 0."""
    out = []
    for n in range(order + 1):
        c = Fraction(scale) ** n / math.factorial(n)
        if kind == "sin":
            c = c * (-1) ** ((n - 1) // 2) if n % 2 else Fraction(0)
        elif kind == "cos":
            c = Fraction(0) if n % 2 else c * (-1) ** (n // 2)
        out.append(c)
    return out


def run_cli(args: Sequence[str]) -> int:
    """Run the seriesflow command line and return its exit status."""
    with pytest.raises(SystemExit) as exit_info:
        main(list(args))
    code = exit_info.value.code
    return 0 if code is None else int(code)

