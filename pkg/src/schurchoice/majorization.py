"""Exact majorization primitives and b-targeting diversity comparisons.

Type distributions are plain tuples of nonnegative ints.  Rational vectors
are tuples of :class:`fractions.Fraction`.  Nothing in here touches floats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError

Distribution = tuple[int, ...]
RationalVector = tuple[Fraction, ...]


def as_distribution(values: Iterable[int]) -> Distribution:
    """Validate and freeze a type distribution."""
    out = []
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, int):
            if isinstance(v, Fraction) and v.denominator == 1:
                v = int(v)
            else:
                raise InputError(f"coordinate {i + 1} is not an integer: {v!r}")
        if v < 0:
            raise InputError(f"coordinate {i + 1} is negative: {v}")
        out.append(v)
    return tuple(out)


def unit(i: int, n: int) -> Distribution:
    """The unit vector with a one in (0-based) coordinate ``i``."""
    if not 0 <= i < n:
        raise InputError(f"unit index {i} out of range for n={n}")
    return tuple(1 if k == i else 0 for k in range(n))


def total(x: Sequence) -> int | Fraction:
    return sum(x)


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"`` strings, ints and Fractions; reject floats."""
    if isinstance(value, float):
        raise InputError(f"floating-point value {value!r} not accepted; use 'p/q'")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"cannot parse rational {value!r}") from exc


def _check_dims(x: Sequence, y: Sequence) -> None:
    if len(x) != len(y):
        raise InputError(f"dimension mismatch: {len(x)} vs {len(y)}")


@dataclass(frozen=True)
class BiasSpec:
    """An ideal ratio on the simplex and the bias it implies.

    ``bias[i] == 1/n - ratio[i]``.  ``scale`` is the least common
    denominator of the bias entries and ``scaled`` holds ``scale * bias`` as
    ints; transforms scaled by ``scale`` stay integral, which keeps the hot
    comparison paths in integer arithmetic.
    """

    ratio: RationalVector
    bias: RationalVector
    scale: int = field(init=False, repr=False, compare=False)
    scaled: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        scale = math.lcm(*(b.denominator for b in self.bias)) if self.bias else 1
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "scaled", tuple(int(b * scale) for b in self.bias))

    @property
    def n(self) -> int:
        return len(self.bias)

    @property
    def is_zero(self) -> bool:
        return not any(self.bias)

    @classmethod
    def uniform(cls, n: int) -> "BiasSpec":
        return derive_bias([Fraction(1, n)] * n)

    @classmethod
    def from_bias(cls, b: Sequence) -> "BiasSpec":
        """Build from a bias vector, recovering the ratio ``1/n - b``."""
        b = [parse_rational(v) for v in b]
        n = len(b)
        if n == 0:
            raise InputError("bias must have at least one coordinate")
        return derive_bias([Fraction(1, n) - v for v in b])


def derive_bias(r: Sequence) -> BiasSpec:
    """Return the bias ``1/n - r`` for an ideal ratio ``r`` on the simplex."""
    ratio = tuple(parse_rational(v) for v in r)
    n = len(ratio)
    if n == 0:
        raise InputError("ideal ratio must have at least one coordinate")
    for i, v in enumerate(ratio):
        if v < 0:
            raise InputError(f"ideal ratio coordinate {i + 1} is negative: {v}")
    if sum(ratio) != 1:
        raise InputError(f"ideal ratio sums to {sum(ratio)}, not 1")
    bias = tuple(Fraction(1, n) - v for v in ratio)
    return BiasSpec(ratio, bias)


def transform(x: Sequence, b: BiasSpec) -> RationalVector:
    """``x + total(x) * b``; total-preserving and exact."""
    if len(x) != b.n:
        raise InputError(f"distribution has {len(x)} coordinates, bias has {b.n}")
    t = sum(x)
    return tuple(Fraction(xi) + t * bi for xi, bi in zip(x, b.bias))


def scaled_transform(x: Sequence[int], b: BiasSpec) -> tuple[int, ...]:
    """``scale * transform(x, b)`` as ints, for integer ``x``."""
    if len(x) != b.n:
        raise InputError(f"distribution has {len(x)} coordinates, bias has {b.n}")
    t = sum(x)
    s = b.scale
    return tuple(s * xi + t * bi for xi, bi in zip(x, b.scaled))


def _prefix_dominates(x: Sequence, y: Sequence) -> bool:
    # assumes equal totals
    sx = sy = 0
    for a, c in zip(sorted(x, reverse=True)[:-1], sorted(y, reverse=True)[:-1]):
        sx += a
        sy += c
        if sx < sy:
            return False
    return True


def majorizes(x: Sequence, y: Sequence) -> bool:
    """True iff ``x`` majorizes ``y``: equal totals, dominating sorted prefix sums."""
    _check_dims(x, y)
    if sum(x) != sum(y):
        return False
    return _prefix_dominates(x, y)


def strictly_majorizes(x: Sequence, y: Sequence) -> bool:
    _check_dims(x, y)
    if sum(x) != sum(y):
        return False
    return _prefix_dominates(x, y) and not _prefix_dominates(y, x)


class Diversity(enum.Enum):
    """Outcome of comparing two distributions under b-targeting diversity."""

    STRICTLY_MORE = "strictly-more"
    EQUAL = "equal-diverse"
    STRICTLY_LESS = "strictly-less"
    INCOMPARABLE = "incomparable"


def more_b_diverse(x: Sequence[int], y: Sequence[int], b: BiasSpec) -> Diversity:
    """Classify ``x`` against ``y``: x is more b-diverse iff T_b(y) majorizes T_b(x).

    Distributions of different totals are never comparable.
    """
    _check_dims(x, y)
    tx, ty = scaled_transform(x, b), scaled_transform(y, b)
    if sum(tx) != sum(ty):
        return Diversity.INCOMPARABLE
    y_over_x = _prefix_dominates(ty, tx)
    x_over_y = _prefix_dominates(tx, ty)
    if y_over_x and x_over_y:
        return Diversity.EQUAL
    if y_over_x:
        return Diversity.STRICTLY_MORE
    if x_over_y:
        return Diversity.STRICTLY_LESS
    return Diversity.INCOMPARABLE


def strictly_more_diverse(x: Sequence[int], y: Sequence[int], b: BiasSpec) -> bool:
    return more_b_diverse(x, y, b) is Diversity.STRICTLY_MORE


def weakly_more_diverse(x: Sequence[int], y: Sequence[int], b: BiasSpec) -> bool:
    return more_b_diverse(x, y, b) in (Diversity.STRICTLY_MORE, Diversity.EQUAL)
