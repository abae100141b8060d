"""Schur-concave diversity indexes and S-convex sets of distributions.

Every index exposes an exact three-way comparison, so lattice sweeps never
flip on rounding.  Gini-Simpson and integer-order Renyi compare exact
rationals; Shannon compares integer powers (``H(x) >= H(y)`` iff
``(T_x**T_x / prod x_i**x_i) ** T_y >= (T_y**T_y / prod y_i**y_i) ** T_x``);
other Renyi orders use interval arithmetic at widening precision.

Lattice checks run over the box ``{0..bound}^n`` minus the origin.  The box
is closed under permutations and unit transfers, so closure checks inside
it are exact.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import mpmath
from mpmath import iv

from .checks import CheckResult
from .errors import ConsistencyError, InputError, PreconditionError, ResourceError
from .majorization import Distribution, majorizes, parse_rational, strictly_majorizes

DEFAULT_LATTICE_CAP = 200_000
_PRECISIONS = (64, 128, 256, 512, 1024, 2048, 4096)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True, eq=False)
class DiversityIndex:
    """A named index with an exact comparison.

    ``evaluate`` returns the index value (exact where possible); ``compare``
    returns -1, 0 or 1.  Without an explicit ``compare`` the values must be
    exactly comparable (ints or Fractions).
    """

    name: str
    evaluate: Callable[[Distribution], Any]
    compare: Callable[[Distribution, Distribution], int] | None = None

    def __call__(self, x: Sequence[int]):
        return self.evaluate(tuple(x))

    def cmp(self, x: Sequence[int], y: Sequence[int]) -> int:
        x, y = tuple(x), tuple(y)
        if self.compare is not None:
            return self.compare(x, y)
        return _sign(self.evaluate(x) - self.evaluate(y))

    def display(self, x: Sequence[int]) -> str:
        v = self(x)
        if isinstance(v, mpmath.mpf):
            return mpmath.nstr(v, 30)
        return str(v)


def support_size(x: Sequence[int]) -> int:
    return sum(1 for v in x if v > 0)


def index_count_representation(c: Sequence) -> DiversityIndex:
    """``f(x) = c[k(x)]`` where ``k(x)`` counts positive coordinates; ``f(0) = 0``."""
    c = tuple(parse_rational(v) for v in c)
    if not c:
        raise InputError("need at least one constant")
    for k, v in enumerate(c):
        if v < 0:
            raise InputError(f"constant c_{k + 1} is negative: {v}")
        if k and v < c[k - 1]:
            raise InputError(f"constants must be nondecreasing: c_{k} = {c[k - 1]} > c_{k + 1} = {v}")
    table = (Fraction(0),) + c

    def evaluate(x):
        if len(x) != len(c):
            raise InputError(f"distribution has {len(x)} coordinates, index expects {len(c)}")
        return table[support_size(x)]

    return DiversityIndex(f"count({','.join(map(str, c))})", evaluate)


# -- Built-in indexes --------------------------------------------------------


def _gini_simpson(x):
    t = sum(x)
    if t == 0:
        return Fraction(0)
    return 1 - Fraction(sum(v * v for v in x), t * t)


def _shannon_value(x):
    t = sum(x)
    if t == 0:
        return mpmath.mpf(0)
    with mpmath.workdps(50):
        return +(mpmath.log(t) - mpmath.fsum(v * mpmath.log(v) for v in x if v) / t)


def _shannon_float(x):
    t = sum(x)
    if t == 0:
        return 0.0
    return math.log(t) - sum(v * math.log(v) for v in x if v) / t


def _shannon_cmp(x, y):
    hx, hy = _shannon_float(x), _shannon_float(y)
    if abs(hx - hy) > 1e-9:
        return _sign(hx - hy)
    tx, ty = sum(x), sum(y)
    if tx == 0 or ty == 0:
        # H is zero at the origin and on single-type distributions
        zx = tx == 0 or support_size(x) == 1
        zy = ty == 0 or support_size(y) == 1
        if zx and zy:
            return 0
        return -1 if zx else 1
    # exp(H(x)) ** tx == tx**tx / prod(v**v)
    num_x, den_x = tx**tx, math.prod(v**v for v in x)
    num_y, den_y = ty**ty, math.prod(v**v for v in y)
    g = math.gcd(tx, ty)
    ex, ey = ty // g, tx // g
    return _sign(num_x**ex * den_y**ey - num_y**ey * den_x**ex)


def _power_sum(x, alpha: int) -> Fraction:
    t = sum(x)
    return Fraction(sum(v**alpha for v in x), t**alpha)


def _proportions(x):
    t = sum(x)
    return sorted(Fraction(v, t) for v in x)


def _renyi_interval_sum(x, alpha: Fraction):
    t = sum(x)
    a = iv.mpf(alpha.numerator) / alpha.denominator
    return iv.fsum(iv.mpf(v) ** a for v in x if v) / iv.mpf(t) ** a


def renyi(alpha) -> DiversityIndex:
    """Renyi entropy of order ``alpha`` (``alpha > 0``, ``alpha != 1``); zero at the origin."""
    alpha = parse_rational(alpha)
    if alpha <= 0 or alpha == 1:
        raise InputError(f"Renyi order must be positive and not 1, got {alpha}")
    # H is increasing in the power sum when alpha < 1, decreasing when alpha > 1
    direction = 1 if alpha < 1 else -1

    def evaluate(x):
        t = sum(x)
        if t == 0:
            return mpmath.mpf(0)
        with mpmath.workdps(50):
            a = mpmath.mpf(alpha.numerator) / alpha.denominator
            s = mpmath.fsum((mpmath.mpf(v) / t) ** a for v in x if v)
            return +(mpmath.log(s) / (1 - a))

    def compare(x, y):
        tx, ty = sum(x), sum(y)
        if tx == 0 or ty == 0:
            zx = tx == 0 or support_size(x) == 1
            zy = ty == 0 or support_size(y) == 1
            if zx and zy:
                return 0
            return -1 if zx else 1
        if alpha.denominator == 1:
            return direction * _sign(_power_sum(x, int(alpha)) - _power_sum(y, int(alpha)))
        if len(x) == len(y) and _proportions(x) == _proportions(y):
            return 0
        old = iv.prec
        try:
            for prec in _PRECISIONS:
                iv.prec = prec
                d = _renyi_interval_sum(x, alpha) - _renyi_interval_sum(y, alpha)
                if d.a > 0:
                    return direction
                if d.b < 0:
                    return -direction
        finally:
            iv.prec = old
        raise ResourceError(f"cannot separate Renyi values of {x} and {y} at {_PRECISIONS[-1]} bits")

    return DiversityIndex(f"renyi({alpha})", evaluate, compare)


GINI_SIMPSON = DiversityIndex("gini_simpson", _gini_simpson)
SHANNON = DiversityIndex("shannon", _shannon_value, _shannon_cmp)


def builtin_indexes(renyi_order=2) -> dict[str, DiversityIndex]:
    r = renyi(renyi_order)
    return {"gini_simpson": GINI_SIMPSON, "shannon": SHANNON, r.name: r}


def first_coordinate_index() -> DiversityIndex:
    """``f(x) = x_1``: a deliberately non-symmetric index."""
    return DiversityIndex("first_coordinate", lambda x: x[0])


def constant_index(value=1) -> DiversityIndex:
    value = parse_rational(value)
    return DiversityIndex(f"constant({value})", lambda x: value)


# -- Lattice axiom checks ----------------------------------------------------


def lattice(n: int, bound: int, cap: int = DEFAULT_LATTICE_CAP) -> list[Distribution]:
    """``{0..bound}^n`` without the origin, in lexicographic order."""
    if n < 1 or bound < 0:
        raise InputError(f"bad lattice parameters n={n}, bound={bound}")
    if (bound + 1) ** n > cap:
        raise ResourceError(f"lattice of {(bound + 1) ** n} points exceeds cap {cap}")
    return [x for x in itertools.product(range(bound + 1), repeat=n) if any(x)]


def _by_total(points):
    groups: dict[int, list] = {}
    for x in points:
        groups.setdefault(sum(x), []).append(x)
    return groups


def check_schur_concave(f: DiversityIndex, n: int, bound: int, cap: int = DEFAULT_LATTICE_CAP) -> CheckResult:
    """``x`` majorizes ``y`` implies ``f(x) <= f(y)`` on the truncated lattice."""
    for group in _by_total(lattice(n, bound, cap)).values():
        for x in group:
            for y in group:
                if x != y and majorizes(x, y) and f.cmp(x, y) > 0:
                    return CheckResult(False, {"x": list(x), "y": list(y)})
    return CheckResult(True)


def check_homogeneity0(f: DiversityIndex, n: int, bound: int, cap: int = DEFAULT_LATTICE_CAP) -> CheckResult:
    for x in lattice(n, bound, cap):
        c = 2
        while c * max(x) <= bound:
            cx = tuple(c * v for v in x)
            if f.cmp(cx, x) != 0:
                return CheckResult(False, {"x": list(x), "scale": c})
            c += 1
    return CheckResult(True)


def level_sets(f: DiversityIndex, points: Iterable[Distribution]) -> list[list[Distribution]]:
    """Points grouped by equal index value, in increasing value order."""
    ordered = sorted(points, key=functools.cmp_to_key(f.cmp))
    groups: list[list[Distribution]] = []
    for x in ordered:
        if groups and f.cmp(groups[-1][0], x) == 0:
            groups[-1].append(x)
        else:
            groups.append([x])
    return groups


def check_orthogonal_invariance(f: DiversityIndex, n: int, bound: int,
                                cap: int = DEFAULT_LATTICE_CAP) -> CheckResult:
    """``f(x) == f(y)`` and ``z`` zero wherever ``x, y`` differ implies ``f(x+z) == f(y+z)``."""
    for group in level_sets(f, lattice(n, bound, cap)):
        for x, y in itertools.combinations(group, 2):
            free = [i for i in range(n) if x[i] == y[i]]
            ranges = [range(bound - x[i] + 1) for i in free]
            for amounts in itertools.product(*ranges):
                if not any(amounts):
                    continue
                z = [0] * n
                for i, a in zip(free, amounts):
                    z[i] = a
                xz = tuple(a + b for a, b in zip(x, z))
                yz = tuple(a + b for a, b in zip(y, z))
                if f.cmp(xz, yz) != 0:
                    return CheckResult(False, {"x": list(x), "y": list(y), "z": z})
    return CheckResult(True)


def count_constants(f: DiversityIndex, n: int) -> tuple:
    """``c_k = f(1, ..., 1, 0, ..., 0)`` with ``k`` ones."""
    return tuple(f((1,) * k + (0,) * (n - k)) for k in range(1, n + 1))


def check_count_representation(f: DiversityIndex, n: int, bound: int,
                               cap: int = DEFAULT_LATTICE_CAP) -> CheckResult:
    """Every lattice point ties with the all-ones point of the same support size."""
    for x in lattice(n, bound, cap):
        k = support_size(x)
        ref = (1,) * k + (0,) * (n - k)
        if f.cmp(x, ref) != 0:
            return CheckResult(False, {"x": list(x), "reference": list(ref)})
    return CheckResult(True)


# -- S-convex sets -----------------------------------------------------------


def _transfers(x):
    n = len(x)
    for i in range(n):
        for j in range(n):
            if x[i] - x[j] >= 2:
                y = list(x)
                y[i] -= 1
                y[j] += 1
                yield tuple(y)


def is_s_convex(X: Iterable[Sequence[int]]) -> CheckResult:
    """Permutation closure plus closure under unit transfers from a coordinate larger by two."""
    members = {tuple(x) for x in X}
    dims = {len(x) for x in members}
    if len(dims) > 1:
        raise InputError(f"mixed dimensions {sorted(dims)}")
    for x in sorted(members):
        for p in sorted(set(itertools.permutations(x))):
            if p not in members:
                return CheckResult(False, {"member": list(x), "missing": list(p), "reason": "permutation"})
        for y in _transfers(x):
            if y not in members:
                return CheckResult(False, {"member": list(x), "missing": list(y), "reason": "transfer"})
    return CheckResult(True)


def _require_s_convex(X) -> frozenset:
    X = frozenset(tuple(x) for x in X)
    res = is_s_convex(X)
    if not res.passed:
        raise PreconditionError(f"set is not S-convex: {res.witness}")
    return X


def extremal_and_central(X: Iterable[Sequence[int]]) -> tuple[frozenset, frozenset]:
    """Members not strictly majorized by / not strictly majorizing any other member."""
    X = _require_s_convex(X)
    extremal = frozenset(x for x in X if not any(strictly_majorizes(y, x) for y in X))
    central = frozenset(x for x in X if not any(strictly_majorizes(x, y) for y in X))
    balanced = frozenset(x for x in X if max(x) - min(x) < 2)
    if central != balanced:
        raise ConsistencyError(f"central members {sorted(central)} differ from gap<2 members {sorted(balanced)}")
    return extremal, central


def optimize_index_over_sconvex(f: DiversityIndex, X: Iterable[Sequence[int]]) -> tuple[frozenset, frozenset]:
    """Exhaustive ``(argmax, argmin)`` of ``f`` over an S-convex set."""
    X = _require_s_convex(X)
    if not X:
        return frozenset(), frozenset()
    groups = level_sets(f, X)
    return frozenset(groups[-1]), frozenset(groups[0])


@dataclass(frozen=True)
class ContourCheck:
    """Both sides of the Schur-concavity / S-convex-contour biconditional."""

    schur_concave: CheckResult
    contours_s_convex: CheckResult

    @property
    def passed(self) -> bool:
        return self.schur_concave.passed == self.contours_s_convex.passed


def check_upper_contour_characterization(f: DiversityIndex, n: int, bound: int,
                                         cap: int = DEFAULT_LATTICE_CAP) -> ContourCheck:
    points = lattice(n, bound, cap)
    levels = level_sets(f, points)
    contours = CheckResult(True)
    upper: list[Distribution] = []
    # walk thresholds from the top value down, growing the upper contour set
    for level in reversed(levels):
        upper.extend(level)
        res = is_s_convex(upper)
        if not res.passed:
            witness = dict(res.witness, alpha=f.display(level[0]), alpha_attained_at=list(level[0]))
            contours = CheckResult(False, witness)
            break
    return ContourCheck(check_schur_concave(f, n, bound, cap), contours)
