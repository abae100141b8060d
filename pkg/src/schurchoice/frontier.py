"""Budget sets and the b-targeting Schur frontier.

Two independent routes compute the frontier:

* :func:`frontier` minimizes the sum of squared transformed coordinates at
  full size, finding one optimum by greedy marginal allocation and then
  enumerating every optimum by bounded depth-first search.
* :func:`frontier_bruteforce` enumerates the budget set and discards every
  point that is coordinatewise dominated or strictly less b-diverse than
  some other point.

Both work on ``scale * T_b`` so all arithmetic is integral and exact.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import ConsistencyError, InputError, PreconditionError, ResourceError
from .majorization import (
    BiasSpec,
    Distribution,
    as_distribution,
    scaled_transform,
    strictly_more_diverse,
    transform,
)

DEFAULT_FRONTIER_CAP = 50_000
DEFAULT_BUDGET_CAP = 1_000_000


@dataclass(frozen=True)
class BudgetSpec:
    """An applicant pool distribution ``x`` and a capacity ``q``."""

    x: Distribution
    q: int

    def __post_init__(self):
        object.__setattr__(self, "x", as_distribution(self.x))
        if isinstance(self.q, bool) or not isinstance(self.q, int) or self.q < 1:
            raise InputError(f"capacity must be a positive integer, got {self.q!r}")

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def target_total(self) -> int:
        return min(self.q, sum(self.x))


@dataclass(frozen=True)
class FrontierDiagnostics:
    """Shared constant and pairwise involutions of a non-singleton frontier.

    ``pairwise_involutions[(y, z)]`` is a 0-based permutation ``pi`` with
    ``T(y)[i] == T(z)[pi[i]]``.
    """

    shared_value: Fraction
    pairwise_involutions: dict


@dataclass(frozen=True)
class FrontierSet:
    elements: tuple[Distribution, ...]
    target_total: int
    diagnostics: FrontierDiagnostics | None = None

    def __contains__(self, y) -> bool:
        return tuple(y) in self._members

    def __iter__(self) -> Iterator[Distribution]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def _members(self) -> frozenset:
        return frozenset(self.elements)

    def covers(self, y: Sequence[int]) -> bool:
        """True iff ``y <= x`` coordinatewise for some frontier element ``x``."""
        return any(all(a <= c for a, c in zip(y, x)) for x in self.elements)


def _check_bias(spec: BudgetSpec, b: BiasSpec) -> None:
    if spec.n != b.n:
        raise InputError(f"pool has {spec.n} types, bias has {b.n}")


def in_budget(y: Sequence[int], spec: BudgetSpec) -> bool:
    y = as_distribution(y)
    if len(y) != spec.n:
        raise InputError(f"dimension mismatch: {len(y)} vs {spec.n}")
    return all(a <= c for a, c in zip(y, spec.x)) and sum(y) <= spec.q


def budget_size(spec: BudgetSpec) -> int:
    """Exact ``|B(x)|`` by counting bounded compositions of each total."""
    counts = [1] + [0] * spec.q
    for cap in spec.x:
        nxt = [0] * (spec.q + 1)
        for t, c in enumerate(counts):
            if c:
                for v in range(min(cap, spec.q - t) + 1):
                    nxt[t + v] += c
        counts = nxt
    return sum(counts)


def iter_budget(spec: BudgetSpec) -> Iterator[Distribution]:
    """Lexicographic enumeration of the budget set."""
    for y in itertools.product(*(range(c + 1) for c in spec.x)):
        if sum(y) <= spec.q:
            yield y


# -- Quadratic characterization ---------------------------------------------


def _greedy_allocation(offsets: Sequence[int], caps: Sequence[int], amount: int, step: int):
    """Minimize ``sum((step*y_i + offsets_i)**2)`` over ``0 <= y <= caps``, ``sum(y) == amount``.

    Returns ``(value, y)`` or ``None`` if infeasible.  Marginal costs of
    raising ``y_i`` from ``t`` are ``step*(2*(step*t + offsets_i) + step)``,
    increasing in ``t``, so repeatedly taking the cheapest increment is
    optimal for this separable convex objective.
    """
    if amount > sum(caps):
        return None
    y = [0] * len(offsets)
    value = sum(o * o for o in offsets)
    heap = [(step * (2 * o + step), i) for i, (o, c) in enumerate(zip(offsets, caps)) if c > 0]
    heapq.heapify(heap)
    for _ in range(amount):
        cost, i = heapq.heappop(heap)
        value += cost
        y[i] += 1
        if y[i] < caps[i]:
            heapq.heappush(heap, (step * (2 * (step * y[i] + offsets[i]) + step), i))
    return value, tuple(y)


@lru_cache(maxsize=65536)
def _minimizers(x: Distribution, q: int, scaled_bias: tuple[int, ...], scale: int, cap: int):
    n = len(x)
    m = min(q, sum(x))
    offsets = tuple(m * bi for bi in scaled_bias)
    best, _ = _greedy_allocation(offsets, x, m, scale)

    @lru_cache(maxsize=None)
    def bound(i: int, remaining: int):
        res = _greedy_allocation(offsets[i:], x[i:], remaining, scale)
        return None if res is None else res[0]

    found: list[Distribution] = []
    prefix = [0] * n

    def dfs(i: int, remaining: int, partial: int) -> None:
        if i == n:
            if remaining == 0 and partial == best:
                if len(found) >= cap:
                    raise ResourceError(f"frontier has more than {cap} elements")
                found.append(tuple(prefix))
            return
        for v in range(min(x[i], remaining) + 1):
            cost = partial + (scale * v + offsets[i]) ** 2
            rest = bound(i + 1, remaining - v)
            if rest is None or cost + rest > best:
                continue
            prefix[i] = v
            dfs(i + 1, remaining - v, cost)
        prefix[i] = 0

    dfs(0, m, 0)
    return best, tuple(found)


def frontier(spec: BudgetSpec, b: BiasSpec, cap: int = DEFAULT_FRONTIER_CAP) -> FrontierSet:
    """All minimizers of ``sum(T_b(y)**2)`` over the budget set at full size.

    Elements are returned in lexicographic order.
    """
    _check_bias(spec, b)
    _, elements = _minimizers(spec.x, spec.q, b.scaled, b.scale, cap)
    return FrontierSet(elements, spec.target_total)


def optimal_value(spec: BudgetSpec, b: BiasSpec) -> Fraction:
    """Minimum of ``sum(T_b(y)**2)`` at full size, via greedy allocation."""
    _check_bias(spec, b)
    m = spec.target_total
    offsets = tuple(m * bi for bi in b.scaled)
    value, _ = _greedy_allocation(offsets, spec.x, m, b.scale)
    return Fraction(value, b.scale**2)


def squared_objective(y: Sequence[int], b: BiasSpec) -> Fraction:
    return sum(t * t for t in transform(y, b))


# -- Definitional oracle -----------------------------------------------------


def frontier_bruteforce(spec: BudgetSpec, b: BiasSpec, cap: int = DEFAULT_BUDGET_CAP) -> FrontierSet:
    """Budget-set points not dominated by ``>`` nor strictly b-diversity-improved."""
    _check_bias(spec, b)
    size = budget_size(spec)
    if size > cap:
        raise ResourceError(f"budget set has {size} points, cap is {cap}")
    points = list(iter_budget(spec))
    members = set(points)
    n = spec.n

    # B(x) is closed downward, so some z > y exists in it iff y + e_i is in it
    # for some i.
    undominated = [
        y for y in points
        if not any(y[:i] + (y[i] + 1,) + y[i + 1:] in members for i in range(n))
    ]

    by_total: dict[int, list[Distribution]] = {}
    for y in points:
        by_total.setdefault(sum(y), []).append(y)

    survivors = []
    for t, group in by_total.items():
        cands = [y for y in undominated if sum(y) == t]
        if not cands:
            continue
        # Strict majorization among transformed vectors of equal total.
        pref_c = _sorted_prefixes(cands, b)
        pref_g = _sorted_prefixes(group, b)
        # weak[c, g]: T(c) majorizes T(g);  back[c, g]: T(g) majorizes T(c)
        weak = np.all(pref_c[:, None, :] >= pref_g[None, :, :], axis=2)
        back = np.all(pref_g[None, :, :] >= pref_c[:, None, :], axis=2)
        improved = (weak & ~back).any(axis=1)
        survivors.extend(y for y, bad in zip(cands, improved) if not bad)
    return FrontierSet(tuple(sorted(survivors)), spec.target_total)


def _sorted_prefixes(ys, b: BiasSpec) -> np.ndarray:
    rows = [np.cumsum(sorted(scaled_transform(y, b), reverse=True)) for y in ys]
    return np.array(rows, dtype=object if b.scale > 10**6 else np.int64)


# -- Structure of the frontier -----------------------------------------------


def frontier_diagnostics(f: FrontierSet, b: BiasSpec) -> FrontierDiagnostics:
    """Shared constant ``a`` and involutions relating every pair of elements.

    Raises :class:`ConsistencyError` if transformed elements are not related
    by involutions that move only coordinates differing by one, with the
    larger side always equal to the same ``a``.
    """
    if len(f) < 2:
        raise PreconditionError("diagnostics need a frontier with more than one element")
    transforms = {y: transform(y, b) for y in f}
    shared = None
    involutions = {}
    for y, z in itertools.combinations(f.elements, 2):
        ty, tz = transforms[y], transforms[z]
        up = [i for i in range(b.n) if ty[i] > tz[i]]
        down = [i for i in range(b.n) if ty[i] < tz[i]]
        if len(up) != len(down) or not up:
            raise ConsistencyError(f"{y} and {z}: unbalanced differing coordinates")
        for i in up + down:
            hi, lo = max(ty[i], tz[i]), min(ty[i], tz[i])
            if hi - lo != 1:
                raise ConsistencyError(f"{y} and {z} differ by {hi - lo} at coordinate {i + 1}")
            if shared is None:
                shared = hi
            elif hi != shared:
                raise ConsistencyError(f"larger coordinate {hi} differs from shared value {shared}")
        pi = list(range(b.n))
        for i, j in zip(up, down):
            pi[i], pi[j] = j, i
        if any(ty[i] != tz[pi[i]] for i in range(b.n)):
            raise ConsistencyError(f"{y} and {z} are not related by the involution {pi}")
        involutions[(y, z)] = tuple(pi)
    return FrontierDiagnostics(shared, involutions)


def improving_swap(y: Sequence[int], spec: BudgetSpec, b: BiasSpec):
    """A pair ``(i, j)`` with ``y + e_i - e_j`` in budget and strictly more b-diverse, else None."""
    y = tuple(y)
    n = len(y)
    for i in range(n):
        for j in range(n):
            if i == j or y[j] == 0:
                continue
            cand = list(y)
            cand[i] += 1
            cand[j] -= 1
            if in_budget(cand, spec) and strictly_more_diverse(cand, y, b):
                return i, j
    return None
