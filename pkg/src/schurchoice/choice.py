"""Students, priority rankings and the choice rules built on the frontier."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Collection, Iterable, Sequence

from .errors import InputError, ResourceError
from .frontier import DEFAULT_FRONTIER_CAP, BudgetSpec, FrontierSet, frontier
from .majorization import BiasSpec, Distribution, Diversity, more_b_diverse

DEFAULT_BASES_CAP = 1_000_000

Rule = Callable[[frozenset], frozenset]


@dataclass(frozen=True, order=True)
class Student:
    id: str
    type: int  # 1-based

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise InputError(f"student id must be a nonempty string, got {self.id!r}")
        if isinstance(self.type, bool) or not isinstance(self.type, int) or self.type < 1:
            raise InputError(f"student {self.id}: type must be a positive integer, got {self.type!r}")


@dataclass(frozen=True)
class PriorityRanking:
    """Strict order over student ids, highest priority first."""

    order: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        if len(set(self.order)) != len(self.order):
            dupes = sorted({s for s in self.order if self.order.count(s) > 1})
            raise InputError(f"priority ranking repeats ids: {', '.join(dupes)}")
        object.__setattr__(self, "_rank", {s: k for k, s in enumerate(self.order)})

    def rank(self, student: Student | str) -> int:
        sid = student.id if isinstance(student, Student) else student
        try:
            return self._rank[sid]
        except KeyError:
            raise InputError(f"student {sid} is not ranked") from None

    def sort(self, students: Iterable[Student]) -> list[Student]:
        return sorted(students, key=self.rank)

    def outranks(self, a: Student | str, b: Student | str) -> bool:
        return self.rank(a) < self.rank(b)

    def reversed(self) -> "PriorityRanking":
        return PriorityRanking(self.order[::-1])

    @classmethod
    def from_scores(cls, scores: dict[str, object], tie_break: str = "reject") -> tuple["PriorityRanking", bool]:
        """Rank by descending score; returns the ranking and whether a tie was broken.

        ``tie_break="by-id"`` orders tied students by ascending id.
        """
        if tie_break not in ("reject", "by-id"):
            raise InputError(f"unknown tie-break policy {tie_break!r}")
        ordered = sorted(scores, key=lambda s: (-scores[s], s))
        tied = False
        for a, b in zip(ordered, ordered[1:]):
            if scores[a] == scores[b]:
                if tie_break == "reject":
                    raise InputError(f"priority tie between {a} and {b} (score {scores[a]})")
                tied = True
        return cls(tuple(ordered)), tied


def xi(students: Iterable[Student], n: int) -> Distribution:
    """Type distribution of a set of students."""
    counts = [0] * n
    for s in students:
        if not 1 <= s.type <= n:
            raise InputError(f"student {s.id} has type {s.type}, outside 1..{n}")
        counts[s.type - 1] += 1
    return tuple(counts)


def _pool_frontier(S: Collection[Student], b: BiasSpec, q: int, cap: int) -> FrontierSet:
    return frontier(BudgetSpec(xi(S, b.n), q), b, cap=cap)


@dataclass(frozen=True)
class Step:
    student: str
    admitted: bool


def schur_trace(
    S: Collection[Student],
    P: PriorityRanking,
    b: BiasSpec,
    q: int,
    cap: int = DEFAULT_FRONTIER_CAP,
) -> tuple[frozenset, tuple[Step, ...], FrontierSet]:
    """Run the b-targeting Schur choice rule, recording each accept/skip step."""
    S = frozenset(S)
    front = _pool_frontier(S, b, q, cap)
    counts = [0] * b.n
    chosen = []
    steps = []
    for s in P.sort(S):
        counts[s.type - 1] += 1
        if front.covers(counts):
            chosen.append(s)
            steps.append(Step(s.id, True))
        else:
            counts[s.type - 1] -= 1
            steps.append(Step(s.id, False))
    return frozenset(chosen), tuple(steps), front


def schur_choice(S: Collection[Student], P: PriorityRanking, b: BiasSpec, q: int,
                 cap: int = DEFAULT_FRONTIER_CAP) -> frozenset:
    """Admit students in priority order while some frontier element still covers the class."""
    return schur_trace(S, P, b, q, cap)[0]


def matroid_bases(S: Collection[Student], b: BiasSpec, q: int,
                  cap: int = DEFAULT_BASES_CAP) -> frozenset:
    """All subsets of ``S`` whose type distribution lies in the frontier of ``xi(S)``."""
    S = sorted(S)
    m = min(q, len(S))
    if math.comb(len(S), m) > cap:
        raise ResourceError(f"{math.comb(len(S), m)} candidate subsets exceed cap {cap}")
    front = _pool_frontier(S, b, q, DEFAULT_FRONTIER_CAP)
    return frozenset(
        frozenset(sub) for sub in itertools.combinations(S, m) if xi(sub, b.n) in front
    )


def greedy_choice(S: Collection[Student], P: PriorityRanking, b: BiasSpec, q: int,
                  cap: int = DEFAULT_BASES_CAP) -> frozenset:
    """Admit in priority order while the admitted set extends to some base."""
    bases = matroid_bases(S, b, q, cap)
    chosen: set = set()
    for s in P.sort(S):
        trial = chosen | {s}
        if any(trial <= base for base in bases):
            chosen = trial
    return frozenset(chosen)


def priority_dominates(A: Collection[Student], B: Collection[Student], P: PriorityRanking) -> bool:
    """Rank-by-rank weak improvement of ``A`` over ``B`` with ``|A| >= |B|``."""
    A, B = frozenset(A), frozenset(B)
    if A == B:
        raise InputError("priority dominance compares distinct sets")
    if len(A) < len(B):
        return False
    return all(P.rank(a) <= P.rank(c) for a, c in zip(P.sort(A), P.sort(B)))


MORE_STUDENTS = "more-students"
MORE_DIVERSE = "strictly-more-diverse"
PRIORITY_DOMINATES = "priority-dominates"
VIOLATION = "VIOLATION"


@dataclass(frozen=True)
class MeritVerdict:
    """First clause that holds, plus every clause that holds."""

    verdict: str
    holding: tuple[str, ...]


def merit_trichotomy(
    chosen: Collection[Student],
    other: Collection[Student],
    S: Collection[Student],
    P: PriorityRanking,
    b: BiasSpec,
    q: int,
) -> MeritVerdict:
    """Compare a Schur rule's choice against another rule's choice on ``S``.

    Clauses are checked in order: more students, strictly more b-diverse,
    priority dominance.  ``VIOLATION`` means none held.
    """
    chosen, other, S = frozenset(chosen), frozenset(other), frozenset(S)
    for name, sub in (("chosen", chosen), ("other", other)):
        if not sub <= S:
            raise InputError(f"{name} set is not a subset of the applicants")
        if len(sub) > q:
            raise InputError(f"{name} set exceeds capacity {q}")
    if chosen == other:
        raise InputError("the two choices coincide; nothing to compare")
    holding = []
    if len(chosen) > len(other):
        holding.append(MORE_STUDENTS)
    if more_b_diverse(xi(chosen, b.n), xi(other, b.n), b) is Diversity.STRICTLY_MORE:
        holding.append(MORE_DIVERSE)
    if priority_dominates(chosen, other, P):
        holding.append(PRIORITY_DOMINATES)
    return MeritVerdict(holding[0] if holding else VIOLATION, tuple(holding))


# -- Comparison baselines and adversarial rules ------------------------------


def reserves_choice(S: Collection[Student], P: PriorityRanking, reserves: Sequence[int], q: int) -> frozenset:
    """Fill per-type reserves by priority, then the remaining seats by priority.

    A minimal reserves-style baseline, used as an alternative rule in
    comparisons.  Reserve counts beyond capacity are truncated in type order.
    """
    ordered = P.sort(S)
    left = list(reserves)
    chosen = []
    for s in ordered:
        if len(chosen) < q and left[s.type - 1] > 0:
            left[s.type - 1] -= 1
            chosen.append(s)
    rest = [s for s in ordered if s not in chosen]
    chosen.extend(rest[: q - len(chosen)])
    return frozenset(chosen)


def default_reserves(b: BiasSpec, q: int) -> tuple[int, ...]:
    return tuple(math.floor(q * r) for r in b.ratio)


def alternative_rules(P: PriorityRanking, b: BiasSpec, q: int, seed: int = 0) -> dict[str, Rule]:
    """Alternative choice rules to pit against the Schur rule.

    Every rule respects ``C(S) <= S`` and ``|C(S)| <= q``; none is assumed to
    satisfy any axiom.
    """
    reserves = default_reserves(b, q)
    rev = P.reversed()

    def reversed_priority(S):
        return schur_choice(S, rev, b, q)

    def random_base(S):
        bases = sorted(sorted(s.id for s in base) for base in matroid_bases(S, b, q))
        pick = set(random.Random(f"{seed}:{sorted(s.id for s in S)}").choice(bases))
        return frozenset(s for s in S if s.id in pick)

    def reserves_rule(S):
        return reserves_choice(S, P, reserves, q)

    def wasteful(S):
        chosen = P.sort(schur_choice(S, P, b, q))
        return frozenset(chosen[:-1])

    def priority_only(S):
        return frozenset(P.sort(S)[:q])

    def random_subset(S):
        rng = random.Random(f"{seed}:sub:{sorted(s.id for s in S)}")
        members = sorted(S)
        k = rng.randint(0, min(q, len(members)))
        return frozenset(rng.sample(members, k))

    return {
        "reversed-priority": reversed_priority,
        "random-frontier-base": random_base,
        "reserves-baseline": reserves_rule,
        "wasteful-truncation": wasteful,
        "priority-only": priority_only,
        "random-subset": random_subset,
    }
