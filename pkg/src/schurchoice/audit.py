"""Audit tabulated choice rules against the three axioms.

A :class:`RuleTable` maps applicant id-sets to chosen id-sets.  Audits
quantify over every subset of the universe unless the table is audited as
partial-domain, in which case only the supplied subsets are examined and
the report says so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import networkx as nx

from .checks import CheckResult
from .choice import PriorityRanking, Student, matroid_bases, schur_choice, xi
from .errors import InputError, PreconditionError, ResourceError
from .frontier import BudgetSpec, frontier
from .majorization import BiasSpec, Diversity, more_b_diverse

DEFAULT_UNIVERSE_LIMIT = 12

IdSet = frozenset  # of str


def canonical_key(ids: Iterable[str]) -> tuple:
    ids = sorted(ids)
    return (len(ids), ids)


@dataclass(frozen=True)
class RuleTable:
    """Explicit subset -> choice map with a capacity."""

    capacity: int
    entries: Mapping[IdSet, IdSet]

    def __post_init__(self):
        if isinstance(self.capacity, bool) or not isinstance(self.capacity, int) or self.capacity < 1:
            raise InputError(f"capacity must be a positive integer, got {self.capacity!r}")
        entries = {}
        for applicants, chosen in self.entries.items():
            applicants, chosen = frozenset(applicants), frozenset(chosen)
            if not chosen <= applicants:
                raise InputError(f"choice from {sorted(applicants)} includes non-applicants")
            if len(chosen) > self.capacity:
                raise InputError(f"choice from {sorted(applicants)} exceeds capacity {self.capacity}")
            entries[applicants] = chosen
        object.__setattr__(self, "entries", entries)

    def __getitem__(self, applicants) -> IdSet:
        return self.entries[frozenset(applicants)]

    def subsets(self) -> list[IdSet]:
        return sorted(self.entries, key=canonical_key)


class Universe:
    """Students available to a rule, indexed by id."""

    def __init__(self, students: Iterable[Student], n: int):
        self.students = {}
        for s in students:
            if s.id in self.students:
                raise InputError(f"duplicate student id {s.id}")
            if not 1 <= s.type <= n:
                raise InputError(f"student {s.id} has type {s.type}, outside 1..{n}")
            self.students[s.id] = s
        self.n = n

    def __len__(self) -> int:
        return len(self.students)

    def ids(self) -> list[str]:
        return sorted(self.students)

    def resolve(self, ids: Iterable[str]) -> frozenset:
        try:
            return frozenset(self.students[i] for i in ids)
        except KeyError as exc:
            raise InputError(f"unknown student id {exc.args[0]}") from None

    def dist(self, ids: Iterable[str]):
        return xi(self.resolve(ids), self.n)

    def all_subsets(self, limit: int = DEFAULT_UNIVERSE_LIMIT) -> list[IdSet]:
        if len(self) > limit:
            raise ResourceError(f"universe of {len(self)} students exceeds limit {limit}")
        ids = self.ids()
        return [frozenset(c) for k in range(len(ids) + 1) for c in itertools.combinations(ids, k)]


def tabulate(rule: Callable[[frozenset], frozenset], universe: Universe, q: int,
             limit: int = DEFAULT_UNIVERSE_LIMIT) -> RuleTable:
    """Evaluate a rule (on Student sets) over every subset of the universe."""
    entries = {}
    for sub in universe.all_subsets(limit):
        entries[sub] = frozenset(s.id for s in rule(universe.resolve(sub)))
    return RuleTable(q, entries)


def schur_table(universe: Universe, P: PriorityRanking, b: BiasSpec, q: int,
                limit: int = DEFAULT_UNIVERSE_LIMIT) -> RuleTable:
    return tabulate(lambda S: schur_choice(S, P, b, q), universe, q, limit)


def _domain(table: RuleTable, universe: Universe, partial: bool, limit: int) -> list[IdSet]:
    for sub in table.entries:
        universe.resolve(sub)
    if partial:
        return table.subsets()
    subsets = universe.all_subsets(limit)
    missing = [s for s in subsets if s not in table.entries]
    if missing:
        raise InputError(f"rule table has no entry for applicants {sorted(missing[0])}")
    return subsets


def check_nonwasteful(table: RuleTable, universe: Universe, *, partial: bool = False,
                      limit: int = DEFAULT_UNIVERSE_LIMIT) -> CheckResult:
    q = table.capacity
    for sub in _domain(table, universe, partial, limit):
        chosen = table[sub]
        if len(chosen) != min(q, len(sub)):
            return CheckResult(False, {"applicants": sorted(sub), "chosen": sorted(chosen),
                                       "expected_size": min(q, len(sub))})
    return CheckResult(True)


def _swap(chosen: IdSet, out: str, into: str) -> IdSet:
    return (chosen - {out}) | {into}


def check_promotes_diversity(table: RuleTable, universe: Universe, b: BiasSpec, *,
                             partial: bool = False, limit: int = DEFAULT_UNIVERSE_LIMIT) -> CheckResult:
    """No single swap of an admitted for a rejected applicant is strictly more b-diverse."""
    for sub in _domain(table, universe, partial, limit):
        chosen = table[sub]
        base = universe.dist(chosen)
        for s in sorted(chosen):
            for s2 in sorted(sub - chosen):
                swapped = universe.dist(_swap(chosen, s, s2))
                if more_b_diverse(swapped, base, b) is Diversity.STRICTLY_MORE:
                    return CheckResult(False, {"applicants": sorted(sub), "chosen": sorted(chosen),
                                               "admitted": s, "rejected": s2})
    return CheckResult(True)


def check_frontier_condition(table: RuleTable, universe: Universe, b: BiasSpec, *,
                             partial: bool = False, limit: int = DEFAULT_UNIVERSE_LIMIT) -> CheckResult:
    q = table.capacity
    for sub in _domain(table, universe, partial, limit):
        chosen = table[sub]
        front = frontier(BudgetSpec(universe.dist(sub), q), b)
        dist = universe.dist(chosen)
        if dist not in front:
            return CheckResult(False, {"applicants": sorted(sub), "chosen": sorted(chosen),
                                       "distribution": list(dist),
                                       "frontier": [list(y) for y in front]})
    return CheckResult(True)


@dataclass(frozen=True)
class RevealedRelation:
    """Edges ``(s, s2)``: ``s`` was admitted over ``s2`` though swapping them was weakly more diverse."""

    edges: frozenset
    witnesses: dict = field(compare=False)

    def graph(self, nodes: Iterable[str] = ()) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(nodes)
        g.add_edges_from(self.edges)
        return g


def reveal_relation(table: RuleTable, universe: Universe, b: BiasSpec, *,
                    partial: bool = False, limit: int = DEFAULT_UNIVERSE_LIMIT) -> RevealedRelation:
    witnesses: dict = {}
    for sub in _domain(table, universe, partial, limit):
        chosen = table[sub]
        base = universe.dist(chosen)
        for s in sorted(chosen):
            for s2 in sorted(sub - chosen):
                if (s, s2) in witnesses:
                    continue
                swapped = universe.dist(_swap(chosen, s, s2))
                if more_b_diverse(swapped, base, b) in (Diversity.STRICTLY_MORE, Diversity.EQUAL):
                    witnesses[(s, s2)] = sub
    return RevealedRelation(frozenset(witnesses), witnesses)


def shortest_cycle(rel: RevealedRelation) -> list[str] | None:
    """A minimum-length directed cycle ``[s_1, ..., s_K]``, or None."""
    g = rel.graph()
    best = None
    for u, v in sorted(rel.edges):
        if u == v:
            return [u]
        try:
            path = nx.shortest_path(g, v, u)
        except nx.NetworkXNoPath:
            continue
        cycle = [u] + path[:-1]
        if best is None or len(cycle) < len(best):
            best = cycle
    return best


def _cycle_result(rel: RevealedRelation) -> CheckResult:
    cycle = shortest_cycle(rel)
    if cycle is None:
        return CheckResult(True)
    links = list(zip(cycle, cycle[1:] + cycle[:1]))
    return CheckResult(False, {
        "students": cycle,
        "sets": [sorted(rel.witnesses[link]) for link in links],
    })


def check_srp(table: RuleTable, universe: Universe, b: BiasSpec, *,
              partial: bool = False, limit: int = DEFAULT_UNIVERSE_LIMIT) -> CheckResult:
    """Acyclicity of the revealed relation; failures carry the students and witnessing sets."""
    return _cycle_result(reveal_relation(table, universe, b, partial=partial, limit=limit))


def complete_ranking(rel: RevealedRelation, universe: Universe | Iterable[str]) -> PriorityRanking:
    """Extend an acyclic relation to a strict total order, breaking ties by ascending id."""
    ids = universe.ids() if isinstance(universe, Universe) else sorted(universe)
    g = rel.graph(ids)
    if not nx.is_directed_acyclic_graph(g):
        raise PreconditionError("revealed relation has a cycle; no completion exists")
    return PriorityRanking(tuple(nx.lexicographical_topological_sort(g)))


@dataclass(frozen=True)
class AuditReport:
    nonwasteful: CheckResult
    promotes_diversity: CheckResult
    srp_acyclic: CheckResult
    frontier_condition: CheckResult
    recovered_ranking: PriorityRanking | None
    partial_domain: bool
    subsets_audited: int

    @property
    def passed(self) -> bool:
        return self.nonwasteful.passed and self.promotes_diversity.passed and self.srp_acyclic.passed

    def to_dict(self) -> dict:
        return {
            "domain": "partial" if self.partial_domain else "full",
            "subsets_audited": self.subsets_audited,
            "nonwasteful": self.nonwasteful.to_dict(),
            "promotes_diversity": self.promotes_diversity.to_dict(),
            "srp_acyclic": self.srp_acyclic.to_dict(),
            "frontier_condition": self.frontier_condition.to_dict(),
            "all_pass": self.passed,
            "recovered_ranking": list(self.recovered_ranking.order) if self.recovered_ranking else None,
        }


def audit(table: RuleTable, universe: Universe, b: BiasSpec, *, partial: bool = False,
          limit: int = DEFAULT_UNIVERSE_LIMIT) -> AuditReport:
    """Run every check; recover a priority ranking when the rule passes all three axioms."""
    kw = dict(partial=partial, limit=limit)
    nonwasteful = check_nonwasteful(table, universe, **kw)
    promotes = check_promotes_diversity(table, universe, b, **kw)
    rel = reveal_relation(table, universe, b, **kw)
    srp = _cycle_result(rel)
    ranking = None
    if nonwasteful.passed and promotes.passed and srp.passed:
        ranking = complete_ranking(rel, universe)
    return AuditReport(
        nonwasteful=nonwasteful,
        promotes_diversity=promotes,
        srp_acyclic=srp,
        frontier_condition=check_frontier_condition(table, universe, b, **kw),
        recovered_ranking=ranking,
        partial_domain=partial,
        subsets_audited=len(_domain(table, universe, partial, limit)),
    )


def replay_cycle(witness: dict, table: RuleTable, universe: Universe, b: BiasSpec) -> bool:
    """Re-verify every link of a cycle witness against the revelation condition."""
    students, sets = witness["students"], witness["sets"]
    nxt = students[1:] + students[:1]
    for s, s2, sub in zip(students, nxt, sets):
        chosen = table[frozenset(sub)]
        if s not in chosen or s2 not in set(sub) - chosen:
            return False
        swapped = universe.dist(_swap(chosen, s, s2))
        if more_b_diverse(swapped, universe.dist(chosen), b) not in (Diversity.STRICTLY_MORE, Diversity.EQUAL):
            return False
    return True


def replay_witness(check: str, witness: dict, table: RuleTable, universe: Universe, b: BiasSpec) -> bool:
    """Re-verify a failing check's witness directly against the table.

    ``check`` is one of ``nonwasteful``, ``promotes_diversity``, ``srp_acyclic``
    or ``frontier_condition`` (the :class:`AuditReport` field names).
    """
    if check == "srp_acyclic":
        return replay_cycle(witness, table, universe, b)
    sub = frozenset(witness["applicants"])
    chosen = table[sub]
    if sorted(chosen) != witness["chosen"]:
        return False
    if check == "nonwasteful":
        return len(chosen) != min(table.capacity, len(sub))
    if check == "promotes_diversity":
        s, s2 = witness["admitted"], witness["rejected"]
        if s not in chosen or s2 not in sub - chosen:
            return False
        swapped = universe.dist(_swap(chosen, s, s2))
        return more_b_diverse(swapped, universe.dist(chosen), b) is Diversity.STRICTLY_MORE
    if check == "frontier_condition":
        return universe.dist(chosen) not in frontier(BudgetSpec(universe.dist(sub), table.capacity), b)
    raise InputError(f"unknown check {check!r}")


def is_schur_for_some_priority(table: RuleTable, universe: Universe, b: BiasSpec,
                               limit: int = 8) -> PriorityRanking | None:
    """Brute force over every priority order; returns one reproducing the table, else None."""
    if len(universe) > limit:
        raise ResourceError(f"brute force over {len(universe)}! orders exceeds limit {limit}")
    subsets = table.subsets()
    q = table.capacity
    for order in itertools.permutations(universe.ids()):
        P = PriorityRanking(order)
        if all(frozenset(s.id for s in schur_choice(universe.resolve(sub), P, b, q)) == table[sub]
               for sub in subsets):
            return P
    return None


def adversarial_tables(universe: Universe, P: PriorityRanking, b: BiasSpec, q: int,
                       brute_force_limit: int = 6) -> dict[str, RuleTable]:
    """Rule tables that are not Schur rules for any priority, derived from the Schur table under ``P``.

    * ``wasteful``: drops the lowest-priority admit from every nonempty choice.
    * ``off-frontier``: on one applicant set, admits a full-size class whose
      distribution is off the frontier.
    * ``stitched``: on one applicant set, admits a different frontier base; only
      kept once brute force over every priority order confirms no Schur rule
      produces the table.

    Tables that cannot be built for this universe are omitted.
    """
    base = schur_table(universe, P, b, q)
    out: dict[str, RuleTable] = {}
    subsets = base.subsets()
    if len(universe) == 0:
        return out

    wasteful = {}
    for sub in subsets:
        chosen = sorted(base[sub], key=P.rank)
        wasteful[sub] = frozenset(chosen[:-1])
    out["wasteful"] = RuleTable(q, wasteful)

    for sub in subsets:
        front = frontier(BudgetSpec(universe.dist(sub), q), b)
        m = min(q, len(sub))
        off = next((frozenset(c) for c in itertools.combinations(sorted(sub), m)
                    if universe.dist(c) not in front), None)
        if off is not None:
            out["off-frontier"] = RuleTable(q, {**base.entries, sub: off})
            break

    if len(universe) <= brute_force_limit:
        for sub in subsets:
            students = universe.resolve(sub)
            for alt in sorted(sorted(s.id for s in c) for c in matroid_bases(students, b, q)):
                alt = frozenset(alt)
                if alt == base[sub]:
                    continue
                table = RuleTable(q, {**base.entries, sub: alt})
                if is_schur_for_some_priority(table, universe, b, limit=brute_force_limit) is None:
                    out["stitched"] = table
                    break
            if "stitched" in out:
                break
    return out
