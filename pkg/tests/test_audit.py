from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from grids import biases_for, universe_of
from schurchoice.audit import (
    RevealedRelation,
    RuleTable,
    Universe,
    adversarial_tables,
    audit,
    canonical_key,
    check_frontier_condition,
    check_nonwasteful,
    check_promotes_diversity,
    check_srp,
    complete_ranking,
    is_schur_for_some_priority,
    replay_cycle,
    replay_witness,
    reveal_relation,
    schur_table,
    shortest_cycle,
)
from schurchoice.choice import PriorityRanking, Student
from schurchoice.errors import InputError, PreconditionError, ResourceError
from schurchoice.majorization import BiasSpec

ZERO2 = BiasSpec.uniform(2)
WORKED = Universe([Student("a1", 1), Student("a2", 1), Student("b1", 2), Student("b2", 2)], 2)
P = PriorityRanking(("a1", "b1", "b2", "a2"))


def fs(*ids):
    return frozenset(ids)


def universes():
    def build(n):
        return st.tuples(
            st.just(n),
            st.lists(st.integers(1, n), min_size=1, max_size=5),
            st.integers(1, 3),
            st.randoms(use_true_random=False),
            st.integers(0, 2),
        )

    def finish(t):
        n, types, q, rnd, k = t
        universe = universe_of(types, n)
        order = universe.ids()
        rnd.shuffle(order)
        biases = biases_for(n)
        return universe, PriorityRanking(tuple(order)), biases[k % len(biases)], q

    return st.integers(1, 3).flatmap(build).map(finish)


class TestTables:
    def test_canonical_key_orders_by_size_then_ids(self):
        subs = [fs("b"), fs("a", "c"), fs(), fs("a")]
        assert sorted(subs, key=canonical_key) == [fs(), fs("a"), fs("b"), fs("a", "c")]

    def test_rejects_bad_entries(self):
        with pytest.raises(InputError):
            RuleTable(2, {fs("a"): fs("b")})
        with pytest.raises(InputError):
            RuleTable(1, {fs("a", "b"): fs("a", "b")})
        with pytest.raises(InputError):
            RuleTable(0, {})

    def test_missing_entry_in_full_mode(self):
        table = RuleTable(3, {fs("a1"): fs("a1")})
        with pytest.raises(InputError):
            check_nonwasteful(table, WORKED)
        assert check_nonwasteful(table, WORKED, partial=True).passed

    def test_unknown_student(self):
        with pytest.raises(InputError):
            check_nonwasteful(RuleTable(3, {fs("zz"): fs()}), WORKED, partial=True)

    def test_universe_limit(self):
        big = Universe([Student(f"s{k}", 1) for k in range(14)], 1)
        with pytest.raises(ResourceError):
            big.all_subsets()


class TestWorkedAudit:
    def test_schur_table_passes_and_recovers(self):
        table = schur_table(WORKED, P, ZERO2, 3)
        report = audit(table, WORKED, ZERO2)
        assert report.passed and report.frontier_condition.passed
        assert report.recovered_ranking.order == ("a1", "b1", "b2", "a2")
        assert report.to_dict()["all_pass"] is True

    def test_wasteful_witness(self):
        table = schur_table(WORKED, P, ZERO2, 3)
        entries = dict(table.entries)
        entries[fs("a1", "a2")] = fs("a1")
        res = check_nonwasteful(RuleTable(3, entries), WORKED)
        assert not res.passed
        assert res.witness == {"applicants": ["a1", "a2"], "chosen": ["a1"], "expected_size": 2}

    def test_diversity_witness(self):
        # alphabetical choice admits both type-1 students from the full pool
        bad = RuleTable(2, {sub: fs(*sorted(sub)[:2]) for sub in WORKED.all_subsets()})
        res = check_promotes_diversity(bad, WORKED, ZERO2)
        assert not res.passed
        assert res.witness["applicants"] == ["a1", "a2", "b1"]
        assert replay_witness("promotes_diversity", res.witness, bad, WORKED, ZERO2)

    def test_two_cycle_from_stitched_rule(self):
        # under P the pool {a1,a2,b1} admits a1,b1; a second set reveals the opposite preference
        table = schur_table(WORKED, P, ZERO2, 2)
        entries = dict(table.entries)
        entries[fs("a1", "a2", "b2")] = fs("a2", "b2")
        stitched = RuleTable(2, entries)
        report = audit(stitched, WORKED, ZERO2)
        assert report.nonwasteful.passed and report.promotes_diversity.passed
        assert not report.srp_acyclic.passed
        witness = report.srp_acyclic.witness
        assert len(witness["students"]) == 2
        assert replay_cycle(witness, stitched, WORKED, ZERO2)
        assert report.recovered_ranking is None
        assert is_schur_for_some_priority(stitched, WORKED, ZERO2) is None

    def test_replay_rejects_tampered_witness(self):
        table = schur_table(WORKED, P, ZERO2, 2)
        assert not replay_cycle({"students": ["a2", "a1"], "sets": [["a1", "a2"], ["a1", "a2"]]},
                                table, WORKED, ZERO2)


class TestRanking:
    def test_completion_breaks_ties_by_id(self):
        rel = RevealedRelation(frozenset({("c", "a")}), {})
        assert complete_ranking(rel, ["a", "b", "c"]).order == ("b", "c", "a")

    def test_cycle_has_no_completion(self):
        rel = RevealedRelation(frozenset({("a", "b"), ("b", "a")}), {})
        with pytest.raises(PreconditionError):
            complete_ranking(rel, ["a", "b"])

    def test_shortest_cycle(self):
        edges = frozenset({("a", "b"), ("b", "c"), ("c", "a"), ("c", "d"), ("d", "c")})
        cycle = shortest_cycle(RevealedRelation(edges, {}))
        assert len(cycle) == 2 and set(cycle) == {"c", "d"}

    def test_acyclic(self):
        assert shortest_cycle(RevealedRelation(frozenset({("a", "b")}), {})) is None


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(universes())
    def test_round_trip(self, inst):
        universe, order, b, q = inst
        table = schur_table(universe, order, b, q)
        report = audit(table, universe, b)
        assert report.passed
        assert schur_table(universe, report.recovered_ranking, b, q) == table

    @settings(max_examples=60, deadline=None)
    @given(universes())
    def test_revealed_relation_respects_priority(self, inst):
        universe, order, b, q = inst
        rel = reveal_relation(schur_table(universe, order, b, q), universe, b)
        assert all(order.outranks(s, s2) for s, s2 in rel.edges)

    @settings(max_examples=40, deadline=None)
    @given(universes())
    def test_adversaries_fail_with_replayable_witness(self, inst):
        universe, order, b, q = inst
        for name, table in adversarial_tables(universe, order, b, q, brute_force_limit=4).items():
            report = audit(table, universe, b)
            failed = [c for c in ("nonwasteful", "promotes_diversity", "srp_acyclic")
                      if not getattr(report, c).passed]
            assert failed, name
            for c in failed:
                assert replay_witness(c, getattr(report, c).witness, table, universe, b)

    @settings(max_examples=100, deadline=None)
    @given(universes(), st.randoms(use_true_random=False))
    def test_frontier_condition_equivalence(self, inst, rnd):
        universe, _, b, q = inst
        entries = {}
        for sub in universe.all_subsets():
            members = sorted(sub)
            m = min(q, len(members))
            entries[sub] = frozenset(rnd.sample(members, m if rnd.random() < 0.9 else rnd.randint(0, m)))
        table = RuleTable(q, entries)
        lhs = check_frontier_condition(table, universe, b).passed
        rhs = check_nonwasteful(table, universe).passed and check_promotes_diversity(table, universe, b).passed
        assert lhs == rhs

    def test_partial_domain(self):
        table = schur_table(WORKED, P, ZERO2, 3)
        subset = {k: v for k, v in table.entries.items() if len(k) >= 3}
        report = audit(RuleTable(3, subset), WORKED, ZERO2, partial=True)
        assert report.partial_domain and report.subsets_audited == len(subset)
        assert report.passed
        assert check_srp(RuleTable(3, subset), WORKED, ZERO2, partial=True).passed

    def test_brute_force_finds_priority(self):
        table = schur_table(WORKED, P, BiasSpec.from_bias((F(1, 3), F(-1, 3))), 2)
        found = is_schur_for_some_priority(table, WORKED, BiasSpec.from_bias((F(1, 3), F(-1, 3))))
        assert found is not None
