"""Hand-built normality structures: accessibility, discovery, validation."""

import pytest

from normic.core import (FalseDiscoveryError, InexpressibleEvidenceError,
                         KnowledgeVariant, NormalityStructure,
                         StructureError, World, believed_state_set,
                         revision_report)

STAL = KnowledgeVariant.STALNAKERIAN
WILL = KnowledgeVariant.WILLIAMSONIAN


def ranked_structure(ranks, gg_pairs, evidence=None, validate=True):
    """Single-cell structure with a total preorder given by numeric ranks
    (higher = more normal) and an explicit 'sufficiently more' relation."""
    states = sorted(ranks)
    evidence = evidence or {"e": states}
    ge = set()
    for name, members in evidence.items():
        for w in members:
            for v in members:
                if ranks[w] >= ranks[v]:
                    ge.add((World(w, name), World(v, name)))
    gg = {(World(w, n), World(v, n))
          for (w, v, n) in gg_pairs}
    return NormalityStructure(states, evidence, ge, gg, validate=validate)


@pytest.fixture
def four_chain():
    # a > b > c > d with a sufficiently above c; 5b then forces a >> d
    return ranked_structure({"a": 4, "b": 3, "c": 2, "d": 1},
                            {("a", "c", "e"), ("a", "d", "e")})


class TestAccessibility:
    def test_evidential_is_the_cell(self, four_chain):
        w = World("b", "e")
        assert four_chain.evidential_accessible(w) == tuple(
            World(s, "e") for s in "abcd")

    def test_doxastic_drops_dominated_worlds(self, four_chain):
        assert believed_state_set(four_chain, World("d", "e")) == ("a", "b")

    def test_doxastic_same_for_whole_cell(self, four_chain):
        cells = {four_chain.doxastic_accessible(World(s, "e"))
                 for s in "abcd"}
        assert len(cells) == 1

    def test_stalnakerian_adds_at_least_as_normal(self, four_chain):
        at_c = four_chain.epistemic_accessible(World("c", "e"), STAL)
        assert {v.state for v in at_c} == {"a", "b", "c"}

    def test_williamsonian_adds_margin_for_error(self, four_chain):
        at_b = four_chain.epistemic_accessible(World("b", "e"), WILL)
        assert {v.state for v in at_b} == {"a", "b", "c", "d"}
        at_b_stal = four_chain.epistemic_accessible(World("b", "e"), STAL)
        assert {v.state for v in at_b_stal} == {"a", "b"}

    def test_reflexive_everywhere(self, four_chain):
        for w in four_chain.worlds:
            for variant in KnowledgeVariant:
                assert w in four_chain.epistemic_accessible(w, variant)

    def test_sandwich(self, four_chain):
        for w in four_chain.worlds:
            r_b = set(four_chain.doxastic_accessible(w))
            r_e = set(four_chain.evidential_accessible(w))
            for variant in KnowledgeVariant:
                r_k = set(four_chain.epistemic_accessible(w, variant))
                assert r_b <= r_k <= r_e

    def test_simple_williamsonian_matches_full(self, four_chain):
        for w in four_chain.worlds:
            assert (four_chain.simple_williamsonian(w)
                    == four_chain.epistemic_accessible(w, WILL))

    def test_simple_williamsonian_needs_totality(self):
        # two incomparable worlds
        ge = {(World("a", "e"), World("a", "e")),
              (World("b", "e"), World("b", "e"))}
        ns = NormalityStructure(["a", "b"], {"e": ["a", "b"]}, ge, set())
        with pytest.raises(StructureError, match="not total"):
            ns.simple_williamsonian(World("a", "e"))

    def test_empty_gg_makes_belief_trivial(self):
        ns = ranked_structure({"a": 2, "b": 1}, set())
        w = World("b", "e")
        assert (ns.doxastic_accessible(w)
                == ns.evidential_accessible(w))

    def test_unknown_world_rejected(self, four_chain):
        with pytest.raises(StructureError, match="unknown world"):
            four_chain.doxastic_accessible(World("z", "e"))
        with pytest.raises(StructureError, match="unknown world"):
            four_chain.evidential_accessible(World("a", "nope"))

    def test_singleton_evidence(self):
        ns = NormalityStructure(
            ["a"], {"only": ["a"]},
            {(World("a", "only"), World("a", "only"))}, set())
        w = World("a", "only")
        assert ns.evidential_accessible(w) == (w,)
        assert ns.simple_williamsonian(w) == (w,)


class TestValidation:
    def test_missing_reflexivity(self):
        with pytest.raises(StructureError, match="reflexive"):
            NormalityStructure(["a", "b"], {"e": ["a", "b"]},
                               {(World("a", "e"), World("b", "e"))}, set())

    def test_gg_outside_ge_breaks_5a(self):
        ranks = {"a": 2, "b": 1}
        with pytest.raises(StructureError, match="5a"):
            ranked_structure(ranks, {("b", "a", "e")})

    def test_missing_5b_closure(self):
        # a >= a >> c >= d requires a >> d
        with pytest.raises(StructureError, match="5b"):
            ranked_structure({"a": 3, "c": 2, "d": 1}, {("a", "c", "e")})

    def test_gg_cycle_rejected(self):
        # a 2-cycle cannot satisfy the axioms: given totality, closure under
        # flanking (5b) would force reflexivity, so validation must reject
        ge = {(World(s, "e"), World(v, "e")) for s in "ab" for v in "ab"}
        gg = {(World("a", "e"), World("b", "e")),
              (World("b", "e"), World("a", "e"))}
        with pytest.raises(StructureError, match="5b|cycle|reflexive"):
            NormalityStructure(["a", "b"], {"e": ["a", "b"]}, ge, gg)

    def test_empty_evidence_rejected(self):
        with pytest.raises(StructureError, match="empty"):
            NormalityStructure(["a"], {"e": []}, set(), set())

    def test_evidence_outside_states_rejected(self):
        with pytest.raises(StructureError, match="unknown states"):
            NormalityStructure(["a"], {"e": ["a", "z"]}, set(), set())

    def test_cross_cell_relations_are_permitted(self):
        # the definitions are computed literally even if a hand-built
        # preorder relates worlds with different evidence
        a1, a2, b2 = World("a", "e1"), World("a", "e2"), World("b", "e2")
        ge = {(a1, a1), (a2, a2), (b2, b2), (a1, a2)}
        ns = NormalityStructure(["a", "b"], {"e1": ["a"], "e2": ["a", "b"]},
                                ge, set())
        assert ns.doxastic_accessible(a1) == (a1,)
        assert set(ns.doxastic_accessible(a2)) == {a2, b2}


class TestDiscovery:
    @pytest.fixture
    def flipping_like(self):
        # truncated waiting-time structure with suffix evidence sets
        states = list(range(1, 9))
        evidence = {f"after{x}": list(range(x + 1, 9)) for x in range(4)}
        ge, gg = set(), set()
        for name, members in evidence.items():
            for w in members:
                for v in members:
                    if w <= v:
                        ge.add((World(w, name), World(v, name)))
                    if v >= w + 3:
                        gg.add((World(w, name), World(v, name)))
        return NormalityStructure(states, evidence, ge, gg)

    def test_discover_narrows_evidence(self, flipping_like):
        w = World(2, "after0")
        v = flipping_like.discover(w, set(range(2, 9)))
        assert v == World(2, "after1")

    def test_trivial_discovery_is_identity(self, flipping_like):
        w = World(2, "after1")
        assert flipping_like.discover(w, set(range(1, 50))) == w

    def test_false_discovery_rejected(self, flipping_like):
        with pytest.raises(FalseDiscoveryError):
            flipping_like.discover(World(2, "after0"), {3, 4, 5})

    def test_inexpressible_evidence_rejected(self, flipping_like):
        with pytest.raises(InexpressibleEvidenceError):
            flipping_like.discover(World(2, "after0"), {2, 4, 6, 8})

    def test_iterated_discovery(self, flipping_like):
        w = World(4, "after0")
        w = flipping_like.discover(w, set(range(2, 9)))
        w = flipping_like.discover(w, set(range(3, 9)))
        assert w == World(4, "after2")


class TestRevisionReport:
    @pytest.fixture
    def flipping_like(self):
        # belief keeps two states under the open-ended evidence, but only
        # one under the short body of evidence {1,2,3}
        states = list(range(1, 9))
        evidence = {f"after{x}": list(range(x + 1, 9)) for x in range(3)}
        evidence["short"] = [1, 2, 3]
        ge, gg = set(), set()
        for name, members in evidence.items():
            step = 1 if name == "short" else 2
            for w in members:
                for v in members:
                    if w <= v:
                        ge.add((World(w, name), World(v, name)))
                    if v >= w + step:
                        gg.add((World(w, name), World(v, name)))
        return NormalityStructure(states, evidence, ge, gg)

    def test_compatible_discovery_can_still_shift_belief(self, flipping_like):
        # beliefs slide forward: expansion would give {2} but belief is {2,3}
        report = revision_report(flipping_like, World(2, "after0"),
                                 set(range(2, 9)))
        assert report.pre_belief == (1, 2)
        assert report.post_belief == (2, 3)
        assert report.agm_inclusion_holds
        assert not report.agm_preservation_holds

    def test_learning_the_already_believed_can_shrink_belief(self,
                                                             flipping_like):
        report = revision_report(flipping_like, World(1, "after0"),
                                 {1, 2, 3})
        assert report.pre_belief == (1, 2)
        assert report.post_belief == (1,)
        assert not report.agm_inclusion_holds
        assert not report.agm_preservation_holds

    def test_trivial_discovery_keeps_both_postulates(self, flipping_like):
        report = revision_report(flipping_like, World(2, "after1"),
                                 set(range(1, 99)))
        assert report.agm_inclusion_holds
        assert report.agm_preservation_holds
        assert report.pre_belief == report.post_belief
