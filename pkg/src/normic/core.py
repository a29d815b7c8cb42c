"""Normality structures over centered worlds.

A centered world pairs a state with the body of evidence the agent holds
there (a set of states containing the actual one, so evidence is always
true).  A normality structure adds two relations between worlds: a preorder
``at least as normal`` and a well-founded relation ``sufficiently more
normal``.  Evidential, doxastic, and epistemic accessibility are derived
from these, as is the result of discovering a true proposition.

Structures are immutable after construction and every operation is a pure
query, so instances can be shared freely between threads.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple


class StructureError(ValueError):
    """A structure, world, or query violates a structural requirement."""


class FalseDiscoveryError(StructureError):
    """Attempt to discover a proposition that is false at the actual state."""


class InexpressibleEvidenceError(StructureError):
    """A discovery whose result is not a possible body of evidence."""


class KnowledgeVariant(Enum):
    """Which definition of epistemic accessibility to use.

    STALNAKERIAN keeps exactly the doxastic worlds plus those at least as
    normal as actuality (a transitive relation).  WILLIAMSONIAN additionally
    keeps worlds that are less normal than actuality but not sufficiently
    so -- a margin for error.
    """

    STALNAKERIAN = "stalnaker"
    WILLIAMSONIAN = "williamson"


class World(NamedTuple):
    state: Hashable
    evidence: str


def state_key(state):
    """Canonical sort key; keeps mixed int/str state ids orderable."""
    if isinstance(state, int):
        return (0, state, "")
    return (1, 0, str(state))


def world_key(w: World):
    return (w.evidence, state_key(w.state))


def _as_predicate(relation):
    if callable(relation):
        return relation, None
    pairs = frozenset((World(*w), World(*v)) for w, v in relation)
    return (lambda w, v: (w, v) in pairs), pairs


class NormalityStructure:
    """States, bodies of evidence, and the two normality relations.

    `evidence` maps a name to its member states; worlds are derived as all
    (state, evidence name) pairs with the state a member, which builds in
    the veridicality of evidence.  The relations may be given either as
    collections of world pairs (hand-built models) or as predicates
    (structures generated from probability models, where materialising the
    pairs would be wasteful).

    With ``validate=True`` the constructor checks the axioms: the first
    relation must be reflexive and transitive, the second irreflexive,
    acyclic, included in the first, and closed under flanking by the first
    (w1 >= w2 >> w3 >= w4 implies w1 >> w4).  Acyclicity is the finite
    stand-in for well-foundedness.  Generators that certify the axioms by
    construction pass ``validate=False``; `validate()` can still be called
    explicitly on small instances.
    """

    def __init__(self, states, evidence: Mapping[str, Iterable],
                 at_least_as_normal, sufficiently_more_normal, *,
                 validate: bool = True):
        self.states = frozenset(states)
        if not self.states:
            raise StructureError("state set must be non-empty")
        self.evidence = {}
        by_members = {}
        for name, members in evidence.items():
            members = frozenset(members)
            if not members:
                raise StructureError(f"evidence {name!r} is empty")
            if not members <= self.states:
                raise StructureError(
                    f"evidence {name!r} contains unknown states "
                    f"{sorted(members - self.states, key=state_key)}")
            if members in by_members:
                raise StructureError(
                    f"evidence {name!r} duplicates {by_members[members]!r}")
            by_members[members] = name
            self.evidence[name] = members
        if not self.evidence:
            raise StructureError("evidence family must be non-empty")
        self._by_members = by_members
        self._cells = {
            name: tuple(sorted((World(s, name) for s in members),
                               key=world_key))
            for name, members in self.evidence.items()
        }
        self.worlds = tuple(w for name in sorted(self._cells)
                            for w in self._cells[name])
        self._world_set = frozenset(self.worlds)
        self._ge, self._ge_pairs = _as_predicate(at_least_as_normal)
        self._gg, self._gg_pairs = _as_predicate(sufficiently_more_normal)
        if validate:
            self.validate()

    # -- basic queries -------------------------------------------------

    def require_world(self, w: World) -> World:
        w = World(*w)
        if w not in self._world_set:
            raise StructureError(f"unknown world {w}")
        return w

    def at_least_as_normal(self, w: World, v: World) -> bool:
        return self._ge(self.require_world(w), self.require_world(v))

    def sufficiently_more_normal(self, w: World, v: World) -> bool:
        return self._gg(self.require_world(w), self.require_world(v))

    def cell(self, evidence_name: str) -> tuple:
        return self._cells[evidence_name]

    # -- accessibility -------------------------------------------------

    def evidential_accessible(self, w: World) -> tuple:
        """All worlds sharing w's evidence."""
        return self._cells[self.require_world(w).evidence]

    def doxastic_accessible(self, w: World) -> tuple:
        """Evidential possibilities not sufficiently less normal than any
        other; non-empty whenever the second relation is well-founded."""
        cell = self.evidential_accessible(w)
        return tuple(v for v in cell
                     if not any(self._gg(u, v) for u in cell))

    def epistemic_accessible(self, w: World,
                             variant: KnowledgeVariant) -> tuple:
        w = self.require_world(w)
        cell = self._cells[w.evidence]
        keep = set(self.doxastic_accessible(w))
        keep.update(v for v in cell if self._ge(v, w))
        if variant is KnowledgeVariant.WILLIAMSONIAN:
            # margin for error: less normal than actuality, but not
            # sufficiently so
            keep.update(v for v in cell
                        if self._ge(w, v) and not self._gg(w, v))
        return tuple(sorted(keep, key=world_key))

    def simple_williamsonian(self, w: World) -> tuple:
        """{v evidentially accessible : w is not sufficiently more normal}.

        Agrees with the Williamsonian clause whenever the normality preorder
        is total on w's evidence cell; raises otherwise, naming the cell.
        """
        w = self.require_world(w)
        cell = self._cells[w.evidence]
        for i, u in enumerate(cell):
            for v in cell[i + 1:]:
                if not (self._ge(u, v) or self._ge(v, u)):
                    raise StructureError(
                        f"normality is not total on cell {w.evidence!r}: "
                        f"{u} and {v} are incomparable")
        return tuple(v for v in cell if not self._gg(w, v))

    # -- discovery -----------------------------------------------------

    def discover(self, w: World, proposition: Iterable) -> World:
        """The world reached by discovering a true set of states in w."""
        w = self.require_world(w)
        p = frozenset(proposition)
        if w.state not in p:
            raise FalseDiscoveryError(
                f"state {w.state!r} is not in the discovered proposition")
        narrowed = p & self.evidence[w.evidence]
        name = self._by_members.get(narrowed)
        if name is None:
            raise InexpressibleEvidenceError(
                f"{sorted(narrowed, key=state_key)} is not a possible "
                f"body of evidence")
        return World(w.state, name)

    # -- validation ----------------------------------------------------

    def _pairs(self, pred, pairs):
        if pairs is not None:
            return pairs
        return frozenset((w, v) for w in self.worlds for v in self.worlds
                         if pred(w, v))

    def validate(self):
        """Enumeratively check all axioms.  Quadratic/cubic in world count;
        meant for hand-built or small generated structures."""
        ge = self._pairs(self._ge, self._ge_pairs)
        gg = self._pairs(self._gg, self._gg_pairs)
        for w in self.worlds:
            if (w, w) not in ge:
                raise StructureError(f"normality preorder not reflexive at {w}")
            if (w, w) in gg:
                raise StructureError(
                    f"'sufficiently more normal' is reflexive at {w}")
        ge_right = {}
        for w, v in ge:
            ge_right.setdefault(w, set()).add(v)
        for w, v in ge:
            for u in ge_right.get(v, ()):
                if (w, u) not in ge:
                    raise StructureError(
                        f"normality preorder not transitive: {w} >= {v} >= {u}")
        for w, v in gg:
            if (w, v) not in ge:
                raise StructureError(
                    f"{w} >> {v} without {w} >= {v} (axiom 5a)")
        ge_left = {}
        for w, v in ge:
            ge_left.setdefault(v, set()).add(w)
        for w2, w3 in gg:
            for w1 in ge_left.get(w2, ()):
                for w4 in ge_right.get(w3, ()):
                    if (w1, w4) not in gg:
                        raise StructureError(
                            f"axiom 5b fails: {w1} >= {w2} >> {w3} >= {w4} "
                            f"but not {w1} >> {w4}")
        self._check_acyclic(gg)

    def _check_acyclic(self, gg):
        succ = {}
        for w, v in gg:
            succ.setdefault(w, []).append(v)
        done, on_path = set(), set()

        def visit(w):
            if w in done:
                return
            on_path.add(w)
            for v in succ.get(w, ()):
                if v in on_path:
                    raise StructureError(
                        "'sufficiently more normal' has a cycle through "
                        f"{v}; it cannot be well-founded")
                visit(v)
            on_path.discard(w)
            done.add(w)

        for w in list(succ):
            visit(w)


@dataclass(frozen=True)
class RevisionReport:
    """Belief dynamics of one discovery, as sets of states.

    The two flags test classical belief-revision postulates read over
    possibility sets: revision never adds beliefs beyond plain expansion
    (``pre & p`` is a subset of ``post``), and when the discovery is
    compatible with prior belief, revision IS expansion (``post`` equals
    ``pre & p``).  Normality dynamics can break both.
    """

    pre_belief: tuple
    post_belief: tuple
    agm_inclusion_holds: bool
    agm_preservation_holds: bool


def believed_state_set(ns: NormalityStructure, w: World) -> tuple:
    """States of the doxastically accessible worlds, in canonical order."""
    return tuple(sorted({v.state for v in ns.doxastic_accessible(w)},
                        key=state_key))


def revision_report(ns: NormalityStructure, w: World,
                    proposition: Iterable) -> RevisionReport:
    p = frozenset(proposition)
    v = ns.discover(w, p)
    pre = believed_state_set(ns, w)
    post = believed_state_set(ns, v)
    expansion = frozenset(pre) & p
    inclusion = expansion <= frozenset(post)
    preservation = (not expansion) or frozenset(post) == expansion
    return RevisionReport(pre, post, inclusion, preservation)
