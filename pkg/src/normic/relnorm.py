"""World-relative normality for non-partitional evidential accessibility.

When worlds are unstructured points and evidential accessibility is any
reflexive relation (not necessarily an equivalence), comparative normality
must be relativized to a reference world: the world whose evidential
probabilities do the assessing.  Likeliness and typicality become
lambda_w(v) = P([v]_Q | R_e(w)) and tau_w(v) = P({u in R_e(w) : v is at
least as normal as u, by w's lights} | R_e(w)), and the accessibility
relations are read off per reference world exactly as in the partitional
case.  When evidential accessibility IS an equivalence relation induced by
shared evidence, everything here collapses to the plain pipeline.

Discovery is not defined in this setting: without the state/evidence
factoring of worlds there is no "same state, narrower evidence" world to
move to.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from .core import KnowledgeVariant, StructureError, state_key
from .genprob import ConditioningError, ModelError, as_fraction

ZERO = Fraction(0)


class WorldlyProbabilityStructure:
    """Unstructured worlds, a reflexive evidential-accessibility function,
    a partition of the worlds, an exact prior over them, and a threshold."""

    def __init__(self, worlds: Iterable[Hashable], accessible: Mapping,
                 question, prior, threshold):
        self.worlds = tuple(sorted(set(worlds), key=state_key))
        if not self.worlds:
            raise ModelError("world set must be non-empty")
        world_set = frozenset(self.worlds)
        self.accessible = {}
        accessible = dict(accessible)
        if set(accessible) != world_set:
            raise ModelError("every world needs an accessibility set")
        for w, reachable in accessible.items():
            reachable = frozenset(reachable)
            if w not in reachable:
                raise ModelError(f"evidential accessibility must be "
                                 f"reflexive; {w!r} cannot reach itself")
            if not reachable <= world_set:
                raise ModelError(f"{w!r} reaches unknown worlds")
            self.accessible[w] = reachable
        self._label = question if callable(question) else dict(question).__getitem__
        self.prior = {w: as_fraction(p) for w, p in dict(prior).items()}
        if set(self.prior) != world_set:
            raise ModelError("prior must cover exactly the worlds")
        if any(p < 0 for p in self.prior.values()):
            raise ModelError("prior masses must be non-negative")
        if sum(self.prior.values()) != 1:
            raise ModelError("prior mass must sum to 1")
        self.threshold = as_fraction(threshold)
        if not ZERO < self.threshold <= 1:
            raise ModelError("threshold must lie in (0, 1]")
        for w in self.worlds:
            self.label_of(w)
            if self.mass(self.accessible[w]) == 0:
                raise ConditioningError(
                    f"the evidence at {w!r} has zero prior mass")

    def label_of(self, w):
        try:
            return self._label(w)
        except KeyError:
            raise ModelError(f"question does not label world {w!r}") from None

    def mass(self, worlds) -> Fraction:
        return sum((self.prior[w] for w in worlds), ZERO)


def rel_likeliness(wps: WorldlyProbabilityStructure, w, v) -> Fraction:
    """lambda_w(v): the probability of v's answer given w's evidence."""
    reachable = wps.accessible[w]
    cell = [u for u in reachable if wps.label_of(u) == wps.label_of(v)]
    return wps.mass(cell) / wps.mass(reachable)


def rel_typicality(wps: WorldlyProbabilityStructure, w, v) -> Fraction:
    """tau_w(v): the probability, given w's evidence, of the worlds there
    that are no more normal than v by w's lights."""
    reachable = wps.accessible[w]
    lam_v = rel_likeliness(wps, w, v)
    below = [u for u in reachable if rel_likeliness(wps, w, u) <= lam_v]
    return wps.mass(below) / wps.mass(reachable)


class RelativizedNormalityStructure:
    """Per-reference-world normality relations and the accessibility
    relations they induce."""

    def __init__(self, worlds, accessible: Mapping, ge_at: Mapping,
                 gg_at: Mapping, *, validate: bool = True):
        self.worlds = tuple(sorted(set(worlds), key=state_key))
        self.accessible = {w: frozenset(accessible[w]) for w in self.worlds}
        self._ge_at = dict(ge_at)
        self._gg_at = dict(gg_at)
        for w in self.worlds:
            if w not in self.accessible[w]:
                raise StructureError(f"accessibility not reflexive at {w!r}")
        if validate:
            self.validate()

    def at_least_as_normal(self, at, v, u) -> bool:
        return self._ge_at[at](v, u)

    def sufficiently_more_normal(self, at, v, u) -> bool:
        return self._gg_at[at](v, u)

    def doxastic_accessible(self, w) -> tuple:
        reachable = self.accessible[w]
        gg = self._gg_at[w]
        return tuple(sorted(
            (v for v in reachable if not any(gg(u, v) for u in reachable)),
            key=state_key))

    def epistemic_accessible(self, w, variant: KnowledgeVariant) -> tuple:
        reachable = self.accessible[w]
        ge, gg = self._ge_at[w], self._gg_at[w]
        keep = set(self.doxastic_accessible(w))
        keep.update(v for v in reachable if ge(v, w))
        if variant is KnowledgeVariant.WILLIAMSONIAN:
            keep.update(v for v in reachable if ge(w, v) and not gg(w, v))
        return tuple(sorted(keep, key=state_key))

    def validate(self):
        """Check the per-reference-world axioms enumeratively."""
        for at in self.worlds:
            ge, gg = self._ge_at[at], self._gg_at[at]
            for w in self.worlds:
                if not ge(w, w):
                    raise StructureError(
                        f"preorder at {at!r} not reflexive at {w!r}")
                if gg(w, w):
                    raise StructureError(
                        f"'sufficiently more normal' at {at!r} is reflexive "
                        f"at {w!r}")
            for w1 in self.worlds:
                for w2 in self.worlds:
                    if not ge(w1, w2):
                        continue
                    for w3 in self.worlds:
                        if ge(w2, w3) and not ge(w1, w3):
                            raise StructureError(
                                f"preorder at {at!r} not transitive")
            for w1 in self.worlds:
                for w2 in self.worlds:
                    if gg(w1, w2) and not ge(w1, w2):
                        raise StructureError(f"axiom 4a fails at {at!r}")
            for w1 in self.worlds:
                for w2 in self.worlds:
                    if not ge(w1, w2):
                        continue
                    for w3 in self.worlds:
                        if not gg(w2, w3):
                            continue
                        for w4 in self.worlds:
                            if ge(w3, w4) and not gg(w1, w4):
                                raise StructureError(
                                    f"axiom 4b fails at {at!r}")
            self._check_acyclic(at, gg)

    def _check_acyclic(self, at, gg):
        succ = {w: [v for v in self.worlds if gg(w, v)] for w in self.worlds}
        done, on_path = set(), set()

        def visit(w):
            if w in done:
                return
            on_path.add(w)
            for v in succ[w]:
                if v in on_path:
                    raise StructureError(
                        f"'sufficiently more normal' at {at!r} has a cycle")
                visit(v)
            on_path.discard(w)
            done.add(w)

        for w in self.worlds:
            visit(w)


def rel_generate(wps: WorldlyProbabilityStructure,
                 *, validate: bool = False) -> RelativizedNormalityStructure:
    """Relativized normality from world-relative likeliness and typicality.

    Normality comparisons are made over w's whole evidence-probability
    space: v is at least as normal as u (by w's lights) iff
    lambda_w(v) >= lambda_w(u), and sufficiently more normal iff the
    typicality ratio drops by at least t."""
    lam = {w: {v: rel_likeliness(wps, w, v) for v in wps.worlds}
           for w in wps.worlds}
    tau = {w: {v: rel_typicality(wps, w, v) for v in wps.worlds}
           for w in wps.worlds}
    gap = 1 - wps.threshold

    def make_ge(at):
        return lambda v, u: lam[at][v] >= lam[at][u]

    def make_gg(at):
        def gg(v, u):
            if tau[at][v] == 0:
                return False
            return tau[at][u] <= gap * tau[at][v]
        return gg

    return RelativizedNormalityStructure(
        wps.worlds, wps.accessible,
        {w: make_ge(w) for w in wps.worlds},
        {w: make_gg(w) for w in wps.worlds},
        validate=validate)


@dataclass(frozen=True)
class RelThresholdReport:
    holds: bool
    witness: Hashable | None
    mass: Fraction | None


def rel_check_threshold(wps: WorldlyProbabilityStructure,
                        rns: RelativizedNormalityStructure | None = None
                        ) -> RelThresholdReport:
    """The threshold guarantee, reformulated over worlds: the believed
    worlds carry conditional mass at least t at every reference world."""
    rns = rns or rel_generate(wps)
    for w in wps.worlds:
        believed = rns.doxastic_accessible(w)
        mass = wps.mass(believed) / wps.mass(wps.accessible[w])
        if mass < wps.threshold:
            return RelThresholdReport(False, w, mass)
    return RelThresholdReport(True, None, None)
