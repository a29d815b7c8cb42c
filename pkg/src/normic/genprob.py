"""Reduction of comparative normality to evidential probability.

A probability structure fixes a prior over states, a family of possible
bodies of evidence, a question (a partition of the states), and a threshold
t in (0, 1].  Worlds are ordered by the *likeliness* of their true answer
(its probability given the evidence); one world is *sufficiently more
normal* than another when the drop in *typicality* -- the evidential
probability that things are no more normal than they are at that world --
meets the threshold: 1 - tau(v)/tau(w) >= t.  Optionally the drop in
likeliness must meet the threshold as well (the stricter rule).

Everything discrete is computed in exact rational arithmetic; scenarios
with astronomically many equally probable answers are handled by grouping
them into families inside an `AnswerSpectrum` rather than enumerating.
"""

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, NamedTuple

from .core import (KnowledgeVariant, NormalityStructure, StructureError,
                   World, state_key, world_key)

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """A probability model is malformed."""


class ConditioningError(ModelError):
    """Conditioning on a zero-probability body of evidence."""


class UndecidedAtDepth(ModelError):
    """A truncated model is too shallow to certify the requested answer."""


def as_fraction(value) -> Fraction:
    """Exact rational from int/Fraction/decimal string.  Floats are refused:
    they would silently lose exactness where thresholds like .9999999 must
    compare exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ModelError(f"need an exact rational, got {value!r}; "
                     "pass a Fraction, int, or decimal string")


class Question:
    """A partition of the states, given by a total labeling function."""

    def __init__(self, label, name: str = "custom"):
        self._label = label if callable(label) else dict(label).__getitem__
        self.name = name

    def label_of(self, state):
        try:
            return self._label(state)
        except KeyError:
            raise ModelError(f"question {self.name!r} does not label "
                             f"state {state!r}") from None

    @classmethod
    def finest(cls):
        """Each state is its own answer."""
        return cls(lambda s: s, name="finest")

    @classmethod
    def single_cell(cls, label="all"):
        return cls(lambda s: label, name="single")

    def __repr__(self):
        return f"Question({self.name!r})"


class SufficiencyRule(Enum):
    SUFFICIENCY = "sufficiency"
    SUFFICIENCY_PLUS = "sufficiency-plus"


class SpectrumEntry(NamedTuple):
    label: Hashable
    mass: Fraction      # conditional probability of each cell in the family
    count: int          # number of equally probable cells sharing the label


class AnswerSpectrum:
    """Exact conditional distribution of a question's answers given one body
    of evidence.

    An entry with count > 1 stands for a family of `count` distinct answers
    of identical probability (e.g. the 2**100 specific all-but-certain-fair
    outcomes of a long coin experiment); the family is never enumerated.

    `residual_mass` is the total probability of answers left out of a
    truncated enumeration, each individually no more probable than
    `residual_cell_bound`.  `slack` is mass that a truncated dynamic
    program has not yet attributed to any particular answer.  Queries that
    a truncation could distort raise UndecidedAtDepth instead of guessing.
    """

    def __init__(self, entries, residual_mass=ZERO,
                 residual_cell_bound=ZERO, slack=ZERO):
        self.entries = tuple(sorted(
            (SpectrumEntry(label, Fraction(mass), int(count))
             for label, mass, count in entries),
            key=lambda e: (-e.mass, state_key(e.label))))
        self.residual_mass = Fraction(residual_mass)
        self.residual_cell_bound = Fraction(residual_cell_bound)
        self.slack = Fraction(slack)
        seen = set()
        for e in self.entries:
            if e.mass < 0 or e.count < 1:
                raise ModelError(f"bad spectrum entry {e}")
            if e.label in seen:
                raise ModelError(f"duplicate answer label {e.label!r}")
            seen.add(e.label)
        total = sum((e.mass * e.count for e in self.entries), ZERO)
        total += self.residual_mass + self.slack
        if total != 1:
            raise ModelError(f"answer masses sum to {total}, not 1")
        self._by_label = {e.label: e for e in self.entries}

    def labels(self):
        return tuple(e.label for e in self.entries)

    def likeliness(self, label) -> Fraction:
        return self._by_label[label].mass

    def typicality(self, label) -> Fraction:
        """Probability that the true answer is no more probable than this
        one: the mass at or below this entry's level, plus everything the
        truncation left out (which sits strictly below every certified
        entry)."""
        if self.slack:
            raise UndecidedAtDepth(
                "typicality is not certified while unattributed mass remains")
        own = self._by_label[label].mass
        if self.residual_mass and own <= self.residual_cell_bound:
            raise UndecidedAtDepth(
                f"answer {label!r} ranks within the truncated tail")
        below = sum((e.mass * e.count for e in self.entries if e.mass <= own),
                    ZERO)
        return below + self.residual_mass

    def _groups(self):
        group = []
        for e in self.entries:
            if group and e.mass != group[0].mass:
                yield group[0].mass, group
                group = []
            group.append(e)
        if group:
            yield group[0].mass, group

    def believed(self, threshold: Fraction) -> tuple:
        """The strongest union of answers that contains every most probable
        answer, is closed under 'at least as probable', and suffices for the
        threshold: whole tie-groups are added in decreasing probability until
        the accumulated conditional mass reaches t."""
        t = Fraction(threshold)
        out, cum = [], ZERO
        prev_mass = None
        for mass, group in self._groups():
            if cum >= t:
                # one look-ahead group: certify the stopping boundary
                if self.slack and prev_mass - mass <= self.slack:
                    raise UndecidedAtDepth(
                        "tie at the belief boundary is narrower than the "
                        "truncation slack")
                return tuple(out)
            if self.slack:
                if prev_mass is not None and prev_mass - mass <= self.slack:
                    raise UndecidedAtDepth(
                        "answer ordering is narrower than the truncation slack")
                if len(group) > 1 or group[0].count > 1:
                    # an apparent tie under slack may hide a real gap
                    raise UndecidedAtDepth(
                        "tied answers cannot be certified under truncation slack")
            if self.residual_mass and mass <= self.residual_cell_bound:
                raise UndecidedAtDepth(
                    "belief set would reach into the truncated tail")
            before = cum
            for e in group:
                out.append(e.label)
                cum += e.mass * e.count
            if cum >= t and self.slack and before + self.slack >= t:
                raise UndecidedAtDepth(
                    "threshold crossing is narrower than the truncation slack")
            prev_mass = mass
        if cum >= t:
            return tuple(out)
        raise UndecidedAtDepth(
            f"enumerated answers carry only {cum} < t={t}; deepen the model")

    def believed_mass(self, threshold: Fraction) -> Fraction:
        believed = set(self.believed(threshold))
        return sum((e.mass * e.count for e in self.entries
                    if e.label in believed), ZERO)

    def believed_plus(self, threshold: Fraction) -> tuple:
        """Belief set under the stricter rule that also requires a
        sufficient drop in likeliness.  Exclusion is hardest to escape from
        the top answer, which maximises typicality and likeliness at once."""
        t = Fraction(threshold)
        lam_max = self.entries[0].mass if self.entries else ZERO
        keep = []
        for e in self.entries:
            excluded = (self.typicality(e.label) <= (1 - t)
                        and e.mass <= (1 - t) * lam_max)
            if not excluded:
                keep.append(e.label)
        return tuple(keep)


class ProbabilityStructure:
    """States, evidence family, question, exact prior, and threshold.

    Truncations of infinite state spaces record the un-modeled prior mass in
    `prior_tail`; an evidence set that conceptually extends past the
    truncation lists its share in `evidence_tail` (per name), along with a
    bound `tail_cell_bound` on the prior mass of any single un-modeled
    answer.  Conditional probabilities then come out exactly as in the
    infinite model, and queries the tail could disturb raise
    UndecidedAtDepth.
    """

    def __init__(self, states, evidence: Mapping[str, Iterable], prior,
                 question: Question | None = None, threshold=Fraction(1, 2),
                 *, prior_tail=ZERO, evidence_tail=None, tail_cell_bound=None):
        self.states = tuple(sorted(set(states), key=state_key))
        if not self.states:
            raise ModelError("state set must be non-empty")
        state_set = frozenset(self.states)
        self.prior = {s: as_fraction(p) for s, p in dict(prior).items()}
        if set(self.prior) != state_set:
            raise ModelError("prior must assign a mass to exactly the states")
        if any(p < 0 for p in self.prior.values()):
            raise ModelError("prior masses must be non-negative")
        self.prior_tail = as_fraction(prior_tail)
        total = sum(self.prior.values()) + self.prior_tail
        if total != 1:
            raise ModelError(f"prior mass {total} != 1")
        self.question = question or Question.finest()
        self.threshold = as_fraction(threshold)
        if not ZERO < self.threshold <= ONE:
            # t = 0 would make every world 'sufficiently more normal' than
            # itself, destroying well-foundedness
            raise ModelError("threshold must lie in (0, 1]")
        self.evidence = {}
        self.evidence_tail = {}
        self.tail_cell_bound = {}
        evidence_tail = dict(evidence_tail or {})
        tail_cell_bound = dict(tail_cell_bound or {})
        by_members = {}
        for name, members in evidence.items():
            members = frozenset(members)
            if not members:
                raise ModelError(f"evidence {name!r} is empty")
            if not members <= state_set:
                raise ModelError(f"evidence {name!r} contains unknown states")
            if members in by_members:
                raise ModelError(
                    f"evidence {name!r} duplicates {by_members[members]!r}")
            by_members[members] = name
            self.evidence[name] = members
            self.evidence_tail[name] = as_fraction(evidence_tail.get(name, ZERO))
            self.tail_cell_bound[name] = as_fraction(
                tail_cell_bound.get(name, ZERO))
            if self.evidence_mass(name) == 0:
                raise ModelError(f"evidence {name!r} has zero prior mass")
        if not self.evidence:
            raise ModelError("evidence family must be non-empty")
        for s in self.states:
            self.question.label_of(s)  # labeling must be total
        self._spectra = {}

    # -- conditional machinery ------------------------------------------

    def evidence_mass(self, name: str) -> Fraction:
        return (sum((self.prior[s] for s in self.evidence[name]), ZERO)
                + self.evidence_tail[name])

    def world(self, state, evidence_name: str) -> World:
        if evidence_name not in self.evidence:
            raise ModelError(f"unknown evidence {evidence_name!r}")
        if state not in self.evidence[evidence_name]:
            raise ModelError(
                f"state {state!r} is not in evidence {evidence_name!r}")
        return World(state, evidence_name)

    def worlds(self):
        return tuple(World(s, name)
                     for name in sorted(self.evidence)
                     for s in sorted(self.evidence[name], key=state_key))

    def spectrum(self, evidence_name: str) -> AnswerSpectrum:
        if evidence_name not in self._spectra:
            members = self.evidence[evidence_name]
            mass = self.evidence_mass(evidence_name)
            if mass == 0:
                raise ConditioningError(
                    f"evidence {evidence_name!r} has zero prior mass")
            cells = {}
            for s in members:
                label = self.question.label_of(s)
                cells[label] = cells.get(label, ZERO) + self.prior[s]
            self._spectra[evidence_name] = AnswerSpectrum(
                [(label, m / mass, 1) for label, m in cells.items()],
                residual_mass=self.evidence_tail[evidence_name] / mass,
                residual_cell_bound=self.tail_cell_bound[evidence_name] / mass)
        return self._spectra[evidence_name]

    def likeliness(self, w: World) -> Fraction:
        w = self.world(*w)
        return self.spectrum(w.evidence).likeliness(
            self.question.label_of(w.state))

    def typicality(self, w: World) -> Fraction:
        w = self.world(*w)
        return self.spectrum(w.evidence).typicality(
            self.question.label_of(w.state))


def likeliness(ps: ProbabilityStructure, w: World) -> Fraction:
    """Evidential probability, at w, of the true answer to the question."""
    return ps.likeliness(w)


def typicality(ps: ProbabilityStructure, w: World) -> Fraction:
    """Evidential probability, at w, that things are no more normal than
    they are at w."""
    return ps.typicality(w)


def generate(ps: ProbabilityStructure,
             rule: SufficiencyRule = SufficiencyRule.SUFFICIENCY
             ) -> NormalityStructure:
    """The normality structure a probability structure induces.

    Worlds in the same evidence cell are ordered by likeliness; one is
    sufficiently more normal than another when the typicality ratio drops
    by at least t (and, under the stricter rule, the likeliness ratio too).
    The relations never cross evidence cells.  The axioms hold by
    construction: typicality is monotone in likeliness, and every
    "sufficiently more normal" step shrinks typicality by the factor
    (1 - t) < 1, so no cycles are possible.
    """
    lam, tau = {}, {}
    for name in ps.evidence:
        spec = ps.spectrum(name)
        for s in ps.evidence[name]:
            w = World(s, name)
            label = ps.question.label_of(s)
            lam[w] = spec.likeliness(label)
            tau[w] = spec.typicality(label)
    gap = 1 - ps.threshold
    plus = rule is SufficiencyRule.SUFFICIENCY_PLUS

    def ge(w, v):
        return w.evidence == v.evidence and lam[w] >= lam[v]

    def gg(w, v):
        if w.evidence != v.evidence or tau[w] == 0:
            return False
        if tau[v] > gap * tau[w]:
            return False
        if plus:
            return lam[w] > 0 and lam[v] <= gap * lam[w]
        return True

    return NormalityStructure(ps.states,
                              {n: ps.evidence[n] for n in ps.evidence},
                              ge, gg, validate=False)


def believed_answers(ps: ProbabilityStructure, evidence_name: str,
                     rule: SufficiencyRule = SufficiencyRule.SUFFICIENCY
                     ) -> tuple:
    """Answer labels the agent believes given a body of evidence: the
    labels of the doxastically accessible worlds."""
    spec = ps.spectrum(evidence_name)
    if rule is SufficiencyRule.SUFFICIENCY_PLUS:
        return spec.believed_plus(ps.threshold)
    return spec.believed(ps.threshold)


def believed_states(ps: ProbabilityStructure, evidence_name: str,
                    rule: SufficiencyRule = SufficiencyRule.SUFFICIENCY
                    ) -> tuple:
    """States in believed answer cells, restricted to the evidence."""
    labels = set(believed_answers(ps, evidence_name, rule))
    return tuple(sorted(
        (s for s in ps.evidence[evidence_name]
         if ps.question.label_of(s) in labels), key=state_key))


@dataclass(frozen=True)
class ThresholdReport:
    holds: bool
    witness: World | None
    mass: Fraction | None


def check_threshold(ps: ProbabilityStructure,
                    rule: SufficiencyRule = SufficiencyRule.SUFFICIENCY
                    ) -> ThresholdReport:
    """Does every world's belief state carry conditional mass >= t?"""
    for name in sorted(ps.evidence):
        labels = set(believed_answers(ps, name, rule))
        spec = ps.spectrum(name)
        mass = sum((e.mass * e.count for e in spec.entries
                    if e.label in labels), ZERO)
        if mass < ps.threshold:
            state = min(ps.evidence[name], key=state_key)
            return ThresholdReport(False, World(state, name), mass)
    return ThresholdReport(True, None, None)


def threshold_holds(ns: NormalityStructure, ps: ProbabilityStructure
                    ) -> ThresholdReport:
    """Evaluate the threshold guarantee for an arbitrary normality structure
    against a probability structure sharing its evidence names."""
    for name in sorted(ns.evidence):
        cell = ns.cell(name)
        believed = {v.state for v in ns.doxastic_accessible(cell[0])}
        mass = sum((ps.prior[s] for s in believed), ZERO)
        mass /= ps.evidence_mass(name)
        if mass < ps.threshold:
            return ThresholdReport(False, cell[0], mass)
    return ThresholdReport(True, None, None)


# -- spectrum-level accessibility -------------------------------------
#
# For structures generated by the sufficiency rule the normality preorder is
# total on each evidence cell, so membership in the derived accessibility
# relations reduces to threshold tests on likeliness and typicality.  This
# is what makes scenarios with 2**100 states tractable.

def doxastic_member(spec: AnswerSpectrum, threshold, label) -> bool:
    """A world is doxastically possible iff its typicality exceeds 1 - t
    (the most probable answer has typicality 1)."""
    return spec.typicality(label) > 1 - Fraction(threshold)


def epistemic_member(spec: AnswerSpectrum, threshold, label, at_label,
                     variant: KnowledgeVariant) -> bool:
    t = Fraction(threshold)
    if variant is KnowledgeVariant.WILLIAMSONIAN:
        # equivalent to: not (actual world >> candidate)
        at_tau = spec.typicality(at_label)
        return at_tau == 0 or spec.typicality(label) > (1 - t) * at_tau
    return (doxastic_member(spec, t, label)
            or spec.likeliness(label) >= spec.likeliness(at_label))
