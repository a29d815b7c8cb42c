"""Named case studies and the exact statistic engines behind them.

Discrete scenarios (repeated coin flipping, the fair/double-headed bag, the
ten-coin race, the scaled lottery) are built in exact rational arithmetic.
Infinite state spaces are truncated at a configurable depth with the tail
mass tracked analytically, so conditional probabilities are exactly those
of the infinite model and any query the tail could disturb is refused
rather than approximated.  Continuous scenarios (clock, weighing, decay)
are assembled from the density machinery.
"""

import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from . import density as density_mod
from . import dese as dese_mod
from .core import KnowledgeVariant, World
from .genprob import (AnswerSpectrum, ModelError, ProbabilityStructure,
                      Question, UndecidedAtDepth, ZERO, as_fraction,
                      doxastic_member, epistemic_member)

HALF = Fraction(1, 2)


def default_depth() -> int:
    return int(os.environ.get("NORMIC_DEPTH", "64"))


# ---------------------------------------------------------------------
# Flipping for Heads: one fair coin flipped until it lands heads.
# ---------------------------------------------------------------------

def build_flipping(depth: int | None = None, threshold=Fraction(99, 100),
                   extra_evidence=None) -> ProbabilityStructure:
    """States 1..depth (the flip on which heads arrives, chance 2**-n),
    evidence 'after{x}' = heads hasn't come in the first x flips, finest
    question.  The geometric tail past the truncation is carried exactly.

    `extra_evidence` maps names to additional finite evidence sets, e.g.
    partial information about a finished experiment.
    """
    depth = default_depth() if depth is None else int(depth)
    if depth < 8:
        raise ModelError("flipping needs depth >= 8")
    states = range(1, depth + 1)
    prior = {n: HALF ** n for n in states}
    tail = HALF ** depth
    evidence = {f"after{x}": frozenset(range(x + 1, depth + 1))
                for x in range(depth)}
    evidence_tail = {name: tail for name in evidence}
    bound = {name: HALF ** (depth + 1) for name in evidence}
    for name, members in (extra_evidence or {}).items():
        members = frozenset(members)
        evidence[name] = members
        evidence_tail[name] = ZERO
        bound[name] = ZERO
    return ProbabilityStructure(states, evidence, prior,
                                question=Question.finest(),
                                threshold=threshold,
                                prior_tail=tail,
                                evidence_tail=evidence_tail,
                                tail_cell_bound=bound)


def flipping_world(ps: ProbabilityStructure, state: int,
                   tails_seen: int = 0) -> World:
    return ps.world(state, f"after{tails_seen}")


# ---------------------------------------------------------------------
# Heading for Heads: one fair and one double-headed coin, 100 flips.
# ---------------------------------------------------------------------

class HeadingScenario:
    """Exact model of drawing one of {fair, double-headed} and flipping it
    100 times.

    States: 'd' (double-headed, mass 1/2) and the 2**100 specific fair
    outcome sequences (mass 2**-101 each); 'c' is the fair all-heads
    sequence.  Evidence: 'start' (no flips seen) and 'allheads' (100 heads
    seen, leaving {c, d}).  The fair outcomes are never enumerated --
    answers are grouped by probability level, and under the coarser
    fairness-and-heads-count question by the number of heads.
    """

    def __init__(self, flips: int = 100,
                 threshold=Fraction(9999999, 10 ** 7)):
        self.flips = flips
        self.threshold = as_fraction(threshold)
        self.fair_each = HALF ** (flips + 1)
        self.fair_count = 2 ** flips

    def spectrum(self, evidence: str,
                 question: str = "outcome") -> AnswerSpectrum:
        if evidence == "start":
            if question == "outcome":
                return AnswerSpectrum([
                    ("d", HALF, 1),
                    ("fair", self.fair_each, self.fair_count),
                ])
            if question == "fair-and-heads-count":
                entries = [("d", HALF, 1)]
                entries += [(("fair", k), comb(self.flips, k) * self.fair_each, 1)
                            for k in range(self.flips + 1)]
                return AnswerSpectrum(entries)
            raise ModelError(f"unknown question {question!r}")
        if evidence == "allheads":
            if question != "outcome":
                raise ModelError("only the outcome question applies after "
                                 "the flips are seen")
            denom = self.fair_count + 1
            return AnswerSpectrum([
                ("d", Fraction(self.fair_count, denom), 1),
                ("c", Fraction(1, denom), 1),
            ])
        raise ModelError(f"unknown evidence {evidence!r}")

    def label_of_c(self, evidence: str, question: str = "outcome"):
        if evidence == "allheads":
            return "c"
        return ("fair", self.flips) if question == "fair-and-heads-count" else "fair"

    def believed(self, evidence: str) -> tuple:
        return self.spectrum(evidence).believed(self.threshold)


def build_heading(flips: int = 100,
                  threshold=Fraction(9999999, 10 ** 7)) -> HeadingScenario:
    return HeadingScenario(flips, threshold)


@dataclass(frozen=True)
class HeadingReport:
    """The knowledge facts of the two-coin case, all exact.

    `ratio_after`/`ratio_before` are the typicality drops 1 - tau(fair
    all-heads world)/tau(double-headed world) with evidence 'allheads' and
    'start'.  The membership fields say whether the fair-by-coincidence
    world stays epistemically accessible from the double-headed world.
    """

    ratio_after: Fraction
    ratio_before: Fraction
    coincidence_accessible_after: dict
    coincidence_accessible_before: dict
    believed_after: tuple
    typicality_c_before: Fraction
    typicality_c_before_fine_grained: Fraction
    coincidence_excluded_under_count_question: bool
    all_tails_equally_normal: bool


def heading_checks(scenario: HeadingScenario | None = None) -> HeadingReport:
    sc = scenario or build_heading()
    t = sc.threshold
    after = sc.spectrum("allheads")
    before = sc.spectrum("start")
    ratio_after = 1 - after.typicality("c") / after.typicality("d")
    ratio_before = 1 - before.typicality("fair") / before.typicality("d")
    acc_after = {
        variant: epistemic_member(after, t, "c", "d", variant)
        for variant in KnowledgeVariant
    }
    acc_before = {
        variant: epistemic_member(before, t, "fair", "d", variant)
        for variant in KnowledgeVariant
    }
    fine = sc.spectrum("start", "fair-and-heads-count")
    tau_c_fine = fine.typicality(("fair", sc.flips))
    excluded = fine.typicality(("fair", sc.flips)) <= (1 - t) * fine.typicality("d")
    return HeadingReport(
        ratio_after=ratio_after,
        ratio_before=ratio_before,
        coincidence_accessible_after=acc_after,
        coincidence_accessible_before=acc_before,
        believed_after=sc.believed("allheads"),
        typicality_c_before=before.typicality("fair"),
        typicality_c_before_fine_grained=tau_c_fine,
        coincidence_excluded_under_count_question=excluded,
        all_tails_equally_normal=(fine.likeliness(("fair", 0))
                                  == fine.likeliness(("fair", sc.flips))),
    )


# ---------------------------------------------------------------------
# The scaled lottery: many equal entrants plus one slightly smaller.
# ---------------------------------------------------------------------

def build_lottery(entrants: int = 1000, tickets_each: int = 1000,
                  small_holder_tickets: int = 999,
                  threshold=Fraction(99, 100)) -> ProbabilityStructure:
    """'Who will win?' with `entrants` holders of `tickets_each` tickets and
    one extra entrant ('small') holding slightly fewer.  Evidence is just
    the setup."""
    total = entrants * tickets_each + small_holder_tickets
    states = ["small"] + [f"e{i}" for i in range(1, entrants + 1)]
    prior = {f"e{i}": Fraction(tickets_each, total)
             for i in range(1, entrants + 1)}
    prior["small"] = Fraction(small_holder_tickets, total)
    return ProbabilityStructure(states, {"setup": states}, prior,
                                question=Question.finest(),
                                threshold=threshold)


# ---------------------------------------------------------------------
# Racing for Heads: n independent coins, each flipped until heads.
# ---------------------------------------------------------------------

class RacingQuestion(Enum):
    EXACT_OUTCOME = "exact-outcome"
    OUTCOME_SHAPE = "outcome-shape"
    TOTAL_TAILS = "total-tails"
    DURATION = "duration"
    MAX_TOGETHER = "max-together"


def _tails_pmf(f: int, coins: int) -> Fraction:
    # total tails across the race is negative binomial
    return comb(f + coins - 1, coins - 1) * HALF ** (f + coins)


def _tails_cdf(f: int, coins: int) -> Fraction:
    return sum((_tails_pmf(i, coins) for i in range(f + 1)), ZERO)


def _duration_cdf(d: int, coins: int) -> Fraction:
    return (1 - HALF ** d) ** coins


def _duration_pmf(d: int, coins: int) -> Fraction:
    return _duration_cdf(d, coins) - _duration_cdf(d - 1, coins)


def _shapes(total: int, parts: int, maxpart: int | None = None):
    """Multisets of `parts` positive integers with the given sum, emitted as
    non-increasing tuples."""
    if maxpart is None:
        maxpart = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    if total < parts:
        return
    for first in range(min(maxpart, total - parts + 1), 0, -1):
        for rest in _shapes(total - first, parts - 1, first):
            yield (first,) + rest


def shape_weight(shape: tuple) -> int:
    """Number of distinct coin assignments realising a shape."""
    coeff = factorial(len(shape))
    mult = {}
    for part in shape:
        mult[part] = mult.get(part, 0) + 1
    for m in mult.values():
        coeff //= factorial(m)
    return coeff


def _together_distribution(coins: int, depth: int):
    """Exact law of the largest number of coins finishing on one trial, by
    dynamic programming over (coins still flipping, best group so far).
    Returns (pmf dict, unattributed mass of races still running at depth)."""
    running = {(coins, 0): Fraction(1)}
    done = {}
    for _ in range(depth):
        nxt = {}
        for (alive, best), p in running.items():
            scale = HALF ** alive
            for k in range(alive + 1):
                q = p * comb(alive, k) * scale
                key = (alive - k, max(best, k))
                if key[0] == 0:
                    done[key[1]] = done.get(key[1], ZERO) + q
                else:
                    nxt[key] = nxt.get(key, ZERO) + q
        running = nxt
    slack = sum(running.values(), ZERO)
    return done, slack


@lru_cache(maxsize=64)
def racing_spectrum(question: RacingQuestion, coins: int = 10,
                    depth: int | None = None) -> AnswerSpectrum:
    """Exact answer distribution at the start of the race.

    EXACT_OUTCOME groups the equally probable outcomes by their total flip
    count: the label k stands for the comb(k-1, coins-1) individual
    outcomes of probability 2**-k each.  All other questions have one entry
    per answer.  Tail masses use the closed forms (negative binomial /
    max-of-geometrics), so truncation never distorts the distribution, only
    limits how far down the enumeration reaches.
    """
    question = RacingQuestion(question)
    depth = (128 if depth is None else int(depth))
    if question is RacingQuestion.EXACT_OUTCOME:
        top = coins + depth
        entries = [(k, HALF ** k, comb(k - 1, coins - 1))
                   for k in range(coins, top + 1)]
        residual = 1 - _tails_cdf(top - coins, coins)
        return AnswerSpectrum(entries, residual_mass=residual,
                              residual_cell_bound=HALF ** (top + 1))
    if question is RacingQuestion.OUTCOME_SHAPE:
        top = coins + min(depth, 38)  # shape enumeration grows fast
        entries = [(shape, shape_weight(shape) * HALF ** s, 1)
                   for s in range(coins, top + 1)
                   for shape in _shapes(s, coins)]
        residual = 1 - _tails_cdf(top - coins, coins)
        return AnswerSpectrum(entries, residual_mass=residual,
                              residual_cell_bound=factorial(coins)
                              * HALF ** (top + 1))
    if question is RacingQuestion.TOTAL_TAILS:
        entries = [(f, _tails_pmf(f, coins), 1) for f in range(depth + 1)]
        residual = 1 - _tails_cdf(depth, coins)
        # pmf is decreasing past the mode, so later cells are smaller
        return AnswerSpectrum(entries, residual_mass=residual,
                              residual_cell_bound=_tails_pmf(depth + 1, coins))
    if question is RacingQuestion.DURATION:
        entries = [(d, _duration_pmf(d, coins), 1)
                   for d in range(1, depth + 1)]
        residual = 1 - _duration_cdf(depth, coins)
        return AnswerSpectrum(entries, residual_mass=residual,
                              residual_cell_bound=_duration_pmf(depth + 1, coins))
    if question is RacingQuestion.MAX_TOGETHER:
        pmf, slack = _together_distribution(coins, depth)
        entries = [(g, p, 1) for g, p in sorted(pmf.items())]
        return AnswerSpectrum(entries, slack=slack)
    raise ModelError(f"unknown racing question {question!r}")


@dataclass(frozen=True)
class CellStats:
    """Extremal statistics over the states of one answer cell."""
    min_tails: int
    max_tails: int | None       # None == unbounded
    min_trials: int
    max_trials: int | None
    has_same_end: bool          # contains a state where all coins end together
    has_split_end: bool         # contains a state where they don't


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _together_min_tails(g: int, coins: int) -> int:
    # fill trial 1 with the group of g, then later trials with blocks <= g
    remaining, trial, tails = coins - g, 2, 0
    while remaining > 0:
        take = min(g, remaining)
        tails += take * (trial - 1)
        remaining -= take
        trial += 1
    return tails


def racing_cell_stats(question: RacingQuestion, label,
                      coins: int = 10) -> CellStats:
    question = RacingQuestion(question)
    if question is RacingQuestion.EXACT_OUTCOME:
        k = label  # total flips; the cell family at level k
        return CellStats(k - coins, k - coins,
                         _ceil_div(k, coins), k - coins + 1,
                         has_same_end=(k % coins == 0),
                         has_split_end=(k > coins))
    if question is RacingQuestion.OUTCOME_SHAPE:
        tails = sum(label) - coins
        return CellStats(tails, tails, label[0], label[0],
                         has_same_end=(len(set(label)) == 1),
                         has_split_end=(len(set(label)) > 1))
    if question is RacingQuestion.TOTAL_TAILS:
        f = label
        return CellStats(f, f,
                         1 if f == 0 else _ceil_div(f + coins, coins),
                         f + 1,
                         has_same_end=(f % coins == 0),
                         has_split_end=(f > 0))
    if question is RacingQuestion.DURATION:
        d = label
        return CellStats(d - 1, coins * (d - 1), d, d,
                         has_same_end=True,
                         has_split_end=(d > 1 and coins > 1))
    if question is RacingQuestion.MAX_TOGETHER:
        g = label
        return CellStats(
            _together_min_tails(g, coins), None,
            1 if g == coins else 1 + _ceil_div(coins - g, g), None,
            has_same_end=(g == coins),
            has_split_end=(g < coins))
    raise ModelError(f"unknown racing question {question!r}")


@dataclass(frozen=True)
class BeliefSummary:
    min_tails: int
    max_tails: int | None
    min_trials: int
    max_trials: int | None
    same_end: str               # "yes" | "no" | "maybe"


def racing_believed(question: RacingQuestion, threshold, coins: int = 10,
                    depth: int | None = None) -> tuple:
    spec = racing_spectrum(question, coins, depth)
    return spec.believed(as_fraction(threshold))


def racing_summary(question: RacingQuestion, threshold, coins: int = 10,
                   depth: int | None = None) -> BeliefSummary:
    """Extremal facts over the doxastically possible race states."""
    labels = racing_believed(question, threshold, coins, depth)
    stats = [racing_cell_stats(question, label, coins) for label in labels]
    max_tails = (None if any(s.max_tails is None for s in stats)
                 else max(s.max_tails for s in stats))
    max_trials = (None if any(s.max_trials is None for s in stats)
                  else max(s.max_trials for s in stats))
    has_same = any(s.has_same_end for s in stats)
    has_split = any(s.has_split_end for s in stats)
    same = "maybe" if (has_same and has_split) else ("yes" if has_same else "no")
    return BeliefSummary(min(s.min_tails for s in stats), max_tails,
                         min(s.min_trials for s in stats), max_trials, same)


def racing_modal(question: RacingQuestion, coins: int = 10,
                 depth: int | None = None) -> tuple:
    """The most probable answer(s), ties included."""
    spec = racing_spectrum(question, coins, depth)
    best = spec.entries[0].mass
    return tuple(e.label for e in spec.entries if e.mass == best)


def describe_shape(shape: tuple) -> str:
    mult = {}
    for part in shape:
        mult[part] = mult.get(part, 0) + 1
    return " ".join(f"{n}x{part} flip{'s' if part > 1 else ''}"
                    for part, n in sorted(mult.items(), key=lambda kv: -kv[1]))


@dataclass(frozen=True)
class RacingTableRow:
    question: RacingQuestion
    modal: tuple
    threshold: Fraction
    summary: BeliefSummary


def racing_table(thresholds=(Fraction(3, 4), Fraction(19, 20)),
                 coins: int = 10, depth: int | None = None) -> list:
    rows = []
    for question in RacingQuestion:
        modal = racing_modal(question, coins, depth)
        for t in thresholds:
            rows.append(RacingTableRow(
                question, modal, as_fraction(t),
                racing_summary(question, t, coins, depth)))
    return rows


# ---------------------------------------------------------------------
# Continuous scenarios.
# ---------------------------------------------------------------------

def build_weighing(mu: float = 0.0, sigma: float = 1.0,
                   threshold: float | None = None) -> density_mod.DensityStructure:
    """Noisy scale reading mu with Gaussian error: the measured quantity's
    density given the reading.  Default threshold is the two-sigma mass."""
    t = density_mod.TWO_SIGMA_MASS if threshold is None else float(threshold)
    return density_mod.DensityStructure(
        {"reading": density_mod.gaussian(mu, sigma)}, threshold=t)


def build_clock(sigma: float = 0.1, apparent: float = math.pi,
                threshold: float = 0.95) -> density_mod.DensityStructure:
    """Unmarked clock: uniform hand orientation before looking; a wrapped
    normal around the apparent orientation after."""
    return density_mod.DensityStructure(
        {
            "prior": density_mod.uniform_angle(),
            "seen": density_mod.wrapped_normal(apparent, sigma),
        },
        threshold=threshold)


def build_decay(measuring: str = "log") -> "dese_mod.DecayModel":
    return dese_mod.DecayModel(measuring=measuring)
