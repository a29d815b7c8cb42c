"""Questions about the agent's own position, not just the world's history.

A de se question partitions centered worlds rather than states: two worlds
agreeing on the entire history can answer it differently because they give
the agent different evidence (e.g. "how many MORE flips will there be?").
Restricted to one body of evidence E, such a question induces a partition
of E, and likeliness becomes the conditional probability of the induced
cell; on questions lifted from state partitions this agrees with the plain
definition.

The radioactive decay case runs on a unit-rate exponential lifetime: the
de se question asks how long after the present the atom will decay, so by
memorylessness everything is a function of r = decay time minus current
time, and all computations happen in that coordinate.  Two measuring
functions are supported: "index" (the answer measured as r itself, density
e^-r, maximal as r -> 0) and "log" (measured as ln r, density r e^-r on
the r scale, maximal at r = 1 and vanishing at 0).
"""

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from scipy import optimize

from .core import World, state_key
from .density import Density, DensityError, MASS_TOL
from .genprob import (AnswerSpectrum, ModelError, ProbabilityStructure,
                      Question, ZERO)

MEASURINGS = ("index", "log")


class DeSeQuestion:
    """A partition of centered worlds, given by a total labeling."""

    def __init__(self, label, name: str = "custom"):
        self._label = label if callable(label) else dict(label).__getitem__
        self.name = name

    def label_of(self, world: World):
        try:
            return self._label(World(*world))
        except KeyError:
            raise ModelError(f"de se question {self.name!r} does not label "
                             f"world {world!r}") from None

    @classmethod
    def from_de_dicto(cls, question: Question) -> "DeSeQuestion":
        """Lift a state partition to worlds; likeliness is then unchanged."""
        return cls(lambda w: question.label_of(w.state),
                   name=f"lifted({question.name})")


def dese_spectrum(ps: ProbabilityStructure, evidence_name: str,
                  question: DeSeQuestion) -> AnswerSpectrum:
    """Conditional distribution of the cells the question induces on one
    body of evidence."""
    members = ps.evidence[evidence_name]
    mass = ps.evidence_mass(evidence_name)
    cells = {}
    for s in members:
        label = question.label_of(World(s, evidence_name))
        cells[label] = cells.get(label, ZERO) + ps.prior[s]
    return AnswerSpectrum(
        [(label, m / mass, 1) for label, m in cells.items()],
        residual_mass=ps.evidence_tail[evidence_name] / mass,
        residual_cell_bound=ps.tail_cell_bound[evidence_name] / mass)


def dese_likeliness(ps: ProbabilityStructure, w: World,
                    question: DeSeQuestion) -> Fraction:
    """Probability, given w's evidence, of w's cell of the induced
    partition."""
    w = ps.world(*w)
    return dese_spectrum(ps, w.evidence, question).likeliness(
        question.label_of(w))


# ---------------------------------------------------------------------
# Decay.
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class DecayModel:
    """Unit-mean exponential decay observed in real time.

    States are decay times (years from creation); the evidence at time t is
    the interval (t, oo); the question is how long after the present the
    decay lies.  `measuring` picks the scale on which answers are measured:
    "index" for plain years-from-now, "log" for their order of magnitude.
    """

    measuring: str = "log"

    def __post_init__(self):
        if self.measuring not in MEASURINGS:
            raise ModelError(f"measuring must be one of {MEASURINGS}")

    def density(self) -> Density:
        """The evidential density over the measured coordinate; the same
        at every observation time."""
        if self.measuring == "index":
            return Density(lambda x: math.exp(-x) if x >= 0.0 else 0.0,
                           lambda x: 1.0 - math.exp(-min(max(x, 0.0), 700.0)),
                           (0.0, math.inf), 0.0, bracket=(0.0, 60.0),
                           name="decay-index")

        def pdf(x):
            return math.exp(x - math.exp(x)) if x < 700.0 else 0.0

        def cdf(x):
            return 1.0 - math.exp(-math.exp(x)) if x < 700.0 else 1.0

        return Density(pdf, cdf, (-math.inf, math.inf), 0.0,
                       bracket=(-45.0, 8.0), name="decay-log")

    def world_density(self, decay_time: float, observed_since: float) -> float:
        """Density of the world where the atom decays at `decay_time` and
        the agent has watched it survive to `observed_since`."""
        r = decay_time - observed_since
        if r <= 0.0:
            raise ModelError("world is malformed: the decay time must lie "
                             "after the observation time")
        if self.measuring == "index":
            return math.exp(-r)
        return r * math.exp(-r)


def decay_density(model: DecayModel, decay_time: float,
                  observed_since: float = 0.0) -> float:
    return model.world_density(decay_time, observed_since)


@dataclass(frozen=True)
class DecayInterval:
    """Doxastically possible times-to-decay, in years from the present."""

    lo: float
    hi: float
    closed_lo: bool
    closed_hi: bool
    mass: float

    def contains(self, r: float) -> bool:
        if r < self.lo or (r == self.lo and not self.closed_lo):
            return False
        if r > self.hi or (r == self.hi and not self.closed_hi):
            return False
        return True


def _exp_mass(a: float, b: float) -> float:
    return math.exp(-a) - math.exp(-b)


def decay_belief_interval(model: DecayModel, threshold,
                          observed_since: float = 0.0) -> DecayInterval:
    """Believed times-to-decay at any moment before the decay.

    Memorylessness makes the interval the same for every observation time
    (the argument is accepted only to make that explicit in client code).
    Under "index" the density is highest as r -> 0, so arbitrarily early
    decay stays believable and the interval is (0, -ln(1-t)].  Under "log"
    the density peaks at r = 1 and the interval is [a, b] with equal
    densities a e^-a = b e^-b and mass t, found by bisecting the cutoff.
    """
    t = float(threshold)
    if not 0.0 < t < 1.0:
        raise ModelError("decay intervals need a threshold in (0, 1)")
    if observed_since < 0.0:
        raise ModelError("observation time cannot be negative")
    if model.measuring == "index":
        return DecayInterval(0.0, -math.log(1.0 - t), False, True, t)

    def roots(cutoff):
        a = optimize.brentq(lambda r: r * math.exp(-r) - cutoff,
                            1e-300, 1.0, xtol=1e-15)
        b = optimize.brentq(lambda r: r * math.exp(-r) - cutoff,
                            1.0, 800.0, xtol=1e-13)
        return a, b

    lo_c, hi_c = 0.0, math.exp(-1.0)
    best = None
    for _ in range(200):
        mid = 0.5 * (lo_c + hi_c)
        if mid <= 0.0:
            break
        a, b = roots(mid)
        m = _exp_mass(a, b)
        if m >= t:
            best = (a, b, m)
            lo_c = mid
            if m - t <= MASS_TOL:
                break
        else:
            hi_c = mid
    if best is None:
        raise DensityError("cutoff bisection failed to reach the threshold")
    a, b, m = best
    return DecayInterval(a, b, True, True, m)


# ---------------------------------------------------------------------
# The de dicto contrast: measuring time from creation instead.
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class DeDictoContrast:
    """What changes when the question asks for the decay's absolute date
    (log-measured) instead of its distance from the present.

    At creation the two questions coincide.  Once a year has passed, the
    absolute-date density e^(tau - T) * T is decreasing on the whole
    remaining support, so dates just after the present carry the highest
    density and immediate decay becomes doxastically possible again.
    """

    creation_interval: DecayInterval
    after_year_inf_r: float
    after_year_immediate_possible: bool
    first_year_probability: Mapping[float, float]


def _dedicto_density(observed_since: float) -> Density:
    """Density over x = ln(decay date) given survival to `observed_since`."""
    tau = float(observed_since)
    lo = math.log(tau) if tau > 0.0 else -math.inf

    def pdf(x):
        if x <= lo or x > 700.0:
            return 0.0
        return math.exp(x) * math.exp(tau - math.exp(x))

    def cdf(x):
        if x <= lo:
            return 0.0
        return 1.0 - math.exp(tau - math.exp(min(x, 700.0)))

    mode = 0.0 if tau < 1.0 else math.nextafter(lo, math.inf)
    bracket_lo = lo if tau > 0.0 else -45.0
    return Density(pdf, cdf, (lo, math.inf), mode,
                   bracket=(bracket_lo, max(8.0, lo + 8.0)),
                   name=f"decay-dedicto({tau})")


def first_year_probability(observed_since: float) -> float:
    """Chance the atom decays within its first year, given survival so
    far; strictly decreasing in the observation time."""
    tau = float(observed_since)
    if not 0.0 <= tau < 1.0:
        raise ModelError("the first year has already passed")
    return 1.0 - math.exp(tau - 1.0)


def dedicto_contrast(threshold) -> DeDictoContrast:
    t = float(threshold)
    model = DecayModel(measuring="log")
    creation = decay_belief_interval(model, t)

    # after one year: the density over dates is strictly decreasing, so the
    # believed dates form an interval starting at the present
    dens = _dedicto_density(1.0)
    left_density = dens.pdf(math.nextafter(math.log(1.0), math.inf))
    right_density = dens.pdf(1.0)
    decreasing = left_density > dens.pdf(0.5) > right_density
    return DeDictoContrast(
        creation_interval=creation,
        after_year_inf_r=0.0,
        after_year_immediate_possible=decreasing,
        first_year_probability={
            0.0: first_year_probability(0.0),
            0.75: first_year_probability(0.75),
        })


# ---------------------------------------------------------------------
# Curve emission for external plotting.
# ---------------------------------------------------------------------

def decay_curves_csv(out, samples: int = 200) -> None:
    """Long-format CSV of the four decay curves: the two evidential
    densities over their measured coordinate and the two world densities
    over time-to-decay."""
    writer = csv.writer(out)
    writer.writerow(["curve", "coordinate", "value"])

    def emit(name, lo, hi, fn):
        for i in range(samples):
            x = lo + (hi - lo) * i / (samples - 1)
            writer.writerow([name, f"{x:.10g}", f"{fn(x):.10g}"])

    emit("f_index", 0.0, 6.0, lambda x: math.exp(-x))
    emit("f_log", -5.0, 2.5, lambda x: math.exp(x - math.exp(x)))
    emit("d_index", 1e-6, 6.0, lambda r: math.exp(-r))
    emit("d_log", 1e-6, 6.0, lambda r: r * math.exp(-r))
