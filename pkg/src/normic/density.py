"""Normality by probability density for continuous questions.

When every answer to the question has probability zero, worlds are ordered
by the probability *density* of their answer on the scale fixed by the
question's measuring function, and the belief set becomes a superlevel
region of the density: the shortest region whose mass clears the threshold.
Answers are identified with their measured coordinate throughout, so a
density here is always a function of that coordinate.

Densities are supplied per scenario as closed forms with analytic CDFs
where available; integration falls back to adaptive quadrature at 1e-10 and
the superlevel cutoff is found by bisection to 1e-9 in mass (belief-region
endpoints are then good to well below 1e-6 of a scale unit).
"""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from scipy import integrate, optimize
from scipy.special import erf

INTEGRAL_TOL = 1e-10
MASS_TOL = 1e-9

# mass of a Gaussian within two standard deviations of its mean
TWO_SIGMA_MASS = float(erf(2.0 / math.sqrt(2.0)))


class DensityError(ValueError):
    """A density model is malformed or a numeric step failed."""


@dataclass(frozen=True)
class Density:
    """A closed-form density over the measured coordinate.

    `support` may be infinite; `bracket` is a finite interval carrying all
    but a negligible sliver of the mass, used to anchor root finding and
    quadrature.  `mode` is a coordinate where the density is maximal (it
    may sit on the boundary, as with pure exponential decay).
    """

    pdf: Callable[[float], float]
    cdf: Callable[[float], float] | None
    support: tuple
    mode: float
    bracket: tuple | None = None
    name: str = ""

    def __post_init__(self):
        if self.bracket is None:
            lo, hi = self.support
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DensityError(f"density {self.name!r} with infinite "
                                   "support needs a finite bracket")
            object.__setattr__(self, "bracket", (lo, hi))

    def density_at(self, x: float) -> float:
        lo, hi = self.support
        if x < lo or x > hi:
            return 0.0
        return self.pdf(x)

    def mass(self, a: float, b: float) -> float:
        if b <= a:
            return 0.0
        if self.cdf is not None:
            return self.cdf(b) - self.cdf(a)
        lo, hi = self.bracket
        a, b = max(a, lo), min(b, hi)
        if b <= a:
            return 0.0
        value, _ = integrate.quad(self.pdf, a, b, epsabs=INTEGRAL_TOL,
                                  limit=200)
        return value

    def total_mass(self) -> float:
        lo, hi = self.bracket
        return self.mass(lo, hi)


def gaussian(mu: float, sigma: float) -> Density:
    if sigma <= 0:
        raise DensityError("sigma must be positive")
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def pdf(x):
        z = (x - mu) / sigma
        return norm * math.exp(-0.5 * z * z)

    def cdf(x):
        return 0.5 * (1.0 + erf((x - mu) / (sigma * math.sqrt(2.0))))

    return Density(pdf, cdf, (-math.inf, math.inf), mu,
                   bracket=(mu - 12 * sigma, mu + 12 * sigma),
                   name=f"gaussian({mu}, {sigma})")


def uniform(lo: float, hi: float) -> Density:
    if hi <= lo:
        raise DensityError("empty support")
    h = 1.0 / (hi - lo)
    return Density(lambda x: h,
                   lambda x: min(max((x - lo) * h, 0.0), 1.0),
                   (lo, hi), (lo + hi) / 2.0, name="uniform")


def uniform_angle() -> Density:
    """A clock hand about which nothing is known: constant 1/(2*pi)."""
    return uniform(0.0, 2.0 * math.pi)


def wrapped_normal(center: float, sigma: float) -> Density:
    """Gaussian noise wrapped around the circle, presented on the arc
    [center - pi, center + pi].  Wrapping terms are truncated once they sit
    beyond six standard deviations, which is below every tolerance used
    here for sigma <= 0.5."""
    if sigma <= 0:
        raise DensityError("sigma must be positive")
    two_pi = 2.0 * math.pi
    wraps = range(-max(1, math.ceil((6 * sigma + math.pi) / two_pi)),
                  max(1, math.ceil((6 * sigma + math.pi) / two_pi)) + 1)
    norm = 1.0 / (sigma * math.sqrt(2.0 * math.pi))
    rt2 = sigma * math.sqrt(2.0)

    def pdf(x):
        return sum(norm * math.exp(-0.5 * ((x - center + two_pi * k) / sigma) ** 2)
                   for k in wraps)

    lo = center - math.pi

    def cdf(x):
        return sum(0.5 * (erf((x - center + two_pi * k) / rt2)
                          - erf((lo - center + two_pi * k) / rt2))
                   for k in wraps)

    return Density(pdf, cdf, (lo, center + math.pi), center,
                   name=f"wrapped_normal({center}, {sigma})")


@dataclass(frozen=True)
class DensityStructure:
    """Bodies of evidence paired with the density each induces over the
    question's measured coordinate, plus the belief threshold."""

    evidence: Mapping[str, Density]
    threshold: float

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            # t = 0 would let every world count as sufficiently more normal
            # than worlds of equal density, breaking well-foundedness
            raise DensityError("threshold must lie in (0, 1]")
        for name, dens in self.evidence.items():
            total = dens.total_mass()
            if abs(total - 1.0) > 1e-9:
                raise DensityError(
                    f"density for evidence {name!r} integrates to {total}, "
                    "not 1 (within 1e-9)")

    def density(self, evidence_name: str) -> Density:
        try:
            return self.evidence[evidence_name]
        except KeyError:
            raise DensityError(f"unknown evidence {evidence_name!r}") from None


def world_density(ds: DensityStructure, evidence_name: str,
                  coordinate: float) -> float:
    """The density of the world whose answer measures `coordinate`; zero
    outside the support."""
    return ds.density(evidence_name).density_at(coordinate)


def _superlevel_interval(dens: Density, cutoff: float) -> tuple | None:
    """End points of {x : pdf(x) >= cutoff} for a unimodal density, or
    None when the cutoff clears the maximum."""
    lo, hi = dens.bracket
    mode = min(max(dens.mode, lo), hi)
    if dens.pdf(mode) < cutoff:
        return None

    def shifted(x):
        return dens.pdf(x) - cutoff

    if shifted(lo) >= 0.0:
        a = lo
    else:
        a = optimize.brentq(shifted, lo, mode, xtol=1e-14)
    if shifted(hi) >= 0.0:
        b = hi
    else:
        b = optimize.brentq(shifted, mode, hi, xtol=1e-14)
    return a, b


@dataclass(frozen=True)
class BeliefRegion:
    """A superlevel set of the evidential density: the believed answers."""

    intervals: tuple
    mass: float
    cutoff: float

    @property
    def interval(self) -> tuple:
        if len(self.intervals) != 1:
            raise DensityError("region is not a single interval")
        return self.intervals[0]

    def contains(self, x: float) -> bool:
        return any(a <= x <= b for a, b in self.intervals)


def belief_region(ds: DensityStructure, evidence_name: str,
                  threshold: float | None = None) -> BeliefRegion:
    """The largest-cutoff superlevel region with mass at least t.

    For a continuous unimodal density the region's mass is exactly t (up to
    the 1e-9 bisection tolerance); for densities with flat tops it may
    exceed it.
    """
    dens = ds.density(evidence_name)
    t = ds.threshold if threshold is None else float(threshold)
    if not 0.0 < t <= 1.0:
        raise DensityError("threshold must lie in (0, 1]")
    f_max = dens.pdf(dens.mode)
    if f_max <= 0.0 or not math.isfinite(f_max):
        raise DensityError("density has no positive finite maximum")

    def mass_at(c):
        iv = _superlevel_interval(dens, c)
        if iv is None:
            return 0.0, None
        return dens.mass(*iv), iv

    top_mass, top_iv = mass_at(f_max * (1.0 - 1e-12))
    if top_mass >= t:  # flat-topped density: the whole plateau suffices
        return BeliefRegion((top_iv,), top_mass, f_max * (1.0 - 1e-12))
    lo_c, hi_c = 0.0, f_max
    best_mass, best_iv, best_c = 1.0, dens.bracket, 0.0
    for _ in range(200):
        mid = 0.5 * (lo_c + hi_c)
        m, iv = mass_at(mid)
        if m >= t:
            best_mass, best_iv, best_c = m, iv, mid
            lo_c = mid
        else:
            hi_c = mid
        if m >= t and m - t <= MASS_TOL:
            break
    return BeliefRegion((best_iv,), best_mass, best_c)


def sublevel_mass(dens: Density, x: float) -> float:
    """Mass of {answers no denser than x}: the typicality of x's world.
    Answers of exactly equal density count as no denser, so the complement
    is the *strict* superlevel set (which matters for flat densities)."""
    c = dens.density_at(x)
    if c <= 0.0:
        return 0.0
    iv = _superlevel_interval(dens, c * (1.0 + 1e-12))
    if iv is None:
        return 1.0
    return max(0.0, 1.0 - dens.mass(*iv))


class DensityNormality:
    """The normality ordering a density structure induces, with worlds
    given as (evidence name, coordinate) pairs.  Worlds under different
    bodies of evidence are unrelated."""

    def __init__(self, ds: DensityStructure):
        self.structure = ds

    def at_least_as_normal(self, w, v) -> bool:
        (ev_w, x), (ev_v, y) = w, v
        if ev_w != ev_v:
            return False
        dens = self.structure.density(ev_w)
        return dens.density_at(x) >= dens.density_at(y)

    def sufficiently_more_normal(self, w, v) -> bool:
        (ev_w, x), (ev_v, y) = w, v
        if ev_w != ev_v:
            return False
        dens = self.structure.density(ev_w)
        tau_w = sublevel_mass(dens, x)
        if tau_w <= 0.0:
            return False
        tau_v = sublevel_mass(dens, y)
        return 1.0 - tau_v / tau_w >= self.structure.threshold

    def typicality(self, evidence_name: str, x: float) -> float:
        return sublevel_mass(self.structure.density(evidence_name), x)

    def doxastic_region(self, evidence_name: str,
                        threshold: float | None = None) -> BeliefRegion:
        return belief_region(self.structure, evidence_name, threshold)


def density_normality(ds: DensityStructure) -> DensityNormality:
    return DensityNormality(ds)


# ---------------------------------------------------------------------
# Hybrid answers: some with positive probability, the rest density-only.
# ---------------------------------------------------------------------

@dataclass(frozen=True)
class HybridModel:
    """Answers split into atoms (positive probability) and a density-only
    continuum of total weight `density_weight`.  Any atom outranks every
    density-only answer; atoms compare by probability, the rest by density.
    """

    atoms: Mapping[object, Fraction]
    density: Density | None
    density_weight: Fraction

    def __post_init__(self):
        for label, mass in self.atoms.items():
            if mass <= 0:
                raise DensityError(
                    f"answer {label!r} has neither positive probability nor "
                    "a density")
        total = sum(self.atoms.values(), Fraction(0)) + self.density_weight
        if total != 1:
            raise DensityError(f"atom and density weights sum to {total}")
        if self.density_weight > 0 and self.density is None:
            raise DensityError("positive density weight without a density")


@dataclass(frozen=True)
class HybridBelief:
    atoms: tuple
    region: BeliefRegion | None
    mass: float


def hybrid_typicality(model: HybridModel, answer) -> float:
    """Typicality over the mixed measure.  `answer` is an atom label or a
    float coordinate of a density-only answer."""
    if answer in model.atoms:
        own = model.atoms[answer]
        below = sum((m for m in model.atoms.values() if m <= own), Fraction(0))
        return float(below + model.density_weight)
    if model.density is None:
        raise DensityError(f"unknown answer {answer!r}")
    return float(model.density_weight) * sublevel_mass(model.density, answer)


def hybrid_normality(model: HybridModel, threshold) -> HybridBelief:
    """Belief set over the mixed measure: atoms whose typicality clears
    1 - t, together with the density superlevel region that does."""
    t = float(threshold)
    if not 0.0 < t <= 1.0:
        raise DensityError("threshold must lie in (0, 1]")
    believed_atoms = tuple(sorted(
        (label for label in model.atoms
         if hybrid_typicality(model, label) > 1.0 - t),
        key=str))
    atom_mass = float(sum((model.atoms[a] for a in believed_atoms),
                          Fraction(0)))
    region = None
    region_mass = 0.0
    w = float(model.density_weight)
    if w > 0.0:
        # density answer x is believed iff w * sublevel(x) > 1 - t
        needed = 1.0 - (1.0 - t) / w
        if needed > 0.0:
            ds = DensityStructure({"mix": model.density}, threshold=needed)
            region = belief_region(ds, "mix")
            region_mass = w * region.mass
    return HybridBelief(believed_atoms, region, atom_mass + region_mass)


# ---------------------------------------------------------------------
# CSV emission.
# ---------------------------------------------------------------------

def samples_csv(ds: DensityStructure, evidence_name: str, out,
                threshold: float | None = None, samples: int = 256
                ) -> BeliefRegion:
    """Write (m-coordinate, density, in_belief_region) rows across the
    density's bracket; returns the region used."""
    dens = ds.density(evidence_name)
    region = belief_region(ds, evidence_name, threshold)
    lo, hi = dens.bracket
    writer = csv.writer(out)
    writer.writerow(["m_coordinate", "density", "in_belief_region"])
    for i in range(samples):
        x = lo + (hi - lo) * i / (samples - 1)
        writer.writerow([f"{x:.12g}", f"{dens.density_at(x):.12g}",
                         int(region.contains(x))])
    return region
