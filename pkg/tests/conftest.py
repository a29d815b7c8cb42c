"""Shared test helpers: definitional oracles that unfold the theory's
definitions directly, independently of the library's computation paths."""

from fractions import Fraction

import pytest

from normic.core import World

ZERO = Fraction(0)


def brute_relations(states, evidence, prior, label_of, threshold,
                    plus=False):
    """Likeliness/typicality and both normality relations, computed by
    unfolding the definitions over explicit worlds.  Returns (worlds, lam,
    tau, ge pairs, gg pairs)."""
    worlds = [World(s, name) for name, members in evidence.items()
              for s in members]
    lam = {}
    for w in worlds:
        members = evidence[w.evidence]
        e_mass = sum((prior[s] for s in members), ZERO)
        cell_mass = sum((prior[s] for s in members
                         if label_of(s) == label_of(w.state)), ZERO)
        lam[w] = cell_mass / e_mass
    tau = {}
    for w in worlds:
        members = evidence[w.evidence]
        e_mass = sum((prior[s] for s in members), ZERO)
        below = sum((prior[s] for s in members
                     if lam[World(s, w.evidence)] <= lam[w]), ZERO)
        tau[w] = below / e_mass
    ge = set()
    gg = set()
    for w in worlds:
        for v in worlds:
            if w.evidence != v.evidence:
                continue
            if lam[w] >= lam[v]:
                ge.add((w, v))
            if tau[w] > 0 and 1 - tau[v] / tau[w] >= threshold:
                if not plus or (lam[w] > 0
                                and 1 - lam[v] / lam[w] >= threshold):
                    gg.add((w, v))
    return worlds, lam, tau, ge, gg


def brute_doxastic(states, evidence, prior, label_of, threshold,
                   plus=False):
    """Doxastically accessible worlds per evidence cell, straight from the
    definitions."""
    worlds, _, _, _, gg = brute_relations(states, evidence, prior,
                                          label_of, threshold, plus)
    out = {}
    for name in evidence:
        cell = [w for w in worlds if w.evidence == name]
        out[name] = {v for v in cell
                     if not any((u, v) in gg for u in cell)}
    return out


def greedy_belief(cells, threshold):
    """Independent strongest-union rule over a {label: mass} map: add whole
    tie groups by decreasing probability until the mass reaches t."""
    order = sorted(cells.items(), key=lambda kv: kv[1], reverse=True)
    out, cum, i = [], ZERO, 0
    while i < len(order) and cum < threshold:
        j = i
        while j < len(order) and order[j][1] == order[i][1]:
            out.append(order[j][0])
            cum += order[j][1]
            j += 1
        i = j
    assert cum >= threshold
    return set(out)


@pytest.fixture
def fn6_text():
    return (
        "# seven states, two bodies of evidence\n"
        "states: 1 2 3 4 5 6 7\n"
        "evidence low = {1, 2, 3}\n"
        "evidence high = {4, 5, 6, 7}\n"
        "prior: 1=0.2 2=0.2 3=0.1 4=0.2 5=0.1 6=0.1 7=0.1\n"
        "question: finest\n"
        "threshold: 0.5\n"
        "rule: sufficiency\n"
        "variant: stalnaker\n"
    )
