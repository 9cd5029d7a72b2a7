"""Seeded random scenario generation for the property suites.

Sizes stay within what the exhaustive checks can enumerate: chain lattices
of two or three levels or the four-level diamond, at most three agents,
at most three types per agent per level, at most four outcomes.

Type spaces are built as successive coarsenings of the top-level space, so
the projection laws (identity, composition, surjectivity) hold by
construction.  Procurement scenarios give sellers costs that weakly grow
along elaboration: a richer description can only reveal additional cost
items, never erase known ones.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .lattice import Lattice, build_lattice
from .scenario import Scenario
from .outcomes import OutcomeModel
from .transfers import CLARKE, RSPA, SchemeConfig
from .typespace import NatureDraw, build_structure

CHAIN2 = ("l0", "l1")
CHAIN3 = ("l0", "l1", "l2")
DIAMOND = ("bot", "west", "east", "top")


def _lattice(rng: random.Random) -> Lattice:
    shape = rng.choice(("chain2", "chain3", "diamond"))
    if shape == "chain2":
        return build_lattice(CHAIN2, [("l0", "l1")])
    if shape == "chain3":
        return build_lattice(CHAIN3, [("l0", "l1"), ("l1", "l2")])
    return build_lattice(DIAMOND, [("bot", "west"), ("bot", "east"),
                                   ("west", "top"), ("east", "top")])


def _coarsen(rng: random.Random, blocks: list[frozenset[int]],
             size: int) -> list[frozenset[int]]:
    """Merge blocks down to ``size`` groups (a random coarsening)."""
    groups = [{b} for b in blocks]
    while len(groups) > size:
        a, b = rng.sample(range(len(groups)), 2)
        if a > b:
            a, b = b, a
        groups[a] = groups[a] | groups[b]
        del groups[b]
    return [frozenset().union(*g) for g in groups]


def _common_coarsening(left: list[frozenset[int]],
                       right: list[frozenset[int]]) -> list[frozenset[int]]:
    """Finest partition coarser than both inputs."""
    merged = [set(b) for b in left]
    for block in right:
        hits = [g for g in merged if g & block]
        rest = [g for g in merged if not (g & block)]
        merged = rest + [set().union(block, *hits)]
    return [frozenset(g) for g in merged]


def _partitions(rng: random.Random, lattice: Lattice,
                top_size: int) -> dict[str, list[frozenset[int]]]:
    """A refinement-monotone partition of range(top_size) per level."""
    atoms = [frozenset([k]) for k in range(top_size)]
    parts: dict[str, list[frozenset[int]]] = {lattice.top: atoms}
    if lattice.elements == DIAMOND:
        parts["west"] = _coarsen(rng, atoms, rng.randint(1, top_size))
        parts["east"] = _coarsen(rng, atoms, rng.randint(1, top_size))
        common = _common_coarsening(parts["west"], parts["east"])
        parts["bot"] = _coarsen(rng, common, rng.randint(1, len(common)))
        return parts
    chain = sorted(lattice.elements, key=lambda x: -len(lattice.down_set(x)))
    for level in chain[1:]:
        above = parts[chain[chain.index(level) - 1]]
        parts[level] = _coarsen(rng, above, rng.randint(1, len(above)))
    return parts


def _block_of(blocks: list[frozenset[int]], member: int) -> int:
    return next(k for k, block in enumerate(blocks) if member in block)


def generate_scenario(seed: int, index: int = 0, procurement: bool = False) -> Scenario:
    rng = random.Random(f"{seed}:{index}:{procurement}")
    lattice = _lattice(rng)
    if procurement:
        agents = ("s1", "s2", "b")
        buyer = "b"
    else:
        agents = tuple(f"a{k + 1}" for k in range(rng.randint(2, 3)))
        buyer = None

    spaces: dict[tuple[str, str], tuple[str, ...]] = {}
    edge_maps: dict[tuple[str, str, str], dict[str, str]] = {}
    names: dict[tuple[str, str, int], str] = {}
    partitions: dict[str, dict[str, list[frozenset[int]]]] = {}
    for agent in agents:
        top_size = 1 if agent == buyer and rng.random() < 0.5 else rng.randint(1, 3)
        parts = _partitions(rng, lattice, top_size)
        partitions[agent] = parts
        for level, blocks in parts.items():
            ids = tuple(f"{agent}_{level}_{k}" for k in range(len(blocks)))
            spaces[(agent, level)] = ids
            for k, t in enumerate(ids):
                names[(agent, level, k)] = t
        for lo, hi in lattice.covers():
            table = {}
            for k, block in enumerate(parts[hi]):
                member = next(iter(block))
                table[names[(agent, hi, k)]] = names[(agent, lo, _block_of(parts[lo], member))]
            edge_maps[(agent, hi, lo)] = table
    structure = build_structure(lattice, agents, spaces, edge_maps)

    if procurement:
        supplies = {a: f"supply_{a}" for a in agents if a != buyer}
        outcomes = tuple(supplies.values()) + ("idle",)
        available = {level: outcomes for level in lattice.elements}
        valuations: dict[tuple[str, str, str], Fraction] = {}
        levels_up = sorted(lattice.elements, key=lambda x: len(lattice.down_set(x)))
        cost: dict[tuple[str, str], Fraction] = {}
        for agent in agents:
            for level in levels_up:
                for t in structure.space(agent, level):
                    if level == lattice.bottom:
                        cost[(agent, t)] = Fraction(rng.randint(1, 9))
                    else:
                        below = max(cost[(agent, structure.project(agent, t, lower))]
                                    for lower in lattice.strictly_below(level))
                        cost[(agent, t)] = below + rng.randint(0, 4)
        for agent in agents:
            for level in lattice.elements:
                for t in structure.space(agent, level):
                    for x0 in outcomes:
                        if agent != buyer and x0 == supplies[agent]:
                            valuations[(agent, t, x0)] = -cost[(agent, t)]
                        else:
                            valuations[(agent, t, x0)] = Fraction(0)
        scheme = SchemeConfig(kind=RSPA, buyer=buyer, supplies=supplies)
        model = OutcomeModel(structure, outcomes, available, valuations)
    else:
        n_outcomes = rng.randint(2, 4)
        outcomes = tuple(f"x{k}" for k in range(n_outcomes))
        available = {}
        for level in lattice.elements:
            keep = [x for x in outcomes if rng.random() < 0.8]
            available[level] = tuple(keep) if keep else (outcomes[0],)
        valuations = {}
        for agent in agents:
            for level in lattice.elements:
                for t in structure.space(agent, level):
                    for x0 in outcomes:
                        valuations[(agent, t, x0)] = Fraction(rng.randint(0, 9))
        scheme = SchemeConfig(kind=CLARKE)
        model = OutcomeModel(structure, outcomes, available, valuations)

    top = lattice.top
    draw = NatureDraw(tuple(rng.choice(structure.space(a, top)) for a in agents),
                      tuple(rng.choice(sorted(lattice.elements)) for a in agents))
    name = f"generated-{seed}-{index}" + ("-procurement" if procurement else "")
    scenario = Scenario(lattice, structure, model, scheme, {"main": draw}, name)
    bad = model.violations()
    if bad:
        raise AssertionError(f"generator produced an invalid scenario: {bad}")
    return scenario
