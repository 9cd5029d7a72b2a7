"""Per-agent, level-indexed payoff type spaces with projection tables.

A type lives at exactly one awareness level of its agent.  Projections
strip a type down to any weakly lower level; they are supplied along
covering edges of the lattice and composed into the full table, with
every alternative composition path cross-checked.  Up-sets collect all
elaborations of a type at weakly higher levels.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Mapping

from .lattice import Lattice


class TypeStructureError(Exception):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


class UnknownType(Exception):
    pass


class LevelNotBelow(Exception):
    pass


@dataclass(frozen=True)
class NatureDraw:
    """A move of nature: top-level true types plus an awareness level per agent."""

    true_types: tuple[str, ...]
    awareness: tuple[str, ...]


class TypeStructure:
    """Validated type spaces.  Immutable; concurrent reads are safe.

    ``spaces`` maps (agent, level) to the tuple of type identifiers and
    ``projection`` gives the full (composed) table.
    """

    def __init__(self, lattice: Lattice, agents: tuple[str, ...],
                 spaces: Mapping[tuple[str, str], tuple[str, ...]],
                 projection: Mapping[tuple[str, str, str], str]):
        self.lattice = lattice
        self.agents = agents
        self.spaces = dict(spaces)
        self._proj = dict(projection)  # (agent, type, target level) -> type
        self._level_of: dict[tuple[str, str], str] = {}
        for (agent, level), types in self.spaces.items():
            for t in types:
                self._level_of[(agent, t)] = level
        self._preimage: dict[tuple[str, str, str], tuple[str, ...]] = {}
        for agent in agents:
            for level in lattice.elements:
                for t in self.spaces[(agent, level)]:
                    for hi in lattice.elements:
                        if not lattice.leq(level, hi):
                            continue
                        pre = tuple(s for s in self.spaces[(agent, hi)]
                                    if self._proj[(agent, s, level)] == t)
                        self._preimage[(agent, t, hi)] = pre

    def space(self, agent: str, level: str) -> tuple[str, ...]:
        return self.spaces[(agent, level)]

    def level_of(self, agent: str, t: str) -> str:
        try:
            return self._level_of[(agent, t)]
        except KeyError:
            raise UnknownType(f"{agent}: {t}") from None

    def project(self, agent: str, t: str, level: str) -> str:
        own = self.level_of(agent, t)
        if not self.lattice.leq(level, own):
            raise LevelNotBelow(f"{level} is not below {own}")
        return self._proj[(agent, t, level)]

    def preimage(self, agent: str, t: str, level: str) -> tuple[str, ...]:
        """Types at ``level`` projecting onto ``t``; requires level above t's own."""
        own = self.level_of(agent, t)
        if not self.lattice.leq(own, level):
            raise LevelNotBelow(f"{level} is not above {own}")
        return self._preimage[(agent, t, level)]

    def upset(self, agent: str, t: str) -> frozenset[str]:
        """All elaborations of ``t`` at weakly higher levels, including ``t``."""
        own = self.level_of(agent, t)
        out = set()
        for hi in self.lattice.elements:
            if self.lattice.leq(own, hi):
                out.update(self._preimage[(agent, t, hi)])
        return frozenset(out)

    def pooled_level(self, profile: tuple[str, ...]) -> str:
        """Join of the per-agent levels of a full type profile."""
        return self.lattice.join_all(
            self.level_of(agent, t) for agent, t in zip(self.agents, profile))

    def profiles(self, level: str) -> Iterator[tuple[str, ...]]:
        """All full type profiles with every component at ``level``."""
        return product(*(self.spaces[(agent, level)] for agent in self.agents))

    def perceived_type(self, agent: str, draw: NatureDraw, level: str) -> tuple[str, str]:
        """Type and effective awareness of ``agent`` within the ``level``-partial game."""
        i = self.agents.index(agent)
        effective = self.lattice.meet(draw.awareness[i], level)
        return self.project(agent, draw.true_types[i], effective), effective

    def agent_index(self, agent: str) -> int:
        return self.agents.index(agent)


def validate_draw(structure: TypeStructure, draw: NatureDraw) -> list[str]:
    violations = []
    top = structure.lattice.top
    for agent, t, level in zip(structure.agents, draw.true_types, draw.awareness):
        if t not in structure.spaces[(agent, top)]:
            violations.append(f"true type {t} of {agent} is not in the top-level space")
        if level not in structure.lattice:
            violations.append(f"awareness level {level} of {agent} is undeclared")
    return violations


def build_structure(lattice: Lattice, agents: Iterable[str],
                    spaces: Mapping[tuple[str, str], Iterable[str]],
                    edge_maps: Mapping[tuple[str, str, str], Mapping[str, str]],
                    ) -> TypeStructure:
    """Validate spaces and covering-edge projections; compose the full table.

    ``edge_maps`` maps (agent, higher level, lower level) to a dict sending
    each type of the higher space to one of the lower space.  Pairs beyond
    the covering relation may be supplied; they are cross-checked against
    the composed closure.
    """
    agents = tuple(dict.fromkeys(agents))
    violations: list[str] = []
    if not agents:
        violations.append("no agents declared")
    norm: dict[tuple[str, str], tuple[str, ...]] = {}
    seen: dict[str, str] = {}
    for agent in agents:
        for level in lattice.elements:
            types = tuple(dict.fromkeys(spaces.get((agent, level), ())))
            if not types:
                violations.append(f"empty type space for ({agent}, {level})")
            for t in types:
                prior = seen.get(agent + "\x00" + t)
                if prior is not None:
                    violations.append(f"type {t} of {agent} declared at both {prior} and {level}")
                seen[agent + "\x00" + t] = level
            norm[(agent, level)] = types
    if violations:
        raise TypeStructureError(violations)

    covers = set(lattice.covers())
    for (agent, hi, lo), table in edge_maps.items():
        if agent not in agents or hi not in lattice or lo not in lattice:
            violations.append(f"projection ({agent}, {hi} -> {lo}) references undeclared names")
            continue
        if not lattice.lt(lo, hi):
            violations.append(f"projection ({agent}, {hi} -> {lo}) is not downward")
            continue
        for src, dst in table.items():
            if src not in norm[(agent, hi)]:
                violations.append(f"projection ({agent}, {hi} -> {lo}) maps undeclared type {src}")
            elif dst not in norm[(agent, lo)]:
                violations.append(f"projection ({agent}, {hi} -> {lo}) targets undeclared type {dst}")
    if violations:
        raise TypeStructureError(violations)

    for agent in agents:
        for (lo, hi) in covers:
            table = edge_maps.get((agent, hi, lo))
            if table is None:
                violations.append(f"missing projection for ({agent}, {hi} -> {lo})")
            else:
                missing = [t for t in norm[(agent, hi)] if t not in table]
                if missing:
                    violations.append(
                        f"projection ({agent}, {hi} -> {lo}) undefined on {', '.join(missing)}")
    if violations:
        raise TypeStructureError(violations)

    # Compose the closure level pair by level pair, in increasing distance,
    # checking that all covering paths agree.
    full: dict[tuple[str, str, str], str] = {}
    for agent in agents:
        for level in lattice.elements:
            for t in norm[(agent, level)]:
                full[(agent, t, level)] = t
    ordered = sorted(lattice.elements, key=lambda x: len(lattice.down_set(x)))
    for agent in agents:
        for hi in ordered:
            for lo in lattice.strictly_below(hi):
                candidates: dict[str, dict[str, str]] = {}
                for (a, b) in covers:
                    if b != hi or not lattice.leq(lo, a):
                        continue
                    step = edge_maps[(agent, hi, a)]
                    candidates[a] = {t: full[(agent, step[t], lo)] for t in norm[(agent, hi)]}
                if not candidates:
                    continue  # unreachable in a lattice: some cover always lies above lo
                rep_key = next(iter(candidates))
                rep = candidates[rep_key]
                for via, table in candidates.items():
                    for t in norm[(agent, hi)]:
                        if table[t] != rep[t]:
                            violations.append(
                                f"composition failure for {agent}: {hi} -> {lo} via {via} sends "
                                f"{t} to {table[t]} but via {rep_key} to {rep[t]}")
                direct = edge_maps.get((agent, hi, lo))
                if direct is not None and (lo, hi) not in covers:
                    for t in norm[(agent, hi)]:
                        if direct.get(t) != rep[t]:
                            violations.append(
                                f"supplied long projection ({agent}, {hi} -> {lo}) disagrees with "
                                f"composition on {t}")
                for t in norm[(agent, hi)]:
                    full[(agent, t, lo)] = rep[t]
    if violations:
        raise TypeStructureError(violations)

    for agent in agents:
        for hi in lattice.elements:
            for lo in lattice.strictly_below(hi):
                image = {full[(agent, t, lo)] for t in norm[(agent, hi)]}
                if image != set(norm[(agent, lo)]):
                    missing = set(norm[(agent, lo)]) - image
                    violations.append(
                        f"projection ({agent}, {hi} -> {lo}) is not surjective; "
                        f"unreached: {', '.join(sorted(missing))}")
    if violations:
        raise TypeStructureError(violations)

    return TypeStructure(lattice, agents, norm, full)
