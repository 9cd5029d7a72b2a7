"""Physical outcomes, exact-rational valuations, and welfare maximization.

Valuations are ``fractions.Fraction`` throughout; transfers downstream
demand exact equality, so floats never enter.  Availability is indexed by
awareness level and need not be monotone.  The welfare argmax and the
opponent-restricted argmax break ties by a scenario-supplied total order
over outcomes (default: identifier order), so outputs are deterministic.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .typespace import TypeStructure


class MissingValuation(Exception):
    pass


class OutcomeModel:
    """Immutable valuation tables plus the efficient-outcome functions."""

    def __init__(self, structure: TypeStructure, outcomes: Iterable[str],
                 available: Mapping[str, Iterable[str]],
                 valuations: Mapping[tuple[str, str, str], Fraction],
                 tie_break: Iterable[str] | None = None):
        self.structure = structure
        self.outcomes = tuple(dict.fromkeys(outcomes))
        self.available = {level: tuple(dict.fromkeys(xs)) for level, xs in available.items()}
        self.valuations = {key: Fraction(v) for key, v in valuations.items()}
        order = tuple(tie_break) if tie_break is not None else tuple(sorted(self.outcomes))
        self.tie_break = order
        self._rank = {x: k for k, x in enumerate(order)}
        self._eff_cache: dict[tuple[str, ...], str] = {}
        self._restricted_cache: dict[tuple[str, tuple[str, ...]], str] = {}

    def violations(self) -> list[str]:
        """Domain diagnostics: availability and valuation-table completeness.

        Every type needs a valuation for each outcome available at any level
        weakly below the type's own level; coarse-stage outcomes are evaluated
        against finer types by the premium recursion, so the domain is widened
        accordingly.
        """
        out = []
        if self.tie_break and sorted(self.tie_break) != sorted(self.outcomes):
            out.append("tie_break is not a total order over the declared outcomes")
        lattice = self.structure.lattice
        for level in lattice.elements:
            xs = self.available.get(level, ())
            if not xs:
                out.append(f"no outcome available at level {level}")
            for x in xs:
                if x not in self.outcomes:
                    out.append(f"available({level}) lists undeclared outcome {x}")
        for (agent, t, x), _ in self.valuations.items():
            if (agent, t) not in self.structure._level_of:
                out.append(f"valuation references undeclared type ({agent}, {t})")
            if x not in self.outcomes:
                out.append(f"valuation references undeclared outcome {x}")
        for agent in self.structure.agents:
            for level in lattice.elements:
                reachable = set()
                for lower in lattice.down_set(level):
                    reachable.update(self.available.get(lower, ()))
                for t in self.structure.space(agent, level):
                    for x in sorted(reachable):
                        if (agent, t, x) not in self.valuations:
                            out.append(f"missing valuation ({agent}, {t}, {x})")
        return out

    def value(self, agent: str, t: str, outcome: str) -> Fraction:
        try:
            return self.valuations[(agent, t, outcome)]
        except KeyError:
            raise MissingValuation(f"({agent}, {t}, {outcome})") from None

    def welfare(self, outcome: str, profile: tuple[str, ...]) -> Fraction:
        return sum((self.value(agent, t, outcome)
                    for agent, t in zip(self.structure.agents, profile)), Fraction(0))

    def opponents_welfare(self, agent: str, outcome: str, profile: tuple[str, ...]) -> Fraction:
        return sum((self.value(other, t, outcome)
                    for other, t in zip(self.structure.agents, profile) if other != agent),
                   Fraction(0))

    def _argmax(self, candidates: tuple[str, ...], score) -> str:
        best = None
        best_score = None
        for x in candidates:
            s = score(x)
            if best is None or s > best_score or (s == best_score
                                                  and self._rank[x] < self._rank[best]):
                best, best_score = x, s
        return best

    def efficient_outcome(self, profile: tuple[str, ...]) -> str:
        """Welfare argmax over outcomes available at the profile's pooled level."""
        cached = self._eff_cache.get(profile)
        if cached is not None:
            return cached
        level = self.structure.pooled_level(profile)
        best = self._argmax(self.available[level], lambda x: self.welfare(x, profile))
        self._eff_cache[profile] = best
        return best

    def restricted_efficient_outcome(self, agent: str, profile: tuple[str, ...]) -> str:
        """Argmax of opponents' welfare; the full profile fixes the pooled level."""
        key = (agent, profile)
        cached = self._restricted_cache.get(key)
        if cached is not None:
            return cached
        level = self.structure.pooled_level(profile)
        best = self._argmax(self.available[level],
                            lambda x: self.opponents_welfare(agent, x, profile))
        self._restricted_cache[key] = best
        return best
