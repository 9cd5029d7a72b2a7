"""Transfer schemes over stopped transcripts.

Four kinds:

* ``groves``  -- opponents' realized welfare at the efficient outcome plus a
  scenario-supplied y-term over opponents' final types, plus the awareness
  premium adjustment.
* ``clarke``  -- the groves scheme with y derived as minus opponents' welfare
  at the agent-excluded efficient outcome (the pivot preset).
* ``rspa``    -- reverse second price auction for procurement: the lowest-cost
  seller supplies and is paid the second-lowest cost; the buyer is the sink
  funding everything, including any awareness premium.
* ``static_vickrey`` -- one-shot clarke transfers with no premium, for
  reproducing what a static auction does to asymmetric awareness.

The awareness premium m_i(level) is a recursion over strictly lower levels
bounding what agent i could gain by concealing awareness; it is floored at
zero and paid to the unique first reporter of the final pooled level.  Under
groves/clarke every other agent funds an equal share, keeping the adjustment
terms budget neutral; under rspa the buyer pays and non-recipients owe
nothing.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Mapping

from .engine import Transcript

if TYPE_CHECKING:
    from .scenario import Scenario


class TranscriptNotStopped(Exception):
    pass


class MissingYEntry(Exception):
    pass


class FewerThanTwoSellers(Exception):
    pass


GROVES = "groves"
CLARKE = "clarke"
RSPA = "rspa"
STATIC_VICKREY = "static_vickrey"
KINDS = (GROVES, CLARKE, RSPA, STATIC_VICKREY)


@dataclass(frozen=True)
class SchemeConfig:
    kind: str
    y_tables: Mapping[tuple[str, str, tuple[str, ...]], Fraction] | None = None
    buyer: str | None = None
    supplies: Mapping[str, str] | None = None
    simplified_premium_ok: bool = False
    ablate_premium: bool = False  # diagnostic switch: drop all adjustment terms


@dataclass(frozen=True)
class TransferReport:
    outcome: str
    transfers: dict[str, Fraction]
    adjustments: dict[str, Fraction]
    premium_recipient: str | None
    operator_balance: Fraction

    def jsonable(self) -> dict:
        def rat(x: Fraction) -> dict:
            return {"exact": str(x), "decimal": float(x)}
        return {
            "outcome": self.outcome,
            "transfers": {a: rat(v) for a, v in self.transfers.items()},
            "adjustments": {a: rat(v) for a, v in self.adjustments.items()},
            "premium_recipient": self.premium_recipient,
            "operator_balance": rat(self.operator_balance),
        }


def opponent_profile(agents: tuple[str, ...], agent: str, profile: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(t for a, t in zip(agents, profile) if a != agent)


def sellers(scenario: Scenario, scheme: SchemeConfig) -> tuple[str, ...]:
    return tuple(a for a in scenario.structure.agents if a != scheme.buyer)


def seller_cost(scenario: Scenario, scheme: SchemeConfig, agent: str, t: str) -> Fraction:
    return -scenario.outcomes.value(agent, t, scheme.supplies[agent])


def seller_costs(scenario: Scenario, scheme: SchemeConfig,
                 profile: tuple[str, ...]) -> dict[str, Fraction]:
    agents = scenario.structure.agents
    return {a: seller_cost(scenario, scheme, a, t)
            for a, t in zip(agents, profile) if a != scheme.buyer}


def second_lowest_cost(scenario: Scenario, scheme: SchemeConfig,
                       profile: tuple[str, ...]) -> Fraction:
    costs = sorted(seller_costs(scenario, scheme, profile).values())
    if len(costs) < 2:
        raise FewerThanTwoSellers(f"{len(costs)} sellers")
    return costs[1]


def rspa_outcome(scenario: Scenario, scheme: SchemeConfig, profile: tuple[str, ...]) -> str:
    """Lowest-cost seller supplies; cost ties resolved by the outcome tie-break order."""
    costs = seller_costs(scenario, scheme, profile)
    if len(costs) < 2:
        raise FewerThanTwoSellers(f"{len(costs)} sellers")
    rank = scenario.outcomes._rank
    best = min(costs, key=lambda a: (costs[a], rank[scheme.supplies[a]]))
    return scheme.supplies[best]


def scheme_outcome(scenario: Scenario, scheme: SchemeConfig, profile: tuple[str, ...]) -> str:
    if scheme.kind == RSPA:
        return rspa_outcome(scenario, scheme, profile)
    return scenario.outcomes.efficient_outcome(profile)


def y_value(scenario: Scenario, scheme: SchemeConfig, agent: str, level: str,
            profile: tuple[str, ...]) -> Fraction:
    """The y-term at a single-level profile (the profile fixes the pooled level)."""
    if scheme.kind in (CLARKE, STATIC_VICKREY):
        return clarke_y(scenario, agent, profile)
    if scheme.kind == GROVES:
        key = (agent, level, opponent_profile(scenario.structure.agents, agent, profile))
        try:
            return scheme.y_tables[key]
        except (KeyError, TypeError):
            raise MissingYEntry(str(key)) from None
    raise ValueError(f"no y-term for scheme kind {scheme.kind}")


def clarke_y(scenario: Scenario, agent: str, profile: tuple[str, ...]) -> Fraction:
    restricted = scenario.outcomes.restricted_efficient_outcome(agent, profile)
    return -scenario.outcomes.opponents_welfare(agent, restricted, profile)


def first_pooled_reporter(scenario: Scenario, transcript: Transcript) -> str | None:
    """The unique agent who first reported a type at the final pooled level.

    None when nobody ever reported that level or when two or more agents
    tie at the earliest such stage.
    """
    if not transcript.stopped:
        raise TranscriptNotStopped()
    structure = scenario.structure
    target = transcript.final_pooled
    earliest: dict[str, int] = {}
    for stage, profile in enumerate(transcript.stages, start=1):
        for agent, report in zip(structure.agents, profile):
            if agent not in earliest and structure.level_of(agent, report) == target:
                earliest[agent] = stage
    if not earliest:
        return None
    best = min(earliest.values())
    firsts = [a for a, k in earliest.items() if k == best]
    return firsts[0] if len(firsts) == 1 else None


class PremiumTable:
    """Memoized awareness premia m_i(level) for one (scenario, scheme) pair.

    Read-only after warm-up; safe to share across transcript evaluations.
    """

    def __init__(self, scenario: Scenario, scheme: SchemeConfig):
        self.scenario = scenario
        self.scheme = scheme
        self._memo: dict[tuple[str, str], Fraction] = {}

    def premium(self, agent: str, level: str) -> Fraction:
        key = (agent, level)
        if key not in self._memo:
            self._memo[key] = self._compute(agent, level)
        return self._memo[key]

    def _compute(self, agent: str, level: str) -> Fraction:
        lattice = self.scenario.lattice
        if level == lattice.bottom:
            return Fraction(0)
        if self.scheme.kind == RSPA:
            value = self._rspa_premium(agent, level)
            if self.scheme.simplified_premium_ok:
                short = self._rspa_premium_simplified(agent, level)
                if short != value:
                    raise ValueError(
                        f"simplified premium {short} for ({agent}, {level}) disagrees with the "
                        f"full recursion {value}; the opt-out assumption does not hold here")
            return value
        return self._vcg_premium(agent, level)

    def _vcg_premium(self, agent: str, level: str) -> Fraction:
        scenario, scheme = self.scenario, self.scheme
        model = scenario.outcomes
        best = Fraction(0)
        for lower in scenario.lattice.strictly_below(level):
            base = self.premium(agent, lower)
            # Coarse side: realized outcome and transfer terms at the lower level.
            coarse = []
            for coarse_profile in scenario.structure.profiles(lower):
                x0 = model.efficient_outcome(coarse_profile)
                coarse.append((x0,
                               model.opponents_welfare(agent, x0, coarse_profile)
                               + y_value(scenario, scheme, agent, lower, coarse_profile)))
            for fine_profile in scenario.structure.profiles(level):
                fine_type = fine_profile[scenario.structure.agent_index(agent)]
                drop = (model.welfare(model.efficient_outcome(fine_profile), fine_profile)
                        + y_value(scenario, scheme, agent, level, fine_profile))
                # The concealment value couples the agent's fine type with the
                # coarse outcome, exactly as the recursion is written.
                gain = max(model.value(agent, fine_type, x0) + rest for x0, rest in coarse)
                best = max(best, base + gain - drop)
        return best

    def _win_margin(self, agent: str, profile: tuple[str, ...]) -> Fraction:
        scenario, scheme = self.scenario, self.scheme
        if rspa_outcome(scenario, scheme, profile) != scheme.supplies[agent]:
            return Fraction(0)
        i = scenario.structure.agent_index(agent)
        return (second_lowest_cost(scenario, scheme, profile)
                - seller_cost(scenario, scheme, agent, profile[i]))

    def _rspa_premium(self, agent: str, level: str) -> Fraction:
        scenario = self.scenario
        best = Fraction(0)
        for lower in scenario.lattice.strictly_below(level):
            base = self.premium(agent, lower)
            gain = max(self._win_margin(agent, p) for p in scenario.structure.profiles(lower))
            drop = min(self._win_margin(agent, p) for p in scenario.structure.profiles(level))
            best = max(best, base + gain - drop)
        return best

    def _rspa_premium_simplified(self, agent: str, level: str) -> Fraction:
        scenario = self.scenario
        if level == scenario.lattice.bottom:
            return Fraction(0)
        best = None
        for lower in scenario.lattice.strictly_below(level):
            base = self._rspa_premium_simplified(agent, lower)
            gain = max(self._win_margin(agent, p) for p in scenario.structure.profiles(lower))
            candidate = base + gain
            best = candidate if best is None else max(best, candidate)
        return best


def awareness_adjustments(scenario: Scenario, scheme: SchemeConfig, transcript: Transcript,
                          premiums: PremiumTable | None = None) -> tuple[dict[str, Fraction], str | None]:
    """Per-agent adjustment terms and the premium recipient."""
    if not transcript.stopped:
        raise TranscriptNotStopped()
    agents = scenario.structure.agents
    zero = {a: Fraction(0) for a in agents}
    if scheme.kind == STATIC_VICKREY:
        return zero, None
    recipient = first_pooled_reporter(scenario, transcript)
    if scheme.ablate_premium or recipient is None or len(agents) == 1:
        return zero, recipient
    if scheme.kind == RSPA and recipient == scheme.buyer:
        return zero, recipient
    premiums = premiums or PremiumTable(scenario, scheme)
    m = premiums.premium(recipient, transcript.final_pooled)
    out = dict(zero)
    out[recipient] = m
    if scheme.kind in (GROVES, CLARKE):
        share = -m / (len(agents) - 1)
        for a in agents:
            if a != recipient:
                out[a] = share
    return out, recipient


def transfer_report(scenario: Scenario, scheme: SchemeConfig, transcript: Transcript,
                    premiums: PremiumTable | None = None) -> TransferReport:
    if not transcript.stopped:
        raise TranscriptNotStopped()
    agents = scenario.structure.agents
    final = transcript.final
    adjustments, recipient = awareness_adjustments(scenario, scheme, transcript, premiums)
    if scheme.kind == RSPA:
        outcome = rspa_outcome(scenario, scheme, final)
        price = second_lowest_cost(scenario, scheme, final)
        transfers = {}
        for a in agents:
            if a == scheme.buyer:
                continue
            won = scheme.supplies[a] == outcome
            transfers[a] = (price if won else Fraction(0)) + adjustments[a]
        transfers[scheme.buyer] = -price - sum(adjustments.values())
    else:
        outcome = scenario.outcomes.efficient_outcome(final)
        level = transcript.final_pooled
        transfers = {}
        for a in agents:
            transfers[a] = (scenario.outcomes.opponents_welfare(a, outcome, final)
                            + y_value(scenario, scheme, a, level, final)
                            + adjustments[a])
    balance = -sum(transfers.values())
    return TransferReport(outcome, transfers, adjustments, recipient, balance)


class Mechanism:
    """A scheme bound to a scenario, with premium and report caches.

    Pure function of its inputs; reports for distinct transcripts may be
    computed concurrently once the premium table is warm.
    """

    def __init__(self, scenario: Scenario, scheme: SchemeConfig):
        self.scenario = scenario
        self.scheme = scheme
        self.premiums = PremiumTable(scenario, scheme)
        self._reports: dict[tuple, TransferReport] = {}

    def report(self, transcript: Transcript) -> TransferReport:
        key = (transcript.stages, transcript.final_pooled)
        cached = self._reports.get(key)
        if cached is None:
            cached = transfer_report(self.scenario, self.scheme, transcript, self.premiums)
            self._reports[key] = cached
        return cached

    def utility(self, transcript: Transcript, agent: str, eval_type: str) -> Fraction:
        """Quasilinear payoff of the play, valued at ``eval_type``."""
        rep = self.report(transcript)
        return self.scenario.outcomes.value(agent, eval_type, rep.outcome) + rep.transfers[agent]
