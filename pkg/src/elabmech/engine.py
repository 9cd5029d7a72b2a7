"""The multi-round elaboration protocol and its play-tree enumeration.

A play starts from a nature draw restricted to some partial game: each
agent holds a perceived type at her effective awareness.  Every stage all
agents report simultaneously; the mediator broadcasts the pooled level of
the reports, each agent's awareness joins it, her perceived type elaborates
accordingly, and reporting continues until a profile repeats.

Reports are constrained to elaboration chains: after the first stage an
agent must report a type that projects onto her previous report, at a
level at least the join of her previous level with the broadcast pooled
level, and no higher than her current awareness.

All state is immutable; distinct plays may be explored concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING, Callable, Iterator, Mapping

from .typespace import NatureDraw

if TYPE_CHECKING:
    from .scenario import Scenario


class InfeasibleReport(Exception):
    pass


class StrategySpaceTooLarge(Exception):
    def __init__(self, bound: int):
        super().__init__(f"enumeration exceeded {bound} plays")
        self.bound = bound


@dataclass(frozen=True)
class InfoSet:
    """What an agent knows when called to report: her current (already
    elaborated) perceived type plus the full sequence of past report
    profiles."""

    owner: str
    perceived: str
    history: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Transcript:
    stages: tuple[tuple[str, ...], ...]
    pooled: tuple[str, ...]
    stopped: bool

    @property
    def final(self) -> tuple[str, ...]:
        return self.stages[-1]

    @property
    def final_pooled(self) -> str:
        return self.pooled[-1]

    @property
    def n_stages(self) -> int:
        return len(self.stages)


@dataclass(frozen=True)
class PlayState:
    game_level: str
    true_profile: tuple[str, ...]
    awareness: tuple[str, ...]
    perceived: tuple[str, ...]
    history: tuple[tuple[str, ...], ...]
    pooled: tuple[str, ...]
    stopped: bool

    @property
    def stage(self) -> int:
        return len(self.history) + 1


Policy = Callable[[InfoSet], str]
FREE = "free"
TRUTH = "truth"


class PlayBudget:
    """Shared counter for play enumeration; trips at the configured bound."""

    def __init__(self, bound: int = 10 ** 6):
        self.bound = bound
        self.used = 0

    def charge(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.bound:
            raise StrategySpaceTooLarge(self.bound)


def initial_state(scenario: Scenario, game_level: str, true_profile: tuple[str, ...],
                  awareness: tuple[str, ...]) -> PlayState:
    structure = scenario.structure
    lattice = structure.lattice
    effective = tuple(lattice.meet(a, game_level) for a in awareness)
    perceived = tuple(structure.project(agent, t, eff)
                      for agent, t, eff in zip(structure.agents, true_profile, effective))
    return PlayState(game_level, true_profile, effective, perceived, (), (), False)


def state_from_draw(scenario: Scenario, draw: NatureDraw, partial_level: str) -> PlayState:
    structure = scenario.structure
    profile = tuple(structure.project(agent, t, partial_level)
                    for agent, t in zip(structure.agents, draw.true_types))
    return initial_state(scenario, partial_level, profile, draw.awareness)


def info_set(state: PlayState, agent: str, agents: tuple[str, ...]) -> InfoSet:
    return InfoSet(agent, state.perceived[agents.index(agent)], state.history)


def feasible_reports(scenario: Scenario, state: PlayState, agent: str) -> tuple[str, ...]:
    structure = scenario.structure
    lattice = structure.lattice
    i = structure.agent_index(agent)
    aware = state.awareness[i]
    last = state.history[-1][i] if state.history else None
    pooled = state.pooled[-1] if state.history else None
    key = (agent, aware, last, pooled)
    cached = scenario.feasible_cache.get(key)
    if cached is not None:
        return cached
    levels = sorted(lattice.down_set(aware), key=lambda x: (len(lattice.down_set(x)), x))
    out = []
    if last is None:
        for level in levels:
            out.extend(structure.space(agent, level))
    else:
        base = lattice.join(structure.level_of(agent, last), pooled)
        for level in levels:
            if lattice.leq(base, level):
                out.extend(structure.preimage(agent, last, level))
    result = tuple(out)
    scenario.feasible_cache[key] = result
    return result


def truth_report(state: PlayState, agent: str, agents: tuple[str, ...]) -> str:
    return state.perceived[agents.index(agent)]


def advance(scenario: Scenario, state: PlayState, reports: tuple[str, ...]) -> PlayState:
    if state.stopped:
        raise InfeasibleReport("play already stopped")
    structure = scenario.structure
    lattice = structure.lattice
    for agent, report in zip(structure.agents, reports):
        if report not in feasible_reports(scenario, state, agent):
            raise InfeasibleReport(f"{agent}: {report}")
    pooled = lattice.join_all(structure.level_of(agent, r)
                              for agent, r in zip(structure.agents, reports))
    awareness = tuple(lattice.join(a, pooled) for a in state.awareness)
    perceived = tuple(structure.project(agent, t, a)
                      for agent, t, a in zip(structure.agents, state.true_profile, awareness))
    stopped = bool(state.history) and reports == state.history[-1]
    return PlayState(state.game_level, state.true_profile, awareness, perceived,
                     state.history + (reports,), state.pooled + (pooled,), stopped)


def transcript(state: PlayState) -> Transcript:
    return Transcript(state.history, state.pooled, state.stopped)


def max_stages(scenario: Scenario) -> int:
    return len(scenario.structure.agents) * scenario.lattice.height() + 2


def run(scenario: Scenario, draw: NatureDraw, partial_level: str,
        strategies: Mapping[str, Policy] | None = None) -> Transcript:
    """Play the partial game to completion; agents without a strategy tell the truth."""
    structure = scenario.structure
    state = state_from_draw(scenario, draw, partial_level)
    cap = max_stages(scenario)
    while not state.stopped:
        if state.stage > cap:
            raise AssertionError("protocol failed to stop within the stage cap")
        reports = []
        for agent in structure.agents:
            policy = (strategies or {}).get(agent)
            if policy is None:
                reports.append(truth_report(state, agent, structure.agents))
            else:
                reports.append(policy(info_set(state, agent, structure.agents)))
        state = advance(scenario, state, tuple(reports))
    return transcript(state)


def run_single_stage(scenario: Scenario, draw: NatureDraw, partial_level: str) -> Transcript:
    """Degenerate static protocol: one truthful report round, no feedback."""
    state = state_from_draw(scenario, draw, partial_level)
    state = advance(scenario, state, state.perceived)
    return Transcript(state.history, state.pooled, True)


def iter_completions(scenario: Scenario, state: PlayState,
                     policies: Mapping[str, object],
                     budget: PlayBudget | None = None) -> Iterator[PlayState]:
    """All terminal plays from ``state`` under per-agent policies.

    A policy is FREE (explore every feasible report), TRUTH (current
    perceived type), or a callable ``(scenario, state, agent) -> report``.
    Every feasible report path is realized by some strategy profile and
    vice versa, so enumerating paths is outcome-equivalent to enumerating
    strategies.
    """
    agents = scenario.structure.agents
    if state.stopped:
        if budget is not None:
            budget.charge()
        yield state
        return
    menus = []
    for agent in agents:
        policy = policies.get(agent, TRUTH)
        if policy == FREE:
            menus.append(feasible_reports(scenario, state, agent))
        elif policy == TRUTH:
            menus.append((truth_report(state, agent, agents),))
        else:
            menus.append((policy(scenario, state, agent),))
    for combo in product(*menus):
        yield from iter_completions(scenario, advance(scenario, state, combo),
                                    policies, budget)


def plan_policy(agent: str, reports_by_stage: tuple[str, ...], scenario: Scenario):
    """A non-reactive strategy realized by a per-stage report sequence.

    Successive reports elaborate one another, so the sequence is equivalent
    to its most elaborate report plus the per-stage level schedule.  On any
    branch the plan replays positionally: at stage n the agent says as much
    of her final report as both her schedule and her current awareness
    allow, elaborated further only where the protocol floor (previous level
    joined with the broadcast pooled level) forces it.  On the branch the
    plan was read from this reproduces it verbatim; when another agent's
    deviation changes the pooled trajectory, the plan is capped or
    stretched level-wise but never changes content.  The replay is always
    feasible: the floor stays below the plan's final level because a
    stopped play ends with every agent at the final pooled level.
    """
    structure = scenario.structure
    lattice = scenario.lattice
    idx = structure.agent_index(agent)
    schedule = tuple(structure.level_of(agent, r) for r in reports_by_stage)
    final_report = reports_by_stage[-1]

    def policy(scenario_: Scenario, state: PlayState, owner: str) -> str:
        assert owner == agent
        target = schedule[min(state.stage, len(schedule)) - 1]
        level = lattice.meet(target, state.awareness[idx])
        if state.history:
            floor = lattice.join(structure.level_of(agent, state.history[-1][idx]),
                                 state.pooled[-1])
            level = lattice.join(level, floor)
        return structure.project(agent, final_report, level)

    return policy


def enumerate_deviation_plays(scenario: Scenario, state: PlayState, agent: str,
                              opponents: Mapping[str, object] | None = None,
                              bound: int = 10 ** 6) -> Iterator[Transcript]:
    """Plays obtainable by any strategy of ``agent`` from ``state`` onward.

    Opponents default to truth-telling; pass policies (plans, callables, or
    FREE) to range over their behavior as well.
    """
    policies = dict(opponents or {})
    policies[agent] = FREE
    budget = PlayBudget(bound)
    for terminal in iter_completions(scenario, state, policies, budget):
        yield transcript(terminal)
