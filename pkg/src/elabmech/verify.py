"""Brute-force verification of the mechanism properties.

Every check quantifies exhaustively over its finite domain and returns a
:class:`VerificationResult` whose witnesses carry enough data to replay the
exact utility or welfare gap.  No numerical tolerance appears anywhere; all
comparisons are exact over rationals.  Checks are pure functions of their
scenario: distinct (property, draw, level) cells may be fanned out to
parallel workers and their results merged in any order.

Conditional dominance is the expensive check.  Opponents' strategies are
enumerated as realized-report plans per nature draw: the report sequences
they produce on the truthful play, replayed positionally (with an
awareness cap) when the checked agent deviates.  Payoffs depend only on
the realized transcript, so this enumeration covers every opponent
strategy that does not condition on the checked agent's report content
beyond what the pooled-level broadcasts force; fully report-reactive
opponents could transfer utility across branches, which no transfer
scheme can price.  Games whose initial awareness vector cannot reach the
conditioning level are skipped: projecting such a draw downward
reproduces an instance already enumerated at the lower level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterator

from . import engine
from .engine import FREE, PlayBudget, PlayState
from .scenario import Scenario
from .transfers import (RSPA, STATIC_VICKREY, Mechanism, SchemeConfig,
                        scheme_outcome, sellers)
from .typespace import NatureDraw


@dataclass
class Witness:
    description: str
    replay: dict = field(default_factory=dict)


@dataclass
class VerificationResult:
    prop: str
    holds: bool
    witnesses: list[Witness]
    checked: int

    def jsonable(self) -> dict:
        return {
            "property": self.prop,
            "verdict": "holds" if self.holds else "violated",
            "checked": self.checked,
            "witnesses": [{"description": w.description, "replay": w.replay}
                          for w in self.witnesses],
        }


def _awareness_vectors(scenario: Scenario, level: str,
                       require_join: bool = False) -> Iterator[tuple[str, ...]]:
    lattice = scenario.lattice
    levels = sorted(lattice.down_set(level))
    for combo in product(levels, repeat=len(scenario.agents)):
        if require_join and lattice.join_all(combo) != level:
            continue
        yield combo


def _partial_draws(scenario: Scenario, level: str,
                   require_join: bool = False) -> Iterator[tuple[tuple[str, ...], tuple[str, ...]]]:
    for profile in scenario.structure.profiles(level):
        for awareness in _awareness_vectors(scenario, level, require_join):
            yield profile, awareness


def check_efficiency(scenario: Scenario) -> VerificationResult:
    """The outcome rule maximizes welfare at every level and profile."""
    witnesses = []
    checked = 0
    model = scenario.outcomes
    for level in scenario.lattice.elements:
        for profile in scenario.structure.profiles(level):
            chosen = model.efficient_outcome(profile)
            base = model.welfare(chosen, profile)
            for x0 in model.available[level]:
                checked += 1
                alt = model.welfare(x0, profile)
                if alt > base:
                    witnesses.append(Witness(
                        f"welfare gap at level {level}: outcome {x0} beats {chosen} "
                        f"by {alt - base} on profile {profile}",
                        {"level": level, "profile": list(profile), "outcome": x0,
                         "welfare": str(alt), "chosen": chosen, "chosen_welfare": str(base)}))
    return VerificationResult("efficiency", not witnesses, witnesses, checked)


def check_pooled_implementation(scenario: Scenario, scheme: SchemeConfig) -> VerificationResult:
    """Truthful play implements the outcome of the true profile projected to
    the agents' pooled awareness, for every nature draw."""
    witnesses = []
    checked = 0
    structure = scenario.structure
    top = scenario.lattice.top
    for true_profile in structure.profiles(top):
        for awareness in product(scenario.lattice.elements, repeat=len(scenario.agents)):
            checked += 1
            draw = NatureDraw(true_profile, awareness)
            if scheme.kind == STATIC_VICKREY:
                transcript = engine.run_single_stage(scenario, draw, top)
            else:
                transcript = engine.run(scenario, draw, top)
            implemented = scheme_outcome(scenario, scheme, transcript.final)
            pooled = scenario.lattice.join_all(awareness)
            target_profile = tuple(structure.project(agent, t, pooled)
                                   for agent, t in zip(structure.agents, true_profile))
            target = scheme_outcome(scenario, scheme, target_profile)
            if implemented != target:
                witnesses.append(Witness(
                    f"draw {true_profile} at awareness {awareness}: implemented {implemented}, "
                    f"pooled-awareness target {target}",
                    {"true_types": list(true_profile), "awareness": list(awareness),
                     "stages": [list(s) for s in transcript.stages],
                     "implemented": implemented, "target": target}))
    return VerificationResult("pooled-implementation", not witnesses, witnesses, checked)


def check_stage_bound(scenario: Scenario, bound: int = 3) -> VerificationResult:
    """Every truthful run, in every partial game, stops within ``bound`` stages."""
    witnesses = []
    checked = 0
    for level in scenario.lattice.elements:
        for profile, awareness in _partial_draws(scenario, level):
            checked += 1
            state = engine.initial_state(scenario, level, profile, awareness)
            state = _run_truth(scenario, state)
            if len(state.history) > bound:
                witnesses.append(Witness(
                    f"truthful run took {len(state.history)} stages at level {level}",
                    {"level": level, "profile": list(profile), "awareness": list(awareness),
                     "stages": [list(s) for s in state.history]}))
    return VerificationResult("stage-bound", not witnesses, witnesses, checked)


def _run_truth(scenario: Scenario, state: PlayState) -> PlayState:
    agents = scenario.structure.agents
    while not state.stopped:
        state = engine.advance(scenario, state,
                               tuple(engine.truth_report(state, a, agents) for a in agents))
    return state


def check_budget(scenario: Scenario, scheme: SchemeConfig, mode: str = "balance",
                 bound: int = 10 ** 6) -> VerificationResult:
    """Transfer sums over every feasible stopped transcript.

    Any transcript reachable under some draw and strategy profile is
    reachable with every agent fully aware, so a single enumeration at the
    top level covers the whole transcript set.
    """
    if mode not in ("balance", "no_deficit"):
        raise ValueError(mode)
    mech = Mechanism(scenario, scheme)
    structure = scenario.structure
    top = scenario.lattice.top
    true_profile = next(structure.profiles(top))
    state = engine.initial_state(scenario, top, true_profile,
                                 tuple(top for _ in structure.agents))
    budget = PlayBudget(bound)
    witnesses = []
    checked = 0
    policies = {agent: FREE for agent in structure.agents}
    for terminal in engine.iter_completions(scenario, state, policies, budget):
        checked += 1
        transcript = engine.transcript(terminal)
        total = sum(mech.report(transcript).transfers.values())
        bad = total != 0 if mode == "balance" else total > 0
        if bad:
            witnesses.append(Witness(
                f"transfers sum to {total} on transcript {transcript.stages}",
                {"stages": [list(s) for s in transcript.stages], "sum": str(total),
                 "transfers": {a: str(v) for a, v in
                               mech.report(transcript).transfers.items()}}))
            break
    prop = "budget-balance" if mode == "balance" else "no-deficit"
    return VerificationResult(prop, not witnesses, witnesses, checked)


def check_nonnegative_valuations(scenario: Scenario) -> VerificationResult:
    witnesses = []
    checked = 0
    model = scenario.outcomes
    for level in scenario.lattice.elements:
        for agent in scenario.agents:
            for t in scenario.structure.space(agent, level):
                for x0 in model.available[level]:
                    checked += 1
                    v = model.value(agent, t, x0)
                    if v < 0:
                        witnesses.append(Witness(
                            f"negative valuation {v} for ({agent}, {t}, {x0})",
                            {"agent": agent, "type": t, "outcome": x0, "value": str(v)}))
    return VerificationResult("nonnegative-valuations", not witnesses, witnesses, checked)


def check_participation(scenario: Scenario, scheme: SchemeConfig, mode: str = "ex_post",
                        only_agents: tuple[str, ...] | None = None) -> VerificationResult:
    """Truthful play leaves the agent weakly above her outside option of zero.

    ``ex_post`` asserts this at every information set reached under truth;
    ``ex_ante_anticipated`` only at initial information sets.  Each
    information set is evaluated within the partial game at its own
    awareness level, over every draw of that game consistent with it.
    """
    if mode not in ("ex_post", "ex_ante_anticipated"):
        raise ValueError(mode)
    if only_agents is None:
        only_agents = sellers(scenario, scheme) if scheme.kind == RSPA else scenario.agents
    mech = Mechanism(scenario, scheme)
    structure = scenario.structure
    witnesses = []
    checked = 0
    for level in scenario.lattice.elements:
        for profile, awareness in _partial_draws(scenario, level, require_join=True):
            state = engine.initial_state(scenario, level, profile, awareness)
            reached = [state]
            while not state.stopped:
                state = engine.advance(
                    scenario, state,
                    tuple(engine.truth_report(state, a, structure.agents)
                          for a in structure.agents))
                if not state.stopped:
                    reached.append(state)
            transcript = engine.transcript(state)
            stop = 1 if mode == "ex_ante_anticipated" else len(reached)
            for agent in only_agents:
                i = structure.agent_index(agent)
                for node in reached[:stop]:
                    if structure.level_of(agent, node.perceived[i]) != level:
                        continue
                    checked += 1
                    u = mech.utility(transcript, agent, node.perceived[i])
                    if u < 0:
                        witnesses.append(Witness(
                            f"{agent} gets {u} at stage-{node.stage} information set "
                            f"(perceived {node.perceived[i]}) under draw {profile} / {awareness}",
                            {"agent": agent, "level": level, "profile": list(profile),
                             "awareness": list(awareness), "stage": node.stage,
                             "perceived": node.perceived[i], "utility": str(u),
                             "stages": [list(s) for s in transcript.stages]}))
    prop = "participation-ex-post" if mode == "ex_post" else "participation-ex-ante"
    return VerificationResult(prop, not witnesses, witnesses, checked)


class _Violated(Exception):
    pass


def check_conditional_dominance(scenario: Scenario, scheme: SchemeConfig,
                                bound: int = 10 ** 6) -> VerificationResult:
    """Truth-telling weakly beats every feasible continuation of the agent,
    at every truthfully reached information set, against every opponents'
    strategy profile enumerated as realized-report plans.

    A plan is an opponent's per-stage report sequence realized on the
    truthful play; on deviation branches it is replayed positionally with
    the awareness-cap fallback of :func:`engine.plan_policy`.  The utility
    of the truthful play and of every deviating continuation from an
    information set are both evaluated at the type perceived there.
    """
    if scheme.kind == STATIC_VICKREY:
        raise ValueError("conditional dominance applies to the dynamic protocol")
    mech = Mechanism(scenario, scheme)
    structure = scenario.structure
    agents = structure.agents
    # The reverse-auction buyer is the sink agent commissioning the
    # mechanism, not an incentive-constrained bidder: concealing awareness
    # always weakly lowers the second price she pays, so buyer-side
    # dominance is unattainable by construction.  Check the sellers.
    checked_agents = sellers(scenario, scheme) if scheme.kind == RSPA else agents
    budget = PlayBudget(bound)
    witnesses: list[Witness] = []
    checked = 0

    def check_instance(agent: str, level: str, profile: tuple[str, ...],
                       awareness: tuple[str, ...]) -> None:
        nonlocal checked
        i = structure.agent_index(agent)

        def opponent_combos(state: PlayState):
            menus = [engine.feasible_reports(scenario, state, a) if a != agent else (None,)
                     for a in agents]
            return product(*menus)

        def walk(state: PlayState, nodes: list[PlayState]) -> None:
            # DFS over opponents' free choices while the agent tells the
            # truth; each terminal fixes one opponents' plan profile.
            if state.stopped:
                settle(state, nodes)
                return
            truth_rep = engine.truth_report(state, agent, agents)
            for combo in opponent_combos(state):
                merged = list(combo)
                merged[i] = truth_rep
                child = engine.advance(scenario, state, tuple(merged))
                walk(child, nodes + [state])

        def settle(terminal: PlayState, nodes: list[PlayState]) -> None:
            nonlocal checked
            budget.charge()
            truth_transcript = engine.transcript(terminal)
            policies: dict[str, object] = {
                a: engine.plan_policy(a, tuple(stage[k] for stage in truth_transcript.stages),
                                      scenario)
                for k, a in enumerate(agents) if a != agent}
            policies[agent] = FREE
            for h_state in nodes:
                if structure.level_of(agent, h_state.perceived[i]) != level:
                    continue
                eval_type = h_state.perceived[i]
                u_truth = mech.utility(truth_transcript, agent, eval_type)
                checked += 1
                for dev_terminal in engine.iter_completions(scenario, h_state, policies, budget):
                    dev_transcript = engine.transcript(dev_terminal)
                    u_dev = mech.utility(dev_transcript, agent, eval_type)
                    if u_dev > u_truth:
                        witnesses.append(Witness(
                            f"{agent} gains {u_dev - u_truth} by deviating at stage "
                            f"{h_state.stage} (draw {profile} / {awareness} in the "
                            f"{level}-partial game)",
                            {"agent": agent, "level": level, "profile": list(profile),
                             "awareness": list(awareness),
                             "conditioning_stage": h_state.stage,
                             "perceived": eval_type,
                             "truth_stages": [list(s) for s in truth_transcript.stages],
                             "deviation_stages": [list(s) for s in dev_transcript.stages],
                             "truth_utility": str(u_truth),
                             "deviation_utility": str(u_dev)}))
                        raise _Violated()

        walk(engine.initial_state(scenario, level, profile, awareness), [])

    lattice = scenario.lattice
    for agent in checked_agents:
        for level in lattice.elements:
            for awareness in _awareness_vectors(scenario, level, require_join=True):
                for own_true in structure.space(agent, level):
                    # Opponents' true types never influence the check: their
                    # reports range freely and utilities read only the agent's
                    # own valuation plus the reported transcript.
                    profile = tuple(own_true if a == agent
                                    else structure.space(a, level)[0] for a in agents)
                    try:
                        check_instance(agent, level, profile, awareness)
                    except _Violated:
                        return VerificationResult("dominance", False, witnesses, checked)
    return VerificationResult("dominance", True, witnesses, checked)


def holmstrom_welfare(scenario: Scenario, profile: tuple[str, ...]) -> Fraction:
    return scenario.outcomes.welfare(scenario.outcomes.efficient_outcome(profile), profile)


def check_holmstrom(scenario: Scenario,
                    g: dict[tuple[str, str, tuple[str, ...]], Fraction]) -> VerificationResult:
    """The welfare decomposition holds at every level and profile for ``g``."""
    from .transfers import opponent_profile
    witnesses = []
    checked = 0
    for level in scenario.lattice.elements:
        for profile in scenario.structure.profiles(level):
            checked += 1
            total = sum((g[(agent, level, opponent_profile(scenario.agents, agent, profile))]
                         for agent in scenario.agents), Fraction(0))
            welfare = holmstrom_welfare(scenario, profile)
            if total != welfare:
                witnesses.append(Witness(
                    f"decomposition misses welfare by {welfare - total} at {level} {profile}",
                    {"level": level, "profile": list(profile),
                     "welfare": str(welfare), "decomposed": str(total)}))
    return VerificationResult("holmstrom", not witnesses, witnesses, checked)


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """One solution of A x = b over the rationals, or None when inconsistent.

    Plain Gaussian elimination; free variables are set to zero.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    a = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(n):
        pivot = next((k for k in range(r, m) if a[k][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        scale = a[r][c]
        a[r] = [x / scale for x in a[r]]
        for k in range(m):
            if k != r and a[k][c] != 0:
                factor = a[k][c]
                a[k] = [x - factor * y for x, y in zip(a[k], a[r])]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    for k in range(r, m):
        if a[k][n] != 0:
            return None
    solution = [Fraction(0)] * n
    for row, col in pivots:
        solution[col] = a[row][n]
    return solution


def find_g(scenario: Scenario) -> dict[tuple[str, str, tuple[str, ...]], Fraction] | None:
    """Solve the welfare decomposition exactly, level by level."""
    from .transfers import opponent_profile
    out: dict[tuple[str, str, tuple[str, ...]], Fraction] = {}
    for level in scenario.lattice.elements:
        index: dict[tuple[str, tuple[str, ...]], int] = {}
        for agent in scenario.agents:
            others = tuple(a for a in scenario.agents if a != agent)
            for opp in product(*(scenario.structure.space(o, level) for o in others)):
                index[(agent, opp)] = len(index)
        rows, rhs = [], []
        for profile in scenario.structure.profiles(level):
            row = [Fraction(0)] * len(index)
            for agent in scenario.agents:
                row[index[(agent, opponent_profile(scenario.agents, agent, profile))]] += 1
            rows.append(row)
            rhs.append(holmstrom_welfare(scenario, profile))
        solution = _solve_exact(rows, rhs)
        if solution is None:
            return None
        for (agent, opp), k in index.items():
            out[(agent, level, opp)] = solution[k]
    return out


def holmstrom_certificate(scenario: Scenario) -> str | None:
    """A human-readable reason the decomposition is infeasible, if it is."""
    if find_g(scenario) is not None:
        return None
    from .transfers import opponent_profile
    for level in scenario.lattice.elements:
        # Re-run the single-level system to locate the inconsistency.
        index: dict[tuple[str, tuple[str, ...]], int] = {}
        for agent in scenario.agents:
            others = tuple(a for a in scenario.agents if a != agent)
            for opp in product(*(scenario.structure.space(o, level) for o in others)):
                index[(agent, opp)] = len(index)
        rows, rhs = [], []
        for profile in scenario.structure.profiles(level):
            row = [Fraction(0)] * len(index)
            for agent in scenario.agents:
                row[index[(agent, opponent_profile(scenario.agents, agent, profile))]] += 1
            rows.append(row)
            rhs.append(holmstrom_welfare(scenario, profile))
        if _solve_exact(rows, rhs) is None:
            return (f"no additive decomposition of welfare exists at level {level}: "
                    f"the {len(rows)}-equation system over {len(index)} unknowns is inconsistent")
    return "no additive decomposition of welfare exists"


def derive_y_from_g(scenario: Scenario,
                    g: dict[tuple[str, str, tuple[str, ...]], Fraction]
                    ) -> dict[tuple[str, str, tuple[str, ...]], Fraction]:
    """Scale a decomposition into budget-balancing y-tables."""
    n = len(scenario.agents)
    return {key: -(n - 1) * value for key, value in g.items()}
