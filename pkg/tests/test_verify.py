import dataclasses
from fractions import Fraction
from itertools import product

import pytest

from elabmech import engine, verify
from elabmech.fixtures import fixture
from elabmech.generate import generate_scenario
from elabmech.scenario import parse_scenario
from elabmech.transfers import Mechanism, SchemeConfig


def test_efficiency_holds_on_fixtures():
    for name in ("example1", "example2", "example4r"):
        result = verify.check_efficiency(fixture(name))
        assert result.holds and result.checked > 0


def test_efficiency_catches_an_injected_suboptimal_choice():
    s = fixture("example2")

    class Broken:
        def __getattr__(self, attr):
            return getattr(s.outcomes, attr)

        def efficient_outcome(self, profile):
            return "win1"  # ignore welfare entirely

    sabotaged = dataclasses.replace(s, outcomes=Broken())
    result = verify.check_efficiency(sabotaged)
    assert not result.holds
    assert any("welfare gap" in w.description for w in result.witnesses)


def test_pooled_implementation_example2_clarke_serves_the_truly_aware_value():
    s = fixture("example2")
    result = verify.check_pooled_implementation(s, s.scheme)
    assert result.holds
    # and the main draw allocates to bidder 2 at the pooled level
    t = engine.run(s, s.draw(), "hi")
    assert s.outcomes.efficient_outcome(t.final) == "win2"


def test_pooled_implementation_static_fails_on_example2():
    s = fixture("example2")
    static = dataclasses.replace(s.scheme, kind="static_vickrey")
    result = verify.check_pooled_implementation(s, static)
    assert not result.holds
    witness = result.witnesses[0]
    assert witness.replay["implemented"] == "win1"
    assert witness.replay["target"] == "win2"


def test_pooled_implementation_with_common_full_awareness_reduces_to_efficiency():
    s = fixture("example2")
    result = verify.check_pooled_implementation(s, s.scheme)
    assert result.holds
    assert verify.check_efficiency(s).holds


def test_dominance_example2_and_premium_knife_edge():
    s = fixture("example2")
    assert verify.check_conditional_dominance(s, s.scheme).holds
    # revealing or concealing leaves the discloser at utility exactly 1
    mech = Mechanism(s, s.scheme)
    truth = engine.run(s, s.draw(), "hi")
    assert mech.utility(truth, "a1", "a1hi2") == 1
    conceal = engine.run(s, s.draw(), "hi", {"a1": lambda info: "a1lo2"})
    assert mech.utility(conceal, "a1", "a1hi2") == 1


def test_dominance_fails_without_the_premium_term():
    s = fixture("example2")
    ablated = dataclasses.replace(s.scheme, ablate_premium=True)
    result = verify.check_conditional_dominance(s, ablated)
    assert not result.holds
    witness = result.witnesses[0]
    assert witness.replay["agent"] == "a1"
    gain = (Fraction(witness.replay["deviation_utility"])
            - Fraction(witness.replay["truth_utility"]))
    assert gain == 1


def test_dominance_witness_replays_to_the_same_gap():
    s = fixture("example2")
    ablated = dataclasses.replace(s.scheme, ablate_premium=True)
    witness = verify.check_conditional_dominance(s, ablated).witnesses[0].replay
    mech = Mechanism(s, ablated)
    level = witness["level"]
    state = engine.initial_state(s, level, tuple(witness["profile"]),
                                 tuple(witness["awareness"]))
    eval_type = witness["perceived"]

    def replay(stages):
        st = state
        for reports in stages:
            st = engine.advance(s, st, tuple(reports))
        return engine.transcript(st)

    u_truth = mech.utility(replay(witness["truth_stages"]), "a1", eval_type)
    u_dev = mech.utility(replay(witness["deviation_stages"]), "a1", eval_type)
    assert u_truth == Fraction(witness["truth_utility"])
    assert u_dev == Fraction(witness["deviation_utility"])
    assert u_dev > u_truth


def _direct_plan_space_dominance_oracle(scenario, scheme):
    """Independent dominance oracle for two-agent scenarios.

    Quantifies over the full space of opponent plan objects (final report
    plus a weakly increasing level schedule), a superset of the plans the
    checker realizes on truthful branches, and compares the truthful play
    against every deviating continuation at every truthfully reached
    information set.
    """
    lattice = scenario.lattice
    structure = scenario.structure
    mech = Mechanism(scenario, scheme)
    agents = structure.agents
    assert len(agents) == 2
    horizon = engine.max_stages(scenario)

    def schedules(start_levels, final_level):
        for first in start_levels:
            chains = [[first]]
            for _ in range(horizon - 1):
                chains = [c + [nxt] for c in chains
                          for nxt in lattice.elements if lattice.leq(c[-1], nxt)]
            for chain in chains:
                if any(lattice.leq(final_level, lv) for lv in chain):
                    yield tuple(chain)

    violations = []
    for agent in agents:
        other = next(a for a in agents if a != agent)
        j = structure.agent_index(other)
        i = structure.agent_index(agent)
        for level in lattice.elements:
            for own_level in lattice.down_set(level):
                for opp_level in lattice.down_set(level):
                    if lattice.join(own_level, opp_level) != level:
                        continue
                    for own_true in structure.space(agent, level):
                        for t_hat in structure.space(other, level):
                            for schedule in schedules(lattice.down_set(opp_level),
                                                      structure.level_of(other, t_hat)):
                                plan_reports = tuple(
                                    structure.project(other, t_hat,
                                                      lattice.meet(lv, structure.level_of(
                                                          other, t_hat)))
                                    for lv in schedule)
                                policy = engine.plan_policy(other, plan_reports, scenario)
                                profile = tuple(own_true if a == agent else t_hat
                                                for a in agents)
                                awareness = tuple(own_level if a == agent else opp_level
                                                  for a in agents)
                                state = engine.initial_state(scenario, level,
                                                             profile, awareness)
                                path = []
                                while not state.stopped:
                                    path.append(state)
                                    reports = [None, None]
                                    reports[i] = engine.truth_report(state, agent, agents)
                                    reports[j] = policy(scenario, state, other)
                                    state = engine.advance(scenario, state, tuple(reports))
                                truth = engine.transcript(state)
                                for node in path:
                                    if structure.level_of(agent,
                                                          node.perceived[i]) != level:
                                        continue
                                    eval_type = node.perceived[i]
                                    u_truth = mech.utility(truth, agent, eval_type)
                                    for dev in engine.iter_completions(
                                            scenario, node,
                                            {agent: engine.FREE, other: policy}):
                                        u_dev = mech.utility(engine.transcript(dev),
                                                             agent, eval_type)
                                        if u_dev > u_truth:
                                            violations.append((agent, u_truth, u_dev))
    return violations


def test_dominance_checker_agrees_with_direct_plan_space_oracle():
    s = fixture("example2")
    assert not _direct_plan_space_dominance_oracle(s, s.scheme)
    assert verify.check_conditional_dominance(s, s.scheme).holds
    ablated = dataclasses.replace(s.scheme, ablate_premium=True)
    assert _direct_plan_space_dominance_oracle(s, ablated)
    assert not verify.check_conditional_dominance(s, ablated).holds


def test_dominance_vacuous_for_single_agent_single_outcome():
    solo = parse_scenario("""
[lattice]
elements: l0
[agents]
agents: only
[types]
space: only l0 t
[projections]
[outcomes]
outcomes: x
available: l0 x
[valuations]
value: only t x 5
[scheme]
kind: clarke
""")
    result = verify.check_conditional_dominance(solo, solo.scheme)
    assert result.holds


def test_dominance_rejects_static_scheme():
    s = fixture("example2")
    static = dataclasses.replace(s.scheme, kind="static_vickrey")
    with pytest.raises(ValueError):
        verify.check_conditional_dominance(s, static)


def test_stage_bound_on_fixtures():
    for name in ("example1", "example2", "example4r"):
        result = verify.check_stage_bound(fixture(name))
        assert result.holds


def test_stage_bound_common_awareness_stops_at_two():
    s = fixture("example2")
    from elabmech.typespace import NatureDraw
    t = engine.run(s, NatureDraw(("a1hi1", "a2hi2"), ("hi", "hi")), "hi")
    assert t.n_stages == 2


def test_no_deficit_example1_with_surplus_80():
    s = fixture("example1")
    result = verify.check_budget(s, s.scheme, "no_deficit")
    assert result.holds
    t = engine.run(s, s.draw(), "abc")
    assert Mechanism(s, s.scheme).report(t).operator_balance == 80


def test_no_deficit_clarke_over_generated_scenarios():
    for k in range(10):
        s = generate_scenario(41, k)
        assert verify.check_budget(s, s.scheme, "no_deficit").holds


def test_budget_balance_violations_are_pinpointed():
    s = fixture("example2")
    y = {}
    for agent in s.agents:
        others = [a for a in s.agents if a != agent]
        for level in s.lattice.elements:
            for opp in product(*(s.structure.space(o, level) for o in others)):
                y[(agent, level, opp)] = Fraction(7 if agent == "a1" else 0)
    adversarial = SchemeConfig(kind="groves", y_tables=y)
    result = verify.check_budget(s, adversarial, "balance")
    assert not result.holds
    witness = result.witnesses[0]
    assert "sum" in witness.replay and Fraction(witness.replay["sum"]) != 0


def test_holmstrom_roundtrip_on_separable_welfare():
    sep = parse_scenario("""
[lattice]
elements: lo hi
edge: lo hi
[agents]
agents: a1 a2
[types]
space: a1 lo u1 u2
space: a1 hi v1 v2
space: a2 lo w1
space: a2 hi z1 z2
[projections]
map: a1 hi lo v1 u1
map: a1 hi lo v2 u2
map: a2 hi lo z1 w1
map: a2 hi lo z2 w1
[outcomes]
outcomes: only
available: lo only
available: hi only
[valuations]
value: a1 u1 only 1
value: a1 u2 only 2
value: a1 v1 only 3
value: a1 v2 only 4
value: a2 w1 only 5
value: a2 z1 only 6
value: a2 z2 only 7
[scheme]
kind: clarke
""", name="separable")
    g = verify.find_g(sep)
    assert g is not None
    assert verify.check_holmstrom(sep, g).holds
    y = verify.derive_y_from_g(sep, g)
    groves = SchemeConfig(kind="groves", y_tables=y)
    assert verify.check_budget(sep, groves, "balance").holds
    assert verify.holmstrom_certificate(sep) is None


def test_holmstrom_single_agent_degenerate_decomposition():
    solo = parse_scenario("""
[lattice]
elements: l0
[agents]
agents: only
[types]
space: only l0 t u
[projections]
[outcomes]
outcomes: x
available: l0 x
[valuations]
value: only t x 5
value: only u x 5
[scheme]
kind: clarke
""")
    # welfare is type-independent, so a constant works
    assert verify.find_g(solo) is not None
    varying = parse_scenario("""
[lattice]
elements: l0
[agents]
agents: only
[types]
space: only l0 t u
[projections]
[outcomes]
outcomes: x
available: l0 x
[valuations]
value: only t x 5
value: only u x 6
[scheme]
kind: clarke
""")
    assert verify.find_g(varying) is None


def test_holmstrom_generic_auction_is_infeasible_with_certificate():
    generic = parse_scenario("""
[lattice]
elements: l0
[agents]
agents: a1 a2
[types]
space: a1 l0 p q
space: a2 l0 r s
[projections]
[outcomes]
outcomes: w1 w2
available: l0 w1 w2
[valuations]
value: a1 p w1 1
value: a1 q w1 3
value: a1 p w2 0
value: a1 q w2 0
value: a2 r w2 2
value: a2 s w2 5/2
value: a2 r w1 0
value: a2 s w1 0
[scheme]
kind: clarke
""", name="generic")
    assert verify.find_g(generic) is None
    certificate = verify.holmstrom_certificate(generic)
    assert certificate is not None and "inconsistent" in certificate


def test_participation_ex_post_fails_on_example1_for_the_winning_seller():
    s = fixture("example1")
    result = verify.check_participation(s, s.scheme, "ex_post")
    assert not result.holds
    assert any(w.replay["agent"] == "s1" and Fraction(w.replay["utility"]) < 0
               for w in result.witnesses)


def test_participation_ex_ante_holds_on_nonnegative_generated_scenarios():
    for k in range(10):
        s = generate_scenario(43, k)
        assert verify.check_nonnegative_valuations(s).holds
        assert verify.check_participation(s, s.scheme, "ex_ante_anticipated").holds


def test_participation_example4r_ex_ante_holds_ex_post_fails_strictly():
    s = fixture("example4r")
    assert verify.check_participation(s, s.scheme, "ex_ante_anticipated").holds
    result = verify.check_participation(s, s.scheme, "ex_post")
    assert not result.holds
    interim = [w for w in result.witnesses if w.replay["stage"] > 1]
    assert interim and any(Fraction(w.replay["utility"]) == -1 for w in interim)


def test_participation_witness_replays_to_the_same_utility():
    s = fixture("example4r")
    witness = next(w for w in verify.check_participation(s, s.scheme, "ex_post").witnesses
                   if w.replay["stage"] > 1).replay
    state = engine.initial_state(s, witness["level"], tuple(witness["profile"]),
                                 tuple(witness["awareness"]))
    nodes = [state]
    while not state.stopped:
        reports = tuple(engine.truth_report(state, a, s.agents) for a in s.agents)
        state = engine.advance(s, state, reports)
        if not state.stopped:
            nodes.append(state)
    node = nodes[witness["stage"] - 1]
    i = s.structure.agent_index(witness["agent"])
    assert node.perceived[i] == witness["perceived"]
    u = Mechanism(s, s.scheme).utility(engine.transcript(state), witness["agent"],
                                       witness["perceived"])
    assert u == Fraction(witness["utility"]) < 0


def test_participation_rspa_sellers_never_regret():
    for k in range(8):
        s = generate_scenario(47, k, procurement=True)
        assert verify.check_participation(s, s.scheme, "ex_post").holds


def test_nonnegative_valuations():
    assert verify.check_nonnegative_valuations(fixture("example2")).holds
    result = verify.check_nonnegative_valuations(fixture("example1"))
    assert not result.holds
    assert any(Fraction(w.replay["value"]) < 0 and w.replay["outcome"] == "produce1"
               for w in result.witnesses)


def test_all_zero_valuations_pass_nonnegativity():
    zero = parse_scenario("""
[lattice]
elements: l0
[agents]
agents: a1 a2
[types]
space: a1 l0 p
space: a2 l0 r
[projections]
[outcomes]
outcomes: x
available: l0 x
[valuations]
value: a1 p x 0
value: a2 r x 0
[scheme]
kind: clarke
""")
    assert verify.check_nonnegative_valuations(zero).holds


def test_exact_solver_on_small_systems():
    one = Fraction(1)
    solution = verify._solve_exact([[one, one], [one, -one]], [Fraction(3), Fraction(1)])
    assert solution == [Fraction(2), Fraction(1)]
    assert verify._solve_exact([[one], [one]], [Fraction(1), Fraction(2)]) is None
    underdetermined = verify._solve_exact([[one, one]], [Fraction(5)])
    assert underdetermined is not None and sum(underdetermined) == 5
