from fractions import Fraction

import pytest

from elabmech.fixtures import fixture
from elabmech.generate import generate_scenario
from elabmech.outcomes import MissingValuation

FINAL1 = ("s1t80", "s2t86", "buabc")


def test_welfare_of_final_elaborated_profile():
    s = fixture("example1")
    assert s.outcomes.welfare("produce1", FINAL1) == Fraction(20)  # 100 - 80 + 0
    assert s.outcomes.welfare("idle", FINAL1) == 0


def test_welfare_matches_raw_table_sum_on_generated_scenarios():
    for k in range(8):
        s = generate_scenario(3, k)
        for level in s.lattice.elements:
            for profile in s.structure.profiles(level):
                for x0 in s.outcomes.available[level]:
                    expected = sum(s.outcomes.valuations[(a, t, x0)]
                                   for a, t in zip(s.agents, profile))
                    assert s.outcomes.welfare(x0, profile) == expected


def test_efficient_outcome_example1():
    s = fixture("example1")
    assert s.outcomes.efficient_outcome(FINAL1) == "produce1"


def test_efficient_outcome_single_candidate():
    s = generate_scenario(3, 0)
    level = s.lattice.bottom
    lone = s.outcomes.available[level]
    if len(lone) == 1:
        profile = next(s.structure.profiles(level))
        assert s.outcomes.efficient_outcome(profile) == lone[0]


def test_efficient_outcome_matches_exhaustive_argmax():
    for k in range(8):
        s = generate_scenario(5, k)
        for level in s.lattice.elements:
            for profile in s.structure.profiles(level):
                chosen = s.outcomes.efficient_outcome(profile)
                best = max(s.outcomes.welfare(x, profile)
                           for x in s.outcomes.available[level])
                assert s.outcomes.welfare(chosen, profile) == best


def test_restricted_outcomes_example1():
    s = fixture("example1")
    assert s.outcomes.restricted_efficient_outcome("buyer", FINAL1) == "idle"
    assert s.outcomes.restricted_efficient_outcome("s1", FINAL1) == "produce1"
    assert s.outcomes.restricted_efficient_outcome("s2", FINAL1) == "produce1"


def test_restricted_outcome_constant_objective_falls_to_tie_break():
    # a lone agent has no opponents; every outcome scores zero
    from elabmech.scenario import parse_scenario
    s = parse_scenario("""
[lattice]
elements: l0
[agents]
agents: solo
[types]
space: solo l0 t
[projections]
[outcomes]
outcomes: y x
available: l0 y x
tie_break: x y
[valuations]
value: solo t x 4
value: solo t y 9
[scheme]
kind: clarke
""")
    assert s.outcomes.restricted_efficient_outcome("solo", ("t",)) == "x"
    assert s.outcomes.efficient_outcome(("t",)) == "y"


def test_opponents_welfare_inequality_at_restricted_argmax():
    for k in range(8):
        s = generate_scenario(9, k)
        top = s.lattice.top
        for profile in s.structure.profiles(top):
            eff = s.outcomes.efficient_outcome(profile)
            for agent in s.agents:
                restricted = s.outcomes.restricted_efficient_outcome(agent, profile)
                assert (s.outcomes.opponents_welfare(agent, restricted, profile)
                        >= s.outcomes.opponents_welfare(agent, eff, profile))


def test_outputs_deterministic():
    s = fixture("example1")
    first = s.outcomes.efficient_outcome(FINAL1)
    assert all(s.outcomes.efficient_outcome(FINAL1) == first for _ in range(3))


def test_missing_valuation_raises():
    s = fixture("example1")
    with pytest.raises(MissingValuation):
        s.outcomes.value("s1", "s1t80", "no_such_outcome")


def test_valuations_are_exact_fractions():
    s = fixture("example1")
    assert all(isinstance(v, Fraction) for v in s.outcomes.valuations.values())
