from fractions import Fraction

import pytest

from elabmech.fixtures import FIXTURES, fixture
from elabmech.generate import generate_scenario
from elabmech.scenario import (ParseError, ValidationError, parse_scenario,
                               serialize_scenario)

MINIMAL = """
[lattice]
elements: l0
[agents]
agents: solo
[types]
space: solo l0 t
[projections]
[outcomes]
outcomes: x
available: l0 x
[valuations]
value: solo t x 1
[scheme]
kind: clarke
"""


def test_fixtures_load_with_expected_shape():
    s = fixture("example1")
    assert s.agents == ("s1", "s2", "buyer")
    assert len(s.lattice.elements) == 8
    assert s.lattice.top == "abc"
    assert s.scheme.kind == "clarke"
    assert "main" in s.draws

    s2 = fixture("example2")
    assert s2.agents == ("a1", "a2")
    assert s2.outcomes.tie_break == ("win1", "win2")

    with pytest.raises(KeyError):
        fixture("nope")


def test_minimal_single_agent_file_loads():
    s = parse_scenario(MINIMAL)
    assert s.agents == ("solo",)
    assert s.draws == {}


def test_missing_projection_edge_reported_with_names():
    text = FIXTURES["example2"].replace("map: a2 hi lo a2hi3 a2lo\n", "")
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert any("a2" in v and "hi -> lo" in v for v in err.value.violations)


def test_missing_valuation_entry_reported():
    text = FIXTURES["example2"].replace("value: a2 a2hi3 win1 0\n", "")
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert any("missing valuation (a2, a2hi3, win1)" in v for v in err.value.violations)


def test_roundtrip_fixtures():
    for name in FIXTURES:
        s = fixture(name)
        text = serialize_scenario(s)
        again = parse_scenario(text, name=name)
        assert serialize_scenario(again) == text


def test_roundtrip_generated():
    for k in range(6):
        for procurement in (False, True):
            s = generate_scenario(13, k, procurement=procurement)
            text = serialize_scenario(s)
            assert serialize_scenario(parse_scenario(text)) == text


def test_rational_parsing():
    text = MINIMAL.replace("value: solo t x 1", "value: solo t x -7/3")
    s = parse_scenario(text)
    assert s.outcomes.value("solo", "t", "x") == Fraction(-7, 3)
    with pytest.raises(ParseError):
        parse_scenario(MINIMAL.replace("value: solo t x 1", "value: solo t x nope"))


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_scenario("stray: line\n")
    with pytest.raises(ParseError):
        parse_scenario("[lattice]\nnot a record\n")
    with pytest.raises(ParseError):
        parse_scenario("[mystery]\nkey: value\n")
    with pytest.raises(ParseError):
        parse_scenario("[lattice]\nedge: just_one\n")


def test_lattice_violations_surface_at_load():
    bad = MINIMAL.replace("elements: l0", "elements: l0 l1")  # l1 incomparable
    with pytest.raises(ValidationError) as err:
        parse_scenario(bad)
    assert any("lattice" in v for v in err.value.violations)


def test_declared_top_must_match_computed():
    text = FIXTURES["example2"].replace("top: hi", "top: lo")
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert any("declared top" in v for v in err.value.violations)


def test_groves_scheme_requires_complete_y_tables():
    text = MINIMAL.replace("kind: clarke", "kind: groves")
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert any("missing y entry" in v for v in err.value.violations)
    complete = text.replace("kind: groves", "kind: groves\ny: solo l0 2")
    s = parse_scenario(complete)
    assert s.scheme.y_tables[("solo", "l0", ())] == 2


def test_rspa_needs_two_sellers_at_load():
    base = FIXTURES["example2"]
    with_rspa = base.replace("kind: clarke", "kind: rspa\nbuyer: a2\nsupply: a1 win1")
    with pytest.raises(ValidationError) as err:
        parse_scenario(with_rspa)
    assert any("two sellers" in v for v in err.value.violations)


def test_rspa_rejects_nonzero_off_supply_values():
    from test_transfers import PROCUREMENT
    text = PROCUREMENT.replace("value: s1 s1lo supply_s2 0", "value: s1 s1lo supply_s2 3")
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert any("off own supply" in v for v in err.value.violations)


def test_rspa_requires_supply_outcomes_available_everywhere():
    from test_transfers import PROCUREMENT
    text = PROCUREMENT.replace("available: lo supply_s1 supply_s2 idle",
                               "available: lo supply_s1 idle")
    with pytest.raises(ValidationError) as err:
        parse_scenario(text)
    assert any("unavailable at level lo" in v for v in err.value.violations)
