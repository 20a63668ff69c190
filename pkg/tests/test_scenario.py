import json

import pytest
from hypothesis import given, strategies as st

from lanchester.models import AimedParams, ForceState, MixedParams, MixedState
from lanchester.scenario import (
    DivideTactic,
    ScenarioError,
    SupportTactic,
    dump_scenario,
    parse_scenario,
    scenario_from_dict,
)

TWO_TO_ONE = '{"model":"aimed","params":{"r":1,"g":3},"initial":{"red":2,"green":1}}'


def test_two_to_one_parses():
    sc = parse_scenario(TWO_TO_ONE)
    assert sc.model == AimedParams(1, 3)
    assert sc.initial == ForceState(2, 1)
    assert sc.tactics is None and sc.precision == 9


def test_negative_rate_names_field():
    with pytest.raises(ScenarioError) as info:
        parse_scenario('{"model":"aimed","params":{"r":-1,"g":3},"initial":{"red":2,"green":1}}')
    assert info.value.path == "params.r"


def test_mixed_needs_split_green():
    with pytest.raises(ScenarioError) as info:
        parse_scenario('{"model":"mixed","params":{"r":1,"g1":1,"g2":2},"initial":{"red":2,"green":1}}')
    assert info.value.path.startswith("initial")
    assert "green1" in str(info.value)


def test_malformed_json_reports_position():
    with pytest.raises(ScenarioError, match="line 2, column"):
        parse_scenario('{"model": "aimed",\n  "params": }')


@pytest.mark.parametrize(
    "doc,path",
    [
        ({"model": "laser", "params": {}, "initial": {}}, "model"),
        ({"model": "aimed", "params": {"r": 1}, "initial": {"red": 1, "green": 1}}, "params.g"),
        ({"model": "aimed", "params": {"r": 1, "g": 1, "x": 0}, "initial": {"red": 1, "green": 1}}, "params.x"),
        ({"model": "aimed", "params": {"r": 1, "g": 1}, "initial": {"red": -1, "green": 1}}, "initial.red"),
        ({"model": "aimed", "params": {"r": 1, "g": 1}, "initial": {"red": 1, "green": 1}, "precision": 18}, "precision"),
        ({"model": "aimed", "params": {"r": 1, "g": 1}, "initial": {"red": 1, "green": 1}, "sim": {"dt": 0}}, "sim.dt"),
        (
            {"model": "aimed", "params": {"r": 1, "g": 1}, "initial": {"red": 1, "green": 1},
             "tactics": {"support": {"n": 10, "kappa": 2, "f0": 1}}},
            "tactics.support.kappa",
        ),
    ],
)
def test_validation_paths(doc, path):
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(doc)
    assert info.value.path == path


def test_full_document():
    sc = scenario_from_dict(
        {
            "model": "mixed",
            "params": {"r": 1, "g1": 1, "g2": 3},
            "initial": {"red": 5, "green1": 1, "green2": 2},
            "sim": {"dt": 1e-3, "t_max": 5},
            "tactics": {"support": {"n": 100, "kappa": 0.5, "f0": 2}},
            "precision": 12,
        }
    )
    assert sc.model == MixedParams(1, 1, 3) and sc.initial == MixedState(5, 1, 2)
    assert sc.sim.dt == 1e-3 and sc.sim.stop_threshold is None
    assert sc.tactics == SupportTactic(100, 0.5, 2.0)


pos = st.floats(1e-6, 1e6, allow_nan=False, allow_infinity=False)
nonneg = st.floats(0, 1e6, allow_nan=False, allow_infinity=False)
real = st.floats(-5, 5, allow_nan=False)

params = st.one_of(
    st.fixed_dictionaries({"r": pos, "g": pos}).map(lambda p: ("aimed", p)),
    st.fixed_dictionaries({"r": pos, "g": pos}).map(lambda p: ("constant", p)),
    st.fixed_dictionaries({"r": pos, "g": pos, "area_red": pos, "area_green": pos}).map(lambda p: ("unaimed", p)),
    st.fixed_dictionaries({"r": pos, "g": pos, "p": real, "q": real}).map(lambda p: ("bracken", p)),
    st.fixed_dictionaries({"r": pos, "g": pos, "red_ref": pos}).map(lambda p: ("asymmetric", p)),
    st.fixed_dictionaries({"r": pos, "g1": pos, "g2": pos}).map(lambda p: ("mixed", p)),
)


@st.composite
def documents(draw):
    kind, p = draw(params)
    if kind == "mixed":
        initial = draw(st.fixed_dictionaries({"red": nonneg, "green1": nonneg, "green2": nonneg}))
    else:
        initial = draw(st.fixed_dictionaries({"red": nonneg, "green": nonneg}))
    doc = {"model": kind, "params": p, "initial": initial}
    if draw(st.booleans()):
        doc["sim"] = draw(st.fixed_dictionaries({}, optional={"dt": st.floats(1e-6, 1e-3), "stop_threshold": nonneg}))
    tactic = draw(st.sampled_from([None, "divide", "support"]))
    if tactic == "divide":
        doc["tactics"] = {"divide": draw(st.integers(1, 50))}
    elif tactic == "support":
        doc["tactics"] = {
            "support": {"n": draw(st.integers(1, 10**6)), "kappa": draw(st.floats(0, 1.99)), "f0": draw(pos)}
        }
    if draw(st.booleans()):
        doc["precision"] = draw(st.integers(1, 17))
    return doc


@given(documents())
def test_round_trip(doc):
    sc = parse_scenario(json.dumps(doc))
    text = dump_scenario(sc)
    again = parse_scenario(text)
    assert again == sc
    assert dump_scenario(again) == text


def test_divide_tactic():
    sc = parse_scenario(TWO_TO_ONE[:-1] + ',"tactics":{"divide":2}}')
    assert sc.tactics == DivideTactic(2)
