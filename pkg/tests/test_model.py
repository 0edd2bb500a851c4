import numpy as np
import pytest

from models.kripke import (
    ALL_ONE, ARBITRARY, MINUS_ZERO_ONE, ZERO_ONE, DurationalKS, KripkeStructure, RunPrefix, validate_run,
)
from utils.errors import ModelFormatError
from utils.model_format import parse_model, print_model

WEIGHTED = """
ap P
state a { P }
state b { }
trans a -[2]-> b
trans b -[-1]-> a
trans b -[0]-> b
"""


def test_parse_labels_and_successors(atm):
    assert atm.names == ("idle", "e1", "e2", "e3", "lock")
    assert atm.successors[atm.state_index("e3")] == (atm.state_index("lock"),)
    assert list(atm.holds("error")) == [False, True, True, True, False]
    assert atm.declared_ap == frozenset({"error", "lock"})
    assert atm.predecessors[atm.state_index("lock")] == (3, 4)


def test_print_parse_round_trip(atm):
    again = parse_model(print_model(atm))
    assert again.names == atm.names
    assert again.successors == atm.successors
    assert again.labels == atm.labels


def test_comments_and_unicode_minus():
    d = parse_model("state a { } # start\ntrans a −[−1]-> a\n")
    assert d.transitions == ((0, -1, 0),)


def test_weighted_model():
    d = parse_model(WEIGHTED)
    assert isinstance(d, DurationalKS)
    assert d.weight_class == ARBITRARY
    assert d.weights == [-1, 0, 2]
    assert d.out_edges[1] == ((-1, 0), (0, 1))
    assert d.weight_matrix(2)[0, 1] and not d.weight_matrix(2)[1, 0]
    assert type(d.underlying()) is KripkeStructure
    assert d.negated().transitions == ((0, -2, 1), (1, 0, 1), (1, 1, 0))
    assert "-[2]->" in print_model(d)


@pytest.mark.parametrize("weights, expected", [
    ((1, 1), ALL_ONE),
    ((0, 1), ZERO_ONE),
    ((-1, 1), MINUS_ZERO_ONE),
    ((3, 1), ARBITRARY),
])
def test_weight_class(weights, expected):
    d = DurationalKS(["a"], [(0, w, 0) for w in weights], [set()])
    assert d.weight_class == expected


@pytest.mark.parametrize("text, message", [
    ("state a { }\nstate a { }\ntrans a -> a", "duplicate state a"),
    ("ap P\nstate a { Q }\ntrans a -> a", "undeclared proposition Q"),
    ("state a { }\ntrans a -> a\ntrans a -[1]-> a", "cannot mix"),
    ("state a { }\ntrans a -> b", "unknown state b"),
    ("state a { }\nstate b { }\ntrans a -> b", "relation not total at b"),
    ("state a { }\nedge a a", "cannot parse line"),
    ("state a { E }\ntrans a -> a", "proposition 'E' cannot be named in a formula"),
    ("ap P TT\nstate a { P }\ntrans a -> a", "proposition 'TT' cannot be named in a formula"),
])
def test_malformed_models(text, message):
    with pytest.raises(ModelFormatError, match=message):
        parse_model(text)


def test_error_reports_line():
    with pytest.raises(ModelFormatError) as excinfo:
        parse_model("state a { }\nstate a { }\ntrans a -> a")
    assert excinfo.value.line == 2


def test_dict_round_trip(atm):
    again = KripkeStructure.from_dict(atm.to_dict())
    assert again.successors == atm.successors
    assert again.labels == atm.labels
    d = parse_model(WEIGHTED)
    again = KripkeStructure.from_dict(d.to_dict())
    assert isinstance(again, DurationalKS)
    assert again.transitions == d.transitions


def test_from_dict_unknown_state():
    data = {"states": [{"name": "a"}], "transitions": [{"source": "a", "target": "b"}]}
    with pytest.raises(ModelFormatError):
        KripkeStructure.from_dict(data)


def test_state_index(atm):
    assert atm.state_index("e2") == 2
    assert atm.state_index(4) == 4
    with pytest.raises(ModelFormatError):
        atm.state_index("nowhere")
    with pytest.raises(ModelFormatError):
        atm.state_index(5)


def test_validate_run(atm):
    assert validate_run(atm, ["idle", "e1", "e2"])
    assert validate_run(atm, [])
    assert not validate_run(atm, ["idle", "e2"])
    assert not validate_run(atm, ["idle", "nowhere"])
    assert validate_run(atm, RunPrefix([3, 4], loop_start=1))
    assert not validate_run(atm, RunPrefix([0, 1], loop_start=0))


def test_run_prefix_counts_and_weights():
    d = parse_model(WEIGHTED)
    run = RunPrefix([0, 1, 0, 1])
    assert run.count(d.holds("P")) == 2
    assert run.count({1}) == 2
    assert run.weight(d) == 2 - 1 + 2
    assert RunPrefix([0, 1], weights=[7]).weight() == 7
    assert run.prefix(2) == RunPrefix([0, 1])
    assert RunPrefix([0, 1], loop_start=1).names(d) == ["a", "(", "b", ")^w"]


def test_holds_is_a_mask(loop):
    assert isinstance(loop.holds("P"), np.ndarray)
    assert loop.holds("P").tolist() == [True]
