import random

import pytest
from hypothesis import given, strategies as st

from generators.random_instances import random_cctlb, random_closed_cctlv, random_single_atom
from models.formula import (
    FF, NEXT_CONSTRAINT, TT, Atom, AtomicConstraint, Bind, ExistsUntil, VarConstraint, conj, dag_size,
    disj, ex, guard_with_now, neg, tree_size, until,
)
from utils.errors import FormulaSyntaxError, WellFormednessError
from utils.fragments import (
    DECIDABLE, PSEUDO_POLYNOMIAL, UNDECIDABLE, binder_environment, check_variables, classify_fragment,
    relevant_variables,
)
from utils.parser import parse_formula, print_formula


def test_parse_constrained_until():
    f = parse_formula("E (TT U{#error <= 2} lock)")
    assert f is ExistsUntil(TT, AtomicConstraint(((1, Atom("error")),), "<=", 2), Atom("lock"))


def test_parse_next_is_counting_sugar():
    assert parse_formula("EX p") is ExistsUntil(TT, NEXT_CONSTRAINT, Atom("p"))
    assert print_formula(parse_formula("EX p")) == "EX p"


def test_parse_binder():
    f = parse_formula("z[P]. EF(z >= 2)")
    assert f is Bind("z", Atom("P"), ExistsUntil(TT, None, VarConstraint(((1, "z"),), ">=", 2)))


def test_formula_level_sum_is_a_constraint_on_the_history():
    f = parse_formula("#P >= 1")
    assert f is ExistsUntil(FF, AtomicConstraint(((1, Atom("P")),), ">=", 1), TT)
    assert print_formula(f) == "#P >= 1"


def test_syntax_error_reports_position():
    with pytest.raises(FormulaSyntaxError) as excinfo:
        parse_formula("EF P &")
    assert (excinfo.value.line, excinfo.value.column) == (1, 7)

    with pytest.raises(FormulaSyntaxError) as excinfo:
        parse_formula("EF P\n& )")
    assert (excinfo.value.line, excinfo.value.column) == (2, 3)


def test_syntax_error_is_a_value_error():
    with pytest.raises(ValueError):
        parse_formula("E(P Q)")


def test_variable_bound_twice():
    with pytest.raises(WellFormednessError):
        parse_formula("z[P].z[Q].(z >= 1)")


def test_cyclic_variable_order():
    with pytest.raises(WellFormednessError):
        parse_formula("z[y >= 1].y[z >= 1].TT")


def test_mixing_variables_and_counts_is_rejected():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("z[P].(z + #P >= 1)")


def test_dur_only_inside_constraints():
    with pytest.raises(FormulaSyntaxError):
        parse_formula("DUR >= 1")


def test_sharing_and_sizes():
    f = parse_formula("EF P & EF P")
    assert dag_size(f) == 4
    assert tree_size(f) == 7


def test_smart_constructors_fold():
    p = Atom("P")
    assert conj(TT, p) is p
    assert conj(p, FF) is FF
    assert disj(FF, p) is p
    assert disj(p, TT) is TT
    assert neg(neg(p)) is p
    assert until("E", FF, p) is p
    assert ex(TT) is TT


def test_guard_with_now():
    assert guard_with_now(parse_formula("EF P")) is parse_formula("N EF P")
    assert guard_with_now(parse_formula("P & EX Q")) is parse_formula("P & N EX Q")
    assert guard_with_now(parse_formula("AG P")) is parse_formula("!N EF !P")


@pytest.mark.parametrize("text", [
    "E(P U{#Q + 2*#(!P) >= 3 & !#P = 0} Q)",
    "A(!P U{#P - 3*#Q < -1} P & Q)",
    "EG{#P <= 2} (P | Q)",
    "AG P -> EF{#TT = 1} Q",
    "z[P].z'[z > 0].EF(z' > 0 & P')",
    "N E(P U{#P >= 1 | #Q = 2} N AX Q)",
    "E(P U{DUR > -2} Q)",
    "#P + #Q = 2 | !P",
])
def test_print_parse_round_trip(text):
    f = parse_formula(text)
    assert parse_formula(print_formula(f)) is f


@given(st.integers(0, 10 ** 6))
def test_round_trip_random_formulas(seed):
    rng = random.Random(seed)
    for f in (random_cctlb(rng), random_single_atom(rng, signed=True, unit=False), random_closed_cctlv(rng)):
        assert parse_formula(print_formula(f)) is f


@pytest.mark.parametrize("text, fragment, mc_status", [
    ("EF{#P + #P' = 10} P''", "CCTL1", DECIDABLE),
    ("p & !q", "CTL", DECIDABLE),
    ("EX P", "CTL", DECIDABLE),
    ("EF{#P - 3*#P' = 10} P''", "CCTL±", PSEUDO_POLYNOMIAL),
    ("EF{#P - #Q = 0} TT", "CCTL±1", DECIDABLE),
    ("EF{2*#P >= 3} TT", "CCTL", DECIDABLE),
    ("EF{#P >= 1 & #Q <= 2} TT", "CCTLb1", DECIDABLE),
    ("EF{#P - #Q = 0 & #P >= 1} TT", "CCTLb±1", UNDECIDABLE),
    ("z[P].EF(z >= 2)", "CCTLv", DECIDABLE),
    ("z[P].EF(z - z >= 2)", "CCTLv±", UNDECIDABLE),
    ("N EF{#P >= 1} Q", "CCTLc", DECIDABLE),
    ("E(P U{DUR <= 2} Q)", "TCTL", DECIDABLE),
])
def test_classify_fragment(text, fragment, mc_status):
    descriptor = classify_fragment(parse_formula(text))
    assert descriptor.fragment_name == fragment
    assert descriptor.mc_status == mc_status


def test_descriptor_statuses():
    descriptor = classify_fragment(parse_formula("EF{#P - 3*#P' = 10} P''"))
    assert descriptor.sat_status == UNDECIDABLE
    assert descriptor.engine == "polytime"
    assert descriptor.to_dict()["flags"]["negative_coefficients"]
    assert classify_fragment(parse_formula("z[P].(z >= 1)")).engine == "cctlv"
    assert not classify_fragment(parse_formula("z >= 1")).closed


def test_boolean_connective_keeps_flags():
    plain = classify_fragment(parse_formula("EF{2*#P - #Q >= 1} TT"))
    combined = classify_fragment(parse_formula("EF{2*#P - #Q >= 1 & #P < 4} TT"))
    assert plain.negative_coefficients and combined.negative_coefficients
    assert plain.non_unit_coefficients and combined.non_unit_coefficients
    assert combined.boolean_constraints


def test_binder_environment_and_relevant_variables():
    f = parse_formula("z[P].y[z >= 1].EF(y >= 2 & lock)")
    environment, order = binder_environment(f)
    assert order == ["z", "y"]
    assert environment["y"] is parse_formula("z >= 1")
    assert relevant_variables(parse_formula("EF(y >= 2)"), environment) == {"y", "z"}
    assert relevant_variables(parse_formula("z >= 1 & P"), environment) == {"z"}
    assert relevant_variables(f, environment) == set()
    with pytest.raises(WellFormednessError):
        relevant_variables(parse_formula("w >= 1"), environment)


def test_check_variables_rejects_self_counting():
    check_variables(parse_formula("z[P].EF(z >= 1)"))
    with pytest.raises(WellFormednessError):
        check_variables(Bind("x", VarConstraint(((1, "x"),), ">=", 1), TT))
