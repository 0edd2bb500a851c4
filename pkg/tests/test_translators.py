import random

import pytest
from hypothesis import given, settings, strategies as st

from engines import translation
from engines.counting import mc_counting
from engines.ctl import mc_ctl
from generators.random_instances import random_cctlb, random_structure
from models.formula import Not, dag_size, subformulas
from translators import TRANSLATORS, binders, cctlb, cctlc, cctlv, get_translator, translate
from utils.errors import FragmentError, ResourceCapExceeded, UndecidableFragment, WellFormednessError
from utils.fragments import classify_fragment
from utils.parser import parse_formula, print_formula


def sum_family(k):
    return parse_formula(f"EF{{#p1 + #p2 = {k}}} phi")


def test_zero_sum_is_a_guarded_until():
    assert cctlb.translate(sum_family(0)) is parse_formula("E(!p1 & !p2 U phi)")


def test_sum_family_grows_linearly():
    sizes = [dag_size(cctlb.translate(sum_family(k))) for k in range(1, 30)]
    steps = [b - a for a, b in zip(sizes, sizes[1:])]
    assert all(0 < step <= 16 for step in steps)


def test_trivial_constraint_disappears():
    assert cctlb.translate(parse_formula("A(P U{#Q >= 0} R)")) is parse_formula("A(P U R)")
    assert cctlb.translate(parse_formula("E(P U{#Q < 0} R)")) is parse_formula("FF")


def test_translation_is_ctl():
    translated = translate(parse_formula("AG{#P <= 2} EF{#Q >= 1 | #P = 0} R"))
    assert classify_fragment(translated).fragment_name == "CTL"


def test_translation_folds_double_negation():
    translated = translate(parse_formula("AG{#P <= 1} !S & EF{#P >= 2 & #Q >= 2} R"))
    assert not any(isinstance(node, Not) and isinstance(node.child, Not) for node in subformulas(translated))
    assert "!!" not in print_formula(translated)


# exponent constant of the doubly exponential size bound
SIZE_BOUND_C = 3


@settings(max_examples=500)
@given(st.integers(0, 10 ** 6))
def test_counting_translation_preserves_truth(seed):
    rng = random.Random(seed)
    structure = random_structure(rng, rng.randint(1, 6))
    f = random_cctlb(rng)
    translated = cctlb.translate(f)
    assert dag_size(translated) <= 2 ** (SIZE_BOUND_C * dag_size(f) ** 2)
    assert mc_ctl(structure, translated) == mc_counting(structure, f)


def test_binders_for_counting_constraints():
    assert binders.translate(parse_formula("EF{#P >= 2} Q")) is parse_formula("y1[P].EF(Q & y1 >= 2)")
    translated = binders.translate(parse_formula("y1[Q].E(P U{#P + #Q = 1} y1 > 0)"))
    assert translated is parse_formula("y1[Q].y2[P].y3[Q].E(P U y1 > 0 & y2 + y3 = 1)")


def test_binders_reject_durations():
    with pytest.raises(FragmentError):
        binders.translate(parse_formula("E(P U{DUR <= 2} Q)"))


@given(st.integers(0, 10 ** 6))
def test_binders_preserve_truth(seed):
    rng = random.Random(seed)
    structure = random_structure(rng, rng.randint(1, 5))
    f = random_cctlb(rng, modalities=1)
    assert translation.check(structure, binders.translate(f)) == mc_counting(structure, f)


def test_variables_into_ctl(atm):
    assert cctlv.translate(parse_formula("z[P].(z = 0)")) is parse_formula("TT")
    f = parse_formula("z[error].EF(z >= 3 & lock)")
    assert mc_ctl(atm, cctlv.translate(f)).names(atm) == ["idle", "e1"]
    nested = parse_formula("z[error].y[z >= 1].EF(y >= 2 & lock)")
    assert mc_ctl(atm, cctlv.translate(nested)).names(atm) == ["idle", "e1", "e2", "e3"]


def test_variables_must_be_closed():
    with pytest.raises(WellFormednessError):
        cctlv.translate(parse_formula("EF(z >= 1)"))


def test_cumulative_blocks():
    f = parse_formula("EF{#P = 2} N EF{#P = 3} Q")
    translated = cctlc.translate(f)
    assert translated is parse_formula("c0_0[P].EF(c0_0 = 2 & c1_0[P].EF(c1_0 = 3 & Q))")
    assert cctlc.translate(parse_formula("EF{#P = 2} EF{#P = 3} Q")) is parse_formula(
        "c0_0[P].EF(c0_0 = 2 & EF(c0_0 = 3 & Q))")


def test_cumulative_blocks_order_counted_formulas_by_size():
    translated = cctlc.translate(parse_formula("EF{#(P & Q) + #P >= 1} TT"))
    assert translated is parse_formula("c0_0[P].c0_1[P & Q].EF(c0_1 + c0_0 >= 1)")


def test_fuel_cap():
    with pytest.raises(ResourceCapExceeded):
        cctlb.translate(sum_family(50), fuel=10)
    with pytest.raises(ResourceCapExceeded):
        cctlv.translate(parse_formula("z[P].EF(z >= 50)"), fuel=10)


def test_translate_routes_by_fragment():
    assert classify_fragment(translate(parse_formula("N EF{#P >= 1} Q"))).fragment_name == "CTL"
    assert classify_fragment(translate(parse_formula("z[P].EF(z >= 1)"))).fragment_name == "CTL"
    with pytest.raises(UndecidableFragment):
        translate(parse_formula("EF{#P - #Q = 0 & #P >= 1} TT"))
    with pytest.raises(FragmentError):
        translate(parse_formula("EF{#P - 2*#Q = 0} TT"))
    with pytest.raises(FragmentError):
        translate(parse_formula("E(P U{DUR <= 2} Q)"))


def test_registry():
    assert set(TRANSLATORS) == {"cctlb-ctl", "cctlb-cctlv", "cctlv-ctl", "cctlc-cctlv"}
    assert get_translator("cctlb-ctl") is cctlb
    with pytest.raises(ValueError, match="No translator available"):
        get_translator("ltl-ctl")
