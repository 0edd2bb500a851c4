import random

import pytest
from hypothesis import given, strategies as st

from engines import translation
from engines.counting import CounterProduct, counting_witness, mc_counting, prefix_satisfies
from engines.ctl import Labeler, mc_ctl
from generators.random_instances import random_cctlb, random_structure
from models.formula import COMPARATORS, TT, Atom, AtomicConstraint, ExistsUntil, compare
from models.kripke import RunPrefix, validate_run
from utils.errors import FragmentError, ResourceCapExceeded
from utils.parser import parse_formula


def test_atm_lock_needs_three_errors(atm):
    satisfying = mc_counting(atm, parse_formula("!EF{#error <= 2} lock"))
    assert satisfying.names(atm) == ["idle", "e1"]
    assert atm.state_index("e2") not in satisfying


def test_prefix_is_strict(atm):
    # the target state itself is not counted
    assert mc_counting(atm, parse_formula("EF{#error = 0} error")).names(atm) == ["idle", "e1", "e2", "e3"]
    assert mc_counting(atm, parse_formula("EF{#lock >= 1} lock")).names(atm) == list(atm.names)
    assert mc_counting(atm, parse_formula("EF{#lock = 0} lock")).names(atm) == list(atm.names)
    assert mc_counting(atm, parse_formula("AF{#TT = 2} error")).names(atm) == ["idle", "e1"]


@given(st.integers(0, 10 ** 6))
def test_trivial_constraint_is_plain_until(seed):
    rng = random.Random(seed)
    structure = random_structure(rng, rng.randint(1, 6))
    assert mc_counting(structure, parse_formula("EF{#TT >= 0} P")) == mc_ctl(structure, parse_formula("EF P"))
    assert mc_counting(structure, parse_formula("A(Q U{#P >= 0} P)")) == mc_ctl(structure, parse_formula("A(Q U P)"))


@given(st.integers(0, 10 ** 6))
def test_boolean_constraint_against_ctl(seed):
    rng = random.Random(seed)
    structure = random_structure(rng, rng.randint(1, 6))
    assert (mc_counting(structure, parse_formula("EF{#P >= 1 & #Q >= 1} TT"))
            == mc_ctl(structure, parse_formula("EF(P & EF Q) | EF(Q & EF P)")))
    assert (mc_counting(structure, parse_formula("AF{#P >= 2} TT"))
            == mc_ctl(structure, parse_formula("AF(P & AX AF P)")))


@given(st.integers(0, 10 ** 6))
def test_agrees_with_ctl_translation(seed):
    rng = random.Random(seed)
    structure = random_structure(rng, rng.randint(1, 5))
    f = random_cctlb(rng)
    assert mc_counting(structure, f) == translation.check(structure, f)


def test_prefix_satisfies(atm):
    c = parse_formula("EF{#error = 2 & #(!error) = 1} TT").constraint
    assert prefix_satisfies(atm, RunPrefix([0, 1, 2]), c)
    assert not prefix_satisfies(atm, RunPrefix([0, 1, 2, 3]), c)
    assert not prefix_satisfies(atm, RunPrefix([]), c)


def test_witness_replays(atm):
    f = parse_formula("EF{#error <= 2} lock")
    kind, run = counting_witness(atm, f, "e2")
    assert kind == "witness"
    assert run.names(atm) == ["e2", "e3", "lock"]
    assert validate_run(atm, run)
    assert prefix_satisfies(atm, run.prefix(len(run) - 1), f.constraint)
    assert counting_witness(atm, f, "idle") is None


def test_counterexample_is_a_lasso(atm):
    kind, run = counting_witness(atm, parse_formula("AF{#error <= 2} lock"), "idle")
    assert kind == "counterexample"
    assert run.is_lasso
    assert run.names(atm) == ["idle", "e1", "e2", "e3", "(", "lock", ")^w"]
    assert validate_run(atm, run)

    kind, run = counting_witness(atm, parse_formula("!AF{#error <= 2} lock"), "idle")
    assert kind == "witness"


def test_negative_coefficients_rejected(atm):
    with pytest.raises(FragmentError):
        mc_counting(atm, parse_formula("EF{#error - #lock >= 1} TT"))


def test_configuration_cap(atm):
    with pytest.raises(ResourceCapExceeded):
        mc_counting(atm, parse_formula("EF{#error >= 3} lock"), cap=3)


@pytest.mark.parametrize("k", range(9))
def test_counters_saturate_without_changing_any_comparison(k, loop):
    labeler = Labeler(loop)
    labeler.label(Atom("P"))
    labeler.label(TT)
    for cmp in COMPARATORS:
        node = ExistsUntil(TT, AtomicConstraint(((1, Atom("P")),), cmp, k), Atom("P"))
        product = CounterProduct(loop, node, labeler.table)
        values = (0,)
        for m in range(1, k + 4):
            values = product.step(0, values)
            assert values == (min(m, k + 1),)
            assert product.constraint_holds(values) == compare(m, cmp, k)
            if m > k:
                assert compare(m, cmp, k) == compare(k + 1, cmp, k)
