import itertools
import random

import pytest
from hypothesis import given, strategies as st

from generators.random_instances import random_constraint
from models.formula import FF, FALSE_C, TRUE_C, Atom, AtomicConstraint, AndC, NotC, OrC, TT
from utils.constraints import (
    bound_multiset, constraint_decr, constraint_simp, empty_satisfies, holds, max_constant,
)
from utils.errors import ConstraintIndexError, ConstraintOverflowError, FragmentError
from utils.parser import parse_formula
from utils.rewrite import rewrite_until_to_f

P, Q = Atom("P"), Atom("Q")


def atom(terms, cmp, bound):
    return AtomicConstraint(tuple(terms), cmp, bound)


def test_decrement_targets_one_atom():
    c = AndC(atom([(1, P), (2, Q)], ">=", 3), atom([(1, P)], "<", 2))
    assert constraint_decr(c, 0, 1) is AndC(atom([(1, P), (2, Q)], ">=", 1), atom([(1, P)], "<", 2))
    assert constraint_decr(c, 1, 0) is AndC(atom([(1, P), (2, Q)], ">=", 3), atom([(1, P)], "<", 1))


def test_decrement_can_go_negative():
    c = atom([(3, P)], "<=", 1)
    assert constraint_decr(c, 0, 0).bound == -2


def test_decrement_counts_repeated_atoms_separately():
    a = atom([(1, P)], ">=", 2)
    c = OrC(a, NotC(a))
    assert constraint_decr(c, 1, 0) is OrC(a, NotC(atom([(1, P)], ">=", 1)))


@pytest.mark.parametrize("i, j", [(2, 0), (0, 2), (-1, 0)])
def test_decrement_index_error(i, j):
    c = AndC(atom([(1, P), (2, Q)], ">=", 3), atom([(1, P)], "<", 2))
    with pytest.raises(ConstraintIndexError):
        constraint_decr(c, i, j)


def test_decrement_overflow():
    with pytest.raises(ConstraintOverflowError):
        constraint_decr(atom([(-1, P)], ">=", 2 ** 63 - 1), 0, 0)


@pytest.mark.parametrize("c, expected", [
    (atom([(1, P)], ">=", 0), TRUE_C),
    (atom([(1, P)], ">", -1), TRUE_C),
    (atom([(1, P)], "<", 0), FALSE_C),
    (atom([(2, P)], "=", -1), FALSE_C),
    (atom([(-1, P)], "<=", 0), TRUE_C),
    (atom([(-1, P)], ">", 0), FALSE_C),
    (atom([(1, P), (-1, P)], "=", 0), TRUE_C),
    (atom([(1, FF)], ">=", 1), FALSE_C),
    (OrC(atom([(1, P)], ">=", 0), atom([(1, Q)], "=", 4)), TRUE_C),
    (AndC(atom([(1, Q)], "=", 4), atom([(1, P)], "<", 0)), FALSE_C),
    (NotC(atom([(1, P)], "<", 0)), TRUE_C),
])
def test_simp_trivial(c, expected):
    assert constraint_simp(c) is expected


def test_simp_merges_terms():
    assert constraint_simp(atom([(1, P), (1, FF), (1, P), (1, Q)], ">=", 3)) is atom([(2, P), (1, Q)], ">=", 3)
    assert constraint_simp(AndC(atom([(1, P)], ">=", 0), atom([(1, Q)], "=", 2))) is atom([(1, Q)], "=", 2)


def test_simp_keeps_mixed_signs():
    c = atom([(1, P), (-1, Q)], ">=", -5)
    assert constraint_simp(c) is c


@given(st.integers(0, 10 ** 6), st.booleans())
def test_simp_preserves_meaning_on_counts(seed, signed):
    rng = random.Random(seed)
    c = random_constraint(rng, [P, Q, TT], rng.randint(1, 3), 4, signed=signed, unit=False)
    simplified = constraint_simp(c)
    for p, q, t in itertools.product(range(6), repeat=3):
        counts = {P: p, Q: q, TT: t}
        assert holds(simplified, counts.__getitem__) == holds(c, counts.__getitem__)


@given(st.integers(0, 10 ** 6))
def test_repeated_decrement_reaches_a_constant(seed):
    rng = random.Random(seed)
    c = constraint_simp(random_constraint(rng, [P, Q], rng.randint(1, 3), 5, unit=False))
    for _ in range(100):
        if c is TRUE_C or c is FALSE_C:
            break
        measure = sum(bound + 1 for bound in bound_multiset(c))
        assert all(bound >= 0 for bound in bound_multiset(c))
        c = constraint_simp(constraint_decr(c, 0, 0))
        if c is not TRUE_C and c is not FALSE_C:
            assert sum(bound + 1 for bound in bound_multiset(c)) < measure
    assert c is TRUE_C or c is FALSE_C


def test_empty_prefix():
    assert empty_satisfies(atom([(1, P)], ">=", 0))
    assert not empty_satisfies(atom([(1, P)], ">=", 1))
    assert empty_satisfies(NotC(atom([(1, P)], ">=", 1)))
    assert empty_satisfies(atom([(2, P), (-1, Q)], "<", 1))
    assert empty_satisfies(TRUE_C)
    assert not empty_satisfies(FALSE_C)


def test_holds_and_max_constant():
    c = OrC(atom([(1, P), (-2, Q)], "=", -7), atom([(1, Q)], "<", 3))
    counts = {P: 1, Q: 4}
    assert holds(c, counts.__getitem__)
    counts = {P: 0, Q: 3}
    assert not holds(c, counts.__getitem__)
    assert max_constant(c) == 7
    assert max_constant(TRUE_C) == 0


def test_rewrite_moves_guard_into_constraint():
    f = parse_formula("E(P U{#Q >= 1} R)")
    assert rewrite_until_to_f(f) is parse_formula("EF{#Q >= 1 & #(!P) = 0} R")


def test_rewrite_keeps_next_and_plain_until():
    f = parse_formula("EX P & A(P U Q)")
    assert rewrite_until_to_f(f) is f


def test_rewrite_rewrites_counted_formulas():
    f = parse_formula("E(P U{#(A(Q U{#Q <= 1} P)) >= 1} P)")
    inner = parse_formula("AF{#Q <= 1 & #(!Q) = 0} P")
    expected = parse_formula("EF{#Q >= 0 & #(!P) = 0} P")
    rewritten = rewrite_until_to_f(f)
    assert rewritten.constraint.lhs.terms == ((1, inner),)
    assert rewritten.constraint.rhs is expected.constraint.rhs


@pytest.mark.parametrize("text", ["E(P U{#P - #Q >= 1} Q)", "N EF{#P >= 1} Q", "z[P].EF(z >= 1)"])
def test_rewrite_rejects_undecidable_extensions(text):
    with pytest.raises(FragmentError):
        rewrite_until_to_f(parse_formula(text))
