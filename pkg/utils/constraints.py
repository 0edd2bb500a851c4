"""Constraint algebra: bound decrement, simplification and evaluation."""
import logging

import config
from models.formula import (
    FF, FALSE_C, TRUE_C, AndC, AtomicConstraint, NotC, OrC, cconj, cdisj, cneg, compare,
    constraint_atoms,
)
from utils.errors import ConstraintIndexError, ConstraintOverflowError

logger = logging.getLogger(__name__)


def constraint_decr(c, i, j):
    """
    Replace the bound k of the ``i``-th atomic constraint of ``c`` by k minus its ``j``-th coefficient.

    Atoms are numbered left to right from 0 (a repeated atom counts once per occurrence),
    terms likewise. The result may carry a negative bound.

    Raises:
        ConstraintIndexError: if the atom or the term does not exist
        ConstraintOverflowError: if the new bound leaves the 64-bit range
    """
    atoms = constraint_atoms(c)
    if not 0 <= i < len(atoms):
        raise ConstraintIndexError(f"constraint has no atom {i} (it has {len(atoms)})")
    if not 0 <= j < len(atoms[i].terms):
        raise ConstraintIndexError(f"atom {i} has no term {j} (it has {len(atoms[i].terms)})")
    position = [0]

    def rebuild(node):
        if isinstance(node, AtomicConstraint):
            here = position[0]
            position[0] += 1
            if here != i:
                return node
            bound = node.bound - node.terms[j][0]
            if not config.INT_MIN <= bound <= config.INT_MAX:
                raise ConstraintOverflowError(f"bound {bound} is out of the 64-bit range")
            return node.with_bound(bound)
        if isinstance(node, NotC):
            return NotC(rebuild(node.child))
        if isinstance(node, (AndC, OrC)):
            lhs = rebuild(node.lhs)
            return type(node)(lhs, rebuild(node.rhs))
        return node

    return rebuild(c)


def normalize_terms(terms):
    """Merge like terms and drop zero coefficients and ``#FF`` terms, keeping first-occurrence order."""
    merged = {}
    for coeff, counted in terms:
        if counted is FF:
            continue
        merged[counted] = merged.get(counted, 0) + coeff
    return tuple((coeff, counted) for counted, coeff in merged.items() if coeff != 0)


def _trivial(terms, cmp, bound):
    """TRUE_C/FALSE_C when the atom's truth does not depend on the run, else None."""
    if not terms:
        return TRUE_C if compare(0, cmp, bound) else FALSE_C
    if all(coeff > 0 for coeff, _ in terms):
        # the sum ranges over [0, +inf)
        if (cmp == ">=" and bound <= 0) or (cmp == ">" and bound < 0):
            return TRUE_C
        if (cmp == "<" and bound <= 0) or (cmp in ("<=", "=") and bound < 0):
            return FALSE_C
    elif all(coeff < 0 for coeff, _ in terms):
        # (-inf, 0]
        if (cmp == "<=" and bound >= 0) or (cmp == "<" and bound > 0):
            return TRUE_C
        if (cmp == ">" and bound >= 0) or (cmp in (">=", "=") and bound > 0):
            return FALSE_C
    return None


def constraint_simp(c):
    """
    Simplify a constraint without changing the counter valuations that satisfy it.

    Trivially true or false atoms become TRUE_C / FALSE_C and the Boolean structure is
    folded, so the result is TRUE_C, FALSE_C, or a tree containing neither.
    """
    if isinstance(c, AtomicConstraint):
        terms = normalize_terms(c.terms)
        trivial = _trivial(terms, c.cmp, c.bound)
        if trivial is not None:
            return trivial
        return AtomicConstraint(terms, c.cmp, c.bound)
    if isinstance(c, NotC):
        return cneg(constraint_simp(c.child))
    if isinstance(c, AndC):
        return cconj(constraint_simp(c.lhs), constraint_simp(c.rhs))
    if isinstance(c, OrC):
        return cdisj(constraint_simp(c.lhs), constraint_simp(c.rhs))
    return c


def atom_value(atom, count):
    """Linear sum of ``atom`` where ``count(phi)`` gives the number of phi-states (or the weight for DUR)."""
    return sum(coeff * count(counted) for coeff, counted in atom.terms)


def holds(c, count):
    """
    Evaluate a constraint as an ordinary (in)equation system.

    Args:
        c: Constraint
        count: Callable mapping a counted formula to its count over the prefix
    """
    if isinstance(c, AtomicConstraint):
        return compare(atom_value(c, count), c.cmp, c.bound)
    if isinstance(c, NotC):
        return not holds(c.child, count)
    if isinstance(c, AndC):
        return holds(c.lhs, count) and holds(c.rhs, count)
    if isinstance(c, OrC):
        return holds(c.lhs, count) or holds(c.rhs, count)
    return c is TRUE_C


def evaluate_atoms(c, truth):
    """Evaluate the Boolean structure of ``c`` given ``truth(atom)`` for its atomic constraints."""
    if isinstance(c, AtomicConstraint):
        return truth(c)
    if isinstance(c, NotC):
        return not evaluate_atoms(c.child, truth)
    if isinstance(c, AndC):
        return evaluate_atoms(c.lhs, truth) and evaluate_atoms(c.rhs, truth)
    if isinstance(c, OrC):
        return evaluate_atoms(c.lhs, truth) or evaluate_atoms(c.rhs, truth)
    return c is TRUE_C


def empty_satisfies(c):
    """Whether the empty prefix (all counts zero) satisfies ``c``."""
    return holds(c, lambda counted: 0)


def max_constant(c):
    """Largest absolute bound among the atoms of ``c`` (0 for TRUE_C/FALSE_C)."""
    return max((abs(atom.bound) for atom in constraint_atoms(c)), default=0)


def bound_multiset(c):
    """Sorted bounds of the atoms of ``c``; strictly decreases along the translation scan."""
    return sorted(atom.bound for atom in constraint_atoms(c))
