"""Counting constraints into variable binders.

E phi U{C} psi becomes y1[g1]...yn[gn].E phi U (psi & C') where C' reads the count of
each counted formula g_i from a fresh variable y_i bound at the start of the modality.
Next-step shapes are embedded too, so a step advances every enclosing variable.
"""
import itertools
import logging

from models.formula import (
    DUR, FALSE_C, FF, TRUE_C, TT, AndC, AtomicConstraint, Bind, NotC, OrC, Until, VarConstraint, conj,
    disj, map_counted, neg,
)
from translators.cctlb import CountingUnfolder
from utils.errors import FragmentError
from utils.fragments import occurring_variables
from utils.rewrite import rebuild

logger = logging.getLogger(__name__)


def constraint_formula(c, variable):
    """Formula-level Boolean combination of variable constraints equivalent to ``c``."""
    if c is TRUE_C:
        return TT
    if c is FALSE_C:
        return FF
    if isinstance(c, AtomicConstraint):
        return VarConstraint(tuple((coeff, variable[g]) for coeff, g in c.terms), c.cmp, c.bound)
    if isinstance(c, NotC):
        return neg(constraint_formula(c.child, variable))
    if isinstance(c, AndC):
        return conj(constraint_formula(c.lhs, variable), constraint_formula(c.rhs, variable))
    if isinstance(c, OrC):
        return disj(constraint_formula(c.lhs, variable), constraint_formula(c.rhs, variable))
    raise TypeError(f"unexpected constraint {c!r}")


def translate(f):
    """
    Replace every counting constraint of ``f`` by fresh variable binders.

    Raises:
        FragmentError: if a constraint counts DUR
    """
    used = occurring_variables(f)
    fresh = (name for name in (f"y{n}" for n in itertools.count(1)) if name not in used)

    def visit(node, memo):
        if not isinstance(node, Until) or node.constraint is None:
            return None
        constraint = map_counted(node.constraint, memo.__getitem__)
        counted = CountingUnfolder.counted(constraint)
        if DUR in counted:
            raise FragmentError("DUR has no variable counterpart")
        variable = {g: next(fresh) for g in counted}
        result = type(node)(memo[node.lhs], None, conj(memo[node.rhs], constraint_formula(constraint, variable)))
        for g in reversed(counted):
            result = Bind(variable[g], g, result)
        return result

    return rebuild(f, visit)
