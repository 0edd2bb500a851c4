"""Closed formulas with counting variables into plain CTL.

The translation carries a valuation of the relevant variables, capped at K + 1 where K
is the largest constant of the formula. An until is unfolded by telling apart the
states where no relevant variable below the cap would change (the valuation carries
over) from those where some do: those are scanned variable by variable and the
modality resumes at the successors with the updated valuation.
"""
import logging

import config
from models.formula import (
    FF, TT, And, Atom, Bind, FalseF, Not, Or, TrueF, Until, VarConstraint, compare, conj, disj,
    neg, next_step, subformulas, until,
)
from models.valuation import Valuation
from translators.binders import translate as embed_variables
from utils.errors import FragmentError, ResourceCapExceeded, WellFormednessError
from utils.fragments import binder_environment, classify_fragment, free_variables, relevant_variables
from utils.parser import print_formula

logger = logging.getLogger(__name__)


class VariableTranslator:
    """The translation of one closed formula"""

    def __init__(self, f, fuel=None):
        self.environment, self.order = binder_environment(f)
        self.valuation = Valuation(self.order)
        self.cap = max((abs(node.bound) for node in _var_constraints(f)), default=0)
        self.fuel = fuel if fuel is not None else config.TRANSLATION_FUEL
        self.spent = 0
        self.rv_memo = {}
        self.memo = {}

    def relevant(self, f):
        return relevant_variables(f, self.environment, self.rv_memo)

    def burn(self):
        self.spent += 1
        if self.spent > self.fuel:
            raise ResourceCapExceeded("translation fuel", self.fuel)

    def restricted(self, f, values):
        return self.valuation.restrict(values, self.relevant(f))

    def tr(self, f, values):
        """
        CTL image of ``f`` under the valuation ``values`` of its relevant variables.

        Args:
            f: Formula
            values: Tuple of (variable, value) pairs over exactly the relevant variables of ``f``
        """
        key = (f, values)
        if key in self.memo:
            return self.memo[key]
        self.burn()
        v = dict(values)
        if isinstance(f, (Atom, TrueF, FalseF)):
            result = f
        elif isinstance(f, Not):
            result = neg(self.tr(f.child, values))
        elif isinstance(f, And):
            result = conj(self.tr(f.lhs, self.restricted(f.lhs, v)), self.tr(f.rhs, self.restricted(f.rhs, v)))
        elif isinstance(f, Or):
            result = disj(self.tr(f.lhs, self.restricted(f.lhs, v)), self.tr(f.rhs, self.restricted(f.rhs, v)))
        elif isinstance(f, Bind):
            inner = dict(v)
            inner[f.var] = 0
            result = self.tr(f.body, self.restricted(f.body, inner))
        elif isinstance(f, VarConstraint):
            total = sum(coeff * v[var] for coeff, var in f.terms)
            result = TT if compare(total, f.cmp, f.bound) else FF
        elif isinstance(f, Until):
            if f.constraint is not None:
                raise FragmentError(f"constrained until left in a variable formula: {print_formula(f)}")
            result = self.until(f, values)
        else:
            raise FragmentError(f"cannot translate {type(f).__name__} nodes")
        self.memo[key] = result
        return result

    def counted_image(self, var, v):
        counted = self.environment[var]
        return self.tr(counted, self.restricted(counted, v))

    def until(self, f, values):
        v = dict(values)
        live = [var for var, value in values if value <= self.cap]
        lhs = self.tr(f.lhs, self.restricted(f.lhs, v))
        rhs = self.tr(f.rhs, self.restricted(f.rhs, v))
        unchanged = conj(*(neg(self.counted_image(var, v)) for var in live))
        scan = self.scan(f, values, tuple(live), values)
        return until(f.quantifier, conj(lhs, unchanged), disj(rhs, conj(lhs, scan)))

    def scan(self, f, values, remaining, updated):
        """
        Case split on the counted formulas of the variables in ``remaining``, collecting
        the incremented valuation in ``updated``; the formulas are read under ``values``.
        """
        key = ("scan", f, values, remaining, updated)
        if key in self.memo:
            return self.memo[key]
        self.burn()
        if not remaining:
            result = FF if updated == values else next_step(f.quantifier, self.tr(f, updated))
        else:
            var, rest = remaining[0], remaining[1:]
            image = self.counted_image(var, dict(values))
            bumped = self.valuation.bump(updated, {var})
            result = disj(
                conj(neg(image), self.scan(f, values, rest, updated)),
                conj(image, self.scan(f, values, rest, bumped)),
            )
        self.memo[key] = result
        return result


def _var_constraints(f):
    return [node for node in subformulas(f) if isinstance(node, VarConstraint)]


def translate(f, fuel=None):
    """
    Translate a closed formula with variables into an equivalent CTL formula.

    Counting constraints, if any, are first replaced by variable binders.

    Args:
        f: Closed formula of CCTLv (nonnegative coefficients)
        fuel: Maximum number of translation steps (defaults to config.TRANSLATION_FUEL)

    Raises:
        WellFormednessError: if ``f`` has free variables or an invalid binder structure
        FragmentError: for negative coefficients, Now or DUR
    """
    free = free_variables(f)
    if free:
        raise WellFormednessError(f"formula is not closed: free variables {', '.join(sorted(free))}")
    descriptor = classify_fragment(f)
    if descriptor.negative_coefficients or descriptor.uses_cumulative or descriptor.uses_duration:
        raise FragmentError(f"cannot translate {descriptor.fragment_name} into CTL")
    if any(isinstance(node, Until) and node.constraint is not None for node in subformulas(f)):
        f = embed_variables(f)
    translator = VariableTranslator(f, fuel)
    result = translator.tr(f, ())
    logger.debug(f"Translated {print_formula(f)} with K={translator.cap} in {translator.spent} steps")
    return result
