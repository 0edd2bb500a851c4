"""Cumulative formulas into closed formulas with counting variables.

Every Now block binds one variable per formula counted inside the block (nested Now
blocks bind their own), so a constraint of a cumulative until reads the counts of the
whole history since the last reset. The top level is a block of its own: evaluation
starts with an empty history.
"""
import itertools
import logging

from models.formula import (
    And, Atom, Bind, FalseF, Not, Now, Or, TrueF, Until, conj, counted_formulas, disj, neg, tree_size,
    until,
)
from translators.binders import constraint_formula
from utils.errors import FragmentError
from utils.fragments import classify_fragment, occurring_variables
from utils.parser import print_formula

logger = logging.getLogger(__name__)


def block_counted(f):
    """
    Formulas counted in the block of ``f``: inside its constraints and, recursively,
    inside the counted formulas themselves, without entering nested Now blocks.

    Returns:
        list ordered by tree size, smallest first (ties in order of discovery)
    """
    found = {}
    seen = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if node in seen or isinstance(node, Now):
            continue
        seen.add(node)
        if isinstance(node, Until) and node.constraint is not None:
            for g in counted_formulas(node.constraint):
                found.setdefault(g, len(found))
                stack.append(g)
            stack.extend((node.lhs, node.rhs))
        elif isinstance(node, (And, Or, Until)):
            stack.extend((node.lhs, node.rhs))
        elif isinstance(node, Not):
            stack.append(node.child)
    return sorted(found, key=lambda g: (tree_size(g), found[g]))


class CumulativeTranslator:
    def __init__(self, f):
        used = occurring_variables(f)
        self.blocks = itertools.count()
        self.used = used
        self.memo = {}

    def fresh(self, block, i):
        name = f"c{block}_{i}"
        while name in self.used:
            name += "'"
        self.used.add(name)
        return name

    def block(self, f):
        """Binders for the counted formulas of the block of ``f``, wrapped around its image."""
        number = next(self.blocks)
        counted = block_counted(f)
        variable = {g: self.fresh(number, i) for i, g in enumerate(counted)}
        images = {g: self.overline(g, variable) for g in counted}
        result = self.overline(f, variable)
        for g in reversed(counted):
            result = Bind(variable[g], images[g], result)
        return result

    def overline(self, f, variable):
        key = (f, tuple(variable.items()))
        if key in self.memo:
            return self.memo[key]
        if isinstance(f, (Atom, TrueF, FalseF)):
            result = f
        elif isinstance(f, Not):
            result = neg(self.overline(f.child, variable))
        elif isinstance(f, And):
            result = conj(self.overline(f.lhs, variable), self.overline(f.rhs, variable))
        elif isinstance(f, Or):
            result = disj(self.overline(f.lhs, variable), self.overline(f.rhs, variable))
        elif isinstance(f, Now):
            result = self.block(f.child)
        elif isinstance(f, Until):
            lhs = self.overline(f.lhs, variable)
            rhs = self.overline(f.rhs, variable)
            if f.constraint is not None:
                rhs = conj(constraint_formula(f.constraint, variable), rhs)
            result = until(f.quantifier, lhs, rhs)
        else:
            raise FragmentError(f"cannot translate {type(f).__name__} nodes of a cumulative formula")
        self.memo[key] = result
        return result


def translate(f):
    """
    Translate a cumulative formula into an equivalent closed formula with variables.

    Args:
        f: Formula of CCTLc (Now allowed anywhere, no variables, no DUR)

    Returns:
        Closed formula whose truth at q is the truth of ``f`` at q with empty history

    Raises:
        FragmentError: for variables, binders or DUR
    """
    descriptor = classify_fragment(f)
    if descriptor.uses_variables or descriptor.uses_duration:
        raise FragmentError(f"cannot translate {descriptor.fragment_name} as a cumulative formula")
    translator = CumulativeTranslator(f)
    result = translator.block(f)
    logger.debug(f"Translated {print_formula(f)} with {next(translator.blocks)} blocks")
    return result
