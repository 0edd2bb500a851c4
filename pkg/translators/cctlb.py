"""Counting constraints with nonnegative coefficients into plain CTL.

After moving until guards into the constraints, every E/A TT U{C} psi is unfolded by
scanning the counted formulas of C: states where none of them holds leave C unchanged,
and the first state where some hold decrements C and continues from the successors.
"""
import logging

import config
from models.formula import (
    FALSE_C, FF, TRUE_C, TT, Until, conj, constraint_atoms, disj,
    map_counted, neg, next_operand, next_step, until,
)
from utils.constraints import constraint_decr, constraint_simp, empty_satisfies
from utils.errors import ResourceCapExceeded
from utils.parser import print_formula
from utils.rewrite import rebuild, rewrite_until_to_f

logger = logging.getLogger(__name__)


class CountingUnfolder:
    """Memoized unfolding of E/A TT U{C} target over canonical constraints"""

    def __init__(self, fuel=None):
        self.fuel = fuel if fuel is not None else config.TRANSLATION_FUEL
        self.spent = 0
        self.memo = {}

    def burn(self):
        self.spent += 1
        if self.spent > self.fuel:
            raise ResourceCapExceeded("translation fuel", self.fuel)

    def eventually(self, quantifier, constraint, target):
        """CTL formula for E/A TT U{constraint} target, constraint already simplified."""
        key = (quantifier, constraint, target)
        if key in self.memo:
            return self.memo[key]
        self.burn()
        if constraint is TRUE_C:
            result = until(quantifier, TT, target)
        elif constraint is FALSE_C:
            result = FF
        else:
            counted = self.counted(constraint)
            guard = conj(*(neg(g) for g in counted))
            scan = self.scan(quantifier, constraint, target, counted, 0, constraint)
            goal = disj(target, scan) if empty_satisfies(constraint) else scan
            result = until(quantifier, guard, goal)
        self.memo[key] = result
        return result

    @staticmethod
    def counted(constraint):
        """Distinct counted formulas of ``constraint`` in left-to-right order."""
        seen = []
        for atom in constraint_atoms(constraint):
            for _, g in atom.terms:
                if g not in seen:
                    seen.append(g)
        return seen

    @staticmethod
    def occurrences(constraint, g):
        """(atom index, term index) pairs where ``g`` is counted."""
        return [(i, j) for i, atom in enumerate(constraint_atoms(constraint))
                for j, (_, h) in enumerate(atom.terms) if h is g]

    def scan(self, quantifier, original, target, counted, position, current):
        """
        Case split on the counted formulas from ``position`` on: when ``g`` holds at the
        current state, every occurrence of ``g`` in ``current`` is decremented.
        """
        key = ("scan", quantifier, original, target, position, current)
        if key in self.memo:
            return self.memo[key]
        self.burn()
        if position == len(counted):
            if current is original:
                result = FF
            else:
                result = next_step(quantifier, self.eventually(quantifier, constraint_simp(current), target))
        else:
            g = counted[position]
            decremented = current
            for i, j in self.occurrences(original, g):
                decremented = constraint_decr(decremented, i, j)
            result = disj(
                conj(g, self.scan(quantifier, original, target, counted, position + 1, decremented)),
                conj(neg(g), self.scan(quantifier, original, target, counted, position + 1, current)),
            )
        self.memo[key] = result
        return result


def translate(f, fuel=None):
    """
    Translate a formula with nonnegative counting constraints into an equivalent CTL formula.

    Args:
        f: Formula of CCTL1, CCTL, CCTLb1 or CCTLb
        fuel: Maximum number of unfolding steps (defaults to config.TRANSLATION_FUEL)

    Returns:
        CTL formula sharing subformulas as a DAG

    Raises:
        FragmentError: outside the nonnegative counting fragments
        ResourceCapExceeded: when the fuel runs out
    """
    unfolder = CountingUnfolder(fuel)

    def visit(node, memo):
        if not isinstance(node, Until) or node.constraint is None or next_operand(node) is not None:
            return None
        constraint = constraint_simp(map_counted(node.constraint, memo.__getitem__))
        return unfolder.eventually(node.quantifier, constraint, memo[node.rhs])

    result = rebuild(rewrite_until_to_f(f), visit)
    logger.debug(f"Unfolded {print_formula(f)} in {unfolder.spent} steps")
    return result

