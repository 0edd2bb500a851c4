import logging

from models.formula import (
    TT, And, AtomicConstraint, Bind, Not, Now, Or, Until, cconj, map_counted, neg, next_operand,
    subformulas,
)
from utils.errors import FragmentError
from utils.fragments import classify_fragment

logger = logging.getLogger(__name__)


def rebuild(f, visit):
    """
    Rebuild ``f`` bottom-up over its distinct subformulas.

    ``visit(node, memo)`` returns the image of ``node`` given the images of its
    children in ``memo``, or None to copy the node structurally.
    """
    memo = {}
    for node in subformulas(f):
        image = visit(node, memo)
        if image is None:
            image = copy_node(node, memo)
        memo[node] = image
    return memo[f]


def copy_node(node, memo):
    """Same node kind with every child replaced by its image in ``memo``."""
    if isinstance(node, Until):
        constraint = node.constraint
        if constraint is not None:
            constraint = map_counted(constraint, memo.__getitem__)
        return type(node)(memo[node.lhs], constraint, memo[node.rhs])
    if isinstance(node, Not):
        return neg(memo[node.child])
    if isinstance(node, Now):
        return Now(memo[node.child])
    if isinstance(node, (And, Or)):
        return type(node)(memo[node.lhs], memo[node.rhs])
    if isinstance(node, Bind):
        return Bind(node.var, memo[node.counted], memo[node.body])
    return node


def rewrite_until_to_f(f):
    """
    Move the left operand of every constrained until into its constraint:
    E phi U{C} psi becomes E TT U{C & #(!phi) = 0} psi, and dually for A.

    Next-step shapes are left alone. The output is linear in the size of ``f``.

    Raises:
        FragmentError: if ``f`` uses negative coefficients, variables, Now or DUR,
            where adding a Boolean conjunct would leave the decidable fragments
    """
    descriptor = classify_fragment(f)
    if (descriptor.negative_coefficients or descriptor.uses_variables
            or descriptor.uses_cumulative or descriptor.uses_duration):
        raise FragmentError(f"cannot move until guards into constraints for {descriptor.fragment_name}")

    def visit(node, memo):
        if not isinstance(node, Until) or node.constraint is None or next_operand(node) is not None:
            return None
        constraint = map_counted(node.constraint, memo.__getitem__)
        guard = AtomicConstraint(((1, neg(memo[node.lhs])),), "=", 0)
        return type(node)(TT, cconj(constraint, guard), memo[node.rhs])

    return rebuild(f, visit)
