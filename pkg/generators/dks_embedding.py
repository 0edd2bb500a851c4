"""Durational structures as Kripke structures with counted transition states.

Each weighted transition q -d-> q' becomes q -> (q, d, q') -> q' where the middle state
carries the proposition of its duration; original states carry ``ok``. The duration of
a run is then the weighted count of the middle states on its prefix.
"""
import logging

from engines.dks import tctl_modality
from models.formula import (
    FF, And, Atom, AtomicConstraint, Bind, Not, Now, Or, Until, VarConstraint, compare, implies,
    next_operand, next_step, subformulas, until,
)
from models.kripke import KripkeStructure
from utils.errors import FragmentError

logger = logging.getLogger(__name__)

OK = "ok"


def duration_prop(weight):
    return f"P_{weight}" if weight >= 0 else f"P_m{-weight}"


class DurationEmbedding:
    """The embedded structure of one DKS and the matching formula transformer"""

    def __init__(self, d):
        self.source = d
        names = list(d.names)
        taken = set(names)
        labels = [set(label) | {OK} for label in d.labels]
        successors = [[] for _ in names]
        for src, weight, dst in d.transitions:
            name = f"{d.names[src]}.{duration_prop(weight)}.{d.names[dst]}"
            while name in taken:
                name += "'"
            taken.add(name)
            middle = len(names)
            names.append(name)
            labels.append({duration_prop(weight)})
            successors.append([dst])
            successors[src].append(middle)
        declared = set(d.declared_ap) | {OK} | {duration_prop(w) for w in d.weights}
        self.structure = KripkeStructure(names, successors, labels, declared)
        logger.debug(f"Embedded {d.size} states and {d.transition_count} transitions "
                     f"into {self.structure.size} states")

    def transform(self, f):
        """
        Counting formula over the embedded structure equivalent to the TCTL formula ``f``.

        Raises:
            FragmentError: for variables, Now, or constraints other than a single DUR term
        """
        ok = Atom(OK)
        memo = {}
        for node in subformulas(f):
            if isinstance(node, (Bind, VarConstraint, Now)):
                raise FragmentError(f"cannot embed {type(node).__name__} nodes")
            if isinstance(node, Until):
                operand = next_operand(node)
                if operand is not None:
                    memo[node] = next_step(node.quantifier, next_step(node.quantifier, memo[operand]))
                    continue
                lhs, rhs = implies(ok, memo[node.lhs]), And(ok, memo[node.rhs])
                if node.constraint is None:
                    memo[node] = until(node.quantifier, lhs, rhs)
                    continue
                quantifier, cmp, k = tctl_modality(node)
                terms = tuple((w, Atom(duration_prop(w))) for w in self.source.weights if w != 0)
                if not terms:
                    memo[node] = until(quantifier, lhs, rhs) if compare(0, cmp, k) else FF
                    continue
                memo[node] = type(node)(lhs, AtomicConstraint(terms, cmp, k), rhs)
            elif isinstance(node, Not):
                memo[node] = Not(memo[node.child])
            elif isinstance(node, (And, Or)):
                memo[node] = type(node)(memo[node.lhs], memo[node.rhs])
            else:
                memo[node] = node
        return memo[f]


def generate(d):
    """
    Embed a durational structure.

    Returns:
        (KripkeStructure, transformer) where ``transformer`` maps TCTL formulas over ``d``
        to counting formulas over the structure; original states keep their indices
    """
    embedding = DurationEmbedding(d)
    return embedding.structure, embedding.transform
