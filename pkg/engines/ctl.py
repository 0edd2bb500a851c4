"""Classical CTL model checking by backward fixpoint labeling.

``Labeler`` is the base of every labeling engine: it walks the distinct subformulas
bottom-up and leaves constrained untils to ``label_constrained``.
"""
import logging
import threading
from collections import deque

import numpy as np

from models.formula import (
    And, Atom, Bind, Elapsed, FalseF, Not, Now, Or, TrueF, Until, VarConstraint, next_operand,
    subformulas,
)
from models.results import StateSet
from utils.errors import FragmentError
from utils.fragments import classify_fragment
from utils.parser import print_formula

logger = logging.getLogger(__name__)


class LabelingTable:
    """Satisfaction sets of subformulas on one structure, filled bottom-up"""

    def __init__(self, structure):
        self.structure = structure
        self._sets = {}
        self._lock = threading.Lock()

    def __contains__(self, f):
        return f in self._sets

    def __getitem__(self, f):
        return self._sets[f]

    def __len__(self):
        return len(self._sets)

    def get(self, f, default=None):
        return self._sets.get(f, default)

    def mask(self, f):
        return self._sets[f].mask

    def store(self, f, states):
        """Record the set of ``f`` unless another evaluation already did; returns the stored set."""
        with self._lock:
            return self._sets.setdefault(f, states)


def pre_exists(structure, mask):
    """States with at least one successor in ``mask``."""
    return np.array([any(mask[s] for s in succ) for succ in structure.successors], dtype=bool)


def pre_forall(structure, mask):
    """States whose successors all lie in ``mask``."""
    return np.array([all(mask[s] for s in succ) for succ in structure.successors], dtype=bool)


def exists_until(structure, phi, psi):
    """Least fixpoint of psi | (phi & EX X), by backward search from the psi-states."""
    result = psi.copy()
    queue = deque(int(q) for q in np.flatnonzero(psi))
    while queue:
        q = queue.popleft()
        for p in structure.predecessors[q]:
            if not result[p] and phi[p]:
                result[p] = True
                queue.append(p)
    return result


def forall_until(structure, phi, psi):
    """Least fixpoint of psi | (phi & AX X), counting the successors not yet in the set."""
    result = psi.copy()
    remaining = [len(succ) for succ in structure.successors]
    queue = deque(int(q) for q in np.flatnonzero(psi))
    while queue:
        q = queue.popleft()
        for p in structure.predecessors[q]:
            if result[p] or not phi[p]:
                continue
            remaining[p] -= 1
            if remaining[p] == 0:
                result[p] = True
                queue.append(p)
    return result


def exists_globally(structure, phi):
    """Greatest fixpoint of phi & EX X."""
    return ~forall_until(structure, np.ones(structure.size, dtype=bool), ~phi)


class Labeler:
    """Bottom-up labeling of CTL formulas; subclasses add constrained untils"""

    name = "ctl"

    def __init__(self, structure, table=None):
        self.structure = structure
        self.table = table if table is not None else LabelingTable(structure)

    def label(self, f):
        """
        Compute the satisfaction set of ``f``, memoizing every subformula.

        Args:
            f: Formula

        Returns:
            StateSet of the states satisfying ``f``
        """
        for node in subformulas(f):
            if node in self.table or isinstance(node, Elapsed):
                continue
            self.table.store(node, StateSet(self.label_node(node)))
        return self.table[f]

    def mask(self, f):
        return self.table.mask(f)

    def label_node(self, node):
        size = self.structure.size
        if isinstance(node, Atom):
            return self.structure.holds(node.name)
        if isinstance(node, TrueF):
            return np.ones(size, dtype=bool)
        if isinstance(node, FalseF):
            return np.zeros(size, dtype=bool)
        if isinstance(node, Not):
            return ~self.mask(node.child)
        if isinstance(node, And):
            return self.mask(node.lhs) & self.mask(node.rhs)
        if isinstance(node, Or):
            return self.mask(node.lhs) | self.mask(node.rhs)
        if isinstance(node, Until):
            operand = next_operand(node)
            if operand is not None and self.next_is_step(node):
                if node.quantifier == "E":
                    return pre_exists(self.structure, self.mask(operand))
                return pre_forall(self.structure, self.mask(operand))
            if node.constraint is None:
                if node.quantifier == "E":
                    return exists_until(self.structure, self.mask(node.lhs), self.mask(node.rhs))
                return forall_until(self.structure, self.mask(node.lhs), self.mask(node.rhs))
            return self.label_constrained(node)
        if isinstance(node, (Bind, VarConstraint, Now)):
            raise FragmentError(f"the {self.name} engine does not handle {type(node).__name__} nodes")
        raise TypeError(f"cannot label {type(node).__name__}")

    def next_is_step(self, node):
        return True

    def label_constrained(self, node):
        raise FragmentError(f"the {self.name} engine does not handle constrained until: {print_formula(node)}")


def mc_ctl(structure, f):
    """
    Model-check a CTL formula.

    Raises:
        FragmentError: if ``f`` is not a CTL formula
    """
    descriptor = classify_fragment(f)
    if descriptor.fragment_name != "CTL":
        raise FragmentError(f"mc_ctl expects a CTL formula, got {descriptor.fragment_name}")
    return Labeler(structure).label(f)


def check(structure, f, **options):
    return mc_ctl(structure, f)
