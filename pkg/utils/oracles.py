"""Independent brute-force oracles for cross-checking the engines.

Both oracles are three-valued: True and False are conclusive, None means the search
bound was too small to decide.
"""
import logging
from collections import deque

import numpy as np

import config
from models.formula import (
    And, Atom, Elapsed, FalseF, Not, Or, TrueF, Until, compare, constraint_atoms, counted_formulas, subformulas,
)
from utils.constraints import holds, max_constant
from utils.errors import FragmentError, ResourceCapExceeded
from utils.parser import print_formula

logger = logging.getLogger(__name__)


def and3(*values):
    if any(v is False for v in values):
        return False
    if any(v is None for v in values):
        return None
    return True


def or3(*values):
    if any(v is True for v in values):
        return True
    if any(v is None for v in values):
        return None
    return False


def not3(value):
    return None if value is None else not value


def conclusive_horizon(structure, node):
    """Length beyond which a nonnegative modality gains no new witnesses or counterexamples."""
    if node.constraint is None:
        return structure.size
    m = len(counted_formulas(node.constraint))
    return (m * (max_constant(node.constraint) + 1) + 1) * structure.size


class PrefixOracle:
    """Three-valued evaluation of one formula by enumerating run prefixes"""

    def __init__(self, structure, horizon, cap=None):
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        self.structure = structure
        self.horizon = horizon
        self.cap = cap if cap is not None else config.ORACLE_CAP
        self.visited = 0
        self.values = {}

    def evaluate(self, f):
        for node in subformulas(f):
            if node not in self.values:
                self.values[node] = [self.state_value(node, q) for q in range(self.structure.size)]
        return self.values[f]

    def state_value(self, node, q):
        if isinstance(node, Atom):
            return node.name in self.structure.labels[q]
        if isinstance(node, TrueF):
            return True
        if isinstance(node, FalseF):
            return False
        if isinstance(node, Not):
            return not3(self.values[node.child][q])
        if isinstance(node, And):
            return and3(self.values[node.lhs][q], self.values[node.rhs][q])
        if isinstance(node, Or):
            return or3(self.values[node.lhs][q], self.values[node.rhs][q])
        if isinstance(node, Until):
            return self.until_value(node, q)
        raise FragmentError(f"the prefix oracle does not handle {type(node).__name__} nodes")

    def constraint_value(self, node, prefix):
        if node.constraint is None:
            return True
        counted = counted_formulas(node.constraint)
        if any(self.values[g][s] is None for g in counted for s in prefix):
            return None
        return holds(node.constraint, lambda g: sum(1 for s in prefix if self.values[g][s]))

    def position_value(self, node, prefix, q):
        """Truth of 'the run ending in q after ``prefix`` reaches the target here'."""
        return and3(self.values[node.rhs][q], self.constraint_value(node, prefix))

    def until_value(self, node, q):
        nonnegative = all(coeff >= 0 for atom in constraint_atoms(node.constraint) for coeff, _ in atom.terms) \
            if node.constraint is not None else True
        conclusive = nonnegative and self.horizon >= conclusive_horizon(self.structure, node)
        return self.search(node, (), q, node.quantifier == "E", conclusive)

    def search(self, node, prefix, q, existential, conclusive):
        self.visited += 1
        if self.visited > self.cap:
            raise ResourceCapExceeded("enumerated prefixes", self.cap, modality=print_formula(node))
        here = self.position_value(node, prefix, q)
        if here is True:
            return True
        guard = self.values[node.lhs][q]
        if guard is False:
            return here
        if len(prefix) + 1 >= self.horizon:
            unresolved = False if conclusive else None
            return or3(here, and3(guard, unresolved))
        following = prefix + (q,)
        branches = [self.search(node, following, s, existential, conclusive) for s in self.structure.successors[q]]
        later = or3(*branches) if existential else and3(*branches)
        return or3(here, and3(guard, later))


def oracle_enumerate(structure, f, horizon=None, cap=None):
    """
    Evaluate ``f`` at every state by enumerating run prefixes of up to ``horizon`` states.

    An existential modality is true once a witness prefix is found; a universal one once
    every run is settled within the horizon. For nonnegative constraints a horizon past
    the segment bound makes the absence of a witness conclusive.

    Returns:
        list with True, False or None (unknown) per state

    Raises:
        FragmentError: for variables, Now or DUR
        ResourceCapExceeded: when more than ``cap`` prefixes are enumerated
    """
    horizon = horizon if horizon is not None else config.DEFAULT_HORIZON
    for node in subformulas(f):
        if isinstance(node, Elapsed):
            raise FragmentError("the prefix oracle does not count DUR")
    oracle = PrefixOracle(structure, horizon, cap)
    verdicts = oracle.evaluate(f)
    unknown = sum(1 for v in verdicts if v is None)
    logger.debug(f"Oracle on {print_formula(f)}: {oracle.visited} prefixes, {unknown} unknown verdicts")
    return verdicts


def windowed_product(d, phi, psi, quantifier, cmp, k, window=None):
    """
    Decide E/A phi U{DUR cmp k} psi on the product of ``d`` with prefix weights clamped
    to [-window, window].

    Configurations leaving the window are leaves, solved once as accepting and once as
    rejecting; a state is conclusive where both solutions agree.

    Returns:
        list with True, False or None per state
    """
    window = window if window is not None else config.DEFAULT_WINDOW
    ids = {}
    configs = []
    succ = []
    boundary = []
    queue = deque()

    def intern(q, w):
        key = (q, w)
        if key not in ids:
            ids[key] = len(configs)
            configs.append(key)
            succ.append(())
            boundary.append(abs(w) > window)
            queue.append(ids[key])
        return ids[key]

    for q in range(d.size):
        intern(q, 0)
    while queue:
        index = queue.popleft()
        q, w = configs[index]
        if boundary[index] or not phi[q] or (psi[q] and compare(w, cmp, k)):
            continue
        succ[index] = tuple(intern(s, w + weight) for weight, s in d.out_edges[q])

    def solve(boundary_value):
        good = np.zeros(len(configs), dtype=bool)
        for index, (q, w) in enumerate(configs):
            if psi[q] and compare(w, cmp, k):
                good[index] = True
            elif boundary[index]:
                good[index] = boundary_value
        changed = True
        while changed:
            changed = False
            for index in range(len(configs)):
                if good[index] or not succ[index]:
                    continue
                values = [good[s] for s in succ[index]]
                if any(values) if quantifier == "E" else all(values):
                    good[index] = True
                    changed = True
        return good

    optimistic, pessimistic = solve(True), solve(False)
    verdicts = []
    for q in range(d.size):
        index = ids[(q, 0)]
        verdicts.append(bool(pessimistic[index]) if optimistic[index] == pessimistic[index] else None)
    logger.debug(f"Windowed product with window {window}: {len(configs)} configurations")
    return verdicts
