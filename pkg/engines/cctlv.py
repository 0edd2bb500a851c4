"""Direct model checking of closed formulas with counting variables.

Truth is computed on demand for configurations (state, formula, valuation) where the
valuation covers exactly the relevant variables of the formula and saturates just
above the largest constant. An until explores the configuration graph of its run
prefixes: leaving a state increments every variable whose counted formula holds there
under the current valuation.
"""
import logging
import threading
from collections import deque

import numpy as np

import config
from models.formula import (
    And, Atom, Bind, FalseF, Not, Or, TrueF, Until, VarConstraint, compare, dag_size, subformulas,
)
from models.results import StateSet
from models.valuation import Valuation
from translators import cctlc
from translators.binders import translate as embed_variables
from utils.errors import CCTLError, FragmentError, ResourceCapExceeded, UndecidableFragment, WellFormednessError
from utils.fragments import binder_environment, classify_fragment, free_variables, relevant_variables
from utils.parser import print_formula

logger = logging.getLogger(__name__)

relevant_vars = relevant_variables


class VariableChecker:
    """Memoized evaluation of one closed formula over one structure"""

    def __init__(self, structure, f, cap_slack=1, memo_cap=None):
        self.structure = structure
        self.environment, self.order = binder_environment(f)
        self.largest = max((abs(node.bound) for node in subformulas(f) if isinstance(node, VarConstraint)),
                           default=0)
        self.valuation = Valuation(self.order, self.largest + cap_slack)
        self.memo_cap = memo_cap if memo_cap is not None else config.MEMO_CAP
        self.max_depth = dag_size(f)
        self.depth = 0
        self.deepest = 0
        self.rv_memo = {}
        self.memo = {}
        self._lock = threading.Lock()

    def relevant(self, f):
        return relevant_variables(f, self.environment, self.rv_memo)

    def restricted(self, f, values):
        return self.valuation.restrict(values, self.relevant(f))

    def holds(self, q, f, values):
        """
        Truth of ``f`` at state ``q`` under ``values``.

        Args:
            q: State index
            f: Formula
            values: Tuple of (variable, value) pairs over exactly the relevant variables of ``f``
        """
        key = (q, f, values)
        result = self.memo.get(key)
        if result is not None:
            return result
        self.depth += 1
        self.deepest = max(self.deepest, self.depth)
        if self.depth > self.max_depth:
            raise CCTLError(f"evaluation nested deeper than the {self.max_depth} subformulas")
        try:
            result = self._evaluate(q, f, values)
        finally:
            self.depth -= 1
        with self._lock:
            if len(self.memo) >= self.memo_cap:
                raise ResourceCapExceeded("memo entries", self.memo_cap, modality=print_formula(f))
            return self.memo.setdefault(key, result)

    def _evaluate(self, q, f, values):
        v = dict(values)
        if isinstance(f, Atom):
            return f.name in self.structure.labels[q]
        if isinstance(f, TrueF):
            return True
        if isinstance(f, FalseF):
            return False
        if isinstance(f, Not):
            return not self.holds(q, f.child, values)
        if isinstance(f, And):
            return (self.holds(q, f.lhs, self.restricted(f.lhs, v))
                    and self.holds(q, f.rhs, self.restricted(f.rhs, v)))
        if isinstance(f, Or):
            return (self.holds(q, f.lhs, self.restricted(f.lhs, v))
                    or self.holds(q, f.rhs, self.restricted(f.rhs, v)))
        if isinstance(f, Bind):
            v[f.var] = 0
            return self.holds(q, f.body, self.restricted(f.body, v))
        if isinstance(f, VarConstraint):
            return compare(sum(coeff * v[var] for coeff, var in f.terms), f.cmp, f.bound)
        if isinstance(f, Until):
            if f.constraint is not None:
                raise FragmentError(f"constrained until left in a variable formula: {print_formula(f)}")
            if f.quantifier == "E":
                return self.exists_until(q, f, values)
            return self.forall_until(q, f, values)
        raise FragmentError(f"the cctlv engine does not handle {type(f).__name__} nodes")

    def step(self, q, values):
        """Valuation after leaving ``q``: counted formulas are read under ``values``."""
        v = dict(values)
        counted = {var for var, value in values if value < self.valuation.cap
                   and self.holds(q, self.environment[var], self.restricted(self.environment[var], v))}
        return self.valuation.bump(values, counted)

    def classify(self, q, f, values):
        """'accept' where the target holds, 'expand' where only the guard holds, else 'reject'."""
        v = dict(values)
        if self.holds(q, f.rhs, self.restricted(f.rhs, v)):
            return "accept"
        if self.holds(q, f.lhs, self.restricted(f.lhs, v)):
            return "expand"
        return "reject"

    def exists_until(self, q, f, values):
        seen = {(q, values)}
        queue = deque(seen)
        while queue:
            state, current = queue.popleft()
            kind = self.classify(state, f, current)
            if kind == "accept":
                return True
            if kind == "reject":
                continue
            following = self.step(state, current)
            for s in self.structure.successors[state]:
                if (s, following) not in seen:
                    seen.add((s, following))
                    queue.append((s, following))
        return False

    def forall_until(self, q, f, values):
        """
        A phi U psi fails iff some run leaves phi before psi, or stays in phi & !psi forever.
        Both are searched on the configurations reachable through phi & !psi.
        """
        start = (q, values)
        succ = {}
        queue = deque([start])
        seen = {start}
        while queue:
            state, current = queue.popleft()
            kind = self.classify(state, f, current)
            if kind == "reject":
                return False
            if kind == "accept":
                continue
            following = self.step(state, current)
            succ[(state, current)] = [(s, following) for s in self.structure.successors[state]]
            for config_ in succ[(state, current)]:
                if config_ not in seen:
                    seen.add(config_)
                    queue.append(config_)
        return not _has_cycle(succ)


def _has_cycle(succ):
    """Whether the graph restricted to the keys of ``succ`` has a cycle (Kahn's algorithm)."""
    indegree = {node: 0 for node in succ}
    for targets in succ.values():
        for t in set(targets):
            if t in indegree:
                indegree[t] += 1
    queue = deque(node for node, d in indegree.items() if d == 0)
    removed = 0
    while queue:
        node = queue.popleft()
        removed += 1
        for t in set(succ[node]):
            if t in indegree:
                indegree[t] -= 1
                if indegree[t] == 0:
                    queue.append(t)
    return removed < len(succ)


def check_cctlv(structure, f, cap_slack=1, memo_cap=None):
    """
    Model-check a closed formula with counting variables.

    Counting constraints, if any, are first replaced by variable binders.

    Args:
        structure: KripkeStructure
        f: Closed formula of CCTLv with nonnegative coefficients
        cap_slack: Values saturate at K + cap_slack, with K the largest constant
        memo_cap: Maximum number of memoized configurations (defaults to config.MEMO_CAP)

    Returns:
        StateSet of the satisfying states

    Raises:
        WellFormednessError: if ``f`` is not closed or its binders are ill-formed
        FragmentError: for negative coefficients, Now or DUR
        ResourceCapExceeded: when the memo grows beyond ``memo_cap``
    """
    free = free_variables(f)
    if free:
        raise WellFormednessError(f"formula is not closed: free variables {', '.join(sorted(free))}")
    descriptor = classify_fragment(f)
    if descriptor.negative_coefficients or descriptor.uses_cumulative or descriptor.uses_duration:
        raise FragmentError(f"the cctlv engine does not handle {descriptor.fragment_name}")
    if cap_slack < 1:
        raise ValueError("cap_slack must be at least 1")
    if any(isinstance(node, Until) and node.constraint is not None for node in subformulas(f)):
        f = embed_variables(f)
    checker = VariableChecker(structure, f, cap_slack, memo_cap)
    mask = np.array([checker.holds(q, f, ()) for q in range(structure.size)], dtype=bool)
    logger.info(f"Checked {descriptor.fragment_name} formula over {structure.size} states: "
                f"{len(checker.memo)} configurations, depth {checker.deepest}")
    return StateSet(mask)


def mc_cctlc(structure, f, cap_slack=1, memo_cap=None):
    """
    Model-check a cumulative formula at the empty history.

    Raises:
        UndecidableFragment: for negative coefficients
    """
    descriptor = classify_fragment(f)
    if descriptor.negative_coefficients:
        raise UndecidableFragment(descriptor)
    return check_cctlv(structure, cctlc.translate(f), cap_slack, memo_cap)


def check(structure, f, cap_slack=1, memo_cap=None, **options):
    """Registry entry point: cumulative formulas go through the variable translation."""
    if classify_fragment(f).uses_cumulative:
        return mc_cctlc(structure, f, cap_slack, memo_cap)
    return check_cctlv(structure, f, cap_slack, memo_cap)
