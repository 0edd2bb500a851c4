"""Exact model checking of the nonnegative counting fragments (CCTL1, CCTL, CCTLb1, CCTLb).

Each constrained until is solved on the product of the structure with capped counters.
A counter holds one linear sum of the constraint over the strict prefix of the run;
atoms that share the same sum share the counter, which is capped at the largest of
their bounds plus one. Leaving a state adds that state's contribution.
"""
import logging
from collections import deque

import numpy as np

import config
from engines.ctl import Labeler
from models.formula import DUR, TRUE_C, Not, Until, compare, constraint_atoms
from models.kripke import RunPrefix
from utils.constraints import evaluate_atoms, holds
from utils.errors import FragmentError, ResourceCapExceeded
from utils.fragments import classify_fragment
from utils.parser import print_formula

logger = logging.getLogger(__name__)


class CounterProduct:
    """
    Configuration graph of one until modality: nodes are (state, capped counter vector).

    Only configurations that satisfy the left operand and are not accepting are expanded;
    the others are leaves of the graph.
    """

    def __init__(self, structure, node, table, cap=None):
        self.structure = structure
        self.node = node
        self.cap = cap if cap is not None else config.CONFIGURATION_CAP
        self.phi = table.mask(node.lhs)
        self.psi = table.mask(node.rhs)
        self.constraint = node.constraint if node.constraint is not None else TRUE_C
        sums = {}
        for atom in constraint_atoms(self.constraint):
            if any(coeff < 0 for coeff, _ in atom.terms):
                raise FragmentError(f"negative coefficient in {print_formula(node)}")
            sums[atom.terms] = max(sums.get(atom.terms, 0), atom.bound)
        self.sums = list(sums)
        self.slot = {terms: i for i, terms in enumerate(self.sums)}
        self.caps = tuple(max(bound, 0) + 1 for bound in sums.values())
        self.contribution = [
            tuple(sum(coeff for coeff, counted in terms if table.mask(counted)[q]) for terms in self.sums)
            for q in range(structure.size)
        ]
        self._accepts = {}
        self.configs = []
        self.ids = {}
        self.succ = []
        self.expanded = []

    def constraint_holds(self, values):
        result = self._accepts.get(values)
        if result is None:
            result = evaluate_atoms(
                self.constraint, lambda atom: compare(values[self.slot[atom.terms]], atom.cmp, atom.bound)
            )
            self._accepts[values] = result
        return result

    def accepting(self, index):
        q, values = self.configs[index]
        return bool(self.psi[q]) and self.constraint_holds(values)

    def _intern(self, config_):
        index = self.ids.get(config_)
        if index is None:
            if len(self.configs) >= self.cap:
                raise ResourceCapExceeded("counter configurations", self.cap,
                                          modality=print_formula(self.node))
            index = len(self.configs)
            self.ids[config_] = index
            self.configs.append(config_)
            self.succ.append(())
            self.expanded.append(False)
        return index

    def step(self, q, values):
        delta = self.contribution[q]
        return tuple(min(v + d, c) for v, d, c in zip(values, delta, self.caps))

    def explore(self, starts):
        """Build the configuration graph reachable from (q, 0...0) for every ``q`` in ``starts``."""
        zero = tuple(0 for _ in self.sums)
        queue = deque()
        roots = []
        for q in starts:
            index = self._intern((q, zero))
            roots.append(index)
            queue.append(index)
        seen = set(roots)
        while queue:
            index = queue.popleft()
            q, values = self.configs[index]
            if not self.phi[q] or self.accepting(index):
                continue
            following = self.step(q, values)
            succ = tuple(self._intern((s, following)) for s in self.structure.successors[q])
            self.succ[index] = succ
            self.expanded[index] = True
            for s in succ:
                if s not in seen:
                    seen.add(s)
                    queue.append(s)
        logger.debug(f"{len(self.configs)} configurations for {print_formula(self.node)}")
        return roots

    def solve(self):
        """Good configurations: those satisfying the modality."""
        count = len(self.configs)
        good = np.zeros(count, dtype=bool)
        preds = [[] for _ in range(count)]
        for index in range(count):
            for s in set(self.succ[index]):
                preds[s].append(index)
        queue = deque()
        for index in range(count):
            if self.accepting(index):
                good[index] = True
                queue.append(index)
        universal = self.node.quantifier == "A"
        remaining = [len(set(s)) for s in self.succ]
        while queue:
            index = queue.popleft()
            for p in preds[index]:
                if good[p] or not self.expanded[p]:
                    continue
                if universal:
                    remaining[p] -= 1
                    if remaining[p]:
                        continue
                good[p] = True
                queue.append(p)
        return good

    def path_to_accepting(self, root, good):
        """Shortest configuration path from ``root`` to an accepting configuration."""
        parent = {root: None}
        queue = deque([root])
        while queue:
            index = queue.popleft()
            if self.accepting(index):
                path = []
                while index is not None:
                    path.append(self.configs[index][0])
                    index = parent[index]
                return RunPrefix(reversed(path))
            for s in self.succ[index]:
                if s not in parent and good[s]:
                    parent[s] = index
                    queue.append(s)
        return None

    def violating_run(self, root, good):
        """A run from ``root`` that never satisfies the modality: a violating prefix or a lasso."""
        path = [root]
        position = {root: 0}
        while True:
            index = path[-1]
            if not self.expanded[index]:
                return RunPrefix(self.configs[i][0] for i in path)
            bad = [s for s in self.succ[index] if not good[s]]
            following = bad[0]
            if following in position:
                return RunPrefix((self.configs[i][0] for i in path), loop_start=position[following])
            position[following] = len(path)
            path.append(following)


class CountingLabeler(Labeler):
    """Labeler solving constrained untils on the capped-counter product"""

    name = "counting"

    def __init__(self, structure, table=None, cap=None):
        super().__init__(structure, table)
        self.cap = cap

    def product(self, node):
        product = CounterProduct(self.structure, node, self.table, self.cap)
        product.explore(range(self.structure.size))
        return product

    def label_constrained(self, node):
        product = self.product(node)
        good = product.solve()
        logger.debug(f"Solved {print_formula(node)} over {len(product.configs)} configurations")
        return np.array([good[product.ids[(q, tuple(0 for _ in product.sums))]]
                         for q in range(self.structure.size)], dtype=bool)


def _check_fragment(f):
    descriptor = classify_fragment(f)
    if (descriptor.negative_coefficients or descriptor.uses_variables
            or descriptor.uses_cumulative or descriptor.uses_duration):
        raise FragmentError(f"the counting engine does not handle {descriptor.fragment_name}")
    return descriptor


def mc_counting(structure, f, cap=None):
    """
    Model-check a formula of a nonnegative counting fragment.

    Args:
        structure: KripkeStructure
        f: Formula without negative coefficients, variables, Now or DUR
        cap: Maximum number of configurations per modality (defaults to config.CONFIGURATION_CAP)

    Returns:
        StateSet of the satisfying states

    Raises:
        FragmentError: outside the nonnegative counting fragments
        ResourceCapExceeded: when a product graph grows beyond the cap
    """
    _check_fragment(f)
    return CountingLabeler(structure, cap=cap).label(f)


def prefix_satisfies(structure, prefix, c, table=None):
    """
    Evaluate constraint ``c`` on a finite prefix by direct counting (no capping).

    Counted formulas are labeled on ``structure`` first unless ``table`` already holds them.
    DUR counts the durations recorded on the prefix.
    """
    labeler = CountingLabeler(structure, table)
    for atom in constraint_atoms(c):
        for _, counted in atom.terms:
            if counted is not DUR:
                labeler.label(counted)

    def count(counted):
        if counted is DUR:
            return prefix.weight(structure)
        return prefix.count(labeler.mask(counted))

    return holds(c, count)


def counting_witness(structure, f, state, cap=None):
    """
    Witness or counterexample for the top-level modality of ``f`` at ``state``.

    Handles ``f`` of the form E/A phi U{C} psi and its negation. A true existential
    modality yields the run prefix reaching the target (the last state); a false
    universal one yields a violating prefix or a lasso.

    Returns:
        (kind, RunPrefix) with kind "witness" or "counterexample", or None when ``f``
        has no such run at ``state``
    """
    _check_fragment(f)
    negated = isinstance(f, Not)
    node = f.child if negated else f
    if not isinstance(node, Until):
        return None
    labeler = CountingLabeler(structure, cap=cap)
    labeler.label(node)
    q = structure.state_index(state)
    product = CounterProduct(structure, node, labeler.table, cap)
    root = product.explore([q])[0]
    good = product.solve()
    kind = "counterexample" if negated else "witness"
    if node.quantifier == "E" and good[root]:
        return ("witness" if not negated else "counterexample"), product.path_to_accepting(root, good)
    if node.quantifier == "A" and not good[root]:
        return ("counterexample" if not negated else "witness"), product.violating_run(root, good)
    logger.debug(f"No {kind} run for {print_formula(f)} at {structure.names[q]}")
    return None


def check(structure, f, cap=None, **options):
    return mc_counting(structure, f, cap)
