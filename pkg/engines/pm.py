"""Model checking single-atom counting constraints with integer coefficients.

Each modality E/A phi U{sum a_i #phi_i cmp k} psi is reduced to a TCTL modality over a
durational structure with durations in {-1, 0, 1}: every state q is followed by a chain
of |cost(q)| unit-duration transitions, where cost(q) is the sum of the a_i with
q |= phi_i. Boolean constraints with nonnegative coefficients fall back to the
capped-counter product.
"""
import logging
from collections import deque

import config
from engines.counting import CountingLabeler
from engines.dks import mc_tctl_dks
from models.formula import (
    DUR, UNTIL_TYPES, And, Atom, AtomicConstraint, Until, compare, implies,
)
from models.kripke import DurationalKS, RunPrefix
from utils.errors import FragmentError, ResourceCapExceeded
from utils.fragments import classify_fragment
from utils.parser import print_constraint, print_formula

logger = logging.getLogger(__name__)

OK, PHI_HAT, PSI_HAT = "ok", "phi_hat", "psi_hat"


def state_costs(structure, constraint, table):
    """Per-state cost: the sum of the coefficients whose counted formula holds at the state."""
    costs = [0] * structure.size
    for coeff, counted in constraint.terms:
        if counted is DUR:
            raise FragmentError("DUR cannot be mixed into a counting constraint")
        mask = table.mask(counted)
        for q in range(structure.size):
            if mask[q]:
                costs[q] += coeff
    return costs


def reduce_to_dks(structure, constraint, table, phi=None, psi=None, cap=None):
    """
    Expand every state into a chain of unit-duration transitions.

    A state q with cost n gets the chain q -0-> q0 -d-> q1 ... -d-> q|n| -0-> successors of q,
    with d the sign of n. Original states keep indices 0..|Q|-1 and are labeled ``ok``
    (plus ``phi_hat``/``psi_hat`` where the given masks hold); chain states are unlabeled.

    Args:
        structure: KripkeStructure
        constraint: AtomicConstraint whose counted formulas are labeled in ``table``
        table: LabelingTable of ``structure``
        phi: Optional mask marked with ``phi_hat``
        psi: Optional mask marked with ``psi_hat``
        cap: Maximum number of states of the result (defaults to config.CHAIN_CAP)

    Returns:
        (DurationalKS, name of the proposition marking original states)

    Raises:
        ResourceCapExceeded: when the chains need more states than ``cap``
    """
    cap = cap if cap is not None else config.CHAIN_CAP
    costs = state_costs(structure, constraint, table)
    n = structure.size
    required = n + sum(abs(cost) + 1 for cost in costs)
    if required > cap:
        raise ResourceCapExceeded("reduced DKS states", cap, required=required,
                                  modality=print_constraint(constraint))
    names = list(structure.names)
    labels = []
    for q in range(n):
        label = {OK}
        if phi is not None and phi[q]:
            label.add(PHI_HAT)
        if psi is not None and psi[q]:
            label.add(PSI_HAT)
        labels.append(label)
    transitions = []
    taken = set(names)
    for q, cost in enumerate(costs):
        step = 1 if cost > 0 else -1
        chain = []
        for i in range(abs(cost) + 1):
            name = f"{structure.names[q]}.c{i}"
            while name in taken:
                name += "'"
            taken.add(name)
            chain.append(len(names))
            names.append(name)
            labels.append(set())
        transitions.append((q, 0, chain[0]))
        for src, dst in zip(chain, chain[1:]):
            transitions.append((src, step, dst))
        for s in structure.successors[q]:
            transitions.append((chain[-1], 0, s))
    dks = DurationalKS(names, transitions, labels, {OK, PHI_HAT, PSI_HAT})
    logger.debug(f"Reduced {n} states to a DKS of {dks.size} states")
    return dks, OK


class PolyLabeler(CountingLabeler):
    """Labeler reducing single-atom constraints to TCTL over durations in {-1, 0, 1}"""

    name = "polytime"

    def __init__(self, structure, table=None, cap=None, chain_cap=None, dump=None, gadgets=None):
        super().__init__(structure, table, cap)
        self.chain_cap = chain_cap
        self.dump = dump
        self.gadgets = gadgets

    def label_constrained(self, node):
        if not isinstance(node.constraint, AtomicConstraint):
            return super().label_constrained(node)
        constraint = node.constraint
        dks, ok = reduce_to_dks(self.structure, constraint, self.table,
                                self.mask(node.lhs), self.mask(node.rhs), self.chain_cap)
        if self.dump is not None:
            self.dump.append((print_formula(node), dks))
        logger.info(f"Reduced {print_formula(node)} to a DKS of {dks.size} states")
        query = UNTIL_TYPES[node.quantifier](
            implies(Atom(ok), Atom(PHI_HAT)),
            AtomicConstraint(((1, DUR),), constraint.cmp, constraint.bound),
            And(Atom(ok), Atom(PSI_HAT)),
        )
        return mc_tctl_dks(dks, query, self.gadgets).mask[:self.structure.size]


def _check_fragment(f):
    descriptor = classify_fragment(f)
    if descriptor.uses_variables or descriptor.uses_cumulative or descriptor.uses_duration:
        raise FragmentError(f"the polytime engine does not handle {descriptor.fragment_name}")
    if descriptor.negative_coefficients and descriptor.boolean_constraints:
        raise FragmentError(f"the polytime engine needs single-atom constraints for {descriptor.fragment_name}")
    return descriptor


def mc_cctl_pm(structure, f, chain_cap=None, dump=None, gadgets=None):
    """
    Model-check a formula whose signed constraints are single atoms.

    Args:
        structure: KripkeStructure
        f: Formula of CCTL1, CCTL+-1 or CCTL+- (Boolean constraints allowed when nonnegative)
        chain_cap: Maximum size of each reduced DKS (defaults to config.CHAIN_CAP)
        dump: Optional list collecting (modality text, reduced DKS) pairs
        gadgets: Optional list collecting the AU gadgets built while checking the reduced DKS

    Returns:
        StateSet of the satisfying states

    Raises:
        FragmentError: for variables, Now, DUR, or signed Boolean constraints
        ResourceCapExceeded: when a chain expansion is too large
    """
    _check_fragment(f)
    return PolyLabeler(structure, chain_cap=chain_cap, dump=dump, gadgets=gadgets).label(f)


def pm_witness(structure, f, state, chain_cap=None):
    """
    Witness prefix for a true top-level E phi U{C} psi with a single-atom constraint.

    Breadth-first search over (state, prefix sum) pairs with a widening window on the
    sum; the returned prefix ends in the psi-state and satisfies the constraint.

    Returns:
        RunPrefix of ``structure``, or None when the modality does not hold at ``state``
    """
    _check_fragment(f)
    if not isinstance(f, Until) or f.quantifier != "E" or not isinstance(f.constraint, AtomicConstraint):
        return None
    labeler = PolyLabeler(structure, chain_cap=chain_cap)
    q0 = structure.state_index(state)
    if not labeler.label(f).mask[q0]:
        return None
    phi, psi = labeler.mask(f.lhs), labeler.mask(f.rhs)
    constraint = f.constraint
    costs = state_costs(structure, constraint, labeler.table)
    spread = max((abs(c) for c in costs), default=0)
    window = structure.size * (spread + 1) + abs(constraint.bound) + 1
    while window <= config.ORACLE_CAP:
        parent = {(q0, 0): None}
        queue = deque([(q0, 0)])
        while queue:
            q, total = queue.popleft()
            if psi[q] and compare(total, constraint.cmp, constraint.bound):
                path = []
                node = (q, total)
                while node is not None:
                    path.append(node[0])
                    node = parent[node]
                return RunPrefix(reversed(path))
            if not phi[q]:
                continue
            following = total + costs[q]
            if abs(following) > window:
                continue
            for s in structure.successors[q]:
                if (s, following) not in parent:
                    parent[(s, following)] = (q, total)
                    queue.append((s, following))
        window *= 2
    logger.warning(f"No witness found for {print_formula(f)} within window {window}")
    return None


def check(structure, f, chain_cap=None, reductions=None, gadgets=None, **options):
    return mc_cctl_pm(structure, f, chain_cap, dump=reductions, gadgets=gadgets)
