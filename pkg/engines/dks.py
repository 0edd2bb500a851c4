"""TCTL model checking over durational Kripke structures with durations in {-1, 0, 1}.

Existential modalities are solved directly on weight matrices (shortest walks for
``<=``/``>=``, exact-weight reachability for ``=``). Universal modalities are solved
by building a plain Kripke structure (``AuGadget``) and a CTL formula that holds at
the starting copy of a state exactly when the modality fails there.
"""
import logging
from functools import cached_property

import numpy as np

from engines.ctl import Labeler, exists_until
from models.formula import (
    DUR, FLIPPED, And, Atom, AtomicConstraint, ExistsUntil, Not, Or, exists_globally,
)
from models.kripke import ARBITRARY, DurationalKS, KripkeStructure
from models.results import StateSet
from utils.errors import FragmentError
from utils.fragments import classify_fragment
from utils.matrices import (
    bool_product, floyd_warshall, identity, least_fixpoint, reflexive_transitive_closure,
    threshold_reachability,
)
from utils.parser import print_formula

logger = logging.getLogger(__name__)

OK, PHI_HAT, PSI_HAT = "ok", "phi_hat", "psi_hat"

# comparator -> (Q+ ok, Q- ok, init ok, mask states above k, mask states below k)
GADGET_LABELING = {
    "=": (True, True, True, False, False),
    "<=": (True, False, False, False, True),
    ">=": (False, True, True, True, False),
}


def weight_relations(d, region=None, cut=None):
    """
    Boolean adjacency per duration (-1, 0, 1), optionally restricted.

    Args:
        d: DurationalKS
        region: Mask of states to keep (edges leaving or entering other states are dropped)
        cut: Mask of states whose outgoing edges are dropped
    """
    keep = np.ones((d.size, d.size), dtype=bool)
    if region is not None:
        keep &= region[:, None] & region[None, :]
    if cut is not None:
        keep &= ~cut[:, None]
    return tuple(d.weight_matrix(w) & keep for w in (-1, 0, 1))


def split_graph(relations, mask):
    """
    Start, middle and end copies of a graph: walks from a start copy to an end copy are
    exactly the non-empty walks whose interior states satisfy ``mask``.
    """
    n = len(mask)
    result = []
    for relation in relations:
        big = np.zeros((3 * n, 3 * n), dtype=bool)
        big[:n, n:2 * n] = relation & mask[None, :]
        big[n:2 * n, n:2 * n] = relation & mask[:, None] & mask[None, :]
        big[n:2 * n, 2 * n:] = relation & mask[:, None]
        big[:n, 2 * n:] = relation
        result.append(big)
    return tuple(result)


def end_block(relation):
    n = len(relation) // 3
    return relation[:n, 2 * n:]


def nonnegative_zero_walks(em1, e0, e1):
    """Walks of weight 0 whose prefixes all have weight >= 0 (reflexive)."""
    return least_fixpoint(lambda x: x | bool_product(x, e1, x, em1, x), reflexive_transitive_closure(e0))


def nonpositive_zero_walks(em1, e0, e1):
    """Walks of weight 0 whose prefixes all have weight <= 0 (reflexive)."""
    return least_fixpoint(lambda x: x | bool_product(x, em1, x, e1, x), reflexive_transitive_closure(e0))


def zero_walks(em1, e0, e1):
    """All walks of weight 0 (reflexive)."""
    return least_fixpoint(
        lambda x: x | bool_product(x, e1, x, em1, x) | bool_product(x, em1, x, e1, x),
        reflexive_transitive_closure(e0),
    )


class ZeroWeightRelations:
    """
    The weight-0 reachability relations of a {-1, 0, 1} graph.

    ``above``/``below`` restrict the interior states of excursions that go strictly
    above/below the starting weight; the plain ``r0``, ``rp0`` and ``rm0`` are unrestricted.
    """

    def __init__(self, em1, e0, e1, above=None, below=None):
        n = len(e0)
        self.em1, self.e0, self.e1 = em1, e0, e1
        self.above = above if above is not None else np.ones(n, dtype=bool)
        self.below = below if below is not None else np.ones(n, dtype=bool)

    @cached_property
    def r0(self):
        return zero_walks(self.em1, self.e0, self.e1)

    @cached_property
    def rp0(self):
        return nonnegative_zero_walks(self.em1, self.e0, self.e1)

    @cached_property
    def rm0(self):
        return nonpositive_zero_walks(self.em1, self.e0, self.e1)

    @cached_property
    def _upper(self):
        em1, e0, e1 = split_graph((self.em1, self.e0, self.e1), self.above)
        return em1, e1, nonnegative_zero_walks(em1, e0, e1)

    @cached_property
    def _lower(self):
        em1, e0, e1 = split_graph((self.em1, self.e0, self.e1), self.below)
        return em1, e0, e1, nonpositive_zero_walks(em1, e0, e1)

    @cached_property
    def rp0_step(self):
        """Non-empty weight-0 walks with nonnegative prefixes and interior in ``above``."""
        return end_block(self._upper[2])

    @cached_property
    def rm0_step(self):
        """Non-empty weight-0 walks with nonpositive prefixes and interior in ``below``."""
        return end_block(self._lower[3])

    @cached_property
    def r0s(self):
        """Weight-0 walks that visit no intermediate state at weight 0."""
        em1_up, e1_up, rp0_up = self._upper
        em1_down, _, e1_down, rm0_down = self._lower
        up = end_block(bool_product(e1_up, rp0_up, em1_up))
        down = end_block(bool_product(em1_down, rm0_down, e1_down))
        return self.e0 | up | down

    @cached_property
    def first_hit(self):
        """Walks of weight 1 whose proper prefixes have weight <= 0, interior in ``below``."""
        _, _, e1_down, rm0_down = self._lower
        return end_block(bool_product(rm0_down, e1_down))


def r0_fixpoints(d, above=None, below=None):
    """
    Weight-0 relations of a DKS with durations in {-1, 0, 1}.

    Returns:
        (R0, Rp0, Rm0, R0s) as Boolean matrices
    """
    relations = ZeroWeightRelations(*weight_relations(d), above=above, below=below)
    return relations.r0, relations.rp0, relations.rm0, relations.r0s


def rk_dichotomy(r0, r1, k, junction=None):
    """
    R_k = R_floor(k/2) . R_ceil(k/2) from R_0 and R_1, in O(log k) products.

    ``junction`` restricts the states where two halves are glued together.
    """
    if k < 0:
        raise ValueError(f"rk_dichotomy expects k >= 0, got {k}")
    memo = {0: r0, 1: r1}

    def relation(j):
        if j not in memo:
            left, right = relation(j // 2), relation(j - j // 2)
            if junction is None:
                memo[j] = bool_product(left, right)
            else:
                memo[j] = bool_product(left[:, junction], right[junction, :])
        return memo[j]

    return relation(k)


def shortest_paths_ozo(d, region=None, cut=None):
    """
    All-pairs shortest walk weights of a {-1, 0, 1} DKS, optionally restricted.

    Returns:
        Float matrix: ``np.inf`` for unreachable pairs, ``-np.inf`` through negative cycles
    """
    em1, e0, e1 = weight_relations(d, region, cut)
    weights = np.full((d.size, d.size), np.inf)
    weights[e1] = 1.0
    weights[e0] = 0.0
    weights[em1] = -1.0
    return floyd_warshall(weights, floor=-(d.size + 1))


def normalize_comparison(cmp, k):
    """Integer shift of strict comparators: < k is <= k-1 and > k is >= k+1."""
    if cmp == "<":
        return "<=", k - 1
    if cmp == ">":
        return ">=", k + 1
    return cmp, k


def tctl_modality(node):
    """Quantifier, comparator and bound of E/A phi U{DUR cmp k} psi."""
    constraint = node.constraint
    if not isinstance(constraint, AtomicConstraint) or len(constraint.terms) != 1:
        raise FragmentError(f"unsupported duration constraint: {print_formula(node)}")
    coeff, counted = constraint.terms[0]
    if counted is not DUR or coeff not in (1, -1):
        raise FragmentError(f"unsupported duration constraint: {print_formula(node)}")
    if coeff == -1:
        return node.quantifier, FLIPPED[constraint.cmp], -constraint.bound
    return node.quantifier, constraint.cmp, constraint.bound


def exists_duration(d, phi, psi, cmp, k):
    """States satisfying E phi U{DUR cmp k} psi."""
    cmp, k = normalize_comparison(cmp, k)
    if cmp == ">=" or (cmp == "=" and k < 0):
        d, k = d.negated(), -k
        cmp = "<=" if cmp == ">=" else "="
    region = exists_until(d, phi, psi)
    cut = psi & ~phi
    if cmp == "<=":
        dist = shortest_paths_ozo(d, region, cut)
        return region & (dist[:, psi] <= k).any(axis=1)
    em1, e0, e1 = weight_relations(d, region, cut)
    r0 = zero_walks(em1, e0, e1)
    rk = rk_dichotomy(r0, bool_product(r0, e1, r0), k)
    return region & rk[:, psi].any(axis=1)


class AuGadget:
    """
    Kripke structure and CTL query deciding a universal duration modality.

    States are ordered as Q (weight exactly k), Q+ (above k for good), Q- (below k for
    good), Q-init (starting copies, only when k > 0) and a sink looping on itself.
    ``query`` holds at the starting copy of q iff the modality fails at q.
    """

    def __init__(self, d, phi, psi, cmp, k):
        if k < 0 or cmp not in GADGET_LABELING:
            raise ValueError(f"gadget expects <=, = or >= with k >= 0, got {cmp} {k}")
        n = d.size
        self.n = n
        self.cmp = cmp
        self.k = k
        plus_ok, minus_ok, init_ok, mask_above, mask_below = GADGET_LABELING[cmp]
        em1, e0, e1 = weight_relations(d)
        relations = ZeroWeightRelations(
            em1, e0, e1,
            above=~psi if mask_above else None,
            below=~psi if mask_below else None,
        )
        self.relations = relations
        parts = ["Q", "Q+", "Q-"] + (["init"] if k > 0 else [])
        self.offsets = {part: i * n for i, part in enumerate(parts)}
        self.sink = len(parts) * n
        size = self.sink + 1

        edges = np.zeros((size, size), dtype=bool)
        q, plus, minus = self.block("Q"), self.block("Q+"), self.block("Q-")
        edges[q, q] = relations.r0s
        edges[q, plus] = e1
        edges[plus, plus] = e1 | relations.rp0_step
        edges[q, minus] = em1
        edges[minus, minus] = em1 | relations.rm0_step
        if k > 0:
            init = self.block("init")
            edges[init, q] = rk_dichotomy(identity(n), relations.first_hit, k, junction=relations.below)
            lower = ~psi if mask_below else np.ones(n, dtype=bool)
            edges[init, minus] = end_block(threshold_reachability(_split_weights(d, lower), k, floor=-(3 * n + 2)))
        edges[:, self.sink] = True

        ok_parts = {"Q+": plus_ok, "Q-": minus_ok, "init": init_ok}
        labels = []
        for part in parts:
            for i in range(n):
                label = set()
                if phi[i]:
                    label.add(PHI_HAT)
                if psi[i]:
                    label.add(PSI_HAT)
                if ok_parts.get(part):
                    label.add(OK)
                labels.append(label)
        labels.append({PSI_HAT})
        names = _gadget_names(d.names, parts)
        self.structure = KripkeStructure(names, [np.flatnonzero(row) for row in edges], labels,
                                         {OK, PHI_HAT, PSI_HAT})
        allowed = Or(Not(Atom(PSI_HAT)), Atom(OK))
        self.query = Or(ExistsUntil(allowed, None, And(Not(Atom(PHI_HAT)), allowed)), exists_globally(allowed))
        self.start = self.offsets["init" if k > 0 else "Q"]
        logger.debug(f"AU gadget for {cmp} {k}: {size} states, {self.structure.transition_count} transitions")

    def block(self, part):
        start = self.offsets[part]
        return slice(start, start + self.n)

    def part_of(self, index):
        if index == self.sink:
            return "sink"
        return [part for part, start in self.offsets.items() if start <= index < start + self.n][0]

    def solve(self):
        """States of the original DKS where the universal modality holds."""
        failing = Labeler(self.structure).label(self.query).mask
        return ~failing[self.start:self.start + self.n]


def _split_weights(d, mask):
    """Float weight matrix of the split graph of ``d`` (np.inf where there is no edge)."""
    em1, e0, e1 = split_graph(weight_relations(d), mask)
    weights = np.full(e0.shape, np.inf)
    weights[e1] = 1.0
    weights[e0] = 0.0
    weights[em1] = -1.0
    return weights


def _gadget_names(names, parts):
    suffix = {"Q": "", "Q+": ".p", "Q-": ".m", "init": ".i"}
    result = [name + suffix[part] for part in parts for name in names]
    sink = "sink"
    while sink in result:
        sink += "'"
    result.append(sink)
    if len(set(result)) != len(result):
        result = [f"g{i}" for i in range(len(result))]
    return result


def build_au_gadget(d, phi, psi, cmp, k):
    """
    Gadget for A phi U{DUR cmp k} psi after normalizing the comparison.

    Returns:
        (gadget, negated): ``negated`` tells that durations were negated to make k >= 0
    """
    cmp, k = normalize_comparison(cmp, k)
    negated = False
    if k < 0:
        d, k, negated = d.negated(), -k, True
        cmp = FLIPPED[cmp]
    return AuGadget(d, phi, psi, cmp, k), negated


class DurationLabeler(Labeler):
    """Labeler for TCTL duration modalities on a DKS with durations in {-1, 0, 1}"""

    name = "dks"

    def __init__(self, structure, table=None, dump=None):
        super().__init__(structure, table)
        self.dump = dump

    def label_constrained(self, node):
        quantifier, cmp, k = tctl_modality(node)
        phi, psi = self.mask(node.lhs), self.mask(node.rhs)
        if quantifier == "E":
            return exists_duration(self.structure, phi, psi, cmp, k)
        gadget, _ = build_au_gadget(self.structure, phi, psi, cmp, k)
        if self.dump is not None:
            self.dump.append((print_formula(node), gadget.structure))
        logger.info(f"AU gadget for {print_formula(node)}: {gadget.structure.size} states")
        return gadget.solve()


def mc_tctl_dks(d, f, dump=None):
    """
    Model-check a TCTL formula over a DKS with durations in {-1, 0, 1}.

    Args:
        d: DurationalKS
        f: Formula whose constrained untils are E/A phi U{DUR cmp k} psi
        dump: Optional list collecting (modality text, gadget structure) pairs

    Returns:
        StateSet of the satisfying states

    Raises:
        FragmentError: on durations outside {-1, 0, 1} or unsupported modalities
    """
    if not isinstance(d, DurationalKS):
        raise FragmentError("TCTL model checking needs a durational Kripke structure")
    if d.weight_class == ARBITRARY:
        raise FragmentError(f"durations {d.weights} are outside {{-1, 0, 1}}")
    descriptor = classify_fragment(f)
    if descriptor.fragment_name not in ("TCTL", "CTL"):
        raise FragmentError(f"mc_tctl_dks expects a TCTL formula, got {descriptor.fragment_name}")
    return DurationLabeler(d, dump=dump).label(f)


def check(structure, f, gadgets=None, **options):
    """
    Registry entry point. Durations outside {-1, 0, 1} go through the embedding into a
    Kripke structure with counted transition states.
    """
    if isinstance(structure, DurationalKS) and structure.weight_class == ARBITRARY:
        from engines.counting import mc_counting
        from engines.pm import mc_cctl_pm
        from generators.dks_embedding import generate

        embedded, transform = generate(structure)
        g = transform(f)
        logger.info(f"Durations {structure.weights} embedded into {embedded.size} states")
        checker = mc_cctl_pm if min(structure.weights) < 0 else mc_counting
        return StateSet(checker(embedded, g).mask[:structure.size])
    return mc_tctl_dks(structure, f, gadgets)
