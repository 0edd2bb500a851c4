"""CTL satisfiability by Hintikka-atom elimination.

An atom fixes the truth of every proposition of the formula and of every next-step
obligation EX g / EX !g the formula gives rise to; the truth of all other subformulas
follows from the fixpoint unfoldings of EU, AU and AX. Atoms failing local obligations
or eventualities are eliminated until stable, and a witness model is read off the
surviving atoms with a round-robin focus on eventualities.
"""
import logging

import numpy as np

import config
from engines.ctl import Labeler
from models.formula import (
    And, Atom, FalseF, Not, Or, TrueF, Until, next_operand, subformulas,
)
from models.kripke import KripkeStructure
from models.results import SatResult
from utils.errors import CCTLError, FragmentError, ResourceCapExceeded
from utils.fragments import classify_fragment
from utils.parser import print_formula

logger = logging.getLogger(__name__)

UNRANKED = np.iinfo(np.int64).max


class Closure:
    """Truth vectors of every subformula of ``f`` over all atoms"""

    def __init__(self, f, cap=None):
        cap = cap if cap is not None else config.CLOSURE_CAP
        self.formula = f
        nodes = subformulas(f)
        self.props = sorted({node.name for node in nodes if isinstance(node, Atom)})
        obligations = []
        for node in nodes:
            if isinstance(node, Until):
                operand = next_operand(node)
                if operand is not None:
                    key = (operand, node.quantifier == "E")
                elif node.quantifier == "E":
                    key = (node, True)
                else:
                    key = (node, False)
                if key not in obligations:
                    obligations.append(key)
        self.obligations = obligations
        width = len(self.props) + len(obligations)
        if 2 ** width > cap:
            raise ResourceCapExceeded("Hintikka atoms", cap, required=2 ** width, modality=print_formula(f))
        self.size = 2 ** width
        bits = ((np.arange(self.size)[:, None] >> np.arange(width)) & 1).astype(bool)
        self.bits = bits
        self.next = {key: bits[:, len(self.props) + i] for i, key in enumerate(obligations)}
        self.value = {}
        for node in nodes:
            self.value[node] = self._evaluate(node, bits)
        self.targets = [self.value[g] if positive else ~self.value[g] for g, positive in obligations]
        self.eventualities = [node for node in nodes if isinstance(node, Until) and next_operand(node) is None]
        # bit i of hits[b]: target of obligation i holds at b; of refused[a]: obligation i is false at a
        self.full = (1 << len(obligations)) - 1
        self.hits = np.zeros(self.size, dtype=np.int64)
        for i, target in enumerate(self.targets):
            self.hits |= target.astype(np.int64) << i
        self.refused = self.full ^ (np.arange(self.size, dtype=np.int64) >> len(self.props))
        logger.debug(f"Closure of {print_formula(f)}: {len(self.props)} propositions, "
                     f"{len(obligations)} obligations, {self.size} atoms")

    def _evaluate(self, node, bits):
        value = self.value
        if isinstance(node, Atom):
            return bits[:, self.props.index(node.name)]
        if isinstance(node, TrueF):
            return np.ones(self.size, dtype=bool)
        if isinstance(node, FalseF):
            return np.zeros(self.size, dtype=bool)
        if isinstance(node, Not):
            return ~value[node.child]
        if isinstance(node, And):
            return value[node.lhs] & value[node.rhs]
        if isinstance(node, Or):
            return value[node.lhs] | value[node.rhs]
        operand = next_operand(node)
        if operand is not None:
            if node.quantifier == "E":
                return self.next[(operand, True)]
            return ~self.next[(operand, False)]
        if node.quantifier == "E":
            return value[node.rhs] | (value[node.lhs] & self.next[(node, True)])
        return value[node.rhs] | (value[node.lhs] & ~self.next[(node, False)])

    def allowed_from(self, atom):
        """Atoms satisfying none of the targets of the obligations false in ``atom``."""
        return (self.hits & self.refused[atom]) == 0

    def reachable_from(self, region):
        """
        Atoms with an allowed successor in ``region``.

        An atom a may step to b iff refused[a] & hits[b] == 0, so it is enough to mark
        every refusal pattern contained in the complement of some hits[b] with b in
        ``region``: a subset closure over the obligation bits.
        """
        open_patterns = np.zeros(self.full + 1, dtype=bool)
        open_patterns[self.full ^ self.hits[region]] = True
        for i in range(len(self.obligations)):
            view = open_patterns.reshape(-1, 2, 1 << i)
            view[:, 0, :] |= view[:, 1, :]
        return open_patterns[self.refused]


class Tableau:
    """Elimination over the atoms of a Closure"""

    def __init__(self, closure):
        self.closure = closure
        self.alive = np.ones(closure.size, dtype=bool)
        self.rounds = 0

    def successors_in(self, region):
        """Atoms with an allowed edge into ``region`` (restricted to live atoms)."""
        return self.closure.reachable_from(region & self.alive)

    def obligations_met(self, region):
        """Atoms whose true obligations all have an allowed successor in ``region``."""
        met = self.successors_in(region)
        for key, target in zip(self.closure.obligations, self.closure.targets):
            met &= ~self.closure.next[key] | self.successors_in(region & target)
        return met

    def ranks(self, node):
        """Iteration at which each atom enters the fulfilment fixpoint of an eventuality."""
        closure = self.closure
        holds = closure.value[node] & self.alive
        rhs = closure.value[node.rhs]
        rank = np.full(closure.size, UNRANKED, dtype=np.int64)
        region = holds & rhs
        rank[region] = 0
        level = 0
        while True:
            level += 1
            if node.quantifier == "E":
                grown = holds & self.successors_in(region & holds)
            else:
                grown = holds & self.obligations_met(region)
            grown &= ~region
            if not grown.any():
                return rank
            rank[grown] = level
            region |= grown

    def eliminate(self):
        """Remove atoms until every live atom meets its obligations and eventualities."""
        closure = self.closure
        while True:
            self.rounds += 1
            before = self.alive.copy()
            self.alive &= self.obligations_met(self.alive)
            for node in closure.eventualities:
                fulfilled = self.ranks(node) != UNRANKED
                self.alive &= ~closure.value[node] | fulfilled
            if np.array_equal(before, self.alive):
                break
        logger.debug(f"Elimination stable after {self.rounds} rounds: {int(self.alive.sum())} atoms left")
        return self.alive


class WitnessBuilder:
    """Model over (atom, focus) pairs reachable from one initial atom"""

    def __init__(self, tableau):
        self.tableau = tableau
        closure = tableau.closure
        self.closure = closure
        self.events = closure.eventualities
        self.rank = [tableau.ranks(node) for node in self.events]
        self.pending = [closure.value[node] & ~closure.value[node.rhs] for node in self.events]

    def focus(self, atom, start):
        count = len(self.events)
        for step in range(count):
            i = (start + step) % count
            if self.pending[i][atom]:
                return i
        return start % count if count else 0

    def pick(self, atom, target, below=None):
        """Least live atom reachable from ``atom`` inside ``target``, lowest rank first when ranked."""
        candidates = np.flatnonzero(self.closure.allowed_from(atom) & self.tableau.alive & target)
        if below is not None:
            rank, limit = below
            candidates = [int(b) for b in candidates if rank[b] < limit]
            if not candidates:
                return None
            return min(candidates, key=lambda b: (rank[b], b))
        return int(candidates[0]) if len(candidates) else None

    def successors(self, atom, focus):
        closure = self.closure
        count = len(self.events)
        following = (focus + 1) % count if count else 0
        ranked_au = None
        if count and self.pending[focus][atom] and self.events[focus].quantifier == "A":
            ranked_au = (self.rank[focus], self.rank[focus][atom])
        result = []
        everything = np.ones(closure.size, dtype=bool)
        requests = [(key, target) for key, target in zip(closure.obligations, closure.targets)
                    if closure.next[key][atom]]
        if not requests:
            requests = [(None, everything)]
        for key, target in requests:
            if ranked_au is not None:
                b = self.pick(atom, target, ranked_au)
                result.append((b, self.focus(b, focus)))
            elif count and key == (self.events[focus], True) and self.pending[focus][atom]:
                b = self.pick(atom, target, (self.rank[focus], self.rank[focus][atom]))
                result.append((b, self.focus(b, focus)))
            else:
                b = self.pick(atom, target)
                result.append((b, self.focus(b, following)))
        if any(b is None for b, _ in result):
            raise CCTLError(f"tableau has no successor for atom {atom}")
        return result

    def build(self, initial):
        """
        Build the witness structure rooted at ``initial``.

        Returns:
            KripkeStructure whose state 0 is the initial (atom, focus) pair
        """
        closure = self.closure
        start = (initial, self.focus(initial, 0))
        index = {start: 0}
        order = [start]
        successors = []
        position = 0
        while position < len(order):
            atom, focus = order[position]
            succ = []
            for pair in self.successors(atom, focus):
                if pair not in index:
                    index[pair] = len(order)
                    order.append(pair)
                succ.append(index[pair])
            successors.append(succ)
            position += 1
        labels = [{p for i, p in enumerate(closure.props) if closure.bits[atom, i]} for atom, _ in order]
        names = [f"s{i}" for i in range(len(order))]
        return KripkeStructure(names, successors, labels, set(closure.props))


def sat_ctl(f, cap=None):
    """
    Decide satisfiability of a CTL formula.

    Args:
        f: CTL formula
        cap: Maximum number of Hintikka atoms (defaults to config.CLOSURE_CAP)

    Returns:
        SatResult; a SAT result carries a witness structure certified by mc_ctl at ``initial``

    Raises:
        FragmentError: if ``f`` is not a CTL formula
    """
    descriptor = classify_fragment(f)
    if descriptor.fragment_name != "CTL":
        raise FragmentError(f"sat_ctl expects a CTL formula, got {descriptor.fragment_name}")
    try:
        closure = Closure(f, cap)
    except ResourceCapExceeded as e:
        logger.warning(f"Tableau capped: {e}")
        return SatResult(SatResult.CAPPED, fragment="CTL", reason=str(e))
    tableau = Tableau(closure)
    alive = tableau.eliminate()
    candidates = np.flatnonzero(alive & closure.value[f])
    if not len(candidates):
        logger.info(f"{print_formula(f)} is unsatisfiable ({closure.size} atoms)")
        return SatResult(SatResult.UNSAT, fragment="CTL")
    witness = WitnessBuilder(tableau).build(int(candidates[0]))
    if not Labeler(witness).label(f).mask[0]:
        raise CCTLError(f"tableau witness does not satisfy {print_formula(f)}")
    logger.info(f"{print_formula(f)} is satisfiable; witness of {witness.size} states")
    return SatResult(SatResult.SAT, witness=witness, initial=0, fragment="CTL")
