"""Sequentially nested satisfiability instances as counting model-checking queries.

Block i asks whether some assignment of x_i_1..x_i_m satisfies phi_i given the values
of z_1..z_(i-1). The structure is a chain of diamonds: one per z-variable (z_i or zbar_i,
from q_p down to q_0) and then one per x-variable, blocks in descending order, with
unlabeled bullet states between x-diamonds, ending in the looping state qF. A run to qF
picks a valuation; the constraint of the query checks the clauses by counting.
"""
import itertools
import logging

from models.formula import (
    TT, Atom, AtomicConstraint, ExistsUntil, cconj, cdisj, cneg, ex, implies, neg,
)
from models.kripke import KripkeStructure
from utils.errors import ModelFormatError

logger = logging.getLogger(__name__)

Q, ZBAR, FINAL = "q", "zbar", "qF"


class SnsatInstance:
    """
    Blocks of 3-CNF clauses; a literal is (variable name, polarity) with variables
    named ``x{i}_{j}`` (1 <= j <= m) or ``z{l}`` (l < i) in block i.
    """

    def __init__(self, blocks, m):
        self.blocks = [[tuple((name, bool(positive)) for name, positive in clause) for clause in block]
                       for block in blocks]
        self.m = m
        self._validate()

    @property
    def p(self):
        return len(self.blocks)

    def _validate(self):
        if not self.blocks:
            raise ModelFormatError("SNSAT instance needs at least one block")
        if self.m < 1:
            raise ModelFormatError("SNSAT blocks need at least one x-variable")
        for i, block in enumerate(self.blocks, start=1):
            allowed = set(block_variables(i, self.m)) | {f"z{l}" for l in range(1, i)}
            for clause in block:
                if len(clause) != 3:
                    raise ModelFormatError(f"block {i}: clause {clause} does not have three literals")
                for name, _ in clause:
                    if name not in allowed:
                        raise ModelFormatError(f"block {i}: variable {name} is not allowed")

    def to_dict(self):
        return {"m": self.m, "blocks": [[[list(lit) for lit in clause] for clause in block]
                                        for block in self.blocks]}

    @classmethod
    def from_dict(cls, data):
        return cls(data["blocks"], int(data["m"]))


def block_variables(i, m):
    return [f"x{i}_{j}" for j in range(1, m + 1)]


def evaluate_snsat(inst):
    """
    Reference values of z_1..z_p by enumerating the assignments of each block.

    Returns:
        dict from ``z{i}`` to bool
    """
    values = {}
    for i, block in enumerate(inst.blocks, start=1):
        names = block_variables(i, inst.m)
        values[f"z{i}"] = any(
            all(any(assignment[name] == positive for name, positive in clause) for clause in block)
            for bits in itertools.product((False, True), repeat=len(names))
            for assignment in [{**values, **dict(zip(names, bits))}]
        )
    return values


def build_structure(inst):
    """The diamond chain; states are named q{i}, z{i}, zbar{i}, x{i}_{j}, xbar{i}_{j}, b{n} and qF."""
    names, labels, successors = [], [], []

    def add(name, label):
        names.append(name)
        labels.append(label)
        successors.append([])
        return len(names) - 1

    def diamond(sources, top, bottom):
        t, b = add(*top), add(*bottom)
        for s in sources:
            successors[s] += [t, b]
        return [t, b]

    sources = [add(f"q{inst.p}", {Q})]
    for i in range(inst.p, 0, -1):
        ends = diamond(sources, (f"z{i}", {f"z{i}"}), (f"zbar{i}", {ZBAR}))
        q = add(f"q{i - 1}", {Q})
        for s in ends:
            successors[s].append(q)
        sources = [q]
    bullets = itertools.count(1)
    variables = [name for i in range(inst.p, 0, -1) for name in block_variables(i, inst.m)]
    for position, name in enumerate(variables):
        if position:
            bullet = add(f"b{next(bullets)}", set())
            for s in sources:
                successors[s].append(bullet)
            sources = [bullet]
        sources = diamond(sources, (name, {name}), (name.replace("x", "xbar", 1), set()))
    final = add(FINAL, {FINAL})
    for s in sources:
        successors[s].append(final)
    successors[final].append(final)
    declared = {Q, ZBAR, FINAL} | {f"z{i}" for i in range(1, inst.p + 1)} | set(variables)
    return KripkeStructure(names, successors, labels, declared)


def count_is(name, value):
    return AtomicConstraint(((1, Atom(name)),), "=", value)


def literal_constraint(literal):
    name, positive = literal
    atom = count_is(name, 1)
    return atom if positive else cneg(atom)


def block_constraint(block):
    """phi_i with every literal x replaced by #x = 1."""
    return cconj(*(cdisj(*(literal_constraint(lit) for lit in clause)) for clause in block))


def query(inst, k=None):
    """
    Psi_k = EX E(zbar -> !Psi_(k-1)) U{C_k} qF with Psi_0 = TT, where C_k requires
    phi_l for every visited z_l (l <= k) and phi_j when j q-states precede qF.
    """
    k = inst.p if k is None else k
    psi = TT
    for level in range(1, k + 1):
        chosen = [cdisj(cneg(count_is(f"z{l}", 1)), block_constraint(inst.blocks[l - 1]))
                  for l in range(1, level + 1)]
        counted = [cdisj(cneg(count_is(Q, j)), block_constraint(inst.blocks[j - 1]))
                   for j in range(1, level + 1)]
        constraint = cconj(*chosen, *counted)
        psi = ex(ExistsUntil(implies(Atom(ZBAR), neg(psi)), constraint, Atom(FINAL)))
    return psi


def generate(inst):
    """
    Returns:
        (KripkeStructure, Psi_p); Psi_p holds at z{i} iff z_i is true in ``inst``
    """
    structure = build_structure(inst)
    logger.info(f"SNSAT instance with {inst.p} blocks of {inst.m} variables: {structure.size} states")
    return structure, query(inst)
