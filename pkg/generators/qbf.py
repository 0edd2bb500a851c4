"""Quantified Boolean formulas as model-checking queries with counting variables.

For E x1 A x2 ... E x(2p-1) A x(2p) . phi, the structure is a chain of diamonds
q1 -> x1 | xbar1 -> q2 -> ... -> q(2p+1) where the literal states carry the clauses
they satisfy. Variable z_j counts the states of clause C_j along the run; the query
alternates EF and AF over the q-states and finally asks every z_j to be positive.
"""
import logging

from models.formula import (
    FF, TT, Atom, AtomicConstraint, Bind, ExistsUntil, Now, VarConstraint, conj, exists_finally,
    forall_finally,
)
from models.kripke import KripkeStructure
from utils.errors import ModelFormatError

logger = logging.getLogger(__name__)


class QbfInstance:
    """
    Matrix of 3-literal clauses over x1..x(2p); a literal is (variable index, polarity).
    Odd variables are existential, even ones universal.
    """

    def __init__(self, p, clauses):
        self.p = p
        self.clauses = [tuple((int(var), bool(positive)) for var, positive in clause) for clause in clauses]
        self._validate()

    def _validate(self):
        if self.p < 1:
            raise ModelFormatError("QBF instance needs at least one quantifier pair")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ModelFormatError(f"clause {clause} does not have three literals")
            for var, _ in clause:
                if not 1 <= var <= 2 * self.p:
                    raise ModelFormatError(f"literal over unknown variable x{var}")

    def to_dict(self):
        return {"p": self.p, "clauses": [[list(lit) for lit in clause] for clause in self.clauses]}

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["p"]), data["clauses"])


def evaluate_qbf(inst):
    """Truth of the instance by expanding the quantifier prefix."""
    count = 2 * inst.p

    def satisfied(assignment):
        return all(any(assignment[var - 1] == positive for var, positive in clause) for clause in inst.clauses)

    def value(prefix):
        if len(prefix) == count:
            return satisfied(prefix)
        branches = (value(prefix + (bit,)) for bit in (False, True))
        return any(branches) if len(prefix) % 2 == 0 else all(branches)

    return value(())


def clause_prop(j):
    return f"C{j}"


def build_structure(inst):
    """States q1..q(2p+1), x1..x(2p) and xbar1..xbar(2p); q(2p+1) loops."""
    names, labels, successors = [], [], []

    def add(name, label):
        names.append(name)
        labels.append(label)
        successors.append([])
        return len(names) - 1

    current = add("q1", {"q1"})
    for var in range(1, 2 * inst.p + 1):
        literal_states = []
        for positive, name in ((True, f"x{var}"), (False, f"xbar{var}")):
            label = {clause_prop(j) for j, clause in enumerate(inst.clauses, start=1) if (var, positive) in clause}
            literal_states.append(add(name, label))
        following = add(f"q{var + 1}", {f"q{var + 1}"})
        for s in literal_states:
            successors[current].append(s)
            successors[s].append(following)
        current = following
    successors[current].append(current)
    declared = {f"q{i}" for i in range(1, 2 * inst.p + 2)}
    declared |= {clause_prop(j) for j in range(1, len(inst.clauses) + 1)}
    return KripkeStructure(names, successors, labels, declared)


def _alternation(inst, goal):
    body = goal
    for i in range(2 * inst.p + 1, 1, -1):
        modality = exists_finally if i % 2 == 0 else forall_finally
        body = modality(conj(Atom(f"q{i}"), body))
    return body


def query(inst):
    """z1[C1]...zm[Cm].EF(q2 & AF(q3 & ... AF(q(2p+1) & z1 >= 1 & ... & zm >= 1)))"""
    variables = [f"z{j}" for j in range(1, len(inst.clauses) + 1)]
    goal = conj(*(VarConstraint(((1, z),), ">=", 1) for z in variables))
    f = _alternation(inst, goal)
    for j in range(len(inst.clauses), 0, -1):
        f = Bind(variables[j - 1], Atom(clause_prop(j)), f)
    return f


def cumulative_query(inst):
    """The same alternation read cumulatively: the goal counts the clauses over the whole run."""
    goal = conj(*(ExistsUntil(FF, AtomicConstraint(((1, Atom(clause_prop(j))),), ">=", 1), TT)
                  for j in range(1, len(inst.clauses) + 1)))
    return Now(_alternation(inst, goal))


def generate(inst, cumulative=False):
    """
    Returns:
        (KripkeStructure, query) where the query holds at q1 iff ``inst`` is true
    """
    structure = build_structure(inst)
    logger.info(f"QBF instance with {2 * inst.p} variables and {len(inst.clauses)} clauses: "
                f"{structure.size} states")
    return structure, cumulative_query(inst) if cumulative else query(inst)
