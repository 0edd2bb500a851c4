"""Seeded random structures, formulas and hardness instances for property tests and replay."""
import logging
import random

import config
from generators.qbf import QbfInstance
from generators.snsat import SnsatInstance, block_variables
from models.formula import (
    DUR, TT, And, Atom, AtomicConstraint, Bind, Not, Or, UNTIL_TYPES, VarConstraint, cconj, cdisj, cneg,
)
from models.kripke import DurationalKS, KripkeStructure

logger = logging.getLogger(__name__)

PROPS = ("P", "Q")
COMPARATOR_CHOICES = ("<", "<=", "=", ">=", ">")


def make_rng(seed=None):
    seed = config.DEFAULT_SEED if seed is None else seed
    logger.debug(f"Random instances seeded with {seed}")
    return random.Random(seed)


def random_structure(rng, size, props=PROPS, density=0.4):
    """Kripke structure whose states have at least one successor and random labels."""
    successors = []
    for q in range(size):
        succ = [s for s in range(size) if rng.random() < density]
        successors.append(succ or [rng.randrange(size)])
    labels = [{p for p in props if rng.random() < 0.5} for _ in range(size)]
    return KripkeStructure([f"s{q}" for q in range(size)], successors, labels, set(props))


def random_dks(rng, size, weights=(-1, 0, 1), props=PROPS, density=0.4):
    transitions = []
    for q in range(size):
        targets = [s for s in range(size) if rng.random() < density] or [rng.randrange(size)]
        for s in targets:
            transitions.append((q, rng.choice(weights), s))
            if rng.random() < 0.15:
                transitions.append((q, rng.choice(weights), s))
    labels = [{p for p in props if rng.random() < 0.5} for _ in range(size)]
    return DurationalKS([f"s{q}" for q in range(size)], transitions, labels, set(props))


def random_literal(rng, props=PROPS):
    choice = rng.random()
    if choice < 0.1:
        return TT
    atom = Atom(rng.choice(props))
    return Not(atom) if choice < 0.35 else atom


def random_atom(rng, counted, bound, signed=False, unit=True):
    """Atomic constraint over one or two of the ``counted`` formulas."""
    terms = []
    for g in rng.sample(counted, rng.randint(1, min(2, len(counted)))):
        coeff = 1 if unit else rng.randint(1, 2)
        if signed and rng.random() < 0.5:
            coeff = -coeff
        terms.append((coeff, g))
    low = -bound if signed else 0
    return AtomicConstraint(tuple(terms), rng.choice(COMPARATOR_CHOICES), rng.randint(low, bound))


def random_constraint(rng, counted, atoms, bound, signed=False, unit=True):
    """Boolean combination of up to ``atoms`` atomic constraints."""
    result = random_atom(rng, counted, bound, signed, unit)
    for _ in range(atoms - 1):
        other = random_atom(rng, counted, bound, signed, unit)
        if rng.random() < 0.3:
            other = cneg(other)
        result = cconj(result, other) if rng.random() < 0.5 else cdisj(result, other)
    return result


def random_formula(rng, modalities, make_until, props=PROPS):
    """
    State formula with up to ``modalities`` until modalities built by
    ``make_until(rng, lhs, rhs)``.
    """
    if modalities == 0 or rng.random() < 0.15:
        return random_literal(rng, props)
    kind = rng.choice(("until", "until", "until", "not", "and", "or"))
    if kind == "not":
        return Not(random_formula(rng, modalities, make_until, props))
    if kind in ("and", "or"):
        left = rng.randint(0, modalities)
        node = And if kind == "and" else Or
        return node(random_formula(rng, left, make_until, props),
                    random_formula(rng, modalities - left, make_until, props))
    lhs = random_literal(rng, props) if rng.random() < 0.7 else Not(random_literal(rng, props))
    rhs = random_formula(rng, modalities - 1, make_until, props)
    return make_until(rng, lhs, rhs)


def random_cctlb(rng, props=PROPS, modalities=2, atoms=2, bound=3):
    """Nonnegative formula with Boolean constraints (CCTLb and below)."""
    def make_until(rng_, lhs, rhs):
        counted = [random_literal(rng_, props) for _ in range(2)]
        constraint = random_constraint(rng_, counted, rng_.randint(1, atoms), bound)
        if rng_.random() < 0.15:
            constraint = None
        return UNTIL_TYPES[rng_.choice("EA")](lhs, constraint, rhs)

    return random_formula(rng, modalities, make_until, props)


def random_single_atom(rng, props=PROPS, modalities=2, bound=3, signed=False, unit=True):
    """Formula whose constraints are single atoms (CCTL1, CCTL, or their signed variants)."""
    def make_until(rng_, lhs, rhs):
        counted = [random_literal(rng_, props) for _ in range(2)]
        return UNTIL_TYPES[rng_.choice("EA")](lhs, random_atom(rng_, counted, bound, signed, unit), rhs)

    return random_formula(rng, modalities, make_until, props)


def random_tctl(rng, props=PROPS, modalities=1, bound=3):
    def make_until(rng_, lhs, rhs):
        constraint = AtomicConstraint(((rng_.choice((1, -1)), DUR),), rng_.choice(COMPARATOR_CHOICES),
                                      rng_.randint(-bound, bound))
        return UNTIL_TYPES[rng_.choice("EA")](lhs, constraint, rhs)

    return random_formula(rng, modalities, make_until, props)


def random_closed_cctlv(rng, props=PROPS, binders=2, bound=2, modalities=2):
    """
    Closed formula z1[g1]...zn[gn].body; a counted formula may test an earlier
    variable and the leaves of the body test the bound variables.
    """
    variables = [f"z{i}" for i in range(1, binders + 1)]

    def var_constraint(scope):
        chosen = rng.sample(scope, rng.randint(1, min(2, len(scope))))
        return VarConstraint(tuple((1, z) for z in chosen), rng.choice(COMPARATOR_CHOICES), rng.randint(0, bound))

    counted = []
    for i in range(binders):
        g = random_literal(rng, props)
        if i and rng.random() < 0.4:
            g = And(g, var_constraint(variables[:i]))
        counted.append(g)

    def leaf():
        return var_constraint(variables) if rng.random() < 0.5 else random_literal(rng, props)

    def body(depth):
        if depth == 0 or rng.random() < 0.15:
            return leaf()
        kind = rng.choice(("until", "until", "and", "not"))
        if kind == "not":
            return Not(body(depth))
        if kind == "and":
            return And(leaf(), body(depth))
        lhs = random_literal(rng, props) if rng.random() < 0.7 else leaf()
        return UNTIL_TYPES[rng.choice("EA")](lhs, None, And(leaf(), body(depth - 1)))

    f = body(modalities)
    for var, g in reversed(list(zip(variables, counted))):
        f = Bind(var, g, f)
    return f


def random_snsat(rng, p, m, clauses=2):
    blocks = []
    for i in range(1, p + 1):
        allowed = block_variables(i, m) + [f"z{l}" for l in range(1, i)]
        blocks.append([[(rng.choice(allowed), rng.random() < 0.5) for _ in range(3)] for _ in range(clauses)])
    return SnsatInstance(blocks, m)


def random_qbf(rng, p, clauses):
    return QbfInstance(p, [[(rng.randint(1, 2 * p), rng.random() < 0.5) for _ in range(3)]
                           for _ in range(clauses)])
