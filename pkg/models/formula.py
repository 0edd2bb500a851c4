"""Formula and constraint nodes for the counting extensions of CTL.

Nodes are hash-consed: building a node with the same fields twice returns the
same object.  Structural equality is therefore identity, nodes can be used as
dictionary keys at the cost of ``id()``, and the DAG-size of a formula is the
number of distinct nodes reachable from it.
"""
import logging
import operator
import threading
import weakref

logger = logging.getLogger(__name__)

COMPARATORS = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
}

# Comparator seen from the other side of the inequality: a cmp b <=> -a FLIPPED[cmp] -b
FLIPPED = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}


def compare(value, cmp, bound):
    """Evaluate ``value cmp bound`` for one of the five comparators."""
    return COMPARATORS[cmp](value, bound)


class Node:
    """Immutable interned node. Subclasses name their fields in ``fields``."""

    fields = ()
    _table = weakref.WeakValueDictionary()
    _lock = threading.Lock()

    def __new__(cls, *args):
        if len(args) != len(cls.fields):
            raise TypeError(f"{cls.__name__} expects {len(cls.fields)} fields, got {len(args)}")
        cls._validate(*args)
        key = (cls, args)
        with Node._lock:
            node = Node._table.get(key)
            if node is None:
                node = super().__new__(cls)
                for name, value in zip(cls.fields, args):
                    object.__setattr__(node, name, value)
                Node._table[key] = node
        return node

    def __init__(self, *args):
        pass

    @classmethod
    def _validate(cls, *args):
        pass

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} nodes are immutable")

    def __reduce__(self):
        return (type(self), self.args)

    @property
    def args(self):
        return tuple(getattr(self, name) for name in self.fields)

    def __repr__(self):
        from utils.parser import print_formula, print_constraint

        text = print_formula(self) if isinstance(self, Formula) else print_constraint(self)
        if len(text) > 160:
            text = text[:157] + "..."
        return f"{type(self).__name__}<{text}>"


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

class Formula(Node):
    """Base class of every formula node."""


class Atom(Formula):
    fields = ("name",)


class TrueF(Formula):
    pass


class FalseF(Formula):
    pass


class Elapsed(Formula):
    """Prefix weight of a durational run; only valid as a counted term."""


class Not(Formula):
    fields = ("child",)


class And(Formula):
    fields = ("lhs", "rhs")


class Or(Formula):
    fields = ("lhs", "rhs")


class Until(Formula):
    """Path-quantified until with an optional counting constraint over the strict prefix."""

    fields = ("lhs", "constraint", "rhs")
    quantifier = None

    @classmethod
    def _validate(cls, lhs, constraint, rhs):
        if constraint is not None and not isinstance(constraint, Constraint):
            raise TypeError(f"until constraint must be a Constraint, got {type(constraint).__name__}")


class ExistsUntil(Until):
    quantifier = "E"


class ForallUntil(Until):
    quantifier = "A"


class Bind(Formula):
    """``var[counted].body``: reset ``var`` to 0 and count ``counted`` from here on."""

    fields = ("var", "counted", "body")


class VarConstraint(Formula):
    """Linear constraint over counting variables: sum of coeff*var compared to bound."""

    fields = ("terms", "cmp", "bound")

    @classmethod
    def _validate(cls, terms, cmp, bound):
        if not terms:
            raise ValueError("variable constraint needs at least one term")
        if cmp not in COMPARATORS:
            raise ValueError(f"unknown comparator: {cmp}")

    @property
    def variables(self):
        return tuple(var for _, var in self.terms)


class Now(Formula):
    """Forget the history: counting in ``child`` starts from the current state."""

    fields = ("child",)


TT = TrueF()
FF = FalseF()
DUR = Elapsed()

UNTIL_TYPES = {"E": ExistsUntil, "A": ForallUntil}


# ---------------------------------------------------------------------------
# Constraints
# ---------------------------------------------------------------------------

class Constraint(Node):
    """Base class of counting-constraint nodes."""


class TrueC(Constraint):
    pass


class FalseC(Constraint):
    pass


class NotC(Constraint):
    fields = ("child",)


class AndC(Constraint):
    fields = ("lhs", "rhs")


class OrC(Constraint):
    fields = ("lhs", "rhs")


class AtomicConstraint(Constraint):
    """``sum(coeff * #counted) cmp bound`` over the strict prefix of a run."""

    fields = ("terms", "cmp", "bound")

    @classmethod
    def _validate(cls, terms, cmp, bound):
        if not terms:
            raise ValueError("atomic constraint needs at least one term")
        if cmp not in COMPARATORS:
            raise ValueError(f"unknown comparator: {cmp}")
        for coeff, counted in terms:
            if not isinstance(counted, Formula):
                raise TypeError(f"counted term must be a Formula, got {type(counted).__name__}")

    def with_bound(self, bound):
        return AtomicConstraint(self.terms, self.cmp, bound)


TRUE_C = TrueC()
FALSE_C = FalseC()

# #TT = 1 as the constraint of an until: exactly one state before the target
NEXT_CONSTRAINT = AtomicConstraint(((1, TT),), "=", 1)


# ---------------------------------------------------------------------------
# Traversal helpers
# ---------------------------------------------------------------------------

def next_operand(f):
    """Return phi when ``f`` is the EX/AX shape ``Q(TT U{#TT = 1} phi)``, else None."""
    if isinstance(f, Until) and f.lhs is TT and f.constraint is NEXT_CONSTRAINT:
        return f.rhs
    return None


def constraint_atoms(c):
    """Atomic constraints of ``c`` in left-to-right order, repeats included."""
    atoms = []
    stack = [c]
    while stack:
        node = stack.pop()
        if isinstance(node, AtomicConstraint):
            atoms.append(node)
        elif isinstance(node, NotC):
            stack.append(node.child)
        elif isinstance(node, (AndC, OrC)):
            stack.append(node.rhs)
            stack.append(node.lhs)
    return atoms


def counted_formulas(c):
    """Distinct counted formulas of a constraint in first-occurrence order."""
    seen = {}
    for atom in constraint_atoms(c):
        for _, counted in atom.terms:
            seen.setdefault(counted, None)
    return list(seen)


def children(f):
    """Immediate subformulas, including formulas counted inside a constraint."""
    if isinstance(f, (Not, Now)):
        return (f.child,)
    if isinstance(f, (And, Or)):
        return (f.lhs, f.rhs)
    if isinstance(f, Until):
        if f.constraint is None:
            return (f.lhs, f.rhs)
        return (f.lhs, *counted_formulas(f.constraint), f.rhs)
    if isinstance(f, Bind):
        return (f.counted, f.body)
    return ()


def subformulas(f):
    """Distinct subformulas of ``f`` in post-order (children before parents)."""
    order = []
    seen = set()
    stack = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node in seen:
            continue
        seen.add(node)
        stack.append((node, True))
        for child in reversed(children(node)):
            if child not in seen:
                stack.append((child, False))
    return order


def dag_size(f):
    """Number of distinct subformulas under maximal sharing."""
    return len(subformulas(f))


def tree_size(f):
    """Size of ``f`` written out as a tree (constraint terms count as nodes)."""
    sizes = {}
    for node in subformulas(f):
        size = 1 + sum(sizes[child] for child in children(node))
        if isinstance(node, Until) and node.constraint is not None:
            size += len(constraint_atoms(node.constraint))
        sizes[node] = size
    return sizes[f]


# ---------------------------------------------------------------------------
# Parser sugar (no folding, so printing and parsing round-trip)
# ---------------------------------------------------------------------------

def implies(lhs, rhs):
    return Or(Not(lhs), rhs)


def exists_finally(phi, constraint=None):
    return ExistsUntil(TT, constraint, phi)


def forall_finally(phi, constraint=None):
    return ForallUntil(TT, constraint, phi)


def exists_globally(phi, constraint=None):
    return Not(ForallUntil(TT, constraint, Not(phi)))


def forall_globally(phi, constraint=None):
    return Not(ExistsUntil(TT, constraint, Not(phi)))


def exists_next(phi):
    return ExistsUntil(TT, NEXT_CONSTRAINT, phi)


def forall_next(phi):
    return ForallUntil(TT, NEXT_CONSTRAINT, phi)


# ---------------------------------------------------------------------------
# Smart constructors used by translators: fold TT/FF and double negation
# ---------------------------------------------------------------------------

def neg(f):
    if f is TT:
        return FF
    if f is FF:
        return TT
    if isinstance(f, Not):
        return f.child
    return Not(f)


def conj(*parts):
    result = TT
    for part in parts:
        if part is FF or result is FF:
            return FF
        if part is TT or part is result:
            continue
        result = part if result is TT else And(result, part)
    return result


def disj(*parts):
    result = FF
    for part in parts:
        if part is TT or result is TT:
            return TT
        if part is FF or part is result:
            continue
        result = part if result is FF else Or(result, part)
    return result


def until(quantifier, lhs, rhs, constraint=None):
    """Build E/A(lhs U{constraint} rhs), folding the trivial unconstrained cases."""
    if constraint is None:
        if rhs is TT or rhs is FF:
            return rhs
        if lhs is FF:
            return rhs
    return UNTIL_TYPES[quantifier](lhs, constraint, rhs)


def eu(lhs, rhs, constraint=None):
    return until("E", lhs, rhs, constraint)


def au(lhs, rhs, constraint=None):
    return until("A", lhs, rhs, constraint)


def next_step(quantifier, phi):
    """EX/AX with TT and FF folded (every state has a successor)."""
    if phi is TT or phi is FF:
        return phi
    return UNTIL_TYPES[quantifier](TT, NEXT_CONSTRAINT, phi)


def ex(phi):
    return next_step("E", phi)


def ax(phi):
    return next_step("A", phi)


# Constraint counterparts

def cneg(c):
    if c is TRUE_C:
        return FALSE_C
    if c is FALSE_C:
        return TRUE_C
    if isinstance(c, NotC):
        return c.child
    return NotC(c)


def cconj(*parts):
    result = TRUE_C
    for part in parts:
        if part is FALSE_C or result is FALSE_C:
            return FALSE_C
        if part is TRUE_C or part is result:
            continue
        result = part if result is TRUE_C else AndC(result, part)
    return result


def cdisj(*parts):
    result = FALSE_C
    for part in parts:
        if part is TRUE_C or result is TRUE_C:
            return TRUE_C
        if part is FALSE_C or part is result:
            continue
        result = part if result is FALSE_C else OrC(result, part)
    return result


def guard_with_now(f):
    """Embed a CCTL formula into CCTLc by putting Now in front of every temporal modality."""
    memo = {}
    for node in subformulas(f):
        if isinstance(node, Until):
            constraint = node.constraint
            if constraint is not None:
                constraint = map_counted(constraint, lambda g: memo[g])
            memo[node] = Now(type(node)(memo[node.lhs], constraint, memo[node.rhs]))
        elif isinstance(node, (Not, Now)):
            memo[node] = type(node)(memo[node.child])
        elif isinstance(node, (And, Or)):
            memo[node] = type(node)(memo[node.lhs], memo[node.rhs])
        elif isinstance(node, Bind):
            memo[node] = Bind(node.var, memo[node.counted], memo[node.body])
        else:
            memo[node] = node
    return memo[f]


def map_counted(c, fn):
    """Rebuild constraint ``c`` with every counted formula replaced by ``fn(counted)``."""
    if isinstance(c, AtomicConstraint):
        return AtomicConstraint(tuple((coeff, fn(counted)) for coeff, counted in c.terms), c.cmp, c.bound)
    if isinstance(c, NotC):
        return NotC(map_counted(c.child, fn))
    if isinstance(c, (AndC, OrC)):
        return type(c)(map_counted(c.lhs, fn), map_counted(c.rhs, fn))
    return c
