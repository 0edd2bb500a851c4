"""Fragment classification, variable well-formedness and the engine routing table."""
import logging

from models.formula import (
    DUR, AtomicConstraint, Bind, Now, Until, VarConstraint, children, constraint_atoms, next_operand,
    subformulas,
)
from models.results import FragmentDescriptor
from utils.errors import WellFormednessError

logger = logging.getLogger(__name__)

DECIDABLE = "decidable-with-engine"
PSEUDO_POLYNOMIAL = "pseudo-polynomial"
UNDECIDABLE = "undecidable"

# fragment -> (mc status, mc complexity, sat status, sat complexity, auto engine)
ROUTING_TABLE = {
    "CTL": (DECIDABLE, "P-complete", DECIDABLE, "EXPTIME-complete", "ctl"),
    "CCTL1": (DECIDABLE, "P-complete", DECIDABLE, "2-EXPTIME-complete", "polytime"),
    "CCTL±1": (DECIDABLE, "P-complete", UNDECIDABLE, "undecidable", "polytime"),
    "CCTL": (DECIDABLE, "Δ2P-complete", DECIDABLE, "2-EXPTIME-complete", "counting"),
    "CCTL±": (PSEUDO_POLYNOMIAL, "EXPTIME, Δ2P-hard", UNDECIDABLE, "undecidable", "polytime"),
    "CCTLb1": (DECIDABLE, "Δ2P-complete", DECIDABLE, "2-EXPTIME-complete", "counting"),
    "CCTLb": (DECIDABLE, "Δ2P-complete", DECIDABLE, "2-EXPTIME-complete", "counting"),
    "CCTLb±1": (UNDECIDABLE, "undecidable", UNDECIDABLE, "undecidable", None),
    "CCTLb±": (UNDECIDABLE, "undecidable", UNDECIDABLE, "undecidable", None),
    "CCTLv": (DECIDABLE, "PSPACE-complete", DECIDABLE, "2-EXPTIME-complete", "cctlv"),
    "CCTLv±": (UNDECIDABLE, "undecidable", UNDECIDABLE, "undecidable", None),
    "CCTLc": (DECIDABLE, "PSPACE-complete", DECIDABLE, "2-EXPTIME-complete", "cctlv"),
    "CCTLc±": (UNDECIDABLE, "undecidable", UNDECIDABLE, "undecidable", None),
    "TCTL": (DECIDABLE, "P-complete over weights in {-1,0,1}", UNDECIDABLE, "not supported", "dks"),
}


def binder_environment(f):
    """
    Collect the variable binders of ``f``.

    Returns:
        (environment, order): environment maps each bound variable to the formula
        it counts; order lists the variables so that the formula counted by a
        variable only mentions variables listed before it

    Raises:
        WellFormednessError: if a variable is bound by two different binders, or
        the dependencies between variables are cyclic
    """
    binders = {}
    for node in reversed(subformulas(f)):
        if isinstance(node, Bind):
            previous = binders.setdefault(node.var, node)
            if previous is not node:
                raise WellFormednessError(f"variable '{node.var}' is bound more than once")
    environment = {var: node.counted for var, node in binders.items()}
    depends = {var: occurring_variables(counted) & set(environment) for var, counted in environment.items()}
    for var, deps in depends.items():
        if var in deps:
            raise WellFormednessError(f"cyclic variable order: '{var}' counts a formula mentioning itself")
    # Kahn's algorithm, ties broken by binding position (outer binders first)
    order = []
    remaining = {var: set(deps) for var, deps in depends.items()}
    while remaining:
        ready = [var for var in binders if var in remaining and not remaining[var]]
        if not ready:
            raise WellFormednessError(f"cyclic variable order among {', '.join(sorted(remaining))}")
        var = ready[0]
        order.append(var)
        del remaining[var]
        for deps in remaining.values():
            deps.discard(var)
    return environment, order


def occurring_variables(f):
    """Every variable name occurring in ``f``, bound or free."""
    names = set()
    for node in subformulas(f):
        if isinstance(node, VarConstraint):
            names.update(node.variables)
        elif isinstance(node, Bind):
            names.add(node.var)
    return names


def free_variables(f):
    """Variables occurring in ``f`` outside the scope of their binder."""
    free = {}
    for node in subformulas(f):
        if isinstance(node, VarConstraint):
            free[node] = frozenset(node.variables)
        elif isinstance(node, Bind):
            free[node] = free[node.counted] | (free[node.body] - {node.var})
        else:
            result = frozenset()
            for child in children(node):
                result |= free[child]
            free[node] = result
    return free[f]


def check_variables(f):
    """
    Check that every variable is bound at most once and that the variables can be
    ordered so the formula counted by ``z`` only mentions variables smaller than ``z``.

    Raises:
        WellFormednessError: on a repeated binder or a cyclic dependency
    """
    binder_environment(f)


def classify_fragment(f):
    """
    Compute the syntactic flags of ``f`` and the least fragment containing it.

    Args:
        f: Well-formed formula

    Returns:
        FragmentDescriptor with statuses and the auto-routing engine filled in
    """
    descriptor = FragmentDescriptor()
    for node in subformulas(f):
        if isinstance(node, Until) and node.constraint is not None and next_operand(node) is None:
            descriptor.uses_counting = True
            if not isinstance(node.constraint, AtomicConstraint):
                descriptor.boolean_constraints = True
            for atom in constraint_atoms(node.constraint):
                for coeff, counted in atom.terms:
                    if counted is DUR:
                        descriptor.uses_duration = True
                    if coeff < 0:
                        descriptor.negative_coefficients = True
                    if abs(coeff) > 1:
                        descriptor.non_unit_coefficients = True
        elif isinstance(node, VarConstraint):
            descriptor.uses_variables = True
            if any(coeff < 0 for coeff, _ in node.terms):
                descriptor.negative_coefficients = True
        elif isinstance(node, Bind):
            descriptor.uses_variables = True
        elif isinstance(node, Now):
            descriptor.uses_cumulative = True
    descriptor.closed = not free_variables(f)
    descriptor.fragment_name = fragment_name(descriptor)
    (descriptor.mc_status, descriptor.mc_complexity, descriptor.sat_status,
     descriptor.sat_complexity, descriptor.engine) = ROUTING_TABLE[descriptor.fragment_name]
    return descriptor


def fragment_name(descriptor):
    """Name of the least fragment matching the descriptor's flags."""
    sign = "±" if descriptor.negative_coefficients else ""
    if descriptor.uses_duration:
        return "TCTL"
    if descriptor.uses_cumulative:
        return "CCTLc" + sign
    if descriptor.uses_variables:
        return "CCTLv" + sign
    if not descriptor.uses_counting:
        return "CTL"
    name = "CCTL" + ("b" if descriptor.boolean_constraints else "") + sign
    if not descriptor.non_unit_coefficients:
        name += "1"
    return name


def relevant_variables(f, environment, memo=None):
    """
    Variables whose values can influence the truth of ``f`` under ``environment``.

    A variable constraint makes its variables relevant, together with the variables
    relevant to the formulas they count; a binder hides its own variable.

    Args:
        f: Formula
        environment: Mapping from variable to the formula it counts
        memo: Optional dict reused across calls with the same environment

    Raises:
        WellFormednessError: if a relevant variable is missing from ``environment``
    """
    memo = memo if memo is not None else {}
    for node in subformulas(f):
        if node in memo:
            continue
        if isinstance(node, VarConstraint):
            result = set()
            for var in node.variables:
                if var not in environment:
                    raise WellFormednessError(f"variable '{var}' is not defined in the environment")
                result.add(var)
                result |= relevant_variables(environment[var], environment, memo)
        elif isinstance(node, Bind):
            result = memo[node.body] - {node.var}
        elif isinstance(node, Until):
            result = memo[node.lhs] | memo[node.rhs]
        else:
            result = set()
            for child in children(node):
                result |= memo[child]
        memo[node] = frozenset(result)
    return set(memo[f])
