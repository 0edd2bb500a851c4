"""Satisfiability of the decidable fragments by translation into CTL.

The CTL translation goes through the tableau; a satisfiable verdict comes with the
tableau's witness, certified by the routed model checker on the original formula and
then shrunk by greedy state removal.
"""
import logging

from engines import get_engine
from engines.tableau import sat_ctl
from models.formula import dag_size
from models.kripke import KripkeStructure
from models.results import SatResult
from translators import translate
from utils.errors import CCTLError, FragmentError, ResourceCapExceeded
from utils.fragments import UNDECIDABLE, classify_fragment
from utils.parser import print_formula

logger = logging.getLogger(__name__)


def certify(structure, f, initial, engine):
    return initial in get_engine(engine).check(structure, f)


def remove_state(structure, initial, state):
    """
    Structure without ``state``, restricted to the states reachable from ``initial``.

    Returns:
        (KripkeStructure, new index of ``initial``), or None when a state would lose
        all its successors
    """
    if state == initial:
        return None
    successors = [[s for s in succ if s != state] for succ in structure.successors]
    if any(not succ for q, succ in enumerate(successors) if q != state):
        return None
    order = [initial]
    index = {initial: 0}
    position = 0
    while position < len(order):
        for s in successors[order[position]]:
            if s not in index:
                index[s] = len(order)
                order.append(s)
        position += 1
    reduced = KripkeStructure(
        [structure.names[q] for q in order],
        [[index[s] for s in successors[q]] for q in order],
        [structure.labels[q] for q in order],
        structure.declared_ap,
    )
    return reduced, 0


def minimize(structure, f, initial, engine):
    """Greedily drop states, in index order, while ``f`` still holds at the initial state."""
    changed = True
    while changed:
        changed = False
        for state in range(structure.size):
            candidate = remove_state(structure, initial, state)
            if candidate is None:
                continue
            reduced, start = candidate
            if certify(reduced, f, start, engine):
                structure, initial = reduced, start
                changed = True
                break
    return structure, initial


def sat_cctl(f, cap=None, fuel=None, shrink=True):
    """
    Decide satisfiability of a formula of any decidable nonnegative fragment.

    Args:
        f: Formula (closed when it uses variables)
        cap: Maximum number of Hintikka atoms (defaults to config.CLOSURE_CAP)
        fuel: Maximum number of translation steps (defaults to config.TRANSLATION_FUEL)
        shrink: Minimize the witness

    Returns:
        SatResult with status SAT, UNSAT, UNDECIDABLE or CAPPED

    Raises:
        FragmentError: for TCTL formulas
        WellFormednessError: for formulas with free variables
        CCTLError: if a witness fails certification
    """
    descriptor = classify_fragment(f)
    fragment = descriptor.fragment_name
    if descriptor.uses_duration:
        raise FragmentError("satisfiability is not supported for TCTL")
    if descriptor.sat_status == UNDECIDABLE:
        logger.warning(f"Refusing {fragment}: satisfiability is undecidable")
        return SatResult(SatResult.UNDECIDABLE, fragment=fragment,
                         reason=f"satisfiability is undecidable for {fragment}")
    try:
        translated = translate(f, fuel)
    except ResourceCapExceeded as e:
        logger.warning(f"Translation capped: {e}")
        return SatResult(SatResult.CAPPED, fragment=fragment, reason=str(e))
    logger.info(f"Deciding {fragment} formula through a CTL translation of dag-size {dag_size(translated)}")
    result = sat_ctl(translated, cap)
    result.fragment = fragment
    if not result.satisfiable:
        return result
    engine = descriptor.engine
    witness, initial = result.witness, result.initial
    if not certify(witness, f, initial, engine):
        raise CCTLError(f"witness does not satisfy {print_formula(f)} with the {engine} engine")
    if shrink:
        witness, initial = minimize(witness, f, initial, engine)
        logger.debug(f"Witness shrunk from {result.witness.size} to {witness.size} states")
    return SatResult(SatResult.SAT, witness=witness, initial=initial, fragment=fragment)
