import logging
import time

from engines import cctlv, counting, ctl, dks, pm, translation
from models.results import VerdictReport
from utils.errors import FragmentError, UndecidableFragment
from utils.fragments import UNDECIDABLE, classify_fragment

logger = logging.getLogger(__name__)

ENGINES = {
    "ctl": ctl,
    "counting": counting,
    "polytime": pm,
    "dks": dks,
    "cctlv": cctlv,
    "translate": translation,
}


def get_engine(name):
    """Get the engine module registered under ``name``"""
    if name not in ENGINES:
        raise ValueError(f"No engine available for: {name}")
    return ENGINES[name]


def route(f, engine="auto"):
    """
    Pick the engine for ``f``.

    Returns:
        (engine name, FragmentDescriptor)

    Raises:
        UndecidableFragment: when model checking the fragment of ``f`` is undecidable
    """
    descriptor = classify_fragment(f)
    if descriptor.mc_status == UNDECIDABLE:
        logger.warning(f"Refusing {descriptor.fragment_name}: model checking is undecidable")
        raise UndecidableFragment(descriptor)
    name = descriptor.engine if engine == "auto" else engine
    get_engine(name)
    return name, descriptor


def check_formula(structure, f, state=0, engine="auto", witness=False, **options):
    """
    Model-check ``f`` at ``state`` with the routed or requested engine.

    Args:
        structure: KripkeStructure or DurationalKS
        f: Formula
        state: Designated state, by name or index
        engine: Engine name, or "auto" to follow the routing table
        witness: Also compute a witness or counterexample run for the top-level modality
        **options: Engine options (caps, dump lists)

    Returns:
        VerdictReport
    """
    name, descriptor = route(f, engine)
    q = structure.state_index(state)
    logger.info(f"Checking {descriptor.fragment_name} formula with the {name} engine")
    started = time.perf_counter()
    satisfying = get_engine(name).check(structure, f, **options)
    timings = {"check": time.perf_counter() - started}
    report = VerdictReport(
        verdict=q in satisfying,
        state=structure.names[q],
        engine=name,
        fragment=descriptor.fragment_name,
        satisfying=satisfying.names(structure),
        timings=timings,
    )
    if witness:
        started = time.perf_counter()
        found = find_witness(structure, f, q, name, **options)
        timings["witness"] = time.perf_counter() - started
        if found is not None:
            report.witness_kind, run = found
            report.witness = run.names(structure)
    return report


def find_witness(structure, f, q, engine, **options):
    """(kind, RunPrefix) for the top-level modality of ``f`` at ``q``, or None."""
    try:
        if engine == "polytime":
            run = pm.pm_witness(structure, f, q, options.get("chain_cap"))
            return None if run is None else ("witness", run)
        if engine in ("counting", "ctl"):
            return counting.counting_witness(structure, f, q, options.get("cap"))
    except FragmentError as e:
        logger.debug(f"No witness search: {e}")
    return None
