import logging

from translators import binders, cctlb, cctlc, cctlv
from utils.errors import FragmentError, UndecidableFragment
from utils.fragments import UNDECIDABLE, classify_fragment

logger = logging.getLogger(__name__)

TRANSLATORS = {
    "cctlb-ctl": cctlb,
    "cctlb-cctlv": binders,
    "cctlv-ctl": cctlv,
    "cctlc-cctlv": cctlc,
}


def get_translator(name):
    """Get the translator module registered under ``name``"""
    if name not in TRANSLATORS:
        raise ValueError(f"No translator available for: {name}")
    return TRANSLATORS[name]


def translate(f, fuel=None):
    """
    Translate any formula of a decidable nonnegative fragment into CTL.

    Cumulative formulas go through variables first; formulas with variables are
    translated directly; counting fragments are unfolded.

    Raises:
        UndecidableFragment: for fragments with negative coefficients
        FragmentError: for TCTL formulas
    """
    descriptor = classify_fragment(f)
    if descriptor.negative_coefficients:
        if descriptor.mc_status == UNDECIDABLE:
            raise UndecidableFragment(descriptor, "translation into CTL")
        raise FragmentError(f"{descriptor.fragment_name} has no CTL counterpart")
    if descriptor.uses_duration:
        raise FragmentError("TCTL formulas have no CTL counterpart")
    if descriptor.uses_cumulative:
        logger.info(f"Translating {descriptor.fragment_name} through variables")
        return cctlv.translate(cctlc.translate(f), fuel)
    if descriptor.uses_variables:
        return cctlv.translate(f, fuel)
    return cctlb.translate(f, fuel)
