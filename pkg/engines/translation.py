"""Model checking by translation into CTL."""
import logging

from engines.ctl import mc_ctl
from models.formula import dag_size
from translators import translate

logger = logging.getLogger(__name__)


def check(structure, f, fuel=None, **options):
    translated = translate(f, fuel)
    logger.info(f"Checking the CTL translation (dag-size {dag_size(translated)})")
    return mc_ctl(structure, translated)
