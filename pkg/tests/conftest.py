import os
import random

import pytest
from hypothesis import HealthCheck, settings

import config
from utils.model_format import parse_model

settings.register_profile("default", max_examples=30, deadline=None)
settings.register_profile("ci", max_examples=100, deadline=None, suppress_health_check=(HealthCheck.too_slow,))
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# PIN entry: three wrong attempts lead to the lock
ATM = """
ap error lock
state idle { }
state e1 { error }
state e2 { error }
state e3 { error }
state lock { lock }
trans idle -> e1
trans e1 -> e2
trans e2 -> e3
trans e3 -> lock
trans lock -> lock
"""

LOOP = """
state q0 { P }
trans q0 -> q0
"""

CHAIN = """
ap P
state q0 { }
state q1 { P }
trans q0 -> q1
trans q1 -> q1
"""


@pytest.fixture
def atm():
    return parse_model(ATM)


@pytest.fixture
def loop():
    return parse_model(LOOP)


@pytest.fixture
def chain():
    return parse_model(CHAIN)


@pytest.fixture
def rng():
    return random.Random(config.DEFAULT_SEED)
