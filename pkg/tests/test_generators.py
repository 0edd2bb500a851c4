import random

import pytest
from hypothesis import given, settings, strategies as st

from engines import dks
from engines.cctlv import check_cctlv, mc_cctlc
from engines.counting import mc_counting
from generators import GENERATORS, get_generator, qbf, snsat
from generators.dks_embedding import OK, duration_prop, generate as embed
from generators.qbf import QbfInstance, evaluate_qbf
from generators.random_instances import random_qbf, random_snsat
from generators.snsat import SnsatInstance, evaluate_snsat
from utils.errors import FragmentError, ModelFormatError
from utils.fragments import classify_fragment
from utils.model_format import parse_model
from utils.parser import parse_formula


def test_snsat_structure_shape():
    inst = SnsatInstance([[[("x1_1", True)] * 3]], 1)
    structure, psi = snsat.generate(inst)
    assert list(structure.names) == ["q1", "z1", "zbar1", "q0", "x1_1", "xbar1_1", "qF"]
    assert classify_fragment(psi).engine == "counting"
    assert evaluate_snsat(inst) == {"z1": True}
    assert structure.state_index("z1") in mc_counting(structure, psi)


def test_snsat_bullets_separate_x_diamonds():
    inst = SnsatInstance([[[("x1_1", True)] * 3], [[("z1", False), ("x2_1", True), ("x2_1", True)]]], 1)
    structure, _ = snsat.generate(inst)
    assert list(structure.names[6:]) == ["q0", "x2_1", "xbar2_1", "b1", "x1_1", "xbar1_1", "qF"]


def test_snsat_unsatisfiable_block():
    inst = SnsatInstance([[[("x1_1", True)] * 3, [("x1_1", False)] * 3]], 1)
    structure, psi = snsat.generate(inst)
    assert evaluate_snsat(inst) == {"z1": False}
    assert structure.state_index("z1") not in mc_counting(structure, psi)


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_snsat_engine_matches_enumeration(seed):
    rng = random.Random(seed)
    inst = random_snsat(rng, rng.randint(1, 2), rng.randint(1, 2))
    structure, psi = snsat.generate(inst)
    satisfying = mc_counting(structure, psi)
    for name, value in evaluate_snsat(inst).items():
        assert (structure.state_index(name) in satisfying) == value


def test_snsat_validation():
    with pytest.raises(ModelFormatError):
        SnsatInstance([[[("x2_1", True)] * 3]], 1)
    with pytest.raises(ModelFormatError):
        SnsatInstance([[[("x1_1", True)] * 2]], 1)
    with pytest.raises(ModelFormatError):
        SnsatInstance([], 1)


def test_qbf_examples():
    true_inst = QbfInstance(1, [[(1, True), (1, True), (2, True)]])
    false_inst = QbfInstance(1, [[(2, True), (2, True), (2, True)]])
    for inst, expected in ((true_inst, True), (false_inst, False)):
        assert evaluate_qbf(inst) is expected
        structure, f = qbf.generate(inst)
        assert list(structure.names) == ["q1", "x1", "xbar1", "q2", "x2", "xbar2", "q3"]
        assert (0 in check_cctlv(structure, f)) is expected
        structure, f = qbf.generate(inst, cumulative=True)
        assert classify_fragment(f).fragment_name == "CCTLc"
        assert (0 in mc_cctlc(structure, f)) is expected


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_qbf_engines_match_expansion(seed):
    rng = random.Random(seed)
    inst = random_qbf(rng, rng.randint(1, 2), rng.randint(1, 3))
    expected = evaluate_qbf(inst)
    structure, f = qbf.generate(inst)
    assert (0 in check_cctlv(structure, f)) == expected
    structure, f = qbf.generate(inst, cumulative=True)
    assert (0 in mc_cctlc(structure, f)) == expected


def test_qbf_validation():
    with pytest.raises(ModelFormatError):
        QbfInstance(0, [])
    with pytest.raises(ModelFormatError):
        QbfInstance(1, [[(3, True), (1, True), (1, False)]])


def test_duration_embedding():
    d = parse_model("""
state q0 { P }
trans q0 -[2]-> q0
""")
    structure, transform = embed(d)
    assert list(structure.names) == ["q0", "q0.P_2.q0"]
    assert OK in structure.labels[0]
    for text in ("E(TT U{DUR = 4} P)", "E(TT U{DUR = 3} P)", "A(TT U{DUR >= 5} P)"):
        f = parse_formula(text)
        embedded = mc_counting(structure, transform(f))
        assert (0 in embedded) == (0 in dks.check(d, f))
    with pytest.raises(FragmentError):
        transform(parse_formula("z[P].EF(z >= 1)"))
    assert duration_prop(-1) == "P_m1"
    assert duration_prop(3) == "P_3"


def test_registry():
    assert set(GENERATORS) == {"snsat", "qbf", "dks-embed"}
    assert get_generator("qbf") is qbf
    with pytest.raises(ValueError, match="No generator available"):
        get_generator("sat")
