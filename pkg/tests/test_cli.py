import json

import pytest

from cli import EXIT_ERROR, EXIT_FALSE, EXIT_TRUE, EXIT_UNDECIDABLE, main
from engines.ctl import mc_ctl
from utils.model_format import parse_model
from utils.parser import parse_formula

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

CHAIN = """
ap P
state q0 { }
state q1 { P }
trans q0 -> q1
trans q1 -> q1
"""

STAY = """
ap P Q
state q0 { P }
state q1 { Q }
trans q0 -> q0
trans q0 -> q1
trans q1 -> q1
"""

TICK = """
state q0 { P }
trans q0 -[1]-> q0
"""


@pytest.fixture
def write(tmp_path):
    def write_file(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return write_file


def test_check_true_and_false(write, capsys):
    model = write("atm.ks", ATM)
    assert main(["check", "--model", model, "--formula", "!EF{#error <= 2} lock", "--state", "idle"]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "verdict: true" in out
    assert "engine: polytime" in out
    assert "satisfying: idle e1" in out

    assert main(["check", "--model", model, "--formula", "!EF{#error <= 2} lock", "--state", "e2"]) == EXIT_FALSE
    assert "verdict: false" in capsys.readouterr().out


def test_check_reads_formula_files_and_prints_witnesses(write, capsys):
    model = write("atm.ks", ATM)
    formula = write("query.cctl", "EF{#error <= 2} lock\n")
    assert main(["check", "--model", model, "--formula", formula, "--state", "e2", "--witness"]) == EXIT_TRUE
    assert "witness: e2 e3 lock" in capsys.readouterr().out


def test_check_json_model_and_output(write, capsys):
    model = write("atm.json", json.dumps(parse_model(ATM).to_dict()))
    assert main(["check", "--model", model, "--formula", "AF lock", "--json"]) == EXIT_TRUE
    report = json.loads(capsys.readouterr().out)
    assert report["engine"] == "ctl"
    assert report["satisfying"] == ["idle", "e1", "e2", "e3", "lock"]


def test_check_dumps_gadgets(write, capsys):
    model = write("tick.ks", TICK)
    assert main(["check", "--model", model, "--formula", "A(TT U{DUR = 2} P)", "--dump-gadget"]) == EXIT_TRUE
    assert "# gadget for" in capsys.readouterr().out


def test_check_keeps_reductions_and_gadgets_apart(write, capsys):
    model = write("stay.ks", STAY)
    args = ["check", "--model", model, "--engine", "polytime", "--state", "q1"]
    assert main([*args, "--formula", "EF{#P - #P >= 0} TT", "--dump-gadget"]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "# gadget for" not in out
    assert "# reduction for" not in out

    assert main([*args, "--formula", "AF{#P - #Q <= -1} TT", "--dump-gadget", "--dump-reduction"]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "# reduction for AF{" in out
    assert "# gadget for" in out
    assert out.index("# gadget for") < out.index("# reduction for")


def test_check_random_model_replays_from_seed(capsys):
    argv = ["check", "--formula", "EF P & EX !Q", "--seed", "11", "--size", "3"]
    code = main(argv)
    out = capsys.readouterr().out
    assert out.startswith("# seed: 11\n")
    assert main(argv) == code
    assert capsys.readouterr().out == out
    structure = parse_model(out.split("verdict:", 1)[0])
    assert structure.size == 3
    assert structure.declared_ap == {"P", "Q"}
    assert code == (EXIT_TRUE if 0 in mc_ctl(structure, parse_formula("EF P & EX !Q")) else EXIT_FALSE)

    main([*argv, "--json"])
    assert json.loads(capsys.readouterr().out)["seed"] == 11


def test_check_errors(write, capsys):
    model = write("atm.ks", ATM)
    code = main(["check", "--model", model, "--formula", "EF{#error - #lock = 0 & #error >= 1} TT"])
    assert code == EXIT_UNDECIDABLE
    assert "UNDECIDABLE CCTLb±1" in capsys.readouterr().err

    assert main(["check", "--model", model, "--formula", "EF (lock"]) == EXIT_ERROR
    assert "error: " in capsys.readouterr().err

    assert main(["check", "--model", write("broken.ks", "state a { }\ntrans a -> b\n"), "--formula", "TT"]) == EXIT_ERROR
    assert main(["check", "--model", "missing.ks", "--formula", "TT"]) == EXIT_ERROR


def test_translate(capsys):
    assert main(["translate", "--formula", "EF{#P >= 0} Q"]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "dag-size: 3" in out
    assert main(["translate", "--formula", "EF{#P + #Q = 20} R", "--fuel", "5"]) == EXIT_ERROR


@pytest.mark.parametrize("formula, code, first_line", [
    ("EF{#P = 1} TT", EXIT_TRUE, "SAT"),
    ("EF P & AG !P", EXIT_FALSE, "UNSAT"),
    ("EF{#P - #Q = 0} TT", EXIT_UNDECIDABLE, "UNDECIDABLE CCTL±1"),
])
def test_sat(formula, code, first_line, capsys):
    assert main(["sat", "--formula", formula]) == code
    assert capsys.readouterr().out.splitlines()[0] == first_line


def test_sat_capped(capsys):
    assert main(["sat", "--formula", "EF{#P = 3} TT", "--fuel", "1"]) == EXIT_ERROR
    assert capsys.readouterr().out.startswith("CAPPED")


def test_gen_random_qbf(capsys):
    assert main(["gen", "qbf", "--p", "1", "--clauses", "2", "--seed", "5"]) == EXIT_TRUE
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "# seed: 5"
    assert lines[1].startswith("# instance: ")
    assert json.loads(lines[2][len("# expected: "):]) in (True, False)
    assert lines[3].startswith("# formula: ")


def test_gen_snsat_from_instance(write, capsys):
    instance = write("inst.json", json.dumps({"m": 1, "blocks": [[[["x1_1", True]] * 3]]}))
    assert main(["gen", "snsat", "--instance", instance]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert '# expected: {"z1": true}' in out


def test_gen_dks_embedding(write, capsys):
    assert main(["gen", "dks-embed"]) == EXIT_ERROR
    model = write("tick.ks", TICK)
    assert main(["gen", "dks-embed", "--model", model, "--formula", "E(TT U{DUR = 2} P)"]) == EXIT_TRUE
    assert "# formula: " in capsys.readouterr().out


def test_oracle(write, capsys):
    model = write("chain.ks", CHAIN)
    assert main(["oracle", "--model", model, "--formula", "EF P", "--horizon", "1"]) == EXIT_FALSE
    assert capsys.readouterr().out.splitlines() == ["q0: unknown", "q1: true"]
    assert main(["oracle", "--model", model, "--formula", "EF P", "--horizon", "2"]) == EXIT_TRUE
