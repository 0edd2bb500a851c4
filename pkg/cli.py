"""Command line for model checking, translation, satisfiability, generators and oracles.

Exit codes: 0 when the verdict at the designated state holds, 1 when it does not,
2 on errors, 3 when the fragment is undecidable.
"""
import argparse
import json
import logging
import os
import sys

import config
from engines import ENGINES, check_formula
from engines.satisfiability import sat_cctl
from generators import get_generator
from generators.random_instances import PROPS, make_rng, random_qbf, random_snsat, random_structure
from models.formula import Atom, dag_size, subformulas
from models.kripke import DurationalKS, KripkeStructure
from models.results import SatResult
from translators import translate
from utils.errors import CCTLError, UndecidableFragment
from utils.model_format import parse_model, print_model
from utils.oracles import oracle_enumerate
from utils.parser import parse_formula, print_formula

logger = logging.getLogger(__name__)

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR, EXIT_UNDECIDABLE = 0, 1, 2, 3


def read_text(value):
    """Contents of ``value`` when it names a file, otherwise ``value`` itself."""
    if os.path.isfile(value):
        with open(value, encoding="utf-8") as handle:
            return handle.read()
    return value


def load_model(path):
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if path.endswith(".json"):
        return KripkeStructure.from_dict(json.loads(text))
    return parse_model(text)


def load_formula(value):
    return parse_formula(read_text(value))


def print_dumps(title, dumps):
    for modality, structure in dumps:
        print(f"# {title} for {modality}")
        print(print_model(structure))


def random_model(f, seed, size):
    """Random structure over the propositions of ``f``, for checking without a model file."""
    props = sorted({node.name for node in subformulas(f) if isinstance(node, Atom)}) or list(PROPS)
    return random_structure(make_rng(seed), size, props=props)


def run_check(args):
    f = load_formula(args.formula)
    seed = None
    if args.model is not None:
        structure = load_model(args.model)
    else:
        seed = args.seed if args.seed is not None else config.DEFAULT_SEED
        structure = random_model(f, seed, args.size)
    options = {}
    gadgets, reductions = [], []
    if args.dump_gadget:
        options["gadgets"] = gadgets
    if args.dump_reduction:
        options["reductions"] = reductions
    state = args.state if args.state is not None else 0
    report = check_formula(structure, f, state=state, engine=args.engine, witness=args.witness, **options)
    if args.json:
        data = report.to_dict()
        if seed is not None:
            data["seed"] = seed
        print(json.dumps(data, indent=2))
    else:
        if seed is not None:
            print(f"# seed: {seed}")
            print(print_model(structure))
        print(f"verdict: {'true' if report.verdict else 'false'}")
        print(f"state: {report.state}")
        print(f"engine: {report.engine}")
        print(f"fragment: {report.fragment}")
        print(f"satisfying: {' '.join(report.satisfying)}")
        if report.witness is not None:
            print(f"{report.witness_kind}: {' '.join(report.witness)}")
        print_dumps("gadget", gadgets)
        print_dumps("reduction", reductions)
    return EXIT_TRUE if report.verdict else EXIT_FALSE


def run_translate(args):
    f = load_formula(args.formula)
    translated = translate(f, args.fuel)
    if args.json:
        print(json.dumps({"formula": print_formula(translated), "dag_size": dag_size(translated)}, indent=2))
    else:
        print(print_formula(translated))
        print(f"dag-size: {dag_size(translated)}")
    return EXIT_TRUE


def run_sat(args):
    f = load_formula(args.formula)
    result = sat_cctl(f, cap=args.cap, fuel=args.fuel, shrink=not args.no_shrink)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    elif result.status == SatResult.SAT:
        print("SAT")
        print(f"# initial state: {result.witness.names[result.initial]}")
        print(print_model(result.witness))
    elif result.status == SatResult.UNDECIDABLE:
        print(f"UNDECIDABLE {result.fragment}")
    elif result.status == SatResult.CAPPED:
        print(f"CAPPED {result.reason}")
    else:
        print("UNSAT")
    return {
        SatResult.SAT: EXIT_TRUE,
        SatResult.UNSAT: EXIT_FALSE,
        SatResult.UNDECIDABLE: EXIT_UNDECIDABLE,
        SatResult.CAPPED: EXIT_ERROR,
    }[result.status]


def load_instance(args):
    generator = get_generator(args.kind)
    if args.instance is not None:
        with open(args.instance, encoding="utf-8") as handle:
            data = json.load(handle)
        instance_type = generator.SnsatInstance if args.kind == "snsat" else generator.QbfInstance
        return instance_type.from_dict(data)
    seed = args.seed if args.seed is not None else config.DEFAULT_SEED
    print(f"# seed: {seed}")
    rng = make_rng(seed)
    if args.kind == "snsat":
        return random_snsat(rng, args.p, args.m, args.clauses)
    return random_qbf(rng, args.p, args.clauses)


def run_gen(args):
    generator = get_generator(args.kind)
    if args.kind == "dks-embed":
        if args.model is None:
            raise CCTLError("dks-embed needs --model")
        d = load_model(args.model)
        if not isinstance(d, DurationalKS):
            raise CCTLError("dks-embed needs a model with weighted transitions")
        structure, transform = generator.generate(d)
        print(print_model(structure))
        if args.formula is not None:
            print(f"# formula: {print_formula(transform(load_formula(args.formula)))}")
        return EXIT_TRUE
    inst = load_instance(args)
    if args.kind == "qbf":
        structure, f = generator.generate(inst, cumulative=args.cumulative)
        expected = generator.evaluate_qbf(inst)
    else:
        structure, f = generator.generate(inst)
        expected = generator.evaluate_snsat(inst)
    print(f"# instance: {json.dumps(inst.to_dict())}")
    print(f"# expected: {json.dumps(expected)}")
    print(f"# formula: {print_formula(f)}")
    print(print_model(structure))
    return EXIT_TRUE


def run_oracle(args):
    structure = load_model(args.model)
    f = load_formula(args.formula)
    verdicts = oracle_enumerate(structure, f, args.horizon)
    words = {True: "true", False: "false", None: "unknown"}
    for name, verdict in zip(structure.names, verdicts):
        print(f"{name}: {words[verdict]}")
    q = structure.state_index(args.state if args.state is not None else 0)
    return EXIT_TRUE if verdicts[q] is True else EXIT_FALSE


def build_parser():
    parser = argparse.ArgumentParser(prog="cctl", description="Counting CTL model checking and satisfiability")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="model-check a formula at a state")
    check.add_argument("--model", help="model file (text format or .json); default: a random structure")
    check.add_argument("--seed", type=int, help="seed of the random structure used without --model")
    check.add_argument("--size", type=int, default=4, help="states of the random structure")
    check.add_argument("--formula", required=True, help="formula text or file")
    check.add_argument("--state", help="designated state (default: the first state)")
    check.add_argument("--engine", default="auto", choices=["auto", *ENGINES])
    check.add_argument("--witness", action="store_true", help="print a witness or counterexample run")
    check.add_argument("--dump-gadget", action="store_true", help="print the DKS gadgets in model format")
    check.add_argument("--dump-reduction", action="store_true", help="print the generated DKS in model format")
    check.add_argument("--json", action="store_true")
    check.set_defaults(run=run_check)

    trans = commands.add_parser("translate", help="translate a formula into CTL")
    trans.add_argument("--formula", required=True)
    trans.add_argument("--fuel", type=int)
    trans.add_argument("--json", action="store_true")
    trans.set_defaults(run=run_translate)

    sat = commands.add_parser("sat", help="decide satisfiability")
    sat.add_argument("--formula", required=True)
    sat.add_argument("--cap", type=int, help="maximum number of Hintikka atoms")
    sat.add_argument("--fuel", type=int)
    sat.add_argument("--no-shrink", action="store_true", help="keep the unminimized witness")
    sat.add_argument("--json", action="store_true")
    sat.set_defaults(run=run_sat)

    gen = commands.add_parser("gen", help="generate a hardness instance")
    gen.add_argument("kind", choices=["snsat", "qbf", "dks-embed"])
    gen.add_argument("--instance", help="instance JSON file (default: random)")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--p", type=int, default=2)
    gen.add_argument("--m", type=int, default=2)
    gen.add_argument("--clauses", type=int, default=2)
    gen.add_argument("--cumulative", action="store_true", help="QBF query read cumulatively")
    gen.add_argument("--model", help="weighted model for dks-embed")
    gen.add_argument("--formula", help="TCTL formula to transform for dks-embed")
    gen.set_defaults(run=run_gen)

    oracle = commands.add_parser("oracle", help="evaluate by enumerating run prefixes")
    oracle.add_argument("--model", required=True)
    oracle.add_argument("--formula", required=True)
    oracle.add_argument("--state")
    oracle.add_argument("--horizon", type=int, default=config.DEFAULT_HORIZON)
    oracle.set_defaults(run=run_oracle)
    return parser


def main(argv=None):
    logging.basicConfig(level=config.LOG_LEVEL, format=config.LOG_FORMAT)
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except UndecidableFragment as e:
        logger.warning(f"Undecidable: {e}")
        print(f"UNDECIDABLE {e.descriptor.fragment_name}: {e}", file=sys.stderr)
        return EXIT_UNDECIDABLE
    except (CCTLError, ValueError, OSError) as e:
        logger.error(f"Error running {args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
