from flask import Flask, request, jsonify
import logging

# Import our modules
from engines import ENGINES, check_formula
from engines.satisfiability import sat_cctl
from generators import get_generator
from generators.random_instances import make_rng, random_qbf, random_snsat
from models.formula import dag_size
from models.kripke import DurationalKS, KripkeStructure
from translators import translate
from utils.errors import CCTLError, ResourceCapExceeded, UndecidableFragment
from utils.fragments import classify_fragment
from utils.model_format import parse_model, print_model
from utils.parser import parse_formula, print_formula
import config

logging.basicConfig(level=config.LOG_LEVEL, format=config.LOG_FORMAT)
logger = logging.getLogger(__name__)

app = Flask(__name__)
app.config['MAX_CONTENT_LENGTH'] = config.MAX_CONTENT_LENGTH


# Helper functions
def error_response(e):
    """Map an exception to a JSON error and its status code"""
    if isinstance(e, UndecidableFragment):
        return jsonify({"error": str(e), "fragment": e.descriptor.fragment_name}), 422
    if isinstance(e, ResourceCapExceeded):
        return jsonify({"error": str(e)}), 413
    if isinstance(e, CCTLError):
        return jsonify({"error": str(e)}), 400
    logger.exception(f"Unexpected error: {e}")
    return jsonify({"error": str(e)}), 500


def load_structure(data):
    """Structure from either the model text format or its dictionary form"""
    if 'model' not in data:
        raise CCTLError("Missing required field: model")
    if isinstance(data['model'], dict):
        return KripkeStructure.from_dict(data['model'])
    return parse_model(data['model'])


def load_formula(data):
    if 'formula' not in data:
        raise CCTLError("Missing required field: formula")
    return parse_formula(data['formula'])


@app.route('/api/engines', methods=['GET'])
def list_engines():
    """List the registered engines"""
    return jsonify({"status": "success", "engines": sorted(ENGINES)})


@app.route('/api/check', methods=['POST'])
def check():
    """
    Model-check a formula at a state

    Expected payload:
    {
        "model": "ap P\\nstate s0 { P }\\ntrans s0 -> s0",
        "formula": "EF{#P >= 2} TT",
        "state": "s0",          # Optional, defaults to the first state
        "engine": "auto",       # Optional
        "witness": false        # Optional
    }
    """
    try:
        data = request.get_json(silent=True) or {}
        structure = load_structure(data)
        f = load_formula(data)
        report = check_formula(
            structure, f,
            state=data.get('state', 0),
            engine=data.get('engine', 'auto'),
            witness=bool(data.get('witness', False)),
        )
        return jsonify({"status": "success", **report.to_dict()})
    except Exception as e:
        return error_response(e)


@app.route('/api/translate', methods=['POST'])
def translate_formula():
    """Translate a formula of a decidable nonnegative fragment into CTL"""
    try:
        data = request.get_json(silent=True) or {}
        translated = translate(load_formula(data), data.get('fuel'))
        return jsonify({
            "status": "success",
            "formula": print_formula(translated),
            "dag_size": dag_size(translated),
        })
    except Exception as e:
        return error_response(e)


@app.route('/api/sat', methods=['POST'])
def satisfiability():
    """
    Decide satisfiability

    Returns:
        JSON with status SAT, UNSAT, UNDECIDABLE or CAPPED and the witness model text
    """
    try:
        data = request.get_json(silent=True) or {}
        result = sat_cctl(load_formula(data), cap=data.get('cap'), fuel=data.get('fuel'),
                          shrink=bool(data.get('shrink', True)))
        return jsonify(result.to_dict())
    except Exception as e:
        return error_response(e)


@app.route('/api/classify', methods=['POST'])
def classify():
    """Fragment, complexity and routing of a formula"""
    try:
        data = request.get_json(silent=True) or {}
        descriptor = classify_fragment(load_formula(data))
        return jsonify({"status": "success", **descriptor.to_dict()})
    except Exception as e:
        return error_response(e)


@app.route('/api/generate/<kind>', methods=['POST'])
def generate(kind):
    """
    Generate a hardness instance as a model and a query

    Expected payload for snsat/qbf: {"instance": {...}} or {"seed": 1, "p": 2, "m": 2, "clauses": 2}
    Expected payload for dks-embed: {"model": {...weighted...}, "formula": "E P U{DUR <= 2} Q"}
    """
    try:
        generator = get_generator(kind)
    except ValueError as e:
        return jsonify({"error": str(e)}), 404
    try:
        data = request.get_json(silent=True) or {}
        if kind == 'dks-embed':
            d = load_structure(data)
            if not isinstance(d, DurationalKS):
                raise CCTLError("dks-embed needs a model with weighted transitions")
            structure, transform = generator.generate(d)
            response = {"status": "success", "model": print_model(structure)}
            if 'formula' in data:
                response["formula"] = print_formula(transform(load_formula(data)))
            return jsonify(response)

        if 'instance' in data:
            instance_type = generator.SnsatInstance if kind == 'snsat' else generator.QbfInstance
            inst = instance_type.from_dict(data['instance'])
        else:
            rng = make_rng(data.get('seed'))
            if kind == 'snsat':
                inst = random_snsat(rng, int(data.get('p', 2)), int(data.get('m', 2)), int(data.get('clauses', 2)))
            else:
                inst = random_qbf(rng, int(data.get('p', 1)), int(data.get('clauses', 2)))

        if kind == 'qbf':
            structure, f = generator.generate(inst, cumulative=bool(data.get('cumulative', False)))
            expected = generator.evaluate_qbf(inst)
        else:
            structure, f = generator.generate(inst)
            expected = generator.evaluate_snsat(inst)
        return jsonify({
            "status": "success",
            "instance": inst.to_dict(),
            "model": print_model(structure),
            "formula": print_formula(f),
            "expected": expected,
        })
    except Exception as e:
        return error_response(e)


if __name__ == '__main__':
    app.run(host=config.API_HOST, port=config.API_PORT, debug=False)
