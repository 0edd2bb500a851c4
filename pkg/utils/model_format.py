"""Line-based text format for Kripke structures and durational Kripke structures.

::

    ap P Q                  # optional declaration; labels must then be declared
    state q0 { P }
    state q1 { }
    trans q0 -> q1          # plain transition
    trans q1 -[-1]-> q0     # weighted transition (the whole file must be weighted)
"""
import logging
import re

from models.kripke import DurationalKS, KripkeStructure
from utils.errors import ModelFormatError
from utils.parser import is_proposition_name

logger = logging.getLogger(__name__)

NAME = r"[A-Za-z0-9_'.]+"
AP_RE = re.compile(rf"^ap((?:\s+{NAME})*)\s*$")
STATE_RE = re.compile(rf"^state\s+({NAME})\s*(?:\{{([^}}]*)\}})?\s*$")
TRANS_RE = re.compile(rf"^trans\s+({NAME})\s*->\s*({NAME})\s*$")
WEIGHTED_RE = re.compile(rf"^trans\s+({NAME})\s*-\[\s*([+-]?\d+)\s*\]->\s*({NAME})\s*$")


def check_propositions(props, number):
    for prop in sorted(props):
        if not is_proposition_name(prop):
            raise ModelFormatError(f"proposition {prop!r} cannot be named in a formula", number)


def parse_model(text):
    """
    Parse the model text format.

    Args:
        text: Model description

    Returns:
        KripkeStructure, or DurationalKS when transitions carry weights

    Raises:
        ModelFormatError: malformed line, duplicate or unknown state, undeclared
            proposition, mixed weighted and plain transitions, or a state without successor
    """
    text = text.replace("−", "-")
    declared = None
    names, labels, index = [], [], {}
    plain, weighted = [], []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        match = AP_RE.match(line)
        if match:
            props = set(match.group(1).split())
            check_propositions(props, number)
            declared = (declared or set()) | props
            continue
        match = STATE_RE.match(line)
        if match:
            name = match.group(1)
            if name in index:
                raise ModelFormatError(f"duplicate state {name}", number)
            index[name] = len(names)
            names.append(name)
            label = set((match.group(2) or "").replace(",", " ").split())
            check_propositions(label, number)
            labels.append((label, number))
            continue
        match = WEIGHTED_RE.match(line)
        if match:
            weighted.append((match.group(1), int(match.group(2)), match.group(3), number))
            continue
        match = TRANS_RE.match(line)
        if match:
            plain.append((match.group(1), match.group(2), number))
            continue
        raise ModelFormatError(f"cannot parse line: {line!r}", number)

    if plain and weighted:
        raise ModelFormatError("cannot mix weighted and plain transitions", weighted[0][3])
    if declared is not None:
        for label, number in labels:
            undeclared = label - declared
            if undeclared:
                raise ModelFormatError(f"undeclared proposition {sorted(undeclared)[0]}", number)

    def lookup(name, number):
        if name not in index:
            raise ModelFormatError(f"transition names unknown state {name}", number)
        return index[name]

    label_sets = [label for label, _ in labels]
    if weighted:
        transitions = [(lookup(a, n), w, lookup(b, n)) for a, w, b, n in weighted]
        structure = DurationalKS(names, transitions, label_sets, declared)
    else:
        successors = [[] for _ in names]
        for a, b, n in plain:
            successors[lookup(a, n)].append(lookup(b, n))
        structure = KripkeStructure(names, successors, label_sets, declared)
    logger.debug(f"Parsed {structure!r}")
    return structure


def print_model(structure):
    """Render a structure in the model text format, states in index order."""
    lines = []
    if structure.declared_ap:
        lines.append("ap " + " ".join(sorted(structure.declared_ap)))
    for name, label in zip(structure.names, structure.labels):
        lines.append(f"state {name} {{ {' '.join(sorted(label))} }}".replace("{  }", "{ }"))
    if isinstance(structure, DurationalKS):
        for src, w, dst in structure.transitions:
            lines.append(f"trans {structure.names[src]} -[{w}]-> {structure.names[dst]}")
    else:
        for src, succ in enumerate(structure.successors):
            for dst in succ:
                lines.append(f"trans {structure.names[src]} -> {structure.names[dst]}")
    return "\n".join(lines) + "\n"
