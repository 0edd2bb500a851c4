import logging

import numpy as np

from utils.errors import ModelFormatError

logger = logging.getLogger(__name__)

ALL_ONE = "all-one"
ZERO_ONE = "zero-one"
MINUS_ZERO_ONE = "minus-zero-one"
ARBITRARY = "arbitrary"

WEIGHT_CLASSES = (ALL_ONE, ZERO_ONE, MINUS_ZERO_ONE, ARBITRARY)


def weight_class_of(weights):
    """Tightest weight-class tag covering ``weights``."""
    weights = set(weights)
    if weights <= {1}:
        return ALL_ONE
    if weights <= {0, 1}:
        return ZERO_ONE
    if weights <= {-1, 0, 1}:
        return MINUS_ZERO_ONE
    return ARBITRARY


class KripkeStructure:
    """Finite Kripke structure with a total transition relation over states 0..n-1"""

    kind = "ks"

    def __init__(self, names, successors, labels, declared_ap=None):
        self.names = tuple(names)
        self.successors = tuple(tuple(sorted(set(succ))) for succ in successors)
        self.labels = tuple(frozenset(label) for label in labels)
        used = frozenset().union(*self.labels) if self.labels else frozenset()
        self.declared_ap = frozenset(declared_ap) if declared_ap is not None else used
        self.index = {}
        self._predecessors = None
        self._validate(used)

    def _validate(self, used):
        if not self.names:
            raise ModelFormatError("structure has no states")
        if not len(self.names) == len(self.successors) == len(self.labels):
            raise ModelFormatError("names, successors and labels differ in length")
        for i, name in enumerate(self.names):
            if name in self.index:
                raise ModelFormatError(f"duplicate state {name}")
            self.index[name] = i
        for i, succ in enumerate(self.successors):
            if not succ:
                raise ModelFormatError(f"relation not total at {self.names[i]}")
            if succ[0] < 0 or succ[-1] >= len(self.names):
                raise ModelFormatError(f"transition from {self.names[i]} to an unknown state")
        undeclared = used - self.declared_ap
        if undeclared:
            raise ModelFormatError(f"undeclared proposition {sorted(undeclared)[0]}")

    @property
    def size(self):
        return len(self.names)

    def __len__(self):
        return len(self.names)

    def __repr__(self):
        return f"{type(self).__name__}(states={self.size}, transitions={self.transition_count})"

    @property
    def transition_count(self):
        return sum(len(succ) for succ in self.successors)

    def state_index(self, state):
        """Index of ``state`` given by name or index."""
        if isinstance(state, str):
            if state not in self.index:
                raise ModelFormatError(f"unknown state {state}")
            return self.index[state]
        if not 0 <= state < self.size:
            raise ModelFormatError(f"unknown state index {state}")
        return state

    @property
    def predecessors(self):
        if self._predecessors is None:
            preds = [[] for _ in self.names]
            for src, succ in enumerate(self.successors):
                for dst in succ:
                    preds[dst].append(src)
            self._predecessors = tuple(tuple(p) for p in preds)
        return self._predecessors

    def has_transition(self, src, dst):
        return dst in self.successors[src]

    def holds(self, prop):
        """Boolean mask of the states labeled with ``prop``."""
        return np.array([prop in label for label in self.labels], dtype=bool)

    def adjacency(self):
        matrix = np.zeros((self.size, self.size), dtype=bool)
        for src, succ in enumerate(self.successors):
            matrix[src, list(succ)] = True
        return matrix

    def to_dict(self):
        """Convert structure to dictionary"""
        return {
            "kind": self.kind,
            "ap": sorted(self.declared_ap),
            "states": [
                {"name": name, "labels": sorted(label)} for name, label in zip(self.names, self.labels)
            ],
            "transitions": [
                {"source": self.names[src], "target": self.names[dst]}
                for src, succ in enumerate(self.successors) for dst in succ
            ],
        }

    @classmethod
    def from_dict(cls, data):
        """Create a structure from its dictionary form; weighted transitions give a DurationalKS"""
        names = [state["name"] for state in data["states"]]
        labels = [state.get("labels", []) for state in data["states"]]
        declared = data.get("ap")
        index = {name: i for i, name in enumerate(names)}
        try:
            if any("weight" in t for t in data.get("transitions", [])):
                transitions = [(index[t["source"]], int(t["weight"]), index[t["target"]])
                               for t in data["transitions"]]
                return DurationalKS(names, transitions, labels, declared)
            successors = [[] for _ in names]
            for t in data.get("transitions", []):
                successors[index[t["source"]]].append(index[t["target"]])
        except KeyError as e:
            raise ModelFormatError(f"transition names an unknown state: {e.args[0]}")
        return KripkeStructure(names, successors, labels, declared)


class DurationalKS(KripkeStructure):
    """Kripke structure whose transitions carry integer durations"""

    kind = "dks"

    def __init__(self, names, transitions, labels, declared_ap=None):
        self.transitions = tuple(sorted(set((int(src), int(w), int(dst)) for src, w, dst in transitions)))
        successors = [[] for _ in names]
        for src, _, dst in self.transitions:
            if not 0 <= src < len(names) or not 0 <= dst < len(names):
                raise ModelFormatError("weighted transition names an unknown state")
            successors[src].append(dst)
        super().__init__(names, successors, labels, declared_ap)
        self.weight_class = weight_class_of(w for _, w, _ in self.transitions)
        self.out_edges = tuple(
            tuple((w, dst) for s, w, dst in self.transitions if s == src) for src in range(self.size)
        )

    @property
    def weights(self):
        return sorted({w for _, w, _ in self.transitions})

    @property
    def transition_count(self):
        return len(self.transitions)

    def weight_matrix(self, weight):
        """Boolean adjacency restricted to transitions of duration ``weight``."""
        matrix = np.zeros((self.size, self.size), dtype=bool)
        for src, w, dst in self.transitions:
            if w == weight:
                matrix[src, dst] = True
        return matrix

    def underlying(self):
        """The plain Kripke structure obtained by forgetting durations."""
        return KripkeStructure(self.names, self.successors, self.labels, self.declared_ap)

    def negated(self):
        return DurationalKS(self.names, [(src, -w, dst) for src, w, dst in self.transitions],
                            self.labels, self.declared_ap)

    def to_dict(self):
        data = super().to_dict()
        data["weight_class"] = self.weight_class
        data["transitions"] = [
            {"source": self.names[src], "weight": w, "target": self.names[dst]}
            for src, w, dst in self.transitions
        ]
        return data


class RunPrefix:
    """
    Finite run prefix over state indices, possibly empty.

    ``loop_start`` marks a lasso: the states from that position on repeat forever.
    ``weights`` optionally records the duration taken on each step of a DKS run.
    """

    def __init__(self, states=(), loop_start=None, weights=None):
        self.states = tuple(states)
        self.loop_start = loop_start
        self.weights = None if weights is None else tuple(weights)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __eq__(self, other):
        return (isinstance(other, RunPrefix) and self.states == other.states
                and self.loop_start == other.loop_start)

    def __hash__(self):
        return hash((self.states, self.loop_start))

    def __repr__(self):
        return f"RunPrefix({list(self.states)}, loop_start={self.loop_start})"

    @property
    def is_lasso(self):
        return self.loop_start is not None

    def prefix(self, length):
        return RunPrefix(self.states[:length],
                         weights=None if self.weights is None else self.weights[:max(length - 1, 0)])

    def count(self, states):
        """Number of positions whose state is in ``states`` (a mask or a collection of indices)."""
        if isinstance(states, np.ndarray):
            return int(sum(1 for q in self.states if states[q]))
        return sum(1 for q in self.states if q in states)

    def weight(self, structure=None):
        """Sum of the durations along the prefix."""
        if self.weights is not None:
            return sum(self.weights)
        total = 0
        for src, dst in zip(self.states, self.states[1:]):
            options = {w for w, d in structure.out_edges[src] if d == dst}
            if len(options) != 1:
                raise ValueError(f"duration between {structure.names[src]} and {structure.names[dst]} "
                                 f"is not unique: {sorted(options)}")
            total += options.pop()
        return total

    def names(self, structure):
        names = [structure.names[q] for q in self.states]
        if self.loop_start is not None:
            names.insert(self.loop_start, "(")
            names.append(")^w")
        return names

    def to_dict(self, structure):
        return {
            "states": [structure.names[q] for q in self.states],
            "loop_start": self.loop_start,
            "weights": None if self.weights is None else list(self.weights),
        }


def validate_run(structure, run):
    """
    Check that consecutive states of a run prefix are transitions of ``structure``.

    Args:
        structure: KripkeStructure or DurationalKS
        run: RunPrefix, or a sequence of state names or indices

    Returns:
        True when every adjacent pair is a transition (the empty prefix always is)
    """
    states = run.states if isinstance(run, RunPrefix) else tuple(run)
    try:
        indices = [structure.state_index(q) for q in states]
    except ModelFormatError:
        return False
    if any(not structure.has_transition(a, b) for a, b in zip(indices, indices[1:])):
        return False
    if isinstance(run, RunPrefix) and run.loop_start is not None and indices:
        return structure.has_transition(indices[-1], indices[run.loop_start])
    return True
