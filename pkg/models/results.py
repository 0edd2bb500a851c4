import numpy as np


class StateSet:
    """Satisfaction set over the dense state indices 0..size-1 of one structure"""

    __slots__ = ("mask",)

    def __init__(self, mask):
        mask = np.asarray(mask, dtype=bool).copy()
        mask.setflags(write=False)
        self.mask = mask

    @classmethod
    def empty(cls, size):
        return cls(np.zeros(size, dtype=bool))

    @classmethod
    def full(cls, size):
        return cls(np.ones(size, dtype=bool))

    @classmethod
    def of(cls, size, indices):
        mask = np.zeros(size, dtype=bool)
        mask[list(indices)] = True
        return cls(mask)

    @property
    def size(self):
        return len(self.mask)

    def __len__(self):
        return int(self.mask.sum())

    def __iter__(self):
        return iter(int(i) for i in np.flatnonzero(self.mask))

    def __contains__(self, index):
        return bool(self.mask[index])

    def __and__(self, other):
        return StateSet(self.mask & other.mask)

    def __or__(self, other):
        return StateSet(self.mask | other.mask)

    def __sub__(self, other):
        return StateSet(self.mask & ~other.mask)

    def __invert__(self):
        return StateSet(~self.mask)

    def __eq__(self, other):
        return isinstance(other, StateSet) and np.array_equal(self.mask, other.mask)

    def __hash__(self):
        return hash(self.mask.tobytes())

    def __repr__(self):
        return f"StateSet({sorted(self)})"

    def names(self, structure):
        return [structure.names[i] for i in self]


class FragmentDescriptor:
    """Syntactic flags of a formula and the fragment they place it in"""

    def __init__(self, boolean_constraints=False, non_unit_coefficients=False,
                 negative_coefficients=False, uses_variables=False, uses_cumulative=False,
                 uses_duration=False, uses_counting=False, closed=True):
        self.boolean_constraints = boolean_constraints
        self.non_unit_coefficients = non_unit_coefficients
        self.negative_coefficients = negative_coefficients
        self.uses_variables = uses_variables
        self.uses_cumulative = uses_cumulative
        self.uses_duration = uses_duration
        self.uses_counting = uses_counting
        self.closed = closed
        self.fragment_name = None
        self.mc_status = None
        self.sat_status = None
        self.mc_complexity = None
        self.sat_complexity = None
        self.engine = None

    def to_dict(self):
        """Convert descriptor to dictionary"""
        return {
            "fragment": self.fragment_name,
            "mc_status": self.mc_status,
            "sat_status": self.sat_status,
            "mc_complexity": self.mc_complexity,
            "sat_complexity": self.sat_complexity,
            "engine": self.engine,
            "flags": {
                "boolean_constraints": self.boolean_constraints,
                "non_unit_coefficients": self.non_unit_coefficients,
                "negative_coefficients": self.negative_coefficients,
                "uses_variables": self.uses_variables,
                "uses_cumulative": self.uses_cumulative,
                "uses_duration": self.uses_duration,
                "closed": self.closed,
            },
        }


class VerdictReport:
    """Outcome of a model-checking query at one designated state"""

    def __init__(self, verdict, state, engine, fragment, satisfying, witness=None,
                 witness_kind=None, timings=None):
        self.verdict = verdict
        self.state = state
        self.engine = engine
        self.fragment = fragment
        self.satisfying = satisfying
        self.witness = witness
        self.witness_kind = witness_kind
        self.timings = timings or {}

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "state": self.state,
            "engine": self.engine,
            "fragment": self.fragment,
            "satisfying": self.satisfying,
            "witness": self.witness,
            "witness_kind": self.witness_kind,
            "timings": self.timings,
        }


class SatResult:
    """Outcome of a satisfiability query"""

    SAT = "SAT"
    UNSAT = "UNSAT"
    UNDECIDABLE = "UNDECIDABLE"
    CAPPED = "CAPPED"

    def __init__(self, status, witness=None, initial=None, fragment=None, reason=None):
        self.status = status
        self.witness = witness
        self.initial = initial
        self.fragment = fragment
        self.reason = reason

    @property
    def satisfiable(self):
        return self.status == self.SAT

    def to_dict(self):
        """Convert result to dictionary; the witness is given in the model text format"""
        from utils.model_format import print_model

        return {
            "status": self.status,
            "fragment": self.fragment,
            "reason": self.reason,
            "initial": None if self.witness is None else self.witness.names[self.initial],
            "witness": None if self.witness is None else print_model(self.witness),
        }

    def __repr__(self):
        return f"SatResult({self.status}, fragment={self.fragment})"
