"""Exception types shared by the parser, the model reader, the engines and the API."""


class CCTLError(Exception):
    """Base class for every error raised by the toolkit."""


class FormulaSyntaxError(CCTLError, ValueError):
    """Formula text does not follow the grammar."""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class WellFormednessError(CCTLError, ValueError):
    """Variable binders break the once-bound / acyclic-order rules, or a formula is open."""


class ModelFormatError(CCTLError, ValueError):
    """Model text is malformed or describes an invalid structure."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class FragmentError(CCTLError, ValueError):
    """Formula uses syntax the selected engine or translator does not handle."""


class ConstraintIndexError(CCTLError, IndexError):
    """Atom or term index passed to constraint_decr does not exist."""


class ConstraintOverflowError(CCTLError, ArithmeticError):
    """Constraint arithmetic left the 64-bit range."""


class UndecidableFragment(CCTLError):
    """The requested problem is undecidable for the formula's fragment."""

    def __init__(self, descriptor, problem="model checking"):
        super().__init__(f"{problem} is undecidable for {descriptor.fragment_name}")
        self.descriptor = descriptor
        self.problem = problem


class ResourceCapExceeded(CCTLError):
    """A configured size cap was hit before the computation finished."""

    def __init__(self, what, cap, required=None, modality=None):
        message = f"{what} exceeded cap {cap}"
        if required is not None:
            message += f" (required {required})"
        if modality is not None:
            message += f" in {modality}"
        super().__init__(message)
        self.what = what
        self.cap = cap
        self.required = required
        self.modality = modality
