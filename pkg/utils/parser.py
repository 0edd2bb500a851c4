"""Concrete syntax for formulas: tokenizer, recursive-descent parser and printer.

Grammar (``!`` binds tightest, then ``&``, ``|`` and the right-associative ``->``)::

    phi    ::= ident | TT | FF | "!" phi | phi "&" phi | phi "|" phi | phi "->" phi
             | "E" "(" phi "U" [constr] phi ")" | "A" "(" phi "U" [constr] phi ")"
             | ("EF"|"AF"|"EG"|"AG") [constr] phi | ("EX"|"AX") phi
             | ident "[" phi "]" "." phi | "N" phi | sum cmp int
    constr ::= "{" bexpr "}"
    bexpr  ::= atom | "!" bexpr | bexpr "&" bexpr | bexpr "|" bexpr | "(" bexpr ")" | TT | FF
    atom   ::= sum cmp int
    sum    ::= ["-"] [int "*"] term { ("+"|"-") [int "*"] term }
    term   ::= "#" "(" phi ")" | "#" ident | "#TT" | "#FF" | "DUR" | ident

A bare ``ident`` term is a counting variable and is only allowed at formula level.
A formula-level sum over ``#`` terms is the constraint itself, i.e. ``E(FF U{C} TT)``.
"""
import logging
import re

import config
from models.formula import (
    DUR, FF, TT, FALSE_C, TRUE_C, And, AndC, Atom, AtomicConstraint, Bind, Elapsed, ExistsUntil,
    FalseF, ForallUntil, Not, NotC, Now, Or, OrC, TrueF, Until, VarConstraint, exists_finally,
    exists_globally, exists_next, forall_finally, forall_globally, forall_next, implies, next_operand,
)
from utils.errors import FormulaSyntaxError

logger = logging.getLogger(__name__)

KEYWORDS = {"E", "A", "U", "EF", "AF", "EG", "AG", "EX", "AX", "N", "TT", "FF", "DUR"}
COMPARATOR_TOKENS = ("<=", ">=", "<", ">", "=")
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")

TOKEN_RE = re.compile(r"""
    (?P<space>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<arrow>->)
  | (?P<cmp><=|>=|<|>|=)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[!&|(){}\[\].#+*\-])
""", re.VERBOSE)


class Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.column})"


def tokenize(text):
    """Split formula text into tokens, tracking line and column (1-based)."""
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        if kind not in ("space", "comment"):
            if kind == "ident" and value in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rfind("\n") + 1
        pos = match.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


def is_proposition_name(name):
    """Whether ``name`` can be written as an atom in a formula."""
    return IDENT_RE.fullmatch(name) is not None and name not in KEYWORDS


class FormulaParser:
    """Recursive-descent parser over a token list; one instance per input text."""

    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token helpers -----------------------------------------------------

    @property
    def current(self):
        return self.tokens[self.pos]

    def peek(self, offset=1):
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def at(self, text):
        token = self.current
        return token.kind != "end" and token.text == text

    def advance(self):
        token = self.current
        if token.kind != "end":
            self.pos += 1
        return token

    def expect(self, text):
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, message, token=None):
        token = token or self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        raise FormulaSyntaxError(f"{message}, found {found}", token.line, token.column)

    # -- formulas ----------------------------------------------------------

    def parse(self):
        formula = self.formula()
        if self.current.kind != "end":
            self.fail("unexpected trailing input")
        return formula

    def formula(self):
        lhs = self.disjunction()
        if self.current.kind == "arrow":
            self.advance()
            return implies(lhs, self.formula())
        return lhs

    def disjunction(self):
        result = self.conjunction()
        while self.at("|"):
            self.advance()
            result = Or(result, self.conjunction())
        return result

    def conjunction(self):
        result = self.unary()
        while self.at("&"):
            self.advance()
            result = And(result, self.unary())
        return result

    def unary(self):
        token = self.current
        if self.at("!"):
            self.advance()
            return Not(self.unary())
        if token.kind == "keyword":
            if token.text in ("EF", "AF", "EG", "AG"):
                self.advance()
                constraint = self.optional_constraint()
                operand = self.unary()
                builder = {
                    "EF": exists_finally, "AF": forall_finally,
                    "EG": exists_globally, "AG": forall_globally,
                }[token.text]
                return builder(operand, constraint)
            if token.text in ("EX", "AX"):
                self.advance()
                operand = self.unary()
                return exists_next(operand) if token.text == "EX" else forall_next(operand)
            if token.text == "N":
                self.advance()
                return Now(self.unary())
        if token.kind == "ident" and self.peek().text == "[":
            return self.binder()
        return self.primary()

    def binder(self):
        var = self.advance().text
        self.expect("[")
        counted = self.formula()
        self.expect("]")
        self.expect(".")
        return Bind(var, counted, self.unary())

    def primary(self):
        token = self.current
        if token.kind == "keyword":
            if token.text == "TT":
                self.advance()
                return TT
            if token.text == "FF":
                self.advance()
                return FF
            if token.text in ("E", "A"):
                return self.until()
            if token.text == "DUR":
                return self.formula_sum()
            self.fail("unexpected keyword")
        if self.at("("):
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if token.kind in ("int",) or self.at("-") or self.at("#"):
            return self.formula_sum()
        if token.kind == "ident":
            following = self.peek()
            if following.kind == "cmp" or following.text in ("+", "-"):
                return self.formula_sum()
            self.advance()
            return Atom(token.text)
        self.fail("expected a formula")

    def until(self):
        quantifier = self.advance().text
        self.expect("(")
        lhs = self.formula()
        if not self.at("U"):
            self.fail("expected 'U'")
        self.advance()
        constraint = self.optional_constraint()
        rhs = self.formula()
        self.expect(")")
        return (ExistsUntil if quantifier == "E" else ForallUntil)(lhs, constraint, rhs)

    def formula_sum(self):
        """Sum at formula level: a variable constraint or a direct counting constraint."""
        start = self.current
        terms = self.sum_terms(allow_variables=True, allow_counting=True)
        cmp, bound = self.comparison()
        variables = [isinstance(base, str) for _, base in terms]
        if all(variables):
            return VarConstraint(tuple(terms), cmp, bound)
        if any(variables):
            self.fail("cannot mix counting variables and '#' terms in one sum", start)
        if any(base is DUR for _, base in terms):
            self.fail("DUR is only allowed inside a until constraint", start)
        return ExistsUntil(FF, AtomicConstraint(tuple(terms), cmp, bound), TT)

    # -- constraints -------------------------------------------------------

    def optional_constraint(self):
        if not self.at("{"):
            return None
        self.advance()
        constraint = self.bexpr_or()
        self.expect("}")
        return constraint

    def bexpr_or(self):
        result = self.bexpr_and()
        while self.at("|"):
            self.advance()
            result = OrC(result, self.bexpr_and())
        return result

    def bexpr_and(self):
        result = self.bexpr_not()
        while self.at("&"):
            self.advance()
            result = AndC(result, self.bexpr_not())
        return result

    def bexpr_not(self):
        if self.at("!"):
            self.advance()
            return NotC(self.bexpr_not())
        if self.at("("):
            self.advance()
            inner = self.bexpr_or()
            self.expect(")")
            return inner
        if self.at("TT"):
            self.advance()
            return TRUE_C
        if self.at("FF"):
            self.advance()
            return FALSE_C
        terms = self.sum_terms(allow_variables=False, allow_counting=True)
        cmp, bound = self.comparison()
        return AtomicConstraint(tuple(terms), cmp, bound)

    def comparison(self):
        if self.current.kind != "cmp":
            self.fail("expected a comparator")
        cmp = self.advance().text
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        token = self.current
        bound = sign * self.integer()
        if not config.INT_MIN <= bound <= config.INT_MAX:
            raise FormulaSyntaxError("integer constant out of 64-bit range", token.line, token.column)
        return cmp, bound

    def integer(self):
        token = self.current
        if token.kind != "int":
            self.fail("expected an integer")
        self.advance()
        value = int(token.text)
        if value > config.INT_MAX + 1:
            raise FormulaSyntaxError("integer constant out of 64-bit range", token.line, token.column)
        return value

    def sum_terms(self, allow_variables, allow_counting):
        terms = []
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        while True:
            coeff = 1
            if self.current.kind == "int":
                coeff = self.integer()
                self.expect("*")
            coeff *= sign
            if not config.INT_MIN <= coeff <= config.INT_MAX:
                self.fail("coefficient out of 64-bit range")
            terms.append((coeff, self.term(allow_variables, allow_counting)))
            if self.at("+"):
                sign = 1
            elif self.at("-"):
                sign = -1
            else:
                return terms
            self.advance()

    def term(self, allow_variables, allow_counting):
        token = self.current
        if self.at("#"):
            if not allow_counting:
                self.fail("'#' term not allowed here")
            self.advance()
            inner = self.current
            if self.at("("):
                self.advance()
                counted = self.formula()
                self.expect(")")
                return counted
            if self.at("TT"):
                self.advance()
                return TT
            if self.at("FF"):
                self.advance()
                return FF
            if inner.kind == "ident":
                self.advance()
                return Atom(inner.text)
            self.fail("expected a counted formula after '#'")
        if self.at("DUR"):
            self.advance()
            return DUR
        if token.kind == "ident":
            if not allow_variables:
                self.fail("counting variable not allowed inside a until constraint")
            self.advance()
            return token.text
        self.fail("expected a term")


def parse_formula(text):
    """
    Parse formula text into a normalized, hash-consed formula.

    Args:
        text: Formula in the concrete grammar

    Returns:
        Formula node; sugar (EF, EX, ->, ...) is expanded

    Raises:
        FormulaSyntaxError: on any grammar violation, with line and column
        WellFormednessError: when variable binders are bound twice or cyclic
    """
    from utils.fragments import check_variables

    formula = FormulaParser(text).parse()
    check_variables(formula)
    return formula


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

IMPLIES, OR, AND, UNARY, ATOM = range(1, 6)


def _precedence(f):
    if isinstance(f, Or):
        return OR
    if isinstance(f, And):
        return AND
    if isinstance(f, (Not, Now, Bind)):
        return UNARY
    if isinstance(f, Until):
        if next_operand(f) is not None or f.lhs is TT:
            return UNARY
        return ATOM
    return ATOM


def _wrap(f, minimum):
    text = print_formula(f)
    return f"({text})" if _precedence(f) < minimum else text


def _constraint_suffix(c):
    return "" if c is None else "{" + print_constraint(c) + "}"


def print_formula(f):
    """
    Render a formula in the concrete grammar.

    Parsing the result gives back the same node. EF/AF/EG/AG/EX/AX are used
    when the normalized node has their shape.
    """
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, TrueF):
        return "TT"
    if isinstance(f, FalseF):
        return "FF"
    if isinstance(f, Elapsed):
        return "DUR"
    if isinstance(f, Not):
        child = f.child
        if isinstance(child, Until) and child.lhs is TT and isinstance(child.rhs, Not):
            name = "EG" if isinstance(child, ForallUntil) else "AG"
            return f"{name}{_constraint_suffix(child.constraint)} {_wrap(child.rhs.child, UNARY)}"
        return "!" + _wrap(child, UNARY)
    if isinstance(f, And):
        return f"{_wrap(f.lhs, AND)} & {_wrap(f.rhs, UNARY)}"
    if isinstance(f, Or):
        return f"{_wrap(f.lhs, OR)} | {_wrap(f.rhs, AND)}"
    if isinstance(f, Until):
        operand = next_operand(f)
        if operand is not None:
            return f"{f.quantifier}X {_wrap(operand, UNARY)}"
        if f.lhs is TT:
            return f"{f.quantifier}F{_constraint_suffix(f.constraint)} {_wrap(f.rhs, UNARY)}"
        if f.lhs is FF and f.rhs is TT and isinstance(f, ExistsUntil) and isinstance(f.constraint, AtomicConstraint):
            if not any(counted is DUR for _, counted in f.constraint.terms):
                return print_constraint(f.constraint)
        return (f"{f.quantifier}({print_formula(f.lhs)} U{_constraint_suffix(f.constraint)} "
                f"{print_formula(f.rhs)})")
    if isinstance(f, Bind):
        return f"{f.var}[{print_formula(f.counted)}].{_wrap(f.body, UNARY)}"
    if isinstance(f, VarConstraint):
        return f"{_print_sum(f.terms, lambda var: var)} {f.cmp} {f.bound}"
    if isinstance(f, Now):
        return "N " + _wrap(f.child, UNARY)
    raise TypeError(f"cannot print {type(f).__name__}")


def _print_counted(counted):
    if isinstance(counted, Atom):
        return "#" + counted.name
    if counted is TT:
        return "#TT"
    if counted is FF:
        return "#FF"
    if counted is DUR:
        return "DUR"
    return "#(" + print_formula(counted) + ")"


def _print_sum(terms, render):
    parts = []
    for index, (coeff, base) in enumerate(terms):
        text = render(base)
        magnitude = abs(coeff)
        body = text if magnitude == 1 else f"{magnitude}*{text}"
        if index == 0:
            parts.append(("-" if coeff < 0 else "") + body)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + body)
    return " ".join(parts)


CONSTRAINT_OR, CONSTRAINT_AND, CONSTRAINT_UNARY = range(1, 4)


def _constraint_precedence(c):
    if isinstance(c, OrC):
        return CONSTRAINT_OR
    if isinstance(c, AndC):
        return CONSTRAINT_AND
    return CONSTRAINT_UNARY


def _wrap_constraint(c, minimum):
    text = print_constraint(c)
    return f"({text})" if _constraint_precedence(c) < minimum else text


def print_constraint(c):
    """Render a counting constraint as it appears between braces."""
    if isinstance(c, AtomicConstraint):
        return f"{_print_sum(c.terms, _print_counted)} {c.cmp} {c.bound}"
    if c is TRUE_C:
        return "TT"
    if c is FALSE_C:
        return "FF"
    if isinstance(c, NotC):
        return "!" + _wrap_constraint(c.child, CONSTRAINT_UNARY)
    if isinstance(c, AndC):
        return f"{_wrap_constraint(c.lhs, CONSTRAINT_AND)} & {_wrap_constraint(c.rhs, CONSTRAINT_UNARY)}"
    if isinstance(c, OrC):
        return f"{_wrap_constraint(c.lhs, CONSTRAINT_OR)} | {_wrap_constraint(c.rhs, CONSTRAINT_AND)}"
    raise TypeError(f"cannot print {type(c).__name__}")
