"""Parser and renderer for the property formula language.

Grammar (precedence ``!`` > ``&`` > ``|``, binary operators left-associative)::

    state := atom | true | false | !state | state & state | state "|" state
           | P>=theta [ path ] | ( state )
    path  := X state | state U<=bound state | F<=bound state | G<=bound state
    bound := integer (steps) | decimal followed by "t" (time, e.g. 4.5t)

Derived forms are removed while parsing:

* ``F<=b phi``  becomes ``true U<=b phi``
* ``P>=theta [ G<=b phi ]`` becomes ``!P>=(1-theta) [ true U<=b !phi ]``
* ``P<theta [..]`` and ``P<=theta [..]`` become ``!P>=theta [..]``
* ``P>theta [..]`` becomes ``P>=theta [..]``

The last two treat the threshold itself as part of the indifference region.
"""

import logging
from dataclasses import dataclass

import numpy as np
from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from src.core.errors import FormulaSyntaxError, SourceSpan
from src.models.formula import (
    And,
    Atom,
    Bound,
    FalseFormula,
    Formula,
    Next,
    Not,
    Or,
    PathFormula,
    Prob,
    Steps,
    Time,
    TrueFormula,
    Until,
    number_prob_nodes,
)

logger = logging.getLogger(__name__)

FORMULA_GRAMMAR = r"""
    ?start: disjunction

    ?disjunction: conjunction
                | disjunction "|" conjunction       -> or_

    ?conjunction: unary
                | conjunction "&" unary             -> and_

    ?unary: "!" unary                               -> not_
          | primary

    ?primary: "true"                                -> true
            | "false"                               -> false
            | NAME                                  -> atom
            | PROB_OP PROBABILITY "[" path "]"      -> prob
            | "(" disjunction ")"

    path: "X" disjunction                           -> next_
        | disjunction UNTIL BOUND disjunction       -> until
        | FINALLY BOUND disjunction                 -> finally_
        | GLOBALLY BOUND disjunction                -> globally

    PROB_OP.2: /P(>=|<=|>|<)/
    UNTIL.2: "U<="
    FINALLY.2: "F<="
    GLOBALLY.2: "G<="
    PROBABILITY: /\d+(\.\d+)?|\.\d+/
    BOUND: /\d+(\.\d+)?t?/
    NAME: /[A-Za-z_][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
"""

_parser = Lark(FORMULA_GRAMMAR, parser="lalr", propagate_positions=True)


@dataclass(frozen=True)
class _Globally:
    """G<=b operand, rewritten by the enclosing probabilistic operator."""

    operand: Formula
    bound: Bound


def _span(token: Token) -> SourceSpan:
    return SourceSpan(line=token.line or 1, column=token.column or 1)


@v_args(inline=True)
class _FormulaBuilder(Transformer):
    """Turn the lark parse tree into formula objects."""

    def true(self):
        return TrueFormula()

    def false(self):
        return FalseFormula()

    def atom(self, name: Token):
        return Atom(str(name))

    def not_(self, operand):
        return Not(operand)

    def and_(self, left, right):
        return And(left, right)

    def or_(self, left, right):
        return Or(left, right)

    def next_(self, operand):
        return Next(operand)

    def until(self, left, _until: Token, bound: Token, right):
        return Until(left, right, self._bound(bound))

    def finally_(self, _finally: Token, bound: Token, operand):
        return Until(TrueFormula(), operand, self._bound(bound))

    def globally(self, _globally: Token, bound: Token, operand):
        return _Globally(operand, self._bound(bound))

    def prob(self, op: Token, probability: Token, path: PathFormula | _Globally):
        theta = float(probability)
        if not 0.0 <= theta <= 1.0:
            raise FormulaSyntaxError(f"Probability threshold must be in [0, 1], got {probability}", _span(probability))

        if isinstance(path, _Globally):
            # P(G phi) >= theta  <=>  not P(F !phi) > 1 - theta
            complement = round(1.0 - theta, 12)
            node: Formula = Not(Prob(complement, Until(TrueFormula(), Not(path.operand), path.bound)))
        else:
            node = Prob(theta, path)

        if op in ("P<", "P<="):
            return Not(node)
        return node

    @staticmethod
    def _bound(token: Token) -> Bound:
        text = str(token)
        if text.endswith("t"):
            return Time(float(text[:-1]))
        if "." in text:
            raise FormulaSyntaxError(
                f"Step bound '{text}' must be an integer; append 't' for a time bound", _span(token)
            )
        return Steps(int(text))


def parse_formula(text) -> Formula:
    """
    Parse a property formula.

    Args:
        text: Formula text or a readable text stream

    Returns:
        Formula with derived operators removed and operator ids assigned

    Raises:
        FormulaSyntaxError: If the text is not a well-formed formula
    """
    if not isinstance(text, str):
        text = text.read()

    try:
        tree = _parser.parse(text)
    except UnexpectedInput as e:
        raise FormulaSyntaxError(_describe(e), _error_span(e, text)) from None

    try:
        formula = _FormulaBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, FormulaSyntaxError):
            raise e.orig_exc from None
        raise

    return number_prob_nodes(formula)


def _describe(error: UnexpectedInput) -> str:
    if isinstance(error, UnexpectedCharacters):
        return f"Unexpected character {error.char!r}"
    if isinstance(error, UnexpectedEOF):
        return "Unexpected end of formula"
    if isinstance(error, UnexpectedToken):
        if error.token.type == "$END":
            return "Unexpected end of formula"
        return f"Unexpected {error.token.value!r}"
    return "Invalid formula"


def _error_span(error: UnexpectedInput, text: str) -> SourceSpan:
    line = getattr(error, "line", -1)
    column = getattr(error, "column", -1)
    if isinstance(line, int) and isinstance(column, int) and line >= 1 and column >= 1:
        return SourceSpan(line, column)
    # End of input: point just past the last character
    lines = text.split("\n")
    return SourceSpan(len(lines), len(lines[-1]) + 1)


def format_number(value: float) -> str:
    """Shortest positional decimal that reads back to the same float."""
    return np.format_float_positional(value, unique=True, trim="0")


def _format_bound(bound: Bound) -> str:
    if isinstance(bound, Steps):
        return str(bound.k)
    return f"{format_number(bound.t)}t"


def render_formula(formula: Formula) -> str:
    """
    Render a formula in the concrete syntax accepted by :func:`parse_formula`.

    Binary operands are parenthesized where precedence requires it and around
    the operands of temporal operators, so ``parse_formula(render_formula(f))``
    equals ``f`` for any formula produced by the parser.
    """
    match formula:
        case TrueFormula():
            return "true"
        case FalseFormula():
            return "false"
        case Atom(name=name):
            return name
        case Not(operand=operand):
            inner = render_formula(operand)
            if isinstance(operand, And | Or):
                inner = f"({inner})"
            return f"!{inner}"
        case And(left=left, right=right):
            left_text = _grouped(left, Or)
            right_text = _grouped(right, And | Or)
            return f"{left_text} & {right_text}"
        case Or(left=left, right=right):
            return f"{render_formula(left)} | {_grouped(right, Or)}"
        case Prob(theta=theta, path=path):
            return f"P>={format_number(theta)} [ {_render_path(path)} ]"
    raise TypeError(f"Not a formula: {formula!r}")


def _grouped(formula: Formula, needs_parens) -> str:
    text = render_formula(formula)
    return f"({text})" if isinstance(formula, needs_parens) else text


def _render_path(path: PathFormula) -> str:
    if isinstance(path, Next):
        return f"X {_grouped(path.operand, And | Or)}"
    left = _grouped(path.left, And | Or)
    right = _grouped(path.right, And | Or)
    return f"{left} U<={_format_bound(path.bound)} {right}"
