"""Abstract syntax of bounded probabilistic temporal formulas."""

import math
from collections.abc import Iterator
from dataclasses import dataclass, replace
from itertools import count


@dataclass(frozen=True)
class Steps:
    """Step bound: at most ``k`` transitions."""

    k: int

    def __post_init__(self):
        """Validate the step count."""
        if self.k < 0:
            raise ValueError(f"Step bound must be non-negative, got {self.k}")


@dataclass(frozen=True)
class Time:
    """Time bound: entry time at most ``t`` (continuous-time models only)."""

    t: float

    def __post_init__(self):
        """Validate the time horizon."""
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise ValueError(f"Time bound must be a non-negative finite number, got {self.t}")


Bound = Steps | Time


# State formulas


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class TrueFormula:
    pass


@dataclass(frozen=True)
class FalseFormula:
    pass


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Prob:
    """Probabilistic operator P>=theta [ path ].

    ``node_id`` identifies the operator within its formula; ids are assigned
    in pre-order by :func:`number_prob_nodes`.
    """

    theta: float
    path: "PathFormula"
    node_id: int = 0

    def __post_init__(self):
        """Validate the threshold."""
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"Probability threshold must be in [0, 1], got {self.theta}")


# Path formulas


@dataclass(frozen=True)
class Next:
    operand: "Formula"


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    bound: Bound


Formula = Atom | TrueFormula | FalseFormula | Not | And | Or | Prob
PathFormula = Next | Until


def path_operands(path: PathFormula) -> tuple[Formula, ...]:
    """State formulas directly below a path formula."""
    if isinstance(path, Next):
        return (path.operand,)
    return (path.left, path.right)


def iter_prob_nodes(formula: Formula) -> Iterator[Prob]:
    """Yield every probabilistic operator in pre-order (outermost first)."""
    match formula:
        case Prob(path=path):
            yield formula
            for operand in path_operands(path):
                yield from iter_prob_nodes(operand)
        case Not(operand=operand):
            yield from iter_prob_nodes(operand)
        case And(left=left, right=right) | Or(left=left, right=right):
            yield from iter_prob_nodes(left)
            yield from iter_prob_nodes(right)


def contains_prob(formula: Formula | PathFormula) -> bool:
    """Check whether a state or path formula contains a probabilistic operator."""
    if isinstance(formula, Next | Until):
        return any(contains_prob(operand) for operand in path_operands(formula))
    return next(iter_prob_nodes(formula), None) is not None


def iter_atoms(formula: Formula) -> Iterator[str]:
    """Yield the atomic proposition names used in a formula."""
    match formula:
        case Atom(name=name):
            yield name
        case Not(operand=operand):
            yield from iter_atoms(operand)
        case And(left=left, right=right) | Or(left=left, right=right):
            yield from iter_atoms(left)
            yield from iter_atoms(right)
        case Prob(path=path):
            for operand in path_operands(path):
                yield from iter_atoms(operand)


def number_prob_nodes(formula: Formula, start: int = 0) -> Formula:
    """
    Assign pre-order ids to the probabilistic operators of a formula.

    Args:
        formula: Formula to renumber
        start: Id of the first operator

    Returns:
        Structurally identical formula with ids start, start+1, ...
    """
    counter = count(start)

    def renumber(node: Formula) -> Formula:
        match node:
            case Prob(path=path):
                node_id = next(counter)
                return replace(node, node_id=node_id, path=renumber_path(path))
            case Not(operand=operand):
                return Not(renumber(operand))
            case And(left=left, right=right):
                return And(renumber(left), renumber(right))
            case Or(left=left, right=right):
                return Or(renumber(left), renumber(right))
        return node

    def renumber_path(path: PathFormula) -> PathFormula:
        if isinstance(path, Next):
            return Next(renumber(path.operand))
        return Until(renumber(path.left), renumber(path.right), path.bound)

    return renumber(formula)

