"""STL formula AST and the horizon recursion.

Formulas are immutable trees over indexed predicates ``pN`` (1-based,
referencing a row of the output map or a column of a monitored trace).
Temporal operators carry inclusive integer bounds ``[a, b]`` with
``0 <= a < b``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormulaError

__all__ = [
    "Formula",
    "Pred",
    "Not",
    "And",
    "Or",
    "Eventually",
    "Always",
    "Until",
    "Release",
    "horizon",
    "eliminate_release",
    "predicate_indices",
]


class Formula:
    """Base class for all AST nodes."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And((self, other))

    def __or__(self, other: "Formula") -> "Formula":
        return Or((self, other))

    def __invert__(self) -> "Formula":
        return Not(self)


def _check_bounds(a: int, b: int) -> None:
    if a < 0 or b <= a:
        raise FormulaError(f"temporal bounds must satisfy 0 <= a < b, got [{a},{b}]")


@dataclass(frozen=True)
class Pred(Formula):
    """Atomic predicate ``y_index >= 0`` (index is 1-based)."""

    index: int

    def __post_init__(self):
        if self.index < 1:
            raise FormulaError(f"predicate index must be >= 1, got {self.index}")

    def __str__(self):
        return f"p{self.index}"


@dataclass(frozen=True)
class Not(Formula):
    child: Formula

    def __str__(self):
        return f"!{_atom_str(self.child)}"


@dataclass(frozen=True)
class And(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise FormulaError("conjunction needs at least two operands")

    def __str__(self):
        return " & ".join(_tight_str(c) for c in self.children)


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise FormulaError("disjunction needs at least two operands")

    def __str__(self):
        return " | ".join(
            f"({c})" if isinstance(c, Or) else _loose_str(c) for c in self.children
        )


@dataclass(frozen=True)
class Eventually(Formula):
    a: int
    b: int
    child: Formula

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def __str__(self):
        return f"F[{self.a},{self.b}] {_atom_str(self.child)}"


@dataclass(frozen=True)
class Always(Formula):
    a: int
    b: int
    child: Formula

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def __str__(self):
        return f"G[{self.a},{self.b}] {_atom_str(self.child)}"


@dataclass(frozen=True)
class Until(Formula):
    a: int
    b: int
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def __str__(self):
        return f"{_atom_str(self.left)} U[{self.a},{self.b}] {_atom_str(self.right)}"


@dataclass(frozen=True)
class Release(Formula):
    a: int
    b: int
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_bounds(self.a, self.b)

    def __str__(self):
        return f"{_atom_str(self.left)} R[{self.a},{self.b}] {_atom_str(self.right)}"


def _atom_str(f: Formula) -> str:
    # operand position of a unary/infix operator: parenthesize anything compound
    if isinstance(f, (Pred, Not)):
        return str(f)
    return f"({f})"


def _tight_str(f: Formula) -> str:
    # operand of &: | and infix operators bind looser
    if isinstance(f, (Or, Until, Release)):
        return f"({f})"
    return str(f)


def _loose_str(f: Formula) -> str:
    if isinstance(f, (Until, Release)):
        return f"({f})"
    return str(f)


def horizon(f: Formula) -> int:
    """Number of future steps the truth value at time t depends on.

    Recursion: predicates contribute 0, negation is transparent,
    eventually/always add b, boolean connectives take the max, and until
    adds b to the max of its operands.  Release follows from rewriting it
    to always/until, which yields b plus the max of its operands.
    """
    if isinstance(f, Pred):
        return 0
    if isinstance(f, Not):
        return horizon(f.child)
    if isinstance(f, (And, Or)):
        return max(horizon(c) for c in f.children)
    if isinstance(f, (Eventually, Always)):
        return f.b + horizon(f.child)
    if isinstance(f, (Until, Release)):
        return f.b + max(horizon(f.left), horizon(f.right))
    raise TypeError(f"not a formula node: {f!r}")


def release_identity(f: Release) -> Formula:
    """Expand ``l R[a,b] r`` into ``G[a,b] r | (r U[a,b] (l & r))``."""
    return Or((Always(f.a, f.b, f.right), Until(f.a, f.b, f.right, And((f.left, f.right)))))


def eliminate_release(f: Formula) -> Formula:
    """Rewrite every release node via its defining identity, bottom-up."""
    if isinstance(f, (Pred,)):
        return f
    if isinstance(f, Not):
        return Not(eliminate_release(f.child))
    if isinstance(f, And):
        return And(tuple(eliminate_release(c) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(eliminate_release(c) for c in f.children))
    if isinstance(f, Eventually):
        return Eventually(f.a, f.b, eliminate_release(f.child))
    if isinstance(f, Always):
        return Always(f.a, f.b, eliminate_release(f.child))
    if isinstance(f, Until):
        return Until(f.a, f.b, eliminate_release(f.left), eliminate_release(f.right))
    if isinstance(f, Release):
        left = eliminate_release(f.left)
        right = eliminate_release(f.right)
        return release_identity(Release(f.a, f.b, left, right))
    raise TypeError(f"not a formula node: {f!r}")


def predicate_indices(f: Formula) -> set[int]:
    """All predicate indices referenced anywhere in the formula."""
    if isinstance(f, Pred):
        return {f.index}
    if isinstance(f, Not):
        return predicate_indices(f.child)
    if isinstance(f, (And, Or)):
        out: set[int] = set()
        for c in f.children:
            out |= predicate_indices(c)
        return out
    if isinstance(f, (Eventually, Always)):
        return predicate_indices(f.child)
    if isinstance(f, (Until, Release)):
        return predicate_indices(f.left) | predicate_indices(f.right)
    raise TypeError(f"not a formula node: {f!r}")
