"""Positive normal form: negation-free, release-free formulas.

Negation is pushed down to the predicates (De Morgan over boolean
connectives, duals for the temporal operators, release expanded by its
defining identity).  A negated predicate then disappears by negating its
output row: in place when the positive form never occurs elsewhere,
otherwise by appending the sign-flipped row.  Robustness of the result
is non-decreasing in every output sample.
"""

from __future__ import annotations

import numpy as np

from .formula import (
    And,
    Always,
    Eventually,
    Formula,
    Not,
    Or,
    Pred,
    Release,
    Until,
    eliminate_release,
)
from .output_map import OutputMap

__all__ = ["to_pnf", "is_pnf", "push_negation"]


def push_negation(f: Formula, neg: bool = False) -> Formula:
    """Propagate negation inward until it only wraps predicates."""
    if isinstance(f, Pred):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return push_negation(f.child, not neg)
    if isinstance(f, And):
        children = tuple(push_negation(c, neg) for c in f.children)
        return Or(children) if neg else And(children)
    if isinstance(f, Or):
        children = tuple(push_negation(c, neg) for c in f.children)
        return And(children) if neg else Or(children)
    if isinstance(f, Eventually):
        child = push_negation(f.child, neg)
        return Always(f.a, f.b, child) if neg else Eventually(f.a, f.b, child)
    if isinstance(f, Always):
        child = push_negation(f.child, neg)
        return Eventually(f.a, f.b, child) if neg else Always(f.a, f.b, child)
    if isinstance(f, Until):
        left = push_negation(f.left, neg)
        right = push_negation(f.right, neg)
        if not neg:
            return Until(f.a, f.b, left, right)
        # !(l U r) = !l R !r, expanded through the release identity
        return Or(
            (
                Always(f.a, f.b, right),
                Until(f.a, f.b, right, And((left, right))),
            )
        )
    if isinstance(f, Release):
        return push_negation(eliminate_release(f), neg)
    raise TypeError(f"not a formula node: {f!r}")


def _polarities(f: Formula, pos: set[int], neg: set[int]) -> None:
    if isinstance(f, Pred):
        pos.add(f.index)
    elif isinstance(f, Not):
        # push_negation leaves Not only directly above predicates
        neg.add(f.child.index)
    elif isinstance(f, (And, Or)):
        for c in f.children:
            _polarities(c, pos, neg)
    elif isinstance(f, (Eventually, Always)):
        _polarities(f.child, pos, neg)
    elif isinstance(f, Until):
        _polarities(f.left, pos, neg)
        _polarities(f.right, pos, neg)


def _substitute(f: Formula, mapping: dict[int, int]) -> Formula:
    if isinstance(f, Pred):
        return f
    if isinstance(f, Not):
        return Pred(mapping[f.child.index])
    if isinstance(f, And):
        return And(tuple(_substitute(c, mapping) for c in f.children))
    if isinstance(f, Or):
        return Or(tuple(_substitute(c, mapping) for c in f.children))
    if isinstance(f, Eventually):
        return Eventually(f.a, f.b, _substitute(f.child, mapping))
    if isinstance(f, Always):
        return Always(f.a, f.b, _substitute(f.child, mapping))
    if isinstance(f, Until):
        return Until(f.a, f.b, _substitute(f.left, mapping), _substitute(f.right, mapping))
    raise TypeError(f"not a formula node: {f!r}")


def to_pnf(f: Formula, outputs: OutputMap) -> tuple[Formula, OutputMap]:
    """Transform to positive normal form, adjusting the output map.

    Returns a negation- and release-free formula plus the map whose
    ``origin`` records flipped (negative own index) and appended
    (negative source index) rows.
    """
    g = push_negation(eliminate_release(f))
    pos: set[int] = set()
    neg: set[int] = set()
    _polarities(g, pos, neg)

    C = outputs.C.copy()
    D = outputs.D.copy()
    e = outputs.e.copy()
    origin = list(outputs.origin)
    mapping: dict[int, int] = {}
    for i in sorted(neg):
        if i in pos:
            # both polarities used: append the negated row
            C = np.vstack([C, -outputs.C[i - 1 : i]])
            D = np.vstack([D, -outputs.D[i - 1 : i]])
            e = np.append(e, -outputs.e[i - 1])
            origin.append(-i)
            mapping[i] = len(origin)
        else:
            # only the negated form occurs: flip the row in place
            C[i - 1] = -C[i - 1]
            D[i - 1] = -D[i - 1]
            e[i - 1] = -e[i - 1]
            origin[i - 1] = -origin[i - 1]
            mapping[i] = i

    return _substitute(g, mapping), OutputMap(C, D, e, tuple(origin))


def is_pnf(f: Formula) -> bool:
    """True when the formula contains no negation and no release nodes."""
    if isinstance(f, Pred):
        return True
    if isinstance(f, (Not, Release)):
        return False
    if isinstance(f, (And, Or)):
        return all(is_pnf(c) for c in f.children)
    if isinstance(f, (Eventually, Always)):
        return is_pnf(f.child)
    if isinstance(f, Until):
        return is_pnf(f.left) and is_pnf(f.right)
    raise TypeError(f"not a formula node: {f!r}")
