"""Quantitative semantics: the signed satisfaction margin of a formula.

The value at time t is built from min/max over trace samples only, so
results are exact for exact inputs.  Nonnegative robustness counts as
satisfaction, including exactly zero.

Until is evaluated with the left operand holding throughout [t, t'] and
the right operand holding at t', both ends inclusive:

    rho(l U[a,b] r, t) = max_{t' in [t+a, t+b]} min(rho(r, t'),
                                                    min_{t'' in [t, t']} rho(l, t''))

Release carries no semantics of its own and must be eliminated first.
"""

from __future__ import annotations

import numpy as np

from .errors import TraceTooShortError
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
    horizon,
    predicate_indices,
)
from .traces import SignalTrace

__all__ = ["robustness", "robustness_series", "satisfied"]


def _as_array(trace) -> np.ndarray:
    if isinstance(trace, SignalTrace):
        return trace.values
    Y = np.asarray(trace, dtype=float)
    if Y.ndim != 2:
        raise ValueError("trace must be a p x (T+1) matrix")
    return Y


def robustness(f: Formula, trace, t: int = 0) -> float:
    """Robustness of a release-free formula at time t.

    Requires every sample through ``t + horizon(f)`` to exist.
    """
    Y = _as_array(trace)
    T = Y.shape[1] - 1
    if t < 0:
        raise ValueError(f"time index must be nonnegative, got {t}")
    h = horizon(f)
    if t + h > T:
        raise TraceTooShortError(
            f"robustness at t={t} needs samples through t+{h}={t + h}, trace ends at {T}"
        )
    idx = predicate_indices(f)
    if idx and max(idx) > Y.shape[0]:
        raise ValueError(
            f"formula references p{max(idx)} but the trace has {Y.shape[0]} outputs"
        )
    memo: dict[tuple[Formula, int], float] = {}
    return _eval(f, Y, t, memo)


def _eval(f: Formula, Y: np.ndarray, t: int, memo) -> float:
    key = (f, t)
    val = memo.get(key)
    if val is not None:
        return val
    if isinstance(f, Pred):
        val = float(Y[f.index - 1, t])
    elif isinstance(f, Not):
        val = -_eval(f.child, Y, t, memo)
    elif isinstance(f, And):
        val = min(_eval(c, Y, t, memo) for c in f.children)
    elif isinstance(f, Or):
        val = max(_eval(c, Y, t, memo) for c in f.children)
    elif isinstance(f, Eventually):
        val = max(_eval(f.child, Y, tp, memo) for tp in range(t + f.a, t + f.b + 1))
    elif isinstance(f, Always):
        val = min(_eval(f.child, Y, tp, memo) for tp in range(t + f.a, t + f.b + 1))
    elif isinstance(f, Until):
        best = -np.inf
        prefix = np.inf
        # grow the left-operand prefix minimum incrementally over t'' in [t, t']
        for tp in range(t, t + f.b + 1):
            prefix = min(prefix, _eval(f.left, Y, tp, memo))
            if tp >= t + f.a:
                best = max(best, min(_eval(f.right, Y, tp, memo), prefix))
        val = best
    elif isinstance(f, Release):
        raise ValueError("release must be eliminated before evaluation")
    else:
        raise TypeError(f"not a formula node: {f!r}")
    memo[key] = val
    return val


def robustness_series(f: Formula, trace) -> np.ndarray:
    """Robustness at every computable time, t = 0..T-horizon."""
    f = eliminate_release(f)
    Y = _as_array(trace)
    T = Y.shape[1] - 1
    h = horizon(f)
    if T < h:
        raise TraceTooShortError(
            f"formula horizon {h} exceeds the last computable index of a length-{T + 1} trace"
        )
    memo: dict[tuple[Formula, int], float] = {}
    return np.array([_eval(f, Y, t, memo) for t in range(T - h + 1)])


def satisfied(f: Formula, trace, t: int = 0) -> bool:
    """Nonnegative robustness, zero included."""
    return robustness(eliminate_release(f), trace, t) >= 0.0
