"""Affine output rows backing the predicates.

Each predicate ``p_i`` reads ``y_i = c_i x + d_i u + e_i >= 0``; the map
collects the rows C (p x n), D (p x m) and offsets e.  ``origin`` tracks
provenance: entry j is the 1-based source row of row j, negated when the
row is the sign-flipped image of the original (rows added or flipped by
the positive-normal-form transform).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["OutputMap"]


@dataclass(frozen=True)
class OutputMap:
    C: np.ndarray
    D: np.ndarray
    e: np.ndarray
    origin: tuple[int, ...] = field(default=())

    def __post_init__(self):
        C = np.asarray(self.C, dtype=float)
        D = np.asarray(self.D, dtype=float)
        e = np.asarray(self.e, dtype=float).reshape(-1)
        if C.ndim != 2 or D.ndim != 2:
            raise ValueError("C and D must be matrices")
        if C.shape[0] != D.shape[0] or C.shape[0] != e.shape[0]:
            raise ValueError(
                f"row count mismatch: C has {C.shape[0]}, D has {D.shape[0]}, e has {e.shape[0]}"
            )
        if not (np.isfinite(C).all() and np.isfinite(D).all() and np.isfinite(e).all()):
            raise ValueError("output map entries must be finite")
        origin = self.origin or tuple(range(1, C.shape[0] + 1))
        if len(origin) != C.shape[0]:
            raise ValueError("origin length must match row count")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "origin", origin)

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def n(self) -> int:
        return self.C.shape[1]

    @property
    def m(self) -> int:
        return self.D.shape[1]

    def with_rows(self, C, D, e, origin) -> "OutputMap":
        return OutputMap(np.asarray(C, float), np.asarray(D, float), np.asarray(e, float), tuple(origin))

    def append_row(self, c_row, d_row, e_val, origin: int) -> "OutputMap":
        C = np.vstack([self.C, np.asarray(c_row, float).reshape(1, -1)])
        D = np.vstack([self.D, np.asarray(d_row, float).reshape(1, -1)])
        e = np.append(self.e, float(e_val))
        return OutputMap(C, D, e, self.origin + (origin,))

    def extend_trace(self, trace: np.ndarray) -> np.ndarray:
        """Map a trace in original output coordinates into this map's rows.

        Row j of the result is ``trace[|origin_j| - 1]`` with the sign of
        ``origin_j``, so robustness of a transformed formula can be checked
        against the original signal.
        """
        Y = np.asarray(trace, dtype=float)
        rows = []
        for o in self.origin:
            src = Y[abs(o) - 1]
            rows.append(-src if o < 0 else src)
        return np.vstack(rows)

    def evaluate(self, x, u) -> np.ndarray:
        """All outputs ``C x + D u + e`` at one time step."""
        return self.C @ np.asarray(x, float) + self.D @ np.asarray(u, float) + self.e
