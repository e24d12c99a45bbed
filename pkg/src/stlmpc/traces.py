"""Finite output-signal traces and their CSV form.

A trace stores one column per time step, ``values[i, t] = y_{i+1}[t]``
for ``t = 0..T``.  The monitor CSV format has a header ``t,y1,...,yp``
and one row per step.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

__all__ = ["SignalTrace"]


@dataclass(frozen=True)
class SignalTrace:
    values: np.ndarray  # (p, T+1)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("trace values must be a p x (T+1) matrix")
        if v.shape[1] == 0:
            raise ValueError("trace must contain at least one sample")
        if not np.isfinite(v).all():
            raise ValueError("trace values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        """Index of the last sample."""
        return self.values.shape[1] - 1

    @classmethod
    def from_csv(cls, source) -> "SignalTrace":
        """Read ``t,y1,...,yp`` rows; ``source`` is a path or file object."""
        if hasattr(source, "read"):
            return cls._from_file(source)
        with open(source, newline="") as fh:
            return cls._from_file(fh)

    @classmethod
    def _from_file(cls, fh) -> "SignalTrace":
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "t":
            raise ValueError("trace CSV must start with header t,y1,...,yp")
        p = len(header) - 1
        if p < 1:
            raise ValueError("trace CSV needs at least one output column")
        rows = []
        for lineno, row in enumerate(reader):
            if not row:
                continue
            if len(row) != p + 1:
                raise ValueError(
                    f"row {lineno + 2}: expected {p + 1} columns, found {len(row)}"
                )
            rows.append([float(v) for v in row[1:]])
        if not rows:
            raise ValueError("trace CSV contains no samples")
        return cls(np.asarray(rows).T)

    def to_csv(self, target) -> None:
        if hasattr(target, "write"):
            self._to_file(target)
        else:
            with open(target, "w", newline="") as fh:
                self._to_file(fh)

    def _to_file(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"y{i + 1}" for i in range(self.p)])
        for t in range(self.T + 1):
            writer.writerow([t] + [repr(float(v)) for v in self.values[:, t]])

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self._to_file(buf)
        return buf.getvalue()
