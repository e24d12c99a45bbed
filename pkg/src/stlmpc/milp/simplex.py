"""LP solving on top of the kernel: standard-form conversion.

``StandardForm`` compiles a model once (column substitutions, slack
layout) and then solves repeatedly under different variable bounds,
which is what branch and bound needs: only the right-hand side and the
column upper bounds change between nodes.

Substitutions: a variable with a finite lower bound is shifted to start
at zero; one bounded only above is mirrored; a fully free variable is
split into a positive and a negative column.
"""

from __future__ import annotations

import numpy as np

from ..errors import SolveError
from . import kernel
from .model import MilpModel

__all__ = ["StandardForm", "solve_lp_arrays", "lp_feasible"]

_SHIFT = 0
_NEGUB = 1
_FREE = 2


class StandardForm:
    def __init__(self, model: MilpModel):
        nv = model.num_vars
        lb0, ub0 = model.bounds_arrays()
        self.model = model
        self.nv = nv

        mode = np.empty(nv, dtype=np.int64)
        cols: list[tuple[int, float]] = []  # (var, sign) per structural column
        self.var_col = np.full(nv, -1, dtype=np.int64)
        self.var_col2 = np.full(nv, -1, dtype=np.int64)
        for v in range(nv):
            if np.isfinite(lb0[v]):
                mode[v] = _SHIFT
                self.var_col[v] = len(cols)
                cols.append((v, 1.0))
            elif np.isfinite(ub0[v]):
                mode[v] = _NEGUB
                self.var_col[v] = len(cols)
                cols.append((v, -1.0))
            else:
                mode[v] = _FREE
                self.var_col[v] = len(cols)
                cols.append((v, 1.0))
                self.var_col2[v] = len(cols)
                cols.append((v, -1.0))
        self.mode = mode
        self.ncols = len(cols)
        self.col_var = np.array([v for v, _ in cols], dtype=np.int64)
        self.col_sign = np.array([s for _, s in cols], dtype=float)

        m = len(model.constraints)
        Amod = np.zeros((m, nv))
        rhs = np.zeros(m)
        senses = []
        for i, con in enumerate(model.constraints):
            sgn = -1.0 if con.sense == ">=" else 1.0
            for v, coef in con.coeffs.items():
                Amod[i, v] = sgn * coef
            rhs[i] = sgn * con.rhs
            senses.append("=" if con.sense == "=" else "<=")
        self.Amod = Amod
        self.rhs0 = rhs

        n_slack = sum(1 for s in senses if s == "<=")
        A = np.zeros((m, self.ncols + n_slack))
        A[:, : self.ncols] = Amod[:, self.col_var] * self.col_sign
        self.slack_col = np.full(m, -1, dtype=np.int64)
        s = 0
        for i, sense in enumerate(senses):
            if sense == "<=":
                self.slack_col[i] = self.ncols + s
                A[i, self.ncols + s] = 1.0
                s += 1
        self.A = np.ascontiguousarray(A)
        self.n_slack = n_slack

        c_model = model.objective_array()
        self.c_model = c_model
        c = np.zeros(self.ncols + n_slack)
        c[: self.ncols] = c_model[self.col_var] * self.col_sign
        self.c = c

        self.maxiter_default = 50 * (m + self.ncols + n_slack) + 1000

    def solve(self, lb: np.ndarray, ub: np.ndarray, feas_tol: float = 1e-7, maxiter=None):
        """Solve under the given bounds; returns (code, x_model, iterations).

        ``code`` uses the kernel status constants.  ``x_model`` is in the
        original variable space (unshifted), valid when code is OPTIMAL.
        """
        shift = np.where(self.mode == _SHIFT, lb, np.where(self.mode == _NEGUB, ub, 0.0))
        span = np.where(self.mode == _FREE, np.inf, ub - lb)
        ub_cols = np.empty(self.ncols + self.n_slack)
        ub_cols[: self.ncols] = span[self.col_var]
        ub_cols[self.ncols :] = np.inf
        b = self.rhs0 - self.Amod @ shift
        scale = max(1.0, float(np.abs(b).max())) if b.size else 1.0
        status, x_std, iters = kernel.solve_standard_form(
            self.A,
            b,
            self.c,
            ub_cols,
            self.slack_col,
            int(maxiter or self.maxiter_default),
            feas_tol * scale,
        )
        if status != kernel.OPTIMAL:
            return status, None, iters
        x = shift.copy()
        np.add.at(x, self.col_var, self.col_sign * x_std[: self.ncols])
        return status, x, iters

    def objective_value(self, x: np.ndarray) -> float:
        """User-sense objective at x (max objectives reported as given)."""
        val = float(sum(coef * x[v] for v, coef in self.model.objective.items()))
        return val


def solve_lp_arrays(A_eq, b_eq, c, ub, maxiter=None, feas_tol=1e-7):
    """Direct standard-form solve: min c'x, A x = b, 0 <= x <= ub."""
    A_eq = np.atleast_2d(np.asarray(A_eq, float))
    m = A_eq.shape[0]
    slack = np.full(m, -1, dtype=np.int64)
    scale = max(1.0, float(np.abs(b_eq).max())) if m else 1.0
    return kernel.solve_standard_form(
        A_eq,
        np.asarray(b_eq, float),
        np.asarray(c, float),
        np.asarray(ub, float),
        slack,
        int(maxiter or (50 * (m + A_eq.shape[1]) + 1000)),
        feas_tol * scale,
    )


def lp_feasible(A_eq, b_eq, ub) -> bool:
    """Feasibility of A x = b, 0 <= x <= ub (phase 1 only)."""
    A_eq = np.atleast_2d(np.asarray(A_eq, float))
    status, _, _ = solve_lp_arrays(A_eq, b_eq, np.zeros(A_eq.shape[1]), ub)
    if status == kernel.ITERATION_LIMIT:
        raise SolveError("feasibility LP hit the iteration limit")
    return status == kernel.OPTIMAL
