"""Pure numpy fallback for the dense two-phase simplex kernel.

Solves  min c'x  s.t.  A x = b,  0 <= x <= ub  on a dense tableau with
bounded variables (nonbasic columns may rest at either bound).  Phase 1
drives artificial columns out of rows whose slack cannot seed the basis;
phase 2 optimizes the true costs with artificials pinned at zero.

Pricing is Dantzig (most violating reduced cost, lowest index on ties);
after a stretch of non-improving pivots the rule switches to Bland's
until the objective moves again, which prevents cycling while staying
deterministic.

The compiled kernel in ``_simplex_cy`` implements the same algorithm
with the same tie-breaking; see ``kernel.py`` for backend selection.
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

_STALL_LIMIT = 100
_TOL_COST = 1e-9
_TOL_PIVOT = 1e-9


def solve_standard_form(A, b, c, ub, slack_col, maxiter, feas_threshold):
    """Run both phases; returns (status, x, iterations).

    ``slack_col[i]`` names the +1 slack column of row i (-1 for an
    equality row); rows with negative b or no usable slack receive an
    artificial column.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    ub = np.asarray(ub, dtype=float)
    slack_col = np.asarray(slack_col, dtype=np.int64)
    m, n = A.shape

    flip = b < 0.0
    need_art = flip | (slack_col < 0)
    art_rows = np.flatnonzero(need_art)
    k = art_rows.size

    T = np.empty((m, n + k))
    T[:, :n] = A
    T[flip, :n] = -A[flip]
    rhs = np.abs(b).astype(float)
    T[:, n:] = 0.0
    for idx, r in enumerate(art_rows):
        T[r, n + idx] = 1.0

    ubx = np.concatenate([ub, np.full(k, np.inf)])
    basis = np.empty(m, dtype=np.int64)
    vstat = np.zeros(n + k, dtype=np.int64)  # 0 lower, 1 upper, r+2 basic in row r
    art_idx = 0
    for i in range(m):
        if need_art[i]:
            basis[i] = n + art_idx
            art_idx += 1
        else:
            basis[i] = slack_col[i]
        vstat[basis[i]] = i + 2

    iters = 0
    if k > 0:
        d = np.zeros(n + k)
        d[: n + k] -= T[art_rows].sum(axis=0)
        d[basis] = 0.0
        obj = float(rhs[art_rows].sum())
        status, used, obj = _iterate(T, rhs, d, basis, vstat, ubx, obj, maxiter)
        iters += used
        if status == ITERATION_LIMIT:
            return status, np.zeros(n), iters
        if obj > feas_threshold:
            return INFEASIBLE, np.zeros(n), iters
        ubx[n:] = 0.0

    cx = np.concatenate([c, np.zeros(k)])
    d = cx - cx[basis] @ T
    d[basis] = 0.0
    obj = float(cx[basis] @ rhs + cx[vstat == 1] @ ubx[vstat == 1])
    status, used, obj = _iterate(T, rhs, d, basis, vstat, ubx, obj, maxiter - iters)
    iters += used

    x = np.zeros(n + k)
    x[vstat == 1] = ubx[vstat == 1]
    x[basis] = rhs
    return status, x[:n], iters


def _iterate(T, rhs, d, basis, vstat, ubx, obj, maxiter):
    m = T.shape[0]
    nonbasic_movable = lambda: (vstat <= 1) & (ubx > 0.0)
    bland = False
    stall = 0
    last_obj = obj
    it = 0
    while True:
        if it >= maxiter:
            return ITERATION_LIMIT, it, obj
        it += 1

        movable = nonbasic_movable()
        score = np.where(movable & (vstat == 0), -d, np.where(movable & (vstat == 1), d, -np.inf))
        if bland:
            eligible = score > _TOL_COST
            if not eligible.any():
                return OPTIMAL, it - 1, obj
            j = int(np.argmax(eligible))
        else:
            j = int(np.argmax(score))
            if score[j] <= _TOL_COST:
                return OPTIMAL, it - 1, obj

        direction = 1.0 if vstat[j] == 0 else -1.0
        g = direction * T[:, j]

        lim = np.full(m, np.inf)
        ub_b = ubx[basis]
        pos = g > _TOL_PIVOT
        lim[pos] = np.maximum(rhs[pos], 0.0) / g[pos]
        neg = (g < -_TOL_PIVOT) & np.isfinite(ub_b)
        lim[neg] = np.maximum(ub_b[neg] - rhs[neg], 0.0) / (-g[neg])

        r = int(np.argmin(lim))
        best = lim[r]
        if bland and np.isfinite(best):
            ties = np.flatnonzero(lim == best)
            r = int(ties[np.argmin(basis[ties])])

        t_self = ubx[j]
        if t_self <= best:
            if not np.isfinite(t_self):
                return UNBOUNDED, it, obj
            # bound flip: the entering column swaps ends without a basis change
            rhs -= t_self * g
            obj += float(d[j]) * direction * t_self
            vstat[j] = 1 - vstat[j]
        else:
            if not np.isfinite(best):
                return UNBOUNDED, it, obj
            t = best
            obj += float(d[j]) * direction * t
            x_new = (0.0 if vstat[j] == 0 else ubx[j]) + direction * t
            rhs -= t * g
            leaving = basis[r]
            vstat[leaving] = 0 if g[r] > 0.0 else 1

            piv = T[r, j]
            T[r] /= piv
            col = T[:, j].copy()
            col[r] = 0.0
            T -= np.outer(col, T[r])
            dj = float(d[j])
            d -= dj * T[r]
            T[:, j] = 0.0
            T[r, j] = 1.0
            d[j] = 0.0
            rhs[r] = x_new
            basis[r] = j
            vstat[j] = r + 2

        if obj < last_obj - 1e-12 * (1.0 + abs(last_obj)):
            last_obj = obj
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= _STALL_LIMIT:
                bland = True
