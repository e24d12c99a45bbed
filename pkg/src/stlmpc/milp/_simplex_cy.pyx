# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled dense two-phase simplex kernel.

Same algorithm, tolerances and tie-breaking as ``_simplex_py``; the
inner pivot loop runs as straight C over the tableau.
"""

import numpy as np

cimport cython
from libc.math cimport INFINITY, fabs

cdef enum:
    _OPTIMAL = 0
    _INFEASIBLE = 1
    _UNBOUNDED = 2
    _ITERATION_LIMIT = 3

OPTIMAL = _OPTIMAL
INFEASIBLE = _INFEASIBLE
UNBOUNDED = _UNBOUNDED
ITERATION_LIMIT = _ITERATION_LIMIT

cdef double TOL_COST = 1e-9
cdef double TOL_PIVOT = 1e-9
cdef int STALL_LIMIT = 100


cdef int _iterate(double[:, ::1] T, double[::1] rhs, double[::1] d,
                  long[::1] basis, long[::1] vstat, double[::1] ubx,
                  long[::1] support, double* obj_io, long maxiter,
                  long* iters_io) nogil:
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t ncols = T.shape[1]
    cdef Py_ssize_t i, j, jj, r, col, s, nsup
    cdef double obj = obj_io[0]
    cdef double last_obj = obj
    cdef int bland = 0
    cdef int stall = 0
    cdef long it = 0
    cdef double score, best_score, direction, gi, lim, best, t_self, t
    cdef double x_new, piv, factor, dj, ubb
    cdef long leaving

    while True:
        if it >= maxiter:
            obj_io[0] = obj
            iters_io[0] = it
            return _ITERATION_LIMIT
        it += 1

        # pricing
        j = -1
        best_score = TOL_COST
        for jj in range(ncols):
            if vstat[jj] > 1 or ubx[jj] <= 0.0:
                continue
            if vstat[jj] == 0:
                score = -d[jj]
            else:
                score = d[jj]
            if score > best_score:
                j = jj
                if bland:
                    break
                best_score = score
        if j < 0:
            obj_io[0] = obj
            iters_io[0] = it - 1
            return _OPTIMAL

        direction = 1.0 if vstat[j] == 0 else -1.0

        # ratio test
        best = INFINITY
        r = -1
        for i in range(m):
            gi = direction * T[i, j]
            if gi > TOL_PIVOT:
                lim = rhs[i] / gi
                if lim < 0.0:
                    lim = 0.0
            elif gi < -TOL_PIVOT:
                ubb = ubx[basis[i]]
                if ubb == INFINITY:
                    continue
                lim = (ubb - rhs[i]) / (-gi)
                if lim < 0.0:
                    lim = 0.0
            else:
                continue
            if lim < best:
                best = lim
                r = i
            elif bland and r >= 0 and lim == best and basis[i] < basis[r]:
                r = i

        t_self = ubx[j]
        if t_self <= best:
            if t_self == INFINITY:
                obj_io[0] = obj
                iters_io[0] = it
                return _UNBOUNDED
            # bound flip
            for i in range(m):
                rhs[i] -= t_self * direction * T[i, j]
            obj += d[j] * direction * t_self
            vstat[j] = 1 - vstat[j]
        else:
            if best == INFINITY:
                obj_io[0] = obj
                iters_io[0] = it
                return _UNBOUNDED
            t = best
            obj += d[j] * direction * t
            if vstat[j] == 0:
                x_new = direction * t
            else:
                x_new = ubx[j] + direction * t
            for i in range(m):
                rhs[i] -= t * direction * T[i, j]
            leaving = basis[r]
            if direction * T[r, j] > 0.0:
                vstat[leaving] = 0
            else:
                vstat[leaving] = 1

            piv = T[r, j]
            # normalize the pivot row, collecting its nonzero columns so
            # the elimination sweeps only touch the row's support
            nsup = 0
            for col in range(ncols):
                if T[r, col] != 0.0:
                    T[r, col] /= piv
                    support[nsup] = col
                    nsup += 1
            for i in range(m):
                if i == r:
                    continue
                factor = T[i, j]
                if factor != 0.0:
                    for s in range(nsup):
                        col = support[s]
                        T[i, col] -= factor * T[r, col]
            dj = d[j]
            if dj != 0.0:
                for s in range(nsup):
                    col = support[s]
                    d[col] -= dj * T[r, col]
            for i in range(m):
                T[i, j] = 0.0
            T[r, j] = 1.0
            d[j] = 0.0
            rhs[r] = x_new
            basis[r] = j
            vstat[j] = r + 2

        if obj < last_obj - 1e-12 * (1.0 + fabs(last_obj)):
            last_obj = obj
            stall = 0
            bland = 0
        else:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = 1


def solve_standard_form(A, b, c, ub, slack_col, maxiter, feas_threshold):
    """Run both phases; returns (status, x, iterations)."""
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    ub_arr = np.asarray(ub, dtype=np.float64)
    slack = np.asarray(slack_col, dtype=np.int64)
    cdef Py_ssize_t m = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]

    flip = b < 0.0
    need_art = flip | (slack < 0)
    art_rows = np.flatnonzero(need_art)
    cdef Py_ssize_t k = art_rows.size

    T_np = np.empty((m, n + k), dtype=np.float64)
    T_np[:, :n] = A
    T_np[flip, :n] = -A[flip]
    rhs_np = np.abs(b).astype(np.float64)
    T_np[:, n:] = 0.0
    for idx, row in enumerate(art_rows):
        T_np[row, n + idx] = 1.0

    ubx_np = np.concatenate([ub_arr, np.full(k, np.inf)])
    basis_np = np.empty(m, dtype=np.int64)
    vstat_np = np.zeros(n + k, dtype=np.int64)
    art_idx = 0
    for i in range(m):
        if need_art[i]:
            basis_np[i] = n + art_idx
            art_idx += 1
        else:
            basis_np[i] = slack[i]
        vstat_np[basis_np[i]] = i + 2

    cdef double[:, ::1] T = T_np
    cdef double[::1] rhs = rhs_np
    cdef long[::1] basis = basis_np
    cdef long[::1] vstat = vstat_np
    cdef double[::1] ubx = ubx_np
    cdef double obj = 0.0
    cdef long iters = 0
    cdef long used = 0
    cdef int status

    if k > 0:
        d_np = np.zeros(n + k)
        d_np -= T_np[art_rows].sum(axis=0)
        d_np[basis_np] = 0.0
        obj = float(rhs_np[art_rows].sum())
        status = _run(T, rhs, d_np, basis, vstat, ubx, &obj, maxiter, &used)
        iters += used
        if status == ITERATION_LIMIT:
            return status, np.zeros(n), iters
        if obj > feas_threshold:
            return INFEASIBLE, np.zeros(n), iters
        ubx_np[n:] = 0.0

    cx = np.concatenate([c, np.zeros(k)])
    d2_np = cx - cx[basis_np] @ T_np
    d2_np[basis_np] = 0.0
    at_ub = vstat_np == 1
    obj = float(cx[basis_np] @ rhs_np + cx[at_ub] @ ubx_np[at_ub])
    status = _run(T, rhs, d2_np, basis, vstat, ubx, &obj, maxiter - iters, &used)
    iters += used

    x = np.zeros(n + k)
    x[vstat_np == 1] = ubx_np[vstat_np == 1]
    x[basis_np] = rhs_np
    return status, x[:n], iters


cdef int _run(double[:, ::1] T, double[::1] rhs, object d_obj,
              long[::1] basis, long[::1] vstat, double[::1] ubx,
              double* obj, long maxiter, long* iters):
    cdef double[::1] d = np.ascontiguousarray(d_obj, dtype=np.float64)
    cdef long[::1] support = np.empty(T.shape[1], dtype=np.int64)
    cdef int status
    with nogil:
        status = _iterate(T, rhs, d, basis, vstat, ubx, support, obj, maxiter, iters)
    return status
