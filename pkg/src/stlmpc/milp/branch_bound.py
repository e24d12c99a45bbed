"""Deterministic branch and bound over the embedded simplex.

Node selection is best bound with FIFO tie-breaks; branching picks the
most fractional binary (lowest id on ties) and enqueues the rounded
down child first.  Children are queued under their parent's bound and
evaluated lazily when popped, which skips the LP work for nodes that an
incumbent prunes first.  A fix-and-resolve diving heuristic supplies
early incumbents; it changes neither exploration order nor branching.
Identical models and configs reproduce identical results bit for bit
unless a wall-clock limit is set.
"""

from __future__ import annotations

import heapq
import time

import numpy as np

from ..errors import SolveError
from . import kernel
from .model import MilpModel, SolveResult, SolveStatus, SolverConfig
from .simplex import StandardForm

__all__ = ["solve"]

_DIVE_INTERVAL = 100


def solve(model: MilpModel, cfg: SolverConfig | None = None) -> SolveResult:
    cfg = cfg or SolverConfig()
    sf = StandardForm(model)
    lb0, ub0 = model.bounds_arrays()
    bin_ids = np.array(model.binary_ids, dtype=np.int64)
    c_int = model.objective_array()  # internal minimization sense
    deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit

    total_iters = 0
    node_count = 0
    best_x = None
    best_obj = np.inf  # internal sense

    def lp(lb, ub):
        nonlocal total_iters, node_count
        node_count += 1
        status, x, iters = sf.solve(lb, ub, cfg.feasibility_tol)
        total_iters += iters
        if status == kernel.ITERATION_LIMIT:
            raise SolveError(f"simplex iteration limit in node {node_count}")
        return status, x

    def gap_abs():
        return cfg.mip_gap * max(1.0, abs(best_obj)) if np.isfinite(best_obj) else 0.0

    def dive(lb, ub, x):
        """Round the most fractional binary, re-solve, repeat."""
        nonlocal best_obj, best_x
        lb, ub = lb.copy(), ub.copy()
        for _ in range(bin_ids.size):
            j = _most_fractional(x, bin_ids, cfg.integrality_tol)
            if j < 0:
                obj = float(c_int @ x)
                if obj < best_obj:
                    best_obj = obj
                    best_x = x
                return
            target = 1.0 if x[j] >= 0.5 else 0.0
            lb[j] = ub[j] = target
            st, x = lp(lb, ub)
            if st != kernel.OPTIMAL:
                return

    status, x = lp(lb0, ub0)
    if status == kernel.UNBOUNDED:
        return SolveResult(SolveStatus.UNBOUNDED, None, None, node_count, total_iters)
    if status == kernel.INFEASIBLE:
        return SolveResult(SolveStatus.INFEASIBLE, None, None, node_count, total_iters)

    counter = 0
    root_bound = float(c_int @ x)
    # heap entries: (bound of the parent relaxation, tie counter, lb, ub,
    # solved relaxation x or None when evaluation is deferred to the pop)
    heap: list = [(root_bound, counter, lb0, ub0, x)]
    next_dive = 0

    limit_hit: SolveStatus | None = None
    while heap:
        if cfg.node_limit is not None and node_count >= cfg.node_limit:
            limit_hit = SolveStatus.NODE_LIMIT
            break
        if deadline is not None and time.monotonic() > deadline:
            limit_hit = SolveStatus.TIME_LIMIT
            break
        bound, _, lb, ub, x = heapq.heappop(heap)
        if bound >= best_obj - gap_abs():
            continue
        if x is None:
            st, x = lp(lb, ub)
            if st != kernel.OPTIMAL:
                continue  # infeasible leaf (unbounded is impossible under a bounded root)
            bound = float(c_int @ x)
            if bound >= best_obj - gap_abs():
                continue

        if node_count >= next_dive:
            dive(lb, ub, x)
            next_dive = node_count + _DIVE_INTERVAL
            if bound >= best_obj - gap_abs():
                continue

        branch = _most_fractional(x, bin_ids, cfg.integrality_tol)
        if branch < 0:
            # integral: incumbent (the pop test already ensured improvement)
            best_obj = bound
            best_x = x
            continue

        down_ub = ub.copy()
        down_ub[branch] = 0.0
        counter += 1
        heapq.heappush(heap, (bound, counter, lb, down_ub, None))
        up_lb = lb.copy()
        up_lb[branch] = 1.0
        counter += 1
        heapq.heappush(heap, (bound, counter, up_lb, ub, None))

    if best_x is None:
        if limit_hit is not None:
            return SolveResult(limit_hit, None, None, node_count, total_iters)
        return SolveResult(SolveStatus.INFEASIBLE, None, None, node_count, total_iters)

    worst = model.max_violation(best_x)
    scale = max(1.0, max((abs(c.rhs) for c in model.constraints), default=1.0))
    if worst > cfg.feasibility_tol * scale:
        raise SolveError(
            f"solution violates constraints by {worst:.3e} (tolerance {cfg.feasibility_tol:.1e})"
        )
    objective = sf.objective_value(best_x)
    status_out = limit_hit if limit_hit is not None else SolveStatus.OPTIMAL
    return SolveResult(status_out, best_x, objective, node_count, total_iters)


def _most_fractional(x: np.ndarray, bin_ids: np.ndarray, tol: float) -> int:
    """Most fractional binary id, or -1 when integral within tolerance."""
    if bin_ids.size == 0:
        return -1
    vals = x[bin_ids]
    dist = np.minimum(np.abs(vals), np.abs(1.0 - vals))
    best = int(np.argmax(dist))
    if dist[best] <= tol:
        return -1
    # argmax returns the first maximum, so ties already resolve to the lowest id
    return int(bin_ids[best])
