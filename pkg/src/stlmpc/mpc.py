"""Receding-horizon controller with robust windows and minimal softening.

Each step solves one MILP over the control sequence u[t..t+H] and a
slack zeta >= 0: window robustness constraints are encoded on the
composed signal (stored history before t, corner-bound prediction from
t on), every window output is shifted by +zeta, and the objective adds
M * zeta to the accumulated nominal stage cost.  Large M makes zeta the
smallest softening that restores feasibility, and zero whenever the
hard constraints are feasible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import SolveError
from .formula import Formula, horizon
from .linsys import (
    ControlSet,
    DisturbanceModel,
    SystemModel,
    build_flow_matrices,
    output,
    step,
    uncertainty_offset,
)
from .milp.branch_bound import solve as milp_solve
from .milp.encoder import encode_stl
from .milp.model import LinExpr, MilpModel, SolveStatus, SolverConfig
from .pnf import is_pnf, to_pnf
from .robustness import robustness, robustness_series

__all__ = [
    "ControllerConfig",
    "HistoryBuffer",
    "StepResult",
    "ClosedLoopTrace",
    "Planner",
    "plan_step",
    "compute_zeta_min",
    "run_closed_loop",
    "monitor_trace",
]


@dataclass(frozen=True)
class ControllerConfig:
    """Controller hyper-parameters.

    ``zeta_upper`` only sizes the indicator constant; the slack variable
    itself stays unbounded above.  ``nominal`` plans as if there were no
    disturbance (zero prediction offset).  ``maximize_robustness`` drops
    the zeta >= 0 bound, turning leftover margin into tightening.
    """

    h_p: int = 2
    M: float = 1e5
    control_weights: tuple[float, ...] | None = None
    state_weights: tuple[float, ...] | None = None
    state_reference: tuple[float, ...] | None = None
    zeta_upper: float | None = None
    state_box: tuple[tuple[float, ...], tuple[float, ...]] | None = None
    d_zero_reduction: bool = False
    nominal: bool = False
    maximize_robustness: bool = False

    def __post_init__(self):
        if self.h_p < 0:
            raise ValueError("prediction horizon must be nonnegative")
        if self.M <= 0:
            raise ValueError("violation penalty must be positive")


class HistoryBuffer:
    """Ring buffer of the most recent outputs y[.], time-contiguous.

    Capacity ``depth`` keeps the last ``depth`` samples; the controller
    uses depth = horizon + 1 so the oldest entry also allows reporting
    the one robustness value behind the constraint window.
    """

    def __init__(self, depth: int):
        if depth < 0:
            raise ValueError("history depth must be nonnegative")
        self.depth = depth
        self._entries: list[np.ndarray] = []
        self.t_next = 0

    def push(self, y) -> None:
        y = np.asarray(y, dtype=float).reshape(-1)
        self._entries.append(y)
        if len(self._entries) > self.depth:
            self._entries.pop(0)
        self.t_next += 1

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def t_first(self) -> int:
        return self.t_next - len(self._entries)

    def get(self, t: int) -> np.ndarray:
        if not self.t_first <= t < self.t_next:
            raise KeyError(
                f"history holds [{self.t_first}, {self.t_next - 1}], requested {t}"
            )
        return self._entries[t - self.t_first]

    def window(self, a: int, b: int) -> dict[int, np.ndarray]:
        """Samples for every time in [a, b] inclusive."""
        return {t: self.get(t) for t in range(a, b + 1)}


@dataclass(frozen=True)
class StepResult:
    """One MPC step: the plan, its slack, and the predicted window."""

    t: int
    u_applied: np.ndarray
    plan: np.ndarray  # (H+1, m), or (H, m) under the D=0 reduction
    zeta: float
    objective: float
    status: SolveStatus
    window: tuple[int, ...]
    window_rho: np.ndarray
    ypre: np.ndarray  # composed window signal, columns from window_start
    window_start: int
    solve_time: float
    node_count: int


@dataclass
class ClosedLoopTrace:
    """Realized closed-loop run plus the post-hoc robustness series."""

    x: np.ndarray  # (N+1, n)
    u: np.ndarray  # (N, m)
    w: np.ndarray  # (N, n)
    y: np.ndarray  # (N, p)
    zeta: np.ndarray  # (N,)
    objective: np.ndarray  # (N,)
    solve_time: np.ndarray  # (N,)
    status: list[str]
    rho: np.ndarray  # robustness at t = 0..N-1-horizon
    steps: list[StepResult] = field(default_factory=list, repr=False)

    @property
    def N(self) -> int:
        return self.u.shape[0]

    def stage_cost(self, cfg: ControllerConfig) -> float:
        wu = np.asarray(cfg.control_weights or [1.0] * self.u.shape[1], dtype=float)
        cost = float((np.abs(self.u) * wu).sum())
        if cfg.state_weights is not None:
            wx = np.asarray(cfg.state_weights, dtype=float)
            ref = np.asarray(cfg.state_reference or np.zeros_like(wx), dtype=float)
            cost += float((np.abs(self.x[:-1] - ref) * wx).sum())
        return cost

    def summary(self, cfg: ControllerConfig) -> dict:
        return {
            "steps": self.N,
            "min_rho": float(self.rho.min()) if self.rho.size else float("nan"),
            "max_rho": float(self.rho.max()) if self.rho.size else float("nan"),
            "violations": int((self.rho < 0).sum()),
            "max_zeta": float(self.zeta.max()) if self.zeta.size else 0.0,
            "soft_steps": int((self.zeta > 1e-9).sum()),
            "total_cost": self.stage_cost(cfg),
            "max_solve_time": float(self.solve_time.max()) if self.solve_time.size else 0.0,
        }


class Planner:
    """Per-run planning context: flow matrices and offsets built once."""

    def __init__(
        self,
        model: SystemModel,
        dist: DisturbanceModel,
        cset: ControlSet,
        f: Formula,
        cfg: ControllerConfig,
        solver_cfg: SolverConfig | None = None,
    ):
        if not is_pnf(f):
            raise ValueError("planner requires the formula in positive normal form")
        if cset.m != model.m:
            raise ValueError("control set dimension does not match the model")
        self.model = model
        self.dist = dist
        self.cset = cset
        self.f = f
        self.cfg = cfg
        self.solver_cfg = solver_cfg or SolverConfig()
        self.h_phi = horizon(f)
        self.H = self.h_phi + cfg.h_p
        self.flow = build_flow_matrices(model, self.H)
        if cfg.nominal:
            self.offset = np.zeros((self.H + 1) * model.p)
        else:
            self.offset = uncertainty_offset(model, dist, self.H)
        self.e_tiled = np.tile(model.e, self.H + 1)
        self.d_is_zero = not np.any(model.D)
        self.reduce = cfg.d_zero_reduction and self.d_is_zero
        self.u_absmax = np.maximum(np.abs(cset.u_min), np.abs(cset.u_max))
        # per stacked output row: reachable |Phi1 u| under the control box
        self._phi1_bound = np.abs(self.flow.Phi1) @ np.tile(self.u_absmax, self.H + 1)
        if cfg.state_box is not None:
            lo = np.asarray(cfg.state_box[0], float)
            hi = np.asarray(cfg.state_box[1], float)
            self._phi0_bound = np.abs(self.flow.Phi0) @ np.maximum(np.abs(lo), np.abs(hi))
        else:
            self._phi0_bound = None

    # -- model construction -------------------------------------------

    def window_times(self, t: int) -> tuple[int, ...]:
        start = max(0, t - self.h_phi)
        if self.reduce and t >= self.h_phi:
            start = t - self.h_phi + 1
        return tuple(range(start, t + self.cfg.h_p + 1))

    def build_model(self, x_t, history: dict[int, np.ndarray], t: int):
        """Assemble the step MILP; returns (model, encoding, varmap dict)."""
        model, cfg = self.model, self.cfg
        n, m, p = model.n, model.m, model.p
        x_t = np.asarray(x_t, dtype=float).reshape(n)
        window = self.window_times(t)
        grid_start = max(0, t - self.h_phi)
        n_controls = self.H if self.reduce else self.H + 1

        for tau in range(grid_start, t):
            if tau not in history:
                raise ValueError(f"history sample for time {tau} is missing")

        milp = MilpModel(f"step_{t}")
        u_vars = np.empty((n_controls, m), dtype=np.int64)
        for k in range(n_controls):
            for j in range(m):
                u_vars[k, j] = milp.add_var(
                    f"u{j}_{t + k}", lb=self.cset.u_min[j], ub=self.cset.u_max[j]
                )
        zeta_lb = -np.inf if cfg.maximize_robustness else 0.0
        zeta = milp.add_var("zeta", lb=zeta_lb)

        if self.cset.F is not None:
            for k in range(n_controls):
                for r in range(self.cset.F.shape[0]):
                    expr = LinExpr({int(u_vars[k, j]): self.cset.F[r, j] for j in range(m)})
                    milp.add_constr(expr, "<=", float(self.cset.g[r]), f"uset{r}_{t + k}")

        # window output expressions: history constants before t, corner
        # bound prediction from t on, all shifted by the slack
        const_pred = self.flow.Phi0 @ x_t + self.offset + self.e_tiled
        yexprs: dict[tuple[int, int], LinExpr] = {}
        ybound = 0.0
        for tau in range(grid_start, t + self.H + 1):
            for i in range(p):
                if tau < t:
                    val = float(history[tau][i])
                    expr = LinExpr({zeta: 1.0}, val)
                    ybound = max(ybound, abs(val))
                else:
                    k = tau - t
                    row = k * p + i
                    expr = LinExpr({zeta: 1.0}, float(const_pred[row]))
                    for kk in range(min(k + 1, n_controls)):
                        for j in range(m):
                            coef = self.flow.Phi1[row, kk * m + j]
                            if coef != 0.0:
                                expr.add_term(int(u_vars[kk, j]), coef)
                    if self._phi0_bound is not None:
                        reach = self._phi0_bound[row]
                    else:
                        reach = abs(float(self.flow.Phi0[row] @ x_t))
                    ybound = max(
                        ybound,
                        reach
                        + self._phi1_bound[row]
                        + abs(float(self.offset[row]))
                        + abs(float(model.e[i])),
                    )
                yexprs[(i + 1, tau)] = expr

        K = self.solver_cfg.big_m
        if K is None:
            zeta_ub = cfg.zeta_upper if cfg.zeta_upper is not None else max(ybound, 1.0)
            K = 1.5 * (max(ybound, 1.0) + zeta_ub)
        encoding = encode_stl(milp, self.f, yexprs, window, K)

        # nominal stage cost: |u| terms plus optional state deviations
        wu = np.asarray(cfg.control_weights or [1.0] * m, dtype=float)
        obj = LinExpr({zeta: cfg.M})
        for k in range(n_controls):
            for j in range(m):
                if wu[j] == 0.0:
                    continue
                aux = milp.add_var(f"absu{j}_{t + k}")
                milp.add_constr(LinExpr({aux: 1.0, int(u_vars[k, j]): -1.0}), ">=", 0.0)
                milp.add_constr(LinExpr({aux: 1.0, int(u_vars[k, j]): 1.0}), ">=", 0.0)
                obj.add_term(aux, float(wu[j]))
        if cfg.state_weights is not None:
            obj = self._add_state_cost(milp, obj, x_t, u_vars, t)
        milp.set_objective(obj)
        varmap = {"u": u_vars, "zeta": zeta}
        return milp, encoding, varmap

    def _add_state_cost(self, milp, obj, x_t, u_vars, t):
        model, cfg = self.model, self.cfg
        wx = np.asarray(cfg.state_weights, dtype=float)
        ref = np.asarray(
            cfg.state_reference if cfg.state_reference is not None else np.zeros(model.n),
            dtype=float,
        )
        n_controls = u_vars.shape[0]
        # x_hat[k] = A^k x + sum_{j<k} A^(k-1-j) (B u_j + w_nom), affine in u
        const = x_t.copy()
        coefs: dict[int, np.ndarray] = {}
        for k in range(self.H + 1):
            for i in range(model.n):
                if wx[i] == 0.0:
                    continue
                aux = milp.add_var(f"absx{i}_{t + k}")
                expr = LinExpr({aux: -1.0}, float(const[i] - ref[i]))
                for (kk, j), vec in coefs.items():
                    if vec[i] != 0.0:
                        expr.add_term(int(u_vars[kk, j]), float(vec[i]))
                milp.add_constr(expr, "<=", 0.0)
                milp.add_constr(expr + 2.0 * LinExpr.term(aux), ">=", 0.0)
                obj.add_term(aux, float(wx[i]))
            if k == self.H:
                break
            const = model.A @ const + self.dist.nominal
            coefs = {key: model.A @ vec for key, vec in coefs.items()}
            if k < n_controls:
                for j in range(model.m):
                    coefs[(k, j)] = model.B[:, j].copy()
        return obj

    # -- solving --------------------------------------------------------

    def plan(self, x_t, hist: HistoryBuffer, t: int) -> StepResult:
        grid_start = max(0, t - self.h_phi)
        history = hist.window(grid_start, t - 1) if t > grid_start else {}
        milp, encoding, varmap = self.build_model(x_t, history, t)
        started = time.perf_counter()
        result = milp_solve(milp, self.solver_cfg)
        elapsed = time.perf_counter() - started
        if result.status is not SolveStatus.OPTIMAL:
            if result.status is SolveStatus.INFEASIBLE and not self.cfg.maximize_robustness:
                raise SolveError(
                    "softened step problem reported infeasible; this cannot happen "
                    "for a well-posed model and indicates a numerical failure"
                )
            raise SolveError(f"step solve ended with status {result.status.value}")

        u_vars = varmap["u"]
        plan = np.array(
            [[result[int(u_vars[k, j])] for j in range(u_vars.shape[1])] for k in range(u_vars.shape[0])]
        )
        zeta_val = result[varmap["zeta"]]

        ypre, window_rho, window = self._window_robustness(x_t, history, plan, t)
        return StepResult(
            t=t,
            u_applied=plan[0].copy(),
            plan=plan,
            zeta=float(zeta_val),
            objective=float(result.objective),
            status=result.status,
            window=window,
            window_rho=window_rho,
            ypre=ypre,
            window_start=max(0, t - self.h_phi),
            solve_time=elapsed,
            node_count=result.node_count,
        )

    def _window_robustness(self, x_t, history, plan, t):
        """Compose y^pre (history then corner prediction) and evaluate it."""
        model = self.model
        grid_start = max(0, t - self.h_phi)
        window = self.window_times(t)
        uH = np.zeros((self.H + 1) * model.m)
        uH[: plan.size] = plan.reshape(-1)
        pred = (
            self.flow.Phi0 @ np.asarray(x_t, float).reshape(model.n)
            + self.flow.Phi1 @ uH
            + self.offset
            + self.e_tiled
        )
        cols = [history[tau] for tau in range(grid_start, t)]
        cols.extend(pred[k * model.p : (k + 1) * model.p] for k in range(self.H + 1))
        ypre = np.column_stack(cols) if cols else np.zeros((model.p, 0))
        rho = np.array([robustness(self.f, ypre, tau - grid_start) for tau in window])
        return ypre, rho, window


def plan_step(
    model: SystemModel,
    dist: DisturbanceModel,
    cset: ControlSet,
    f: Formula,
    cfg: ControllerConfig,
    x_t,
    hist: HistoryBuffer,
    t: int,
    solver_cfg: SolverConfig | None = None,
) -> StepResult:
    """One-shot step solve (builds the planning context each call)."""
    return Planner(model, dist, cset, f, cfg, solver_cfg).plan(x_t, hist, t)


def compute_zeta_min(f: Formula, ypre, window_times, window_start: int = 0) -> float:
    """Smallest uniform output shift making every window time satisfied.

    By PNF monotonicity this is max(0, -min robustness over the window)
    evaluated on the unshifted composed signal.
    """
    ypre = np.asarray(ypre, dtype=float)
    values = [robustness(f, ypre, tau - window_start) for tau in window_times]
    if not values:
        return 0.0
    return max(0.0, -min(values))


def run_closed_loop(
    model: SystemModel,
    dist: DisturbanceModel,
    cset: ControlSet,
    f: Formula,
    cfg: ControllerConfig,
    x0,
    N: int,
    seed: int = 0,
    sampler=None,
    solver_cfg: SolverConfig | None = None,
    pnf_done: bool = False,
) -> ClosedLoopTrace:
    """Simulate N receding-horizon steps under sampled disturbances.

    The formula is transformed to positive normal form (extending the
    model outputs) unless ``pnf_done`` says it already is.  Disturbances
    come from ``sampler(rng)`` or the disturbance model's own sampler;
    the realized robustness series is evaluated on the recorded outputs.
    """
    if N < 1:
        raise ValueError("closed-loop run needs at least one step")
    if not pnf_done:
        f, outputs = to_pnf(f, model.output_map)
        model = model.with_outputs(outputs)
    planner = Planner(model, dist, cset, f, cfg, solver_cfg)
    rng = np.random.default_rng(seed)
    draw = sampler if sampler is not None else dist.sample

    n, m, p = model.n, model.m, model.p
    xs = np.zeros((N + 1, n))
    us = np.zeros((N, m))
    ws = np.zeros((N, n))
    ys = np.zeros((N, p))
    zetas = np.zeros(N)
    objs = np.zeros(N)
    times = np.zeros(N)
    statuses: list[str] = []
    steps: list[StepResult] = []

    xs[0] = np.asarray(x0, dtype=float).reshape(n)
    hist = HistoryBuffer(planner.h_phi + 1)
    for t in range(N):
        try:
            res = planner.plan(xs[t], hist, t)
        except SolveError as exc:
            raise SolveError(f"step {t}: {exc}") from exc
        us[t] = res.u_applied
        ws[t] = draw(rng)
        ys[t] = output(model, xs[t], us[t])
        xs[t + 1] = step(model, xs[t], us[t], ws[t])
        zetas[t] = res.zeta
        objs[t] = res.objective
        times[t] = res.solve_time
        statuses.append(res.status.value)
        steps.append(res)
        hist.push(ys[t])

    h = planner.h_phi
    rho = robustness_series(f, ys.T) if N - 1 >= h else np.zeros(0)
    return ClosedLoopTrace(xs, us, ws, ys, zetas, objs, times, statuses, rho, steps)


def monitor_trace(f: Formula, trace) -> np.ndarray:
    """Offline robustness series over a recorded trace."""
    return robustness_series(f, trace)
