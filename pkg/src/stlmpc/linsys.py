"""Discrete-time linear system models and worst-case output prediction.

The plant is x[t+1] = A x[t] + B u[t] + w[t] with outputs
y[t] = C x[t] + D u[t] + e and w[t] confined to a bounded polytope.
Stacking H+1 output steps gives an affine map (the flow matrices) from
the initial state, the control sequence and the disturbance sequence.
Minimizing each stacked output row over all admissible disturbance
sequences yields a constant offset vector; adding it to the disturbance
free prediction gives a signal that every realized output dominates.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .output_map import OutputMap

__all__ = [
    "SystemModel",
    "DisturbanceModel",
    "ControlSet",
    "FlowMatrices",
    "step",
    "output",
    "build_flow_matrices",
    "omega",
    "uncertainty_offset",
    "robust_prediction",
    "nominal_prediction",
]


@dataclass(frozen=True)
class SystemModel:
    A: np.ndarray  # (n, n)
    B: np.ndarray  # (n, m)
    C: np.ndarray  # (p, n)
    D: np.ndarray  # (p, m)
    e: np.ndarray  # (p,)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, float))
        B = np.atleast_2d(np.asarray(self.B, float))
        C = np.atleast_2d(np.asarray(self.C, float))
        D = np.atleast_2d(np.asarray(self.D, float))
        e = np.asarray(self.e, float).reshape(-1)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be square, got {A.shape}")
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        if C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {C.shape}")
        p, m = C.shape[0], B.shape[1]
        if D.shape != (p, m):
            raise ValueError(f"D must be {p}x{m}, got {D.shape}")
        if e.shape[0] != p:
            raise ValueError(f"e must have length {p}, got {e.shape[0]}")
        for name, M in (("A", A), ("B", B), ("C", C), ("D", D), ("e", e)):
            if not np.isfinite(M).all():
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "e", e)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]

    @property
    def output_map(self) -> OutputMap:
        return OutputMap(self.C, self.D, self.e)

    def with_outputs(self, outputs: OutputMap) -> "SystemModel":
        """Same dynamics with replaced output rows (e.g. after PNF)."""
        return SystemModel(self.A, self.B, outputs.C, outputs.D, outputs.e)


@dataclass(frozen=True)
class DisturbanceModel:
    """Disturbance polytope as a vertex matrix plus a nominal value.

    ``W`` holds one vertex per column.  The nominal defaults to the
    vertex centroid and must lie in the hull (checked with a small LP).
    ``box_bound`` is set when the set was declared as an inf-norm box.
    """

    W: np.ndarray  # (n, v)
    nominal: np.ndarray | None = None
    box_bound: float | None = None

    def __post_init__(self):
        W = np.atleast_2d(np.asarray(self.W, float))
        if W.shape[1] < 1:
            raise ValueError("disturbance polytope needs at least one vertex")
        if not np.isfinite(W).all():
            raise ValueError("vertex matrix must be finite")
        nominal = self.nominal
        if nominal is None:
            nominal = W.mean(axis=1)
        nominal = np.asarray(nominal, float).reshape(-1)
        if nominal.shape[0] != W.shape[0]:
            raise ValueError("nominal disturbance dimension mismatch")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "nominal", nominal)
        if not self._in_hull(nominal):
            raise ValueError("nominal disturbance lies outside the vertex hull")

    def _in_hull(self, point: np.ndarray) -> bool:
        # feasibility LP: lambda >= 0, sum lambda = 1, W lambda = point
        from .milp.simplex import lp_feasible

        n, v = self.W.shape
        A = np.vstack([self.W, np.ones((1, v))])
        b = np.append(point, 1.0)
        return lp_feasible(A, b, np.full(v, np.inf))

    @classmethod
    def box(cls, bound: float, n: int, nominal=None) -> "DisturbanceModel":
        """Inf-norm box ||w|| <= bound expanded to its 2^n vertices."""
        if bound < 0:
            raise ValueError("box bound must be nonnegative")
        if bound == 0.0:
            return cls(np.zeros((n, 1)), nominal, box_bound=0.0)
        corners = np.array(list(itertools.product((-bound, bound), repeat=n))).T
        return cls(corners, nominal, box_bound=float(bound))

    @classmethod
    def none(cls, n: int) -> "DisturbanceModel":
        """The singleton {0}: a deterministic plant."""
        return cls(np.zeros((n, 1)), box_bound=0.0)

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def num_vertices(self) -> int:
        return self.W.shape[1]

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """One draw: uniform over the box, else a uniform convex combination."""
        if self.box_bound is not None:
            return rng.uniform(-self.box_bound, self.box_bound, size=self.n)
        lam = rng.dirichlet(np.ones(self.num_vertices))
        return self.W @ lam


@dataclass(frozen=True)
class ControlSet:
    """Admissible controls: a box plus optional extra rows F u <= g."""

    u_min: np.ndarray
    u_max: np.ndarray
    F: np.ndarray | None = None
    g: np.ndarray | None = None

    def __post_init__(self):
        lo = np.asarray(self.u_min, float).reshape(-1)
        hi = np.asarray(self.u_max, float).reshape(-1)
        if lo.shape != hi.shape:
            raise ValueError("u_min and u_max must have the same length")
        if np.any(lo > hi):
            raise ValueError("u_min must not exceed u_max")
        object.__setattr__(self, "u_min", lo)
        object.__setattr__(self, "u_max", hi)
        if (self.F is None) != (self.g is None):
            raise ValueError("F and g must be given together")
        if self.F is not None:
            F = np.atleast_2d(np.asarray(self.F, float))
            g = np.asarray(self.g, float).reshape(-1)
            if F.shape[1] != lo.shape[0] or F.shape[0] != g.shape[0]:
                raise ValueError("F/g dimensions do not match the control dimension")
            object.__setattr__(self, "F", F)
            object.__setattr__(self, "g", g)

    @classmethod
    def box(cls, bound: float, m: int) -> "ControlSet":
        return cls(np.full(m, -float(bound)), np.full(m, float(bound)))

    @property
    def m(self) -> int:
        return self.u_min.shape[0]


@dataclass(frozen=True)
class FlowMatrices:
    """Stacked output prediction y^H = Phi0 x + Phi1 u^H + Phi2 w^H + 1 (x) e."""

    Phi0: np.ndarray  # ((H+1) p, n)
    Phi1: np.ndarray  # ((H+1) p, (H+1) m)
    Phi2: np.ndarray  # ((H+1) p, H n)
    H: int


def step(model: SystemModel, x, u, w) -> np.ndarray:
    """One state update x' = A x + B u + w."""
    x = np.asarray(x, float).reshape(model.n)
    u = np.asarray(u, float).reshape(model.m)
    w = np.asarray(w, float).reshape(model.n)
    return model.A @ x + model.B @ u + w


def output(model: SystemModel, x, u) -> np.ndarray:
    """Outputs y = C x + D u + e."""
    x = np.asarray(x, float).reshape(model.n)
    u = np.asarray(u, float).reshape(model.m)
    return model.C @ x + model.D @ u + model.e


def build_flow_matrices(model: SystemModel, H: int) -> FlowMatrices:
    """Assemble the stacked prediction maps for horizon H >= 0.

    Block row k of Phi0 is C A^k; Phi1 is block lower triangular with D
    on the diagonal and C A^(k-1-j) B below; Phi2 matches Phi1 with B
    dropped and a zero first block row.
    """
    if H < 0:
        raise ValueError("horizon must be nonnegative")
    n, m, p = model.n, model.m, model.p
    powers = [np.eye(n)]
    for _ in range(H):
        powers.append(model.A @ powers[-1])
    CA = [model.C @ P for P in powers]  # C A^k

    Phi0 = np.vstack(CA[: H + 1])
    Phi1 = np.zeros(((H + 1) * p, (H + 1) * m))
    Phi2 = np.zeros(((H + 1) * p, H * n))
    for k in range(H + 1):
        rows = slice(k * p, (k + 1) * p)
        Phi1[rows, k * m : (k + 1) * m] = model.D
        for j in range(k):
            Phi1[rows, j * m : (j + 1) * m] = CA[k - 1 - j] @ model.B
            Phi2[rows, j * n : (j + 1) * n] = CA[k - 1 - j]
    return FlowMatrices(Phi0, Phi1, Phi2, H)


def omega(P) -> np.ndarray:
    """Row-wise minimum of a vertex matrix: the lower-left bounding corner."""
    P = np.atleast_2d(np.asarray(P, float))
    if P.size == 0:
        raise ValueError("omega of an empty matrix")
    return P.min(axis=1)


def uncertainty_offset(model: SystemModel, dist: DisturbanceModel, H: int) -> np.ndarray:
    """Worst-case shift of every stacked output due to the disturbance.

    Each disturbance step enters the stacked output affinely and
    independently, so the row-wise minimum over all vertex sequences
    separates into a per-step sum: block k is sum_{j<k} omega(C A^j W).
    That avoids enumerating the v^H vertex combinations.
    """
    if dist.n != model.n:
        raise ValueError("disturbance dimension does not match the state dimension")
    p = model.p
    out = np.zeros((H + 1) * p)
    if H == 0:
        return out
    mins = np.zeros((H, p))
    CAk = model.C.copy()
    for j in range(H):
        mins[j] = omega(CAk @ dist.W)
        CAk = CAk @ model.A
    acc = np.zeros(p)
    for k in range(1, H + 1):
        acc = acc + mins[k - 1]
        out[k * p : (k + 1) * p] = acc
    _warn_if_blown_up(model, out)
    return out


def _warn_if_blown_up(model: SystemModel, offset: np.ndarray) -> None:
    if offset.size and np.abs(offset).max() > 1e6:
        radius = np.abs(np.linalg.eigvals(model.A)).max()
        if radius > 1.0:
            warnings.warn(
                f"uncertainty offset exceeds 1e6 and the plant is unstable "
                f"(spectral radius {radius:.3f}); predictions will be extremely conservative",
                RuntimeWarning,
                stacklevel=3,
            )


def robust_prediction(
    model: SystemModel, x_t, uH, offset, flow: FlowMatrices | None = None
) -> np.ndarray:
    """Corner-bound output sequence: Phi0 x + Phi1 u^H + offset + 1 (x) e.

    Every admissible disturbance realization produces outputs that are
    element-wise at least this large.
    """
    uH = np.asarray(uH, float).reshape(-1)
    if uH.size % model.m != 0:
        raise ValueError("stacked control length is not a multiple of the control dimension")
    H = uH.size // model.m - 1
    if flow is None:
        flow = build_flow_matrices(model, H)
    elif flow.H != H:
        raise ValueError(f"flow matrices built for H={flow.H}, controls imply H={H}")
    offset = np.asarray(offset, float).reshape(-1)
    if offset.shape[0] != (H + 1) * model.p:
        raise ValueError("offset length does not match the horizon")
    x_t = np.asarray(x_t, float).reshape(model.n)
    ones_e = np.tile(model.e, H + 1)
    return flow.Phi0 @ x_t + flow.Phi1 @ uH + offset + ones_e


def nominal_prediction(model: SystemModel, dist: DisturbanceModel, x_t, uH) -> np.ndarray:
    """State sequence under the nominal disturbance, shape (H+1, n).

    The first row is the measured state; each later row applies the
    dynamics with w fixed at the nominal value.
    """
    uH = np.asarray(uH, float).reshape(-1, model.m)
    H = uH.shape[0] - 1
    xs = np.zeros((H + 1, model.n))
    xs[0] = np.asarray(x_t, float).reshape(model.n)
    for k in range(H):
        xs[k + 1] = step(model, xs[k], uH[k], dist.nominal)
    return xs
