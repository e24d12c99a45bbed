"""Mixed-integer linear model container.

Variables are integer ids with names, kinds and bounds; constraints are
sparse coefficient lists with a sense and right-hand side; the objective
is linear.  Models are plain mutable builders; solving and export
operate on a finished model.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CONTINUOUS",
    "BINARY",
    "LinExpr",
    "Constraint",
    "MilpModel",
    "SolverConfig",
    "SolveStatus",
    "SolveResult",
]

CONTINUOUS = "continuous"
BINARY = "binary"

_SENSES = ("<=", ">=", "=")


class LinExpr:
    """Sparse affine expression: sum of coef * var plus a constant."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: dict[int, float] | None = None, const: float = 0.0):
        self.coeffs = dict(coeffs) if coeffs else {}
        self.const = float(const)

    @classmethod
    def term(cls, var: int, coef: float = 1.0) -> "LinExpr":
        return cls({var: float(coef)})

    @classmethod
    def constant(cls, value: float) -> "LinExpr":
        return cls({}, value)

    def copy(self) -> "LinExpr":
        return LinExpr(self.coeffs, self.const)

    def add_term(self, var: int, coef: float) -> "LinExpr":
        if coef != 0.0:
            self.coeffs[var] = self.coeffs.get(var, 0.0) + float(coef)
        return self

    def __add__(self, other):
        out = self.copy()
        if isinstance(other, LinExpr):
            for v, c in other.coeffs.items():
                out.add_term(v, c)
            out.const += other.const
        else:
            out.const += float(other)
        return out

    def __radd__(self, other):
        return self.__add__(other)

    def __mul__(self, k: float):
        k = float(k)
        return LinExpr({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        if isinstance(other, LinExpr):
            return self + (other * -1.0)
        return self + (-float(other))

    def value(self, x: np.ndarray) -> float:
        return self.const + sum(c * x[v] for v, c in self.coeffs.items())


@dataclass
class Constraint:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str


@dataclass
class _Variable:
    id: int
    name: str
    kind: str
    lb: float
    ub: float


class MilpModel:
    """Builder for a linear model with continuous and binary variables."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: list[_Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self.minimize = True
        self._names: set[str] = set()

    # -- construction -------------------------------------------------

    def add_var(self, name=None, kind=CONTINUOUS, lb=0.0, ub=np.inf) -> int:
        if kind not in (CONTINUOUS, BINARY):
            raise ValueError(f"unknown variable kind {kind!r}")
        vid = len(self.variables)
        if name is None:
            name = f"x{vid}"
        if name in self._names:
            raise ValueError(f"duplicate variable name {name!r}")
        if kind == BINARY:
            lb, ub = 0.0, 1.0
        lb, ub = float(lb), float(ub)
        if lb > ub:
            raise ValueError(f"variable {name}: lower bound exceeds upper bound")
        self.variables.append(_Variable(vid, name, kind, lb, ub))
        self._names.add(name)
        return vid

    def add_binary(self, name=None) -> int:
        return self.add_var(name, BINARY)

    def add_constr(self, expr, sense: str, rhs: float, name=None) -> int:
        """Add ``expr sense rhs``; a LinExpr constant folds into the rhs."""
        if sense not in _SENSES:
            raise ValueError(f"unknown sense {sense!r}")
        if isinstance(expr, LinExpr):
            coeffs = dict(expr.coeffs)
            rhs = float(rhs) - expr.const
        else:
            coeffs = {int(v): float(c) for v, c in expr}
            rhs = float(rhs)
        for v in coeffs:
            if not 0 <= v < len(self.variables):
                raise ValueError(f"constraint references undeclared variable {v}")
        cid = len(self.constraints)
        self.constraints.append(Constraint(coeffs, sense, rhs, name or f"c{cid}"))
        return cid

    def set_objective(self, expr, minimize: bool = True) -> None:
        if isinstance(expr, LinExpr):
            coeffs = expr.coeffs
        else:
            coeffs = {int(v): float(c) for v, c in expr}
        for v in coeffs:
            if not 0 <= v < len(self.variables):
                raise ValueError(f"objective references undeclared variable {v}")
        self.objective = dict(coeffs)
        self.minimize = bool(minimize)

    # -- views ---------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def binary_ids(self) -> list[int]:
        return [v.id for v in self.variables if v.kind == BINARY]

    def var_name(self, vid: int) -> str:
        return self.variables[vid].name

    def bounds_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        lb = np.array([v.lb for v in self.variables], dtype=float)
        ub = np.array([v.ub for v in self.variables], dtype=float)
        return lb, ub

    def objective_array(self) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for v, coef in self.objective.items():
            c[v] = coef
        return c if self.minimize else -c

    def relaxed(self) -> "MilpModel":
        """Copy with every binary declared continuous on [0, 1]."""
        out = MilpModel(self.name)
        for v in self.variables:
            out.add_var(v.name, CONTINUOUS, v.lb, v.ub)
        for c in self.constraints:
            out.add_constr(list(c.coeffs.items()), c.sense, c.rhs, c.name)
        out.objective = dict(self.objective)
        out.minimize = self.minimize
        return out

    def max_violation(self, x: np.ndarray) -> float:
        """Largest constraint or bound violation at the point x."""
        worst = 0.0
        for v in self.variables:
            worst = max(worst, v.lb - x[v.id], x[v.id] - v.ub)
        for c in self.constraints:
            lhs = sum(coef * x[v] for v, coef in c.coeffs.items())
            if c.sense == "<=":
                worst = max(worst, lhs - c.rhs)
            elif c.sense == ">=":
                worst = max(worst, c.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - c.rhs))
        return worst


@dataclass(frozen=True)
class SolverConfig:
    """Branch-and-bound tolerances and limits.

    ``big_m`` overrides the derived indicator constant when set; the
    relative gap applies to the incumbent-vs-bound pruning test.
    """

    feasibility_tol: float = 1e-6
    integrality_tol: float = 1e-6
    mip_gap: float = 1e-9
    node_limit: int | None = None
    time_limit: float | None = None
    big_m: float | None = None

    def __post_init__(self):
        if self.feasibility_tol <= 0 or self.integrality_tol <= 0 or self.mip_gap <= 0:
            raise ValueError("tolerances must be positive")


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NODE_LIMIT = "node-limit"
    TIME_LIMIT = "time-limit"


@dataclass(frozen=True)
class SolveResult:
    status: SolveStatus
    values: np.ndarray | None
    objective: float | None
    node_count: int
    iterations: int = 0

    def __getitem__(self, vid: int) -> float:
        if self.values is None:
            raise KeyError("no solution available")
        return float(self.values[vid])
