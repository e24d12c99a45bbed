"""Big-M encoding of PNF formulas over affine output expressions.

Each predicate occurrence (i, tau) gets one binary z with

    y_i[tau] - K z <= 0        (z = 0 forces y <= 0)
    y_i[tau] + K (1 - z) >= 0  (z = 1 forces y >= 0)

so K must exceed every attainable |y_i[tau]|.  Operator indicators are
continuous in [0, 1]; with integral predicate binaries the constraint
rows force them to exact boolean values, so only the predicate grid
contributes integer variables.  Indicators are created lazily from the
asserted window roots downward and shared between duplicate
(subformula, time) requests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import FormulaError
from ..formula import And, Always, Eventually, Formula, Not, Or, Pred, Release, Until
from .model import CONTINUOUS, LinExpr, MilpModel

__all__ = ["EncodingResult", "encode_predicates", "encode_formula", "assert_window", "encode_stl"]


@dataclass
class EncodingResult:
    """Indicator bookkeeping for one encoded window."""

    indicators: dict[tuple[Formula, int], int]
    grid: dict[tuple[int, int], int]
    K: float
    window: tuple[int, ...] = field(default=())

    def root_var(self, f: Formula, t: int) -> int:
        return self.indicators[(f, t)]


def encode_predicates(
    model: MilpModel, yexprs: dict[tuple[int, int], LinExpr], K: float
) -> dict[tuple[int, int], int]:
    """Attach one binary indicator to every supplied output expression."""
    if not K > 0.0:
        raise ValueError(f"big-M constant must be positive, got {K}")
    grid: dict[tuple[int, int], int] = {}
    for (i, tau) in sorted(yexprs):
        expr = yexprs[(i, tau)]
        z = model.add_binary(f"zp{i}_{tau}")
        model.add_constr(expr - K * LinExpr.term(z), "<=", 0.0, f"pred_off_{i}_{tau}")
        model.add_constr(expr - K * LinExpr.term(z), ">=", -K, f"pred_on_{i}_{tau}")
        grid[(i, tau)] = z
    return grid


class _FormulaEncoder:
    def __init__(self, model: MilpModel, grid: dict[tuple[int, int], int]):
        self.model = model
        self.grid = grid
        self.indicators: dict[tuple[Formula, int], int] = {}
        self._node_tag: dict[Formula, int] = {}

    def tag(self, f: Formula) -> int:
        t = self._node_tag.get(f)
        if t is None:
            t = len(self._node_tag)
            self._node_tag[f] = t
        return t

    def encode(self, f: Formula, t: int) -> int:
        key = (f, t)
        z = self.indicators.get(key)
        if z is not None:
            return z
        if isinstance(f, Pred):
            z = self.grid.get((f.index, t))
            if z is None:
                raise ValueError(
                    f"window too short: predicate p{f.index} required at time {t} "
                    "has no output expression"
                )
        elif isinstance(f, And):
            z = self._conjunction(f, t, [(c, t) for c in f.children])
        elif isinstance(f, Or):
            z = self._disjunction(f, t, [(c, t) for c in f.children])
        elif isinstance(f, Always):
            z = self._conjunction(f, t, [(f.child, tau) for tau in range(t + f.a, t + f.b + 1)])
        elif isinstance(f, Eventually):
            z = self._disjunction(f, t, [(f.child, tau) for tau in range(t + f.a, t + f.b + 1)])
        elif isinstance(f, Until):
            z = self._until(f, t)
        elif isinstance(f, (Not, Release)):
            raise FormulaError("encoder requires positive normal form (no negation, no release)")
        else:
            raise TypeError(f"not a formula node: {f!r}")
        self.indicators[key] = z
        return z

    def _new_indicator(self, name: str) -> int:
        return self.model.add_var(name, CONTINUOUS, 0.0, 1.0)

    def _conjunction(self, f: Formula, t: int, parts: list[tuple[Formula, int]]) -> int:
        zs = [self.encode(c, tau) for c, tau in parts]
        z = self._new_indicator(f"zand{self.tag(f)}_{t}")
        return self._tie_conjunction(z, zs)

    def _tie_conjunction(self, z: int, zs: list[int]) -> int:
        expr_sum = LinExpr.term(z)
        for zc in zs:
            self.model.add_constr(LinExpr.term(z) - LinExpr.term(zc), "<=", 0.0)
            expr_sum = expr_sum - LinExpr.term(zc)
        self.model.add_constr(expr_sum, ">=", 1 - len(zs))
        return z

    def _disjunction(self, f: Formula, t: int, parts: list[tuple[Formula, int]]) -> int:
        zs = [self.encode(c, tau) for c, tau in parts]
        z = self._new_indicator(f"zor{self.tag(f)}_{t}")
        expr_sum = LinExpr.term(z)
        for zc in zs:
            self.model.add_constr(LinExpr.term(z) - LinExpr.term(zc), ">=", 0.0)
            expr_sum = expr_sum - LinExpr.term(zc)
        self.model.add_constr(expr_sum, "<=", 0.0)
        return z

    def _until(self, f: Until, t: int) -> int:
        # one conjunction per candidate release time tau: right holds at tau
        # and left holds throughout [t, tau]
        conj_vars = []
        for tau in range(t + f.a, t + f.b + 1):
            zs = [self.encode(f.right, tau)]
            zs.extend(self.encode(f.left, tp) for tp in range(t, tau + 1))
            zc = self._new_indicator(f"zu{self.tag(f)}_{t}_{tau}")
            conj_vars.append(self._tie_conjunction(zc, zs))
        z = self._new_indicator(f"zuntil{self.tag(f)}_{t}")
        expr_sum = LinExpr.term(z)
        for zc in conj_vars:
            self.model.add_constr(LinExpr.term(z) - LinExpr.term(zc), ">=", 0.0)
            expr_sum = expr_sum - LinExpr.term(zc)
        self.model.add_constr(expr_sum, "<=", 0.0)
        return z


def encode_formula(
    model: MilpModel,
    f: Formula,
    grid: dict[tuple[int, int], int],
    times,
) -> dict[tuple[Formula, int], int]:
    """Create root indicators for f at every requested time."""
    enc = _FormulaEncoder(model, grid)
    for t in times:
        enc.encode(f, t)
    return enc.indicators


def assert_window(model: MilpModel, roots: dict[int, int]) -> list[int]:
    """Pin every window root indicator to 1 (satisfaction everywhere)."""
    cids = []
    for t in sorted(roots):
        cids.append(model.add_constr(LinExpr.term(roots[t]), "=", 1.0, f"window_{t}"))
    return cids


def encode_stl(
    model: MilpModel,
    f: Formula,
    yexprs: dict[tuple[int, int], LinExpr],
    window,
    K: float,
) -> EncodingResult:
    """Full pipeline: predicate grid, formula indicators, window assertion."""
    grid = encode_predicates(model, yexprs, K)
    window = tuple(window)
    indicators = encode_formula(model, f, grid, window)
    assert_window(model, {t: indicators[(f, t)] for t in window})
    return EncodingResult(indicators, grid, float(K), window)
