"""Problem configuration: JSON loading, validation, normalization.

Configs are validated against the bundled JSON schema, then checked for
mutual dimension consistency.  ``normalize`` materializes every default
so that load -> normalize -> save -> load is the identity on the
normalized form.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .errors import ConfigError
from .formula import Formula
from .linsys import ControlSet, DisturbanceModel, SystemModel
from .milp.model import SolverConfig
from .mpc import ControllerConfig
from .output_map import OutputMap
from .parser import PredicateEnv, parse

__all__ = ["ProblemConfig", "load_config", "parse_config", "normalize", "save_config"]

_DEFAULTS = {
    "name": "problem",
    "disturbance": {"w0": 0.0},
    "predicates": {},
    "M": 1e5,
    "weights": {},
    "seed": 0,
    "solver": {},
    "controller": {},
}
_SOLVER_DEFAULTS = {
    "feasibility_tol": 1e-6,
    "integrality_tol": 1e-6,
    "mip_gap": 1e-9,
    "node_limit": None,
    "time_limit": None,
    "big_m": None,
}
_CONTROLLER_DEFAULTS = {
    "zeta_upper": None,
    "state_box": None,
    "d_zero_reduction": False,
    "nominal": False,
    "maximize_robustness": False,
}


def _schema() -> dict:
    text = resources.files("stlmpc").joinpath("config.schema.json").read_text()
    return json.loads(text)


@dataclass(frozen=True)
class ProblemConfig:
    """Validated configuration with materialized model objects."""

    name: str
    model: SystemModel
    dist: DisturbanceModel
    cset: ControlSet
    formula: Formula
    formula_text: str
    x0: np.ndarray
    controller: ControllerConfig
    solver: SolverConfig
    N: int
    seed: int
    normalized: dict


def parse_config(raw: dict) -> ProblemConfig:
    """Validate a config dict and build the problem objects."""
    schema = _schema()
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        pointer = "/" + "/".join(str(p) for p in err.absolute_path)
        raise ConfigError(err.message, pointer)

    cfg = normalize(raw)
    sys_cfg = cfg["system"]
    A = np.asarray(sys_cfg["A"], dtype=float)
    B = np.asarray(sys_cfg["B"], dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError("A must be a square matrix", "/system/A")
    n = A.shape[0]
    if B.ndim != 2 or B.shape[0] != n:
        raise ConfigError(f"B must have {n} rows", "/system/B")
    m = B.shape[1]

    if sys_cfg["C"] is not None:
        C = np.asarray(sys_cfg["C"], dtype=float)
        if C.ndim != 2 or C.shape[1] != n:
            raise ConfigError(f"C must have {n} columns", "/system/C")
        p = C.shape[0]
        D = np.zeros((p, m)) if sys_cfg["D"] is None else np.asarray(sys_cfg["D"], dtype=float)
        if D.shape != (p, m):
            raise ConfigError(f"D must be {p}x{m}", "/system/D")
        e = np.zeros(p) if sys_cfg["e"] is None else np.asarray(sys_cfg["e"], dtype=float)
        if e.shape != (p,):
            raise ConfigError(f"e must have length {p}", "/system/e")
    else:
        if sys_cfg["D"] is not None or sys_cfg["e"] is not None:
            raise ConfigError("D and e require C", "/system")
        C = np.zeros((0, n))
        D = np.zeros((0, m))
        e = np.zeros(0)

    env = PredicateEnv(names=dict(cfg["predicates"]), outputs=OutputMap(C, D, e))
    for name, row in env.names.items():
        if row > env.outputs.p:
            raise ConfigError(
                f"predicate {name!r} binds row {row} but only {env.outputs.p} outputs exist",
                "/predicates",
            )
    try:
        formula = parse(cfg["formula"], env)
    except ValueError as exc:
        raise ConfigError(str(exc), "/formula") from exc
    outputs = env.outputs
    try:
        model = SystemModel(A, B, outputs.C, outputs.D, outputs.e)
    except ValueError as exc:
        raise ConfigError(str(exc), "/system") from exc

    dist_cfg = cfg["disturbance"]
    try:
        if dist_cfg["vertices"] is not None:
            verts = np.asarray(dist_cfg["vertices"], dtype=float).T  # rows -> columns
            dist = DisturbanceModel(verts, dist_cfg["nominal"])
        else:
            dist = DisturbanceModel.box(dist_cfg["w0"], n, dist_cfg["nominal"])
    except ValueError as exc:
        raise ConfigError(str(exc), "/disturbance") from exc
    if dist.n != n:
        raise ConfigError(f"disturbance dimension {dist.n} does not match n={n}", "/disturbance")

    ctl = cfg["control"]
    try:
        cset = ControlSet(ctl["u_min"], ctl["u_max"], ctl["F"], ctl["g"])
    except ValueError as exc:
        raise ConfigError(str(exc), "/control") from exc
    if cset.m != m:
        raise ConfigError(f"control bounds have length {cset.m}, expected {m}", "/control")

    weights = cfg["weights"]
    if weights["control"] is not None and len(weights["control"]) != m:
        raise ConfigError(f"control weights must have length {m}", "/weights/control")
    if weights["state"] is not None and len(weights["state"]) != n:
        raise ConfigError(f"state weights must have length {n}", "/weights/state")

    if cfg["x0"] is not None:
        x0 = np.asarray(cfg["x0"], dtype=float)
        if x0.shape != (n,):
            raise ConfigError(f"x0 must have length {n}", "/x0")
    else:
        x0 = np.zeros(n)

    ctrl_cfg = cfg["controller"]
    controller = ControllerConfig(
        h_p=cfg["h_p"],
        M=cfg["M"],
        control_weights=_opt_tuple(weights["control"]),
        state_weights=_opt_tuple(weights["state"]),
        state_reference=_opt_tuple(weights["state_reference"]),
        zeta_upper=ctrl_cfg["zeta_upper"],
        state_box=(
            tuple(map(tuple, ctrl_cfg["state_box"])) if ctrl_cfg["state_box"] is not None else None
        ),
        d_zero_reduction=ctrl_cfg["d_zero_reduction"],
        nominal=ctrl_cfg["nominal"],
        maximize_robustness=ctrl_cfg["maximize_robustness"],
    )
    solver = SolverConfig(**cfg["solver"])
    return ProblemConfig(
        name=cfg["name"],
        model=model,
        dist=dist,
        cset=cset,
        formula=formula,
        formula_text=cfg["formula"],
        x0=x0,
        controller=controller,
        solver=solver,
        N=cfg["N"],
        seed=cfg["seed"],
        normalized=cfg,
    )


def normalize(raw: dict) -> dict:
    """Fill every default; numeric arrays become plain nested float lists."""
    cfg = copy.deepcopy(raw)
    for key, val in _DEFAULTS.items():
        cfg.setdefault(key, copy.deepcopy(val))
    for key, val in _SOLVER_DEFAULTS.items():
        cfg["solver"].setdefault(key, val)
    for key, val in _CONTROLLER_DEFAULTS.items():
        cfg["controller"].setdefault(key, val)
    cfg.setdefault("x0", None)
    if cfg["x0"] is not None:
        cfg["x0"] = [float(v) for v in cfg["x0"]]
    cfg["system"].setdefault("C", None)
    cfg["system"].setdefault("D", None)
    cfg["system"].setdefault("e", None)
    dist = cfg["disturbance"]
    dist.setdefault("vertices", None)
    dist.setdefault("nominal", None)
    if dist["vertices"] is None:
        dist.setdefault("w0", 0.0)
    else:
        dist.pop("w0", None)
        dist["w0"] = None
    cfg["control"].setdefault("F", None)
    cfg["control"].setdefault("g", None)
    for key in ("control", "state", "state_reference"):
        cfg["weights"].setdefault(key, None)
    cfg["M"] = float(cfg["M"])

    def listify(x):
        if isinstance(x, list):
            return [listify(v) for v in x]
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            return float(x)
        return x

    for section, keys in (
        ("system", ("A", "B", "C", "D", "e")),
        ("disturbance", ("vertices", "nominal")),
        ("control", ("u_min", "u_max", "F", "g")),
        ("weights", ("control", "state", "state_reference")),
    ):
        for key in keys:
            if cfg[section].get(key) is not None:
                cfg[section][key] = listify(cfg[section][key])
    if cfg["disturbance"].get("w0") is not None:
        cfg["disturbance"]["w0"] = float(cfg["disturbance"]["w0"])
    if cfg["controller"]["state_box"] is not None:
        cfg["controller"]["state_box"] = listify(cfg["controller"]["state_box"])
    return cfg


def save_config(cfg: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_config(path) -> ProblemConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc
    return parse_config(raw)


def _opt_tuple(x):
    return tuple(float(v) for v in x) if x is not None else None
