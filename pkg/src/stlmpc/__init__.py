"""Receding-horizon control of disturbed linear systems under STL constraints.

The package provides:

* formula parsing, positive normal form, and exact robustness monitoring,
* worst-case corner-bound output prediction for bounded disturbances,
* a big-M mixed-integer encoding with an embedded deterministic solver,
* the closed-loop controller with minimally violating soft constraints,
* a CLI for scenario simulation, trace monitoring and model export.
"""

from .formula import (
    And,
    Always,
    Eventually,
    Formula,
    Not,
    Or,
    Pred,
    Release,
    Until,
    eliminate_release,
    horizon,
)
from .linsys import (
    ControlSet,
    DisturbanceModel,
    FlowMatrices,
    SystemModel,
    build_flow_matrices,
    nominal_prediction,
    omega,
    output,
    robust_prediction,
    step,
    uncertainty_offset,
)
from .output_map import OutputMap
from .parser import PredicateEnv, parse
from .pnf import is_pnf, to_pnf
from .robustness import robustness, robustness_series, satisfied
from .traces import SignalTrace

__version__ = "0.1.0"

__all__ = [
    "And",
    "Always",
    "ControlSet",
    "DisturbanceModel",
    "Eventually",
    "FlowMatrices",
    "Formula",
    "Not",
    "Or",
    "OutputMap",
    "Pred",
    "PredicateEnv",
    "Release",
    "SignalTrace",
    "SystemModel",
    "Until",
    "build_flow_matrices",
    "eliminate_release",
    "horizon",
    "is_pnf",
    "nominal_prediction",
    "omega",
    "output",
    "parse",
    "robust_prediction",
    "robustness",
    "robustness_series",
    "satisfied",
    "step",
    "to_pnf",
    "uncertainty_offset",
]
