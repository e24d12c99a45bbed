"""Bundled case-study scenarios: a lossy double integrator that must
oscillate between two intervals.

Five fixtures explore the same plant: deterministic, disturbed with a
nominal (disturbance-blind) controller, disturbed with the robust
controller, heavily disturbed (softening required), and under-actuated
(minimally violating).  Seeds are fixed so stochastic runs regression
test against recorded behavior.
"""

from __future__ import annotations

import json
from importlib import resources

from .config import ProblemConfig, parse_config
from .mpc import ClosedLoopTrace, run_closed_loop

__all__ = ["SCENARIOS", "scenario_config", "scenario_raw", "run_scenario"]

SCENARIOS = ("scenario1", "scenario2", "scenario3", "scenario4", "scenario5")


def scenario_raw(name: str) -> dict:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; choose from {SCENARIOS}")
    text = resources.files("stlmpc").joinpath(f"scenarios/{name}.json").read_text()
    return json.loads(text)


def scenario_config(name: str) -> ProblemConfig:
    return parse_config(scenario_raw(name))


def run_scenario(name: str, seed: int | None = None, steps: int | None = None) -> tuple[ProblemConfig, ClosedLoopTrace]:
    pc = scenario_config(name)
    trace = run_closed_loop(
        pc.model,
        pc.dist,
        pc.cset,
        pc.formula,
        pc.controller,
        pc.x0,
        steps if steps is not None else pc.N,
        seed=seed if seed is not None else pc.seed,
        solver_cfg=pc.solver,
    )
    return pc, trace
