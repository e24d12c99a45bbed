"""CPLEX-style LP text export and import.

The writer is canonical: every coefficient is printed explicitly with
the shortest round-tripping decimal (Python repr), continuous variables
all get a Bounds line in declaration order, binaries are listed in the
Binaries section.  Re-exporting a parsed export reproduces the text
byte for byte.
"""

from __future__ import annotations

import re

import numpy as np

from .model import BINARY, CONTINUOUS, MilpModel

__all__ = ["export_lp", "parse_lp"]


def _num(x: float) -> str:
    return repr(float(x))


def _terms(coeffs: list[tuple[str, float]]) -> str:
    parts: list[str] = []
    for name, coef in coeffs:
        if not parts:
            parts.append(f"{_num(coef)} {name}")
        elif coef < 0:
            parts.append(f"- {_num(-coef)} {name}")
        else:
            parts.append(f"+ {_num(coef)} {name}")
    return " ".join(parts)


def export_lp(model: MilpModel) -> str:
    lines = [f"\\ {model.name}"]
    lines.append("Minimize" if model.minimize else "Maximize")
    obj_terms = [(model.var_name(v), c) for v, c in model.objective.items()]
    lines.append(f" obj: {_terms(obj_terms)}".rstrip())
    lines.append("Subject To")
    for con in model.constraints:
        if not con.coeffs:
            raise ValueError(f"constraint {con.name} has no terms")
        body = _terms([(model.var_name(v), c) for v, c in con.coeffs.items()])
        lines.append(f" {con.name}: {body} {con.sense} {_num(con.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.kind == BINARY:
            continue
        if np.isinf(v.lb) and np.isinf(v.ub):
            lines.append(f" {v.name} free")
        elif np.isinf(v.ub):
            lines.append(f" {v.name} >= {_num(v.lb)}")
        elif np.isinf(v.lb):
            lines.append(f" -infinity <= {v.name} <= {_num(v.ub)}")
        else:
            lines.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binaries")
        for name in binaries:
            lines.append(f" {name}")
    lines.append("End")
    return "\n".join(lines) + "\n"


_SECTIONS = {
    "minimize": "objective",
    "maximize": "objective",
    "subject to": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "end": "end",
}

_TERM_RE = re.compile(r"([+-])?\s*(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")


def _parse_terms(text: str) -> list[tuple[str, float]]:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TERM_RE.match(text, pos)
        if not m:
            raise ValueError(f"cannot parse expression near {text[pos:pos + 20]!r}")
        sign, num, name = m.groups()
        coef = float(num) if num is not None else 1.0
        if sign == "-":
            coef = -coef
        out.append((name, coef))
        pos = m.end()
        while pos < len(text) and text[pos] == " ":
            pos += 1
    return out


def parse_lp(text: str) -> MilpModel:
    """Rebuild a model from LP text produced by :func:`export_lp`."""
    model = MilpModel("model")
    raw_lines = text.splitlines()
    section = None
    minimize = True
    bound_lines: list[str] = []
    binary_names: list[str] = []
    body_lines: list[tuple[str, str]] = []

    for raw in raw_lines:
        line = raw.strip()
        if not line or line.startswith("\\"):
            if line.startswith("\\") and section is None:
                model.name = line[1:].strip() or "model"
            continue
        keyword = line.lower()
        if keyword in _SECTIONS:
            section = _SECTIONS[keyword]
            if keyword == "maximize":
                minimize = False
            if section == "end":
                break
            continue
        if section == "bounds":
            bound_lines.append(line)
        elif section == "binaries":
            binary_names.extend(line.split())
        elif section in ("objective", "constraints"):
            body_lines.append((section, line))
        else:
            raise ValueError(f"content before any section: {line!r}")

    names: dict[str, int] = {}

    def declare(name, kind=CONTINUOUS, lb=0.0, ub=np.inf):
        names[name] = model.add_var(name, kind, lb, ub)

    for line in bound_lines:
        if line.endswith(" free"):
            declare(line[: -len(" free")].strip(), CONTINUOUS, -np.inf, np.inf)
            continue
        parts = [p.strip() for p in line.split("<=")]
        if len(parts) == 3:
            declare(parts[1], CONTINUOUS, float(parts[0]), float(parts[2]))
        elif len(parts) == 1 and ">=" in line:
            name, lo = (p.strip() for p in line.split(">="))
            declare(name, CONTINUOUS, float(lo), np.inf)
        else:
            raise ValueError(f"cannot parse bounds line {line!r}")
    for name in binary_names:
        declare(name, BINARY)

    def var_of(name: str) -> int:
        if name not in names:
            declare(name)
        return names[name]

    for kind, line in body_lines:
        label, _, body = line.partition(":")
        if not _:
            raise ValueError(f"missing label in line {line!r}")
        label = label.strip()
        body = body.strip()
        if kind == "objective":
            terms = _parse_terms(body) if body else []
            model.set_objective([(var_of(n), c) for n, c in terms], minimize)
        else:
            m = re.search(r"(<=|>=|=)\s*([^<>=]+)$", body)
            if not m:
                raise ValueError(f"no comparison in constraint {line!r}")
            sense = m.group(1)
            rhs = float(m.group(2))
            terms = _parse_terms(body[: m.start()])
            model.add_constr([(var_of(n), c) for n, c in terms], sense, rhs, label)
    return model
