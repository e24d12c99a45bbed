"""Simplex kernel backend selection.

The compiled Cython kernel is preferred; the numpy implementation is
the fallback when the extension is missing or when the
``STLMPC_PURE_PYTHON`` environment variable is set to a truthy value.
Both expose the same ``solve_standard_form`` contract.
"""

from __future__ import annotations

import os
import warnings

from . import _simplex_py

_FORCE_PY = os.environ.get("STLMPC_PURE_PYTHON", "").lower() in ("1", "true", "yes")

if _FORCE_PY:
    _impl = _simplex_py
    COMPILED = False
else:
    try:
        from . import _simplex_cy as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        warnings.warn(
            "compiled simplex kernel unavailable; using the pure Python fallback "
            "(build the extension or ignore if intentional)",
            RuntimeWarning,
        )
        _impl = _simplex_py
        COMPILED = False

OPTIMAL = _simplex_py.OPTIMAL
INFEASIBLE = _simplex_py.INFEASIBLE
UNBOUNDED = _simplex_py.UNBOUNDED
ITERATION_LIMIT = _simplex_py.ITERATION_LIMIT

solve_standard_form = _impl.solve_standard_form


def backend_name() -> str:
    return "cython" if COMPILED else "python"


def get_backend(name: str):
    """Fetch a specific backend's kernel function (for benchmarks/tests)."""
    if name == "python":
        return _simplex_py.solve_standard_form
    if name == "cython":
        from . import _simplex_cy  # raises ImportError when not built

        return _simplex_cy.solve_standard_form
    raise ValueError(f"unknown backend {name!r}")
