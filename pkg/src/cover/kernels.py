"""Kernel backend selection.

The compiled extension is used when it imports; setting ``COVER_PURE_PYTHON=1``
forces the pure-Python implementation.
"""

from __future__ import annotations

import os
from array import array

from . import _kernels_py

UNIFY = _kernels_py.UNIFY
POINTS_TO = _kernels_py.POINTS_TO

_compiled = None
if not os.environ.get("COVER_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def backend(name: str | None = None):
    """Return the kernel module for ``name`` ("cython"/"python"), default active."""
    if name is None:
        return _compiled or _kernels_py
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(name)


def i64(values=()) -> array:
    return array("q", values)


def solve_unification(parent, pts, kinds, lhs, rhs, impl=None) -> int:
    return backend(impl).solve_unification(parent, pts, kinds, lhs, rhs)


def match_accesses(r_open, r_close, r_lo, r_hi, r_mask, e_seq, e_lo, e_hi, e_mask, out, impl=None) -> int:
    return backend(impl).match_accesses(r_open, r_close, r_lo, r_hi, r_mask, e_seq, e_lo, e_hi, e_mask, out)
