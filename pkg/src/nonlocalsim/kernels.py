"""Selects the controlled-cycle kernel implementation at import time.

Preference order: compiled Cython extension, then the numpy fallback.  Set
NONLOCALSIM_PURE_PYTHON=1 to force the fallback (used by the benchmark and
the kernel-equivalence tests).
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_FORCE_PY = os.environ.get("NONLOCALSIM_PURE_PYTHON", "0") not in ("", "0")

if not _FORCE_PY:
    try:
        from . import _cycle_kernel as _impl

        IMPLEMENTATION = "compiled"
    except ImportError:
        _impl = _kernels_py
        IMPLEMENTATION = "python"
else:
    _impl = _kernels_py
    IMPLEMENTATION = "python"


def controlled_cycle(
    amps: np.ndarray,
    dims: tuple[int, ...],
    s_axis: int,
    cycle_axes: tuple[int, ...],
    inverse: bool = False,
    force_python: bool = False,
) -> np.ndarray:
    """Control-conditioned cyclic shift of the listed tensor axes.

    ``amps`` is the flat amplitude vector of a state whose factor dimensions
    are ``dims`` (first factor most significant).  The factor at ``s_axis``
    is the control; for control value j the content of cycle position i
    moves to position (i+j) mod m.
    """
    m = len(cycle_axes)
    if m < 1:
        raise ValueError("need at least one cycled axis")
    if s_axis in cycle_axes:
        raise ValueError("control axis cannot be one of the cycled axes")
    if len(set(cycle_axes)) != m:
        raise ValueError("cycled axes must be distinct")
    sizes = {dims[a] for a in cycle_axes}
    if len(sizes) != 1:
        raise ValueError(f"cycled axes must have equal dimensions, got {sorted(sizes)}")
    if dims[s_axis] != m:
        raise ValueError(f"control dimension {dims[s_axis]} != number of cycled registers {m}")
    chosen = _kernels_py if force_python else _impl
    return np.asarray(chosen.controlled_cycle(amps, tuple(dims), int(s_axis), tuple(cycle_axes), inverse))
