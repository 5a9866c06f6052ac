"""Pure-numpy implementation of the controlled-cycle kernel.

Used when the compiled extension is unavailable or explicitly disabled via
NONLOCALSIM_PURE_PYTHON=1.
"""
from __future__ import annotations

import numpy as np


def controlled_cycle(
    amps: np.ndarray,
    dims: tuple[int, ...],
    s_axis: int,
    cycle_axes: tuple[int, ...],
    inverse: bool = False,
) -> np.ndarray:
    """Apply the control-register-conditioned cyclic shift of the cycled axes.

    For control digit j, output digit at cycle position (i+j) mod m is read
    from input cycle position i.  ``inverse`` undoes it.
    """
    m = len(cycle_axes)
    n = len(dims)
    a = amps.reshape(dims)
    out = np.empty_like(a)
    for j in range(dims[s_axis]):
        shift = (-j) % m if inverse else j % m
        axes = list(range(n))
        for i in range(m):
            axes[cycle_axes[(i + shift) % m]] = cycle_axes[i]
        # slice away the control axis, renumbering the permutation to match
        comp = [ax - (ax > s_axis) for k, ax in enumerate(axes) if k != s_axis]
        src = np.take(a, j, axis=s_axis)
        dst = [slice(None)] * n
        dst[s_axis] = j
        out[tuple(dst)] = src.transpose(comp)
    return out.reshape(-1)
