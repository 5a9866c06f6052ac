# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loop: control-conditioned cyclic permutation of tensor axes.

The statevector protocols spend most of their time permuting amplitudes of
multi-million-entry arrays; this kernel does each control block as a single
strided gather pass with no temporaries.
"""
import numpy as np


cdef void _strided_gather(const double complex* src, double complex* dst,
                          const long long* shape, const long long* in_strides,
                          const long long* out_strides, Py_ssize_t nax,
                          long long in_base, long long out_base,
                          long long* digits) noexcept nogil:
    cdef long long total = 1
    cdef Py_ssize_t k
    for k in range(nax):
        total *= shape[k]
        digits[k] = 0
    cdef long long i
    cdef long long in_off = in_base
    cdef long long out_off = out_base
    cdef Py_ssize_t ax
    for i in range(total):
        dst[out_off] = src[in_off]
        ax = nax - 1
        while ax >= 0:
            digits[ax] += 1
            in_off += in_strides[ax]
            out_off += out_strides[ax]
            if digits[ax] < shape[ax]:
                break
            in_off -= shape[ax] * in_strides[ax]
            out_off -= shape[ax] * out_strides[ax]
            digits[ax] = 0
            ax -= 1


def controlled_cycle(amps, dims, s_axis, cycle_axes, inverse=False):
    """Same contract as the numpy fallback; see _kernels_py.controlled_cycle."""
    cdef Py_ssize_t n = len(dims)
    cdef Py_ssize_t m = len(cycle_axes)
    src_arr = np.ascontiguousarray(amps, dtype=np.complex128).reshape(-1)
    out_arr = np.empty_like(src_arr)

    strides_py = [0] * n
    acc = 1
    for k in range(n - 1, -1, -1):
        strides_py[k] = acc
        acc *= dims[k]

    # per control value, the gather runs over every axis except the control
    shape_np = np.empty(n - 1, dtype=np.int64)
    in_str_np = np.empty(n - 1, dtype=np.int64)
    out_str_np = np.empty(n - 1, dtype=np.int64)
    digits_np = np.empty(max(n - 1, 1), dtype=np.int64)

    cdef double complex[::1] src_mv = src_arr
    cdef double complex[::1] dst_mv = out_arr
    cdef long long[::1] shape_mv = shape_np
    cdef long long[::1] in_str_mv = in_str_np
    cdef long long[::1] out_str_mv = out_str_np
    cdef long long[::1] digits_mv = digits_np
    cdef long long in_base, out_base
    cdef Py_ssize_t nax = n - 1

    for j in range(dims[s_axis]):
        shift = (-j) % m if inverse else j % m
        axes = list(range(n))
        for i in range(m):
            axes[cycle_axes[(i + shift) % m]] = cycle_axes[i]
        pos = 0
        for k in range(n):
            if k == s_axis:
                continue
            shape_np[pos] = dims[k]
            out_str_np[pos] = strides_py[k]
            in_str_np[pos] = strides_py[axes[k]]
            pos += 1
        in_base = j * strides_py[s_axis]
        out_base = in_base
        with nogil:
            _strided_gather(&src_mv[0], &dst_mv[0], &shape_mv[0], &in_str_mv[0],
                            &out_str_mv[0], nax, in_base, out_base, &digits_mv[0])
    return out_arr
