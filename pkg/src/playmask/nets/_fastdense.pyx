# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled single-sample inference kernels.

Same interface as `_slowdense`; selected by `backend` when built. The batch
training path stays on BLAS-backed numpy, where it is already fast; these
kernels remove the per-call overhead from the per-step path. Dot products
use four independent accumulators so the chain is throughput-bound; the
summation order is fixed, so results are reproducible run to run.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


cdef extern from "_dense_dot.h":
    double playmask_dot(const double* w, const double* h, int n) nogil


cdef inline double _dot(const double* w, const double* h, int n) noexcept nogil:
    return playmask_dot(w, h, n)


def mlp_forward(list weights, list biases, cnp.ndarray[cnp.float64_t, ndim=1] x):
    cdef int n_layers = len(weights)
    cdef int width = x.shape[0]
    cdef int layer, o, n_in, n_out
    cdef double acc
    cdef cnp.float64_t[:, ::1] w
    cdef cnp.float64_t[::1] b
    cdef const double* h_ptr
    cdef double* o_ptr

    for layer in range(n_layers):
        n_out = (<object> weights[layer]).shape[0]
        if n_out > width:
            width = n_out

    buf_a = np.empty(width, dtype=np.float64)
    buf_b = np.empty(width, dtype=np.float64)
    cdef cnp.float64_t[::1] va = buf_a
    cdef cnp.float64_t[::1] vb = buf_b
    cdef cnp.float64_t[::1] vx = x

    h_ptr = &vx[0]
    n_in = x.shape[0]
    for layer in range(n_layers):
        w = weights[layer]
        b = biases[layer]
        n_out = w.shape[0]
        o_ptr = &va[0] if layer % 2 == 0 else &vb[0]
        if layer < n_layers - 1:
            for o in range(n_out):
                acc = b[o] + _dot(&w[o, 0], h_ptr, n_in)
                o_ptr[o] = acc if acc > 0.0 else 0.0
        else:
            for o in range(n_out):
                o_ptr[o] = b[o] + _dot(&w[o, 0], h_ptr, n_in)
        h_ptr = o_ptr
        n_in = n_out

    out = np.empty(n_in, dtype=np.float64)
    cdef cnp.float64_t[::1] vout = out
    cdef int k
    for k in range(n_in):
        vout[k] = h_ptr[k]
    return out


def argmax_over(cnp.ndarray[cnp.float64_t, ndim=1] values, indices):
    """Index in `indices` with the largest value; first (lowest) wins ties."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t k
    cdef long best = idx[0]
    cdef double best_val = values[best]
    for k in range(1, idx.shape[0]):
        if values[idx[k]] > best_val:
            best = idx[k]
            best_val = values[best]
    return int(best)
