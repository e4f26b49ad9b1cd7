# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled fixed-size Cl(3,0) kernels.

Same coefficient layout and term order as the numpy fallback in
_cl3_numpy.py: (1, e1, e2, e12, e3, e31, e23, e123). Keep the expression
lists in sync; both are checked against the generic engine by tests.
"""

import numpy as np


cdef inline void _gp8(const double* a, const double* b, double* o) noexcept nogil:
    o[0] = a[0]*b[0] + a[1]*b[1] + a[2]*b[2] - a[3]*b[3] + a[4]*b[4] - a[5]*b[5] - a[6]*b[6] - a[7]*b[7]
    o[1] = a[0]*b[1] + a[1]*b[0] - a[2]*b[3] + a[3]*b[2] + a[4]*b[5] - a[5]*b[4] - a[6]*b[7] - a[7]*b[6]
    o[2] = a[0]*b[2] + a[1]*b[3] + a[2]*b[0] - a[3]*b[1] - a[4]*b[6] - a[5]*b[7] + a[6]*b[4] - a[7]*b[5]
    o[3] = a[0]*b[3] + a[1]*b[2] - a[2]*b[1] + a[3]*b[0] + a[4]*b[7] + a[5]*b[6] - a[6]*b[5] + a[7]*b[4]
    o[4] = a[0]*b[4] - a[1]*b[5] + a[2]*b[6] - a[3]*b[7] + a[4]*b[0] + a[5]*b[1] - a[6]*b[2] - a[7]*b[3]
    o[5] = a[0]*b[5] - a[1]*b[4] + a[2]*b[7] - a[3]*b[6] + a[4]*b[1] + a[5]*b[0] + a[6]*b[3] + a[7]*b[2]
    o[6] = a[0]*b[6] + a[1]*b[7] + a[2]*b[4] + a[3]*b[5] - a[4]*b[2] - a[5]*b[3] + a[6]*b[0] + a[7]*b[1]
    o[7] = a[0]*b[7] + a[1]*b[6] + a[2]*b[5] + a[3]*b[4] + a[4]*b[3] + a[5]*b[2] + a[6]*b[1] + a[7]*b[0]


cdef inline void _gp8_rev_right(const double* t, const double* r, double* o) noexcept nogil:
    # t * reverse(r) with the reversion signs folded into the terms
    o[0] = t[0]*r[0] + t[1]*r[1] + t[2]*r[2] + t[3]*r[3] + t[4]*r[4] + t[5]*r[5] + t[6]*r[6] + t[7]*r[7]
    o[1] = t[0]*r[1] + t[1]*r[0] + t[2]*r[3] + t[3]*r[2] - t[4]*r[5] - t[5]*r[4] + t[6]*r[7] + t[7]*r[6]
    o[2] = t[0]*r[2] - t[1]*r[3] + t[2]*r[0] - t[3]*r[1] + t[4]*r[6] + t[5]*r[7] + t[6]*r[4] + t[7]*r[5]
    o[3] = -t[0]*r[3] + t[1]*r[2] - t[2]*r[1] + t[3]*r[0] - t[4]*r[7] - t[5]*r[6] + t[6]*r[5] + t[7]*r[4]
    o[4] = t[0]*r[4] + t[1]*r[5] - t[2]*r[6] + t[3]*r[7] + t[4]*r[0] + t[5]*r[1] - t[6]*r[2] + t[7]*r[3]
    o[5] = -t[0]*r[5] - t[1]*r[4] - t[2]*r[7] + t[3]*r[6] + t[4]*r[1] + t[5]*r[0] - t[6]*r[3] + t[7]*r[2]
    o[6] = -t[0]*r[6] - t[1]*r[7] + t[2]*r[4] - t[3]*r[5] - t[4]*r[2] + t[5]*r[3] + t[6]*r[0] + t[7]*r[1]
    o[7] = -t[0]*r[7] - t[1]*r[6] - t[2]*r[5] + t[3]*r[4] - t[4]*r[3] + t[5]*r[2] + t[6]*r[1] + t[7]*r[0]


def gp_batch(const double[:, ::1] a, const double[:, ::1] b):
    if a.shape[0] != b.shape[0] or a.shape[1] != 8 or b.shape[1] != 8:
        raise ValueError("expected matching (n, 8) arrays")
    out = np.empty((a.shape[0], 8), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(a.shape[0]):
            _gp8(&a[i, 0], &b[i, 0], &o[i, 0])
    return out


def rotor_sandwich_batch(const double[:, ::1] r, const double[:, ::1] a):
    if a.shape[0] != r.shape[0] or a.shape[1] != 8 or r.shape[1] != 8:
        raise ValueError("expected matching (n, 8) arrays")
    out = np.empty((a.shape[0], 8), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double tmp[8]
    cdef Py_ssize_t i
    with nogil:
        for i in range(a.shape[0]):
            _gp8(&r[i, 0], &a[i, 0], tmp)
            _gp8_rev_right(tmp, &r[i, 0], &o[i, 0])
    return out
