# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Signatures mirror :mod:`pixfuse._pykernels`."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def mamdani_table(deg1, deg2, rules, out_mf, grid, xs1, xs2):
    cdef double[:, ::1] d1 = np.ascontiguousarray(deg1, dtype=np.float64)
    cdef double[:, ::1] d2 = np.ascontiguousarray(deg2, dtype=np.float64)
    cdef Py_ssize_t[:, ::1] rl = np.ascontiguousarray(rules, dtype=np.intp)
    cdef double[:, ::1] mf = np.ascontiguousarray(out_mf, dtype=np.float64)
    cdef double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef double[::1] x1 = np.ascontiguousarray(xs1, dtype=np.float64)
    cdef double[::1] x2 = np.ascontiguousarray(xs2, dtype=np.float64)

    cdef Py_ssize_t n1 = d1.shape[0], n2 = d2.shape[0]
    cdef Py_ssize_t k = mf.shape[0], s = mf.shape[1], nr = rl.shape[0]
    out = np.empty((n1, n2), dtype=np.float64)
    cdef double[:, ::1] t = out
    cdef double[::1] sk = np.zeros(k, dtype=np.float64)
    cdef Py_ssize_t i, j, r, q, m
    cdef double a, b, v, agg, num, den, best

    with nogil:
        for i in range(n1):
            for j in range(n2):
                for q in range(k):
                    sk[q] = 0.0
                for r in range(nr):
                    a = d1[i, rl[r, 0]]
                    b = d2[j, rl[r, 1]]
                    if rl[r, 2]:
                        v = a if a > b else b
                    else:
                        v = a if a < b else b
                    q = rl[r, 3]
                    if v > sk[q]:
                        sk[q] = v
                best = 0.0
                for q in range(k):
                    if sk[q] > best:
                        best = sk[q]
                if best == 0.0:
                    t[i, j] = 0.5 * (x1[i] + x2[j])
                    continue
                num = 0.0
                den = 0.0
                for m in range(s):
                    agg = 0.0
                    for q in range(k):
                        v = mf[q, m] if mf[q, m] < sk[q] else sk[q]
                        if v > agg:
                            agg = v
                    num += agg * g[m]
                    den += agg
                if den == 0.0:
                    t[i, j] = 0.5 * (x1[i] + x2[j])
                else:
                    t[i, j] = num / den
    return out
