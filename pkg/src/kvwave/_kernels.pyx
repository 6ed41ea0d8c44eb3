# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise kernels: truncated quintic family and weighted reductions.

Semantics match kvwave._kernels_np; the per-element arithmetic uses the same
operation order so the pointwise kernels agree bitwise with the fallback.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


def truncated_power5(values, double k):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    out = np.empty_like(arr)
    cdef const double[::1] x = arr.ravel()
    cdef double[::1] r = out.ravel()
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double v, a, v2, k2, k4, k5, o
    k2 = k * k
    k4 = k2 * k2
    k5 = k4 * k
    for i in range(n):
        v = x[i]
        a = fabs(v)
        if a <= k:
            v2 = v * v
            r[i] = (v2 * v2) * v
        else:
            o = k5 + (5.0 * k4) * (a - k)
            r[i] = o if v > 0.0 else -o
    return out


def truncated_power5_prime(values, double k):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    out = np.empty_like(arr)
    cdef const double[::1] x = arr.ravel()
    cdef double[::1] r = out.ravel()
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double v, a, v2, k2, k4
    k2 = k * k
    k4 = k2 * k2
    for i in range(n):
        v = x[i]
        a = fabs(v)
        if a <= k:
            v2 = v * v
            r[i] = 5.0 * (v2 * v2)
        else:
            r[i] = 5.0 * k4
    return out


def truncated_power5_antiderivative(values, double k):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    out = np.empty_like(arr)
    cdef const double[::1] x = arr.ravel()
    cdef double[::1] r = out.ravel()
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double v, a, v2, t, k2, k4, k5, k6
    k2 = k * k
    k4 = k2 * k2
    k5 = k4 * k
    k6 = k4 * k2
    for i in range(n):
        v = x[i]
        a = fabs(v)
        if a <= k:
            v2 = v * v
            r[i] = ((v2 * v2) * v2) / 6.0
        else:
            t = a - k
            r[i] = (k6 / 6.0 + k5 * t) + (2.5 * k4) * (t * t)
    return out


cdef inline double _ipow(double x, long e) noexcept nogil:
    cdef double r = 1.0
    while e > 0:
        if e & 1:
            r *= x
        x *= x
        e >>= 1
    return r


def weighted_abs_power_sum(values, weights, double p):
    va = np.ascontiguousarray(values, dtype=np.float64)
    wa = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] v = va.ravel()
    cdef const double[::1] w = wa.ravel()
    if v.shape[0] != w.shape[0]:
        raise ValueError("values and weights must have the same size")
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double s = 0.0
    cdef double x
    cdef long e
    if p == 2.0:
        for i in range(n):
            x = v[i]
            s += w[i] * (x * x)
    elif p == <double>(<long>p) and 1.0 <= p <= 64.0:
        e = <long>p
        for i in range(n):
            s += w[i] * _ipow(fabs(v[i]), e)
    else:
        for i in range(n):
            s += w[i] * pow(fabs(v[i]), p)
    return s


def potential_sum(values, weights, double k):
    va = np.ascontiguousarray(values, dtype=np.float64)
    wa = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] v = va.ravel()
    cdef const double[::1] w = wa.ravel()
    if v.shape[0] != w.shape[0]:
        raise ValueError("values and weights must have the same size")
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double s = 0.0
    cdef double x, a, v2, t, k2, k4, k5, k6
    k2 = k * k
    k4 = k2 * k2
    k5 = k4 * k
    k6 = k4 * k2
    for i in range(n):
        x = v[i]
        a = fabs(x)
        if a <= k:
            v2 = x * x
            s += w[i] * (((v2 * v2) * v2) / 6.0)
        else:
            t = a - k
            s += w[i] * ((k6 / 6.0 + k5 * t) + (2.5 * k4) * (t * t))
    return s


def max_abs(values):
    arr = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] v = arr.ravel()
    cdef Py_ssize_t i, n = v.shape[0]
    cdef double m = 0.0
    cdef double a
    for i in range(n):
        a = fabs(v[i])
        if a > m:
            m = a
    return m
