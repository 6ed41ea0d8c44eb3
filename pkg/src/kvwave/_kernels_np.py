"""Pure-NumPy implementations of the pointwise hot kernels.

Mirrors ``kvwave._kernels`` (the compiled extension). The arithmetic inside
each branch is structured exactly like the C loops, so both backends agree
bitwise on the pointwise kernels; reductions may differ in the last ulps
because NumPy sums pairwise.
"""

import numpy as np


def truncated_power5(values, k):
    """Quintic with C1 linear continuation outside [-k, k], elementwise."""
    v = np.asarray(values, dtype=np.float64)
    a = np.abs(v)
    k2 = k * k
    k4 = k2 * k2
    k5 = k4 * k
    with np.errstate(over="ignore"):
        v2 = v * v
        inner = (v2 * v2) * v
        outer = np.sign(v) * (k5 + (5.0 * k4) * (a - k))
    return np.where(a <= k, inner, outer)


def truncated_power5_prime(values, k):
    """Derivative of the truncated quintic: 5 s^4 capped at 5 k^4."""
    v = np.asarray(values, dtype=np.float64)
    a = np.abs(v)
    k2 = k * k
    k4 = k2 * k2
    with np.errstate(over="ignore"):
        v2 = v * v
        inner = 5.0 * (v2 * v2)
    return np.where(a <= k, inner, np.full_like(v, 5.0 * k4))


def truncated_power5_antiderivative(values, k):
    """Antiderivative of the truncated quintic, zero at the origin."""
    v = np.asarray(values, dtype=np.float64)
    a = np.abs(v)
    k2 = k * k
    k4 = k2 * k2
    k5 = k4 * k
    k6 = k4 * k2
    with np.errstate(over="ignore"):
        v2 = v * v
        inner = ((v2 * v2) * v2) / 6.0
        t = a - k
        outer = (k6 / 6.0 + k5 * t) + (2.5 * k4) * (t * t)
    return np.where(a <= k, inner, outer)


def weighted_abs_power_sum(values, weights, p):
    """sum_i w_i |v_i|^p over flattened arrays."""
    v = np.asarray(values, dtype=np.float64).ravel()
    w = np.asarray(weights, dtype=np.float64).ravel()
    if p == 2.0:
        return float(np.sum(w * (v * v)))
    return float(np.sum(w * np.abs(v) ** p))


def potential_sum(values, weights, k):
    """sum_i w_i F_k(v_i): the quadrature of the truncated potential."""
    v = np.asarray(values, dtype=np.float64).ravel()
    w = np.asarray(weights, dtype=np.float64).ravel()
    return float(np.sum(w * truncated_power5_antiderivative(v, k)))


def max_abs(values):
    """max_i |v_i| (0.0 for empty input)."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))
