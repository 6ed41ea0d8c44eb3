"""Smooth frequency cutoff and low/high spectral multipliers.

The cutoff chi is the standard mollifier partition: chi(s) = 1 for |s| <= 1,
0 for |s| >= 2, smooth and monotone in between, built from rho(x) =
exp(-1/x) on x > 0. Low/high projectors act diagonally on coefficients as
chi(sqrt(lambda_j)/N) and its complement; the high part is computed as the
exact coefficient difference so low + high reconstructs the input bitwise.
"""

import numpy as np

from .basis import _check_coeffs


def _mollifier(x):
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def chi(s):
    """Smooth even cutoff: 1 on [-1, 1], 0 outside (-2, 2), in [0, 1]."""
    a = np.abs(np.asarray(s, dtype=np.float64))
    scalar = a.ndim == 0
    a = np.atleast_1d(a)
    out = np.ones_like(a)
    out[a >= 2.0] = 0.0
    band = (a > 1.0) & (a < 2.0)
    if np.any(band):
        up = _mollifier(2.0 - a[band])
        down = _mollifier(a[band] - 1.0)
        out[band] = up / (up + down)
    return float(out[0]) if scalar else out


def low_pass_mask(basis, threshold):
    """chi(sqrt(lambda_j)/N) for every mode."""
    if not threshold > 0:
        raise ValueError(f"frequency threshold must be positive, got {threshold}")
    return chi(np.sqrt(basis.eigenvalues) / threshold)


def _paired_split(c, m):
    """Split c into (m c, (1-m) c) so the parts sum back to c bitwise.

    The smaller factor is recovered as an exact difference: whichever of
    m c and (1-m) c lands in [c/2, c] makes c minus it exact (Sterbenz), so
    the real decomposition holds in doubles and the recombination cannot
    round. Each part deviates from the plain product by at most one ulp.
    """
    direct_low = m * c
    direct_high = (1.0 - m) * c
    big = m >= 0.5
    low = np.where(big, direct_low, c - direct_high)
    high = np.where(big, c - direct_low, direct_high)
    return low, high


def project_low(coeffs, basis, threshold):
    """Low-frequency part: coefficients scaled by the smooth cutoff."""
    c = _check_coeffs(coeffs, basis)
    return _paired_split(c, low_pass_mask(basis, threshold))[0]


def project_high(coeffs, basis, threshold):
    """High-frequency part: the exact complement c - project_low(c)."""
    c = _check_coeffs(coeffs, basis)
    return _paired_split(c, low_pass_mask(basis, threshold))[1]


def bernstein_ratio(coeffs, basis, threshold):
    """|grad P_low u|_L2 / (N |u|_L2); bounded by 2 for every input."""
    c = _check_coeffs(coeffs, basis)
    den = np.sqrt(np.sum(c * c))
    if den == 0.0:
        raise ValueError("bernstein_ratio is undefined for zero input")
    low = low_pass_mask(basis, threshold) * c
    num = np.sqrt(np.sum(basis.eigenvalues * low * low))
    return float(num / (threshold * den))


def reverse_bernstein_ratio(coeffs, basis, threshold):
    """N |P_high u|_L2 / |grad u|_L2; bounded by 1 for every input."""
    c = _check_coeffs(coeffs, basis)
    den = np.sqrt(np.sum(basis.eigenvalues * c * c))
    if den == 0.0:
        raise ValueError("reverse_bernstein_ratio is undefined for zero-gradient input")
    high = c - low_pass_mask(basis, threshold) * c
    num = threshold * np.sqrt(np.sum(high * high))
    return float(num / den)


def tail_energy(u0, u1, basis, threshold):
    """|grad P_high u0|_L2 + |P_high u1|_L2: the high-frequency data tail."""
    c0 = _check_coeffs(u0, basis)
    c1 = _check_coeffs(u1, basis)
    hi = 1.0 - low_pass_mask(basis, threshold)
    h0 = hi * c0
    h1 = hi * c1
    grad_part = np.sqrt(np.sum(basis.eigenvalues * h0 * h0))
    vel_part = np.sqrt(np.sum(h1 * h1))
    return float(grad_part + vel_part)
