"""Lebesgue and mixed space-time norms by quadrature.

Spatial L^p norms use the basis quadrature weights; mixed L^q_t L^p_x norms
integrate the sampled spatial norms with the trapezoid rule in time. The
bootstrap monitor compares the running critical norm X(T) = L^5_t L^10_x
against the first positive root of x = K + C1 x^5.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .basis import _check_grid, from_spectral


def lp_norm(values, basis, p):
    """(sum w |f|^p)^(1/p) on the quadrature grid; p = inf gives the grid max."""
    f = _check_grid(values, basis)
    if p == np.inf:
        return kernels.max_abs(f)
    if not p >= 1:
        raise ValueError(f"exponent must be >= 1 or inf, got {p}")
    return float(kernels.weighted_abs_power_sum(f, basis.weights, float(p)) ** (1.0 / p))


@dataclass
class MixedNormAccumulator:
    """Streaming trapezoid accumulator for (integral |u(t)|_p^q dt)^(1/q)."""

    q: float
    p: float
    times: list = field(default_factory=list)
    norms: list = field(default_factory=list)

    def __post_init__(self):
        if not (self.q >= 1 and self.p >= 1):
            raise ValueError("exponents must be >= 1")

    def add(self, t, spatial_norm):
        if self.times and t <= self.times[-1]:
            raise ValueError("sample times must be strictly increasing")
        self.times.append(float(t))
        self.norms.append(float(spatial_norm))

    @property
    def value(self):
        if not self.times:
            raise ValueError("empty accumulator")
        if self.q == np.inf:
            return float(np.max(self.norms))
        powers = np.asarray(self.norms) ** self.q
        return float(np.trapezoid(powers, np.asarray(self.times)) ** (1.0 / self.q))


def spatial_norm_series(traj, p):
    """|u(t_i)|_p at every stored sample of a trajectory."""
    b = traj.basis
    return np.array([lp_norm(from_spectral(s.u, b), b, p) for s in traj.states])


def mixed_norm(traj, q, p):
    """L^q in time of the spatial L^p norm over the whole trajectory."""
    if len(traj.states) == 0:
        raise ValueError("empty trajectory")
    series = spatial_norm_series(traj, p)
    if q == np.inf:
        return float(np.max(series))
    if not q >= 1:
        raise ValueError(f"time exponent must be >= 1 or inf, got {q}")
    return float(np.trapezoid(series**q, traj.times) ** (1.0 / q))


def bootstrap_root(K_const, C1):
    """First positive root of x = K + C1 x^5, or None if none exists.

    The polynomial x - C1 x^5 peaks at x* = (1/(5 C1))^(1/4); when K exceeds
    that peak the equation has no positive root (no forbidden region).
    """
    if not (K_const >= 0 and C1 > 0):
        raise ValueError("need K >= 0 and C1 > 0")
    if K_const == 0.0:
        return 0.0
    x_star = (1.0 / (5.0 * C1)) ** 0.25
    peak = x_star - C1 * x_star**5
    if K_const > peak:
        return None
    lo, hi = 0.0, x_star
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid - C1 * mid**5 - K_const < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * x_star:
            break
    return 0.5 * (lo + hi)


@dataclass
class BootstrapReport:
    """Running critical norm against the first root of x = K + C1 x^5."""

    times: np.ndarray
    X: np.ndarray
    root: float | None
    stays_below: bool
    margin: float | None
    forbidden_region_absent: bool


def bootstrap_monitor(traj, K_const, C1):
    """Check that X(T_i) = |u|_{L^5(0,T_i; L^10)} stays below the first root.

    The constants are user-supplied (diagnostic only); when K is too large
    for a forbidden region to exist the report says so instead of failing.
    """
    if not (K_const >= 0 and C1 > 0):
        raise ValueError("need K >= 0 and C1 > 0")
    series = spatial_norm_series(traj, 10.0)
    times = np.asarray(traj.times)
    powers = series**5
    prefix = np.concatenate(
        ([0.0], np.cumsum(0.5 * (powers[1:] + powers[:-1]) * np.diff(times)))
    )
    X = prefix ** (1.0 / 5.0)
    root = bootstrap_root(K_const, C1)
    if root is None:
        return BootstrapReport(times, X, None, False, None, True)
    below = bool(np.all(X <= root))
    return BootstrapReport(times, X, root, below, float(root - np.max(X)), False)
