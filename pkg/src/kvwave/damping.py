"""Damping coefficients a(x) and the dissipation operator in the eigenbasis.

Presets build a(x) as eta * psi^2 with psi a product of 1D smooth plateaus,
which guarantees the pointwise inequality |grad a|^2 <= C_a * a with an
analytic constant: grad a = 2 eta psi grad psi gives |grad a|^2 =
4 eta |grad psi|^2 * a. The plateau edges use the standard mollifier
smoothstep, whose maximal slope is exactly 2, so each axis contributes
(2/edge)^2 to the bound.

The assembled dissipation matrix K_ij = integral a grad(phi_i) . grad(phi_j)
is dense, symmetric positive semidefinite, and reduces to alpha * diag(lambda)
for constant a = alpha.
"""

from dataclasses import dataclass, field

import numpy as np

from .basis import _check_coeffs

# Peak slope of the mollifier smoothstep S(t) = rho(t) / (rho(t) + rho(1-t)),
# attained at t = 1/2 where S'(1/2) = rho'(1/2) / (2 rho(1/2)) = 2 exactly.
SMOOTHSTEP_MAX_SLOPE = 2.0

MAX_DENSE_MODES = 4096  # dense K assembly cap


def _rho(x):
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _rho_prime(x):
    out = np.zeros_like(x)
    pos = x > 0
    xp = x[pos]
    out[pos] = np.exp(-1.0 / xp) / (xp * xp)
    return out


def smoothstep(t):
    """C-infinity ramp: 0 for t <= 0, 1 for t >= 1, strictly monotone between."""
    t = np.asarray(t, dtype=np.float64)
    u = _rho(t)
    v = _rho(1.0 - t)
    out = np.zeros_like(t)
    both = (u + v) > 0
    out[both] = u[both] / (u[both] + v[both])
    out[t >= 1.0] = 1.0
    return out


def smoothstep_prime(t):
    """Derivative of the smoothstep; peaks at exactly 2 at t = 1/2."""
    t = np.asarray(t, dtype=np.float64)
    u = _rho(t)
    v = _rho(1.0 - t)
    up = _rho_prime(t)
    vp = _rho_prime(1.0 - t)
    out = np.zeros_like(t)
    band = (t > 0.0) & (t < 1.0)
    s = u[band] + v[band]
    out[band] = (up[band] * v[band] + u[band] * vp[band]) / (s * s)
    return out


def plateau(x, lo, hi, edge):
    """1D smooth bump: 0 outside (lo, hi), 1 on [lo+edge, hi-edge]."""
    if not 0 < edge <= 0.5 * (hi - lo):
        raise ValueError(f"edge {edge} must lie in (0, (hi-lo)/2]")
    return smoothstep((x - lo) / edge) * smoothstep((hi - x) / edge)


def plateau_prime(x, lo, hi, edge):
    up = smoothstep((x - lo) / edge)
    down = smoothstep((hi - x) / edge)
    dup = smoothstep_prime((x - lo) / edge) / edge
    ddown = -smoothstep_prime((hi - x) / edge) / edge
    return dup * down + up * ddown


@dataclass
class DampingProfile:
    """Grid samples of a(x) and grad a, with the structural constant.

    structural_constant is the analytic C_a in |grad a|^2 <= C_a a for
    presets built to satisfy it, and None when no analytic bound exists
    (linear_ramp, grid_file).
    """

    preset: str
    params: dict
    a: np.ndarray
    grad: tuple
    structural_constant: float | None
    support_measure: float

    def __post_init__(self):
        if np.any(self.a < 0):
            raise ValueError("damping coefficient must be nonnegative")


def _axis_tuple(value, d, name):
    if np.ndim(value) == 0:
        return (float(value),) * d
    vals = tuple(float(v) for v in value)
    if len(vals) != d:
        raise ValueError(f"{name} must be a scalar or one value per axis, got {vals}")
    return vals


def _product_bump_fields(basis, los, his, edges):
    """psi = prod of per-axis plateaus and its gradient components, on the grid."""
    d = basis.domain.dimension
    p1 = []
    dp1 = []
    for ax in range(d):
        x = basis.axes[ax]
        p1.append(plateau(x, los[ax], his[ax], edges[ax]))
        dp1.append(plateau_prime(x, los[ax], his[ax], edges[ax]))
    psi = p1[0]
    for ax in range(1, d):
        psi = np.multiply.outer(psi, p1[ax])
    grads = []
    for ax in range(d):
        g = dp1[0] if ax == 0 else p1[0]
        for b in range(1, d):
            g = np.multiply.outer(g, dp1[b] if b == ax else p1[b])
        grads.append(g)
    return psi, grads


def _check_support(los, his, lengths):
    for lo, hi, L in zip(los, his, lengths):
        if lo < 0 or hi > L or lo >= hi:
            raise ValueError(
                f"support [{lo}, {hi}] falls outside the domain axis (0, {L})"
            )


def grid_support_measure(basis, a):
    """Quadrature of the support indicator {a > 0}; O(h)-accurate oracle."""
    return float(np.sum(basis.weights[a > 0.0]))


def make_profile(basis, preset, **params):
    """Build a damping profile on the basis grid.

    Presets
    -------
    constant(alpha)
        a = alpha everywhere; C_a = 0.
    squared_bump(eta, center, radius)
        a = eta psi^2 with psi a product plateau supported on
        center +- radius per axis (edges of width radius/2).
    strip(eta, axis=0, center=None, measure=None, width=None)
        Plateau along one axis only; support width = measure fraction of
        that axis length (or absolute width); edges of width/4.
    bump_union(eta, count, measure, centers=None)
        count product bumps sized so the total support measure equals
        measure * |Omega|; centers default to evenly spaced points on the
        main diagonal.
    sine_bump(eta, harmonic=1)
        a = eta * prod sin(harmonic pi x / L)^2: the spectrally narrowest
        compliant bump (bandwidth 2*harmonic in per-axis frequency), used
        where saturation of frequency scans matters.
    linear_ramp(slope, axis=0)
        a = slope * x_axis; violates the structural condition (no C_a).
    grid_file(path)
        a sampled on the quadrature grid from a .npy array or CSV of the
        flattened values in row-major axis order; gradient by centered
        finite differences.
    """
    d = basis.domain.dimension
    lengths = basis.domain.edge_lengths
    grid_shape = basis.grid_shape

    if preset == "constant":
        alpha = float(params.pop("alpha", 1.0))
        _reject_extras(preset, params)
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        a = np.full(grid_shape, alpha)
        grad = tuple(np.zeros(grid_shape) for _ in range(d))
        measure = basis.domain.volume if alpha > 0 else 0.0
        return DampingProfile(preset, {"alpha": alpha}, a, grad, 0.0, measure)

    if preset == "squared_bump":
        eta = float(params.pop("eta", 1.0))
        center = _axis_tuple(params.pop("center", tuple(0.5 * L for L in lengths)), d, "center")
        radius = _axis_tuple(params.pop("radius"), d, "radius")
        _reject_extras(preset, params)
        los = tuple(c - r for c, r in zip(center, radius))
        his = tuple(c + r for c, r in zip(center, radius))
        edges = tuple(0.5 * r for r in radius)
        _check_support(los, his, lengths)
        psi, dpsi = _product_bump_fields(basis, los, his, edges)
        a = eta * psi * psi
        grad = tuple(2.0 * eta * psi * g for g in dpsi)
        c_a = 4.0 * eta * sum((SMOOTHSTEP_MAX_SLOPE / e) ** 2 for e in edges)
        support = float(np.prod([2.0 * r for r in radius]))
        return DampingProfile(
            preset,
            {"eta": eta, "center": center, "radius": radius},
            a,
            grad,
            c_a,
            support,
        )

    if preset == "strip":
        eta = float(params.pop("eta", 1.0))
        axis = int(params.pop("axis", 0))
        if not 0 <= axis < d:
            raise ValueError(f"axis {axis} out of range for dimension {d}")
        L = lengths[axis]
        width = params.pop("width", None)
        measure = params.pop("measure", None)
        center = float(params.pop("center", 0.5 * L))
        _reject_extras(preset, params)
        if width is None:
            if measure is None:
                raise ValueError("strip needs either width or measure")
            width = float(measure) * L
        width = float(width)
        lo, hi = center - 0.5 * width, center + 0.5 * width
        edge = 0.25 * width
        _check_support((lo,), (hi,), (L,))
        p = plateau(basis.axes[axis], lo, hi, edge)
        dp = plateau_prime(basis.axes[axis], lo, hi, edge)
        shape = [1] * d
        shape[axis] = basis.grid_per_axis
        psi = np.broadcast_to(p.reshape(shape), grid_shape).copy()
        a = eta * psi * psi
        grad = []
        for ax in range(d):
            if ax == axis:
                grad.append(2.0 * eta * psi * np.broadcast_to(dp.reshape(shape), grid_shape))
            else:
                grad.append(np.zeros(grid_shape))
        c_a = 4.0 * eta * (SMOOTHSTEP_MAX_SLOPE / edge) ** 2
        support = width * float(np.prod([lengths[ax] for ax in range(d) if ax != axis]))
        return DampingProfile(
            preset,
            {"eta": eta, "axis": axis, "center": center, "width": width},
            a,
            tuple(grad),
            c_a,
            support,
        )

    if preset == "bump_union":
        eta = float(params.pop("eta", 1.0))
        count = int(params.pop("count"))
        measure = float(params.pop("measure"))
        centers = params.pop("centers", None)
        _reject_extras(preset, params)
        if count < 1 or not 0 < measure <= 1:
            raise ValueError("bump_union needs count >= 1 and measure in (0, 1]")
        volume = basis.domain.volume
        r = 0.5 * (measure * volume / count) ** (1.0 / d)
        if centers is None:
            fracs = (np.arange(count) + 0.5) / count
            centers = [tuple(f * L for L in lengths) for f in fracs]
        else:
            centers = [_axis_tuple(c, d, "center") for c in centers]
            if len(centers) != count:
                raise ValueError("number of centers must equal count")
        a = np.zeros(grid_shape)
        grad = [np.zeros(grid_shape) for _ in range(d)]
        boxes = []
        for c in centers:
            los = tuple(ci - r for ci in c)
            his = tuple(ci + r for ci in c)
            _check_support(los, his, lengths)
            boxes.append((los, his))
            psi, dpsi = _product_bump_fields(basis, los, his, (0.5 * r,) * d)
            a += eta * psi * psi
            for ax in range(d):
                grad[ax] += 2.0 * eta * psi * dpsi[ax]
        per_bump = 4.0 * eta * d * (SMOOTHSTEP_MAX_SLOPE / (0.5 * r)) ** 2
        c_a = per_bump if _disjoint(boxes) else count * per_bump
        return DampingProfile(
            preset,
            {"eta": eta, "count": count, "measure": measure, "centers": centers},
            a,
            tuple(grad),
            c_a,
            measure * volume,
        )

    if preset == "sine_bump":
        eta = float(params.pop("eta", 1.0))
        harmonic = int(params.pop("harmonic", 1))
        _reject_extras(preset, params)
        if harmonic < 1:
            raise ValueError("harmonic must be >= 1")
        p1 = [np.sin(harmonic * np.pi * basis.axes[ax] / lengths[ax]) for ax in range(d)]
        dp1 = [
            (harmonic * np.pi / lengths[ax]) * np.cos(harmonic * np.pi * basis.axes[ax] / lengths[ax])
            for ax in range(d)
        ]
        psi = p1[0]
        for ax in range(1, d):
            psi = np.multiply.outer(psi, p1[ax])
        grads = []
        for ax in range(d):
            g = dp1[0] if ax == 0 else p1[0]
            for bx in range(1, d):
                g = np.multiply.outer(g, dp1[bx] if bx == ax else p1[bx])
            grads.append(g)
        a = eta * psi * psi
        grad = tuple(2.0 * eta * psi * g for g in grads)
        c_a = 4.0 * eta * sum((harmonic * np.pi / L) ** 2 for L in lengths)
        return DampingProfile(
            preset,
            {"eta": eta, "harmonic": harmonic},
            a,
            grad,
            c_a,
            basis.domain.volume,
        )

    if preset == "linear_ramp":
        slope = float(params.pop("slope", 1.0))
        axis = int(params.pop("axis", 0))
        _reject_extras(preset, params)
        if slope < 0:
            raise ValueError("slope must be nonnegative")
        shape = [1] * d
        shape[axis] = basis.grid_per_axis
        a = np.broadcast_to((slope * basis.axes[axis]).reshape(shape), grid_shape).copy()
        grad = [np.zeros(grid_shape) for _ in range(d)]
        grad[axis] = np.full(grid_shape, slope)
        return DampingProfile(
            preset,
            {"slope": slope, "axis": axis},
            a,
            tuple(grad),
            None,
            basis.domain.volume if slope > 0 else 0.0,
        )

    if preset == "grid_file":
        path = params.pop("path")
        _reject_extras(preset, params)
        a = _load_grid_array(path, grid_shape)
        if np.any(a < 0):
            raise ValueError(f"damping grid in {path} has negative values")
        grad = tuple(
            np.gradient(a, basis.axes[ax], axis=ax, edge_order=2) for ax in range(d)
        )
        return DampingProfile(
            preset, {"path": str(path)}, a, grad, None, grid_support_measure(basis, a)
        )

    raise ValueError(f"unknown damping preset {preset!r}")


def _reject_extras(preset, params):
    if params:
        raise ValueError(f"unknown parameters for preset {preset!r}: {sorted(params)}")


def _disjoint(boxes):
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            lo_i, hi_i = boxes[i]
            lo_j, hi_j = boxes[j]
            if all(hi_i[ax] > lo_j[ax] and hi_j[ax] > lo_i[ax] for ax in range(len(lo_i))):
                return False
    return True


def _load_grid_array(path, shape):
    p = str(path)
    if p.endswith(".npy"):
        arr = np.load(p)
    else:
        try:
            arr = np.loadtxt(p, delimiter=",")
        except ValueError:
            arr = np.loadtxt(p)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.size != int(np.prod(shape)):
        raise ValueError(f"grid file {p} has {arr.size} values, expected {np.prod(shape)}")
    return arr.reshape(shape)


def structural_constant_estimate(profile, basis, floor=None):
    """max of |grad a|^2 / a over grid points with a above the floor.

    The floor (default 1e-8 * max a) avoids the 0/0 at the support boundary
    where both sides of the structural inequality vanish.
    """
    if floor is None:
        floor = 1e-8 * float(np.max(profile.a))
    if not floor > 0:
        raise ValueError("floor must be positive")
    mask = profile.a > floor
    if not np.any(mask):
        raise ValueError(f"no grid points with a > {floor}")
    grad_sq = np.zeros_like(profile.a)
    for g in profile.grad:
        grad_sq += g * g
    return float(np.max(grad_sq[mask] / profile.a[mask]))


def assemble_kv_matrix(profile, basis):
    """Dense dissipation matrix K_ij = quadrature of a grad(phi_i).grad(phi_j)."""
    if profile.a.shape != basis.grid_shape:
        raise ValueError(
            f"profile grid {profile.a.shape} does not match basis {basis.grid_shape}"
        )
    n = basis.n_modes
    if n > MAX_DENSE_MODES:
        raise ValueError(f"dense assembly capped at {MAX_DENSE_MODES} modes, got {n}")
    d = basis.domain.dimension
    wa = (basis.weights * profile.a).ravel()
    K = np.zeros((n, n))
    for axis in range(d):
        factors = [
            (basis._dsynth[ax] if ax == axis else basis._synth[ax]).T for ax in range(d)
        ]
        if d == 1:
            B = factors[0]
        elif d == 2:
            B = np.einsum("ax,by->abxy", factors[0], factors[1]).reshape(n, -1)
        else:
            B = np.einsum("ax,by,cz->abcxyz", factors[0], factors[1], factors[2]).reshape(n, -1)
        B = B[basis._flat_pos]
        K += (B * wa) @ B.T
    return 0.5 * (K + K.T)


def dissipation_quadratic_form(K, v):
    """v^T K v: the instantaneous dissipation rate of a velocity field."""
    v = np.asarray(v, dtype=np.float64)
    if K.shape != (v.size, v.size):
        raise ValueError(f"matrix {K.shape} does not match vector length {v.size}")
    return float(v @ (K @ v))
