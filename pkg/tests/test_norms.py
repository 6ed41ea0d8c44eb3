"""Spatial and mixed space-time norms, bootstrap root finding."""

import numpy as np
import pytest
from scipy.optimize import brentq

from kvwave.basis import Domain, build_basis, from_spectral
from kvwave.dynamics import SchemeConfig, State, Trajectory
from kvwave.norms import (
    MixedNormAccumulator,
    bootstrap_monitor,
    bootstrap_root,
    lp_norm,
    mixed_norm,
)


@pytest.fixture(scope="module")
def basis():
    return build_basis(Domain((np.pi,)), 16, 128)


def make_trajectory(basis, times, mode_amps):
    """Trajectory whose states are g(t) * phi_1 with given amplitudes."""
    n = basis.n_modes
    states = []
    for t, amp in zip(times, mode_amps):
        u = np.zeros(n)
        u[0] = amp
        states.append(State(u, np.zeros(n), t))
    times = np.asarray(times, dtype=np.float64)
    z = np.zeros_like(times)
    return Trajectory(
        times=times, states=states, E=z, Y=z, d=z, D=z, usup=z, lp10=z, lp12=z,
        split={}, basis=basis, trunc=None, K=np.zeros((n, n)),
        cfg=SchemeConfig(dt=1.0), sample_every=1,
    )


def test_lp_norm_constant(basis):
    f = np.ones(basis.grid_shape)
    for p in (1.0, 2.0, 6.0, 10.0):
        assert lp_norm(f, basis, p) == pytest.approx(np.pi ** (1.0 / p), rel=1e-12)
    assert lp_norm(f, basis, np.inf) == 1.0


def test_lp_norm_zero_and_mode(basis):
    assert lp_norm(np.zeros(basis.grid_shape), basis, 4.0) == 0.0
    e = np.zeros(basis.n_modes)
    e[0] = 1.0
    grid = from_spectral(e, basis)
    assert lp_norm(grid, basis, 2.0) == pytest.approx(1.0, abs=1e-12)


def test_lp_norm_invalid_p(basis):
    with pytest.raises(ValueError):
        lp_norm(np.ones(basis.grid_shape), basis, 0.5)


def test_holder_monotonicity(basis):
    rng = np.random.default_rng(2)
    vol = np.pi
    for _ in range(20):
        c = rng.standard_normal(basis.n_modes)
        f = from_spectral(c, basis)
        for p1, p2 in ((1.0, 2.0), (2.0, 6.0), (6.0, 10.0)):
            lhs = lp_norm(f, basis, p1)
            rhs = vol ** (1.0 / p1 - 1.0 / p2) * lp_norm(f, basis, p2)
            assert lhs <= rhs * (1 + 1e-12)


def test_lp_quadrature_second_order():
    errs = []
    for G in (64, 128):
        b = build_basis(Domain((np.pi,)), 16, G)
        f = np.exp(np.sin(3 * b.axes[0]))
        errs.append(lp_norm(f, b, 3.0))
    ref_b = build_basis(Domain((np.pi,)), 16, 2048)
    ref = lp_norm(np.exp(np.sin(3 * ref_b.axes[0])), ref_b, 3.0)
    assert abs(errs[0] - ref) / abs(errs[1] - ref) == pytest.approx(4.0, rel=0.3)


def test_mixed_norm_zero(basis):
    times = np.linspace(0.0, 1.0, 11)
    traj = make_trajectory(basis, times, np.zeros(11))
    assert mixed_norm(traj, 5.0, 10.0) == 0.0


def test_mixed_norm_separable_oracle(basis):
    times = np.linspace(0.0, 2.0, 41)
    g = np.cos(times) ** 2 + 0.3
    traj = make_trajectory(basis, times, g)
    e = np.zeros(basis.n_modes)
    e[0] = 1.0
    phi_norm = lp_norm(from_spectral(e, basis), basis, 10.0)
    for q in (1.0, 4.0, 5.0):
        oracle = phi_norm * np.trapezoid(g**q, times) ** (1.0 / q)
        assert mixed_norm(traj, q, 10.0) == pytest.approx(oracle, rel=1e-12)
    assert mixed_norm(traj, np.inf, 10.0) == pytest.approx(phi_norm * np.max(g), rel=1e-12)


def test_mixed_norm_prefix_monotone(basis):
    times = np.linspace(0.0, 3.0, 31)
    g = np.abs(np.sin(times)) + 0.1
    vals = []
    for upto in (11, 21, 31):
        traj = make_trajectory(basis, times[:upto], g[:upto])
        vals.append(mixed_norm(traj, 5.0, 10.0))
    assert vals[0] <= vals[1] <= vals[2]


def test_accumulator_matches_mixed_norm(basis):
    times = np.linspace(0.0, 1.0, 21)
    g = 1.0 + 0.5 * np.sin(7 * times)
    traj = make_trajectory(basis, times, g)
    acc = MixedNormAccumulator(q=5.0, p=10.0)
    for t, s in zip(times, traj.states):
        acc.add(t, lp_norm(from_spectral(s.u, basis), basis, 10.0))
    assert acc.value == pytest.approx(mixed_norm(traj, 5.0, 10.0), rel=1e-14)
    with pytest.raises(ValueError):
        acc.add(0.5, 1.0)  # non-increasing time


def test_bootstrap_root_cases():
    assert bootstrap_root(0.0, 1.0) == 0.0
    r = bootstrap_root(0.1, 1.0)
    oracle = brentq(lambda x: x - x**5 - 0.1, 0.0, (1.0 / 5.0) ** 0.25)
    assert r == pytest.approx(oracle, rel=1e-10)
    assert r < (1.0 / 5.0) ** 0.25
    assert bootstrap_root(10.0, 1.0) is None
    with pytest.raises(ValueError):
        bootstrap_root(-1.0, 1.0)


def test_bootstrap_monitor_zero_solution(basis):
    times = np.linspace(0.0, 1.0, 11)
    traj = make_trajectory(basis, times, np.zeros(11))
    rep = bootstrap_monitor(traj, 0.1, 1.0)
    assert rep.stays_below
    assert not rep.forbidden_region_absent
    assert np.all(rep.X == 0.0)


def test_bootstrap_monitor_forbidden_region_absent(basis):
    times = np.linspace(0.0, 1.0, 11)
    traj = make_trajectory(basis, times, np.ones(11))
    rep = bootstrap_monitor(traj, 10.0, 1.0)
    assert rep.forbidden_region_absent
    assert rep.root is None


def test_bootstrap_monitor_degenerate_root(basis):
    times = np.linspace(0.0, 1.0, 11)
    traj = make_trajectory(basis, times, np.full(11, 0.5))
    rep = bootstrap_monitor(traj, 0.0, 1.0)
    assert rep.root == 0.0
    assert not rep.stays_below  # any nonzero norm exits immediately
