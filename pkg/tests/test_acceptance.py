"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. Tolerances are fixed here, not calibrated at run time.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.integrate import quad

from kvwave.basis import (
    Domain,
    build_basis,
    from_spectral,
    h1_norm,
    to_spectral,
)
from kvwave.cli import main
from kvwave.damping import assemble_kv_matrix, make_profile
from kvwave.dynamics import SchemeConfig, State, run
from kvwave.multipliers import bernstein_ratio, project_high, project_low, reverse_bernstein_ratio
from kvwave.nonlinearity import Truncation
from kvwave.verify import (
    check_bernoulli_bound,
    commutator_operator_norm,
    commutator_scan,
    fit_decay,
    stability_probe,
    tail_scan,
    truncation_convergence,
)


@contextmanager
def criterion(number, name, budget_seconds):
    start = time.monotonic()
    yield
    elapsed = time.monotonic() - start
    assert elapsed < budget_seconds, f"criterion {number} exceeded {budget_seconds}s ({elapsed:.1f}s)"
    print(f"ACCEPTANCE {number:02d} {name}: PASS ({elapsed:.2f}s / budget {budget_seconds:.0f}s)")


def modal_oracle(lam, alpha, g0, t):
    t = np.asarray(t, dtype=np.float64)
    zeta = 0.5 * alpha * lam
    disc = zeta * zeta - lam
    if disc < 0:
        om = np.sqrt(-disc)
        return np.exp(-zeta * t) * (g0 * np.cos(om * t) + (zeta * g0 / om) * np.sin(om * t))
    r1 = -zeta + np.sqrt(disc)
    r2 = -zeta - np.sqrt(disc)
    A = (-r2 * g0) / (r1 - r2)
    return A * np.exp(r1 * t) + (g0 - A) * np.exp(r2 * t)


def decay_data(basis, seed, exponent, amplitude):
    rng = np.random.default_rng(seed)
    u0 = rng.standard_normal(basis.n_modes) * basis.eigenvalues ** (-0.5 * exponent)
    return u0 * (amplitude / h1_norm(u0, basis))


def test_criterion_01_truncation_suite():
    with criterion(1, "truncation lemma properties", 5.0):
        rng = np.random.default_rng(1)
        n = 100_000
        for k in (1.0, 2.0, 5.0, 10.0):
            tr = Truncation(k)
            s = rng.uniform(-10 * k, 10 * k, n)
            f = tr.f(s)
            # (ii) sign preservation and (iii) domination
            assert np.all(s * f >= 0.0)
            assert np.all(np.abs(f) <= np.abs(s) ** 5 + 8 * np.spacing(np.abs(f)))
            # (i) global Lipschitz bound over random pairs
            s2 = rng.uniform(-10 * k, 10 * k, n)
            f2 = tr.f(s2)
            slack = 8 * np.spacing(np.maximum(np.abs(f), np.abs(f2)))
            assert np.all(np.abs(f2 - f) <= 5 * k**4 * np.abs(s2 - s) + slack)
            assert np.all(np.abs(tr.f_prime(s)) <= 5 * k**4 * (1 + 1e-15))
            # (iv) exact quintic once the level clears the compact set
            compact = rng.uniform(-0.8 * k, 0.8 * k, n)
            assert np.array_equal(tr.f(compact), ((compact * compact) * (compact * compact)) * compact)
            # derivative against central differences, relative 1e-6.
            # The step scales with the point so the O(h^2) truncation error
            # stays relatively small; the knot band is excluded (f'' jumps,
            # f is C^1 there) and near s = 0 the comparison floors at 1e-8
            # of the Lipschitz scale, where "relative" loses meaning.
            sd = s[:20_000]
            h = 1e-4 * np.maximum(np.abs(sd), 1e-2 * k)
            sd = sd[np.abs(np.abs(sd) - k) > 2 * h]
            h = 1e-4 * np.maximum(np.abs(sd), 1e-2 * k)
            fd = (tr.f(sd + h) - tr.f(sd - h)) / (2 * h)
            fp = tr.f_prime(sd)
            scale = np.maximum(np.abs(fp), 5 * k**4 * 1e-8)
            assert np.max(np.abs(fd - fp) / scale) <= 1e-6
            # antiderivative against quadrature of f (F is even; the
            # integral is split at the knot so each piece is polynomial
            # and the quadrature is exact to roundoff)
            for s_val in np.concatenate([rng.uniform(-3 * k, 3 * k, 20), [k, -k, 0.0]]):
                a = min(abs(s_val), k)
                val, _ = quad(tr.f, 0.0, a, epsabs=1e-13, epsrel=1e-13)
                if abs(s_val) > k:
                    tail, _ = quad(tr.f, a, abs(s_val), epsabs=1e-13, epsrel=1e-13)
                    val += tail
                assert tr.F(s_val) == pytest.approx(val, abs=1e-8)


def _mode_synthesis_matrix(basis):
    factors = [basis._synth[ax].T for ax in range(basis.domain.dimension)]
    d = basis.domain.dimension
    if d == 1:
        S = factors[0]
    elif d == 2:
        S = np.einsum("ax,by->abxy", factors[0], factors[1]).reshape(basis.n_modes, -1)
    else:
        S = np.einsum("ax,by,cz->abcxyz", *factors).reshape(basis.n_modes, -1)
    return S[basis._flat_pos]


@pytest.mark.parametrize("dim,M", [(1, 64), (2, 16), (3, 8)])
def test_criterion_02_basis_fidelity(dim, M):
    with criterion(2, f"basis fidelity d={dim} M={M}", 30.0):
        b = build_basis(Domain((np.pi,) * dim), M, 4 * M)
        S = _mode_synthesis_matrix(b)
        gram = (S * b.weights.ravel()) @ S.T
        assert np.max(np.abs(gram - np.eye(b.n_modes))) <= 1e-12

        from kvwave.basis import gradient_on_grid, integrate

        rng = np.random.default_rng(2)
        for _ in range(3):
            c = rng.standard_normal(b.n_modes)
            assert np.max(np.abs(to_spectral(from_spectral(c, b), b) - c)) <= 1e-12
            spectral = float(np.sum(b.eigenvalues * c * c))
            quad_sq = sum(integrate(g * g, b) for g in gradient_on_grid(c, b))
            assert quad_sq == pytest.approx(spectral, rel=1e-10)


def test_criterion_03_modal_oracle():
    with criterion(3, "damped modal oracle", 10.0):
        b = build_basis(Domain((np.pi,)), 3, 16)
        amp = 0.01  # trapezoid phase error at lam=9, t=10 pins amplitude <= 0.04
        for alpha in (0.0, 0.1, 1.0):
            K = assemble_kv_matrix(make_profile(b, "constant", alpha=alpha), b)
            for lam in (1.0, 9.0):
                j = int(np.sqrt(lam)) - 1
                u0 = np.zeros(3)
                u0[j] = amp
                traj = run(State(u0, np.zeros(3)), K, b, None, SchemeConfig(dt=1e-3), 10.0, sample_every=20)
                numeric = np.array([s.u[j] for s in traj.states])
                exact = modal_oracle(lam, alpha, amp, traj.times)
                assert np.max(np.abs(numeric - exact)) <= 1e-6


def test_criterion_04_energy_identity():
    with criterion(4, "energy identity and dt-halving", 120.0):
        b = build_basis(Domain((np.pi,)), 64, 256)
        prof = make_profile(b, "squared_bump", eta=1.0, center=np.pi / 2, radius=0.8)
        K = assemble_kv_matrix(prof, b)
        tr = Truncation(10.0)
        u0 = decay_data(b, 1234, 3.0, 1.0)
        residuals = []
        for dt in (1e-3, 5e-4):
            traj = run(State(u0, np.zeros(64)), K, b, tr, SchemeConfig(dt=dt), 20.0, sample_every=200)
            residuals.append(float(np.max(np.abs(traj.E + traj.D - traj.E[0])) / traj.E[0]))
        assert residuals[0] <= 1e-5
        ratio = residuals[0] / residuals[1]
        assert 3.5 <= ratio <= 4.5
        print(f"    residual {residuals[0]:.3e}, halving ratio {ratio:.2f}")


def test_criterion_05_bernstein_suites():
    with criterion(5, "projector norm bounds", 30.0):
        b = build_basis(Domain((np.pi,)), 64, 256)
        rng = np.random.default_rng(5)
        thresholds = (2.0, 4.0, 8.0, 16.0, 32.0)
        worst_low, worst_high = 0.0, 0.0
        for _ in range(1000):
            c = rng.standard_normal(b.n_modes)
            for N in thresholds:
                worst_low = max(worst_low, bernstein_ratio(c, b, N))
                worst_high = max(worst_high, reverse_bernstein_ratio(c, b, N))
        assert worst_low <= 2.0
        assert worst_high <= 1.0
        print(f"    max ratios: low {worst_low:.4f} (<=2), high {worst_high:.4f} (<=1)")


def test_criterion_06_partition_identity():
    with criterion(6, "bitwise partition", 5.0):
        b = build_basis(Domain((np.pi,)), 64, 256)
        rng = np.random.default_rng(6)
        for _ in range(1000):
            c = rng.standard_normal(b.n_modes) * 10 ** rng.uniform(-3, 3)
            for N in (2.0, 5.5, 16.0, 48.0):
                assert np.array_equal(project_low(c, b, N) + project_high(c, b, N), c)


def test_criterion_07_commutator_uniformity():
    with criterion(7, "commutator N-uniformity", 300.0):
        b = build_basis(Domain((2 * np.pi,)), 256, 1024)
        prof = make_profile(b, "sine_bump", eta=1.0)
        rep = commutator_scan(prof, b, [4.0, 8.0, 16.0, 32.0, 64.0], probes=8, seed=7)
        assert rep.passed
        assert rep.measured["slope"] <= 0.1
        # constant coefficient: exact zeros
        const = make_profile(b, "constant", alpha=1.0)
        rep0 = commutator_scan(const, b, [4.0, 8.0, 16.0, 32.0, 64.0], probes=2, seed=7)
        assert rep0.measured["norms"] == [0.0] * 5
        # doubling the gradient doubles the norms
        prof2 = make_profile(b, "sine_bump", eta=2.0)
        n1 = commutator_operator_norm(prof, b, 16.0, probes=8, seed=7)
        n2 = commutator_operator_norm(prof2, b, 16.0, probes=8, seed=7)
        assert n2 / n1 == pytest.approx(2.0, rel=0.15)
        print(f"    norms {['%.3f' % v for v in rep.measured['norms']]}, slope {rep.measured['slope']:.3f}")


def test_criterion_08_tail_vanishing():
    with criterion(8, "data tail vanishing", 10.0):
        b = build_basis(Domain((np.pi,)), 64, 256)
        thresholds = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
        lam = b.eigenvalues
        rng = np.random.default_rng(8)
        families = [
            (1.0 / lam, np.zeros(64)),
            (rng.standard_normal(64) * lam**-1.0, rng.standard_normal(64) * lam**-0.5),
            (np.eye(64)[3], np.eye(64)[5]),
        ]
        for u0, u1 in families:
            rep = tail_scan(u0, u1, b, thresholds)
            assert rep.passed
            assert rep.measured["tails"][-1] == 0.0


def test_criterion_09_exponential_decay():
    with criterion(9, "exponential decay under strip damping", 300.0):
        b = build_basis(Domain((np.pi,)), 64, 256)
        tr = Truncation(10.0)
        u0 = decay_data(b, 7, 3.0, 1.0)
        gammas = {}
        for measure in (0.2, 0.05):
            prof = make_profile(b, "strip", eta=1.0, measure=measure, center=0.6 * np.pi)
            K = assemble_kv_matrix(prof, b)
            traj = run(State(u0, np.zeros(64)), K, b, tr, SchemeConfig(dt=2e-3), 40.0, sample_every=50)
            fit = fit_decay(traj)
            gammas[measure] = fit
            if measure == 0.2:
                assert fit.gamma > 0 and fit.r_squared >= 0.95
            else:
                assert fit.gamma > 0  # smaller rate, recorded
        assert gammas[0.05].gamma < gammas[0.2].gamma
        print(
            "    gamma(0.20)={:.4f} R2={:.4f}; gamma(0.05)={:.4f} R2={:.4f}".format(
                gammas[0.2].gamma, gammas[0.2].r_squared, gammas[0.05].gamma, gammas[0.05].r_squared
            )
        )


def test_criterion_10_bernoulli_bound():
    with criterion(10, "strong-energy calibration stability", 180.0):
        trajs = []
        c_a = None
        for M in (32, 64):
            b = build_basis(Domain((np.pi,)), M, 4 * M)
            prof = make_profile(b, "sine_bump", eta=1.0)
            c_a = prof.structural_constant
            K = assemble_kv_matrix(prof, b)
            u0 = np.zeros(b.n_modes)
            u0[0] = 2.5
            u0[1] = -2.5 / 3
            u0[2] = 2.5 / 4
            trajs.append(
                run(State(u0, np.zeros(b.n_modes)), K, b, Truncation(10.0), SchemeConfig(dt=1e-3), 3.0, sample_every=10)
            )
        rep = check_bernoulli_bound(trajs, c_a, stability_tol=0.10)
        assert rep.passed
        assert rep.measured["c1"] > 0.0
        assert all(r < 0.10 for r in rep.measured["rel_changes"])
        print(
            "    C1 per M: {}, barrier peak ratio {:.4f}".format(
                ["%.5f" % c for c in rep.measured["c1_per_trajectory"]],
                rep.measured["barrier_max_ratio"],
            )
        )


def test_criterion_11_truncation_convergence():
    with criterion(11, "truncation-level convergence", 180.0):
        b = build_basis(Domain((np.pi,)), 32, 128)
        prof = make_profile(b, "squared_bump", eta=1.0, center=np.pi / 2, radius=0.8)
        K = assemble_kv_matrix(prof, b)
        small = np.zeros(b.n_modes)
        small[0] = 0.5  # orbit sup-norm stays below 1
        rep = truncation_convergence(
            State(small, np.zeros(b.n_modes)), K, b, SchemeConfig(dt=1e-3), [2.0, 4.0, 8.0], 5.0, sample_every=10
        )
        assert rep.passed
        assert rep.measured["identical_pairs"] == [True, True]
        assert not any(rep.measured["truncation_active"])

        large = np.zeros(b.n_modes)
        large[0] = 3.0
        rep2 = truncation_convergence(
            State(large, np.zeros(b.n_modes)), K, b, SchemeConfig(dt=1e-3), [1.0, 2.0, 4.0, 8.0], 5.0, sample_every=10
        )
        assert rep2.passed
        diffs = rep2.measured["sup_diffs"]
        assert diffs[0] > 0
        assert all(later <= earlier for earlier, later in zip(diffs[:-1], diffs[1:]))
        print(f"    active-regime successive sup diffs: {['%.3e' % d for d in diffs]}")


def test_criterion_12_stability_probe():
    with criterion(12, "difference-energy scaling", 120.0):
        b = build_basis(Domain((np.pi,)), 32, 128)
        prof = make_profile(b, "squared_bump", eta=1.0, center=np.pi / 2, radius=0.8)
        K = assemble_kv_matrix(prof, b)
        u0 = decay_data(b, 12, 3.0, 1.0)
        rep = stability_probe(
            State(u0, np.zeros(b.n_modes)), K, b, Truncation(10.0), SchemeConfig(dt=1e-3), 1e-3, 5.0, sample_every=10
        )
        assert rep.passed
        assert rep.measured["E_w0_ratio"] == pytest.approx(4.0, rel=0.05)
        r1, r2 = rep.measured["growth_rates"]
        assert abs(r1 - r2) <= 0.10 * max(abs(r1), abs(r2), 1e-3)
        print(f"    E_w(0) ratio {rep.measured['E_w0_ratio']:.6f}, rates {r1:.4f}/{r2:.4f}")


ACCEPT_CFG = """\
domain.dimension = 1
domain.edge_lengths = 3.141592653589793
basis.modes_per_axis = 32
damping.preset = squared_bump
damping.eta = 1.0
damping.center = 1.5707963267948966
damping.radius = 0.8
truncation.k = 10.0
initial.preset = random_h1
initial.seed = 99
initial.decay = 3.0
initial.amplitude = 1.0
scheme.dt = 0.001
run.T = 2.0
run.sample_every = 20
run.N_list = 4, 8, 16
checks.run = structural, partition, tail, frequency_split
"""


def test_criterion_13_determinism(tmp_path):
    with criterion(13, "bitwise-identical reruns", 120.0):
        cfg = tmp_path / "accept.cfg"
        cfg.write_text(ACCEPT_CFG)
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
            assert main(["verify", "--config", str(cfg), "--out", str(out / "checks")]) == 0
            outs.append(out)
        csvs = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*.csv"))
        assert csvs, "no CSV outputs found"
        for rel in csvs:
            assert (outs[0] / rel).read_bytes() == (outs[1] / rel).read_bytes(), rel
