import numpy as np
import pytest

from entwave.ansatz import (
    AnsatzError,
    MassCoefficients,
    TildeAnsatz,
    build_tilde,
    central_gaussian,
    decompose_integrals,
    gaussian_wave,
    mass_decompose,
    tilde_residual,
)
from entwave.fd import trapz_line
from entwave.gas import solve_endstates
from entwave.grid import ChannelGrid, ConservedField
from entwave.profile import sample_wave, solve_selfsimilar


def wide_line(L=200.0, n=4001):
    x = np.linspace(-L, L, n)
    return x, x[1] - x[0]


class TestGaussianWave:
    def test_unit_mass_quadrature(self, ends, gas):
        # midpoint quadrature over a wide interval
        for t in (0.0, 3.0, 100.0):
            L = 40.0 * np.sqrt(1.0 + t)
            n = 200_000
            h = 2 * L / n
            centers = -L + (np.arange(n) + 0.5) * h
            for which in (1, 3):
                total = np.sum(gaussian_wave(which, ends, gas, centers, t)) * h
                assert abs(total - 1.0) < 1e-10

    def test_peak_position_and_value(self, ends, gas):
        t = 2.5
        lam = ends.lambda1_minus(gas)
        peak = gaussian_wave(1, ends, gas, np.array([lam * (1.0 + t)]), t)[0]
        assert peak == pytest.approx(1.0 / np.sqrt(4.0 * np.pi * (1.0 + t)))

    def test_advection_diffusion_residual_refines(self, ends, gas):
        lam = ends.lambda1_minus(gas)
        errs = []
        for h, dt in ((0.02, 0.002), (0.01, 0.001)):
            x = np.arange(-30.0, 30.0, h)
            t = 1.0
            f = lambda tau: gaussian_wave(1, ends, gas, x, tau)
            dfdt = (f(t + dt) - f(t - dt)) / (2.0 * dt)
            g = f(t)
            dfdx = np.gradient(g, h, edge_order=2)
            d2fdx2 = np.gradient(dfdx, h, edge_order=2)
            resid = dfdt + lam * dfdx - d2fdx2
            errs.append(np.max(np.abs(resid[5:-5])))
        assert np.log2(errs[0] / errs[1]) > 1.8

    def test_which_validated(self, ends, gas):
        with pytest.raises(ValueError):
            gaussian_wave(2, ends, gas, np.zeros(1), 0.0)


class TestMassDecompose:
    def test_zero_rhs(self, ends, gas):
        c = decompose_integrals(np.zeros(3), np.zeros(2), ends, gas)
        assert np.max(np.abs(c.as_array())) < 1e-12

    def test_basis_vector_r1(self, ends, gas):
        c = decompose_integrals(ends.r1_minus(gas), np.zeros(2), ends, gas)
        assert c.acoustic1 == pytest.approx(1.0, abs=1e-12)
        assert abs(c.shift) < 1e-12
        assert abs(c.acoustic3) < 1e-12

    def test_random_rhs_solve_residual(self, ends, gas, rng):
        d = np.array([ends.rho_minus - ends.rho_plus, 0.0, 0.0])
        M = np.column_stack([ends.r1_minus(gas), d, ends.r3_plus(gas)])
        for _ in range(20):
            rhs = rng.normal(size=3)
            c = decompose_integrals(rhs, np.zeros(2), ends, gas)
            theta = np.array([c.acoustic1, c.shift, c.acoustic3])
            assert np.linalg.norm(M @ theta - rhs) < 1e-12 * max(1.0, np.linalg.norm(rhs))

    def test_degenerate_wave_instructs_zero_mass(self, gas):
        flat = solve_endstates(1.0, 1.0, 1.0)
        with pytest.raises(AnsatzError, match="zero-mass"):
            decompose_integrals(np.ones(3), np.zeros(2), flat, gas)

    def test_field_decomposition_recovers_gaussian_masses(self, profile, ends, gas):
        grid = ChannelGrid(80.0, 512, 4, 4)
        bar = sample_wave(profile, ends, gas, grid.x1, 0.0)
        U = np.zeros((5, 512, 4, 4))
        U[0] = bar.rho_bar[:, None, None]
        U[1] = bar.m1_bar[:, None, None]
        U[4] = bar.energy_bar[:, None, None]
        # seed a perturbation equal to 0.3 * r3+ times a unit-mass bump
        bump = np.exp(-grid.x1**2 / 4.0)
        bump /= trapz_line(bump, grid.dx1)
        r3 = ends.r3_plus(gas)
        for j, comp in enumerate([0, 1, 4]):
            U[comp] += 0.3 * r3[j] * bump[:, None, None]
        state = ConservedField(grid, U, 0.0)
        c = mass_decompose(state, profile, ends, gas)
        assert c.acoustic3 == pytest.approx(0.3, abs=1e-9)
        assert abs(c.acoustic1) < 1e-9
        assert abs(c.shift) < 1e-9

    def test_zero_mass_data_gives_zero_coefficients(self, profile, ends, gas):
        # a perturbation with vanishing total integrals leaves the wave as
        # the ansatz (all corrections off)
        grid = ChannelGrid(80.0, 512, 4, 4)
        bar = sample_wave(profile, ends, gas, grid.x1, 0.0)
        U = np.zeros((5, 512, 4, 4))
        U[0] = bar.rho_bar[:, None, None]
        U[1] = bar.m1_bar[:, None, None]
        U[4] = bar.energy_bar[:, None, None]
        dipole = grid.x1 * np.exp(-grid.x1**2 / 4.0)  # odd: zero integral
        for comp in range(5):
            U[comp] += 0.01 * dipole[:, None, None]
        c = mass_decompose(ConservedField(grid, U, 0.0), profile, ends, gas)
        assert np.max(np.abs(c.as_array())) < 1e-12

    def test_non_decaying_tail_rejected(self, profile, ends, gas):
        grid = ChannelGrid(80.0, 512, 4, 4)
        bar = sample_wave(profile, ends, gas, grid.x1, 0.0)
        U = np.zeros((5, 512, 4, 4))
        U[0] = bar.rho_bar[:, None, None] + 0.01
        U[1] = bar.m1_bar[:, None, None]
        U[4] = bar.energy_bar[:, None, None]
        with pytest.raises(AnsatzError, match="decay"):
            mass_decompose(ConservedField(grid, U, 0.0), profile, ends, gas)


class TestBuildTilde:
    def test_zero_coefficients_reduce_to_wave(self, profile, ends, gas):
        x, _ = wide_line()
        for t in (0.0, 5.0):
            tilde = build_tilde(profile, MassCoefficients(), ends, gas, x, t)
            bar = sample_wave(profile, ends, gas, x, t)
            assert np.array_equal(tilde.rho, bar.rho_bar)
            assert np.array_equal(tilde.m1, bar.m1_bar)
            assert np.max(np.abs(tilde.m2)) == 0.0
            assert np.array_equal(tilde.energy, bar.energy_bar)

    def test_transverse_momentum_formula(self, profile, ends, gas):
        x, _ = wide_line()
        c = MassCoefficients(transverse2=0.37, transverse3=-0.11)
        t = 3.0
        tilde = build_tilde(profile, c, ends, gas, x, t)
        expected = 0.37 * np.exp(-(x**2) / (4.0 * (1.0 + t))) / np.sqrt(
            4.0 * np.pi * (1.0 + t)
        )
        assert np.allclose(tilde.m2, expected, rtol=0, atol=1e-15)
        assert np.allclose(tilde.m3, expected * (-0.11 / 0.37), rtol=1e-12)

    def test_initial_excess_mass_removed(self, profile, ends, gas, rng):
        grid = ChannelGrid(120.0, 1024, 4, 4)
        bar = sample_wave(profile, ends, gas, grid.x1, 0.0)
        U = np.zeros((5, 1024, 4, 4))
        U[0] = bar.rho_bar[:, None, None]
        U[1] = bar.m1_bar[:, None, None]
        U[4] = bar.energy_bar[:, None, None]
        bump = np.exp(-grid.x1**2 / 6.0)[:, None, None]
        for comp, amp in zip(range(5), (0.02, 0.011, 0.007, -0.004, 0.015)):
            U[comp] += amp * bump
        state = ConservedField(grid, U, 0.0)
        coeffs = mass_decompose(state, profile, ends, gas)
        tilde = build_tilde(profile, coeffs, ends, gas, grid.x1, 0.0)
        pert = state.U.mean(axis=(2, 3)) - tilde.conserved
        leftover = trapz_line(pert, grid.dx1)
        assert np.max(np.abs(leftover)) < 1e-10

    def test_linearity_in_coefficients(self, profile, ends, gas):
        x, _ = wide_line()
        base = MassCoefficients(0.05, 0.3, -0.02, 0.01, -0.03)
        double = MassCoefficients(0.10, 0.3, -0.04, 0.02, -0.06)
        t = 2.0
        bar = build_tilde(profile, MassCoefficients(shift=0.3), ends, gas, x, t)
        one = build_tilde(profile, base, ends, gas, x, t)
        two = build_tilde(profile, double, ends, gas, x, t)
        # the Gaussian corrections enter the conserved fields linearly
        lhs = two.conserved - bar.conserved
        rhs = 2.0 * (one.conserved - bar.conserved)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_overlarge_coefficients_raise(self, profile, ends, gas):
        x, _ = wide_line()
        with pytest.raises(AnsatzError, match="nonpositive"):
            build_tilde(profile, MassCoefficients(acoustic1=-9.0), ends, gas, x, 0.0)

    def test_gaussian_mass_conservation_over_time(self, ends, gas):
        for t in (0.0, 12.5, 100.0):
            L = 40.0 * np.sqrt(1.0 + t)
            n = 100_000
            h = 2 * L / n
            x = -L + (np.arange(n) + 0.5) * h
            total = np.sum(gaussian_wave(3, ends, gas, x, t)) * h
            assert abs(total - 1.0) < 1e-10
            total0 = np.sum(central_gaussian(x, t)) * h
            assert abs(total0 - 1.0) < 1e-10


class TestTildeResidual:
    def test_zero_strength_zero_coeffs_vanishes(self, gas):
        flat = solve_endstates(1.0, 1.0, 1.0)
        prof = solve_selfsimilar(flat, gas)
        ansatz = TildeAnsatz(prof, MassCoefficients(), flat, gas)
        x = np.linspace(-50.0, 50.0, 1001)
        rep = tilde_residual(ansatz, gas, x, [0.0, 1.0, 10.0], c_envelope=0.2)
        for H in rep["h_fields"]:
            assert np.max(np.abs(H)) < 1e-10

    def test_zero_coeffs_match_profile_errors(self, profile, ends, gas):
        from entwave.profile import closed_form_errors

        ansatz = TildeAnsatz(profile, MassCoefficients(), ends, gas)
        x = np.linspace(-80.0, 80.0, 4001)
        t = 5.0
        rep = tilde_residual(ansatz, gas, x, [t])
        H = rep["h_fields"][0]
        q1, q2 = closed_form_errors(profile, ends, gas, x, t)
        assert np.max(np.abs(H[1] - q1)) < 2e-7
        assert np.max(np.abs(H[4] - q2)) < 2e-7
        assert np.max(np.abs(H[0])) < 5e-8

    def test_normalized_sup_bounded_and_scales(self, profile, ends, gas):
        x = np.linspace(-250.0, 250.0, 4001)
        times = np.unique(np.geomspace(1.0, 101.0, 13) - 1.0)
        sups = {}
        for scale in (1.0, 2.0):
            c = MassCoefficients(0.01 * scale, 0.0, 0.02 * scale,
                                 0.005 * scale, -0.01 * scale)
            ansatz = TildeAnsatz(profile, c, ends, gas)
            rep = tilde_residual(ansatz, gas, x, times)
            sup = np.asarray(rep["normalized_sup"])
            # bounded uniformly: each doubled time window stays within 2x
            # of the previous one
            for lo, hi in ((0.0, 12.5), (12.5, 25.0), (25.0, 50.0), (50.0, 100.0)):
                prev = sup[times <= lo] if lo > 0 else sup[:1]
                cur = sup[(times > lo) & (times <= hi)]
                if cur.size and prev.size:
                    assert cur.max() < 2.0 * prev.max()
            sups[scale] = sup.max()
        # linear response in the total correction size delta + sum|coeffs|
        size1 = ends.delta + 0.045
        size2 = ends.delta + 0.09
        ratio = sups[2.0] / sups[1.0]
        assert ratio == pytest.approx(size2 / size1, rel=0.2)
