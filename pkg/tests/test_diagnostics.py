"""Diagnostics tests: vector fields, Sobolev/weighted norms, band series,
rate fitting, and the Klainerman-Sobolev constant sampling.
"""

import numpy as np
import pytest

from kgz2d.diagnostics import (envelope_value, fit_rate,
                               klainerman_sobolev_ratio, sobolev_norm,
                               vectorfield_apply, weighted_l2, zk_series)
from kgz2d.propagators import T0, free_kg_evolve
from kgz2d.spectral import SpectralGrid


@pytest.fixture(scope="module")
def grid():
    return SpectralGrid(L=12.0, N=64)


class TestVectorFields:
    def test_rotation_kills_radial(self, grid):
        u = np.exp(-(grid.X1**2 + grid.X2**2) / 3.0)
        out = vectorfield_apply((grid, 2.0, u, np.zeros_like(u)), "omega")
        assert np.max(np.abs(out)) < 1e-10

    def test_boost_of_travelling_wave(self, grid):
        # l = cos(k x1 - |k| t) solves the free wave equation; L1 of it is
        # (x1 |k| - t k) sin(...) in closed form
        k = grid.xi[3]
        t = 2.5
        phase = k * grid.X1 - abs(k) * t
        u = np.cos(phase)
        udot = abs(k) * np.sin(phase)
        got = vectorfield_apply((grid, t, u, udot), "l1")
        exact = (grid.X1 * abs(k) + t * k) * np.sin(phase) * np.sign(1.0)
        exact = grid.X1 * abs(k) * np.sin(phase) + t * k * np.sin(phase)
        assert np.max(np.abs(got - exact)) < 1e-8 * np.max(np.abs(exact))

    def test_commutator_d1_omega(self, grid):
        rng = np.random.default_rng(21)
        u = np.real(grid.inverse_c(grid.dealias(
            grid.forward(rng.standard_normal((64, 64))), 0.25)))
        z = np.zeros_like(u)
        d1_omega = grid.derivative(vectorfield_apply((grid, 0.0, u, z), "omega"), 0)
        omega_d1 = vectorfield_apply((grid, 0.0, grid.derivative(u, 0), z), "omega")
        d2u = grid.derivative(u, 1)
        assert np.max(np.abs(d1_omega - omega_d1 - d2u)) < 1e-9 * np.max(np.abs(d2u))

    def test_unknown_field_rejected(self, grid):
        with pytest.raises(ValueError):
            vectorfield_apply((grid, 0.0, np.zeros((64, 64)), np.zeros((64, 64))), "l3")


class TestNorms:
    def test_zero(self, grid):
        assert sobolev_norm(grid, np.zeros((64, 64)), 3) == 0.0

    def test_gaussian_l2(self, grid):
        u = np.exp(-(grid.X1**2 + grid.X2**2) / 2.0)
        assert abs(sobolev_norm(grid, u, 0) ** 2 - np.pi) < 1e-10

    def test_single_mode_hs(self, grid):
        xi1 = grid.xi[4]
        u = np.cos(xi1 * grid.X1)
        br = np.sqrt(1.0 + xi1**2)
        # |u_hat| = (2L)^2/2 on two modes; H^s norm = <xi1>^s (2L)/sqrt(2)
        for s in (0, 2, 5):
            expect = br**s * (2.0 * grid.L) / np.sqrt(2.0)
            assert sobolev_norm(grid, u, s) == pytest.approx(expect, rel=1e-12)

    def test_negative_order_rejected(self, grid):
        with pytest.raises(ValueError):
            sobolev_norm(grid, np.zeros((64, 64)), -1)

    def test_weighted_l2_constant_weight_limit(self, grid):
        u = np.exp(-(grid.X1**2 + grid.X2**2))
        assert weighted_l2(grid, u, 0.0, 0.0) == pytest.approx(grid.norm_phys(u))

    def test_envelope_weights(self, grid):
        u = np.zeros((64, 64))
        u[32, 32] = 2.0  # x = 0 there
        t = 3.0
        assert envelope_value(grid, t, u, "one") == 2.0
        assert envelope_value(grid, t, u, "kg") == pytest.approx(2.0 * np.sqrt(1 + t**2))
        wave = 2.0 * (1 + t**2) ** 0.25 * (1 + t**2) ** 0.25
        assert envelope_value(grid, t, u, "wave") == pytest.approx(wave)


class TestBandSeries:
    def test_zero_field(self, grid):
        out = zk_series(grid, [[np.zeros((64, 64), dtype=complex)]], 0, 0.1, -0.1)
        assert np.all(out == 0.0)

    def test_plus_minus_band_norms_agree(self, grid):
        rng = np.random.default_rng(22)
        e = rng.standard_normal((64, 64))
        edot = rng.standard_normal((64, 64))
        br = grid.xi_bracket
        t = 2.0
        fp = np.exp(1j * t * br) * (grid.forward(edot) - 1j * br * grid.forward(e))
        fm = np.exp(-1j * t * br) * (grid.forward(edot) + 1j * br * grid.forward(e))
        for k in (-2, 0, 1):
            a = zk_series(grid, [[fp]], k, 0.1, -0.1)[0]
            b = zk_series(grid, [[fm]], k, 0.1, -0.1)[0]
            assert a == pytest.approx(b, rel=1e-12)

    def test_band_sum_reconstructs_within_lp_factor(self, grid):
        rng = np.random.default_rng(23)
        spec = grid.forward(rng.standard_normal((64, 64)))
        spec[0, 0] = 0.0
        total = (grid.norm_spec(spec) / (2 * np.pi)) ** 2
        bands = sum((zk_series(grid, [[spec]], k, 1e-9, -1e-9)[0]) ** 2
                    for k in grid.lp_band_range())
        assert 0.25 * total <= bands <= 1.0 * total * (1 + 1e-12)

    def test_exponent_signs_enforced(self, grid):
        with pytest.raises(ValueError):
            zk_series(grid, [[np.zeros((64, 64), dtype=complex)]], 0, -0.1, -0.1)


class TestFitRate:
    def test_exact_power(self):
        t = np.geomspace(1.0, 100.0, 20)
        (alpha, _), resid = fit_rate(t, 3.0 * t**-1.0, "power")
        assert abs(alpha + 1.0) < 1e-12 and resid < 1e-12

    def test_exact_log(self):
        t = np.geomspace(1.0, 50.0, 16)
        (a, b), resid = fit_rate(t, 3.0 + 2.0 * np.log(t), "log")
        assert a == pytest.approx(3.0, abs=1e-12)
        assert b == pytest.approx(2.0, abs=1e-12)

    def test_span_precondition(self):
        t = np.linspace(1.0, 4.0, 20)
        with pytest.raises(ValueError):
            fit_rate(t, t, "power")

    def test_degenerate_values(self):
        t = np.geomspace(1.0, 100.0, 12)
        with pytest.raises(ValueError):
            fit_rate(t, 0.0 * t, "power")

    def test_free_kg_supnorm_rate(self):
        # stationary-phase decay of the 2D Klein-Gordon flow from localized
        # data, measured from the exact propagator over t in [8, 64]
        g = SpectralGrid(L=80.0, N=384)
        r2 = g.X1**2 + g.X2**2
        gauss = np.exp(-r2 / (2.0 * 1.5**2))
        v0 = g.forward(gauss)
        v1 = g.forward(g.inverse(g.xi_bracket * v0) * 0.0)
        times = np.geomspace(8.0, 64.0, 10)
        sup = []
        for t in times:
            vh, _ = free_kg_evolve(g, v0, v1, t)
            sup.append(float(np.max(np.abs(g.inverse(vh)))))
        (alpha, _), _ = fit_rate(times, np.asarray(sup), "power")
        assert abs(alpha + 1.0) < 0.1


class TestKlainermanSobolev:
    def test_constant_stable_under_refinement(self):
        rng = np.random.default_rng(24)
        ratios = {}
        for n in (64, 128):
            g = SpectralGrid(L=16.0, N=n)
            vals = []
            for _ in range(20):
                cx, cy = rng.uniform(-2, 2, 2)
                w = rng.uniform(1.0, 2.5)
                kx, ky = rng.uniform(-1.5, 1.5, 2)
                r2 = (g.X1 - cx) ** 2 + (g.X2 - cy) ** 2
                u = np.exp(-r2 / (2 * w**2)) * np.cos(kx * g.X1 + ky * g.X2)
                udot = -0.3 * np.exp(-r2 / (2 * w**2)) * np.sin(kx * g.X1)
                t = rng.uniform(1.5, 4.0)
                u_l0 = t * udot + g.X1 * g.derivative(u, 0) + g.X2 * g.derivative(u, 1)
                vals.append(klainerman_sobolev_ratio(g, t, u, udot, u_l0))
            ratios[n] = max(vals)
            rng = np.random.default_rng(24)  # same corpus on both grids
        assert 0.5 <= ratios[128] / ratios[64] <= 2.0
