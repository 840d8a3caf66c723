"""Spectral-core tests: transform conventions, multipliers, Littlewood-Paley
filters, the time-dependent low/high split, and dealiasing.

Expected values marked as oracle-derived are computed here by direct
summation / convolution, independent of the FFT path under test.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgz2d.spectral import SpectralGrid, band_cutoff, band_cutoff_le, smooth_bump


@pytest.fixture(scope="module")
def grid():
    return SpectralGrid(L=12.0, N=64)


class TestGridInvariants:
    def test_rejects_odd_or_small_n(self):
        with pytest.raises(ValueError):
            SpectralGrid(L=10.0, N=17)
        with pytest.raises(ValueError):
            SpectralGrid(L=10.0, N=8)
        with pytest.raises(ValueError):
            SpectralGrid(L=-1.0, N=32)

    def test_frequency_lattice_symmetric(self, grid):
        xi = np.sort(grid.xi)
        # every xi except the Nyquist row has its negative present
        for v in grid.xi:
            if abs(v + np.pi * grid.N / (2 * grid.L)) < 1e-12:
                continue  # Nyquist
            assert np.any(np.abs(grid.xi + v) < 1e-12)
        assert xi[0] == pytest.approx(-np.pi / grid.L * (grid.N // 2))

    def test_shape_mismatch_rejected(self, grid):
        with pytest.raises(ValueError):
            grid.forward(np.zeros((32, 32)))
        with pytest.raises(ValueError):
            grid.inverse(np.zeros((32, 32), dtype=complex))


class TestTransforms:
    def test_zero_field(self, grid):
        assert np.all(grid.forward(np.zeros((64, 64))) == 0)

    def test_roundtrip_random(self, grid):
        rng = np.random.default_rng(3)
        for _ in range(5):
            u = rng.standard_normal((64, 64))
            back = grid.inverse(grid.forward(u))
            assert np.max(np.abs(back - u)) < 1e-12 * np.max(np.abs(u))

    def test_cos_mode_against_direct_summation(self):
        # oracle: u_hat(xi_j) = dx^2 sum_x u(x) exp(-i x.xi_j), summed directly
        g = SpectralGrid(L=4.0, N=16)
        xi1 = g.xi[3]
        u = np.cos(xi1 * g.X1)
        spec = g.forward(u)
        oracle = np.zeros((16, 16), dtype=complex)
        for j1 in range(16):
            for j2 in range(16):
                phase = np.exp(-1j * (g.X1 * g.xi[j1] + g.X2 * g.xi[j2]))
                oracle[j1, j2] = g.dx**2 * np.sum(u * phase)
        assert np.max(np.abs(spec - oracle)) < 1e-10
        # supported on +-xi1 with value (2L)^2 / 2 each
        expect = (2 * g.L) ** 2 / 2
        assert spec[3, 0] == pytest.approx(expect, abs=1e-10)
        assert spec[-3, 0] == pytest.approx(expect, abs=1e-10)
        spec[3, 0] = spec[-3, 0] = 0.0
        assert np.max(np.abs(spec)) < 1e-9

    def test_gaussian_matches_continuum_transform(self, grid):
        u = np.exp(-(grid.X1**2 + grid.X2**2) / 2.0)
        spec = grid.forward(u)
        ref = 2.0 * np.pi * np.exp(-grid.xi_abs**2 / 2.0)
        sel = grid.xi_abs <= 4.0
        assert np.max(np.abs(spec[sel] - ref[sel])) / (2 * np.pi) < 1e-8

    def test_plancherel(self, grid):
        rng = np.random.default_rng(5)
        u = rng.standard_normal((64, 64))
        lhs = grid.norm_phys(u)
        rhs = grid.norm_spec(grid.forward(u)) / (2.0 * np.pi)
        assert abs(lhs - rhs) < 1e-12 * lhs

    def test_conjugate_symmetry_iff_real(self, grid):
        rng = np.random.default_rng(6)
        u = rng.standard_normal((64, 64))
        spec = grid.forward(u)
        flipped = np.conj(np.roll(np.flip(spec), (1, 1), axis=(0, 1)))
        assert np.max(np.abs(spec - flipped)) < 1e-10 * np.max(np.abs(spec))

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_roundtrip_property(self, seed):
        g = SpectralGrid(L=6.0, N=32)
        u = np.random.default_rng(seed).standard_normal((32, 32))
        assert np.max(np.abs(g.inverse(g.forward(u)) - u)) < 1e-12 * (1 + np.max(np.abs(u)))


class TestMultipliers:
    def test_bracket_at_zero(self, grid):
        spec = np.zeros((64, 64), dtype=complex)
        spec[0, 0] = 2.5
        out = grid.multiplier(spec, "bracket")
        assert out[0, 0] == pytest.approx(2.5)

    def test_abs2_is_minus_laplacian_on_mode(self, grid):
        xi1 = grid.xi[5]
        u = np.exp(1j * xi1 * grid.X1)
        spec = grid.forward_any(u)
        out = grid.inverse_c(grid.multiplier(spec, "abs2"))
        assert np.max(np.abs(out - xi1**2 * u)) < 1e-10

    def test_gaussian_laplacian_closed_form(self, grid):
        r2 = grid.X1**2 + grid.X2**2
        u = np.exp(-r2 / 2.0)
        lap = grid.laplacian(u)
        exact = (r2 - 2.0) * u
        assert np.max(np.abs(lap - exact)) < 1e-8

    def test_spectral_derivative_exact_on_mode(self, grid):
        xi1 = grid.xi[4]
        u = np.exp(1j * xi1 * grid.X1)
        du = grid.derivative(u, 0)
        assert np.max(np.abs(du - 1j * xi1 * u)) < 1e-10

    def test_derivative_gaussian(self, grid):
        u = np.exp(-(grid.X1**2 + grid.X2**2) / 2.0)
        du = grid.derivative(u, 0)
        assert np.max(np.abs(du + grid.X1 * u)) < 1e-8

    def test_unbounded_symbol_rejected(self, grid):
        bad = np.where(grid.xi_abs > 0, 1.0 / np.where(grid.xi_abs > 0, grid.xi_abs, 1.0), np.inf)
        with pytest.raises(ValueError):
            grid.multiplier(np.ones((64, 64), dtype=complex), bad)

    def test_nyquist_zeroed(self, grid):
        spec = np.ones((64, 64), dtype=complex)
        out = grid.multiplier(spec, "bracket")
        assert np.all(out[32, :] == 0) and np.all(out[:, 32] == 0)


class TestLittlewoodPaley:
    def test_partition_of_unity_on_lattice(self, grid):
        xi = grid.xi_abs[grid.xi_abs > 0]
        total = sum(band_cutoff(xi, k) for k in range(-40, 41))
        assert np.max(np.abs(total - 1.0)) < 1e-14

    def test_partition_of_unity_random_points(self):
        rng = np.random.default_rng(11)
        x = np.exp(rng.uniform(np.log(2.0**-29), np.log(2.0**29), 1000))
        total = sum(band_cutoff(x, k) for k in range(-40, 41))
        assert np.max(np.abs(total - 1.0)) < 1e-14

    def test_disjoint_band_annihilation(self, grid):
        rng = np.random.default_rng(12)
        spec = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        for k, j in [(-1, 2), (0, 3), (1, -2)]:
            assert abs(k - j) >= 2
            out = grid.lp_project(grid.lp_project(spec, k), j)
            assert np.max(np.abs(out)) == 0.0

    def test_orthogonality_on_dyadic_circles(self):
        # u supported on lattice circles |xi| in {1, 2}, where exactly one
        # phi_k equals 1: band energies must sum to the total exactly
        g = SpectralGrid(L=8 * np.pi, N=64)
        spec = np.zeros((64, 64), dtype=complex)
        spec[8, 0] = spec[-8, 0] = 1.0      # |xi| = 1
        spec[0, 16] = spec[0, -16] = 0.5j   # |xi| = 2
        total = g.norm_spec(spec) ** 2
        bands = sum(g.norm_spec(g.lp_project(spec, k)) ** 2 for k in range(-5, 6))
        assert abs(bands - total) < 1e-10 * total

    def test_cutoff_shapes(self):
        assert smooth_bump(0.5) == 1.0 and smooth_bump(2.5) == 0.0
        assert 0.0 < smooth_bump(1.5) < 1.0
        assert band_cutoff_le(0.3, 0) == 1.0


class TestLowFreqSplit:
    def test_exact_complement(self, grid):
        rng = np.random.default_rng(13)
        spec = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        low, high = grid.lowfreq_split(spec, t=4.0, p=0.75)
        assert np.max(np.abs(low + high - spec)) < 4e-16 * np.max(np.abs(spec))
        bracket_t = np.sqrt(17.0)
        assert np.all(np.abs(low[grid.xi_abs * bracket_t**0.75 > 2.0]) == 0.0)
        assert np.all(np.abs(high[grid.xi_abs * bracket_t**0.75 < 1.0]) == 0.0)

    def test_low_passes_core_unchanged(self, grid):
        spec = np.ones((64, 64), dtype=complex)
        t = 4.0
        low, _ = grid.lowfreq_split(spec, t=t, p=0.75)
        core = grid.xi_abs <= (1.0 + t * t) ** (-0.75 / 2)
        assert np.all(low[core] == spec[core])

    def test_zero_mode_only_at_late_time(self, grid):
        spec = np.ones((64, 64), dtype=complex)
        # <t>^-p below the minimal nonzero lattice frequency
        t = ((2.0 / grid.dxi) ** (1 / 0.75)) * 2.0
        low, _ = grid.lowfreq_split(spec, t=t, p=0.75)
        assert low[0, 0] == 1.0
        low[0, 0] = 0.0
        assert np.max(np.abs(low)) == 0.0

    def test_mode_count_matches_enumeration(self):
        # oracle: direct enumeration of {eta : phi_<=0(eta <t>^p) > 0}
        g = SpectralGrid(L=64.0, N=64)
        t, p = 16.0, 0.75
        bracket_t = np.sqrt(1.0 + t * t)
        low, _ = g.lowfreq_split(np.ones((64, 64), dtype=complex), t, p)
        count = int(np.sum(np.abs(low) > 0))
        oracle = int(np.sum(g.xi_abs * bracket_t**p < 2.0))
        assert count == oracle


class TestDealias:
    def test_fraction_one_is_identity(self, grid):
        rng = np.random.default_rng(14)
        spec = rng.standard_normal((64, 64)) + 0j
        assert np.array_equal(grid.dealias(spec, fraction=1.0), spec)

    @staticmethod
    def _direct_convolution(g, u_hat, v_hat, mask):
        # oracle: w_hat(xi) = (dxi^2/4pi^2) sum_eta u_hat(eta) v_hat(xi - eta)
        # as a true (non-circular) sum over the support of u_hat
        n = g.N
        out = np.zeros_like(u_hat)
        js = np.fft.fftfreq(n, 1.0 / n).astype(int)
        nz = np.argwhere(np.abs(u_hat) > 0)
        for j1 in range(n):
            for j2 in range(n):
                if not mask[j1, j2]:
                    continue
                acc = 0.0 + 0.0j
                for a1, a2 in nz:
                    d1, d2 = js[j1] - js[a1], js[j2] - js[a2]
                    if -n // 2 <= d1 < n // 2 and -n // 2 <= d2 < n // 2:
                        acc += u_hat[a1, a2] * v_hat[d1 % n, d2 % n]
                out[j1, j2] = acc
        return out * g.dxi**2 / (4.0 * np.pi**2)

    def test_quadratic_product_alias_free_after_two_thirds(self):
        g = SpectralGrid(L=6.0, N=32)
        rng = np.random.default_rng(15)
        third = g.dealias_mask(fraction=1.0 / 3.0)
        u_hat = np.where(third, rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)), 0)
        u_hat = 0.5 * (u_hat + np.conj(np.roll(np.flip(u_hat), (1, 1), axis=(0, 1))))
        v_hat = u_hat * (1.0 + 0.3 * g.xi_abs)
        u, v = g.inverse(u_hat), g.inverse(v_hat)
        w_hat = g.dealias(g.forward(u * v), fraction=2.0 / 3.0)
        oracle = self._direct_convolution(g, u_hat, v_hat, g.dealias_mask(2.0 / 3.0))
        scale = np.max(np.abs(oracle))
        assert np.max(np.abs(w_hat - oracle)) < 1e-12 * scale

    def test_cubic_product_alias_free_under_half_rule(self):
        g = SpectralGrid(L=6.0, N=32)
        rng = np.random.default_rng(16)
        quarter = g.dealias_mask(fraction=0.25)
        u_hat = np.where(quarter, rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)), 0)
        u_hat = 0.5 * (u_hat + np.conj(np.roll(np.flip(u_hat), (1, 1), axis=(0, 1))))
        u = g.inverse(u_hat)
        # u^2 is band-limited to 1/2 Nyquist: compare u^3 = u * u^2 against
        # the direct convolution of u_hat with (u^2)-hat on the half mask
        u2_hat = g.forward(u * u)
        w_hat = g.dealias(g.forward(u * u * u), fraction=0.5)
        oracle = self._direct_convolution(g, u_hat, u2_hat, g.dealias_mask(0.5))
        scale = max(np.max(np.abs(oracle)), 1e-30)
        assert np.max(np.abs(w_hat - oracle)) < 1e-11 * scale
