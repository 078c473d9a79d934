"""Transforms, norms, conserved quantities, and the product contracts."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlslab.grid import (
    Field,
    Grid2D,
    Spectrum,
    assert_dealiased,
    cubic_spectrum,
    dealias,
    energy,
    forward_transform,
    inverse_transform,
    mass,
    quartic_integral,
    sobolev_norm,
    translate,
)

from conftest import gaussian_spectrum, plane_wave, random_field, random_spectrum


class TestGrid2D:
    def test_defaults(self):
        g = Grid2D(48)
        assert g.dealias_cutoff == 16
        assert g.box_length == pytest.approx(2 * np.pi)
        assert g.frequency_unit == pytest.approx(1.0)

    def test_rejects_odd_or_small(self):
        with pytest.raises(ValueError, match="even"):
            Grid2D(15)
        with pytest.raises(ValueError, match="even"):
            Grid2D(6)

    def test_rejects_bad_cutoff(self):
        with pytest.raises(ValueError, match="dealias_cutoff"):
            Grid2D(16, dealias_cutoff=8)
        with pytest.raises(ValueError, match="dealias_cutoff"):
            Grid2D(16, dealias_cutoff=0)

    def test_lattice_closed_under_negation(self):
        g = Grid2D(16)
        active = set()
        for k1 in g.active_modes:
            for k2 in g.active_modes:
                active.add((k1, k2))
        assert all((-k1, -k2) in active for k1, k2 in active)


class TestTransforms:
    def test_constant_field(self, grid16):
        u = Field(grid16, np.full((16, 16), 3.0, dtype=complex))
        spec = forward_transform(u)
        assert spec.coeff(0, 0) == pytest.approx(3.0)
        rest = spec.coeffs.copy()
        rest[0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-14

    def test_pure_mode(self, grid16):
        u = plane_wave(grid16, (1, 0))
        spec = forward_transform(u)
        assert spec.coeff(1, 0) == pytest.approx(1.0)
        rest = spec.coeffs.copy()
        rest[1, 0] = 0
        assert np.max(np.abs(rest)) < 1e-13

    def test_roundtrip_random(self, grid16):
        u = random_field(grid16, seed=5)
        back = inverse_transform(forward_transform(u))
        rel = np.max(np.abs(back.values - u.values)) / np.max(np.abs(u.values))
        assert rel < 1e-12

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=25, deadline=None)
    def test_roundtrip_property(self, seed):
        g = Grid2D(16)
        u = random_field(g, seed=seed)
        back = inverse_transform(forward_transform(u))
        assert np.max(np.abs(back.values - u.values)) < 1e-12 * (1 + np.max(np.abs(u.values)))


class TestMassEnergy:
    def test_plane_wave_mass(self, grid16):
        assert mass(plane_wave(grid16)) == pytest.approx(2 * np.pi, rel=1e-12)

    def test_zero_mass(self, grid16):
        assert mass(Field(grid16, np.zeros((16, 16), dtype=complex))) == 0.0

    def test_parseval(self, grid16):
        u = random_field(grid16, seed=2)
        g = grid16
        quad = np.sqrt(g.box_length**2 / g.modes_per_axis**2 * np.sum(np.abs(u.values) ** 2))
        assert mass(u) == pytest.approx(quad, rel=1e-12)

    def test_plane_wave_energy(self, grid16):
        expected = (2 * np.pi) ** 2 * (0.5 + 0.25)
        assert energy(plane_wave(grid16)) == pytest.approx(expected, rel=1e-12)

    def test_zero_energy(self, grid16):
        assert energy(Field(grid16, np.zeros((16, 16), dtype=complex))) == 0.0

    def test_energy_fine_grid_requadrature(self):
        # smooth (gaussian-envelope) field: doubling the grid leaves the
        # energy unchanged well beyond the stated refinement tolerance
        g = Grid2D(16)
        spec = gaussian_spectrum(g, seed=9, width=2.0)
        u = inverse_transform(spec)
        e_coarse = energy(u)

        g2 = Grid2D(32, dealias_cutoff=g.dealias_cutoff)
        m, m2 = 16, 32
        coeffs2 = np.zeros((m2, m2), dtype=complex)
        k = g.dealias_cutoff
        src = np.arange(-k, k + 1) % m
        dst = np.arange(-k, k + 1) % m2
        coeffs2[np.ix_(dst, dst)] = spec.coeffs[np.ix_(src, src)]
        e_fine = energy(inverse_transform(Spectrum(g2, coeffs2)))
        assert e_fine == pytest.approx(e_coarse, rel=1e-8)

    def test_defocusing_energy_nonnegative(self):
        for seed in range(5):
            u = random_field(Grid2D(16), seed=seed)
            assert energy(u, sign=1) >= 0.0

    def test_focusing_sign(self, grid16):
        u = random_field(grid16, seed=3)
        kinetic_only = energy(u, sign=1) - 0.25 * quartic_integral(u)
        assert energy(u, sign=-1) == pytest.approx(kinetic_only - 0.25 * quartic_integral(u))


class TestSobolev:
    def test_single_mode_s1(self, grid16):
        spec = forward_transform(plane_wave(grid16, (1, 0)))
        assert sobolev_norm(spec, 1.0) == pytest.approx(2 * np.pi * np.sqrt(2), rel=1e-12)

    def test_s0_is_mass(self, grid16):
        u = random_field(grid16, seed=8)
        spec = forward_transform(u)
        assert sobolev_norm(spec, 0.0) == pytest.approx(mass(u), rel=1e-12)

    def test_two_mode_hand_sum(self, grid16):
        m = 16
        coeffs = np.zeros((m, m), dtype=complex)
        coeffs[1 % m, 0] = 2.0
        coeffs[(-3) % m, 2 % m] = 1.0 - 1.0j
        spec = Spectrum(grid16, coeffs)
        s = 0.7
        expected = np.sqrt((2 * np.pi) ** 2 * (
            (1 + 1.0) ** s * 4.0 + (1 + 13.0) ** s * 2.0))
        assert sobolev_norm(spec, s) == pytest.approx(expected, rel=1e-12)

    def test_homogeneous_drops_zero_mode(self, grid16):
        m = 16
        coeffs = np.zeros((m, m), dtype=complex)
        coeffs[0, 0] = 5.0
        assert sobolev_norm(Spectrum(grid16, coeffs), 1.0, homogeneous=True) == 0.0


class TestTranslation:
    @given(a1=st.integers(0, 15), a2=st.integers(0, 15), seed=st.integers(0, 10**6))
    @settings(max_examples=20, deadline=None)
    def test_lattice_translation_covariance(self, a1, a2, seed):
        g = Grid2D(16)
        u = random_field(g, seed=seed)
        spec = forward_transform(u)
        shift = (g.spacing * a1, g.spacing * a2)
        shifted = translate(spec, shift)
        # unit-phase multiplication: moduli unchanged
        assert np.allclose(np.abs(shifted.coeffs), np.abs(spec.coeffs), atol=1e-13)
        v = inverse_transform(shifted)
        scale = 1 + abs(mass(u)) + abs(energy(u))
        assert abs(mass(v) - mass(u)) < 1e-12 * scale
        assert abs(energy(v) - energy(u)) < 1e-12 * scale
        assert abs(sobolev_norm(shifted, 0.8) - sobolev_norm(spec, 0.8)) < 1e-12 * scale
        # and it really is the translated field
        rolled = np.roll(u.values, (a1, a2), axis=(0, 1))
        assert np.max(np.abs(v.values - rolled)) < 1e-10 * (1 + np.max(np.abs(u.values)))


class TestDealiasing:
    def test_dealias_zeroes_tail(self, grid16):
        u = random_field(grid16, seed=1)
        full = forward_transform(u)
        full.coeffs[8, 8] = 1.0  # outside the dealias box
        with pytest.raises(ValueError, match="not dealiased"):
            assert_dealiased(full)
        clean = dealias(full)
        assert_dealiased(clean)

    def test_cubic_requires_dealiased(self, grid16):
        coeffs = np.zeros((16, 16), dtype=complex)
        coeffs[7, 0] = 1.0  # beyond K = 5
        with pytest.raises(ValueError, match="not dealiased"):
            cubic_spectrum(Spectrum(grid16, coeffs))

    def test_cubic_is_exact_convolution(self):
        # brute-force triple convolution on a small grid
        g = Grid2D(8, dealias_cutoff=2)
        spec = random_spectrum(g, seed=4)
        w = cubic_spectrum(spec)
        k = g.dealias_cutoff
        c = spec.active_block()
        n = 2 * k + 1

        def cval(k1, k2):
            if abs(k1) <= k and abs(k2) <= k:
                return c[k1 + k, k2 + k]
            return 0.0

        for q1 in range(-k, k + 1):
            for q2 in range(-k, k + 1):
                total = 0.0
                for a1 in range(-k, k + 1):
                    for a2 in range(-k, k + 1):
                        for b1 in range(-k, k + 1):
                            for b2 in range(-k, k + 1):
                                d1, d2 = q1 - a1 + b1, q2 - a2 + b2
                                total += (cval(a1, a2) * np.conj(cval(b1, b2))
                                          * cval(d1, d2))
                assert w.coeff(q1, q2) == pytest.approx(total, rel=1e-12, abs=1e-12)

    def test_cubic_tail_is_zero(self, grid16):
        w = cubic_spectrum(random_spectrum(Grid2D(16), seed=6))
        assert_dealiased(w)
