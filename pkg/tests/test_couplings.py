import numpy as np
import pytest

import gradion as g
from gradion.couplings import spin_energy
from gradion.operators import spin_hamiltonian_matrix

from util import random_couplings


def solved(preset):
    layout, field = g.preset_layout_field(preset)
    eq = g.solve_equilibrium(layout)
    modes = g.normal_modes(layout, eq)
    return layout, field, eq, modes


class TestQubitFrequencies:
    def test_gradient_formula(self, d4_pipeline):
        _, field, eq, *_ = d4_pipeline
        w, dwdz = g.qubit_frequencies(field, eq)
        c = g.DEFAULT_CONSTANTS
        assert dwdz == pytest.approx(2 * c.mu_b * 500.0 / c.hbar, rel=1e-12)
        # cross-check through the reference neighbor splitting
        assert (w[1] - w[0]) / (g.TWO_PI * 1e6) == pytest.approx(64.8, rel=0.01)
        assert w[2] - w[1] == pytest.approx(w[1] - w[0], rel=1e-9)

    def test_zero_gradient_uniform(self, d4_pipeline):
        _, _, eq, *_ = d4_pipeline
        w, dwdz = g.qubit_frequencies(g.FieldConfig(0.0), eq)
        assert dwdz == 0.0
        assert np.ptp(w) == 0.0

    def test_neighbor_shift(self):
        shift = g.neighbor_resonance_shift(g.FieldConfig(500.0), 4.628e-6)
        assert shift / (g.TWO_PI * 1e6) == pytest.approx(64.8, rel=0.01)
        assert g.neighbor_resonance_shift(g.FieldConfig(0.0), 4.628e-6) == 0.0
        assert g.neighbor_resonance_shift(g.FieldConfig(500.0), 2 * 4.628e-6) \
            == pytest.approx(2 * shift, rel=1e-12)
        with pytest.raises(ValueError):
            g.neighbor_resonance_shift(g.FieldConfig(500.0), -1e-6)


class TestCouplings:
    def test_table1_d4_values(self, d4_pipeline):
        *_, couplings = d4_pipeline
        assert couplings.J / (g.TWO_PI * 1e3) == pytest.approx(0.459, rel=0.03)
        assert couplings.J13 / (g.TWO_PI * 1e3) == pytest.approx(0.135, rel=0.04)
        assert couplings.eps_max == pytest.approx(0.0340, rel=0.03)

    def test_table3_h4_values(self):
        layout, field, eq, modes = solved("table3-h4")
        couplings = g.compute_couplings(modes, field, eq)
        assert couplings.J / (g.TWO_PI * 1e3) == pytest.approx(0.359, rel=0.03)
        assert couplings.J13 / (g.TWO_PI * 1e3) == pytest.approx(0.254, rel=0.03)
        assert couplings.eps_max == pytest.approx(0.0263, rel=0.03)

    def test_zero_gradient_kills_couplings(self, d4_pipeline):
        _, _, eq, modes, _ = d4_pipeline
        couplings = g.compute_couplings(modes, g.FieldConfig(0.0), eq)
        assert couplings.J == 0.0 and couplings.J13 == 0.0
        assert np.all(couplings.eps == 0.0)
        assert np.all(couplings.eta_prime == couplings.eta)

    def test_lamb_dicke_formula_and_eta_prime(self, d4_pipeline):
        _, field, eq, modes, couplings = d4_pipeline
        eps, eps_max, eta_prime = g.effective_lamb_dicke(modes, field)
        c = g.DEFAULT_CONSTANTS
        dwdz = 2 * c.mu_b * field.gradient / c.hbar
        for i in range(3):
            for l in range(3):
                expected = modes.D[i, l] * np.sqrt(c.hbar / (2 * c.mass * modes.nu[l])) \
                    * dwdz / modes.nu[l]
                assert eps[i, l] == pytest.approx(expected, rel=1e-12)
        assert eps_max == pytest.approx(np.max(np.abs(eps)), rel=1e-15)
        assert np.allclose(eta_prime, np.sqrt(field.eta**2 + eps**2), rtol=1e-12)

    def test_sign_flip_invariance_of_J(self, d4_pipeline, rng):
        _, field, eq, modes, couplings = d4_pipeline
        for _ in range(10):
            signs = rng.choice([-1.0, 1.0], size=3)
            flipped = g.NormalModes(modes.nu, modes.D * signs[np.newaxis, :])
            c2 = g.compute_couplings(flipped, field, eq)
            assert c2.J == pytest.approx(couplings.J, rel=1e-12)
            assert c2.J13 == pytest.approx(couplings.J13, rel=1e-12)

    def test_j12_equals_j23_for_symmetric_layouts(self, rng):
        c = g.DEFAULT_CONSTANTS
        for _ in range(10):
            layout = g.TrapLayout.multi_trap(rng.uniform(2e-6, 7e-6),
                                             g.TWO_PI * rng.uniform(0.3e6, 3e6),
                                             g.TWO_PI * rng.uniform(0.1e6, 3e6))
            eq = g.solve_equilibrium(layout)
            modes = g.normal_modes(layout, eq)
            dwdz = 2 * c.mu_b * 500.0 / c.hbar
            jmat = np.zeros((3, 3))
            for i in range(3):
                for j in range(3):
                    jmat[i, j] = sum(
                        c.hbar / (2 * c.mass * modes.nu[l] ** 2)
                        * modes.D[i, l] * modes.D[j, l] * dwdz**2 for l in range(3))
            assert abs(jmat[0, 1] - jmat[1, 2]) <= 1e-10 * abs(jmat[0, 1])
            packaged = g.compute_couplings(modes, g.FieldConfig(500.0), eq)
            assert packaged.J == pytest.approx(jmat[0, 1], rel=1e-10)
            assert packaged.J13 == pytest.approx(jmat[0, 2], rel=1e-10)

    def test_mode_sum_equals_inverse_hessian_route(self, d4_pipeline, rng):
        # J_ij = (hbar/2) (dw/dz)^2 [K^-1]_ij since K = m D diag(nu^2) D^T;
        # inverting the Hessian directly is an independent route to the same
        # couplings, with no eigendecomposition involved
        layout, field, eq, modes, couplings = d4_pipeline
        c = g.DEFAULT_CONSTANTS
        kinv = np.linalg.inv(g.potential_hessian(layout, eq.positions))
        jmat = 0.5 * c.hbar * couplings.dwdz**2 * kinv
        assert couplings.J == pytest.approx(jmat[0, 1], rel=1e-10)
        assert couplings.J13 == pytest.approx(jmat[0, 2], rel=1e-10)

    def test_scaling_with_gradient(self, d4_pipeline):
        _, _, eq, modes, _ = d4_pipeline
        low = g.compute_couplings(modes, g.FieldConfig(200.0), eq)
        high = g.compute_couplings(modes, g.FieldConfig(600.0), eq)
        assert high.eps_max == pytest.approx(3.0 * low.eps_max, rel=1e-12)
        assert high.J == pytest.approx(9.0 * low.J, rel=1e-12)
        assert high.J13 == pytest.approx(9.0 * low.J13, rel=1e-12)


class TestSpinSpectrum:
    def test_corner_energies_closed_form(self, rng):
        couplings = random_couplings(rng)
        w, J, J13 = couplings.w, couplings.J, couplings.J13
        spectrum = g.spin_spectrum(couplings)
        assert spectrum.energies[0] == pytest.approx(
            -0.5 * np.sum(w) - J - 0.5 * J13, rel=1e-14)
        assert spectrum.energies[7] == pytest.approx(
            +0.5 * np.sum(w) - J - 0.5 * J13, rel=1e-14)
        # second listed state |100>
        assert spectrum.energies[4] == pytest.approx(
            0.5 * (w[0] - w[1] - w[2]) + 0.5 * J13, rel=1e-14)

    def test_decoupled_limit(self, rng):
        couplings = random_couplings(rng)
        from dataclasses import replace
        bare = replace(couplings, J=0.0, J13=0.0)
        spectrum = g.spin_spectrum(bare)
        for b in range(8):
            signs = np.array([1 if b & (4 >> i) else -1 for i in range(3)])
            assert spectrum.energies[b] == pytest.approx(
                0.5 * float(signs @ bare.w), rel=1e-14)

    def test_matches_explicit_matrix(self, rng):
        for _ in range(10):
            couplings = random_couplings(rng)
            H = spin_hamiltonian_matrix(couplings.w, couplings.J, couplings.J13)
            diag = np.real(np.diagonal(H))
            energies = g.spin_spectrum(couplings).energies
            assert np.max(np.abs(energies - diag)) <= 1e-12 * np.max(np.abs(diag))

    def test_excitation_order_listing(self, rng):
        couplings = random_couplings(rng)
        spectrum = g.spin_spectrum(couplings)
        listed = spectrum.by_excitation
        assert listed[0] == spectrum.energies[0]
        assert listed[1] == spectrum.energies[4]  # |100>
        assert listed[-1] == spectrum.energies[7]


class TestCarrierSpectrum:
    def test_entries_are_spectrum_differences(self, rng):
        couplings = random_couplings(rng)
        spec = g.carrier_spectrum(couplings)
        energies = [spin_energy(couplings, b) for b in range(8)]
        for ion, bit in ((1, 2), (2, 1), (3, 0)):
            seen = []
            for low in range(8):
                if low & (1 << bit):
                    continue
                seen.append(energies[low | (1 << bit)] - energies[low])
            assert sorted(seen) == pytest.approx(sorted(spec.transitions[ion - 1]),
                                                 rel=1e-12)

    def test_spreads(self, rng):
        couplings = random_couplings(rng)
        spec = g.carrier_spectrum(couplings)
        assert spec.spreads[1] == pytest.approx(4 * couplings.J, rel=1e-12)
        assert spec.spreads[0] == pytest.approx(
            2 * (couplings.J + couplings.J13), rel=1e-12)
        assert spec.spreads[2] == pytest.approx(
            2 * (couplings.J + couplings.J13), rel=1e-12)

    def test_degenerate_when_uncoupled(self, rng):
        from dataclasses import replace
        couplings = replace(random_couplings(rng), J=0.0, J13=0.0)
        spec = g.carrier_spectrum(couplings)
        assert np.max(spec.spreads) == 0.0
        for ion in range(3):
            assert np.ptp(spec.transitions[ion]) == 0.0


class TestHeatingTime:
    def test_reference_scaling(self):
        t = g.heating_time_scaled(4e-3, 100e-6, 4e-6)
        assert t == pytest.approx(4e-3 * (4 / 100) ** 4, rel=1e-12)
        assert 9e-9 < t < 11.5e-9  # "order of nanoseconds"

    def test_identity_and_power(self):
        assert g.heating_time_scaled(4e-3, 100e-6, 100e-6) == pytest.approx(4e-3)
        assert g.heating_time_scaled(1.0, 1e-6, 2e-6) == pytest.approx(16.0)
        with pytest.raises(ValueError):
            g.heating_time_scaled(1.0, 1e-6, -2e-6)
