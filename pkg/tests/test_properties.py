"""Property-based invariants on randomized parameter draws: algebraic
identities of the numeric primitives, structural facts of the model, and
the physical conservation laws both integrators must respect."""

import math

import numpy as np
from hypothesis import given, settings, strategies as st

from rydgate.analytic import c11_rect, rabi_amplitudes
from rydgate.gate import GateConfig, bell_fidelity, run_gate
from rydgate.model import (
    BasisIndex,
    GaussianPulse,
    RectangularPulse,
    SystemParams,
    collapse_operators,
    gate_time,
    hamiltonian,
    split_hamiltonian,
)
from rydgate.numerics import integrate_lindblad, kron

couplings = st.floats(0.3, 2.5)
drive_peaks = st.floats(0.2, 3.0)
detunings = st.floats(-1.0, 1.0)
decay_rates = st.floats(0.0, 0.05)
windows = st.floats(0.5, 4.0)
seeds = st.integers(0, 2**32 - 1)


@st.composite
def pulses(draw):
    peak = draw(drive_peaks)
    if draw(st.booleans()):
        return GaussianPulse.matched(omega_m=peak)
    return RectangularPulse(omega=peak)


@st.composite
def system_params(draw, dissipative=False):
    kwargs = {"g": draw(couplings), "delta2": draw(detunings)}
    if dissipative:
        kwargs.update(
            gamma1=draw(decay_rates),
            gamma2=draw(decay_rates),
            kappa=draw(decay_rates),
        )
    return SystemParams(**kwargs)


def _random_matrices(seed, count, dim=2):
    rng = np.random.default_rng(seed)
    return [
        rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        for _ in range(count)
    ]


class TestAlgebra:
    @settings(deadline=None, max_examples=50)
    @given(seeds, st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
    def test_kron_is_bilinear(self, seed, a, b):
        m1, m2, m3 = _random_matrices(seed, 3)
        left = kron(m1, a * m2 + b * m3)
        right = a * kron(m1, m2) + b * kron(m1, m3)
        assert np.allclose(left, right, atol=1e-12)

    @settings(deadline=None, max_examples=50)
    @given(seeds)
    def test_kron_is_associative(self, seed):
        m1, m2, m3 = _random_matrices(seed, 3)
        assert np.allclose(
            kron(kron(m1, m2), m3), kron(m1, kron(m2, m3)), atol=1e-12
        )

    @settings(deadline=None, max_examples=100)
    @given(drive_peaks, st.floats(0.0, 30.0))
    def test_rabi_amplitudes_stay_on_the_unit_circle(self, omega, t):
        c0, c1 = rabi_amplitudes(t, omega)
        assert abs(abs(c0) ** 2 + abs(c1) ** 2 - 1.0) < 1e-12

    @settings(deadline=None, max_examples=100)
    @given(couplings, drive_peaks, st.floats(0.0, 30.0))
    def test_two_photon_return_amplitude_bounds(self, g, omega, t):
        s = 4.0 * g * g + omega * omega
        lower = (4.0 * g * g - omega * omega) / s
        value = c11_rect(t, g, omega)
        assert lower - 1e-12 <= value <= 1.0 + 1e-12
        assert c11_rect(0.0, g, omega) == 1.0


class TestModelStructure:
    @settings(deadline=None, max_examples=50)
    @given(system_params(dissipative=True), pulses(), st.floats(0.0, 20.0))
    def test_hamiltonian_is_hermitian(self, params, pulse, t):
        h = hamiltonian(params, pulse, t)
        assert np.allclose(h, h.conj().T, atol=1e-12)

    @settings(deadline=None, max_examples=50)
    @given(system_params(dissipative=True), pulses(), st.floats(0.0, 20.0))
    def test_split_form_matches_full_matrix(self, params, pulse, t):
        h = split_hamiltonian(params, pulse)
        full = h.static + pulse.envelope(t) * h.drive
        assert np.allclose(full, hamiltonian(params, pulse, t), atol=1e-12)


class TestUnitaryInvariants:
    @settings(deadline=None, max_examples=25)
    @given(system_params(), pulses(), windows)
    def test_norm_is_conserved(self, params, pulse, window):
        config = GateConfig(params=params, pulse=pulse, duration_override=window)
        result = run_gate(config)
        totals = result.populations.sum(axis=1)
        assert np.max(np.abs(totals - 1.0)) < 1e-9

    @settings(deadline=None, max_examples=25)
    @given(system_params(), pulses(), windows, st.sampled_from([0, 4]))
    def test_undriven_atom_rows_are_invariant(self, params, pulse, window, flat):
        config = GateConfig(
            params=params,
            pulse=pulse,
            duration_override=window,
            initial_basis=BasisIndex.from_flat(flat),
        )
        result = run_gate(config)
        others = [i for i in range(8) if i != flat]
        assert np.max(result.populations[:, others]) < 1e-10
        assert np.max(np.abs(result.populations[:, flat] - 1.0)) < 1e-10

    @settings(deadline=None, max_examples=25)
    @given(system_params(), pulses(), windows)
    def test_superposition_keeps_vacuum_component_fixed(self, params, pulse, window):
        config = GateConfig(params=params, pulse=pulse, duration_override=window)
        result = run_gate(config)
        assert np.max(np.abs(result.populations[:, 0] - 0.25)) < 1e-9

    @settings(deadline=None, max_examples=15)
    @given(system_params(), pulses())
    def test_halving_the_step_leaves_the_fidelity(self, params, pulse):
        config = GateConfig(params=params, pulse=pulse)
        coarse = run_gate(config)
        fine = run_gate(config, dt=coarse.dt / 2.0)
        assert abs(bell_fidelity(coarse) - bell_fidelity(fine)) < 1e-6


class TestLindbladInvariants:
    @settings(deadline=None, max_examples=15)
    @given(system_params(dissipative=True), pulses(), windows)
    def test_trace_hermiticity_positivity(self, params, pulse, window):
        h = split_hamiltonian(params, pulse)
        ops = collapse_operators(params)
        vec = np.zeros(8, dtype=complex)
        vec[[0, 1, 4, 5]] = 0.5
        rho0 = np.outer(vec, vec.conj())
        dt = min(window / 20000.0, 0.02 / max(params.g, pulse.peak))
        _, rhos = integrate_lindblad(h, ops, rho0, window, dt)
        traces = np.einsum("tii->t", rhos)
        assert np.max(np.abs(traces - 1.0)) < 1e-9
        assert np.max(np.abs(rhos - rhos.conj().transpose(0, 2, 1))) < 1e-9
        eigs = np.linalg.eigvalsh(rhos[-1])
        assert eigs.min() > -1e-9

    @settings(deadline=None, max_examples=10)
    @given(system_params(), pulses())
    def test_zero_rates_reduce_to_the_pure_run(self, params, pulse):
        window = min(gate_time(pulse), 4.0)
        pure = run_gate(
            GateConfig(params=params, pulse=pulse, duration_override=window)
        )
        mixed = run_gate(
            GateConfig(
                params=params, pulse=pulse, duration_override=window, dissipative=True
            )
        )
        assert np.max(np.abs(pure.fidelity - mixed.fidelity)) < 1e-7
