import math

import numpy as np
import pytest

from dickebus.analytic import resonant_amplitudes, transition_element, transition_spec
from dickebus.core import SpaceSpec, StateVector, basis_state, fidelity
from dickebus.design import plant_delta2
from dickebus.dynamics import NumericalError, evolve_exact, evolve_lindblad, evolve_tdep
from dickebus.models import (CouplingProfile, DispersiveParams, LindbladSpec,
                             effective_dicke, number_operator, resonant_tc)

from conftest import random_sector_state, two_level_populations


class TestEvolveExact:
    def test_zero_hamiltonian_is_identity(self, rng):
        zero = resonant_tc(CouplingProfile((1e-30,)), 1)   # effectively zero
        psi0 = StateVector(zero.space, random_sector_state(rng, zero.space, 1))
        res = evolve_exact(zero, psi0, 5.0, sample_times=[0.0, 2.5, 5.0])
        for st in res.states:
            assert np.allclose(st.amplitudes, psi0.amplitudes, atol=1e-12)

    def test_single_qubit_rabi(self):
        chi = 0.8
        h = resonant_tc(CouplingProfile((chi,)), 1)
        psi0 = basis_state(h.space, "e", 0)
        ts = np.linspace(0, 2 * math.pi / chi, 41)
        res = evolve_exact(h, psi0, ts[-1], ts)
        idx = h.space.index([1], 0)
        for t, st in zip(ts, res.states):
            assert abs(st.amplitudes[idx]) ** 2 == pytest.approx(math.cos(chi * t) ** 2, abs=1e-10)

    def test_two_qubit_matches_closed_forms(self):
        profile = CouplingProfile((1.1, 0.45))
        h = resonant_tc(profile, 1)
        mu = math.hypot(*profile.chi)
        psi0 = basis_state(h.space, "eg", 0)
        ts = np.linspace(0, 2 * math.pi / mu, 60)
        res = evolve_exact(h, psi0, ts[-1], ts)
        sp = h.space
        for t, st in zip(ts, res.states):
            amps = resonant_amplitudes(profile, 0, float(t))
            assert abs(st.amplitudes[sp.index([1, 0], 0)] - amps.c[0]) < 1e-10
            assert abs(st.amplitudes[sp.index([0, 0], 1)] - amps.c0) < 1e-10
            assert abs(st.amplitudes[sp.index([0, 1], 0)] - amps.c[1]) < 1e-10

    def test_norm_drift_on_samples(self):
        h = resonant_tc(CouplingProfile((0.9, 0.4, 1.3)), 1)
        psi0 = basis_state(h.space, "egg", 0)
        res = evolve_exact(h, psi0, 30.0, np.linspace(0, 30, 31))
        assert res.drift.max() < 1e-10

    def test_excitation_conservation_along_trajectory(self):
        h = resonant_tc(CouplingProfile((0.9, 0.4)), 1)
        n_op = number_operator(h.space)
        psi0 = basis_state(h.space, "eg", 0)
        res = evolve_exact(h, psi0, 20.0, np.linspace(0, 20, 50))
        vals = [float(np.vdot(s.amplitudes, n_op @ s.amplitudes).real) for s in res.states]
        assert np.var(vals) < 1e-10

    def test_time_reversal(self, rng):
        h = resonant_tc(CouplingProfile((0.7, 1.2)), 1)
        psi0 = StateVector(h.space, random_sector_state(rng, h.space, 1))
        forward = evolve_exact(h, psi0, 7.0).final
        back = evolve_exact(h, forward, -7.0).final
        assert np.abs(back.amplitudes - psi0.amplitudes).max() < 1e-8


class TestEvolveTdep:
    def test_constant_hamiltonian_matches_exact(self):
        h = resonant_tc(CouplingProfile((1.0, 0.5)), 1)
        psi0 = basis_state(h.space, "eg", 0)
        ts = np.linspace(0, 8.0, 9)
        ref = evolve_exact(h, psi0, 8.0, ts)
        num = evolve_tdep(h, psi0, 8.0, tol=1e-10, sample_times=ts)
        for a, b in zip(ref.states, num.states):
            assert np.abs(a.amplitudes - b.amplitudes).max() < 1e-8

    def test_effective_resonant_two_level_rabi(self):
        # N=1, M=6 with the (1,3)->(0,4) transition resonant: populations
        # must follow cos^2/sin^2 at the operator-algebra element
        m, q = 6, 3
        g1, g2, d1 = 0.02, 1.0, 100.0
        spec = transition_spec(1, m, 1, q, "-")
        d2 = plant_delta2(1, m, spec, d1, g1, g2)
        p = DispersiveParams(1, m, g1, g2, d1, d2)
        h = effective_dicke(p)
        el = transition_element(spec, p)
        psi0_amps = np.zeros(h.space.dim, dtype=complex)
        psi0_amps[h.space.index((1, q))] = 1.0
        psi0 = StateVector(h.space, psi0_amps)
        t_final = math.pi / el
        ts = np.linspace(0, t_final, 21)
        res = evolve_tdep(h, psi0, t_final, tol=1e-10, sample_times=ts)
        for t, st in zip(ts, res.states):
            p_src, p_tgt = two_level_populations(el, 0.0, float(t))
            probs = st.probabilities()
            assert probs[h.space.index((1, q))] == pytest.approx(p_src, abs=1e-7)
            assert probs[h.space.index((0, q + 1))] == pytest.approx(p_tgt, abs=1e-7)

    def test_tolerance_halving_contract(self):
        h = resonant_tc(CouplingProfile((1.0, 0.5)), 1)
        psi0 = basis_state(h.space, "eg", 0)
        target = basis_state(h.space, "ge", 0)
        tol = 1e-8
        f1 = fidelity(evolve_tdep(h, psi0, 5.0, tol=tol).final, target)
        f2 = fidelity(evolve_tdep(h, psi0, 5.0, tol=tol / 2).final, target)
        assert abs(f1 - f2) <= 10 * tol

    def test_time_reversal(self):
        p = DispersiveParams(1, 3, 0.5, 1.0, 20.0, 19.9)
        h = effective_dicke(p)
        amps = np.zeros(h.space.dim, dtype=complex)
        amps[h.space.index((1, 1))] = 1.0
        psi0 = StateVector(h.space, amps)
        forward = evolve_tdep(h, psi0, 12.0, tol=1e-12).final
        back = evolve_tdep(h, forward, -12.0, tol=1e-12, t_start=12.0).final
        assert np.abs(back.amplitudes - psi0.amplitudes).max() < 1e-8

    def test_norm_drift_contract_enforced(self):
        h = resonant_tc(CouplingProfile((1.0,)), 1)
        psi0 = basis_state(h.space, "e", 0)
        res = evolve_tdep(h, psi0, 3.0, tol=1e-10)
        assert res.drift.max() < 100 * 1e-10


class TestEvolveLindblad:
    def test_no_dissipation_matches_unitary(self):
        h = resonant_tc(CouplingProfile((1.0, 0.6)), 1)
        psi0 = basis_state(h.space, "eg", 0)
        rho0 = psi0.to_density()
        res = evolve_lindblad(h, LindbladSpec(), rho0, 4.0)
        ref = evolve_exact(h, psi0, 4.0).final.to_density()
        assert np.abs(res.final.matrix - ref.matrix).max() < 1e-8

    def test_amplitude_damping(self):
        gamma = 0.37
        h = resonant_tc(CouplingProfile((1e-30,)), 1)   # free qubit
        rho0 = basis_state(h.space, "e", 0).to_density()
        ts = np.linspace(0, 3.0, 7)
        res = evolve_lindblad(h, LindbladSpec(gamma=gamma), rho0, 3.0, sample_times=ts)
        idx = h.space.index([1], 0)
        for t, rho in zip(ts, res.states):
            assert rho.matrix[idx, idx].real == pytest.approx(math.exp(-gamma * t), abs=1e-7)

    def test_photon_decay(self):
        kappa = 0.81
        h = resonant_tc(CouplingProfile((1e-30,)), 2)   # decoupled cavity
        rho0 = basis_state(h.space, "g", 1).to_density()
        ts = np.linspace(0, 2.0, 5)
        res = evolve_lindblad(h, LindbladSpec(kappa=kappa), rho0, 2.0, sample_times=ts)
        from dickebus.models import annihilation
        a = annihilation(h.space)
        n_op = a.conj().T @ a
        for t, rho in zip(ts, res.states):
            n_mean = float(np.trace(n_op @ rho.matrix).real)
            assert n_mean == pytest.approx(math.exp(-kappa * t), abs=1e-7)

    def test_trace_drift_and_positivity_checked(self):
        h = resonant_tc(CouplingProfile((1.0,)), 1)
        rho0 = basis_state(h.space, "e", 0).to_density()
        res = evolve_lindblad(h, LindbladSpec(gamma=0.2), rho0, 5.0,
                              sample_times=np.linspace(0, 5, 11))
        assert res.drift.max() < 1e-8
        for rho in res.states:
            assert np.linalg.eigvalsh(rho.matrix).min() > -1e-6
