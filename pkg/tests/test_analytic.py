import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dickebus.analytic import (ResonantAmplitudes, f_factor, mu,
                               resonant_amplitudes, stark_shift, tau_dicke,
                               transition_detuning, transition_element,
                               transition_spec)
from dickebus.core import DomainError
from dickebus.models import CouplingProfile, DispersiveParams

from conftest import oracle_dicke

profiles = st.lists(st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 1e-3),
                    min_size=1, max_size=6)


class TestMu:
    def test_pythagorean(self):
        assert mu(CouplingProfile((3.0, 4.0))) == pytest.approx(5.0)

    def test_single(self):
        assert mu(CouplingProfile((-2.5,))) == pytest.approx(2.5)

    def test_boosted_profile(self):
        # (3chi, chi, chi, chi): mu^2 = (9+3) chi^2
        chi = 0.7
        assert mu(CouplingProfile((3 * chi, chi, chi, chi))) == pytest.approx(math.sqrt(12) * chi)

    def test_zero_profile_rejected(self):
        with pytest.raises(DomainError):
            CouplingProfile((0.0, 0.0))


class TestResonantAmplitudes:
    def test_initial_condition(self):
        amps = resonant_amplitudes(CouplingProfile((1.0, 0.5, 0.2)), 1, 0.0)
        assert amps.c0 == 0.0
        assert np.allclose(amps.c, [0, 1, 0])

    def test_photon_node_at_pi_over_mu(self):
        profile = CouplingProfile((1.2, 0.4, 0.9))
        m = mu(profile)
        amps = resonant_amplitudes(profile, 0, math.pi / m)
        assert abs(amps.c0) < 1e-12
        chi = np.array(profile.chi)
        expected = np.array([1, 0, 0]) - 2 * chi * chi[0] / m ** 2
        assert np.allclose(amps.c, expected, atol=1e-12)

    def test_bell_ratio_balances_amplitudes(self):
        chi1 = 1.0
        for ratio in (math.sqrt(2) - 1, -(math.sqrt(2) + 1)):
            profile = CouplingProfile((chi1, ratio * chi1))
            m = mu(profile)
            amps = resonant_amplitudes(profile, 0, math.pi / m)
            assert abs(abs(amps.c[0]) - 1 / math.sqrt(2)) < 1e-12
            assert abs(abs(amps.c[1]) - 1 / math.sqrt(2)) < 1e-12
            assert abs(amps.c0) < 1e-12

    @given(profiles, st.integers(0, 5), st.floats(0.0, 20.0))
    @settings(max_examples=60, deadline=None)
    def test_normalization(self, chis, k, t):
        profile = CouplingProfile(tuple(chis))
        k = k % profile.n
        amps = resonant_amplitudes(profile, k, t)   # constructor asserts the invariant
        assert isinstance(amps, ResonantAmplitudes)

    @given(profiles, st.integers(0, 5))
    @settings(max_examples=40, deadline=None)
    def test_photon_amplitude_vanishes_at_pi_over_mu(self, chis, k):
        profile = CouplingProfile(tuple(chis))
        k = k % profile.n
        amps = resonant_amplitudes(profile, k, math.pi / mu(profile))
        assert abs(amps.c0) < 1e-12

    def test_schrodinger_equation_finite_difference(self):
        profile = CouplingProfile((0.8, 1.7, 0.3, 1.1))
        m = mu(profile)
        chi = np.array(profile.chi)
        k, t = 2, 1.234
        dt = 1e-6 / m

        def vec(tt):
            a = resonant_amplitudes(profile, k, tt)
            return np.concatenate(([a.c0], a.c))

        lhs = (vec(t + dt) - vec(t - dt)) / (2 * dt)
        # H on (c0, c_j): i c0' = sum chi_j c_j ; i c_j' = chi_j c0
        v = vec(t)
        rhs = -1j * np.concatenate(([chi @ v[1:]], chi * v[0]))
        assert np.abs(lhs - rhs).max() < 1e-6


class TestFFactor:
    def test_vanishes_at_k_equals_n(self):
        assert f_factor(3, 1, 3, 5) == 0.0

    def test_printed_arithmetic(self):
        assert f_factor(2, 1, 3, 3) == pytest.approx(math.sqrt(12))
        assert f_factor(0, 3, 1, 6) == pytest.approx(math.sqrt(12))

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            f_factor(4, 0, 3, 3)


class TestStarkShift:
    def params(self, n=3, m=3):
        return DispersiveParams(n, m, 0.4, 0.9, 30.0, 31.0)

    def test_edge_vanishes(self):
        assert stark_shift(3, 0, self.params()) == 0.0

    def test_interior_value(self):
        p = self.params()
        assert stark_shift(2, 1, p) == pytest.approx(2 * p.lambda1 + 2 * p.lambda2)

    def test_single_ancilla(self):
        p = DispersiveParams(1, 6, 0.1, 1.0, 50.0, 51.0)
        assert stark_shift(0, 3, p) == pytest.approx(9 * p.lambda2)

    def test_matches_effective_model_diagonal(self):
        from dickebus.models import effective_dicke, pair_index
        p = self.params()
        h = effective_dicke(p)
        mat = h.matrix(0.0)
        for k in range(4):
            for q in range(4):
                i = pair_index(3, 3, k, q)
                assert abs(mat[i, i].real - stark_shift(k, q, p)) < 1e-12


class TestTransitionDetuning:
    def test_symmetric_case_balanced_branches(self):
        # lambda1 = lambda2, N = M, (k, k): both branch detunings have equal
        # magnitude when the effective detuning is zero
        g = 0.5
        p = DispersiveParams(3, 3, g, g, 25.0, 25.0)   # delta = 0, lam1 = lam2
        assert abs(p.delta) < 1e-15
        up = transition_detuning(transition_spec(3, 3, 1, 1, "+"), p)
        dn = transition_detuning(transition_spec(3, 3, 1, 1, "-"), p)
        assert abs(abs(up.detuning) - abs(dn.detuning)) < 1e-12

    def test_top_rung_resonant_delta(self):
        # (3,0) '-' branch: resonance at delta = shift(3,0) - shift(2,1)
        # = -2 (lambda1 + lambda2); confirmed by the full-model scan in
        # test_design.py
        p = DispersiveParams(3, 3, 0.4, 0.9, 30.0, 31.0)
        det = transition_detuning(transition_spec(3, 3, 3, 0, "-"), p)
        assert det.resonant_delta == pytest.approx(-2 * (p.lambda1 + p.lambda2))
        # mirrored form flips the sign of the shift difference ('-' branch)
        assert det.mirror == pytest.approx(p.delta - (det.shift_target - det.shift_source))
        assert det.detuning == pytest.approx(p.delta + (det.shift_target - det.shift_source))

    def test_single_ancilla_expansion(self):
        # (1,q) '-' branch: detuning = delta - lambda2 [(q+1)(M-q-1) - q(M-q)]
        m, q = 6, 2
        p = DispersiveParams(1, m, 0.1, 1.0, 50.0, 49.0)
        det = transition_detuning(transition_spec(1, m, 1, q, "-"), p)
        expected = p.delta - p.lambda2 * (q * (m - q) - (q + 1) * (m - q - 1))
        assert det.detuning == pytest.approx(expected)

    def test_boundary_branch_rejected(self):
        p = DispersiveParams(3, 3, 0.4, 0.9, 30.0, 31.0)
        with pytest.raises(DomainError):
            transition_detuning(transition_spec(3, 3, 3, 0, "+"), p)


class TestTransitionElement:
    def test_single_ancilla_value(self):
        m, q = 6, 3
        p = DispersiveParams(1, m, 0.1, 1.0, 50.0, 51.0)
        el = transition_element(transition_spec(1, m, 1, q, "-"), p)
        assert el == pytest.approx(p.omega_eff * math.sqrt((q + 1) * (m - q)))

    def test_bottom_state_annihilated(self):
        p = DispersiveParams(3, 3, 0.4, 0.9, 30.0, 31.0)
        assert transition_element(transition_spec(3, 3, 0, 1, "-"), p) == 0.0

    def test_hermitian_symmetry(self):
        p = DispersiveParams(4, 5, 0.4, 0.9, 30.0, 31.0)
        fwd = transition_element(transition_spec(4, 5, 2, 1, "-"), p)
        back = transition_element(transition_spec(4, 5, 1, 2, "+"), p)
        assert fwd == pytest.approx(back)

    def test_matches_explicit_basis_oracle(self):
        from conftest import oracle_collective_raising
        for n, m in [(2, 2), (3, 4)]:
            p = DispersiveParams(n, m, 0.3, 0.8, 40.0, 41.0)
            nq = n + m
            op = oracle_collective_raising(nq, range(n)).conj().T \
                @ oracle_collective_raising(nq, range(n, nq))
            for k in range(1, n + 1):
                for q in range(m):
                    bra = np.kron(oracle_dicke(n, k - 1), oracle_dicke(m, q + 1))
                    ket = np.kron(oracle_dicke(n, k), oracle_dicke(m, q))
                    oracle = float((bra @ op @ ket).real) * p.omega_eff
                    el = transition_element(transition_spec(n, m, k, q, "-"), p)
                    assert abs(el - oracle) < 1e-12


class TestTauDicke:
    def test_full_register_needs_no_rotation(self):
        assert tau_dicke(3, 3, 1.0) == 0.0

    def test_printed_angle(self):
        # M=3, q=0: arcsin(sqrt(3/4)) = pi/3
        el = 2.7
        assert tau_dicke(3, 0, el) == pytest.approx((math.pi / 3) / el)

    def test_merge_rotation_reaches_dicke_state(self):
        # rotating |e>|D_q^M> by tau at the element rate lands on
        # |D_{q+1}^{M+1}> up to the branch phase (oracle: explicit overlap)
        for m in range(1, 6):
            for q in range(m):
                el = 0.8
                tau = tau_dicke(m, q, el)
                c, s = math.cos(el * tau), math.sin(el * tau)
                combo = c * np.kron([0, 1], oracle_dicke(m, q)) \
                    + 1j * s * np.kron([1, 0], oracle_dicke(m, q + 1))
                overlap = abs(c * math.sqrt((q + 1) / (m + 1))) \
                    + abs(s * math.sqrt((m - q) / (m + 1)))
                assert abs(abs(np.vdot(oracle_dicke(m + 1, q + 1), combo))
                           - math.hypot(c * math.sqrt((q + 1) / (m + 1)),
                                        s * math.sqrt((m - q) / (m + 1)))) < 1e-12
                assert overlap == pytest.approx(1.0, abs=1e-12)

    def test_q_out_of_range(self):
        with pytest.raises(DomainError):
            tau_dicke(3, 4, 1.0)
