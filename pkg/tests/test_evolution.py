import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_density, unitary_conjugation
from qcorr.errors import ConfigError, NotPhysical, StepTooLarge, TruncationOverflow
from qcorr.evolution import (
    evolve_series,
    integrate_master,
    kraus_completeness,
    kraus_operators,
    liouvillian,
    propagate_kraus,
    propagate_spectral,
    relaxation_time,
    steady_state,
)
from qcorr.hamiltonian import ModelParams, analytic_eigensystem, build_hamiltonian, eigensystem
from qcorr.states import BellDiagonalSpec, WernerSpec, bell_diagonal, werner

FIG1A = ModelParams(1.6, 0.25)


def _commutator(a, b):
    return a @ b - b @ a


class TestSpectral:
    def test_time_zero_is_identity(self, rng):
        rho = random_density(rng)
        np.testing.assert_array_equal(propagate_spectral(eigensystem(FIG1A), rho, 0.1, 0.0), rho)

    def test_mixed_state_invariant(self):
        es = eigensystem(FIG1A)
        np.testing.assert_allclose(propagate_spectral(es, np.eye(4) / 4, 0.2, 7.0), np.eye(4) / 4, atol=1e-15)

    def test_energy_eigenstates_stationary(self):
        es = eigensystem(FIG1A)
        for m in range(4):
            p = es.projector(m)
            np.testing.assert_allclose(propagate_spectral(es, p, 0.3, 5.0), p, atol=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(
        st.floats(0, 2.5), st.floats(0, 2.5), st.floats(0, 0.3), st.floats(0, 10),
        st.integers(0, 2**32 - 1),
    )
    def test_physicality_preserved(self, mu, b, gamma, t, seed):
        rho0 = random_density(np.random.default_rng(seed))
        es = eigensystem(ModelParams(mu, b))
        rho = propagate_spectral(es, rho0, gamma, t)
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
        assert np.linalg.eigvalsh(rho).min() > -1e-12

    def test_energy_populations_conserved(self, rng):
        es = eigensystem(FIG1A)
        rho0 = random_density(rng)
        rho = propagate_spectral(es, rho0, 0.25, 4.0)
        for m in range(4):
            p = es.projector(m)
            assert np.trace(p @ rho).real == pytest.approx(np.trace(p @ rho0).real, abs=1e-13)

    def test_generator_derivative(self, rng):
        # Central difference of the propagator reproduces the master-equation right-hand side.
        es = eigensystem(FIG1A)
        h = build_hamiltonian(FIG1A)
        rho0 = random_density(rng)
        gamma, t, eps = 0.2, 1.3, 1e-5
        rho = propagate_spectral(es, rho0, gamma, t)
        deriv = (propagate_spectral(es, rho0, gamma, t + eps) - propagate_spectral(es, rho0, gamma, t - eps)) / (2 * eps)
        rhs = -1j * _commutator(h, rho) - 0.5 * gamma * _commutator(h, _commutator(h, rho))
        np.testing.assert_allclose(deriv, rhs, atol=1e-8)

    def test_unitary_limit(self, rng):
        es = eigensystem(FIG1A)
        rho0 = random_density(rng)
        np.testing.assert_allclose(
            propagate_spectral(es, rho0, 0.0, 3.3),
            unitary_conjugation(build_hamiltonian(FIG1A), rho0, 3.3),
            atol=1e-12,
        )

    def test_rejects_bad_arguments(self, rng):
        es = eigensystem(FIG1A)
        with pytest.raises(ConfigError):
            propagate_spectral(es, np.eye(4) / 4, -0.1, 1.0)
        with pytest.raises(ConfigError):
            propagate_spectral(es, np.eye(4) / 4, 0.1, math.nan)
        with pytest.raises(NotPhysical):
            propagate_spectral(es, np.eye(4), 0.1, 1.0)


class TestKraus:
    def test_completeness(self):
        ops = kraus_operators(eigensystem(FIG1A), 0.1, 5.0)
        assert kraus_completeness(ops) < 1e-10
        assert len(ops) >= 41

    def test_gamma_zero_single_unitary(self):
        ops = kraus_operators(eigensystem(FIG1A), 0.0, 2.0)
        from scipy.linalg import expm

        np.testing.assert_allclose(ops[0], expm(-2j * build_hamiltonian(FIG1A)), atol=1e-13)
        assert all(np.max(np.abs(m)) == 0 for m in ops[1:])

    def test_auto_extension(self):
        es = eigensystem(ModelParams(2.5, 2.5))
        ops = kraus_operators(es, 0.3, 10.0)
        assert len(ops) > 41
        assert kraus_completeness(ops) < 1e-10

    def test_truncation_reported(self):
        es = eigensystem(ModelParams(2.5, 2.5))
        with pytest.raises(TruncationOverflow):
            kraus_operators(es, 5.0, 1000.0)

    def test_matches_spectral(self, rng):
        es = eigensystem(FIG1A)
        rho0 = random_density(rng)
        np.testing.assert_allclose(
            propagate_kraus(rho0, kraus_operators(es, 0.2, 6.0)),
            propagate_spectral(es, rho0, 0.2, 6.0),
            atol=1e-12,
        )

    def test_operators_from_matrix_powers(self):
        # M_l built directly from H^l for a small case
        from scipy.linalg import expm

        h = build_hamiltonian(FIG1A)
        gamma, t = 0.1, 2.0
        ops = kraus_operators(eigensystem(FIG1A), gamma, t, l_max=40)
        base = expm(-1j * h * t) @ expm(-0.5 * gamma * t * h @ h)
        for l in range(5):
            direct = (gamma * t) ** (l / 2) / math.sqrt(math.factorial(l)) * np.linalg.matrix_power(h, l) @ base
            np.testing.assert_allclose(ops[l], direct, atol=1e-12)


class TestRK4:
    def test_liouvillian_matches_commutators(self, rng):
        h = build_hamiltonian(FIG1A)
        rho = random_density(rng)
        gamma = 0.3
        rhs = -1j * _commutator(h, rho) - 0.5 * gamma * _commutator(h, _commutator(h, rho))
        np.testing.assert_allclose((liouvillian(h, gamma) @ rho.reshape(-1)).reshape(4, 4), rhs, atol=1e-13)

    def test_matches_spectral(self, rng):
        rho0 = random_density(rng)
        got = integrate_master(build_hamiltonian(FIG1A), rho0, 0.1, 3.0)
        np.testing.assert_allclose(got, propagate_spectral(eigensystem(FIG1A), rho0, 0.1, 3.0), atol=1e-9)

    def test_fourth_order(self, rng):
        h = build_hamiltonian(ModelParams(2.0, 1.5))
        rho0 = random_density(rng)
        exact = propagate_spectral(eigensystem(ModelParams(2.0, 1.5)), rho0, 0.2, 2.0)
        e1 = np.max(np.abs(integrate_master(h, rho0, 0.2, 2.0, dt=0.04) - exact))
        e2 = np.max(np.abs(integrate_master(h, rho0, 0.2, 2.0, dt=0.02) - exact))
        assert 12 < e1 / e2 < 20

    def test_step_too_large(self):
        h = build_hamiltonian(ModelParams(2.5, 2.5))
        with pytest.raises(StepTooLarge):
            integrate_master(h, np.diag([1.0, 0, 0, 0]), 0.3, 50.0, dt=1.0)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ConfigError):
            integrate_master(build_hamiltonian(FIG1A), np.eye(4) / 4, 0.1, 1.0, dt=0.0)


class TestSteadyState:
    def test_idempotent(self):
        es = eigensystem(FIG1A)
        ss = steady_state(es, bell_diagonal(BellDiagonalSpec(0.9, -0.4, 0.4)))
        np.testing.assert_allclose(steady_state(es, ss), ss, atol=1e-15)

    def test_commutes_with_hamiltonian(self, rng):
        es = eigensystem(FIG1A)
        ss = steady_state(es, random_density(rng))
        np.testing.assert_allclose(_commutator(build_hamiltonian(FIG1A), ss), 0, atol=1e-13)

    def test_long_time_limit(self, rng):
        es = eigensystem(FIG1A)
        rho0 = random_density(rng)
        t = relaxation_time(es, 0.1)
        np.testing.assert_allclose(propagate_spectral(es, rho0, 0.1, t), steady_state(es, rho0), atol=1e-10)

    def test_relaxation_time(self):
        es = analytic_eigensystem(1.6, 0.25)
        gaps = np.abs(np.subtract.outer(es.energies, es.energies))
        dmin = gaps[gaps > 1e-12].min()
        assert relaxation_time(es, 0.1) == pytest.approx(50 / (0.1 * dmin**2))
        assert relaxation_time(es, 0.0) == math.inf


class TestSeries:
    @pytest.mark.parametrize("backend", ["spectral", "kraus", "rk4"])
    def test_backends_agree(self, backend):
        rho0 = werner(WernerSpec(0.9))
        times = np.linspace(0, 3, 7)
        ref = evolve_series(FIG1A, rho0, 0.1, times, "spectral")
        got = evolve_series(FIG1A, rho0, 0.1, times, backend)
        np.testing.assert_allclose(got, ref, atol=1e-9)

    def test_rejects_unknown_backend(self):
        with pytest.raises(ConfigError):
            evolve_series(FIG1A, np.eye(4) / 4, 0.1, [0, 1], "euler")

    def test_rejects_decreasing_times(self):
        with pytest.raises(ConfigError):
            evolve_series(FIG1A, np.eye(4) / 4, 0.1, [1, 0])
