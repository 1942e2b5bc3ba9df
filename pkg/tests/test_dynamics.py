from __future__ import annotations

import numpy as np
import pytest

from fockthermo.bath import rates, thermal_occupation
from fockthermo.dynamics import (
    EvolutionConfig,
    EvolutionMethod,
    birth_death_generator,
    evolve,
    lindblad_rhs,
    mean_photon_analytic,
    population_vector,
    propagate_populations,
    short_time_populations,
)
from fockthermo.errors import DomainError, MethodMismatchError, PositivityError, TruncationError
from fockthermo.probes import ProbeSpec, default_dim, make_state

GAMMA_PLUS = 0.015651764274966565
GAMMA_MINUS = 0.11565176427496657


class TestLindbladRhs:
    def test_thermal_state_is_stationary(self, fig_bath, fig_rates):
        nT = thermal_occupation(fig_bath.omega, fig_bath.T)
        rho = make_state(ProbeSpec.thermal(nT), 40)
        rhs = lindblad_rhs(rho, fig_rates)
        assert np.max(np.abs(rhs)) < 1e-10 * fig_rates.gamma0

    def test_vacuum_absorption_channel(self, fig_rates):
        rho = make_state(ProbeSpec.fock(0), 6)
        rhs = lindblad_rhs(rho, fig_rates)
        assert rhs[1, 1].real == pytest.approx(GAMMA_PLUS, rel=1e-12)

    def test_fock1_diagonal_flow(self, fig_rates):
        rho = make_state(ProbeSpec.fock(1), 6)
        diag = lindblad_rhs(rho, fig_rates).diagonal().real
        expected = np.zeros(6)
        expected[0] = GAMMA_MINUS
        expected[1] = -(2 * GAMMA_PLUS + GAMMA_MINUS)
        expected[2] = 2 * GAMMA_PLUS
        np.testing.assert_allclose(diag, expected, rtol=1e-12, atol=1e-18)

    def test_traceless_and_hermitian(self, fig_rates):
        rho = make_state(ProbeSpec.coherent(1.0 + 0.3j), 40)
        rhs = lindblad_rhs(rho, fig_rates)
        assert abs(np.trace(rhs)) < 1e-12
        assert np.max(np.abs(rhs - rhs.conj().T)) < 1e-14

    def test_matches_birth_death_generator_on_populations(self, fig_rates):
        p0 = make_state(ProbeSpec.thermal(0.8), 30).populations
        rho = np.diag(p0).astype(complex)
        np.testing.assert_allclose(
            lindblad_rhs(rho, fig_rates).diagonal().real,
            birth_death_generator(30, fig_rates) @ p0,
            atol=1e-16,
        )


class TestEvolve:
    def test_zero_time_returns_state(self, fig_rates):
        rho = make_state(ProbeSpec.fock(2), 10)
        out = evolve(rho, fig_rates, EvolutionConfig(t_final=0.0))
        np.testing.assert_array_equal(out.mat, rho.mat)

    def test_fock1_short_time_populations(self, fig_rates):
        rho = make_state(ProbeSpec.fock(1), 40)
        cfg = EvolutionConfig(t_final=0.01, method=EvolutionMethod.BIRTH_DEATH_EXPM)
        p = evolve(rho, fig_rates, cfg).populations
        assert p[2] == pytest.approx(GAMMA_PLUS * 0.01 * 2, rel=0.02)
        assert p[0] == pytest.approx(GAMMA_MINUS * 0.01, rel=0.02)

    def test_fock1_mean_photon_relaxation(self, fig_rates):
        rho = make_state(ProbeSpec.fock(1), 40)
        cfg = EvolutionConfig(t_final=1.0, method=EvolutionMethod.BIRTH_DEATH_EXPM)
        out = evolve(rho, fig_rates, cfg)
        assert out.mean_photon() == pytest.approx(0.9197320410429429, abs=1e-9)

    def test_rk4_matches_expm_on_diagonals(self, fig_bath):
        for T in (0.3, 1.0):
            r = rates(fig_bath.with_temperature(T))
            for t in (0.1, 1.0):
                rho = make_state(ProbeSpec.fock(1), 40)
                full = evolve(rho, r, EvolutionConfig(t_final=t, method=EvolutionMethod.RK4_FULL))
                fast = evolve(
                    rho, r, EvolutionConfig(t_final=t, method=EvolutionMethod.BIRTH_DEATH_EXPM)
                )
                assert np.max(np.abs(full.populations - fast.populations)) <= 1e-8

    def test_diagonal_states_stay_exactly_diagonal(self, fig_rates):
        for spec in (ProbeSpec.fock(1), ProbeSpec.thermal(0.5)):
            rho = make_state(spec, 40)
            out = evolve(rho, fig_rates, EvolutionConfig(t_final=0.5))
            assert out.max_offdiagonal() == 0.0

    def test_trace_preserved_for_coherent_probe(self, fig_rates):
        rho = make_state(ProbeSpec.coherent(1.0), 40)
        out = evolve(rho, fig_rates, EvolutionConfig(t_final=1.0))
        assert abs(out.mat.trace().real - 1.0) < 1e-9

    def test_thermal_fixed_point(self, fig_bath, fig_rates):
        nT = thermal_occupation(fig_bath.omega, fig_bath.T)
        rho = make_state(ProbeSpec.thermal(nT), 40)
        out = evolve(rho, fig_rates, EvolutionConfig(t_final=1.0))
        assert np.max(np.abs(out.mat - rho.mat)) < 1e-8

    @pytest.mark.parametrize(
        "spec",
        [ProbeSpec.fock(1), ProbeSpec.coherent(1.0), ProbeSpec.squeezed(0.881373587019543),
         ProbeSpec.thermal(0.5)],
    )
    def test_first_moment_law_all_probe_classes(self, fig_rates, spec):
        rho = make_state(spec, default_dim(spec))
        out = evolve(rho, fig_rates, EvolutionConfig(t_final=0.5))
        expected = mean_photon_analytic(rho.mean_photon(), fig_rates, 0.5)
        assert abs(out.mean_photon() - expected) < 1e-7

    def test_expm_demands_diagonal_state(self, fig_rates):
        rho = make_state(ProbeSpec.coherent(1.0), 40)
        cfg = EvolutionConfig(t_final=0.1, method=EvolutionMethod.BIRTH_DEATH_EXPM)
        with pytest.raises(MethodMismatchError):
            evolve(rho, fig_rates, cfg)

    def test_leakage_budget_aborts(self, fig_rates):
        rho = make_state(ProbeSpec.fock(8), 10)
        with pytest.raises(TruncationError, match="raise dim"):
            evolve(rho, fig_rates, EvolutionConfig(t_final=1.0))

    def test_positivity_throughout(self, fig_rates):
        rho = make_state(ProbeSpec.squeezed(0.6), 50)
        out = evolve(rho, fig_rates, EvolutionConfig(t_final=0.5))
        assert float(np.linalg.eigvalsh(out.mat).min()) > -1e-9


class TestEvolutionConfig:
    def test_default_step_rule(self, fig_rates):
        cfg = EvolutionConfig(t_final=10.0)
        assert cfg.step(fig_rates) == pytest.approx(1e-3 / fig_rates.gamma_minus)
        cfg = EvolutionConfig(t_final=0.1)
        assert cfg.step(fig_rates) == pytest.approx(1e-3)

    def test_validation(self):
        with pytest.raises(DomainError):
            EvolutionConfig(t_final=-1.0)
        with pytest.raises(DomainError):
            EvolutionConfig(t_final=1.0, dt=0.0)
        with pytest.raises(DomainError):
            EvolutionConfig(t_final=0.5, dt=1.0)


class TestShortTimePopulations:
    def test_vacuum_has_no_decay_channel(self, fig_rates):
        pops = short_time_populations(0, fig_rates, 0.01)
        assert pops.p_below == 0.0

    def test_reference_triple(self, fig_rates):
        pops = short_time_populations(1, fig_rates, 0.01)
        assert pops.p_below == pytest.approx(0.0011565176427496657, rel=1e-12)
        assert pops.p_above == pytest.approx(0.0003130352854993313, rel=1e-12)
        assert pops.p_stay == pytest.approx(0.998530447071751, rel=1e-12)
        assert pops.valid

    def test_probabilities_sum_to_one_exactly(self, fig_rates):
        pops = short_time_populations(3, fig_rates, 0.05)
        assert pops.p_below + pops.p_stay + pops.p_above == 1.0

    def test_validity_flag(self, fig_rates):
        assert not short_time_populations(5, fig_rates, 1.0).valid

    def test_exact_populations_within_linear_band(self, fig_rates):
        # Gamma0 t = 1e-3: exact and first-order populations agree to O(Gamma0 t)
        t = 1e-3 / fig_rates.gamma0
        rho = make_state(ProbeSpec.fock(1), 40)
        p = evolve(
            rho, fig_rates, EvolutionConfig(t_final=t, method=EvolutionMethod.BIRTH_DEATH_EXPM)
        ).populations
        pred = short_time_populations(1, fig_rates, t)
        band = 10.0 * fig_rates.gamma0 * t
        for exact, lin in ((p[0], pred.p_below), (p[1], pred.p_stay), (p[2], pred.p_above)):
            assert 1.0 - band <= exact / lin <= 1.0 + band


class TestMeanPhotonAnalytic:
    def test_initial_value(self, fig_rates):
        assert mean_photon_analytic(2.5, fig_rates, 0.0) == 2.5

    def test_long_time_thermalizes(self, fig_rates):
        assert mean_photon_analytic(5.0, fig_rates, 1e6) == pytest.approx(
            fig_rates.nbar, rel=1e-12
        )

    def test_reference_value(self, fig_rates):
        assert mean_photon_analytic(1.0, fig_rates, 1.0) == pytest.approx(
            0.9197320410429429, rel=1e-12
        )

    def test_negative_time_rejected(self, fig_rates):
        with pytest.raises(DomainError):
            mean_photon_analytic(1.0, fig_rates, -0.1)


class TestPopulations:
    def test_generator_columns_sum_to_zero(self, fig_rates):
        W = birth_death_generator(12, fig_rates)
        np.testing.assert_allclose(W.sum(axis=0), 0.0, atol=1e-16)

    def test_propagator_preserves_total_probability(self, fig_rates):
        p0 = np.zeros(20)
        p0[3] = 1.0
        p = propagate_populations(p0, fig_rates, 2.0)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(p >= 0.0)

    def test_population_vector_validation(self):
        with pytest.raises(DomainError):
            population_vector(np.array([0.5, 0.4]))
        with pytest.raises(PositivityError):
            population_vector(np.array([1.0 + 1e-6, -1e-6]))
        clipped = population_vector(np.array([1.0, -1e-13, 1e-13]))
        assert clipped[1] == 0.0
