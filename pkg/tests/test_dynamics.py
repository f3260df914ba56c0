"""Rate equations, closed-form steady state, Liouvillian solvers, fidelity."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from wstate_forge.dynamics import (
    DensityMatrix,
    PopulationState,
    SteadySolver,
    build_liouvillian,
    fidelity,
    fidelity_ceiling,
    integrate_rate_equations,
    lindblad_steady_state,
    match_targets,
    ness_closed_form,
    rate_equation_rhs,
    rate_steady_state,
    solve_ness,
)
from wstate_forge.effective import build_effective_model, exact_diagonalization
from wstate_forge.model import Boundary, DriveProfile, SystemParams, build_mode_set
from wstate_forge.rates import RateTable, optimal_drive_frequency, rate_table

TWO_PI = 2.0 * np.pi
GAMMA = 1e-5 * TWO_PI
GAMMA_PHI = 1e-6 * TWO_PI


def make_params(n=3, boundary=Boundary.OPEN, **kw):
    defaults = dict(
        n_sites=n,
        omega_c=6.0 * TWO_PI,
        omega_q=7.0 * TWO_PI,
        g=0.1 * TWO_PI,
        j_hop=0.1 * TWO_PI,
        kappa=1e-4 * TWO_PI,
        gamma=GAMMA,
        gamma_phi=GAMMA_PHI,
        boundary=boundary,
    )
    defaults.update(kw)
    return SystemParams(**defaults)


def optimally_driven(params, modes, amplitude, target=0):
    drive = DriveProfile.uniform(params.n_sites, amplitude, 6.505 * TWO_PI)
    w_opt = optimal_drive_frequency(params, modes, drive, target, target)
    return drive.with_omega_d(w_opt)


gamma_arrays = hnp.arrays(
    dtype=float,
    shape=st.integers(min_value=1, max_value=8),
    elements=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
)


# ----------------------------------------------------------------- types


class TestStateTypes:
    def test_population_total(self):
        st_ = PopulationState(0.4, np.array([0.3, 0.3]))
        assert st_.total == pytest.approx(1.0)
        st_.validate()

    def test_population_rejects_leak(self):
        with pytest.raises(ValueError, match="sum"):
            PopulationState(0.5, np.array([0.1])).validate()

    def test_density_matrix_validates(self):
        DensityMatrix(np.eye(4) / 4).validate()

    def test_density_matrix_rejects_nonhermitian(self):
        m = np.eye(2, dtype=complex)
        m[0, 1] = 0.3
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(m / np.trace(m)).validate()

    def test_density_matrix_rejects_negative(self):
        with pytest.raises(ValueError, match="negative"):
            DensityMatrix(np.diag([1.1, -0.1])).validate()


# ----------------------------------------------------------- closed form


class TestNessClosedForm:
    def test_undriven_thermalizes_to_ground(self):
        pops = ness_closed_form(np.zeros(5), GAMMA, GAMMA_PHI, 5)
        assert pops.n0 == 1.0
        np.testing.assert_array_equal(pops.nk, 0.0)

    def test_single_channel_no_dephasing(self):
        g_pump = 3.7 * GAMMA
        pops = ness_closed_form(np.array([g_pump, 0.0]), GAMMA, 0.0, 2)
        assert pops.nk[0] == pytest.approx(g_pump / (GAMMA + g_pump), rel=1e-14)
        assert pops.nk[1] == 0.0

    def test_ceiling_value(self):
        # saturating pump into one channel approaches the bound from below
        assert fidelity_ceiling(GAMMA, GAMMA_PHI, 5) == pytest.approx(0.8667, abs=1e-4)
        strong = ness_closed_form(np.array([1e7 * GAMMA, 0, 0, 0, 0]), GAMMA, GAMMA_PHI, 5)
        assert strong.nk[0] < fidelity_ceiling(GAMMA, GAMMA_PHI, 5)
        assert strong.nk[0] == pytest.approx(fidelity_ceiling(GAMMA, GAMMA_PHI, 5), abs=1e-4)

    def test_no_relaxation_rejected(self):
        with pytest.raises(ValueError, match="gamma"):
            ness_closed_form(np.array([0.1]), 0.0, GAMMA_PHI, 1)
        with pytest.raises(ValueError, match="gamma"):
            fidelity_ceiling(0.0, GAMMA_PHI, 2)

    @given(g_up=gamma_arrays)
    @settings(max_examples=60, deadline=None)
    def test_is_fixed_point(self, g_up):
        pops = ness_closed_form(g_up, GAMMA, GAMMA_PHI, len(g_up))
        rhs = rate_equation_rhs(pops, g_up, GAMMA, GAMMA_PHI, len(g_up))
        assert abs(rhs.n0) < 1e-12
        assert np.abs(rhs.nk).max() < 1e-12
        assert pops.total == pytest.approx(1.0, abs=1e-12)
        assert np.all(pops.nk >= 0) and 0 <= pops.n0 <= 1


class TestRateEquationRhs:
    @given(
        g_up=gamma_arrays,
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_conserves_total_population(self, g_up, seed):
        rng = np.random.default_rng(seed)
        n = len(g_up)
        state = PopulationState(rng.uniform(0, 1), rng.uniform(0, 1, size=n))
        d = rate_equation_rhs(state, g_up, GAMMA, GAMMA_PHI, n)
        assert abs(d.n0 + np.sum(d.nk)) < 1e-12

    def test_initial_pump_rate(self):
        g_up = np.array([0.2, 0.05, 0.0])
        d = rate_equation_rhs(PopulationState(1.0, np.zeros(3)), g_up, GAMMA, GAMMA_PHI, 3)
        np.testing.assert_array_equal(d.nk, g_up)


class TestIntegrateRateEquations:
    def test_pure_decay_analytic(self):
        # with no pump the total excited weight obeys dX/dt = -gamma X
        # regardless of dephasing
        init = PopulationState(0.2, np.array([0.5, 0.3]))
        traj = integrate_rate_equations(init, np.zeros(2), GAMMA, GAMMA_PHI, 2, 5.0 / GAMMA)
        expected_n0 = 1.0 - 0.8 * np.exp(-GAMMA * traj.times)
        np.testing.assert_allclose(traj.n0, expected_n0, atol=1e-9)

    def test_reaches_closed_form(self):
        g_up = np.array([0.12, 0.0, 0.033])
        traj = integrate_rate_equations(
            PopulationState(1.0, np.zeros(3)), g_up, GAMMA, GAMMA_PHI, 3, 20.0 / GAMMA
        )
        pops = ness_closed_form(g_up, GAMMA, GAMMA_PHI, 3)
        assert abs(traj.final.n0 - pops.n0) < 1e-8
        np.testing.assert_allclose(traj.final.nk, pops.nk, atol=1e-8)

    def test_trajectory_conservation(self):
        g_up = np.array([0.2, 0.07])
        traj = integrate_rate_equations(
            PopulationState(1.0, np.zeros(2)), g_up, GAMMA, GAMMA_PHI, 2, 10.0 / GAMMA
        )
        totals = traj.n0 + traj.nk.sum(axis=1)
        np.testing.assert_allclose(totals, 1.0, atol=1e-10)


# ------------------------------------------------------------- liouvillian


def _zero_rate_table(params, modes, omega_d=6.505 * TWO_PI):
    drive = DriveProfile(np.zeros(params.n_sites), omega_d)
    return rate_table(params, drive, modes), drive


class TestBuildLiouvillian:
    def test_trace_preservation_rows(self):
        params = make_params(n=2)
        modes = build_mode_set(params)
        drive = DriveProfile.uniform(2, 0.05 * TWO_PI, 6.505 * TWO_PI)
        table = rate_table(params, drive, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=2)
        for window in (None, 100 * params.kappa):
            liou = build_liouvillian(eig, table, GAMMA, GAMMA_PHI, 2, secular_window=window)
            dim = len(eig.energies)
            trace_rows = np.arange(dim) * (dim + 1)
            assert np.abs(liou[trace_rows, :].sum(axis=0)).max() < 1e-12

    def test_closed_system_is_purely_coherent(self):
        params = make_params(n=2)
        modes = build_mode_set(params)
        table, drive = _zero_rate_table(params, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=2)
        liou = build_liouvillian(eig, table, 0.0, 0.0, 2)
        eigs = np.linalg.eigvals(liou)
        assert np.abs(eigs.real).max() < 1e-12 * max(np.abs(eigs).max(), 1.0)

    def test_weak_drive_matches_closed_form(self):
        # single-excitation truncation: Lindblad diagonal against the
        # rate-equation fixed point
        params = make_params(n=2)
        modes = build_mode_set(params)
        drive = optimally_driven(params, modes, 1e-3 * TWO_PI)
        table = rate_table(params, drive, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=1)
        liou = build_liouvillian(eig, table, GAMMA, GAMMA_PHI, 2, secular_window=100 * params.kappa)
        ness = solve_ness(liou)
        closed = ness_closed_form(table, GAMMA, GAMMA_PHI, 2)
        diag = np.real(np.diag(ness.rho.entries))
        cols = match_targets(eig, table)
        np.testing.assert_allclose([diag[c] for c in cols], closed.nk, atol=1e-6)
        assert diag[eig.ground_index()] == pytest.approx(closed.n0, abs=1e-6)

    def test_dimension_cap(self):
        params = make_params(n=6)
        modes = build_mode_set(params)
        table, drive = _zero_rate_table(params, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=6)
        with pytest.raises(ValueError, match="cap"):
            build_liouvillian(eig, table, GAMMA, GAMMA_PHI, 6)

    def test_ambiguous_target_matching_rejected(self):
        params = make_params(n=2)
        modes = build_mode_set(params)
        table, drive = _zero_rate_table(params, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=1)
        doubled = RateTable(
            target_labels=(table.target_labels[0], table.target_labels[0]),
            gamma_up=np.zeros(2),
            matrix_elements=np.vstack([table.matrix_elements[0], table.matrix_elements[0]]),
            drive_frequency=table.drive_frequency,
            target_sites=np.column_stack([table.target_sites[:, 0], table.target_sites[:, 0]]),
            transition_energies=np.array([table.transition_energies[0]] * 2),
        )
        with pytest.raises(ValueError, match="one-to-one"):
            match_targets(eig, doubled)


class TestSolveNess:
    def test_pure_decay_lands_on_ground(self):
        params = make_params(n=3)
        modes = build_mode_set(params)
        table, drive = _zero_rate_table(params, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=2)
        ness = solve_ness(build_liouvillian(eig, table, GAMMA, 0.0, 3))
        g = eig.ground_index()
        assert ness.rho.entries[g, g].real == pytest.approx(1.0, abs=1e-10)
        ness.rho.validate()

    def test_degenerate_kernel_rejected(self):
        with pytest.raises(ValueError, match="kernel dimension"):
            solve_ness(np.zeros((16, 16)))

    def test_null_space_and_propagation_agree(self):
        params = make_params(n=4)
        modes = build_mode_set(params)
        drive = optimally_driven(params, modes, 0.02 * TWO_PI)
        table = rate_table(params, drive, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=2)
        liou = build_liouvillian(eig, table, GAMMA, GAMMA_PHI, 4, secular_window=100 * params.kappa)
        a = solve_ness(liou, method="null_space")
        b = solve_ness(liou, method="propagation")
        assert a.solver is SteadySolver.LINDBLAD_NULL_SPACE
        assert b.solver is SteadySolver.LINDBLAD_PROPAGATION
        diff = a.rho.entries - b.rho.entries
        trace_distance = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(diff)))
        assert trace_distance < 1e-6
        for result in (a, b):
            result.rho.validate()


class TestFidelity:
    def test_pure_state(self):
        psi = np.array([1.0, 1.0j]) / np.sqrt(2)
        assert fidelity(DensityMatrix(np.outer(psi, psi.conj())), psi) == pytest.approx(1.0)

    def test_maximally_mixed(self):
        psi = np.array([1.0, 0.0, 0.0, 0.0])
        assert fidelity(DensityMatrix(np.eye(4) / 4), psi) == pytest.approx(0.25)

    def test_diagonal_ensemble_reads_population(self):
        pops = np.array([0.55, 0.3, 0.15])
        psi = np.array([0.0, 1.0, 0.0])
        assert fidelity(DensityMatrix(np.diag(pops)), psi) == pytest.approx(0.3)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            fidelity(DensityMatrix(np.eye(2) / 2), np.array([1.0, 0.0, 0.0]))


# ------------------------------------------------- solver cross-validation


@pytest.mark.filterwarnings("ignore:drive admixture")
class TestSolverCrossValidation:
    def test_rate_vs_lindblad_at_optimum(self):
        params = make_params(n=3)
        modes = build_mode_set(params)
        drive = optimally_driven(params, modes, 0.3 * TWO_PI)
        rate_res = rate_steady_state(params, drive, modes)
        lind_res = lindblad_steady_state(params, drive, modes)
        assert np.abs(rate_res.populations.nk - lind_res.populations.nk).max() < 0.02
        assert abs(rate_res.populations.n0 - lind_res.populations.n0) < 0.02
        assert lind_res.pop_beyond_single < 1e-3
        assert rate_res.solver is SteadySolver.RATE_CLOSED_FORM
        assert lind_res.solver is SteadySolver.LINDBLAD_NULL_SPACE

    def test_lindblad_coherences_stay_small(self):
        # precondition of the agreement claim: eigenbasis coherences < 0.01
        params = make_params(n=3)
        modes = build_mode_set(params)
        drive = optimally_driven(params, modes, 0.3 * TWO_PI)
        table = rate_table(params, drive, modes)
        eig = exact_diagonalization(build_effective_model(params, drive), drive, max_excitations=2)
        liou = build_liouvillian(
            eig, table, params.gamma, params.gamma_phi, 3, secular_window=100 * params.kappa
        )
        rho = solve_ness(liou).rho.entries
        off_diag = rho - np.diag(np.diag(rho))
        assert np.abs(off_diag).max() < 0.01

    def test_fidelities_equal_matched_populations(self):
        params = make_params(n=3)
        modes = build_mode_set(params)
        drive = optimally_driven(params, modes, 0.1 * TWO_PI)
        res = lindblad_steady_state(params, drive, modes)
        np.testing.assert_allclose(res.fidelities, res.populations.nk, atol=1e-14)
