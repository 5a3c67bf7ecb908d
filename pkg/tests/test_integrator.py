"""Time stepping: exactness of the diffusion propagator, 4th-order accuracy
of the nonlinear step, steady detection, monitors, and determinism."""

import numpy as np
import pytest

import aggdiff as ad

from conftest import reference_integrate, seeded_state, fig1_like_params


@pytest.fixture
def grid():
    return ad.Grid(128, 1.0)


class TestConfigValidation:
    def test_collects_violations(self):
        with pytest.raises(ad.ConfigError) as err:
            ad.IntegratorConfig(dt=-1.0, t_end=0.0)
        msgs = " ".join(err.value.violations)
        assert "dt" in msgs and "t_end" in msgs

    def test_cadences_must_cover_dt(self):
        with pytest.raises(ad.ConfigError, match="snapshot_every"):
            ad.IntegratorConfig(dt=0.1, t_end=1.0, snapshot_every=0.01)
        with pytest.raises(ad.ConfigError, match="check_every"):
            ad.IntegratorConfig(dt=0.1, t_end=1.0, check_every=0.01)

    def test_monitor_flags_validated(self):
        with pytest.raises(ad.ConfigError):
            ad.Monitors(positivity="maybe")


class TestRk4Step:
    def test_pure_diffusion_propagated_exactly(self, grid):
        # with H = 0 the stepper reduces to the exact heat propagator:
        # each mode decays by exp(-D (2 pi k/L)^2 dt) to machine precision
        params = ad.ModelParams(D=[0.8], H=[[0.0]], kernel=ad.von_mises(grid, 3.0))
        k = 5
        u0 = 1.0 + 0.4 * np.cos(2 * np.pi * k * grid.x)
        state = ad.State(grid, u0[None, :])
        dt = 1e-3
        stepped = ad.rk4_step(state, params, dt)
        decay = np.exp(-0.8 * (2 * np.pi * k) ** 2 * dt)
        want = 1.0 + 0.4 * decay * np.cos(2 * np.pi * k * grid.x)
        assert np.abs(stepped.u[0] - want).max() < 1e-13
        assert stepped.t == dt

    def test_homogeneous_state_is_fixed_point(self, grid):
        params = fig1_like_params(grid)
        state = ad.State(grid, np.vstack([np.ones(128), 2 * np.ones(128)]))
        stepped = ad.rk4_step(state, params, 1e-3)
        assert np.abs(stepped.u - state.u).max() < 1e-14

    def test_one_step_error_is_fifth_order(self, grid):
        # local truncation error of the nonlinear part: halving dt must
        # shrink the one-step error by about 2^5 = 32
        params = fig1_like_params(grid)
        x = grid.x
        u = np.vstack([1 + 0.3 * np.cos(2 * np.pi * x) + 0.1 * np.sin(4 * np.pi * x),
                       1 - 0.2 * np.cos(2 * np.pi * x) + 0.15 * np.sin(6 * np.pi * x)])
        state = ad.State(grid, u)

        def one_step_error(dt):
            coarse = ad.rk4_step(state, params, dt)
            fine = state
            for _ in range(64):
                fine = ad.rk4_step(fine, params, dt / 64)
            return np.abs(coarse.u - fine.u).max()

        ratio = one_step_error(5e-4) / one_step_error(2.5e-4)
        assert 20 < ratio < 40, f"one-step error ratio {ratio}, expected near 32"

    def test_ten_steps_match_tight_reference(self, grid):
        params = fig1_like_params(grid)
        state = seeded_state(grid, seed=42)
        stepped = state
        for _ in range(10):
            stepped = ad.rk4_step(stepped, params, 1e-4)
        ref = reference_integrate(state, params, 10 * 1e-4)
        assert np.abs(stepped.u - ref).max() < 1e-8

    def test_blowup_raises_with_stage(self, grid):
        params = fig1_like_params(grid)
        u = np.ones((2, 128))
        u[0, 0] = np.inf
        state = ad.State.__new__(ad.State)
        state.grid, state.u, state.t = grid, u, 0.5
        state.initial_masses = np.ones(2)
        with pytest.raises(ad.BlowupError) as err:
            ad.rk4_step(state, params, 1e-4)
        assert err.value.t == 0.5


class TestTemporalOrder:
    def test_global_error_fourth_order(self, grid):
        params = fig1_like_params(grid)
        state = seeded_state(grid, seed=42)
        T = 0.05
        ref = reference_integrate(state, params, T)
        errors = []
        for dt in (4e-4, 2e-4, 1e-4):
            result = ad.run(state, params, ad.IntegratorConfig(
                dt=dt, t_end=T, snapshot_every=T, check_every=T, steady_tol=0.0))
            errors.append(np.abs(result.final_state.u - ref).max())
        slope = np.polyfit(np.log([4e-4, 2e-4, 1e-4]), np.log(errors), 1)[0]
        assert 3.7 <= slope <= 4.3, f"temporal order {slope}, errors {errors}"


class TestRun:
    def test_homogeneous_goes_steady_at_first_check(self, grid):
        params = fig1_like_params(grid)
        state = ad.State(grid, np.ones((2, 128)))
        result = ad.run(state, params, ad.IntegratorConfig(dt=1e-3, t_end=1.0))
        assert result.outcome == ad.STEADY
        assert result.outcome_t == pytest.approx(0.01)
        assert np.abs(result.final_state.u - state.u).max() < 1e-12

    def test_snapshots_strictly_increasing_and_final_matches(self, grid):
        params = fig1_like_params(grid)
        state = seeded_state(grid, seed=3)
        result = ad.run(state, params, ad.IntegratorConfig(
            dt=1e-3, t_end=0.3, snapshot_every=0.05, steady_tol=0.0))
        assert np.all(np.diff(result.snapshot_t) > 0)
        assert result.snapshot_t[0] == 0.0
        assert result.snapshot_t[-1] == pytest.approx(0.3)
        assert np.array_equal(result.snapshots[-1], result.final_state.u)

    def test_mass_conserved_and_positive(self, grid):
        params = fig1_like_params(grid)
        state = seeded_state(grid, seed=7)
        result = ad.run(state, params, ad.IntegratorConfig(dt=2e-4, t_end=2.0))
        masses0 = ad.total_mass(state)
        drift = np.abs(result.diagnostics.masses - masses0).max()
        assert drift < 1e-10
        assert result.diagnostics.min_value.min() > 0

    def test_blowup_outcome_preserves_diagnostics(self, grid):
        # strong self-attraction at a huge step size destabilizes the
        # nonlinear advection; the run must stop with partial diagnostics
        kernel = ad.von_mises(grid, 41.01)
        params = ad.ModelParams(D=[0.05, 0.05], H=[[8.0, 0.0], [0.0, 8.0]],
                                kernel=kernel)
        state = seeded_state(grid, seed=1, amplitude=0.05)
        cfg = ad.IntegratorConfig(dt=1.0, t_end=200.0, check_every=1.0,
                                  snapshot_every=1.0,
                                  monitors=ad.Monitors(positivity="off", mass="off"))
        result = ad.run(state, params, cfg)
        assert result.outcome == ad.BLOWUP
        assert result.outcome_t <= 200.0
        assert np.all(np.isfinite(result.snapshots))

    def test_strict_mass_monitor_raises_on_drift(self, grid):
        # inject drift by lying about the recorded initial masses
        params = fig1_like_params(grid)
        state = ad.State(grid, np.ones((2, 128)), 0.0,
                         initial_masses=np.array([2.0, 2.0]))
        cfg = ad.IntegratorConfig(dt=1e-3, t_end=0.1,
                                  monitors=ad.Monitors(mass="strict"))
        with pytest.raises(ad.MassDriftError):
            ad.run(state, params, cfg)

    def test_positivity_monitor_warns(self, grid):
        params = fig1_like_params(grid)
        u = np.vstack([np.ones(128), np.ones(128)])
        u[0] -= 1.0 + 1e-3 * np.cos(2 * np.pi * grid.x)  # negative lobe
        u[0] += 1.0
        state = ad.State(grid, np.vstack([1e-3 * np.cos(2 * np.pi * grid.x) + 1e-6,
                                          np.ones(128)]))
        cfg = ad.IntegratorConfig(dt=1e-4, t_end=0.02,
                                  monitors=ad.Monitors(positivity="warn", mass="off"))
        with pytest.warns(UserWarning, match="positivity"):
            ad.run(state, params, cfg)

    def test_deterministic_run(self, grid):
        params = fig1_like_params(grid)
        results = []
        for _ in range(2):
            state = seeded_state(grid, seed=11)
            results.append(ad.run(state, params, ad.IntegratorConfig(
                dt=1e-3, t_end=0.2, steady_tol=0.0)))
        assert np.array_equal(results[0].final_state.u, results[1].final_state.u)
        assert np.array_equal(results[0].snapshots, results[1].snapshots)

    def test_growth_envelope_reported(self, grid):
        params = fig1_like_params(grid)
        state = seeded_state(grid, seed=2)
        result = ad.run(state, params, ad.IntegratorConfig(dt=2e-4, t_end=0.5,
                                                           steady_tol=0.0))
        C, alpha = result.diagnostics.growth_envelope()
        norms = result.diagnostics.l2_norms.sum(axis=1)
        t = result.diagnostics.t
        assert np.all(norms <= C * np.exp(alpha * (t - t[0])) * (1 + 1e-12))
