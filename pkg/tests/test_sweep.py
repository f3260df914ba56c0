"""Config parsing, sweep orchestration, disorder ensembles, CLI plumbing."""

import json

import numpy as np
import pytest

from wstate_forge.cli import main
from wstate_forge.model import Boundary, build_mode_set
from wstate_forge.rates import optimal_drive_frequency
from wstate_forge.sweep import (
    AutoRange,
    ConfigError,
    DisorderSpec,
    SweepConfig,
    disorder_ensemble,
    disorder_samples,
    load_sweep_config,
    parse_sweep_config,
    run_sweep,
    scalability_report,
)

TWO_PI = 2.0 * np.pi


def base_payload(**overrides):
    payload = {
        "system": {
            "n_sites": 3,
            "omega_c_ghz": 6.0,
            "omega_q_ghz": 7.0,
            "g_ghz": 0.1,
            "j_ghz": 0.1,
            "kappa_ghz": 1e-4,
            "gamma_ghz": 1e-5,
            "gamma_phi_ghz": 1e-6,
            "boundary": "open",
        },
        "drive": {"profile": "uniform", "amplitude_ghz": 0.3},
        "omega_d": {"auto": {"target": 0, "mode": 0, "span_kappa": 2.0}},
        "solver": "rate",
    }
    payload.update(overrides)
    return payload


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestConfigParsing:
    def test_units_cross_the_boundary_once(self):
        config = parse_sweep_config(base_payload())
        assert config.system.omega_c == pytest.approx(6.0 * TWO_PI)
        assert config.amplitude == pytest.approx(0.3 * TWO_PI)
        assert config.system.boundary is Boundary.OPEN
        assert config.auto_range.span_kappa == 2.0

    def test_explicit_range(self):
        payload = base_payload(omega_d={"start_ghz": 6.4, "stop_ghz": 6.6, "step_ghz": 0.01})
        config = parse_sweep_config(payload)
        start, stop, step = config.omega_d_range
        assert start == pytest.approx(6.4 * TWO_PI)
        assert step == pytest.approx(0.01 * TWO_PI)

    def test_missing_key_is_config_error(self):
        payload = base_payload()
        del payload["system"]["g_ghz"]
        with pytest.raises(ConfigError, match="bad config"):
            parse_sweep_config(payload)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_sweep_config(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="JSON"):
            load_sweep_config(path)

    def test_rejects_unknown_solver(self):
        with pytest.raises(ConfigError, match="solver"):
            parse_sweep_config(base_payload(solver="magic"))

    def test_rejects_bad_step(self):
        payload = base_payload(omega_d={"start_ghz": 6.4, "stop_ghz": 6.6, "step_ghz": 0.0})
        with pytest.raises(ConfigError, match="step"):
            parse_sweep_config(payload)

    def test_rejects_inverted_range(self):
        payload = base_payload(omega_d={"start_ghz": 6.6, "stop_ghz": 6.4, "step_ghz": 0.01})
        with pytest.raises(ConfigError, match="stop > start"):
            parse_sweep_config(payload)

    def test_custom_profile_length(self):
        payload = base_payload(drive={"profile": "custom", "amplitudes_ghz": [0.1, 0.2]})
        with pytest.raises(ConfigError, match="length"):
            parse_sweep_config(payload)

    def test_custom_profile_complex_entries(self):
        payload = base_payload(
            drive={"profile": "custom", "amplitudes_ghz": [[0.1, 0.0], [0.0, 0.1], 0.05]}
        )
        config = parse_sweep_config(payload)
        assert config.custom_amplitudes[1] == pytest.approx(0.1j * TWO_PI)

    def test_disorder_needs_samples(self):
        with pytest.raises(ConfigError, match="n_samples"):
            parse_sweep_config(base_payload(disorder={"n_samples": 0}))


@pytest.mark.filterwarnings("ignore:drive admixture")
class TestRunSweep:
    def test_explicit_grid_size_and_order(self):
        payload = base_payload(omega_d={"start_ghz": 6.40, "stop_ghz": 6.41, "step_ghz": 0.001})
        result = run_sweep(parse_sweep_config(payload))
        omegas = [r.omega_d for r in result.sorted_rows()]
        assert len(omegas) == 11
        assert omegas == sorted(omegas)
        assert omegas[0] == pytest.approx(6.40 * TWO_PI)

    def test_auto_grid_centered_on_optimum(self):
        config = parse_sweep_config(base_payload())
        result = run_sweep(config)
        params = config.system
        modes = build_mode_set(params)
        drive = config.base_drive(6.5 * TWO_PI)
        center = optimal_drive_frequency(params, modes, drive, 0, 0)
        omegas = np.array([r.omega_d for r in result.sorted_rows()])
        fids = np.array([r.fidelities[0] for r in result.sorted_rows()])
        assert len(omegas) == 2 * int(round(2.0 * 20)) + 1
        assert abs(omegas[np.argmax(fids)] - center) < params.kappa

    def test_zero_amplitude_is_flat(self):
        payload = base_payload(
            drive={"profile": "uniform", "amplitude_ghz": 0.0},
            omega_d={"start_ghz": 6.40, "stop_ghz": 6.41, "step_ghz": 0.002},
        )
        result = run_sweep(parse_sweep_config(payload))
        for row in result.rows:
            np.testing.assert_array_equal(row.fidelities, 0.0)
            assert row.fid_ground == 1.0

    def test_zero_amplitude_cannot_autocenter(self):
        payload = base_payload(drive={"profile": "uniform", "amplitude_ghz": 0.0})
        with pytest.raises(ConfigError, match="auto range"):
            run_sweep(parse_sweep_config(payload))

    def test_target_selection_filters_columns(self):
        payload = base_payload(
            omega_d={"start_ghz": 6.40, "stop_ghz": 6.41, "step_ghz": 0.005}, targets=[0, 2]
        )
        result = run_sweep(parse_sweep_config(payload))
        assert result.header().split(",")[4:6] == ["fid_k0", "fid_k2"]
        assert all(len(r.fidelities) == 2 for r in result.rows)

    def test_resonant_rows_fail_without_killing_the_sweep(self):
        # the grid point exactly on the bare cavity line cannot be solved;
        # its row is recorded as failed and the sweep continues
        payload = base_payload(omega_d={"start_ghz": 6.0, "stop_ghz": 6.001, "step_ghz": 0.0005})
        result = run_sweep(parse_sweep_config(payload))
        solvers = [r.solver for r in result.sorted_rows()]
        assert solvers[0] == "failed"
        assert solvers.count("failed") == 1 and len(solvers) == 3
        assert np.isnan(result.sorted_rows()[0].fidelities).all()
        assert not result.all_failed

    def test_single_resonant_row_means_all_failed(self):
        payload = base_payload(omega_d={"start_ghz": 6.0, "stop_ghz": 6.0004, "step_ghz": 0.0005})
        result = run_sweep(parse_sweep_config(payload))
        assert len(result.rows) == 1 and result.all_failed

    def test_csv_is_byte_deterministic(self):
        payload = base_payload(disorder={"n_samples": 2, "seed": 5})
        payload["omega_d"] = {"auto": {"target": 0, "mode": 0, "span_kappa": 1.0}}
        a = run_sweep(parse_sweep_config(payload)).to_csv_string()
        b = run_sweep(parse_sweep_config(payload)).to_csv_string()
        assert a == b

    def test_threads_do_not_change_bytes(self):
        payload = base_payload(omega_d={"start_ghz": 6.42, "stop_ghz": 6.43, "step_ghz": 0.001})
        serial = run_sweep(parse_sweep_config(payload), threads=1).to_csv_string()
        parallel = run_sweep(parse_sweep_config(payload), threads=2).to_csv_string()
        assert serial == parallel

    def test_lindblad_solver_rows(self):
        payload = base_payload(
            omega_d={"start_ghz": 6.4383, "stop_ghz": 6.4384, "step_ghz": 0.0001},
            solver="lindblad",
        )
        result = run_sweep(parse_sweep_config(payload))
        assert all(r.solver == "lindblad_null_space" for r in result.rows)
        assert all(0 <= r.pop_manifold2 < 1e-3 for r in result.rows)


@pytest.mark.filterwarnings("ignore:drive admixture")
class TestDisorder:
    def test_requires_disorder_block(self):
        with pytest.raises(ConfigError, match="disorder"):
            disorder_ensemble(parse_sweep_config(base_payload()))

    def test_zero_sigma_matches_clean(self):
        payload = base_payload(
            omega_d={"start_ghz": 6.43, "stop_ghz": 6.44, "step_ghz": 0.002},
            disorder={"n_samples": 3, "seed": 9, "sigma_omega_c": 0.0, "sigma_omega_q": 0.0, "sigma_g": 0.0, "sigma_j": 0.0},
        )
        result, summary = disorder_ensemble(parse_sweep_config(payload))
        by_sample = {}
        for row in result.sorted_rows():
            by_sample.setdefault(row.sample_id, []).append((row.omega_d, tuple(row.fidelities)))
        for sid in range(1, 4):
            assert by_sample[sid] == by_sample[0]  # bit-for-bit identical sweep
        np.testing.assert_array_equal(summary.min_peaks, summary.clean_peaks)
        np.testing.assert_array_equal(summary.max_peaks, summary.clean_peaks)
        # averaging three identical floats only reassociates rounding
        np.testing.assert_allclose(summary.mean_peaks, summary.clean_peaks, rtol=1e-15)

    def test_sample_count_and_clean_first(self):
        config = parse_sweep_config(base_payload(disorder={"n_samples": 4, "seed": 2}))
        systems = disorder_samples(config)
        assert len(systems) == 5
        assert systems[0].is_homogeneous
        assert not systems[1].is_homogeneous

    def test_draws_are_seed_reproducible(self):
        config = parse_sweep_config(base_payload(disorder={"n_samples": 2, "seed": 42}))
        a = disorder_samples(config)
        b = disorder_samples(config)
        np.testing.assert_array_equal(a[1].delta_omega_c, b[1].delta_omega_c)
        np.testing.assert_array_equal(a[2].delta_j, b[2].delta_j)

    def test_truncation_bounds_draws(self):
        config = parse_sweep_config(
            base_payload(disorder={"n_samples": 50, "seed": 0, "sigma_omega_c": 1e-2})
        )
        for params in disorder_samples(config)[1:]:
            z = params.delta_omega_c / (params.omega_c * 1e-2)
            assert np.abs(z).max() <= 5.0


class TestScalabilityReport:
    def make_params(self, n=5):
        return parse_sweep_config(base_payload()).system.__class__(
            n_sites=n,
            omega_c=6.0 * TWO_PI,
            omega_q=7.0 * TWO_PI,
            g=0.1 * TWO_PI,
            j_hop=0.1 * TWO_PI,
            kappa=1e-4 * TWO_PI,
            gamma=1e-5 * TWO_PI,
            gamma_phi=1e-6 * TWO_PI,
        )

    def test_size_limit(self):
        report = scalability_report(self.make_params())
        assert report.n_max_sites == pytest.approx(2000 * np.pi, rel=1e-12)
        assert round(report.n_max_sites) == 6283

    def test_resolvability_bounds(self):
        report = scalability_report(self.make_params(n=5))
        assert report.uniform_kappa_bound == pytest.approx(TWO_PI * 0.1 * TWO_PI / 5)
        assert report.single_site_kappa_bound == pytest.approx(TWO_PI * 0.1 * TWO_PI * 0.01 / 5)
        assert report.uniform_resolvable and report.single_site_resolvable

    def test_ceiling_values(self):
        report = scalability_report(self.make_params(n=5))
        assert report.ceiling == pytest.approx(0.8667, abs=1e-4)
        assert report.ceiling_large_n == pytest.approx(1e-5 / 1.2e-5, rel=1e-12)

    def test_formatted_text(self):
        text = scalability_report(self.make_params()).format()
        assert "6283" in text and "resolvable" in text


@pytest.mark.filterwarnings("ignore:drive admixture")
class TestCli:
    def test_sweep_roundtrip(self, tmp_path, capsys):
        payload = base_payload(omega_d={"start_ghz": 6.43, "stop_ghz": 6.44, "step_ghz": 0.002})
        out = tmp_path / "out.csv"
        code = main(["sweep", "--config", write_config(tmp_path, payload), "--output", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "omega_d_ghz,sample_id,solver,residual,fid_k0,fid_k1,fid_k2,fid_gs,pop_manifold2"
        assert len(lines) == 7
        assert "wrote 6 rows" in capsys.readouterr().out

    def test_solver_override(self, tmp_path):
        payload = base_payload(omega_d={"start_ghz": 6.4383, "stop_ghz": 6.4384, "step_ghz": 0.0001})
        out = tmp_path / "out.csv"
        code = main(
            ["sweep", "--config", write_config(tmp_path, payload), "--output", str(out), "--solver", "lindblad"]
        )
        assert code == 0
        assert "lindblad_null_space" in out.read_text()

    def test_optimal_wd_prints_ghz(self, tmp_path, capsys):
        code = main(["optimal-wd", "--config", write_config(tmp_path, base_payload()), "--target", "0", "--mode", "0"])
        assert code == 0
        printed = float(capsys.readouterr().out.strip())
        config = parse_sweep_config(base_payload())
        modes = build_mode_set(config.system)
        expected = optimal_drive_frequency(config.system, modes, config.base_drive(6.5 * TWO_PI), 0, 0)
        assert printed == pytest.approx(expected / TWO_PI, abs=1e-11)

    def test_scalability_output(self, tmp_path, capsys):
        code = main(["scalability", "--config", write_config(tmp_path, base_payload())])
        assert code == 0
        assert "6283" in capsys.readouterr().out

    def test_missing_config_exits_2(self, tmp_path, capsys):
        code = main(["sweep", "--config", str(tmp_path / "none.json"), "--output", str(tmp_path / "o.csv")])
        assert code == 2
        assert "config error" in capsys.readouterr().err

    def test_all_rows_failed_exits_3(self, tmp_path):
        payload = base_payload(omega_d={"start_ghz": 6.0, "stop_ghz": 6.0004, "step_ghz": 0.0005})
        out = tmp_path / "out.csv"
        code = main(["sweep", "--config", write_config(tmp_path, payload), "--output", str(out)])
        assert code == 3
        assert out.exists()
