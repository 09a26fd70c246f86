import csv
import json

import numpy as np
import pytest

from rwafidelity.cli import (
    CircuitParams,
    ConfigError,
    ScanConfig,
    circuit_map,
    collective_coupling,
    main,
    run_scan,
)
from rwafidelity.dynamics import OscillatorParams, UnstableParamsError
from rwafidelity.states import InitialState


def make_config(tmp_path, **overrides):
    fields = dict(
        params=OscillatorParams(1.0, 1.0, 0.05, 0.05),
        initial_state=InitialState("vacuum"),
        tau_start=0.0,
        tau_end=5.0,
        steps=6,
        output_path=str(tmp_path / "scan.csv"),
    )
    fields.update(overrides)
    return ScanConfig(**fields)


class TestScanConfig:
    def test_json_roundtrip(self, tmp_path):
        cfg = make_config(tmp_path, initial_state=InitialState("squeezed", s=0.2), oracle_enabled=True, cutoff=24)
        assert ScanConfig.from_json(cfg.to_json()) == cfg

    def test_validation_messages(self, tmp_path):
        with pytest.raises(ConfigError, match="steps"):
            make_config(tmp_path, steps=1)
        with pytest.raises(ConfigError, match="unrecognized"):
            make_config(tmp_path, outputs=("fidelity", "typo"))
        with pytest.raises(ConfigError, match="c2_prediction"):
            make_config(tmp_path, params=OscillatorParams(1.0, 2.0, 0.05, 0.05), outputs=("fidelity", "c2_prediction"))

    def test_rejects_bad_json(self):
        with pytest.raises(ConfigError):
            ScanConfig.from_json("{not json")


class TestRunScan:
    def test_uncoupled_fidelity_column_is_one(self, tmp_path):
        cfg = make_config(tmp_path, params=OscillatorParams(1.0, 1.0, 0.0, 0.0))
        rows, summary = run_scan(cfg)
        assert all(r["fidelity"] == 1.0 for r in rows)
        assert summary.min_fidelity == 1.0

    def test_recurrence_row(self, tmp_path):
        t_star = 2.0 * np.pi / np.sqrt(0.4)
        cfg = make_config(
            tmp_path,
            params=OscillatorParams(1.0, 1.0, 0.3, 0.3),
            tau_start=0.0,
            tau_end=2.0 * t_star,
            steps=3,
        )
        rows, _ = run_scan(cfg)
        assert rows[1]["tau"] == pytest.approx(t_star)
        assert rows[1]["fidelity"] == pytest.approx(1.0, abs=1e-8)

    def test_oracle_columns_agree(self, tmp_path):
        cfg = make_config(tmp_path, tau_end=4.0, steps=5, oracle_enabled=True, cutoff=30)
        rows, _ = run_scan(cfg)
        for r in rows:
            assert abs(r["fidelity"] - r["fidelity_oracle"]) < 1e-6
            assert abs(r["delta_n"] - r["delta_n_oracle"]) < 1e-6

    def test_row_invariants(self, tmp_path):
        cfg = make_config(tmp_path, initial_state=InitialState("squeezed", s=0.3), tau_end=8.0, steps=17)
        rows, _ = run_scan(cfg)
        for r in rows:
            assert 0.0 <= r["fidelity"] <= 1.0
            assert r["bures"] ** 2 == pytest.approx(2.0 * (1.0 - np.sqrt(r["fidelity"])), abs=1e-9)

    def test_csv_header_and_determinism(self, tmp_path):
        cfg = make_config(tmp_path, outputs=("fidelity", "bures", "delta_n", "r_plus", "r_minus", "c2_prediction"))
        run_scan(cfg)
        first = (tmp_path / "scan.csv").read_bytes()
        with open(cfg.output_path) as fh:
            header = fh.readline().strip()
        assert header == "tau,fidelity,bures,delta_n,r_plus,r_minus,c2_prediction"
        run_scan(cfg)
        assert (tmp_path / "scan.csv").read_bytes() == first

    def test_csv_roundtrip_precision(self, tmp_path):
        cfg = make_config(tmp_path, tau_end=3.0, steps=4)
        rows, _ = run_scan(cfg)
        with open(cfg.output_path) as fh:
            parsed = list(csv.DictReader(fh))
        for row, ref in zip(parsed, rows):
            assert float(row["fidelity"]) == ref["fidelity"]

    def test_json_output_embeds_config(self, tmp_path):
        path = tmp_path / "scan.json"
        cfg = make_config(tmp_path, output_path=str(path), fmt="json")
        run_scan(cfg)
        doc = json.loads(path.read_text())
        assert ScanConfig.from_dict(doc["config"]) == cfg
        assert len(doc["rows"]) == cfg.steps
        assert "min_fidelity" in doc["summary"]

    def test_regime_flags_reported(self, tmp_path):
        cfg = make_config(tmp_path, params=OscillatorParams(1.0, 1.0, 0.1, 0.1), tau_end=50.0)
        _, summary = run_scan(cfg)
        assert "g2tau-outside-window" in summary.regime_flags
        cfg = make_config(tmp_path, params=OscillatorParams(1.0, 2.0, 0.1, 0.0))
        _, summary = run_scan(cfg)
        assert "outside-perturbative-family" in summary.regime_flags


class TestCollectiveCoupling:
    def test_values(self):
        assert collective_coupling(1, 0.3) == pytest.approx(0.3)
        assert collective_coupling(100, 0.01) == pytest.approx(0.1)
        assert collective_coupling(4, 0.25) == pytest.approx(0.5)

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            collective_coupling(0, 0.1)


class TestCircuitMap:
    def test_pumps_off(self):
        report = circuit_map(CircuitParams(epsilon_a=5.0, epsilon_b=6.0))
        assert report.params.g_bs == 0.0
        assert report.params.g_sq == 0.0
        assert report.dropped_terms == ()

    def test_matched_pumps(self):
        # frame shifts reproduce the pump matching conditions
        eps_a, eps_b = 6.0, 5.5
        omega_a, omega_b = 0.9, 1.1
        shift_a, shift_b = eps_a - omega_a, eps_b - omega_b
        circ = CircuitParams(
            epsilon_a=eps_a,
            epsilon_b=eps_b,
            pump_sq_amp=0.2,
            pump_sq_freq=shift_a + shift_b,
            pump_bs_amp=0.3,
            pump_bs_freq=shift_a - shift_b,
        )
        report = circuit_map(circ)
        assert report.params.omega_a == pytest.approx(omega_a)
        assert report.params.omega_b == pytest.approx(omega_b)
        assert report.params.g_bs == pytest.approx(0.15)
        assert report.params.g_sq == pytest.approx(0.1)
        assert report.frame_shift_a == pytest.approx(shift_a)
        # 6 dropped combinations per active pump
        assert len(report.dropped_terms) == 12
        assert report.min_dropped_frequency > 0.0

    def test_megahertz_scale_arbitrary_coupling(self):
        # detunings and couplings all at the 2*pi x 10 MHz scale: valid, and
        # the coupling-to-frequency ratio lands in the arbitrary regime
        mhz = 2.0 * np.pi * 1e6
        eps_a = eps_b = 2.0 * np.pi * 6.0e9
        shift = eps_a - 10.0 * mhz  # detunings omega = 2*pi x 10 MHz
        circ = CircuitParams(
            epsilon_a=eps_a,
            epsilon_b=eps_b,
            pump_sq_amp=2.0 * 4.0 * mhz,
            pump_sq_freq=2.0 * shift,
            pump_bs_amp=2.0 * 4.0 * mhz,
            pump_bs_freq=0.0,
        )
        report = circuit_map(circ)
        assert report.params.omega_a == pytest.approx(10.0 * mhz)
        assert report.params.g_bs == pytest.approx(4.0 * mhz)
        assert report.regime == "arbitrary-coupling"

    def test_weak_regime_flag(self):
        report = circuit_map(
            CircuitParams(epsilon_a=6.0, epsilon_b=5.5, pump_bs_amp=0.02, pump_bs_freq=0.5, pump_sq_amp=0.02, pump_sq_freq=9.7)
        )
        assert report.regime == "weak-coupling"

    def test_unstable_effective_params_rejected(self):
        # pump amplitudes put the couplings beyond the critical value
        circ = CircuitParams(
            epsilon_a=6.0, epsilon_b=5.5, pump_sq_amp=1.5, pump_sq_freq=9.6, pump_bs_amp=1.5, pump_bs_freq=0.2
        )
        with pytest.raises(UnstableParamsError):
            circuit_map(circ)

    def test_negative_detuning_rejected(self):
        with pytest.raises(UnstableParamsError):
            circuit_map(CircuitParams(epsilon_a=1.0, epsilon_b=1.0, pump_sq_amp=0.1, pump_sq_freq=3.0))


class TestMainExitCodes:
    def test_validity_ok(self, capsys):
        assert main(["validity", "--omega-a", "1", "--omega-b", "1", "--g", "0.1"]) == 0
        out = capsys.readouterr().out
        assert "kappa_plus" in out and "stability: ok" in out

    def test_validity_critical_exit_2(self, capsys):
        assert main(["validity", "--omega-a", "1", "--omega-b", "1", "--g", "0.5"]) == 2
        assert "critical" in capsys.readouterr().err

    def test_evolve_identity_at_time_zero(self, capsys):
        assert main(["evolve", "--omega-a", "1", "--omega-b", "1", "--g", "0.2", "--tau-start", "0"]) == 0
        out = capsys.readouterr().out
        assert "block A(t)" in out and "+1+0j" in out

    def test_fidelity_scan_writes_file(self, tmp_path, capsys):
        out_path = str(tmp_path / "out.csv")
        code = main(
            ["fidelity-scan", "--omega-a", "1", "--omega-b", "1", "--g", "0.05", "--tau-end", "4", "--steps", "5", "--output", out_path]
        )
        assert code == 0
        assert "min_fidelity=" in capsys.readouterr().out
        with open(out_path) as fh:
            assert fh.readline().startswith("tau,fidelity")

    def test_scan_bad_config_exit_2(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"params": {"omega_a": 1.0, "omega_b": 1.0}, "tau_grid": {"start": 0, "end": 5, "steps": 1}}))
        assert main(["fidelity-scan", "--config", str(cfg_path)]) == 2
        assert "validation error" in capsys.readouterr().err

    def test_config_file_drives_scan(self, tmp_path):
        out_path = tmp_path / "from_cfg.csv"
        cfg = make_config(tmp_path, output_path=str(out_path), steps=3)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(cfg.to_json())
        assert main(["fidelity-scan", "--config", str(cfg_path)]) == 0
        assert out_path.exists()

    def test_oracle_check(self, tmp_path, capsys):
        out_path = str(tmp_path / "oc.csv")
        code = main(
            ["oracle-check", "--omega-a", "1", "--omega-b", "1", "--g", "0.05", "--tau-end", "3", "--steps", "4", "--cutoff", "24", "--output", out_path]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "max |fidelity - oracle|" in out

    def test_perturbative_compare_slope(self, capsys):
        code = main(["perturbative-compare", "--omega-a", "1", "--omega-b", "1", "--g", "0.1", "--tau-end", "5", "--steps", "6"])
        assert code == 0
        out = capsys.readouterr().out
        slope = float(out.split("fitted order of 1 - F in g:")[1].split("(")[0])
        assert slope == pytest.approx(2.0, abs=0.1)

    def test_circuit_map_command(self, capsys):
        code = main(
            ["circuit-map", "--epsilon-a", "6", "--epsilon-b", "5.5", "--pump-sq-amp", "0.2", "--pump-sq-freq", "9.7", "--pump-bs-amp", "0.3", "--pump-bs-freq", "0.5"]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "effective params" in out and "dropped oscillatory terms" in out

    def test_circuit_map_unstable_exit_2(self, capsys):
        code = main(
            ["circuit-map", "--epsilon-a", "6", "--epsilon-b", "5.5", "--pump-sq-amp", "3.0", "--pump-sq-freq", "9.7", "--pump-bs-amp", "3.0", "--pump-bs-freq", "0.5"]
        )
        assert code == 2
        assert "critical" in capsys.readouterr().err
