import json

import numpy as np
import pytest

import gradion as g
from gradion.cli import load_config, main


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConfig:
    def test_empty_file_gives_no_overrides(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing here\n\n")
        assert load_config(str(path)) == {}

    def test_values_parsed(self, tmp_path):
        path = tmp_path / "x.cfg"
        path.write_text("preset = table3-h4\ngradient_T_per_m = 250  # override\n")
        settings = load_config(str(path))
        assert settings == {"preset": "table3-h4", "gradient_t_per_m": 250.0}

    def test_unknown_key_reports_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("mode = linear\nfrobnicate = 3\n")
        with pytest.raises(ValueError, match=r"bad.cfg:2.*frobnicate"):
            load_config(str(path))

    def test_malformed_value_reports_line(self, tmp_path):
        path = tmp_path / "bad2.cfg"
        path.write_text("d_um = four\n")
        with pytest.raises(ValueError, match=r"bad2.cfg:1.*malformed"):
            load_config(str(path))

    def test_missing_equals_reports_line(self, tmp_path):
        path = tmp_path / "bad3.cfg"
        path.write_text("gradient 500\n")
        with pytest.raises(ValueError, match="bad3.cfg:1"):
            load_config(str(path))


class TestCouplingsCommand:
    def test_preset_table1_d4_json(self, capsys):
        code, out, _ = run_cli(capsys, ["couplings", "--preset", "table1-d4",
                                        "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["j_2pi_khz"] == pytest.approx(0.459, rel=0.03)
        assert payload["j13_2pi_khz"] == pytest.approx(0.135, rel=0.04)
        assert payload["delta_um"] == pytest.approx(0.628, rel=0.01)
        assert payload["raw_rad_s"]["j"] == pytest.approx(
            payload["j_2pi_khz"] * g.TWO_PI * 1e3, rel=1e-12)

    def test_preset_table3_h4_loads_row(self, capsys):
        code, out, _ = run_cli(capsys, ["couplings", "--preset", "table3-h4",
                                        "--format", "json"])
        payload = json.loads(out)
        assert code == 0
        assert payload["w_2pi_mhz"] == pytest.approx(0.628, rel=1e-12)
        assert payload["gradient_t_per_m"] == 150.0
        assert payload["j_2pi_khz"] == pytest.approx(0.359, rel=0.03)

    def test_gradient_override_reflected(self, capsys, tmp_path):
        path = tmp_path / "o.cfg"
        path.write_text("gradient_T_per_m = 250\n")
        code, out, _ = run_cli(capsys, ["couplings", "--preset", "table1-d4",
                                        "--config", str(path), "--format", "json"])
        payload = json.loads(out)
        assert payload["gradient_t_per_m"] == 250.0
        # J scales as the gradient squared
        assert payload["j_2pi_khz"] == pytest.approx(0.459 * 0.25, rel=0.05)

    def test_csv_columns_mirror_reference_table(self, capsys):
        code, out, _ = run_cli(capsys, ["couplings", "--preset", "table1-d4",
                                        "--format", "csv"])
        header = out.splitlines()[0]
        assert header == ("d_um,w1_2pi_mhz,w2_2pi_mhz,gradient_t_per_m,"
                          "delta_um,eps_max,h_um,j_2pi_khz,j13_2pi_khz")

    def test_byte_identical_reports(self, capsys):
        _, out1, _ = run_cli(capsys, ["couplings", "--preset", "table1-d4",
                                      "--format", "json"])
        _, out2, _ = run_cli(capsys, ["couplings", "--preset", "table1-d4",
                                      "--format", "json"])
        assert out1 == out2

    def test_missing_layout_fails_cleanly(self, capsys):
        code, _, err = run_cli(capsys, ["couplings"])
        assert code == 1
        assert "no layout" in err


class TestModesAndSpectrum:
    def test_modes_values(self, capsys):
        code, out, _ = run_cli(capsys, ["modes", "--preset", "table1-d4",
                                        "--format", "json"])
        payload = json.loads(out)
        assert payload["nu_2pi_mhz"] == pytest.approx([1.32, 1.54, 1.70], rel=0.02)

    def test_spectrum_payload(self, capsys):
        code, out, _ = run_cli(capsys, ["spectrum", "--preset", "table1-d4",
                                        "--format", "json"])
        payload = json.loads(out)
        assert payload["neighbor_shift_2pi_mhz"] == pytest.approx(64.8, rel=0.01)
        assert len(payload["transitions"]) == 12
        spreads = payload["spreads_2pi_khz"]
        assert spreads[1] == pytest.approx(4 * 0.459, rel=0.05)


class TestSearchCommands:
    def test_table3_search(self, capsys):
        code, out, _ = run_cli(capsys, ["table3", "--h", "4", "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["j_2pi_khz"] >= 0.359 * 0.97
        assert payload["eps_max"] < 0.05
        assert payload["w_2pi_mhz"] == pytest.approx(0.628, rel=0.02)

    def test_table1_search(self, capsys):
        code, out, _ = run_cli(capsys, ["table1", "--d", "4", "--format", "csv"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0].startswith("d_um,w1_2pi_mhz")
        row = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert float(row["j_2pi_khz"]) >= 0.459 * 0.97
        assert float(row["eps_max"]) < 0.05


class TestPresetReproduction:
    @pytest.mark.parametrize("name", sorted(g.PRESETS))
    def test_preset_rederives_reference_row(self, capsys, name):
        code, out, _ = run_cli(capsys, ["couplings", "--preset", name,
                                        "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        ref = g.REFERENCE[name]
        assert payload["j_2pi_khz"] == pytest.approx(ref["j_2pi_khz"], rel=0.03)
        assert payload["j13_2pi_khz"] == pytest.approx(ref["j13_2pi_khz"], rel=0.04)
        assert payload["eps_max"] == pytest.approx(ref["eps_max"], rel=0.03)
        if "delta_um" in ref:
            assert payload["delta_um"] == pytest.approx(ref["delta_um"], rel=0.01)
            assert payload["h_um"] == pytest.approx(ref["h_um"], rel=0.01)


class TestCnotCommand:
    def test_schedule_emission(self, capsys, tmp_path):
        out_path = tmp_path / "cnot.sched"
        code, out, _ = run_cli(capsys, [
            "cnot", "--pair", "2,3", "--preset", "table1-d4",
            "--emit-schedule", str(out_path), "--format", "json"])
        assert code == 0
        payload = json.loads(out)
        assert payload["total_duration_ms"] == pytest.approx(3.84, rel=0.02)
        assert payload["zz_time_ms"] == pytest.approx(3.82, rel=0.02)
        assert payload["gate_deviation_from_cnot"] < 1e-9
        text = out_path.read_text()
        total = 0.0
        for line in text.splitlines():
            fields = line.split()
            if fields and fields[0] in ("PULSE", "FREE"):
                total += float(fields[-1])
        assert total * 1e3 == pytest.approx(3.84, rel=0.02)
        parsed = g.parse_schedule(text)
        assert sum(1 for _ in parsed.pulses()) == 14

    def test_lab_frame_reports_residual(self, capsys):
        code, out, _ = run_cli(capsys, ["cnot", "--frame", "lab",
                                        "--preset", "table1-d4",
                                        "--format", "json"])
        payload = json.loads(out)
        assert code == 0
        assert payload["max_commensuration_residual_rad"] < 1e-3

    def test_bad_pair_fails(self, capsys):
        code, _, err = run_cli(capsys, ["cnot", "--pair", "1,3",
                                        "--preset", "table1-d4"])
        assert code == 1
        assert "error" in err


class TestTeleportCommand:
    def test_ideal_run(self, capsys):
        code, out, _ = run_cli(capsys, ["teleport", "--alpha", "1", "--beta", "0",
                                        "--mode", "ideal", "--seed", "7"])
        assert code == 0
        payload = json.loads(out)
        assert payload["fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert payload["seed"] == 7

    def test_seeded_determinism(self, capsys):
        argv = ["teleport", "--alpha", "0.6", "--beta", "0.8j",
                "--mode", "scheduled", "--seed", "3", "--preset", "table1-d4"]
        _, out1, _ = run_cli(capsys, argv)
        _, out2, _ = run_cli(capsys, argv)
        assert out1 == out2
        payload = json.loads(out1)
        assert payload["fidelity"] == pytest.approx(1.0, abs=1e-9)
        assert payload["total_duration_s"] == pytest.approx(7.7e-3, rel=0.03)


class TestExitCodes:
    def test_usage_error_is_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 2

    def test_unknown_preset_is_1(self, capsys):
        code, _, err = run_cli(capsys, ["couplings", "--preset", "table9-z1"])
        assert code == 1
        assert "unknown preset" in err

    def test_output_file(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(capsys, ["couplings", "--preset", "table1-d4",
                                        "--format", "json",
                                        "--output", str(out_path)])
        assert code == 0
        assert out == ""
        assert json.loads(out_path.read_text())["j_2pi_khz"] > 0
