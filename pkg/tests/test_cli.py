"""CLI subcommands, exit codes, and file outputs."""

import json

import numpy as np
import pytest

from jamscan import cli, formats, synth
from test_pipeline import jammer_scenario, mission_with


@pytest.fixture
def benign_mission(tmp_path):
    cfg = mission_with(None)
    path = tmp_path / "benign.json"
    formats.save_mission(cfg, path)
    return path


@pytest.fixture
def jam_mission(tmp_path):
    cfg = mission_with(jammer_scenario())
    path = tmp_path / "jam.json"
    formats.save_mission(cfg, path)
    return path


def run(*argv):
    return cli.main([str(a) for a in argv])


class TestSynthCommand:
    def test_writes_parseable_records(self, tmp_path):
        out = tmp_path / "chirp.jsiq"
        code = run("synth", "--kind", "CHIRP", "--bandwidth-hz", "1e6",
                   "--sweep-time-s", "1e-4", "--snapshots", "3",
                   "--noise-sigma2", "1.0", "-o", out)
        assert code == cli.EXIT_OK
        records = formats.parse_iq(out.read_bytes())
        assert len(records) == 3
        assert records[0].samples.size == 2048
        assert records[1].tow == 2.0

    def test_invalid_spec_is_config_error(self, tmp_path):
        code = run("synth", "--kind", "CHIRP", "-o", tmp_path / "x.jsiq")
        assert code == cli.EXIT_CONFIG


class TestDetectCommand:
    def test_benign_noise_records_exit_zero(self, tmp_path, benign_mission):
        rec = tmp_path / "noise.jsiq"
        run("synth", "--kind", "CW", "--power-db=-inf", "--snapshots", "4",
            "--noise-sigma2", "1.0", "-o", rec)
        out = tmp_path / "reports.jsonl"
        code = run("detect", "--mission", benign_mission, "--records", rec,
                   "-o", out)
        assert code == cli.EXIT_OK
        lines = out.read_text().strip().split("\n")
        assert len(lines) == 4
        assert all(json.loads(l)["decision"] == "H0_benign" for l in lines)

    def test_jamming_exit_code(self, tmp_path, benign_mission):
        rec = tmp_path / "jam.jsiq"
        run("synth", "--kind", "CHIRP", "--bandwidth-hz", "1e6",
            "--sweep-time-s", "1e-4", "--power-db", "10", "--snapshots", "3",
            "--noise-sigma2", "1.0", "-o", rec)
        code = run("detect", "--mission", benign_mission, "--records", rec)
        assert code == cli.EXIT_JAMMING

    def test_missing_records_file_is_input_error(self, tmp_path, benign_mission):
        code = run("detect", "--mission", benign_mission,
                   "--records", tmp_path / "nope.jsiq")
        assert code == cli.EXIT_INPUT

    def test_corrupt_records_is_input_error(self, tmp_path, benign_mission):
        bad = tmp_path / "bad.jsiq"
        bad.write_bytes(b"NOPE" + b"\x00" * 64)
        code = run("detect", "--mission", benign_mission, "--records", bad)
        assert code == cli.EXIT_INPUT

    def test_invalid_mission_json_is_input_error(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{oops")
        code = run("detect", "--mission", path)
        assert code == cli.EXIT_INPUT

    def test_missing_calibration_is_config_error(self, tmp_path):
        cfg = formats.MissionConfig()
        cfg.scenario = jammer_scenario()
        path = tmp_path / "nocal.json"
        formats.save_mission(cfg, path)
        code = run("detect", "--mission", path)
        assert code == cli.EXIT_CONFIG


class TestClassifyCommand:
    def test_chirp_classified(self, tmp_path, benign_mission, capsys):
        rec = tmp_path / "jam.jsiq"
        run("synth", "--kind", "CHIRP", "--bandwidth-hz", "1e6",
            "--sweep-time-s", "1e-4", "--power-db", "10", "--snapshots", "4",
            "--noise-sigma2", "1.0", "--snapshot-len", "4096", "-o", rec)
        out = tmp_path / "class.json"
        code = run("classify", "--mission", benign_mission, "--records", rec,
                   "-o", out)
        assert code == cli.EXIT_JAMMING
        result = json.loads(out.read_text())
        assert result["label"] == "CHIRP"
        assert "evidence" in result


class TestSimulateAndFuse:
    def test_simulate_then_fuse(self, tmp_path, jam_mission):
        rec = tmp_path / "mission.jsiq"
        poses = tmp_path / "poses.json"
        code = run("simulate", "--mission", jam_mission, "-o", rec,
                   "--poses-output", poses)
        assert code == cli.EXIT_OK
        assert len(formats.parse_iq(rec.read_bytes())) == 5 * 12
        assert len(json.loads(poses.read_text())) == 5

        grid_out = tmp_path / "heatmap.grid"
        code = run("fuse", "--mission", jam_mission, "--records", rec,
                   "-o", grid_out, "--binary")
        assert code == cli.EXIT_JAMMING
        values, axes = formats.read_grid(grid_out.read_bytes())
        assert values.shape == (300, 300)
        assert len(axes) == 2

        csv_out = tmp_path / "heatmap.csv"
        code = run("fuse", "--mission", jam_mission, "--records", rec,
                   "-o", csv_out)
        assert code == cli.EXIT_JAMMING
        lines = csv_out.read_text().strip().split("\n")
        assert len(lines) == 301  # column-axis header + 300 rows

    def test_simulate_needs_scenario(self, tmp_path, benign_mission):
        code = run("simulate", "--mission", benign_mission,
                   "-o", tmp_path / "x.jsiq")
        assert code == cli.EXIT_CONFIG


class TestReportCommand:
    def test_report_summary_and_plot(self, tmp_path, jam_mission):
        out = tmp_path / "summary.json"
        png = tmp_path / "map.png"
        code = run("report", "--mission", jam_mission, "-o", out, "--plot", png)
        assert code == cli.EXIT_JAMMING
        summary = json.loads(out.read_text())
        assert summary["snapshots"] == 60
        assert summary["estimate"] is not None
        err = np.hypot(summary["estimate"]["centroid"][0] - 120.0,
                       summary["estimate"]["centroid"][1] + 60.0)
        assert err <= 20.0
        assert png.exists() and png.stat().st_size > 0
