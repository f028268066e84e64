"""CLI subcommands, exit codes and the simulate/metrics round trip."""
import json
from pathlib import Path

import pytest

from prachjam.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def small_config(tmp_path, **extra) -> Path:
    doc = {
        "n_intervals": 3,
        "interval_duration": 1.0,
        "jammer_lead": 0.3,
        "jammer_lag": 0.3,
        "ue_startup_delay": 0.1,
        "base_seed": 42,
        "preset": "index98_40mhz_desk",
        "spectrum": {"kind": "S2", "snr_db": -16.0},
        "channel": {"noise_sigma": 0.7071067811865476},
    }
    doc.update(extra)
    path = tmp_path / "campaign.json"
    path.write_text(json.dumps(doc))
    return path


def summary_without_timestamp(path: Path) -> str:
    data = json.loads(path.read_text())
    data.pop("generated_at")
    return json.dumps(data, indent=2, sort_keys=True)


class TestZc:
    def test_sequence_csv(self, capsys):
        assert main(["zc", "--set", "root=1", "--set", "length=139"]) == 0
        out = capsys.readouterr().out
        lines = out.strip().splitlines()
        assert lines[0] == "index,re,im,magnitude"
        assert len(lines) == 140
        first = lines[1].split(",")
        assert float(first[1]) == pytest.approx(1.0)
        assert float(first[3]) == pytest.approx(1.0)

    def test_correlation_csv(self, capsys):
        assert main(
            ["zc", "--set", "root=1", "--set", "length=139", "--set", "xcorr_root=2"]
        ) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 140
        mags = [float(line.split(",")[3]) for line in lines[1:]]
        assert all(m == pytest.approx(1 / 139**0.5, abs=1e-9) for m in mags)

    def test_invalid_root_fails(self, capsys):
        assert main(["zc", "--set", "root=0"]) == 2


class TestOccupancy:
    def test_prints_ratio(self, capsys, tmp_path):
        cfg = small_config(tmp_path)
        assert main(["occupancy", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "0.2234 %" in out
        assert "period_factor" in out
        assert "temporal_occupation" in out
        assert "bandwidth_occupation" in out

    def test_missing_config(self, capsys):
        assert main(["occupancy"]) == 1
        assert "config" in capsys.readouterr().err


class TestSimulate:
    def test_writes_outputs(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        records = (out / "records.jsonl").read_text().strip().splitlines()
        assert len(records) == 3
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schema_version"] == 1
        assert summary["n_intervals"] == 3
        assert "occupancy" in summary and "jammer_budget" in summary
        csv_lines = (out / "preambles.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "interval,preambles_sent,preambles_detected,ra_succeeded"
        assert len(csv_lines) == 4

    def test_zero_intervals_exit_one(self, tmp_path, capsys):
        cfg = small_config(tmp_path, n_intervals=0)
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 1
        assert "n_intervals must be ≥ 1" in capsys.readouterr().err

    def test_unknown_field_exit_one(self, tmp_path, capsys):
        cfg = small_config(tmp_path, typo_field=3)
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x")]) == 1
        assert "typo_field" in capsys.readouterr().err

    def test_malformed_json_diagnostic(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{\n  \"n_intervals\": ,\n}")
        assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x")]) == 1
        err = capsys.readouterr().err
        assert "bad.json:2" in err

    def test_determinism(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["simulate", "--config", str(cfg), "--out", str(out2)]) == 0
        assert (out1 / "records.jsonl").read_bytes() == (out2 / "records.jsonl").read_bytes()

    def test_override_applies_after_load(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        out = tmp_path / "o"
        assert main(
            [
                "simulate",
                "--config",
                str(cfg),
                "--out",
                str(out),
                "--set",
                "n_intervals=1",
            ]
        ) == 0
        assert len((out / "records.jsonl").read_text().strip().splitlines()) == 1

    def test_optional_logs(self, tmp_path, capsys):
        cfg = small_config(tmp_path, detection_log=True, event_trace=True, n_intervals=1)
        out = tmp_path / "logs"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        detections = (out / "detections.jsonl").read_text().strip().splitlines()
        assert detections
        entry = json.loads(detections[0])
        assert set(entry) == {"sfn", "occasion_index", "detections", "noise_floor"}
        events = (out / "events.jsonl").read_text().strip().splitlines()
        assert events
        assert set(json.loads(events[0])) == {"time_ms", "entity", "transition"}


class TestMetricsRoundTrip:
    def test_summary_reproduced_byte_for_byte(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        out = tmp_path / "run"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        original = summary_without_timestamp(out / "summary.json")
        assert main(["metrics", "--config", str(cfg), "--out", str(out)]) == 0
        recomputed = summary_without_timestamp(out / "summary.json")
        assert original == recomputed

    def test_missing_records_exit_one(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        assert main(["metrics", "--config", str(cfg), "--out", str(tmp_path / "e")]) == 1
        assert "records" in capsys.readouterr().err

    def test_metrics_on_synthesized_records(self, tmp_path, capsys):
        # A records file carrying a known series of tallies reproduces the
        # series' summary numbers.
        cfg = small_config(tmp_path)
        out = tmp_path / "synth"
        out.mkdir()
        lines = []
        idx = 0
        for _ in range(13):  # invalid
            lines.append(dict(index=idx, valid=False, preambles_sent=1,
                              preambles_detected=0, ra_succeeded=False,
                              time_to_success=None, seed=0))
            idx += 1
        for _ in range(33):  # successful
            lines.append(dict(index=idx, valid=True, preambles_sent=2,
                              preambles_detected=1, ra_succeeded=True,
                              time_to_success=1.0, seed=0))
            idx += 1
        remaining = 343_522 - 33
        n_unsucc = 800 - 13 - 33
        for i in range(n_unsucc):
            share = remaining // n_unsucc + (1 if i < remaining % n_unsucc else 0)
            lines.append(dict(index=idx, valid=True, preambles_sent=share,
                              preambles_detected=0, ra_succeeded=False,
                              time_to_success=None, seed=0))
            idx += 1
        with (out / "records.jsonl").open("w") as fh:
            for line in lines:
                fh.write(json.dumps(line) + "\n")
        assert main(["metrics", "--config", str(cfg), "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        metrics = summary["metrics"]
        assert metrics["n_e"] == 13
        assert metrics["n_ra_s"] == 33
        assert metrics["n_p_j"] == 343_522
        assert metrics["mean_preambles_per_interval"] == pytest.approx(436.54, abs=0.01)
        assert metrics["e_p_j_ppm"] == pytest.approx(96.05, abs=0.01)
        assert metrics["e_s"] == pytest.approx(0.04193, abs=1e-4)


class TestCalibrate:
    def test_prints_factor(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        assert main(
            ["calibrate", "--config", str(cfg), "--set", "target_far=0.01"]
        ) == 0
        out = capsys.readouterr().out
        assert out.startswith("threshold_factor ")
        factor = float(out.split()[1])
        assert 1.0 < factor < 20.0


class TestShippedConfigs:
    @pytest.mark.parametrize(
        "name",
        ["reference_60s.json", "s1_60s.json", "s2_60s.json", "s1_600s.json", "quick.json"],
    )
    def test_configs_parse(self, name):
        from prachjam.campaign import load_campaign_config

        doc = json.loads((CONFIGS / name).read_text())
        cfg = load_campaign_config(doc)
        assert cfg.n_intervals >= 1

    def test_quick_config_runs(self, tmp_path, capsys):
        out = tmp_path / "quick"
        assert main(
            ["simulate", "--config", str(CONFIGS / "quick.json"), "--out", str(out)]
        ) == 0
        assert (out / "summary.json").exists()
