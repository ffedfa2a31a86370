"""End-to-end tests of the command-line interface."""

import csv
import json
import subprocess
import sys

import pytest

from ma_multicast.cli import main


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "system.json"
    path.write_text(json.dumps({
        "tx_antennas": 2,
        "group_sizes": [2],
        "paths": 2,
        "region_size": 2.0,
        "pmax_dbm": 10.0,
        "noise_dbm": -80.0,
        "user_radius": 10.0,
    }))
    return path


class TestRunCommand:
    def test_smoke_run_writes_outputs(self, config_file, tmp_path):
        out = tmp_path / "results"
        code = main([
            "run", "--config", str(config_file),
            "--sweep", "pmax_dbm", "--values", "10,15",
            "--reps", "1", "--schemes", "proposed,fpa",
            "--seed", "3", "--out", str(out),
            "--rx-mode", "seq", "--epsilon", "1e-3", "--max-iters", "3",
        ])
        assert code == 0
        with open(out / "raw.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 1 + 2 * 2
        assert rows[1][0] == "1"  # schema version stamp
        assert (out / "agg.csv").exists()
        assert len(list((out / "traces").glob("*.jsonl"))) == 4

    def test_no_traces_flag(self, config_file, tmp_path):
        out = tmp_path / "results"
        code = main([
            "run", "--config", str(config_file),
            "--sweep", "pmax_dbm", "--values", "10",
            "--reps", "1", "--schemes", "fpa",
            "--out", str(out), "--rx-mode", "seq",
            "--epsilon", "1e-3", "--max-iters", "2", "--no-traces",
        ])
        assert code == 0
        assert not (out / "traces").exists()

    def test_bad_values_list_exits(self, config_file, tmp_path):
        with pytest.raises(SystemExit):
            main(["run", "--config", str(config_file), "--sweep", "pmax_dbm",
                  "--values", "10,banana", "--out", str(tmp_path / "o")])

    def test_unknown_scheme_exits(self, config_file, tmp_path):
        with pytest.raises(SystemExit):
            main(["run", "--config", str(config_file), "--sweep", "pmax_dbm",
                  "--values", "10", "--schemes", "psycho",
                  "--out", str(tmp_path / "o")])

    def test_missing_subcommand_exits(self):
        with pytest.raises(SystemExit):
            main([])

    def test_module_help_via_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ma_multicast.cli", "--help"],
            capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0
        assert "ma-multicast" in proc.stdout
