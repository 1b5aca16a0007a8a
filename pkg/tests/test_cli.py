import json
import subprocess
import sys

import pytest

from conftest import GAUSS5
from tarpbench.cli import build_parser, main


@pytest.fixture
def spec_file(tmp_path):
    f = tmp_path / "gauss5.json"
    f.write_text(json.dumps(GAUSS5))
    return f


@pytest.fixture
def small_csv(tmp_path, spec_file):
    out = tmp_path / "d.csv"
    assert main(["synth", "--spec", str(spec_file), "--count", "400", "--seed", "1",
                 "--out", str(out)]) == 0
    return out


def _estimate(tmp_path, *extra, out="c.json"):
    path = tmp_path / out
    argv = ["estimate", "--runs", "3", "--kmax", "2", "--seed", "4", "--out", str(path),
            *extra]
    return main(argv), path


class TestSynth:
    def test_writes_csv_and_prints_bayes_error(self, tmp_path, spec_file, capsys):
        out = tmp_path / "s.csv"
        rc = main(["synth", "--spec", str(spec_file), "--count", "6000", "--seed", "2018",
                   "--out", str(out)])
        assert rc == 0
        assert len(out.read_text().splitlines()) == 6001
        line = capsys.readouterr().out.splitlines()[0]
        assert "closed form" in line
        assert float(line.rsplit(":", 1)[1]) < 1e-6

    def test_count_zero(self, tmp_path, spec_file):
        rc = main(["synth", "--spec", str(spec_file), "--count", "0", "--seed", "1",
                   "--out", str(tmp_path / "x.csv")])
        assert rc == 1

    def test_equal_means(self, tmp_path, capsys):
        f = tmp_path / "eq.json"
        f.write_text(json.dumps(dict(GAUSS5, mu2=GAUSS5["mu1"])))
        assert main(["synth", "--spec", str(f), "--count", "10", "--seed", "0",
                     "--out", str(tmp_path / "x.csv")]) == 0
        assert capsys.readouterr().out.splitlines()[0].endswith(": 0.5")

    def test_invalid_spec(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text(json.dumps({"mu1": [0]}))
        assert main(["synth", "--spec", str(f), "--count", "10", "--seed", "0",
                     "--out", str(tmp_path / "x.csv")]) == 2


class TestEstimate:
    def test_csv_dataset(self, tmp_path, small_csv, capsys):
        rc, path = _estimate(tmp_path, "--data", str(small_csv), "--n", "1,3",
                             "--label-column", "label")
        assert rc == 0
        recs = json.loads(path.read_text())
        assert [r["n"] for r in recs] == [1, 3]
        assert [p["k"] for p in recs[0]["points"]] == [1, 2]
        assert "B_k^n" in capsys.readouterr().out

    def test_config_echo(self, tmp_path, spec_file):
        rc, path = _estimate(tmp_path, "--synth", str(spec_file), "--count", "500")
        cfg = json.loads(path.read_text())[0]["config"]
        assert cfg["seed"] == 4 and cfg["k_max"] == 2 and cfg["runs"] == 3
        assert cfg["synth"] == str(spec_file) and cfg["n_list"] == [1]
        assert cfg["split"] == "stratified_random" and cfg["kmax_guard"] == "warn"

    def test_csv_output_with_config_comment(self, tmp_path, spec_file):
        rc, path = _estimate(tmp_path, "--synth", str(spec_file), "--count", "500",
                             out="c.csv")
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# config:")
        assert lines[1] == "n,k,mean_error,std_error,mean_training_time_s,mean_testing_time_s"
        assert len(lines) == 4

    def test_missing_file(self, tmp_path, capsys):
        rc, _ = _estimate(tmp_path, "--data", str(tmp_path / "nope.csv"))
        assert rc == 2
        assert "load failed" in capsys.readouterr().err

    def test_kmax_guard_refuse(self, tmp_path, spec_file, capsys):
        rc, path = _estimate(tmp_path, "--synth", str(spec_file), "--count", "200",
                             "--kmax-guard", "refuse", "--kmax", "5")
        assert rc == 2 and not path.exists()
        assert "kmax-guard" in capsys.readouterr().err

    def test_kmax_guard_warn(self, tmp_path, spec_file):
        with pytest.warns(UserWarning, match="per leaf"):
            rc, _ = _estimate(tmp_path, "--synth", str(spec_file), "--count", "200",
                              "--kmax", "5")
        assert rc == 0

    def test_seed_is_mandatory(self, tmp_path, spec_file):
        with pytest.raises(SystemExit) as exc:
            main(["estimate", "--synth", str(spec_file), "--kmax", "2"])
        assert exc.value.code == 1

    @pytest.mark.parametrize("flags", [["--n", "0"], ["--runs", "0"], ["--kmax", "0"],
                                       ["--fractions", "0.5,0.5,0.5"]])
    def test_bad_values_are_usage_errors(self, tmp_path, spec_file, flags):
        rc, _ = _estimate(tmp_path, "--synth", str(spec_file), *flags)
        assert rc == 1


class TestRegionAndExport:
    CURVE = [{"dataset": "toy", "n": 1, "b0": 0.5,
              "points": [{"k": 1, "mean_error": 0.3, "std_error": 0.01,
                          "mean_training_time_s": 1.0, "mean_testing_time_s": 0.1,
                          "runs": 100},
                         {"k": 2, "mean_error": 0.2, "std_error": 0.01,
                          "mean_training_time_s": 2.0, "mean_testing_time_s": 0.2,
                          "runs": 100}],
              "asymptote": {"value": 0.2, "converged": True}}]
    METHODS = [{"name": "worse", "error": 0.6, "training_time_s": 1, "testing_time_s": 1},
               {"name": "great", "error": 0.05, "training_time_s": 9, "testing_time_s": 1}]

    @pytest.fixture
    def files(self, tmp_path):
        c, m = tmp_path / "c.json", tmp_path / "m.json"
        c.write_text(json.dumps(self.CURVE))
        m.write_text(json.dumps(self.METHODS))
        return c, m

    def test_region_report(self, files, capsys):
        c, m = files
        assert main(["region", "--curves", str(c), "--methods", str(m)]) == 0
        out = capsys.readouterr().out
        assert "worse: negative_gain (dominated by b0 anchor" in out
        assert "great: structural_gain (margin 0.1500" in out
        assert "provisional" not in out

    def test_region_provisional_warning(self, tmp_path, files, capsys):
        c, m = files
        rec = json.loads(c.read_text())
        rec[0]["asymptote"]["converged"] = False
        c.write_text(json.dumps(rec))
        main(["region", "--curves", str(c), "--methods", str(m)])
        assert "provisional" in capsys.readouterr().out

    def test_region_curve_without_points(self, tmp_path, files):
        c, m = files
        rec = json.loads(c.read_text())
        rec[0]["points"] = []
        c.write_text(json.dumps(rec))
        assert main(["region", "--curves", str(c), "--methods", str(m)]) == 2

    def test_export_csv(self, tmp_path, files):
        c, _ = files
        out = tmp_path / "o.csv"
        assert main(["export", "--curves", str(c), "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 3

    def test_export_json_with_methods(self, tmp_path, files):
        c, m = files
        out = tmp_path / "o.json"
        assert main(["export", "--curves", str(c), "--out", str(out),
                     "--methods", str(m)]) == 0
        regions = [x["region"] for x in json.loads(out.read_text())[0]["methods"]]
        assert regions == ["negative_gain", "structural_gain"]

    def test_malformed_curves(self, tmp_path, files):
        _, m = files
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["region", "--curves", str(bad), "--methods", str(m)]) == 2


@pytest.mark.parametrize("cmd", ["estimate", "synth", "region", "export"])
def test_help_lists_every_flag(cmd, capsys):
    with pytest.raises(SystemExit) as exc:
        main([cmd, "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    sub = build_parser()._subparsers._group_actions[0].choices[cmd]
    for action in sub._actions:
        for opt in action.option_strings:
            assert opt in text


def test_unknown_flag_fails_fast():
    proc = subprocess.run([sys.executable, "-m", "tarpbench", "region", "--bogus"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "unrecognized arguments" in proc.stderr or "required" in proc.stderr


def test_module_entry_point_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "tarpbench", "estimate", "--data",
                           str(tmp_path / "missing.csv"), "--kmax", "1", "--seed", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
