import csv
import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hkinstanton.ak import AkConfiguration, multi_center_potential
from hkinstanton.cli import dumps, main
from hkinstanton.dk import atiyah_hitchin_closed_form

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def run(argv, tmp_path):
    out = tmp_path / "out.txt"
    code = main(list(argv) + ["--out", str(out)])
    return code, out.read_text() if out.exists() else ""


class TestExitCodes:
    def test_unknown_suite(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["verify", "nonsense"])
        assert err.value.code == 2

    def test_schema_violation(self, tmp_path):
        path = write(tmp_path, {"family": "Ak", "centers": [[0, 0]]})
        assert main(["metric", "--config", path]) == 2

    def test_unparseable_config(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        assert main(["metric", "--config", str(p)]) == 2

    def test_missing_config(self, tmp_path):
        assert main(["metric", "--config", str(tmp_path / "absent.json")]) == 2

    def test_bad_seed(self):
        with pytest.raises(SystemExit) as err:
            main(["verify", "spin", "--seed", "-1"])
        assert err.value.code == 2

    def test_d1_periods_unsupported(self, tmp_path, capsys):
        path = write(tmp_path, {"family": "Dk", "k": 1, "moduli": [[0, 0, 1]], "alpha": -1.0})
        assert main(["periods", "--config", path]) == 2
        assert "unsupported" in capsys.readouterr().err

    def test_csv_periods_rejected(self, tmp_path):
        path = write(tmp_path, {"family": "Ak", "centers": [[0, 0, 0], [0, 0, 1]]})
        assert main(["periods", "--config", path, "--format", "csv"]) == 2

    def test_point_error_gives_exit_3_and_output(self, tmp_path):
        path = write(tmp_path, {"family": "Ak", "centers": [[0, 0, 0], [0, 0, 1]],
                                "points": [{"r": [0, 0, 1]}, {"r": [1, 1, 1]}]})
        code, text = run(["metric", "--config", path], tmp_path)
        assert code == 3
        pts = json.loads(text)["points"]
        assert pts[0]["error"]["code"] == "POLE"
        assert pts[1]["error"] is None

    def test_no_solution_is_reported(self, tmp_path):
        cfg = json.loads((CONFIGS / "d2_alf.json").read_text())
        cfg["points"] = [{"rho": 0.5, "euler": [0.4, 1.0, 2.0]}]
        code, text = run(["metric", "--config", write(tmp_path, cfg)], tmp_path)
        assert code == 3
        assert json.loads(text)["points"][0]["error"]["code"] == "NO_SOLUTION"


class TestMetric:
    def test_empty_point_list(self, tmp_path):
        path = write(tmp_path, {"family": "Ak", "centers": [[0, 0, 0]], "points": []})
        code, text = run(["metric", "--config", path], tmp_path)
        doc = json.loads(text)
        assert code == 0 and doc["points"] == []
        assert doc["format_version"] == "1.0"

    def test_two_center_gibbons_hawking(self, tmp_path):
        centers = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]
        path = write(tmp_path, {"family": "Ak", "k": 1, "centers": centers, "alpha": 0.5,
                                "points": [{"r": [0.4, -0.3, 0.2]}]})
        code, text = run(["metric", "--config", path], tmp_path)
        assert code == 0
        rec = json.loads(text)["points"][0]
        V = multi_center_potential([0.4, -0.3, 0.2], AkConfiguration(tuple(map(tuple, centers)), 0.5))
        assert rec["V"] == pytest.approx(V, rel=1e-15)
        assert np.allclose(np.diag(rec["G"]), [V / 2, V / 2, V / 2, 1 / (2 * V)])
        assert rec["signature"] == [4, 0]

    def test_atiyah_hitchin_point(self, tmp_path):
        path = write(tmp_path, {"family": "AtiyahHitchin",
                                "points": [{"rho": 2.0, "e2": 0.3, "euler": [0.1, 0.9, 0.4]}]})
        code, text = run(["metric", "--config", path], tmp_path)
        assert code == 0
        rec = json.loads(text)["points"][0]
        ref = atiyah_hitchin_closed_form(2.0, 0.3).scaled(-2 * rec["alpha"])
        assert np.allclose(rec["closed_form"]["G"], ref.G)
        assert rec["residuals"]["closed_form"] < 1e-9
        assert np.allclose(rec["W_unrotated"], ref.W, atol=1e-9 * np.abs(ref.W).max())

    def test_determinism_and_jobs(self, tmp_path):
        path = str(CONFIGS / "a1_two_center.json")
        a = run(["metric", "--config", path, "--seed", "42"], tmp_path)[1]
        b = run(["metric", "--config", path, "--seed", "42"], tmp_path)[1]
        c = run(["metric", "--config", path, "--seed", "42", "--jobs", "2"], tmp_path)[1]
        d = run(["metric", "--config", path, "--seed", "43"], tmp_path)[1]
        assert a == b == c
        assert a != d

    def test_csv_output(self, tmp_path):
        path = str(CONFIGS / "a1_two_center.json")
        code, text = run(["metric", "--config", path, "--format", "csv"], tmp_path)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 5
        assert float(rows[0]["G00"]) > 0 and rows[0]["error"] == ""


def test_scan_grid(tmp_path):
    path = write(tmp_path, {"family": "AtiyahHitchin",
                            "grid": {"rho": [1.0, 3.0, 3], "e2_fraction": [-0.5, 0.5, 2]}})
    code, text = run(["scan", "--config", path], tmp_path)
    assert code == 0
    pts = json.loads(text)["points"]
    assert [p["index"] for p in pts] == list(range(6))
    assert all(p["residuals"]["closed_form"] < 1e-9 for p in pts)


def test_periods_d2(tmp_path):
    path = write(tmp_path, {"family": "Dk", "k": 2, "moduli": [[1, 0, 0], [0, 1, 0]], "alpha": -1.0})
    code, text = run(["periods", "--config", path], tmp_path)
    assert code == 0
    per = json.loads(text)["periods"]
    assert np.allclose(per, [[2 * np.pi, -2 * np.pi, 0], [2 * np.pi, 2 * np.pi, 0]])


def test_verify_single_suite(tmp_path):
    code, text = run(["verify", "elliptic", "--seed", "7"], tmp_path)
    doc = json.loads(text)
    assert code == 0 and doc["passed"]
    assert all(c["passed"] for c in doc["suites"]["elliptic"]["checks"])


def test_number_format():
    text = dumps({"b": 0.1, "a": [1, 2.5e-300]})
    assert text.index('"a"') < text.index('"b"')
    assert "0.10000000000000001" in text
    assert json.loads(text) == {"a": [1, 2.5e-300], "b": 0.1}


@pytest.mark.skipif(shutil.which("hkinstanton") is None, reason="console script not installed")
def test_console_script(tmp_path):
    out = subprocess.run(["hkinstanton", "periods", "--config", str(CONFIGS / "a1_two_center.json")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["command"] == "periods"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hkinstanton.cli", "verify", "bogus"],
                         capture_output=True, text=True)
    assert out.returncode == 2


def test_d0_point_solves_constraint(tmp_path):
    code, text = run(["metric", "--config", str(CONFIGS / "d0_alf.json")], tmp_path)
    assert code == 0
    rec = json.loads(text)["points"][0]
    assert abs(rec["residuals"]["constraint"]) < 1e-10
    assert rec["residuals"]["I_squared"] < 1e-8 and rec["residuals"]["I1I2_plus_I3"] < 1e-8
    G = np.asarray(rec["G"])
    # the k = 0 metric is diagonal in the left-invariant coframe
    assert np.abs(G - np.diag(np.diag(G))).max() < 1e-12 * np.abs(G).max()
