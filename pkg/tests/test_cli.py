import csv
import json

import numpy as np
import pytest

from hhsimplex.cli import main


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def test_family_dim2(tmp_path, capsys):
    code, out = run(tmp_path, "family", "--dim", "2", "--simplex", "standard")
    assert code == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert len(doc["results"]) == 7
    for entry in doc["results"]:
        np.testing.assert_allclose(entry["barycenter"], [1 / 3, 1 / 3], atol=1e-15)
        assert len(entry["vertices"]) == 3 - entry["card"]
    assert doc["config"]["dim"] == 2


def test_family_dim1(tmp_path):
    code, out = run(tmp_path, "family", "--dim", "1")
    doc = json.loads(out.read_text())
    assert code == 0 and len(doc["results"]) == 3
    points = [e for e in doc["results"] if e["card"] == 1]
    assert [p["vertices"] for p in points] == [[[0.5]], [[0.5]]]


def test_family_dim6_random(tmp_path):
    code, out = run(tmp_path, "family", "--dim", "6", "--simplex", "random", "--seed", "7")
    doc = json.loads(out.read_text())
    assert code == 0 and len(doc["results"]) == 127
    assert doc["summary"]["max_barycenter_deviation"] <= 1e-12 * doc["base"]["max_edge_length"]


def test_family_csv(tmp_path):
    code, out = run(tmp_path, "family", "--dim", "2", "--format", "csv")
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert code == 0 and len(rows) == 7
    assert float(rows[0]["volume"]) == 0.5


def test_family_rejects_large_dim(tmp_path, capsys):
    code, _ = run(tmp_path, "family", "--dim", "7")
    assert code == 2
    assert "n must be <= 6" in capsys.readouterr().err


def test_verify_standard_passes(tmp_path, capsys):
    code, out = run(tmp_path, "verify", "--samples", "20000")
    assert code == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"config", "simplex", "results", "summary"}
    assert doc["summary"]["fail"] == 0
    methods = {r["hh_bounds"]["mid"]["method"] for r in doc["results"]}
    assert methods == {"exact_polynomial", "monte_carlo"}
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("dim", [1, 2, 3])
def test_verify_nonconvex_fails(tmp_path, capsys, dim):
    code, out = run(tmp_path, "verify", "--dim", str(dim), "--include-nonconvex", "--samples", "5000")
    assert code == 1
    err = capsys.readouterr().err
    assert "FAIL neg_sq_norm: theorem" in err
    doc = json.loads(out.read_text())
    assert doc["summary"]["fail"] > 0
    assert all(name.startswith("neg_sq_norm") for name in doc["summary"]["failed"])


def test_verify_deterministic(tmp_path):
    args = ["verify", "--dim", "3", "--simplex", "random", "--seed", "5", "--samples", "5000",
            "--workers", "1"]
    _, a = run(tmp_path, *args, name="a.json")
    _, b = run(tmp_path, *args, name="b.json")
    assert a.read_bytes() == b.read_bytes()


def test_verify_seed_env(tmp_path, monkeypatch):
    monkeypatch.setenv("HH_SEED", "11")
    _, a = run(tmp_path, "verify", "--func", "norm", "--samples", "1000", name="a.json")
    assert json.loads(a.read_text())["config"]["seed"] == 11
    _, b = run(tmp_path, "verify", "--func", "norm", "--samples", "1000", "--seed", "3", name="b.json")
    assert json.loads(b.read_text())["config"]["seed"] == 3


def test_verify_csv_and_workers(tmp_path):
    code, out = run(tmp_path, "verify", "--func", "log_sum_exp", "--samples", "4000",
                    "--workers", "2", "--format", "csv")
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert code == 0 and rows and {r["verdict"] for r in rows} == {"pass"}


def test_verify_exact_needs_polynomials(tmp_path, capsys):
    code, _ = run(tmp_path, "verify", "--method", "exact")
    assert code == 2
    code, _ = run(tmp_path, "verify", "--method", "exact", "--func", "quadratic,quartic")
    assert code == 0


def test_subdivide_interval(tmp_path):
    code, out = run(tmp_path, "subdivide", "--dim", "1", "--func", "sq_norm,affine", "--pmax", "2")
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert [float(r["avg_sq_norm"]) for r in rows] == [0.25, 0.3125, 0.328125]
    assert [float(r["ref_sq_norm"]) for r in rows] == pytest.approx([1 / 3] * 3, abs=1e-15)
    assert len({r["avg_affine"] for r in rows}) == 1
    assert [int(r["count"]) for r in rows] == [1, 2, 4]
    assert rows[1]["ref_sq_norm"] == "0.33333333333333331"


def test_subdivide_counts_and_json(tmp_path):
    code, out = run(tmp_path, "subdivide", "--dim", "3", "--func", "norm", "--pmax", "3",
                    "--samples", "2000", "--format", "json")
    doc = json.loads(out.read_text())
    assert code == 0
    assert [r["count"] for r in doc["results"][0]["rows"]] == [1, 4, 16, 64]


def test_subdivide_cap_overflow(tmp_path, capsys):
    code, out = run(tmp_path, "subdivide", "--dim", "3", "--pmax", "10")
    assert code == 3 and not out.exists()
    assert "1000000" in capsys.readouterr().err


def test_simplex_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps([[0, 0], [2, 0], [0, 2]]))
    code, out = run(tmp_path, "family", "--simplex", f"file:{path}")
    assert code == 0
    assert json.loads(out.read_text())["base"]["volume"] == 2.0
    code, _ = run(tmp_path, "family", "--dim", "3", "--simplex", f"file:{path}")
    assert code == 2


def test_degenerate_file_exit3(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(json.dumps([[0, 0], [1, 1], [2, 2]]))
    code, _ = run(tmp_path, "verify", "--simplex", f"file:{path}")
    assert code == 3


@pytest.mark.parametrize("args", [
    ["verify", "--simplex", "cube"],
    ["verify", "--func", "cubic"],
    ["verify", "--samples", "1"],
    ["family", "--simplex", "file:/nonexistent.json"],
])
def test_invalid_config_exit2(tmp_path, args):
    code, _ = run(tmp_path, *args)
    assert code == 2


def test_argparse_errors_exit2(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--method", "simpson"])
    assert exc.value.code == 2


def test_verbose_progress(tmp_path, capsys):
    code, _ = run(tmp_path, "verify", "--func", "affine", "--verbose")
    assert code == 0
    assert "verifying affine" in capsys.readouterr().out
