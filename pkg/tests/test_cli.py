import csv
import io
import json
import math

import pytest

from avgsample import cli
from avgsample.spectral import model_to_dict, reference_model


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bounds_csv_schema_and_order(tmp_path, capsys):
    cfg = write(tmp_path, {"t": [0.7, 0.3], "N": [64, 8, 16],
                           "scheme": {"family": "uniform", "sigma": 0.1}})
    code, out, _ = run(capsys, "bounds", "--config", cfg)
    assert code == 0
    assert out.splitlines()[0] == ",".join(cli.CSV_FIELDS)
    table = rows(out)
    assert [(float(r["t"]), int(r["N"])) for r in table] == [
        (0.3, 8), (0.3, 16), (0.3, 64), (0.7, 8), (0.7, 16), (0.7, 64)]
    # no Monte Carlo requested: those columns are empty, never 0
    assert all(r["mc_mse"] == "" and r["mc_se"] == "" for r in table)
    assert all(r["n0_flag"] in ("0", "1") for r in table)
    for r in table:
        assert float(r["exact_mse"]) <= float(r["thm3"])


def test_bounds_at_node_point_scheme(tmp_path, capsys):
    cfg = write(tmp_path, {"t": [math.pi / 2], "N": [4]})
    code, out, _ = run(capsys, "bounds", "--config", cfg)
    (row,) = rows(out)
    assert code == 0
    assert float(row["thm2"]) == float(row["thm3"]) == float(row["exact_mse"]) == 0.0
    assert row["ratio_thm3"] == ""


def test_bounds_deterministic_and_parallel_consistent(tmp_path, capsys):
    cfg = write(tmp_path, {"t": [0.3, -1.1], "N": [8, 16, 32, 64, 128, 256, 512],
                           "scheme": {"family": "triangular", "sigma": {"scale": 0.5, "exponent": 0.6}}})
    _, first, _ = run(capsys, "bounds", "--config", cfg)
    _, second, _ = run(capsys, "bounds", "--config", cfg)
    assert first == second
    config = cli.build_config(json.loads(open(cfg).read()))
    serial = cli.render_rows(cli.cmd_bounds(config), "csv")
    parallel = cli.render_rows(cli.cmd_bounds(config, workers=4), "csv")
    assert serial == parallel == first


def test_mse_reproducible_and_agrees(tmp_path, capsys):
    cfg = write(tmp_path, {"t": [0.77], "N": [16], "trials": 10000, "seed": 5,
                           "scheme": {"family": "uniform", "sigma": 0.2}})
    code, a, _ = run(capsys, "mse", "--config", cfg)
    _, b, _ = run(capsys, "mse", "--config", cfg)
    assert code == 0 and a == b
    (row,) = rows(a)
    assert abs(float(row["mc_mse"]) - float(row["exact_mse"])) <= 3 * float(row["mc_se"])
    code, c, _ = run(capsys, "mse", "--config", cfg, "--seed", "6")
    assert code == 0 and c != a


def test_mse_requires_trials(tmp_path, capsys):
    code, _, err = run(capsys, "mse", "--config", write(tmp_path, {"trials": 1}))
    assert code == 1 and "config.trials" in err


def test_zero_measure_gives_zero_row(tmp_path, capsys):
    model = {"nodes": [-0.5, 0.5], "F_re": [[0, 0], [0, 0]], "F_im": [[0, 0], [0, 0]]}
    cfg = write(tmp_path, {"model": model, "t": [0.4], "N": [8], "trials": 100,
                           "scheme": {"family": "uniform", "sigma": 0.1}})
    code, out, _ = run(capsys, "mse", "--config", cfg)
    (row,) = rows(out)
    assert code == 0
    for key in ("exact_mse", "mc_mse", "mc_se", "thm2", "lemma1", "thm3", "remark3"):
        assert float(row[key]) == 0.0


def test_model_path_and_json_format(tmp_path, capsys):
    (tmp_path / "model.json").write_text(json.dumps(model_to_dict(reference_model())))
    cfg = write(tmp_path, {"model_path": "model.json", "t": 0.3, "N": 8})
    code, out, _ = run(capsys, "bounds", "--config", cfg, "--format", "json", "--p", "3")
    assert code == 0
    (rec,) = json.loads(out)
    assert rec["p"] == 3.0 and rec["mc_mse"] is None


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "bounds", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("t,N,w,")


def test_simulate_csv(tmp_path, capsys):
    cfg = write(tmp_path, {"t": [1.0, 0.0, 2.0], "seed": 9})
    code, out, _ = run(capsys, "simulate", "--config", cfg)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "t,re,im" and len(lines) == 4
    assert [float(l.split(",")[0]) for l in lines[1:]] == [0.0, 1.0, 2.0]
    _, again, _ = run(capsys, "simulate", "--config", cfg)
    assert again == out


def test_non_psd_is_numerical_failure(tmp_path, capsys):
    model = {"nodes": [-0.5, 0.5], "F_re": [[1, 2], [2, 1]], "F_im": [[0, 0], [0, 0]]}
    code, out, err = run(capsys, "verify", "--config", write(tmp_path, {"model": model}))
    assert code == 3 and out == "" and "eigenvalue" in err


def test_non_hermitian_is_validation_error(tmp_path, capsys):
    model = {"nodes": [-0.5, 0.5], "F_re": [[1, 0.2], [0.1, 1]], "F_im": [[0, 0], [0, 0]]}
    code, _, err = run(capsys, "bounds", "--config", write(tmp_path, {"model": model}))
    assert code == 1 and "Hermitian" in err


@pytest.mark.parametrize("doc, path", [
    ({"w": 0.9}, "config.w"),
    ({"N": [0, 8]}, "config.N"),
    ({"trials": -1}, "config.trials"),
    ({"scheme": {"family": "gaussian"}}, "config.scheme.family"),
    ({"scheme": {"family": "uniform", "sigma": 2.0}}, "config.scheme.sigma"),
    ({"scheme": {"family": "point", "sigma": 0.1}}, "config.scheme.sigma"),
    ({"t": ["x"]}, "config.t"),
    ({"p": 1.0}, "config.p"),
])
def test_config_validation_paths(tmp_path, capsys, doc, path):
    code, out, err = run(capsys, "bounds", "--config", write(tmp_path, doc))
    assert code == 1 and out == "" and path in err


def test_unreadable_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "bounds", "--config", str(bad))[0] == 1
    assert run(capsys, "bounds", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_verify_failure_exit_code(monkeypatch, capsys):
    def failing(*args, **kwargs):
        return {"seed": 0, "passed": False, "suites": [{"name": "fake", "passed": False, "checks": []}]}
    monkeypatch.setattr(cli.verify_suites, "run_all", failing)
    code, out, _ = run(capsys, "verify")
    assert code == 2 and json.loads(out)["passed"] is False
