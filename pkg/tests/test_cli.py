import csv
import io
import json

import numpy as np
import pytest

from conftest import DATA
from qgt.cli import main
from qgt.limits import bound_sheet


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_no_args_and_unknown(capsys):
    code, _, err = run(capsys)
    assert code == 64 and "usage" in err
    code, _, err = run(capsys, "frobnicate")
    assert code == 64 and "usage" in err
    code, _, _ = run(capsys, "bounds", "--n", "64")
    assert code == 64


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--n", 1048576, "--kappa", 0.6, "--delta", 0.25)
    assert code == 0
    sheet = json.loads(out)
    assert sheet == json.loads(json.dumps(bound_sheet(1048576, 0.6, 0.25).to_dict()))
    assert sheet["cqgt_lower"] == pytest.approx(209715.2)
    code, _, err = run(capsys, "bounds", "--n", 1024, "--kappa", 0.2, "--delta", 0.25)
    assert code == 1 and "delta" in err


def test_sweep(capsys, tmp_path):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--n", 1024, 4096, "--kappa", 0.5, "--delta", 0.1, "--lambda", 0.7, "-o", out_file)
    assert code == 0
    rows = list(csv.DictReader(out_file.open()))
    assert len(rows) == 2
    assert list(rows[0])[:10] == ["n", "kappa", "delta", "lambda", "regime", "lower", "upper", "basic", "constr", "combined"]
    code, out, _ = run(capsys, "sweep", "--n", 1024, "--kappa", 0.5, "--delta", 0.1)
    assert len(list(csv.DictReader(io.StringIO(out)))) == 1


def test_verify(capsys, tmp_path):
    m = tmp_path / "i4.txt"
    m.write_text("QGTMAT v1 4 4 B\n1000\n0100\n0010\n0001\n")
    code, out, _ = run(capsys, "verify", "--code", m, "--d0", 1, "--e", 0.4)
    rep = json.loads(out)
    assert code == 0 and rep["min_linf"] == 1 and rep["detecting"]
    assert rep["witness"] == [1, 0, 0, 0]
    code, out, _ = run(capsys, "verify", "--code", m, "--d0", 1, "--e", 0.6)
    assert not json.loads(out)["detecting"]


def test_basic_round_trip(capsys, tmp_path):
    c = tmp_path / "b.qgt"
    code, out, _ = run(capsys, "build", "basic", "--n", 64, "--kappa", 0.75, "--delta", 0.125, "--inner", "recursive-split", "-o", c)
    assert code == 0 and json.loads(out)["kind"] == "basic"
    x = np.random.default_rng(0).integers(0, 2, 64)
    (tmp_path / "x.txt").write_text("\n".join(map(str, x)) + "\n")
    code, _, _ = run(capsys, "encode", "--code", c, "--x", tmp_path / "x.txt", "-o", tmp_path / "y.txt")
    assert code == 0
    code, _, err = run(capsys, "decode", "basic", "--code", c, "--y", tmp_path / "y.txt", "--truth", tmp_path / "x.txt", "-o", tmp_path / "xh.txt")
    assert code == 0 and json.loads(err)["hamming_error"] == 0
    assert np.loadtxt(tmp_path / "xh.txt", dtype=int).tolist() == x.tolist()
    code, _, err = run(capsys, "verify", "--code", c, "--d0", 1, "--e", 0.5)
    assert code == 1 and "64 columns" in err
    small = tmp_path / "small.qgt"
    run(capsys, "build", "basic", "--n", 12, "--d0", 4, "--e", 1, "-o", small)
    code, out, _ = run(capsys, "verify", "--code", small, "--d0", 1, "--e", 0.5, "--cap", 2)
    rep = json.loads(out)
    assert code == 0 and rep["weight_range"] == [1, 2] and rep["detecting"]


def test_combined_report(capsys, tmp_path):
    c = tmp_path / "c.qgt"
    graph = DATA / "desk_16_64_4_8.qgtexp"
    code, _, _ = run(capsys, "build", "combined", "--n", 16, "--d0", 1, "--e", 1, "--k", 4, "--inner", "identity", "--inner-width", 1, "--graph", graph, "-o", c)
    assert code == 0
    x = np.zeros(16, dtype=int)
    x[[2, 9, 11]] = 1
    (tmp_path / "x.txt").write_text("\n".join(map(str, x)))
    run(capsys, "encode", "combined", "--code", c, "--x", tmp_path / "x.txt", "--noise", "segment-attack:0.5:1", "-o", tmp_path / "y.txt")
    code, out, _ = run(capsys, "decode", "combined", "--code", c, "--y", tmp_path / "y.txt", "--truth", tmp_path / "x.txt", "-o", tmp_path / "xh.txt")
    rep = json.loads(out)
    assert code == 0
    assert set(rep) == {"hamming_error", "step_a_error", "step_b_corrections", "measurements_used"}
    assert rep["hamming_error"] <= 4 and rep["measurements_used"] == 32 + 256
    code, _, err = run(capsys, "decode", "scqgt", "--code", c, "--y", tmp_path / "y.txt")
    assert code == 1 and "combined" in err


def test_scqgt_build_from_flags(capsys, tmp_path):
    g = tmp_path / "g.qgtexp"
    code, _, _ = run(capsys, "build", "expander", "--n", 8, "--m-log2", 5, "--degree", 4, "--expansion", 3.5, "--k-bound", 4, "--search", "--seed", 1, "-o", g)
    assert code == 0 and g.read_text().startswith("QGTEXP v1 8 32 4 4 3.5 1")
    code, out, _ = run(capsys, "build", "scqgt", "--n", 8, "--d0", 1, "--e", 1, "--k", 2, "--graph", g, "-o", tmp_path / "s.qgt")
    assert code == 0 and json.loads(out)["height"] == 128
    code, _, err = run(capsys, "build", "scqgt", "--n", 8, "--d0", 1, "--e", 1, "--k", 2, "-o", tmp_path / "s.qgt")
    assert code == 64


def test_experiment_and_probe(capsys, tmp_path):
    c = tmp_path / "c.qgt"
    run(capsys, "build", "scqgt", "--n", 16, "--d0", 1, "--e", 1, "--k", 4, "--graph", DATA / "desk_16_64_4_8.qgtexp", "-o", c)
    cfg = tmp_path / "run.cfg"
    cfg.write_text("code = c.qgt\nnoise = all:0.5\ntrials = 5\nseed = 2\n")
    code, out, _ = run(capsys, "experiment", "--config", cfg, "--results-csv", tmp_path / "r.csv")
    reports = json.loads(out)
    assert code == 0 and len(reports) == 5
    assert all(r["aggregate"]["violations"] == 0 for r in reports)
    assert len((tmp_path / "r.csv").read_text().splitlines()) == 6
    code, out, _ = run(capsys, "experiment", "--set", f"code={c}", "noise=zero:0", "trials=3")
    assert code == 0 and json.loads(out)["trials"] == 3
    code, out, _ = run(capsys, "probe", "--n", 6, "--d0", 1, "--e", 0.4, "--height", 6, "--trials", 10)
    assert code == 0 and 0 <= json.loads(out)["fraction"] <= 1


def test_io_errors(capsys, tmp_path):
    code, _, _ = run(capsys, "decode", "--code", tmp_path / "missing.qgt", "--y", tmp_path / "y.txt")
    assert code == 2
    bad = tmp_path / "bad.qgt"
    bad.write_text("not a code\n")
    code, _, _ = run(capsys, "verify", "--code", bad, "--d0", 1, "--e", 1)
    assert code == 2
