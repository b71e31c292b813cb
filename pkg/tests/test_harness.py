import csv
import json

import numpy as np
import pytest

from qgt.basic import build_basic
from qgt.codefile import format_codefile, load_code, parse_codefile, save_code
from qgt.combined import build_combined
from qgt.harness import (
    CSV_COLUMNS,
    ConfigError,
    expand_noise,
    load_config,
    parse_config,
    run_experiment,
)
from qgt.linalg import FormatError
from qgt.params import CodeParams
from qgt.scqgt import build_scqgt


@pytest.fixture(scope="module")
def code_files(tmp_path_factory, desk_graph):
    root = tmp_path_factory.mktemp("codes")
    codes = {
        "basic": build_basic(CodeParams.from_exponents(256, 0.75, 0.125)),
        "scqgt": build_scqgt(CodeParams.direct(16, 1, 1.0, 4), graph=desk_graph),
        "combined": build_combined(
            CodeParams.direct(16, 1, 1.0, 4), graph=desk_graph, inner="identity", inner_width=1
        ),
    }
    for kind, code in codes.items():
        save_code(code, root / f"{kind}.qgt")
    return root, codes


@pytest.mark.parametrize("kind", ["basic", "scqgt", "combined"])
def test_code_file_round_trip(code_files, kind):
    root, codes = code_files
    back, digest = load_code(root / f"{kind}.qgt")
    assert len(digest) == 64
    assert back.params == codes[kind].params
    assert back.describe() == codes[kind].describe()
    assert np.array_equal(np.asarray(back.matrix() if kind != "basic" else back.matrix().to_dense()),
                          np.asarray(codes[kind].matrix() if kind != "basic" else codes[kind].matrix().to_dense()))
    assert format_codefile(back) == format_codefile(codes[kind])


def test_code_file_errors(code_files):
    root, _ = code_files
    text = (root / "combined.qgt").read_text()
    with pytest.raises(FormatError):
        parse_codefile(text.replace("QGTCODE v1", "QGTCODE v9"))
    with pytest.raises(FormatError):
        parse_codefile(text.split("BEGIN graph")[0])
    with pytest.raises(FormatError):
        parse_codefile(text.replace("END graph", ""))
    with pytest.raises(FormatError):
        parse_codefile("\n".join(ln for ln in text.splitlines() if not ln.startswith("d0 ")))


def test_config_parsing(tmp_path):
    cfg = parse_config("code = a.qgt  # comment\n\nnoise=uniform:1\n", ["trials=5"])
    assert cfg == {"code": "a.qgt", "noise": "uniform:1", "trials": "5"}
    with pytest.raises(ConfigError):
        parse_config("no equals sign")
    with pytest.raises(ConfigError):
        parse_config("colour = red")
    (tmp_path / "run.cfg").write_text("code = c.qgt\n")
    assert load_config(tmp_path / "run.cfg")["code"] == str(tmp_path / "c.qgt")


def test_expand_noise():
    runs = expand_noise({"noise": "all:0.5:3", "trials": "2"})
    assert [r["noise"].split(":")[0] for r in runs][:2] == ["zero", "uniform"]
    assert len(runs) == 5 and all(r["noise"].endswith(":0.5:3") for r in runs)
    assert expand_noise({"noise": "zero:1"}) == [{"noise": "zero:1"}]


@pytest.mark.parametrize("kind", ["basic", "scqgt", "combined"])
def test_zero_noise_is_exact(code_files, kind):
    root, _ = code_files
    rep = run_experiment({"code": str(root / f"{kind}.qgt"), "noise": "zero:0", "trials": "10"})
    assert rep.aggregate["max_error"] == 0 and rep.aggregate["violations"] == 0
    assert rep.params["n"] == rep.code["n"]
    assert rep.within_budget


def test_determinism_and_threads(code_files):
    root, _ = code_files
    cfg = {"code": str(root / "combined.qgt"), "noise": "confusion-attack:0.5", "trials": "30", "seed": "11"}
    a = run_experiment({**cfg, "threads": "1"})
    b = run_experiment({**cfg, "threads": "4"})
    assert a.to_json(timing=False) == b.to_json(timing=False)
    assert a.run_id == b.run_id
    c = run_experiment({**cfg, "seed": "12"})
    assert c.to_json(timing=False) != a.to_json(timing=False)
    assert "decode_ms" in a.records[0] and "decode_ms" not in a.to_dict(timing=False)["records"][0]
    assert a.aggregate["step_a_sparse"]


def test_csv_append(code_files, tmp_path):
    root, _ = code_files
    out = tmp_path / "results.csv"
    for strategy in ("zero", "uniform"):
        run_experiment({"code": str(root / "scqgt.qgt"), "noise": f"{strategy}:0.5", "trials": "3",
                        "results_csv": str(out)})  # fmt: skip
    rows = list(csv.DictReader(out.open()))
    assert [r["strategy"] for r in rows] == ["zero", "uniform"]
    assert tuple(rows[0]) == CSV_COLUMNS
    assert rows[0]["code_sha256"] == load_code(root / "scqgt.qgt")[1]


def test_over_budget_is_flagged(code_files):
    root, _ = code_files
    rep = run_experiment({"code": str(root / "basic.qgt"), "noise": "uniform:5", "trials": "2"})
    assert not rep.within_budget
    json.loads(rep.to_json())


def test_experiment_errors(code_files):
    root, _ = code_files
    with pytest.raises(ConfigError):
        run_experiment({"noise": "zero:0"})
    with pytest.raises(ConfigError):
        run_experiment({"code": str(root / "basic.qgt"), "trials": "0"})
    with pytest.raises(FileNotFoundError):
        run_experiment({"code": str(root / "missing.qgt")})
