import json

import numpy as np
import pytest

from elasticc3.cli import main
from elasticc3.fileio import load_trace

ARGS = ["--n-aux", "40", "--n-target", "30", "--n-features", "30", "--restarts", "2"]


def _files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_pipeline_deterministic(tmp_path):
    for name in ("a", "b"):
        assert main(["pipeline", "--simulate", "--out", str(tmp_path / name),
                     "--alpha", "0.9", "--beta", "0.04", "--K", "3"] + ARGS) == 0
    a, b = _files(tmp_path / "a"), _files(tmp_path / "b")
    assert a == b
    assert {"aux.mtx", "target.mtx", "target_row_assign.txt", "target_trace.tsv",
            "aux_trace.tsv", "knowledge.json", "report.json", "manifest.json"} <= set(a)
    for trace in ("aux_trace.tsv", "target_trace.tsv"):
        assert np.all(np.diff(load_trace(tmp_path / "a" / trace)) <= 1e-9)
    man = json.loads(a["manifest.json"])
    assert man["parameters"]["alpha"] == 0.9 and "version" in man
    assert set(man["outputs"]) == set(a) - {"manifest.json"}
    report = json.loads(a["report.json"])
    assert set(report["metrics"]) == {"nmi_sqrt", "ari", "ri", "purity"}


def test_stepwise_matches_pipeline(tmp_path):
    sim, fa, tr, pipe = (tmp_path / n for n in ("sim", "fa", "tr", "pipe"))
    assert main(["simulate", "--out", str(sim)] + ARGS) == 0
    assert main(["fit-aux", "--out", str(fa), "--aux", str(sim / "aux.mtx"), "--restarts", "2"]) == 0
    assert main(["transfer", "--out", str(tr), "--target", str(sim / "target.mtx"),
                 "--knowledge", str(fa / "knowledge.json"), "--labels",
                 str(sim / "target_labels.txt"), "--alpha", "0.5", "--restarts", "2"]) == 0
    assert main(["pipeline", "--simulate", "--out", str(pipe), "--alpha", "0.5"] + ARGS) == 0
    assert (tr / "target_row_assign.txt").read_bytes() == (pipe / "target_row_assign.txt").read_bytes()
    assert main(["evaluate", "--out", str(tmp_path / "ev"), "--pred",
                 str(tr / "target_row_assign.txt"), "--labels", str(sim / "target_labels.txt")]) == 0
    ev = json.loads((tmp_path / "ev" / "metrics.json").read_text())
    tr_report = json.loads((tr / "report.json").read_text())
    assert ev["metrics"] == tr_report["metrics"]


def test_tune(tmp_path):
    sim = tmp_path / "sim"
    main(["simulate", "--out", str(sim)] + ARGS)
    out = tmp_path / "tune"
    assert main(["tune", "--out", str(out), "--aux", str(sim / "aux.mtx"), "--target",
                 str(sim / "target.mtx"), "--alphas", "0,0.5", "--betas", "0", "--ks", "2,3",
                 "--restarts", "1"]) == 0
    lines = (out / "grid.tsv").read_text().splitlines()
    assert len(lines) == 5


def test_wrong_label_length_exit_2(tmp_path, capsys):
    sim = tmp_path / "sim"
    main(["simulate", "--out", str(sim)] + ARGS)
    bad = tmp_path / "bad.txt"
    bad.write_text("0\n1\n")
    code = main(["transfer", "--out", str(tmp_path / "o"), "--target", str(sim / "target.mtx"),
                 "--aux", str(sim / "aux.mtx"), "--labels", str(bad), "--restarts", "1"])
    assert code == 2
    assert "LengthMismatch" in capsys.readouterr().err
    assert not (tmp_path / "o" / "manifest.json").exists()


def test_parse_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "m.mtx"
    bad.write_text("2 2 1\n3 1 1\n")
    assert main(["fit-aux", "--out", str(tmp_path / "o"), "--aux", str(bad)]) == 2
    assert ":2:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["fit-aux"], ["transfer", "--out", "x", "--nope"],
                                  ["simulate", "--out", "x", "--percentage", "abc"]])
def test_usage_errors_exit_1(argv):
    assert main(argv) == 1


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nalpha = 0.3\nbeta=0.2\nrestarts=1\nsimulate=true\n"
                   "n-aux=40\nn_target=30\nn-features=30\n")
    out = tmp_path / "o"
    assert main(["pipeline", "--config", str(cfg), "--out", str(out), "--alpha", "0.7"]) == 0
    params = json.loads((out / "manifest.json").read_text())["parameters"]
    assert params["alpha"] == 0.7 and params["beta"] == 0.2 and params["restarts"] == 1
    cfg.write_text("colour=blue\n")
    assert main(["pipeline", "--config", str(cfg), "--out", str(out)]) == 1


def test_select_features(tmp_path):
    sim = tmp_path / "sim"
    main(["simulate", "--out", str(sim)] + ARGS)
    out = tmp_path / "fa"
    assert main(["fit-aux", "--out", str(out), "--aux", str(sim / "aux.mtx"),
                 "--select-features", "12", "--restarts", "1"]) == 0
    assert len((out / "aux_col_assign.txt").read_text().split()) == 12
