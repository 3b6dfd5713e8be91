"""CLI contract: subcommands, exit codes, reproducible artifacts."""

import json

import pytest

from brainrf.cli import main


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("bundles") / "data"
    code = run(["synth", "--out", d, "--sessions", "12", "--users", "4",
                "--queries", "8", "--seed", "3", "--eeg", "scores"])
    assert code == 0
    return d


def test_synth_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["synth", "--out", out, "--sessions", "8", "--users", "2",
                    "--queries", "6", "--seed", "7", "--eeg", "scores"]) == 0
    for name in ("queries.jsonl", "documents.jsonl", "sessions.jsonl", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_run_irf_writes_report(data_dir, tmp_path):
    out = tmp_path / "irf"
    code = run(["run-irf", "--data", data_dir, "--out", out,
                "--weights", "0.6,0.2,0.2", "--k", "10", "--c", "0.1", "--seed", "7"])
    assert code == 0
    report = (out / "irf_report.tsv").read_text().splitlines()
    header = report[0].split("\t")
    for col in ("ndcg@1", "ndcg@3", "ndcg@5", "ndcg@10", "map"):
        assert col in header
    summary = json.loads((out / "irf_summary.json").read_text())
    assert summary["seed"] == 7
    assert summary["config"]["weights"] == [0.6, 0.2, 0.2]
    assert "fingerprint" in summary


def test_reports_reproducible(data_dir, tmp_path):
    outs = []
    for name in ("r1", "r2"):
        out = tmp_path / name
        assert run(["run-irf", "--data", data_dir, "--out", out, "--seed", "11"]) == 0
        assert run(["run-rrf", "--data", data_dir, "--out", out, "--seed", "11"]) == 0
        outs.append(out)
    for f in ("irf_report.tsv", "irf_summary.json", "rrf_report.tsv", "rrf_summary.json"):
        assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes(), f


def test_aggregates_match_rows(data_dir, tmp_path):
    out = tmp_path / "agg"
    assert run(["run-rrf", "--data", data_dir, "--out", out, "--seed", "2"]) == 0
    rows = (out / "rrf_report.tsv").read_text().splitlines()
    header = rows[0].split("\t")
    idx = header.index("ndcg@10")
    values = [float(r.split("\t")[idx]) for r in rows[1:]]
    summary = json.loads((out / "rrf_summary.json").read_text())
    assert abs(sum(values) / len(values) - summary["aggregates"]["ndcg@10"]) < 1e-12


def test_rerun_from_embedded_config(data_dir, tmp_path):
    out1 = tmp_path / "orig"
    assert run(["run-irf", "--data", data_dir, "--out", out1,
                "--weights", "0.8,0.2,0.4", "--k", "5", "--c", "0.2", "--seed", "9"]) == 0
    out2 = tmp_path / "rerun"
    assert run(["run-irf", "--data", data_dir, "--out", out2,
                "--config", out1 / "irf_summary.json", "--seed", "9"]) == 0
    assert (out1 / "irf_report.tsv").read_bytes() == (out2 / "irf_report.tsv").read_bytes()


def test_unknown_flag_exits_one(data_dir, tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        run(["run-irf", "--data", data_dir, "--out", tmp_path / "x", "--frobnicate"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_missing_data_dir_exits_one(tmp_path, monkeypatch):
    monkeypatch.delenv("BRAINRF_DATA", raising=False)
    assert run(["run-irf", "--out", tmp_path / "x"]) == 1


def test_data_env_var_used(data_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("BRAINRF_DATA", str(data_dir))
    assert run(["run-rrf", "--out", tmp_path / "env"]) == 0


def test_missing_external_labels_exit_one(tmp_path):
    # strip the external labels from a bundle; run-irf must fail actionably
    src = tmp_path / "src"
    assert run(["synth", "--out", src, "--sessions", "4", "--users", "2",
                "--queries", "4", "--seed", "5", "--eeg", "scores"]) == 0
    docs_path = src / "documents.jsonl"
    lines = []
    for line in docs_path.read_text().splitlines():
        obj = json.loads(line)
        obj.pop("snippet_relevant_external", None)
        lines.append(json.dumps(obj, sort_keys=True))
    docs_path.write_text("\n".join(lines) + "\n")
    assert run(["run-irf", "--data", src, "--out", tmp_path / "out"]) == 1


def test_run_adaptive(data_dir, tmp_path):
    out = tmp_path / "adaptive"
    code = run(["run-adaptive", "--data", data_dir, "--out", out, "--seed", "1",
                "--n-synth", "3", "--grid", "0.0,0.5,1.0", "--q-m", "2"])
    assert code == 0
    summary = json.loads((out / "adaptive_summary.json").read_text())
    assert summary["config"]["weights"] == "adaptive"
    assert summary["config"]["adaptive"]["grid"] == [0.0, 0.5, 1.0]
    # rerun from the embedded config reproduces the report exactly
    out2 = tmp_path / "adaptive2"
    assert run(["run-adaptive", "--data", data_dir, "--out", out2,
                "--config", out / "adaptive_summary.json", "--seed", "1"]) == 0
    assert (out / "adaptive_report.tsv").read_bytes() == (out2 / "adaptive_report.tsv").read_bytes()


def test_decode_eval_features(tmp_path):
    src = tmp_path / "feat"
    assert run(["synth", "--out", src, "--sessions", "6", "--users", "2",
                "--queries", "6", "--seed", "2", "--eeg", "features"]) == 0
    out = tmp_path / "decode"
    assert run(["decode-eval", "--data", src, "--out", out, "--seed", "2"]) == 0
    report = (out / "decode_report.tsv").read_text()
    assert report.startswith("post_ms\trate_hz")


def test_decode_eval_sweep_needs_raw(data_dir, tmp_path):
    code = run(["decode-eval", "--data", data_dir, "--out", tmp_path / "x",
                "--post-ms", "500,1000,2000"])
    assert code == 1


def test_decode_eval_sweep_on_raw(tmp_path):
    src = tmp_path / "raw"
    assert run(["synth", "--out", src, "--sessions", "2", "--users", "2",
                "--queries", "4", "--docs-per-query", "8", "--seed", "4",
                "--eeg", "raw", "--examined-mean", "4"]) == 0
    out = tmp_path / "sweep"
    code = run(["decode-eval", "--data", src, "--out", out,
                "--post-ms", "1000,2000", "--rate", "250,500", "--train-frac", "0.5"])
    assert code == 0
    lines = (out / "decode_report.tsv").read_text().splitlines()
    assert len(lines) == 1 + 4  # header + 2x2 sweep
