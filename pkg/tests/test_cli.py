import json
import subprocess
import sys

import pytest

from spkrerank.cli import build_parser, main
from spkrerank.core import Config, validate_case
from spkrerank.ingest import load_case, load_graph


@pytest.fixture
def manifest(tmp_path):
    p = tmp_path / "case.json"
    assert main(["simulate", "-o", str(p), "--seed", "7", "--n-conversations", "30"]) == 0
    return p


def test_simulate_is_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["simulate", "-o", str(a), "--seed", "7"]) == 0
    assert main(["simulate", "-o", str(b), "--seed", "7"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert validate_case(load_case(a)) == []


def test_simulate_rejects_bad_spec(tmp_path, capsys):
    out = tmp_path / "x.json"
    assert main(["simulate", "-o", str(out), "--n-speakers", "1"]) == 2
    assert "n_speakers" in capsys.readouterr().err
    assert not out.exists()
    assert main(["simulate", "-o", str(out), "--drift-point", "3"]) == 2


def test_simulate_with_drift(tmp_path):
    out = tmp_path / "d.json"
    assert main(["simulate", "-o", str(out), "--drift-point", "10", "--regroup", "0,0,2,2"]) == 0
    assert load_case(out).is_labeled


def test_rerank_writes_report_and_graph(manifest, tmp_path, capsys):
    report = tmp_path / "out" / "report.json"
    report.parent.mkdir()
    assert main(["rerank", str(manifest), "-o", str(report), "--lambda", "0.2", "-v"]) == 0
    doc = json.loads(report.read_text())
    assert doc["config"]["lambda"] == 0.2
    assert len(doc["conversations"]) == 30
    graph = load_graph(tmp_path / "out" / "report.graph.json")
    assert graph.total_weight > 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 30


def test_rerank_dot_output(manifest, tmp_path):
    report = tmp_path / "r.json"
    assert main(["rerank", str(manifest), "-o", str(report), "--format", "dot",
                 "--graph-out", str(tmp_path / "net.dot")]) == 0
    assert (tmp_path / "net.dot").read_text().startswith("graph")


def test_rerank_invalid_manifest_writes_nothing(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"case_id": "x", "enrolled": ["A"], "conversations": [{"conversation_id": "c", '
                   '"utterances": [{"utterance_id": "u", "scores": {"Z": 1.0}}]}]}')
    report = tmp_path / "r.json"
    assert main(["rerank", str(bad), "-o", str(report)]) == 2
    assert "unknown_speaker" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == [bad]
    bad.write_text('{"case_id": ')
    assert main(["rerank", str(bad), "-o", str(report)]) == 2
    assert list(tmp_path.iterdir()) == [bad]


def test_evaluate_prints_percentages(manifest, capsys):
    assert main(["evaluate", str(manifest)]) == 0
    values = capsys.readouterr().out.strip().splitlines()[-1].split()
    assert len(values) == 4
    assert all(0 <= float(v) <= 100 and len(v.split(".")[1]) == 1 for v in values)


def test_evaluate_perfect_case(tmp_path, capsys):
    p = tmp_path / "clean.json"
    assert main(["simulate", "-o", str(p), "--noise-sd", "0", "--n-conversations", "20"]) == 0
    capsys.readouterr()
    assert main(["evaluate", str(p)]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == "100.0 100.0 100.0 100.0"


def test_evaluate_needs_labels(tmp_path, capsys):
    p = tmp_path / "unlabelled.json"
    p.write_text('{"case_id": "x", "enrolled": ["A", "B"], "conversations": [{"conversation_id": "c", '
                 '"utterances": [{"utterance_id": "u", "scores": {"A": 1.0, "B": 0.0}}]}]}')
    assert main(["evaluate", str(p)]) == 3
    assert "label" in capsys.readouterr().err
    assert main(["rerank", str(p), "-o", str(tmp_path / "r.json")]) == 0


def test_export_graph(manifest, tmp_path):
    out = tmp_path / "g.json"
    assert main(["export-graph", str(manifest), "-o", str(out), "--format", "json"]) == 0
    assert load_graph(out).total_weight > 0


def test_usage_errors_exit_2(manifest, tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["export-graph", str(manifest), "-o", str(tmp_path / "g"), "--format", "gexf"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 2
    assert main(["evaluate", str(manifest), "--top-k", "0"]) == 2


def test_flag_defaults_match_config():
    args = build_parser().parse_args(["rerank", "m.json", "-o", "r.json"])
    d = Config()
    assert (args.lam, args.top_k, args.rel_threshold, args.allow_repeat_speakers, args.max_combinations) == \
        (d.lam, d.top_k, d.rel_threshold, d.allow_repeat_speakers, d.max_combinations)
    args = build_parser().parse_args(["rerank", "m.json", "-o", "r.json", "--no-allow-repeat-speakers"])
    assert args.allow_repeat_speakers is False


def test_module_entry_point(manifest):
    r = subprocess.run([sys.executable, "-m", "spkrerank", "evaluate", str(manifest)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and len(r.stdout.strip().splitlines()[-1].split()) == 4
