"""Case manifests, decision reports and graph exports.

All writers emit a fixed key order and sorted collections so identical
inputs give byte-identical files. Files are written to a temporary sibling
and renamed into place, so a failed write never leaves a partial file.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
import warnings
from pathlib import Path

from .core import CandidateScore, Case, Config, Conversation, Utterance, check_case
from .graph import InteractionGraph, _GraphStats
from .metrics import accuracy_report, diff_report

GRAPH_FORMATS = ("dot", "json")


class ManifestError(ValueError):
    """Malformed manifest; the message carries the location."""


class UnknownFieldWarning(UserWarning):
    pass


class UsageError(ValueError):
    pass


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _loads(text: str, source: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        offset = len(text[:e.pos].encode("utf-8"))
        raise ManifestError(f"{source}: {e.msg} at line {e.lineno} column {e.colno} "
                            f"(byte offset {offset})") from None
    except ValueError as e:
        raise ManifestError(f"{source}: {e}") from None


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as e:
        raise OSError(e.errno, f"cannot write {path}: {e.strerror}", str(path)) from e


# -- manifests ---------------------------------------------------------------

_CASE_KEYS = {"case_id", "enrolled", "conversations"}
_CONV_KEYS = {"conversation_id", "index", "utterances"}
_UTT_KEYS = {"utterance_id", "truth", "scores"}


def _expect(cond, where, msg):
    if not cond:
        raise ManifestError(f"{where}: {msg}")


def _warn_unknown(obj: dict, known: set, where: str):
    for key in obj:
        if key not in known:
            warnings.warn(f"{where}: ignoring unknown field {key!r}", UnknownFieldWarning, stacklevel=4)


def _is_number(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def case_from_dict(doc, source: str = "<manifest>") -> Case:
    """Build a :class:`Case` from a decoded manifest (no invariant checks)."""
    _expect(isinstance(doc, dict), source, "top level must be an object")
    _warn_unknown(doc, _CASE_KEYS, source)
    for key in ("case_id", "enrolled", "conversations"):
        _expect(key in doc, source, f"missing required field {key!r}")
    _expect(isinstance(doc["case_id"], str), f"{source}: case_id", "must be a string")
    enrolled = doc["enrolled"]
    _expect(isinstance(enrolled, list) and all(isinstance(s, str) for s in enrolled),
            f"{source}: enrolled", "must be a list of strings")
    convs = doc["conversations"]
    _expect(isinstance(convs, list), f"{source}: conversations", "must be a list")

    out = []
    for ci, cdoc in enumerate(convs):
        where = f"{source}: conversations[{ci}]"
        _expect(isinstance(cdoc, dict), where, "must be an object")
        _warn_unknown(cdoc, _CONV_KEYS, where)
        _expect(isinstance(cdoc.get("conversation_id"), str), where, "conversation_id must be a string")
        index = cdoc.get("index", ci)
        _expect(isinstance(index, int) and not isinstance(index, bool), where, "index must be an integer")
        utts = cdoc.get("utterances")
        _expect(isinstance(utts, list), where, "utterances must be a list")
        utterances = []
        for ui, udoc in enumerate(utts):
            uwhere = f"{where}.utterances[{ui}]"
            _expect(isinstance(udoc, dict), uwhere, "must be an object")
            _warn_unknown(udoc, _UTT_KEYS, uwhere)
            _expect(isinstance(udoc.get("utterance_id"), str), uwhere, "utterance_id must be a string")
            truth = udoc.get("truth")
            _expect(truth is None or isinstance(truth, str), uwhere, "truth must be a string or null")
            scores = udoc.get("scores")
            _expect(isinstance(scores, dict), uwhere, "scores must be an object of speaker -> number")
            cands = []
            for spk, raw in scores.items():
                _expect(_is_number(raw) and math.isfinite(raw), f"{uwhere}.scores[{spk!r}]",
                        f"must be a finite number, got {raw!r}")
                cands.append(CandidateScore(spk, float(raw)))
            utterances.append(Utterance(udoc["utterance_id"], tuple(cands), truth))
        out.append(Conversation(cdoc["conversation_id"], index, tuple(utterances)))
    return Case(doc["case_id"], tuple(enrolled), tuple(out))


def case_to_dict(case: Case) -> dict:
    convs = []
    for conv in case.conversations:
        utts = []
        for u in conv.utterances:
            d = {"utterance_id": u.utterance_id}
            if u.truth is not None:
                d["truth"] = u.truth
            d["scores"] = {c.speaker: float(c.raw_score) for c in u.candidates}
            utts.append(d)
        convs.append({"conversation_id": conv.conversation_id, "index": conv.index, "utterances": utts})
    return {"case_id": case.case_id, "enrolled": list(case.enrolled), "conversations": convs}


def parse_case(text: str, source: str = "<manifest>", validate: bool = True) -> Case:
    case = case_from_dict(_loads(text, source), source)
    return check_case(case) if validate else case


def dumps_case(case: Case) -> str:
    return _dumps(case_to_dict(case))


def load_case(path, validate: bool = True) -> Case:
    """Read and validate a case manifest."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ManifestError(f"{path}: cannot read: {e.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ManifestError(f"{path}: not UTF-8 (byte offset {e.start})") from None
    return parse_case(text, str(path), validate=validate)


def save_case(case: Case, path) -> None:
    atomic_write_text(path, dumps_case(case))


# -- reports -----------------------------------------------------------------

def _combo(c):
    return {"assignment": list(c.assignment), "score": c.score}


def build_report(decisions, case: Case, config: Config) -> dict:
    """Side-by-side baseline and re-ranked results for one case.

    Accuracy blocks are ``None`` when the case is not fully labelled.
    """
    labeled = case.is_labeled
    acc = {}
    if labeled:
        for which in ("baseline", "reranked"):
            acc[which] = accuracy_report(decisions, case, which)
    conversations = []
    for i, (d, conv) in enumerate(zip(decisions, case.conversations)):
        entry = {
            "conversation_id": d.conversation_id,
            "truth": [u.truth for u in conv.utterances] if labeled else None,
            "baseline": _combo(d.baseline),
            "reranked": _combo(d.reranked),
            "n_combinations_scored": d.n_combinations_scored,
            "pruned": d.pruned,
            "effective_top_k": d.effective_top_k,
            "repeat_fallback": d.repeat_fallback,
        }
        if labeled:
            for which in ("baseline", "reranked"):
                o = acc[which].per_conversation[i]
                entry[which]["correct"] = o.correct
                entry[which]["n_slots_correct"] = o.n_slots_correct
                entry[which]["set_correct"] = o.set_correct
        conversations.append(entry)

    summary = None
    if labeled:
        summary = {
            "n_conversations": acc["reranked"].n_conversations,
            "n_utterances": acc["reranked"].n_utterances,
            "baseline": {"speaker_accuracy": acc["baseline"].speaker_accuracy,
                         "conversation_accuracy": acc["baseline"].conversation_accuracy},
            "reranked": {"speaker_accuracy": acc["reranked"].speaker_accuracy,
                         "conversation_accuracy": acc["reranked"].conversation_accuracy},
        }
    diffs = [{"conversation_id": e.conversation_id, "slot": e.slot, "truth": e.truth,
              "baseline_pred": e.baseline_pred, "reranked_pred": e.reranked_pred}
             for e in diff_report(decisions, case)]
    return {
        "case_id": case.case_id,
        "config": config.to_dict(),
        "summary": summary,
        "conversations": conversations,
        "diffs": diffs,
    }


def dumps_report(report: dict) -> str:
    return _dumps(report)


def write_report(report: dict, path) -> None:
    atomic_write_text(path, dumps_report(report))


def read_report(path) -> dict:
    return _loads(Path(path).read_text(encoding="utf-8"), str(path))


# -- graphs ------------------------------------------------------------------

def _dot_id(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(graph: _GraphStats, name: str = "interactions") -> str:
    """Graphviz text; edge ``weight`` and ``penwidth`` both carry the interaction count."""
    lines = [f"graph {_dot_id(name)} {{"]
    for node in sorted(graph.nodes):
        lines.append(f"  {_dot_id(node)};")
    for i, j, w in graph.sorted_edges():
        lines.append(f"  {_dot_id(i)} -- {_dot_id(j)} [weight={w}, penwidth={w}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_dict(graph: _GraphStats) -> dict:
    return {
        "directed": False,
        "nodes": sorted(graph.nodes),
        "edges": [{"source": i, "target": j, "weight": w} for i, j, w in graph.sorted_edges()],
        "total_weight": graph.total_weight,
    }


def graph_from_dict(doc: dict, source: str = "<graph>") -> InteractionGraph:
    _expect(isinstance(doc, dict), source, "top level must be an object")
    _expect(isinstance(doc.get("nodes"), list), source, "nodes must be a list")
    _expect(isinstance(doc.get("edges"), list), source, "edges must be a list")
    edges = []
    for k, e in enumerate(doc["edges"]):
        _expect(isinstance(e, dict) and {"source", "target", "weight"} <= e.keys(),
                f"{source}: edges[{k}]", "needs source, target and weight")
        edges.append((e["source"], e["target"], e["weight"]))
    g = InteractionGraph.from_edges(edges, nodes=doc["nodes"])
    if "total_weight" in doc:
        _expect(doc["total_weight"] == g.total_weight, source,
                f"total_weight {doc['total_weight']} != edge sum {g.total_weight}")
    return g


def dumps_graph(graph: _GraphStats, fmt: str) -> str:
    if fmt == "dot":
        return graph_to_dot(graph)
    if fmt == "json":
        return _dumps(graph_to_dict(graph))
    raise UsageError(f"unknown graph format {fmt!r}; choose from {', '.join(GRAPH_FORMATS)}")


def export_graph(graph: _GraphStats, fmt: str, path) -> None:
    atomic_write_text(path, dumps_graph(graph, fmt))


def load_graph(path) -> InteractionGraph:
    """Re-import a graph written with the ``json`` format."""
    return graph_from_dict(_loads(Path(path).read_text(encoding="utf-8"), str(path)), str(path))
