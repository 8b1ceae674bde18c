"""Command-line interface.

Exit codes: 0 on success, 2 for bad input or usage, 3 when evaluation is
asked for on a manifest with unlabelled utterances.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import Config, LabelsRequiredError, ValidationError
from .ingest import (
    GRAPH_FORMATS,
    ManifestError,
    UsageError,
    atomic_write_text,
    build_report,
    dumps_graph,
    dumps_report,
    load_case,
    save_case,
)
from .metrics import accuracy_report
from .rerank import process_case
from .synth import SynthSpec, generate_case, topology_drift

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_LABELS = 3


def _add_config_flags(p):
    d = Config()
    g = p.add_argument_group("re-ranking")
    g.add_argument("--lambda", dest="lam", type=float, default=d.lam,
                   help="pair-interaction weight (default %(default)s; 0.2 is a lighter setting)")
    g.add_argument("--top-k", type=int, default=d.top_k,
                   help="max candidates kept per utterance (default %(default)s)")
    g.add_argument("--rel-threshold", type=float, default=d.rel_threshold,
                   help="keep candidates scoring at least this fraction of the best (default %(default)s)")
    g.add_argument("--allow-repeat-speakers", action=argparse.BooleanOptionalAction,
                   default=d.allow_repeat_speakers,
                   help="let one speaker fill several slots of a conversation")
    g.add_argument("--max-combinations", type=int, default=d.max_combinations,
                   help="combination budget per conversation (default %(default)s)")


def _config(args) -> Config:
    return Config(lam=args.lam, top_k=args.top_k, rel_threshold=args.rel_threshold,
                  allow_repeat_speakers=args.allow_repeat_speakers,
                  max_combinations=args.max_combinations)


def _default_graph_path(report: Path, fmt: str) -> Path:
    ext = ".dot" if fmt == "dot" else ".graph.json"
    return report.with_name(report.stem + ext)


def _summary_line(d) -> str:
    flag = "*" if d.changed else " "
    return (f"{flag} {d.conversation_id}  baseline={','.join(d.baseline.assignment)}"
            f"  reranked={','.join(d.reranked.assignment)}  score={d.reranked.score:.6f}"
            f"  combos={d.n_combinations_scored}")


def cmd_rerank(args) -> int:
    config = _config(args)
    case = load_case(args.manifest)
    decisions, graph = process_case(case, config)
    report = dumps_report(build_report(decisions, case, config))
    graph_path = args.graph_out or _default_graph_path(Path(args.output), args.format)
    graph_text = dumps_graph(graph, args.format)
    if args.verbose:
        for d in decisions:
            print(_summary_line(d))
    atomic_write_text(args.output, report)
    atomic_write_text(graph_path, graph_text)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _config(args)
    case = load_case(args.manifest)
    if not case.is_labeled:
        raise LabelsRequiredError(f"{args.manifest}: evaluation needs every utterance labelled")
    decisions, _ = process_case(case, config)
    base = accuracy_report(decisions, case, "baseline")
    rer = accuracy_report(decisions, case, "reranked")
    if args.verbose:
        for d in decisions:
            print(_summary_line(d))
    print("# speaker_acc_baseline speaker_acc_reranked conversation_acc_baseline conversation_acc_reranked")
    print(" ".join(f"{100 * v:.1f}" for v in (base.speaker_accuracy, rer.speaker_accuracy,
                                               base.conversation_accuracy, rer.conversation_accuracy)))
    if args.output:
        atomic_write_text(args.output, dumps_report(build_report(decisions, case, config)))
    return EXIT_OK


def _regroup(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated group labels, got {text!r}")


def cmd_simulate(args) -> int:
    spec = SynthSpec(
        n_speakers=args.n_speakers, n_groups=args.n_groups,
        within_group_bias=args.within_group_bias, n_conversations=args.n_conversations,
        min_slots=args.min_slots, max_slots=args.max_slots,
        min_participants=args.min_participants, max_participants=args.max_participants,
        score_separability=args.separability, noise_sd=args.noise_sd,
        activity_skew=args.activity_skew, seed=args.seed,
    )
    if args.drift_point is not None or args.regroup is not None:
        if args.drift_point is None or args.regroup is None:
            raise UsageError("--drift-point and --regroup must be given together")
        spec = topology_drift(spec, args.drift_point, args.regroup)
    save_case(generate_case(spec), args.output)
    return EXIT_OK


def cmd_export_graph(args) -> int:
    case = load_case(args.manifest)
    _, graph = process_case(case, _config(args))
    atomic_write_text(args.output, dumps_graph(graph, args.format))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spkrerank",
        description="Re-rank speaker identification decisions with an interaction graph.")
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rerank", help="re-rank a case and write the report and final graph")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", required=True, help="report path (JSON)")
    p.add_argument("--graph-out", help="graph export path (default: next to the report)")
    p.add_argument("--format", choices=GRAPH_FORMATS, default="json", help="graph export format")
    p.add_argument("-v", "--verbose", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_rerank)

    p = sub.add_parser("evaluate", help="print baseline and re-ranked accuracies in percent")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", help="optionally also write the full report")
    p.add_argument("-v", "--verbose", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    d = SynthSpec()
    p = sub.add_parser("simulate", help="write a synthetic labelled case manifest")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, default=d.seed)
    p.add_argument("--n-speakers", type=int, default=d.n_speakers)
    p.add_argument("--n-groups", type=int, default=d.n_groups)
    p.add_argument("--within-group-bias", type=float, default=d.within_group_bias)
    p.add_argument("--n-conversations", type=int, default=d.n_conversations)
    p.add_argument("--min-slots", type=int, default=d.min_slots)
    p.add_argument("--max-slots", type=int, default=d.max_slots)
    p.add_argument("--min-participants", type=int, default=d.min_participants)
    p.add_argument("--max-participants", type=int, default=d.max_participants)
    p.add_argument("--separability", type=float, default=d.score_separability)
    p.add_argument("--noise-sd", type=float, default=d.noise_sd)
    p.add_argument("--activity-skew", type=float, default=d.activity_skew)
    p.add_argument("--drift-point", type=int, help="conversation index where groups are relabelled")
    p.add_argument("--regroup", type=_regroup, help="new label per group, e.g. 0,0,2,3 merges groups 0 and 1")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export-graph", help="re-rank a case and export only the final graph")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=GRAPH_FORMATS, default="dot")
    _add_config_flags(p)
    p.set_defaults(func=cmd_export_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LabelsRequiredError as e:
        print(f"spkrerank: error: {e}", file=sys.stderr)
        return EXIT_LABELS
    except ValidationError as e:
        print(f"spkrerank: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ManifestError, UsageError, ValueError, OSError) as e:
        print(f"spkrerank: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
