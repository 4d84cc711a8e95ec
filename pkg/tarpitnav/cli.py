"""
Command line interface

Exit-Codes: 0 Erfolg, 1 Laufzeitfehler (JSON-Fehlerdatensatz auf stderr), 2 Aufruffehler (argparse).
"""

import argparse
import json
import sys
from typing import Optional, Sequence

from tarpitnav.config import (
    ACTION_BUDGET,
    DEFAULT_CANVAS,
    DEFAULT_GRID,
    DEFAULT_LEXICON,
    DEFAULT_STORE,
    TARPITNAV_VERSION,
    TRACE_MIN_ACTIONS,
    TRACE_MIN_MS,
    TRACE_TOP_K,
    TRIGGER_MS,
    TRIGGER_SWEEP_MS,
    classifier_cfg,
)
from tarpitnav.device.sim import load_app_file
from tarpitnav.engine import metrics
from tarpitnav.engine.report import load_report, save_report
from tarpitnav.engine.session import SessionConfig, run_session, sweep_trigger
from tarpitnav.errors import TarpitNavError
from tarpitnav.motifs.classifier import load_model, save_model, train
from tarpitnav.motifs.clustering import cluster_screens
from tarpitnav.motifs.dataset import load_dataset, write_dataset
from tarpitnav.motifs.synthetic import generate_dataset
from tarpitnav.navigation.detector import extract_tarpits, read_trace
from tarpitnav.screen.features import DefaultEmbedder, fit_text_vectorizer, screen_document
from tarpitnav.screen.silhouette import render, save_png, save_text
from tarpitnav.screen.snapshot import load_snapshot
from tarpitnav.utils import Logger, dump_yaml

logger = Logger().setup_logger(__file__)


def canvas_size(value: str) -> tuple[int, int]:
    try:
        width, height = (int(part) for part in value.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Canvas muss WxH sein, erhalten: {value}")
    if width <= 0 or height <= 0:
        raise argparse.ArgumentTypeError(f"Canvas muss positiv sein, erhalten: {value}")
    return width, height


### Commands ###
def cmd_silhouette(args: argparse.Namespace) -> None:
    img = render(load_snapshot(args.hierarchy, args.regions), args.canvas)
    if args.text:
        save_text(img, args.output)
    else:
        save_png(img, args.output)
    print(args.output)


def cmd_dataset_cluster(args: argparse.Namespace) -> None:
    dataset = load_dataset(args.manifest)
    vectorizer = fit_text_vectorizer([screen_document(screen.snapshot) for screen in dataset])
    embedder = DefaultEmbedder(vectorizer, args.canvas, args.grid)
    embeddings = [embedder.embed(screen.snapshot) for screen in dataset]
    clusters, chosen_k = cluster_screens(embeddings, (args.kmin, args.kmax), args.seed)
    print(
        dump_yaml(
            {
                "k": chosen_k,
                "clusters": [[dataset[index].source_id for index in members] for members in clusters],
            }
        ),
        end="",
    )


def cmd_dataset_synth(args: argparse.Namespace) -> None:
    print(write_dataset(generate_dataset(args.per_class, args.seed), args.output))


def cmd_train(args: argparse.Namespace) -> None:
    model, report = train(load_dataset(args.manifest), args.split, args.seed, args.canvas, args.grid)
    save_model(model, args.output)
    print(dump_yaml(report.to_dict()), end="")


def cmd_classify(args: argparse.Namespace) -> None:
    prediction = load_model(args.model).predict(load_snapshot(args.hierarchy, args.regions))
    for label, probability in prediction.ranked[: args.top]:
        print(f"{label.value}\t{probability:.4f}")


def cmd_extract_tarpits(args: argparse.Namespace) -> None:
    for screen_id in sorted(extract_tarpits(read_trace(args.trace), args.min_actions, args.min_ms, args.top_k)):
        print(screen_id)


def session_config(args: argparse.Namespace, **overrides) -> SessionConfig:
    values = dict(
        seed=args.seed,
        action_budget=args.budget,
        time_budget_ms=args.time_budget,
        trigger_ms=args.trigger,
        navigator_enabled=not args.no_navigator,
        navigator_after_ms=args.navigator_after,
        oracle_motifs=args.oracle_motifs,
        app_path=args.app,
        model_path=args.model,
        lexicon_path=args.lexicon,
        store_path=args.store,
    )
    values.update(overrides)
    return SessionConfig(**values)


def _check_predictor(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not args.no_navigator and not args.oracle_motifs and args.model is None:
        parser.error("--model oder --oracle-motifs ist nötig, solange der Navigator aktiv ist")


def cmd_run(args: argparse.Namespace) -> None:
    report = run_session(session_config(args))
    if args.output:
        save_report(report, args.output)
        print(args.output)
    else:
        print(report.to_yaml(), end="")


def cmd_sweep(args: argparse.Namespace) -> None:
    config = session_config(args)
    rows = sweep_trigger(config, load_app_file(args.app), args.triggers or TRIGGER_SWEEP_MS)
    print(dump_yaml({"app": args.app, "sweep": rows}), end="")


def cmd_report(args: argparse.Namespace) -> None:
    if args.kind == "auc":
        if args.values:
            series = metrics.CoverageSeries(tuple(args.values), args.dt)
        else:
            series = metrics.coverage_series([load_report(path) for path in args.reports])
        print(metrics.auc(series))
        return
    if args.kind == "compare":
        if not args.base or not args.new:
            raise ValueError("report compare braucht --base und --new")
        result = metrics.compare([load_report(p) for p in args.base], [load_report(p) for p in args.new])
        print(dump_yaml(result), end="")
        return

    reports = [load_report(path) for path in args.reports]
    if args.kind == "union":
        print(metrics.set_union_coverage(reports))
    elif args.kind == "halts":
        print(dump_yaml(metrics.halt_table(reports)), end="")
    elif args.kind == "heuristics":
        print(metrics.heuristic_success_table(reports).render())
    elif args.kind == "confusion":
        print(dump_yaml(metrics.heuristic_confusion(reports)), end="")


### Parser ###
def _add_session_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("app", help="App-Spec (YAML)")
    parser.add_argument("--model", help="Modell-Archiv aus `train`")
    parser.add_argument("--store", default=str(DEFAULT_STORE), help="Form-Value-Store (CSV)")
    parser.add_argument("--lexicon", default=str(DEFAULT_LEXICON), help="Synonym-Lexikon")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=ACTION_BUDGET, help="Explorer-Aktionen")
    parser.add_argument("--time-budget", type=int, default=None, help="logische Zeit in ms")
    parser.add_argument("--trigger", type=int, default=TRIGGER_MS, help="Stuck-Trigger in ms")
    parser.add_argument("--no-navigator", action="store_true", help="nur Explorer und Detector")
    parser.add_argument("--oracle-motifs", action="store_true", help="Motiv aus der App-Spec statt Klassifikator")
    parser.add_argument("--navigator-after", type=int, default=0, help="Navigator erst ab dieser Zeit (ms)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tarpitnav", description="Tarpit-Erkennung und -Navigation für UI-Exploration"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {TARPITNAV_VERSION}")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("silhouette", help="Silhouette eines Screens rendern")
    sub.add_argument("hierarchy")
    sub.add_argument("--regions")
    sub.add_argument("--canvas", type=canvas_size, default=DEFAULT_CANVAS)
    sub.add_argument("-o", "--output", required=True)
    sub.add_argument("--text", action="store_true", help="Text-Raster statt PNG")
    sub.set_defaults(func=cmd_silhouette)

    dataset = commands.add_parser("dataset", help="Datensatz-Werkzeuge")
    dataset = dataset.add_subparsers(dest="dataset_command", required=True)
    sub = dataset.add_parser("cluster", help="Screens per k-means und Elbow gruppieren")
    sub.add_argument("manifest")
    sub.add_argument("--kmin", type=int, default=2)
    sub.add_argument("--kmax", type=int, default=30)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--canvas", type=canvas_size, default=DEFAULT_CANVAS)
    sub.add_argument("--grid", type=int, default=DEFAULT_GRID)
    sub.set_defaults(func=cmd_dataset_cluster)

    sub = dataset.add_parser("synth", help="Synthetischen Motiv-Datensatz schreiben")
    sub.add_argument("-o", "--output", required=True, help="Zielverzeichnis")
    sub.add_argument("--per-class", type=int, default=40)
    sub.add_argument("--seed", type=int, default=0)
    sub.set_defaults(func=cmd_dataset_synth)

    sub = commands.add_parser("train", help="Motiv-Klassifikator trainieren")
    sub.add_argument("manifest")
    sub.add_argument("--split", type=float, default=classifier_cfg.split)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--canvas", type=canvas_size, default=DEFAULT_CANVAS)
    sub.add_argument("--grid", type=int, default=DEFAULT_GRID)
    sub.add_argument("-o", "--output", required=True)
    sub.set_defaults(func=cmd_train)

    sub = commands.add_parser("classify", help="Motive eines Screens ranken")
    sub.add_argument("hierarchy")
    sub.add_argument("--regions")
    sub.add_argument("--model", required=True)
    sub.add_argument("--top", type=int, default=21)
    sub.set_defaults(func=cmd_classify)

    sub = commands.add_parser("extract-tarpits", help="Tarpit-Screens aus einem Trace")
    sub.add_argument("trace")
    sub.add_argument("--min-actions", type=int, default=TRACE_MIN_ACTIONS)
    sub.add_argument("--min-ms", type=int, default=TRACE_MIN_MS)
    sub.add_argument("--top-k", type=int, default=TRACE_TOP_K)
    sub.set_defaults(func=cmd_extract_tarpits)

    sub = commands.add_parser("run", help="Explorations-Session auf einer simulierten App")
    _add_session_options(sub)
    sub.add_argument("-o", "--output", help="Report-Datei (YAML)")
    sub.set_defaults(func=cmd_run, needs_predictor=True)

    sub = commands.add_parser("sweep", help="Session je Trigger-Wert wiederholen")
    _add_session_options(sub)
    sub.add_argument("--triggers", type=int, nargs="+", help="Trigger-Werte in ms")
    sub.set_defaults(func=cmd_sweep, needs_predictor=True)

    sub = commands.add_parser("report", help="Reports auswerten")
    sub.add_argument("kind", choices=("auc", "union", "compare", "halts", "heuristics", "confusion"))
    sub.add_argument("reports", nargs="*")
    sub.add_argument("--values", type=float, nargs="+", help="Coverage-Reihe R_0..R_n statt Reports")
    sub.add_argument("--dt", type=float, default=1.0)
    sub.add_argument("--base", nargs="+")
    sub.add_argument("--new", nargs="+")
    sub.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "needs_predictor", False):
        _check_predictor(args, parser)
    if args.command == "report" and args.kind not in ("auc", "compare") and not args.reports:
        parser.error(f"report {args.kind} braucht mindestens einen Report")
    try:
        args.func(args)
    except (TarpitNavError, ValueError, OSError) as e:
        logger.info(f"[CLI] {args.command}: {e}")
        print(json.dumps({"error": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
