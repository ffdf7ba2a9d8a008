"""Command-line interface: ``score-graphs {stats,graph,ecg,compare,communities}``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import export
from .communities import entropy_min_partition, greedy_modularity, modularity
from .errors import ScoreGraphError
from .graphs import GRAPH_BUILDERS, KIND_ORDER, average_clustering, build_graph, cycle_basis_size, density
from .ingest import Score, accumulate_weights, load_score, texture_densities
from .metrics import centrality_entropy, shannon_entropy
from .timeseries import ALL_METRICS, WindowSpec, compute_series, dtw, parse_metric_ids, window_metrics

log = logging.getLogger("score_graphs")

CONFIG_ENV = "SCORE_GRAPHS_CONFIG"
DEFAULTS = {
    "graph": "pcir",
    "window_length": 4,
    "window_step": 2,
    "metrics": None,
    "format": None,
    "out": ".",
    "seed": 42,
    "resolution": 1.0,
    "method": "greedy",
    "metric": None,
}
INT_KEYS = {"window_length", "window_step", "seed"}
FLOAT_KEYS = {"resolution"}


class CommandError(Exception):
    pass


def read_config(path: str | Path) -> dict:
    """Plain ``key = value`` lines; ``#`` starts a comment. Keys use flag names."""
    config = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CommandError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise CommandError(f"{path}:{lineno}: unknown setting {key!r}")
        config[key] = value
    return config


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    config_path = args.config or os.environ.get(CONFIG_ENV)
    config = read_config(config_path) if config_path else {}
    for key, default in DEFAULTS.items():
        value = getattr(args, key, None)
        if value is None:
            value = config.get(key, default)
        if value is not None and key in INT_KEYS:
            value = int(value)
        if value is not None and key in FLOAT_KEYS:
            value = float(value)
        setattr(args, key, value)
    return args


def _load(path: str) -> Score:
    p = Path(path)
    if not p.is_file():
        raise CommandError(f"input file not found: {path}")
    return load_score(p)


def _formats(args, default: str) -> list[str]:
    text = args.format or default
    formats = [f.strip().lower() for f in text.split(",") if f.strip()]
    unknown = set(formats) - {"dot", "graphml", "json", "svg", "csv"}
    if unknown:
        raise CommandError(f"unknown format(s): {', '.join(sorted(unknown))}")
    return formats


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def _try(fn, *args):
    try:
        return fn(*args)
    except ScoreGraphError:
        return None


def score_report(score: Score, resolution: float = 1.0) -> dict[str, object]:
    """Summary numbers of a whole score, in display order."""
    timeline = score.timeline()
    stats = accumulate_weights(timeline)
    voices, attacks = texture_densities(score.notes, timeline.total_duration_qL)
    report: dict[str, object] = {
        "events": len(timeline.events),
        "total duration (qL)": timeline.total_duration_qL,
        "events per quarter": len(timeline.events) / timeline.total_duration_qL,
        "voices per quarter": voices,
        "attacks per quarter": attacks,
        "pc entropy by duration": shannon_entropy(d for d, _ in stats.pc_stats.values()),
        "pc entropy by occurrence": shannon_entropy(n for _, n in stats.pc_stats.values()),
        "chord entropy by duration": shannon_entropy(d for d, _ in stats.chord_stats.values()),
        "chord entropy by occurrence": shannon_entropy(n for _, n in stats.chord_stats.values()),
        "rhythm entropy by occurrence": shannon_entropy(stats.rhythm_stats.values()),
    }
    graphs = {kind: _try(build_graph, kind, timeline, stats) for kind in GRAPH_BUILDERS}
    report["pcr degree-centrality entropy"] = _try(centrality_entropy, graphs["pcr"], "degree")
    for kind, g in graphs.items():
        report[f"{kind} density"] = None if g is None else _try(density, g)
        report[f"{kind} average clustering"] = None if g is None else average_clustering(g)
    pcr = graphs["pcr"]
    report["pcr communities"] = len(greedy_modularity(pcr, resolution))
    chords = graphs["chords"]
    report["chords cycle basis size"] = None if chords is None else cycle_basis_size(chords)
    for metric, value in window_metrics(timeline, ALL_METRICS, resolution).items():
        report[f"window {metric}"] = value
    return report


def _show(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, int):
        return str(value)
    return export.fmt(value)


def cmd_stats(args) -> int:
    score = _load(args.input)
    for key, value in score_report(score, args.resolution).items():
        print(f"{key}: {_show(value)}")
    return 0


def _graph_outputs(g, stem: Path, formats, seed: int, title: str) -> None:
    writers = {
        "json": lambda: export.graph_to_json(g),
        "dot": lambda: export.graph_to_dot(g),
        "graphml": lambda: export.graph_to_graphml(g),
        "svg": lambda: export.render_graph_svg(g, seed=seed, title=title),
    }
    for fmt in formats:
        if fmt not in writers:
            raise CommandError(f"format {fmt!r} does not apply to graphs")
        _write(stem.with_suffix("." + fmt), writers[fmt]())


def cmd_graph(args) -> int:
    score = _load(args.input)
    formats = _formats(args, "json,svg")
    g = build_graph(args.graph, score.timeline())
    stem = Path(args.out) / f"{Path(args.input).stem}_{args.graph}"
    _graph_outputs(g, stem, formats, args.seed, f"{args.graph} graph of {Path(args.input).name}")
    print(f"nodes: {g.order}\nedges: {g.size}")
    return 0


def cmd_ecg(args) -> int:
    score = _load(args.input)
    formats = _formats(args, "csv,svg")
    spec = WindowSpec(args.window_length, args.window_step)
    series = compute_series(score.timeline(), spec, parse_metric_ids(args.metrics), args.resolution)
    for line in series.diagnostics:
        print(f"gap: {line}", file=sys.stderr)
    stem = Path(args.out) / f"{Path(args.input).stem}_ecg_L{spec.length_measures}_S{spec.step_measures}"
    for fmt in formats:
        if fmt == "csv":
            _write(stem.with_suffix(".csv"), export.series_to_csv(series))
        elif fmt == "svg":
            _write(stem.with_suffix(".svg"), export.render_ecg_svg(series))
        else:
            raise CommandError(f"format {fmt!r} does not apply to metric series")
    print(f"windows: {len(series)}")
    return 0


def _column(path: str, metric: str) -> list[float]:
    p = Path(path)
    if not p.is_file():
        raise CommandError(f"CSV file not found: {path}")
    columns = export.read_csv_columns(p.read_text(encoding="utf-8"))
    if metric not in columns:
        raise CommandError(f"{path} has no column {metric!r}")
    return [v for v in columns[metric] if v is not None]


def cmd_compare(args) -> int:
    metric = args.metric or str(ALL_METRICS[0])
    a, b = _column(args.csv_a, metric), _column(args.csv_b, metric)
    cost, path = dtw(a, b)
    print(f"metric: {metric}")
    print(f"dtw cost: {export.fmt(cost)}")
    print(f"path length: {len(path)}")
    return 0


def cmd_communities(args) -> int:
    score = _load(args.input)
    g = build_graph(args.graph, score.timeline())
    if args.method == "greedy":
        partition = greedy_modularity(g, args.resolution)
    elif args.method == "entropy":
        partition = entropy_min_partition(g)
    else:
        raise CommandError(f"unknown method {args.method!r}")
    print(f"communities: {len(partition)}")
    if g.size:
        print(f"modularity: {export.fmt(modularity(g, partition, args.resolution))}")
    stem = Path(args.out) / f"{Path(args.input).stem}_{args.graph}_{args.method}"
    for i, community in enumerate(partition.communities, start=1):
        parts = []
        for kind in KIND_ORDER:
            members = sorted((n for n in community if n.kind == kind), key=lambda n: n.sort_key())
            if members:
                parts.append(f"{kind}: " + " ".join(n.label for n in members))
        print(f"community {i}: " + "; ".join(parts))
        sub = g.subgraph(community)
        _write(Path(f"{stem}_community{i}.svg"), export.render_graph_svg(sub, seed=args.seed, title=f"community {i}"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="score-graphs", description=__doc__)
    parser.add_argument("--config", help=f"settings file (default: ${CONFIG_ENV})")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, graph=False, window=False, seed=False, out=False):
        if graph:
            p.add_argument("--graph", choices=sorted(GRAPH_BUILDERS))
        if window:
            p.add_argument("--window-length", type=int)
            p.add_argument("--window-step", type=int)
            p.add_argument("--metrics", help="comma-separated metric ids (default: all 11)")
        if out:
            p.add_argument("--format", help="comma list of dot,graphml,json,svg,csv")
            p.add_argument("--out", help="output directory")
        if seed:
            p.add_argument("--seed", type=int)
        p.add_argument("--resolution", type=float)

    p = sub.add_parser("stats", help="summary numbers of a whole score")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("graph", help="build and export one graph")
    p.add_argument("input")
    common(p, graph=True, seed=True, out=True)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("ecg", help="windowed metric series (CSV + SVG)")
    p.add_argument("input")
    common(p, window=True, out=True)
    p.set_defaults(func=cmd_ecg)

    p = sub.add_parser("compare", help="DTW cost between one column of two CSV series")
    p.add_argument("csv_a")
    p.add_argument("csv_b")
    p.add_argument("--metric", help="column to compare")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("communities", help="detect and draw communities")
    p.add_argument("input")
    common(p, graph=True, seed=True, out=True)
    p.add_argument("--method", choices=["greedy", "entropy"])
    p.set_defaults(func=cmd_communities)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        _resolve(args)
        if args.graph not in GRAPH_BUILDERS:
            raise CommandError(f"unknown graph kind {args.graph!r}")
        if args.window_length < 1 or args.window_step < 1:
            raise CommandError("window length and step must be >= 1")
        return args.func(args)
    except (CommandError, ScoreGraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
