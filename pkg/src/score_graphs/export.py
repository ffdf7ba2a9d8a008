"""Serialisation (JSON, DOT, GraphML, CSV) and static SVG rendering."""

from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from fractions import Fraction
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import EmptySeries
from .graphs import CHORD, INTERVAL_CLASS, PITCH_CLASS, RHYTHM, MusicGraph, Node, NodeWeights
from .timeseries import MetricId, MetricSeries

NODE_COLORS = {
    PITCH_CLASS: "#40e0d0",  # turquoise
    CHORD: "#d62728",  # red
    RHYTHM: "#1f5fbf",  # blue
    INTERVAL_CLASS: "#e6a100",  # amber; no colour prescribed for interval classes
}

SERIES_COLORS = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#000000",
)


def fmt(x: float) -> str:
    """15 significant digits."""
    return format(float(x), ".15g")


@dataclass(frozen=True)
class RenderStyle:
    width: int = 800
    height: int = 800
    min_radius: float = 4.0
    max_radius: float = 28.0
    min_opacity: float = 0.25
    max_edge_width: float = 6.0
    show_labels: bool = True

    def radius(self, size_weight: float, max_weight: float) -> float:
        """Area proportional to the weight."""
        if max_weight <= 0:
            return self.min_radius
        return max(self.min_radius, self.max_radius * math.sqrt(size_weight / max_weight))

    def opacity(self, count: int, lo: int, hi: int) -> float:
        if hi == lo:
            return 1.0
        return self.min_opacity + (1.0 - self.min_opacity) * (count - lo) / (hi - lo)

    def edge_width(self, weight: int, max_weight: int) -> float:
        return max(0.5, self.max_edge_width * weight / max_weight)


# --------------------------------------------------------------------------
# graph serialisation


def _value_to_json(node: Node):
    if node.kind == CHORD:
        return list(node.value)
    if node.kind == RHYTHM:
        return str(node.value)
    return node.value


def _value_from_json(kind: str, value):
    if kind == CHORD:
        return tuple(int(v) for v in value)
    if kind == RHYTHM:
        return Fraction(value)
    return int(value)


def node_id(node: Node) -> str:
    if node.kind == CHORD:
        return "chord:" + ",".join(str(p) for p in node.value)
    if node.kind == RHYTHM:
        return f"rhythm:{node.value}"
    if node.kind == INTERVAL_CLASS:
        return f"ic:{node.value}"
    return f"pc:{node.value}"


def graph_to_json(g: MusicGraph) -> str:
    index = {n: i for i, n in enumerate(g.nodes)}
    payload = {
        "directed": g.directed,
        "nodes": [
            {
                "id": node_id(n),
                "kind": n.kind,
                "value": _value_to_json(n),
                "label": n.label,
                "duration": None if w.duration is None else str(w.duration),
                "occurrences": w.occurrences,
            }
            for n, w in g.nodes.items()
        ],
        "edges": [
            {"source": index[u], "target": index[v], "weight": w}
            for (u, v), w in g.edges.items()
        ],
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def graph_from_json(text: str) -> MusicGraph:
    data = json.loads(text)
    nodes = []
    weights = {}
    for item in data["nodes"]:
        n = Node(item["kind"], _value_from_json(item["kind"], item["value"]))
        dur = item.get("duration")
        weights[n] = NodeWeights(None if dur is None else Fraction(dur), int(item["occurrences"]))
        nodes.append(n)
    edges = {(nodes[e["source"]], nodes[e["target"]]): int(e["weight"]) for e in data["edges"]}
    return MusicGraph(bool(data["directed"]), weights, edges)


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(g: MusicGraph, style: RenderStyle | None = None) -> str:
    style = style or RenderStyle()
    radii = _node_radii(g, style)
    counts = [w.occurrences for w in g.nodes.values()]
    lo, hi = min(counts, default=0), max(counts, default=0)
    max_w = max(g.edges.values(), default=1)
    kind = "digraph" if g.directed else "graph"
    arrow = "->" if g.directed else "--"
    lines = [f"{kind} G {{", "  node [shape=circle, style=filled];"]
    for n, w in g.nodes.items():
        alpha = round(255 * style.opacity(w.occurrences, lo, hi))
        attrs = {
            "label": n.label,
            "kind": n.kind,
            "duration": "" if w.duration is None else fmt(w.duration),
            "occurrences": str(w.occurrences),
            "fillcolor": f"{NODE_COLORS[n.kind]}{alpha:02x}",
            "width": fmt(2 * radii[n] / 72),
        }
        body = ", ".join(f"{k}={_dot_quote(v)}" for k, v in attrs.items())
        lines.append(f"  {_dot_quote(node_id(n))} [{body}];")
    for (u, v), w in g.edges.items():
        lines.append(
            f"  {_dot_quote(node_id(u))} {arrow} {_dot_quote(node_id(v))} "
            f'[weight="{w}", penwidth="{fmt(style.edge_width(w, max_w))}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


def graph_to_graphml(g: MusicGraph) -> str:
    ET.register_namespace("", GRAPHML_NS)
    q = lambda tag: f"{{{GRAPHML_NS}}}{tag}"  # noqa: E731
    root = ET.Element(q("graphml"))
    keys = [
        ("d0", "node", "kind", "string"),
        ("d1", "node", "label", "string"),
        ("d2", "node", "duration", "double"),
        ("d3", "node", "occurrences", "int"),
        ("d4", "edge", "weight", "int"),
    ]
    for key_id, domain, name, typ in keys:
        ET.SubElement(root, q("key"), {"id": key_id, "for": domain, "attr.name": name, "attr.type": typ})
    graph = ET.SubElement(root, q("graph"), {"id": "G", "edgedefault": "directed" if g.directed else "undirected"})
    for n, w in g.nodes.items():
        el = ET.SubElement(graph, q("node"), {"id": node_id(n)})
        ET.SubElement(el, q("data"), {"key": "d0"}).text = n.kind
        ET.SubElement(el, q("data"), {"key": "d1"}).text = n.label
        if w.duration is not None:
            ET.SubElement(el, q("data"), {"key": "d2"}).text = fmt(w.duration)
        ET.SubElement(el, q("data"), {"key": "d3"}).text = str(w.occurrences)
    for i, ((u, v), w) in enumerate(g.edges.items()):
        el = ET.SubElement(graph, q("edge"), {"id": f"e{i}", "source": node_id(u), "target": node_id(v)})
        ET.SubElement(el, q("data"), {"key": "d4"}).text = str(w)
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


# --------------------------------------------------------------------------
# layout and graph SVG


def _node_radii(g: MusicGraph, style: RenderStyle) -> dict[Node, float]:
    """Area proportional to total duration; rhythm and interval nodes carry
    only an occurrence count, so they are scaled against each other instead."""
    by_duration = {n: float(w.duration) for n, w in g.nodes.items() if w.duration is not None}
    by_count = {n: float(w.occurrences) for n, w in g.nodes.items() if w.duration is None}
    radii = {}
    for sizes in (by_duration, by_count):
        top = max(sizes.values(), default=0)
        radii.update({n: style.radius(v, top) for n, v in sizes.items()})
    return radii


def spring_layout(g: MusicGraph, seed: int = 42, iterations: int = 200) -> dict[Node, tuple[float, float]]:
    """Fruchterman-Reingold layout in the unit square."""
    nodes = g.node_list()
    n = len(nodes)
    rng = np.random.default_rng(seed)
    pos = rng.random((n, 2))
    if n == 1:
        return {nodes[0]: (0.5, 0.5)}
    index = {v: i for i, v in enumerate(nodes)}
    adj = np.zeros((n, n))
    for (u, v), _ in g.edges.items():
        adj[index[u], index[v]] = adj[index[v], index[u]] = 1.0
    k = math.sqrt(1.0 / n)
    temperature = 0.1
    cooling = temperature / (iterations + 1)
    for _ in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((delta ** 2).sum(axis=-1))
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 0.01)
        force = k * k / dist ** 2 - adj * dist / k
        np.fill_diagonal(force, 0.0)
        disp = (delta * force[:, :, None]).sum(axis=1)
        length = np.sqrt((disp ** 2).sum(axis=1))
        length = np.where(length < 0.01, 0.01, length)
        pos += disp * (np.minimum(length, temperature) / length)[:, None]
        temperature -= cooling
    lo, hi = pos.min(axis=0), pos.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    pos = (pos - lo) / span
    return {v: (float(pos[i, 0]), float(pos[i, 1])) for i, v in enumerate(nodes)}


def _svg_num(x: float) -> str:
    return f"{x:.2f}"


def render_graph_svg(g: MusicGraph, style: RenderStyle | None = None, seed: int = 42, title: str | None = None) -> str:
    style = style or RenderStyle()
    layout = spring_layout(g, seed)
    margin = style.max_radius + 10
    w, h = style.width, style.height

    def xy(n):
        x, y = layout[n]
        return margin + x * (w - 2 * margin), margin + y * (h - 2 * margin)

    radii = _node_radii(g, style)
    counts = [wt.occurrences for wt in g.nodes.values()]
    lo, hi = min(counts, default=0), max(counts, default=0)
    max_w = max(g.edges.values(), default=1)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f'<title>{escape(title)}</title>')
    if g.directed:
        out.append(
            '<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
            'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#555"/></marker></defs>'
        )
    out.append('<g class="edges">')
    for (u, v), wt in g.edges.items():
        (x1, y1), (x2, y2) = xy(u), xy(v)
        marker = ""
        if g.directed:
            # stop the arrow at the target's rim
            r = radii[v]
            d = math.hypot(x2 - x1, y2 - y1) or 1.0
            x2, y2 = x2 - (x2 - x1) * r / d, y2 - (y2 - y1) * r / d
            marker = ' marker-end="url(#arrow)"'
        out.append(
            f'<line x1="{_svg_num(x1)}" y1="{_svg_num(y1)}" x2="{_svg_num(x2)}" y2="{_svg_num(y2)}" '
            f'stroke="#555" stroke-opacity="0.6" stroke-width="{_svg_num(style.edge_width(wt, max_w))}"{marker}/>'
        )
    out.append("</g>")
    out.append('<g class="nodes">')
    for n, wt in g.nodes.items():
        x, y = xy(n)
        r = radii[n]
        opacity = style.opacity(wt.occurrences, lo, hi)
        out.append(
            f'<circle cx="{_svg_num(x)}" cy="{_svg_num(y)}" r="{_svg_num(r)}" fill="{NODE_COLORS[n.kind]}" '
            f'fill-opacity="{opacity:.3f}" stroke="#333" stroke-width="0.5" data-node={quoteattr(node_id(n))}/>'
        )
        if style.show_labels:
            out.append(
                f'<text x="{_svg_num(x)}" y="{_svg_num(y + 3)}" font-size="9" font-family="sans-serif" '
                f'text-anchor="middle">{escape(n.label)}</text>'
            )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# metric series


def series_to_csv(series: MetricSeries) -> str:
    if not series.window_centers:
        raise EmptySeries("series has no windows")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    ids = series.metric_ids
    writer.writerow(["window_center", *[str(m) for m in ids]])
    for i, center in enumerate(series.window_centers):
        row = [fmt(center)]
        for m in ids:
            v = series.values[m][i]
            row.append("" if v is None else fmt(v))
        writer.writerow(row)
    return buf.getvalue()


def read_csv_columns(text: str) -> dict[str, list[float | None]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptySeries("empty CSV") from None
    columns: dict[str, list[float | None]] = {name: [] for name in header}
    for row in reader:
        if not row:
            continue
        for name, cell in zip(header, row):
            columns[name].append(float(cell) if cell.strip() else None)
    return columns


def series_from_csv(text: str) -> MetricSeries:
    columns = read_csv_columns(text)
    centers = columns.pop("window_center")
    values = {}
    for name, col in columns.items():
        try:
            values[MetricId(name)] = col
        except ValueError:
            continue
    return MetricSeries([float(c) for c in centers], values)


def render_ecg_svg(series: MetricSeries, metric_ids=None, width: int = 900, height: int = 420) -> str:
    """Overlaid polylines, one per metric; gaps split a line into segments."""
    if not series.window_centers:
        raise EmptySeries("series has no windows")
    ids = [MetricId(m) for m in (metric_ids or series.metric_ids)]
    xs = series.window_centers
    ys = [v for m in ids for v in series.values[m] if v is not None]
    y_lo, y_hi = (min(ys), max(ys)) if ys else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    x_lo, x_hi = xs[0], xs[-1]
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    left, right, top, bottom = 50, 260, 20, 40
    pw, ph = width - left - right, height - top - bottom

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + (1 - (y - y_lo) / (y_hi - y_lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#999"/>',
    ]
    for x in xs:
        out.append(
            f'<text x="{_svg_num(px(x))}" y="{height - bottom + 15}" font-size="10" font-family="sans-serif" '
            f'text-anchor="middle">{fmt(x)}</text>'
        )
    for frac in (0.0, 0.5, 1.0):
        y = y_lo + frac * (y_hi - y_lo)
        out.append(
            f'<text x="{left - 5}" y="{_svg_num(py(y) + 3)}" font-size="10" font-family="sans-serif" '
            f'text-anchor="end">{y:.3g}</text>'
        )
    for k, m in enumerate(ids):
        color = SERIES_COLORS[k % len(SERIES_COLORS)]
        segment: list[str] = []
        segments = []
        for x, v in zip(xs, series.values[m]):
            if v is None:
                if segment:
                    segments.append(segment)
                segment = []
            else:
                segment.append(f"{_svg_num(px(x))},{_svg_num(py(v))}")
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                out.append(f'<circle class="series" data-metric="{m}" cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>')
            else:
                out.append(
                    f'<polyline class="series" data-metric="{m}" points="{" ".join(seg)}" '
                    f'fill="none" stroke="{color}" stroke-width="1.5"/>'
                )
        ly = top + 14 * k + 10
        out.append(f'<line x1="{width - right + 10}" y1="{ly}" x2="{width - right + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(
            f'<text class="legend" x="{width - right + 35}" y="{ly + 3}" font-size="10" font-family="sans-serif">{escape(str(m))}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
