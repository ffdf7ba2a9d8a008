"""Typed weighted graphs built from a timeline or its element statistics."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple

from .errors import EmptyInput, TooFewEvents, TooFewNodes
from .ingest import ElementStats, Timeline

PITCH_CLASS = "pitch_class"
CHORD = "chord"
RHYTHM = "rhythm"
INTERVAL_CLASS = "interval_class"

# sort order of node kinds in every listing
KIND_ORDER = (PITCH_CLASS, CHORD, RHYTHM, INTERVAL_CLASS)


class Node(NamedTuple):
    kind: str
    value: object

    def sort_key(self):
        return KIND_ORDER.index(self.kind), self.value

    @property
    def label(self) -> str:
        if self.kind == CHORD:
            return "(" + ", ".join(str(pc) for pc in self.value) + ")"
        if self.kind == RHYTHM:
            return f"{format_ql(self.value)} qL"
        if self.kind == INTERVAL_CLASS:
            return f"ic{self.value}"
        return str(self.value)

    def __str__(self) -> str:
        return self.label


def pitch_class(pc: int) -> Node:
    if not 0 <= pc <= 11:
        raise ValueError(f"pitch class out of range: {pc}")
    return Node(PITCH_CLASS, int(pc))


def chord(pcs: Iterable[int]) -> Node:
    pcs = tuple(int(p) for p in pcs)
    if not pcs or any(a >= b for a, b in zip(pcs, pcs[1:])):
        raise ValueError(f"chord must be a non-empty strictly increasing tuple: {pcs}")
    return Node(CHORD, pcs)


def rhythm(duration) -> Node:
    return Node(RHYTHM, Fraction(duration))


def interval_class(ic: int) -> Node:
    if not 1 <= ic <= 6:
        raise ValueError(f"interval class out of range: {ic}")
    return Node(INTERVAL_CLASS, int(ic))


def format_ql(value: Fraction) -> str:
    """Decimal rendering with at most 6 fractional digits, trailing zeros dropped."""
    text = f"{float(value):.6f}".rstrip("0").rstrip(".")
    return text or "0"


def sort_nodes(nodes: Iterable[Node]) -> list[Node]:
    return sorted(nodes, key=Node.sort_key)


class NodeWeights(NamedTuple):
    duration: Fraction | None  # unset for rhythm nodes
    occurrences: int


@dataclass(frozen=True, eq=False)
class MusicGraph:
    """Simple weighted graph: no loops, no parallel edges.

    For undirected graphs edge keys are stored with the endpoints in node
    sort order, so each unordered pair has exactly one key.
    """

    directed: bool
    nodes: Mapping[Node, NodeWeights]
    edges: Mapping[tuple[Node, Node], int]

    def __post_init__(self):
        nodes = {n: self.nodes[n] for n in sort_nodes(self.nodes)}
        edges = {}
        for (u, v), w in self.edges.items():
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if u not in nodes or v not in nodes:
                raise ValueError(f"edge ({u}, {v}) references an unknown node")
            if w < 1:
                raise ValueError(f"edge weight must be >= 1, got {w}")
            key = (u, v) if self.directed or u.sort_key() < v.sort_key() else (v, u)
            if key in edges:
                raise ValueError(f"duplicate edge {key}")
            edges[key] = w
        edges = dict(sorted(edges.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key())))
        object.__setattr__(self, "nodes", MappingProxyType(nodes))
        object.__setattr__(self, "edges", MappingProxyType(edges))

    def __eq__(self, other):
        if not isinstance(other, MusicGraph):
            return NotImplemented
        return self.directed == other.directed and dict(self.nodes) == dict(other.nodes) and dict(self.edges) == dict(other.edges)

    def __hash__(self):
        return hash((self.directed, tuple(self.nodes.items()), tuple(self.edges.items())))

    @property
    def order(self) -> int:
        return len(self.nodes)

    @property
    def size(self) -> int:
        return len(self.edges)

    def node_list(self) -> list[Node]:
        return list(self.nodes)

    def weight(self, u: Node, v: Node) -> int:
        if self.directed:
            return self.edges.get((u, v), 0)
        key = (u, v) if u.sort_key() < v.sort_key() else (v, u)
        return self.edges.get(key, 0)

    def undirected_edges(self) -> dict[tuple[Node, Node], int]:
        """Edges of the underlying undirected simple graph; reciprocal arcs merge, weights add."""
        if not self.directed:
            return dict(self.edges)
        out: dict[tuple[Node, Node], int] = defaultdict(int)
        for (u, v), w in self.edges.items():
            key = (u, v) if u.sort_key() < v.sort_key() else (v, u)
            out[key] += w
        return dict(out)

    def neighbors(self) -> dict[Node, set[Node]]:
        """Neighbour sets in the underlying undirected graph."""
        nbrs: dict[Node, set[Node]] = {n: set() for n in self.nodes}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def subgraph(self, keep: Iterable[Node]) -> "MusicGraph":
        keep = set(keep)
        return MusicGraph(
            self.directed,
            {n: w for n, w in self.nodes.items() if n in keep},
            {e: w for e, w in self.edges.items() if e[0] in keep and e[1] in keep},
        )

    def adjacency(self, weighted: bool = True):
        """Symmetric adjacency matrix (numpy) in ``node_list()`` order."""
        import numpy as np

        index = {n: i for i, n in enumerate(self.nodes)}
        a = np.zeros((len(index), len(index)))
        for (u, v), w in self.undirected_edges().items():
            a[index[u], index[v]] = a[index[v], index[u]] = w if weighted else 1
        return a


def _require_stats(stats: ElementStats) -> None:
    if not stats.chord_stats:
        raise EmptyInput("element statistics are empty")


def _pcr_parts(stats: ElementStats):
    nodes: dict[Node, NodeWeights] = {}
    edges: dict[tuple[Node, Node], int] = {}
    for pc, (dur, count) in stats.pc_stats.items():
        nodes[pitch_class(pc)] = NodeWeights(dur, count)
    for pcs, (dur, count) in stats.chord_stats.items():
        c = chord(pcs)
        nodes[c] = NodeWeights(dur, count)
        for pc in pcs:
            edges[(pitch_class(pc), c)] = count
    for value, count in stats.rhythm_stats.items():
        nodes[rhythm(value)] = NodeWeights(None, count)
    for (pcs, value), count in stats.chord_rhythm_counts.items():
        edges[(chord(pcs), rhythm(value))] = count
    return nodes, edges


def build_pcr(stats: ElementStats) -> MusicGraph:
    """Pitch-chord-rhythm graph: chords linked to their pitch classes and durations."""
    _require_stats(stats)
    nodes, edges = _pcr_parts(stats)
    return MusicGraph(False, nodes, edges)


def normal_form(pcs: Iterable[int]) -> tuple[int, ...]:
    """Most compact rotation of a pitch-class set (Rahn's convention).

    Rotations are compared by outer interval, then by the intervals from the
    first element to the second-to-last, third-to-last, ...; remaining ties go
    to the rotation starting on the lowest pitch class.
    """
    ordered = sorted({int(p) % 12 for p in pcs})
    if not ordered:
        raise EmptyInput("normal form of an empty set")
    n = len(ordered)
    rotations = [ordered[i:] + ordered[:i] for i in range(n)]

    def key(rot):
        span = [(rot[k] - rot[0]) % 12 for k in range(n - 1, 0, -1)]
        return span, rot[0]

    return tuple(min(rotations, key=key))


def interval_class_of(a: int, b: int) -> int:
    d = (b - a) % 12
    return min(d, 12 - d)


def build_pcir(stats: ElementStats) -> MusicGraph:
    """p-c-r graph plus interval-class nodes tied to the chords that span them."""
    _require_stats(stats)
    nodes, edges = _pcr_parts(stats)
    ic_counts: dict[int, int] = defaultdict(int)
    for pcs, (_, count) in stats.chord_stats.items():
        nf = normal_form(pcs)
        per_chord: dict[int, int] = defaultdict(int)
        for a, b in zip(nf, nf[1:]):
            per_chord[interval_class_of(a, b)] += count
        for ic, w in per_chord.items():
            edges[(chord(pcs), interval_class(ic))] = w
            ic_counts[ic] += w
    for ic, w in sorted(ic_counts.items()):
        nodes[interval_class(ic)] = NodeWeights(None, w)
    return MusicGraph(False, nodes, edges)


def _pc_nodes(timeline: Timeline) -> dict[Node, NodeWeights]:
    nodes: dict[Node, list] = {}
    for ev in timeline.events:
        for pc in ev.pitch_classes:
            entry = nodes.setdefault(pitch_class(pc), [Fraction(0), 0])
            entry[0] += ev.duration_qL
            entry[1] += 1
    return {n: NodeWeights(d, c) for n, (d, c) in nodes.items()}


def build_vertical_pc(timeline: Timeline) -> MusicGraph:
    """Pitch classes joined when they sound together; weight = shared events."""
    if not timeline.events:
        raise EmptyInput("timeline has no events")
    edges: dict[tuple[Node, Node], int] = defaultdict(int)
    for ev in timeline.events:
        pcs = ev.pitch_classes
        for i, a in enumerate(pcs):
            for b in pcs[i + 1:]:
                edges[(pitch_class(a), pitch_class(b))] += 1
    return MusicGraph(False, _pc_nodes(timeline), edges)


def build_horizontal_pc(timeline: Timeline) -> MusicGraph:
    """Arrows from every pitch class of an event to every one of the next event."""
    events = timeline.events
    if len(events) < 2:
        raise TooFewEvents("horizontal pitch-class graph needs >= 2 events")
    edges: dict[tuple[Node, Node], int] = defaultdict(int)
    for prev, nxt in zip(events, events[1:]):
        for a in prev.pitch_classes:
            for b in nxt.pitch_classes:
                if a != b:
                    edges[(pitch_class(a), pitch_class(b))] += 1
    return MusicGraph(True, _pc_nodes(timeline), edges)


def build_chord_sequence(timeline: Timeline) -> MusicGraph:
    events = timeline.events
    if len(events) < 2:
        raise TooFewEvents("chord sequence graph needs >= 2 events")
    nodes: dict[Node, list] = {}
    for ev in events:
        entry = nodes.setdefault(chord(ev.pitch_classes), [Fraction(0), 0])
        entry[0] += ev.duration_qL
        entry[1] += 1
    edges: dict[tuple[Node, Node], int] = defaultdict(int)
    for prev, nxt in zip(events, events[1:]):
        if prev.pitch_classes != nxt.pitch_classes:
            edges[(chord(prev.pitch_classes), chord(nxt.pitch_classes))] += 1
    return MusicGraph(True, {n: NodeWeights(d, c) for n, (d, c) in nodes.items()}, edges)


GRAPH_BUILDERS = {
    "pcr": ("stats", build_pcr),
    "pcir": ("stats", build_pcir),
    "vertical": ("timeline", build_vertical_pc),
    "horizontal": ("timeline", build_horizontal_pc),
    "chords": ("timeline", build_chord_sequence),
}


def build_graph(kind: str, timeline: Timeline, stats: ElementStats | None = None) -> MusicGraph:
    """Build one of the five graph families by short name."""
    if kind not in GRAPH_BUILDERS:
        raise ValueError(f"unknown graph kind {kind!r}; choose from {sorted(GRAPH_BUILDERS)}")
    source, builder = GRAPH_BUILDERS[kind]
    if source == "stats":
        from .ingest import accumulate_weights

        return builder(stats if stats is not None else accumulate_weights(timeline))
    return builder(timeline)


def density(g: MusicGraph) -> float:
    n = g.order
    if n < 2:
        raise TooFewNodes("density needs at least 2 nodes")
    possible = n * (n - 1) if g.directed else n * (n - 1) / 2
    return g.size / possible


def connected_components(g: MusicGraph) -> list[set[Node]]:
    nbrs = g.neighbors()
    seen: set[Node] = set()
    components = []
    for start in g.nodes:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            for w in nbrs[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        components.append(comp)
    return components


def cycle_basis_size(g: MusicGraph) -> int:
    """Circuit rank of the underlying undirected simple graph."""
    return len(g.undirected_edges()) - g.order + len(connected_components(g))


def clustering(g: MusicGraph) -> dict[Node, float]:
    nbrs = g.neighbors()
    out = {}
    for v, vn in nbrs.items():
        k = len(vn)
        if k < 2:
            out[v] = 0.0
            continue
        links = sum(len(nbrs[u] & vn) for u in vn) / 2
        out[v] = 2 * links / (k * (k - 1))
    return out


def average_clustering(g: MusicGraph) -> float:
    if g.order == 0:
        raise TooFewNodes("average clustering of an empty graph")
    values = clustering(g)
    return sum(values.values()) / len(values)
