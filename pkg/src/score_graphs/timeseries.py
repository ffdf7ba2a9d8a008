"""Sliding measure windows, per-window metric series and dynamic time warping."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import metrics
from .communities import greedy_modularity, modularity
from .errors import EmptySeries, NoMeasures, ScoreGraphError
from .graphs import build_pcir, density
from .ingest import ElementStats, Timeline, accumulate_weights

log = logging.getLogger(__name__)


class MetricId(str, enum.Enum):
    PC_ENTROPY_DURATION = "pc-entropy-by-duration"
    PC_ENTROPY_OCCURRENCE = "pc-entropy-by-occurrence"
    CHORD_ENTROPY_DURATION = "chord-entropy-by-duration"
    CHORD_ENTROPY_OCCURRENCE = "chord-entropy-by-occurrence"
    RHYTHM_ENTROPY = "rhythm-entropy-by-occurrence"
    DEGREE_ENTROPY = "graph-entropy-by-degree-centrality"
    EIGENVECTOR_ENTROPY = "graph-entropy-by-eigenvector-centrality"
    VON_NEUMANN = "von-neumann-entropy"
    DENSITY = "density"
    COMMUNITY_COUNT = "community-count"
    MODULARITY = "modularity"

    def __str__(self) -> str:
        return self.value


ALL_METRICS = tuple(MetricId)


def parse_metric_ids(text: str | Iterable[str] | None) -> tuple[MetricId, ...]:
    if text is None:
        return ALL_METRICS
    items = text.split(",") if isinstance(text, str) else list(text)
    out = []
    for item in items:
        item = str(item).strip()
        if item:
            try:
                out.append(MetricId(item))
            except ValueError:
                raise ValueError(f"unknown metric id {item!r}") from None
    return tuple(out) or ALL_METRICS


@dataclass(frozen=True)
class WindowSpec:
    length_measures: int
    step_measures: int

    def __post_init__(self):
        if self.length_measures < 1 or self.step_measures < 1:
            raise ValueError("window length and step must be positive")


@dataclass(frozen=True)
class Window:
    first_measure: int
    last_measure: int
    center: Fraction
    timeline: Timeline


def windows(timeline: Timeline, spec: WindowSpec) -> list[Window]:
    """Full-length windows starting at measure 1 every ``step`` measures.

    If the sweep leaves trailing measures uncovered, one more window ending on
    the last measure is appended. A piece shorter than one window yields a
    single window over the whole piece. The center is the barline halfway
    through the window, e.g. mm. 1-8 -> 5.
    """
    numbers = timeline.measure_numbers
    if not numbers:
        raise NoMeasures("timeline has no measure boundaries")
    first, last = numbers[0], numbers[-1]
    length, step = spec.length_measures, spec.step_measures
    starts = []
    if last - first + 1 <= length:
        starts = [first]
    else:
        s = first
        while s + length - 1 <= last:
            starts.append(s)
            s += step
        if starts[-1] + length - 1 < last:
            starts.append(last - length + 1)
    out = []
    for s in starts:
        e = min(s + length - 1, last)
        lo, hi = timeline.measure_span(s, e)
        out.append(Window(s, e, s + Fraction(e - s + 1, 2), timeline.clip(lo, hi)))
    return out


@dataclass
class MetricSeries:
    window_centers: list[float]
    values: dict[MetricId, list[float | None]]
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.window_centers)
        if any(len(v) != n for v in self.values.values()):
            raise ValueError("every metric series must have one value per window")
        if any(a >= b for a, b in zip(self.window_centers, self.window_centers[1:])):
            raise ValueError("window centers must be strictly increasing")

    @property
    def metric_ids(self) -> list[MetricId]:
        return list(self.values)

    def __len__(self) -> int:
        return len(self.window_centers)


class _WindowContext:
    """Lazily built per-window objects shared between metrics."""

    def __init__(self, stats: ElementStats, resolution: float):
        self.stats = stats
        self.resolution = resolution
        self._graph = None
        self._partition = None

    @property
    def graph(self):
        if self._graph is None:
            self._graph = build_pcir(self.stats)
        return self._graph

    @property
    def partition(self):
        if self._partition is None:
            self._partition = greedy_modularity(self.graph, self.resolution)
        return self._partition


def _stat_values(mapping, which: int):
    return [v[which] for v in mapping.values()]


_METRICS: dict[MetricId, Callable[[_WindowContext], float]] = {
    MetricId.PC_ENTROPY_DURATION: lambda c: metrics.shannon_entropy(_stat_values(c.stats.pc_stats, 0)),
    MetricId.PC_ENTROPY_OCCURRENCE: lambda c: metrics.shannon_entropy(_stat_values(c.stats.pc_stats, 1)),
    MetricId.CHORD_ENTROPY_DURATION: lambda c: metrics.shannon_entropy(_stat_values(c.stats.chord_stats, 0)),
    MetricId.CHORD_ENTROPY_OCCURRENCE: lambda c: metrics.shannon_entropy(_stat_values(c.stats.chord_stats, 1)),
    MetricId.RHYTHM_ENTROPY: lambda c: metrics.shannon_entropy(c.stats.rhythm_stats.values()),
    MetricId.DEGREE_ENTROPY: lambda c: metrics.centrality_entropy(c.graph, "degree"),
    MetricId.EIGENVECTOR_ENTROPY: lambda c: metrics.centrality_entropy(c.graph, "eigenvector"),
    MetricId.VON_NEUMANN: lambda c: metrics.von_neumann_entropy(c.graph),
    MetricId.DENSITY: lambda c: density(c.graph),
    MetricId.COMMUNITY_COUNT: lambda c: float(len(c.partition)),
    MetricId.MODULARITY: lambda c: modularity(c.graph, c.partition, c.resolution),
}


def window_metrics(
    timeline: Timeline,
    metric_ids: Sequence[MetricId] = ALL_METRICS,
    resolution: float = 1.0,
) -> dict[MetricId, float]:
    """Evaluate the metrics on one fragment. Raises on an empty fragment."""
    ctx = _WindowContext(accumulate_weights(timeline), resolution)
    return {m: _METRICS[MetricId(m)](ctx) for m in metric_ids}


def compute_series(
    timeline: Timeline,
    spec: WindowSpec,
    metric_ids: Sequence[MetricId] = ALL_METRICS,
    resolution: float = 1.0,
) -> MetricSeries:
    """Sweep the windows and evaluate every metric; failures become gaps."""
    metric_ids = [MetricId(m) for m in metric_ids]
    wins = windows(timeline, spec)
    if not wins:
        raise EmptySeries("no windows")
    values: dict[MetricId, list[float | None]] = {m: [] for m in metric_ids}
    diagnostics = []
    for win in wins:
        label = f"mm. {win.first_measure}-{win.last_measure}"
        if not win.timeline.events:
            diagnostics.append(f"{label}: no events")
            for m in metric_ids:
                values[m].append(None)
            continue
        ctx = _WindowContext(accumulate_weights(win.timeline), resolution)
        for m in metric_ids:
            try:
                values[m].append(_METRICS[m](ctx))
            except (ScoreGraphError, ArithmeticError) as exc:
                log.warning("%s: %s failed: %s", label, m, exc)
                diagnostics.append(f"{label}: {m}: {exc}")
                values[m].append(None)
    return MetricSeries([float(w.center) for w in wins], values, diagnostics)


def dtw(a: Sequence[float], b: Sequence[float]) -> tuple[float, list[tuple[int, int]]]:
    """Dynamic time warping with absolute-difference cost.

    Returns the minimal total cost of a monotone alignment matching first to
    first and last to last, and one optimal path (diagonal preferred on ties).
    """
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        raise EmptySeries("dtw needs two non-empty series")
    if any(x is None for x in a) or any(x is None for x in b):
        raise ValueError("series contain gaps; drop or fill them first")
    inf = float("inf")
    acc = [[inf] * m for _ in range(n)]
    for i in range(n):
        for j in range(m):
            cost = abs(a[i] - b[j])
            if i == 0 and j == 0:
                acc[i][j] = cost
                continue
            prev = min(
                acc[i - 1][j - 1] if i and j else inf,
                acc[i - 1][j] if i else inf,
                acc[i][j - 1] if j else inf,
            )
            acc[i][j] = cost + prev
    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        options = []
        if i and j:
            options.append((acc[i - 1][j - 1], 0, (i - 1, j - 1)))
        if i:
            options.append((acc[i - 1][j], 1, (i - 1, j)))
        if j:
            options.append((acc[i][j - 1], 2, (i, j - 1)))
        i, j = min(options)[2]
        path.append((i, j))
    path.reverse()
    return acc[n - 1][m - 1], path
