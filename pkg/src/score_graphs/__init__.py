"""Graphs, entropies and windowed metric series from symbolic music scores."""

from .communities import (
    Partition,
    entropy_min_cluster,
    entropy_min_partition,
    greedy_modularity,
    modularity,
    modularity_pairwise,
)
from .graphs import (
    MusicGraph,
    Node,
    average_clustering,
    build_chord_sequence,
    build_horizontal_pc,
    build_pcir,
    build_pcr,
    build_vertical_pc,
    cycle_basis_size,
    density,
    normal_form,
)
from .ingest import (
    ElementStats,
    Event,
    Score,
    TimedNote,
    Timeline,
    accumulate_weights,
    chordify,
    load_score,
    parse_midi,
    parse_musicxml,
)
from .metrics import (
    centrality_entropy,
    cluster_entropy,
    degree_centrality,
    eigenvector_centrality,
    graph_entropy_avg,
    shannon_entropy,
    von_neumann_entropy,
)
from .timeseries import MetricId, MetricSeries, WindowSpec, compute_series, dtw, windows

__version__ = "0.1.0"
