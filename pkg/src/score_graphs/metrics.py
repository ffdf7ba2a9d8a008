"""Centralities and entropies of graphs and weight distributions."""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AllZero, DirectedUnsupported, NoEdges, NotConverged, PartitionMismatch, TooFewNodes
from .graphs import MusicGraph, Node


def degree_centrality(g: MusicGraph) -> dict[Node, float]:
    """Distinct-neighbour count over ``n - 1``.

    Directed graphs are read through their underlying undirected graph, so a
    pair of reciprocal arcs counts as one neighbour and values stay in [0, 1].
    """
    n = g.order
    if n < 2:
        raise TooFewNodes("degree centrality needs at least 2 nodes")
    return {v: len(nb) / (n - 1) for v, nb in g.neighbors().items()}


def eigenvector_centrality(
    g: MusicGraph,
    tolerance: float = 1e-10,
    max_iterations: int = 100_000,
) -> dict[Node, float]:
    """Leading eigenvector of the weighted adjacency matrix by power iteration.

    Iterates on ``A / s + I`` (``s`` = largest weighted degree) starting from
    the all-ones vector. The shift has the same eigenvectors as ``A`` but
    removes the period-2 oscillation of bipartite graphs. Stops once two
    successive unit iterates differ by less than ``tolerance`` (max-norm) and
    the residual ``|A x - lambda x|`` is below ``tolerance`` as well.
    """
    if g.directed:
        raise DirectedUnsupported("eigenvector centrality is defined for undirected graphs")
    if g.size == 0:
        raise NoEdges("eigenvector centrality needs at least one edge")
    nodes = g.node_list()
    a = g.adjacency(weighted=True)
    scale = a.sum(axis=1).max()
    m = a / scale + np.eye(len(nodes))
    isolated = a.sum(axis=1) == 0

    x = np.ones(len(nodes))
    x[isolated] = 0.0
    x /= np.linalg.norm(x)
    for _ in range(max_iterations):
        y = m @ x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < tolerance:
            lam = y @ a @ y
            if np.max(np.abs(a @ y - lam * y)) < tolerance:
                x = y
                break
        x = y
    else:
        raise NotConverged(max_iterations)
    x = np.clip(x, 0.0, None)
    x /= np.linalg.norm(x)
    return {v: float(val) for v, val in zip(nodes, x)}


def normalize(weights: Iterable[float]) -> list[float]:
    w = [float(x) for x in weights]
    if any(x < 0 or math.isnan(x) for x in w):
        raise ValueError("weights must be non-negative")
    total = math.fsum(w)
    if total <= 0:
        raise AllZero("at least one weight must be positive")
    return [x / total for x in w]


def shannon_entropy(weights: Iterable[float]) -> float:
    """Entropy in bits of the distribution proportional to ``weights``."""
    probs = normalize(weights)
    h = -math.fsum(p * math.log2(p) for p in probs if p > 0)
    return h if h > 0 else 0.0


def laplacian(g: MusicGraph) -> np.ndarray:
    a = g.adjacency(weighted=True)
    return np.diag(a.sum(axis=1)) - a


def von_neumann_entropy(g: MusicGraph) -> float:
    """Entropy (bits) of the Laplacian spectrum normalised by its trace."""
    if g.directed:
        raise DirectedUnsupported("von Neumann entropy is defined for undirected graphs")
    if g.order < 2:
        raise TooFewNodes("von Neumann entropy needs at least 2 nodes")
    lap = laplacian(g)
    volume = float(np.trace(lap))
    if volume <= 0:
        raise NoEdges("graph has no edges")
    eig = np.linalg.eigvalsh(lap)
    eig = np.where((eig < 0) & (eig > -1e-9), 0.0, eig)
    if np.any(eig < 0):
        raise ArithmeticError("Laplacian has a significantly negative eigenvalue")
    probs = eig / volume
    h = -math.fsum(float(p) * math.log2(p) for p in probs if p > 0)
    return h if h > 0 else 0.0


def _binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -(p * math.log2(p) + (1 - p) * math.log2(1 - p))


def node_cluster_entropies(neighbors: Mapping[Node, set], cluster: set) -> dict[Node, float]:
    out = {}
    for v, nb in neighbors.items():
        if not nb:
            out[v] = 0.0
            continue
        out[v] = _binary_entropy(len(nb & cluster) / len(nb))
    return out


def cluster_entropy(g: MusicGraph, cluster: Iterable[Node]) -> tuple[dict[Node, float], float]:
    """Per-node binary entropy of inner vs outer links relative to ``cluster``.

    Returns the per-node values and their sum. Isolated nodes score 0.
    """
    values = node_cluster_entropies(g.neighbors(), set(cluster))
    return values, math.fsum(values.values())


def graph_entropy_avg(g: MusicGraph, partition) -> float:
    """Mean over nodes of the cluster entropy against each node's own community."""
    communities = [set(c) for c in getattr(partition, "communities", partition)]
    covered = [v for c in communities for v in c]
    if len(covered) != len(set(covered)) or set(covered) != set(g.nodes):
        raise PartitionMismatch("partition must be a disjoint cover of the graph's nodes")
    if g.order == 0:
        raise TooFewNodes("graph entropy of an empty graph")
    nbrs = g.neighbors()
    total = 0.0
    for community in communities:
        for v in community:
            nb = nbrs[v]
            if nb:
                total += _binary_entropy(len(nb & community) / len(nb))
    return total / g.order


def centrality_entropy(g: MusicGraph, kind: str = "degree") -> float:
    if kind == "degree":
        values = degree_centrality(g)
    elif kind == "eigenvector":
        values = eigenvector_centrality(g)
    else:
        raise ValueError(f"unknown centrality kind {kind!r}")
    return shannon_entropy(values.values())


def distribution(labels: Sequence, weights: Sequence[float]) -> list[tuple[object, float]]:
    """Pair labels with normalised probabilities."""
    return list(zip(labels, normalize(weights)))
