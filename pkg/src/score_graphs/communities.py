"""Modularity, greedy (Clauset-Newman-Moore) communities and
entropy-minimising clusters."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import NoEdges, NodeNotFound, PartitionMismatch
from .graphs import MusicGraph, Node
from .metrics import node_cluster_entropies

_EPS = 1e-12


@dataclass(frozen=True)
class Partition:
    communities: tuple[frozenset, ...]
    community_of: Mapping[Node, int]

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[Node]]) -> "Partition":
        """Build a partition; communities are ordered by size, then by smallest node."""
        comms = [frozenset(s) for s in sets]
        if any(not c for c in comms):
            raise PartitionMismatch("empty community")
        comms.sort(key=lambda c: (-len(c), min(n.sort_key() for n in c)))
        community_of = {}
        for i, c in enumerate(comms):
            for v in c:
                if v in community_of:
                    raise PartitionMismatch(f"node {v} appears in two communities")
                community_of[v] = i
        return cls(tuple(comms), community_of)

    def __len__(self) -> int:
        return len(self.communities)

    def covers(self, g: MusicGraph) -> bool:
        return set(self.community_of) == set(g.nodes)


def _as_partition(p) -> Partition:
    return p if isinstance(p, Partition) else Partition.from_sets(p)


def _edge_weights(g: MusicGraph, weighted: bool) -> dict[tuple[Node, Node], int]:
    return {e: (w if weighted else 1) for e, w in g.undirected_edges().items()}


def _check(g: MusicGraph, p: Partition, edges) -> None:
    if not edges:
        raise NoEdges("modularity needs at least one edge")
    if not p.covers(g):
        raise PartitionMismatch("partition does not cover the graph's nodes exactly")


def modularity(g: MusicGraph, partition, resolution: float = 1.0, weighted: bool = False) -> float:
    """Community-sum form: sum over C of ``m_C/m - resolution * (deg_C / 2m)**2``."""
    p = _as_partition(partition)
    edges = _edge_weights(g, weighted)
    _check(g, p, edges)
    m = sum(edges.values())
    inner = defaultdict(int)
    degree_sum = defaultdict(int)
    for (u, v), w in edges.items():
        cu, cv = p.community_of[u], p.community_of[v]
        degree_sum[cu] += w
        degree_sum[cv] += w
        if cu == cv:
            inner[cu] += w
    q = Fraction(0)
    theta = Fraction(resolution)
    for c in range(len(p.communities)):
        q += Fraction(inner[c], m) - theta * Fraction(degree_sum[c], 2 * m) ** 2
    return float(q)


def modularity_pairwise(g: MusicGraph, partition, resolution: float = 1.0, weighted: bool = False) -> float:
    """Pair form: ``1/2m * sum_ij (A_ij - resolution k_i k_j / 2m) [c_i == c_j]``."""
    p = _as_partition(partition)
    edges = _edge_weights(g, weighted)
    _check(g, p, edges)
    m = sum(edges.values())
    adj: dict[Node, dict[Node, int]] = defaultdict(dict)
    k = defaultdict(int)
    for (u, v), w in edges.items():
        adj[u][v] = adj[v][u] = w
        k[u] += w
        k[v] += w
    theta = Fraction(resolution)
    total = Fraction(0)
    nodes = list(g.nodes)
    for i in nodes:
        for j in nodes:
            if p.community_of[i] == p.community_of[j]:
                total += adj[i].get(j, 0) - theta * Fraction(k[i] * k[j], 2 * m)
    return float(total / (2 * m))


def greedy_modularity(g: MusicGraph, resolution: float = 1.0, weighted: bool = False) -> Partition:
    """Clauset-Newman-Moore agglomeration.

    Starts from singletons (indexed in node order) and repeatedly merges the
    connected pair with the largest modularity gain, stopping when no merge
    gains. Gains are exact rationals; ties go to the lexicographically
    smallest index pair. A merged community keeps the smaller index.
    """
    edges = _edge_weights(g, weighted)
    if not edges:
        raise NoEdges("greedy modularity needs at least one edge")
    nodes = g.node_list()
    index = {v: i for i, v in enumerate(nodes)}
    m = sum(edges.values())
    theta = Fraction(resolution)

    members: dict[int, set[Node]] = {i: {v} for i, v in enumerate(nodes)}
    degree: dict[int, int] = defaultdict(int)
    between: dict[int, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for (u, v), w in edges.items():
        a, b = index[u], index[v]
        degree[a] += w
        degree[b] += w
        between[a][b] += w
        between[b][a] += w

    def gain(i: int, j: int) -> Fraction:
        return Fraction(between[i][j], m) - theta * Fraction(degree[i] * degree[j], 2 * m * m)

    while True:
        best = None
        best_pair = None
        for i in sorted(between):
            for j in sorted(between[i]):
                if j <= i:
                    continue
                dq = gain(i, j)
                if best is None or dq > best:
                    best, best_pair = dq, (i, j)
        if best is None or best <= 0:
            break
        i, j = best_pair
        members[i] |= members.pop(j)
        degree[i] += degree.pop(j)
        for k, w in between.pop(j).items():
            if k == i:
                continue
            between[i][k] += w
            between[k][i] += w
            del between[k][j]
        between[i].pop(j, None)
        if not between[i]:
            del between[i]
    return Partition.from_sets(members.values())


def _total_entropy(neighbors, cluster: set) -> float:
    return sum(node_cluster_entropies(neighbors, cluster).values())


def entropy_min_cluster(g: MusicGraph, seed: Node) -> frozenset:
    """Local search from ``{seed} + neighbours(seed)``.

    Each round applies the single addition (a neighbour of the cluster) or
    deletion (any member but the seed) that lowers the summed node entropy of
    the whole graph the most; ties go to the first node in node order,
    additions before deletions. Stops when nothing lowers the entropy.
    """
    if seed not in g.nodes:
        raise NodeNotFound(seed)
    neighbors = g.neighbors()
    cluster = {seed} | neighbors[seed]
    current = _total_entropy(neighbors, cluster)
    order = {v: i for i, v in enumerate(g.nodes)}
    while True:
        frontier = set().union(*(neighbors[v] for v in cluster)) - cluster
        moves = [(v, True) for v in sorted(frontier, key=order.get)]
        moves += [(v, False) for v in sorted(cluster - {seed}, key=order.get)]
        best_value, best_cluster = current, None
        for v, add in moves:
            candidate = cluster | {v} if add else cluster - {v}
            value = _total_entropy(neighbors, candidate)
            if value < best_value - _EPS:
                best_value, best_cluster = value, candidate
        if best_cluster is None:
            return frozenset(cluster)
        cluster, current = best_cluster, best_value


def entropy_min_partition(g: MusicGraph) -> Partition:
    """Cover the graph with entropy-minimising clusters.

    The highest-degree unassigned node seeds the next cluster, which is grown
    inside the subgraph of still-unassigned nodes and then removed.
    """
    remaining = set(g.nodes)
    clusters = []
    while remaining:
        sub = g.subgraph(remaining)
        nbrs = sub.neighbors()
        seed = min(remaining, key=lambda v: (-len(nbrs[v]), v.sort_key()))
        cluster = entropy_min_cluster(sub, seed)
        clusters.append(cluster)
        remaining -= cluster
    return Partition.from_sets(clusters)
