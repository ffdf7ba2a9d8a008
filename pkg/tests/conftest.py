import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from score_graphs.graphs import MusicGraph, Node, NodeWeights  # noqa: E402

FIXTURES = Path(__file__).resolve().parent / "fixtures"
BACH = FIXTURES / "bach_contrapunctus1_mm1-8.musicxml"
CORPUS = sorted(p for p in FIXTURES.iterdir() if p.suffix in (".musicxml", ".mid"))


def make_graph(edges, nodes=(), directed=False, weights=None) -> MusicGraph:
    """Graph on chord-free labelled nodes; names map to pitch-class nodes."""
    names = sorted({*nodes, *(u for u, _ in edges), *(v for _, v in edges)})
    if len(names) > 12:
        idx = {n: Node("chord", (i,)) for i, n in enumerate(names)}
    else:
        idx = {n: Node("pitch_class", i) for i, n in enumerate(names)}
    weights = weights or {}
    return MusicGraph(
        directed,
        {idx[n]: NodeWeights(Fraction(1), 1) for n in names},
        {(idx[u], idx[v]): weights.get((u, v), 1) for u, v in edges},
    )


def labelled(g: MusicGraph, names):
    """Node objects of a graph built by make_graph, in name order."""
    return dict(zip(sorted(names), g.node_list()))


@pytest.fixture
def two_triangles_bridge():
    return make_graph([("a1", "a2"), ("a2", "a3"), ("a1", "a3"), ("b1", "b2"), ("b2", "b3"), ("b1", "b3"), ("a1", "b1")])


@pytest.fixture
def bach_bytes():
    return BACH.read_bytes()


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results, key=lambda n: (n == 0, n)):
            terminalreporter.write_line(results[number])
