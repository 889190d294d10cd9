from __future__ import annotations

import random

import networkx as nx
import pytest

from netgme.graph import Graph


def from_nx(g: nx.Graph) -> Graph:
    mapping = {v: i for i, v in enumerate(sorted(g.nodes))}
    return Graph(len(mapping), tuple((mapping[u], mapping[v]) for u, v in g.edges))


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.vertex_count))
    h.add_edges_from(g.edges)
    return h


def small_connected_graphs() -> list[Graph]:
    """Every connected graph on 2..7 vertices, up to isomorphism."""
    return [from_nx(g) for g in nx.graph_atlas_g() if g.number_of_nodes() >= 2 and nx.is_connected(g)]


def random_connected_graphs(count: int, max_vertices: int = 40, seed: int = 7) -> list[Graph]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(8, max_vertices)
        density = rng.uniform(0.08, 0.6)
        g = nx.gnp_random_graph(n, density, seed=rng.randrange(2**31))
        if nx.is_connected(g):
            out.append(from_nx(g))
    return out


@pytest.fixture(scope="session")
def atlas() -> list[Graph]:
    return small_connected_graphs()


@pytest.fixture(scope="session")
def random_graphs() -> list[Graph]:
    return random_connected_graphs(200)


def cycle(n: int) -> Graph:
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


def complete(n: int) -> Graph:
    return Graph(n, tuple((i, j) for i in range(n) for j in range(i + 1, n)))
