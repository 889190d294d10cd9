"""Simple undirected graphs and the connectivity quantities the certificates consume.

Vertices are dense 0-based integers and edges are stored canonically as sorted
``(u, v)`` pairs with ``u < v``; the position of an edge in ``Graph.edges`` is
its edge index everywhere in the package.

Unit-capacity flows replace every undirected edge with two opposing arcs of
capacity one and are solved with scipy's Dinic implementation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order, connected_components, maximum_flow, shortest_path

Edge = tuple[int, int]


class GraphError(ValueError):
    """Malformed graph data or an invalid query on a graph."""


class DisconnectedGraphError(GraphError):
    """The operation requires a connected graph."""


def _canonical(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Finite simple undirected graph on vertices ``0 .. vertex_count - 1``."""

    vertex_count: int
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise GraphError(f"vertex_count must be positive, got {self.vertex_count}")
        seen: set[Edge] = set()
        for raw in self.edges:
            u, v = int(raw[0]), int(raw[1])
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.vertex_count and 0 <= v < self.vertex_count):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{self.vertex_count - 1}")
            e = _canonical(u, v)
            if e in seen:
                raise GraphError(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", tuple(sorted(seen)))

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(vertex_count, tuple((int(a), int(b)) for a, b in edges))

    def __len__(self) -> int:
        return self.vertex_count

    def __repr__(self) -> str:
        return f"Graph(vertex_count={self.vertex_count}, edge_count={len(self.edges)})"

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def incident(self) -> tuple[tuple[int, ...], ...]:
        """Edge indices adjacent to each vertex, ascending."""
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, (u, v) in enumerate(self.edges):
            inc[u].append(i)
            inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return _canonical(u, v) in self.edge_index

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise GraphError(f"vertex {v} outside 0..{self.vertex_count - 1}")

    @cached_property
    def _arcs(self) -> sp.csr_matrix:
        n = self.vertex_count
        if not self.edges:
            return sp.csr_matrix((n, n), dtype=np.int32)
        e = np.asarray(self.edges, dtype=np.int64)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        data = np.ones(rows.size, dtype=np.int32)
        return sp.csr_matrix((data, (rows, cols)), shape=(n, n))

    @cached_property
    def _split_arcs(self) -> sp.csr_matrix:
        # vertex x -> in-node x, out-node x + n; internal arc has capacity 1
        n = self.vertex_count
        big = n + 1
        rows = list(range(n))
        cols = [x + n for x in range(n)]
        data = [1] * n
        for u, v in self.edges:
            rows += [u + n, v + n]
            cols += [v, u]
            data += [big, big]
        return sp.csr_matrix(
            (np.asarray(data, dtype=np.int32), (rows, cols)), shape=(2 * n, 2 * n)
        )

    def components(self) -> list[list[int]]:
        count, labels = connected_components(self._arcs, directed=False)
        groups: list[list[int]] = [[] for _ in range(count)]
        for v, lab in enumerate(labels):
            groups[lab].append(v)
        return sorted(groups)

    def is_connected(self) -> bool:
        if self.vertex_count == 1:
            return True
        count, _ = connected_components(self._arcs, directed=False)
        return count == 1

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", dict[int, int]]:
        """Induced subgraph on ``vertices`` with the order-preserving old->new map."""
        keep = sorted(set(vertices))
        for v in keep:
            self.check_vertex(v)
        mapping = {old: new for new, old in enumerate(keep)}
        edges = [(mapping[u], mapping[v]) for u, v in self.edges if u in mapping and v in mapping]
        return Graph(len(keep), tuple(edges)), mapping


@dataclass(frozen=True)
class DegreeProfile:
    degree_sequence: tuple[int, ...]
    delta_min: int
    delta_max: int


@dataclass(frozen=True)
class PathBundle:
    """Pairwise edge-disjoint paths between two endpoints."""

    endpoints: Edge
    paths: tuple[tuple[int, ...], ...]
    max_length: int

    def __len__(self) -> int:
        return len(self.paths)

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(len(p) - 1 for p in self.paths)

    def is_valid(self, graph: Graph) -> bool:
        u, v = self.endpoints
        used: set[Edge] = set()
        for path in self.paths:
            if path[0] != u or path[-1] != v or len(path) - 1 > self.max_length:
                return False
            for a, b in zip(path, path[1:]):
                e = _canonical(a, b)
                if e not in graph.edge_index or e in used:
                    return False
                used.add(e)
        return True


@dataclass(frozen=True)
class EdgeCut:
    """A minimum edge cut; ``side`` is the part containing the flow source."""

    size: int
    edges: tuple[Edge, ...]
    side: frozenset[int]
    connected: bool


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list text format.

    A header line ``# n=<N>`` is mandatory; any other line starting with ``#``
    is a comment. Every remaining non-blank line holds one whitespace-separated
    ``u v`` pair of 0-based vertex indices.
    """
    n: int | None = None
    edges: list[Edge] = []
    seen: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip().replace(" ", "")
            if body.startswith("n="):
                if n is not None:
                    raise GraphError(f"line {lineno}: repeated vertex-count header")
                try:
                    n = int(body[2:])
                except ValueError:
                    raise GraphError(f"line {lineno}: malformed header {raw!r}") from None
                if n < 1:
                    raise GraphError(f"line {lineno}: vertex count must be positive")
            continue
        if n is None:
            raise GraphError(f"line {lineno}: edge before the '# n=<N>' header")
        parts = line.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: non-integer endpoint in {raw!r}") from None
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"line {lineno}: endpoint out of range 0..{n - 1}")
        e = _canonical(u, v)
        if e in seen:
            raise GraphError(f"line {lineno}: duplicate edge {e} (first on line {seen[e]})")
        seen[e] = lineno
        edges.append(e)
    if n is None:
        raise GraphError("missing '# n=<N>' header")
    return Graph(n, tuple(edges))


def format_edge_list(graph: Graph, comment: str | None = None) -> str:
    lines = [f"# n={graph.vertex_count}"]
    if comment:
        lines.append(f"# {comment}")
    lines += [f"{u} {v}" for u, v in graph.edges]
    return "\n".join(lines) + "\n"


def degree_profile(graph: Graph) -> DegreeProfile:
    seq = tuple(len(nb) for nb in graph.adjacency)
    return DegreeProfile(seq, min(seq), max(seq))


def _require_connected(graph: Graph) -> None:
    if not graph.is_connected():
        raise DisconnectedGraphError("graph is disconnected")


def diameter(graph: Graph, chunk: int = 512) -> int:
    """Exact diameter by breadth-first search from every source."""
    _require_connected(graph)
    n = graph.vertex_count
    if n == 1:
        return 0
    best = 0
    for start in range(0, n, chunk):
        idx = np.arange(start, min(n, start + chunk))
        dist = shortest_path(graph._arcs, directed=False, unweighted=True, indices=idx)
        best = max(best, int(dist.max()))
    return best


def distances_from(graph: Graph, source: int) -> list[int]:
    """BFS distances from ``source``; unreachable vertices get -1."""
    graph.check_vertex(source)
    dist = [-1] * graph.vertex_count
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in graph.adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def _flow(graph: Graph, s: int, t: int):
    return maximum_flow(graph._arcs, s, t, method="dinic")


def pair_edge_connectivity(graph: Graph, u: int, v: int) -> int:
    """Maximum number of edge-disjoint u-v paths (local edge-connectivity)."""
    graph.check_vertex(u)
    graph.check_vertex(v)
    if u == v:
        raise GraphError("endpoints must differ")
    return int(_flow(graph, u, v).flow_value)


def _dominating_set(graph: Graph) -> list[int]:
    dominated = [False] * graph.vertex_count
    chosen = []
    for v in range(graph.vertex_count):
        if not dominated[v]:
            chosen.append(v)
            dominated[v] = True
            for w in graph.adjacency[v]:
                dominated[w] = True
    return chosen


def _source_side(graph: Graph, s: int, flow) -> frozenset[int]:
    residual = (graph._arcs - flow.flow).tocsr()
    residual.data = (residual.data > 0).astype(np.int8)
    residual.eliminate_zeros()
    order = breadth_first_order(residual, s, directed=True, return_predecessors=False)
    return frozenset(int(x) for x in order)


def min_edge_cut(graph: Graph) -> EdgeCut:
    """A minimum edge cut together with its size.

    If the graph is disconnected the cut is empty, ``size`` is 0 and
    ``connected`` is False. Otherwise flows are pushed from the first vertex of
    a greedy dominating set to the remaining ones; when the global cut is
    smaller than the minimum degree both sides of every minimum cut contain a
    dominating vertex, so these flows suffice. Ties prefer a flow cut over the
    star of a minimum-degree vertex.
    """
    n = graph.vertex_count
    if n < 2:
        raise GraphError("edge-connectivity needs at least two vertices")
    if not graph.is_connected():
        comp = graph.components()[0]
        return EdgeCut(0, (), frozenset(comp), False)
    prof = degree_profile(graph)
    dom = _dominating_set(graph)
    s = dom[0]
    best_val, best_t, best_flow = None, None, None
    for t in dom[1:]:
        res = _flow(graph, s, t)
        if best_val is None or res.flow_value < best_val:
            best_val, best_t, best_flow = int(res.flow_value), t, res
    if best_val is not None and best_val <= prof.delta_min:
        side = _source_side(graph, s, best_flow)
    else:
        v = prof.degree_sequence.index(prof.delta_min)
        best_val = prof.delta_min
        side = frozenset(x for x in range(n) if x != v)
    cut = tuple(e for e in graph.edges if (e[0] in side) != (e[1] in side))
    assert len(cut) == best_val
    return EdgeCut(best_val, cut, side, True)


def edge_connectivity(graph: Graph) -> int:
    """Global edge-connectivity; 0 for a disconnected graph (see ``min_edge_cut``)."""
    return min_edge_cut(graph).size


def _local_vertex_connectivity(graph: Graph, s: int, t: int) -> int:
    n = graph.vertex_count
    return int(maximum_flow(graph._split_arcs, s + n, t, method="dinic").flow_value)


def vertex_connectivity(graph: Graph) -> int:
    """Vertex-connectivity; complete graphs get ``n - 1`` by convention.

    Esfahanian-Hakimi scheme: with ``v`` a minimum-degree vertex, some minimum
    separator either misses ``v`` (so it splits ``v`` from a non-neighbour) or
    splits two non-adjacent neighbours of ``v``.
    """
    n = graph.vertex_count
    _require_connected(graph)
    if len(graph.edges) == n * (n - 1) // 2:
        return n - 1
    v = min(range(n), key=graph.degree)
    best = graph.degree(v)
    nbrs = graph.adjacency[v]
    for w in range(n):
        if w != v and w not in nbrs:
            best = min(best, _local_vertex_connectivity(graph, v, w))
    ordered = sorted(nbrs)
    for i, x in enumerate(ordered):
        for y in ordered[i + 1:]:
            if not graph.has_edge(x, y):
                best = min(best, _local_vertex_connectivity(graph, x, y))
    return best


def _lex_shortest_path(adj: list[set[int]], u: int, v: int, cap: int | None) -> list[int] | None:
    # BFS layers from v; stop once u is reached since earlier layers are then final
    dist = {v: 0}
    frontier = [v]
    depth = 0
    while u not in dist:
        if not frontier or (cap is not None and depth >= cap):
            return None
        depth += 1
        nxt = []
        for x in frontier:
            for y in adj[x]:
                if y not in dist:
                    dist[y] = depth
                    nxt.append(y)
        frontier = nxt
    path = [u]
    cur = u
    while cur != v:
        want = dist[cur] - 1
        cur = min(y for y in adj[cur] if dist.get(y, -1) == want)
        path.append(cur)
    return path


def greedy_disjoint_paths(graph: Graph, u: int, v: int, length_cap: int | None = None) -> PathBundle:
    """Repeatedly take a shortest u-v path and delete its edges.

    Among shortest paths the lexicographically smallest vertex sequence from
    ``u`` is chosen, which makes the output deterministic. Extraction stops
    when no path remains or the next shortest one is longer than
    ``length_cap``. Because deleting edges never shortens distances, the
    lengths come out nondecreasing, so capping at ``C`` yields a prefix of the
    uncapped run. The count is a lower bound on the local edge-connectivity.
    """
    graph.check_vertex(u)
    graph.check_vertex(v)
    if u == v:
        raise GraphError("endpoints must differ")
    adj = [set(nb) for nb in graph.adjacency]
    paths = []
    while True:
        path = _lex_shortest_path(adj, u, v, length_cap)
        if path is None:
            break
        paths.append(tuple(path))
        for a, b in zip(path, path[1:]):
            adj[a].discard(b)
            adj[b].discard(a)
    if length_cap is not None:
        max_length = length_cap
    else:
        max_length = max((len(p) - 1 for p in paths), default=0)
    return PathBundle((u, v), tuple(paths), max_length)


def erdos_diameter_bound(graph: Graph) -> int:
    """Upper bound ``floor(3N / (delta_min + 1)) - 1`` on the diameter of a connected graph."""
    prof = degree_profile(graph)
    if prof.delta_min < 2:
        raise GraphError(f"bound needs minimum degree >= 2, got {prof.delta_min}")
    return 3 * graph.vertex_count // (prof.delta_min + 1) - 1


def maximal_edge_connectivity_check(graph: Graph) -> bool:
    """True when ``delta_min >= floor(N/2)``, which forces edge-connectivity = delta_min."""
    return degree_profile(graph).delta_min >= graph.vertex_count // 2


def subgraph(
    graph: Graph, delete_edges: Iterable[Sequence[int]] = (), delete_isolated: bool = False
) -> tuple[Graph, dict[int, int]]:
    """Delete edges, optionally dropping every vertex whose edges were all deleted.

    Returns the new graph and the old->new vertex map (identity when no vertex
    is removed). Re-indexing preserves vertex order, so canonical edge order is
    preserved as well.
    """
    drop: set[Edge] = set()
    for raw in delete_edges:
        e = _canonical(int(raw[0]), int(raw[1]))
        if e not in graph.edge_index:
            raise GraphError(f"unknown edge {e}")
        drop.add(e)
    kept = [e for e in graph.edges if e not in drop]
    if not delete_isolated:
        return Graph(graph.vertex_count, tuple(kept)), {v: v for v in range(graph.vertex_count)}
    alive = sorted({x for e in kept for x in e})
    if not alive:
        raise GraphError("deleting these edges removes every vertex")
    mapping = {old: new for new, old in enumerate(alive)}
    return Graph(len(alive), tuple((mapping[a], mapping[b]) for a, b in kept)), mapping
