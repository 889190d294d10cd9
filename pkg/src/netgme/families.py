"""Parametric graph families with exact and asymptotic descriptors.

Vertex numbering, per kind:

* ``complete``, ``path``: ``0 .. n-1`` (path edges ``(i, i+1)``).
* ``star``: centre 0, leaves ``1 .. n`` (``n`` is the leaf count).
* ``balancedtree:r=R``: ``n`` vertices in heap order, parent of ``i`` is ``(i-1)//R``.
* ``dumbbell``: cliques on ``0..n-1`` and ``n..2n-1`` joined by the bridge ``(n-1, n)``.
* ``clusterchain:k=K``: ``k(n)`` cliques of size ``n`` in consecutive blocks; the last
  vertex of block ``m`` is bridged to the first vertex of block ``m+1``.
* ``hamming:k=K``: multi-indices in ``{0..n-1}^k`` numbered lexicographically,
  adjacent when they differ in exactly one coordinate.
* ``matchedchain:f=F``: ``f(n)`` cliques of size ``n``; vertex ``i`` of block ``m`` has
  index ``m*n + i`` and is joined to vertex ``i`` of block ``m+1``.

``K`` and ``F`` are cluster-count rules: ``log`` (``ceil(ln(n+1))``), ``sqrt``
(``ceil(sqrt(n))``) or a positive integer constant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .graph import Graph, degree_profile, diameter, edge_connectivity, vertex_connectivity
from .growth import BOUNDED, LINEAR, GrowthExpr

KINDS = ("complete", "path", "star", "balancedtree", "dumbbell", "clusterchain", "hamming", "matchedchain")


class FamilyError(ValueError):
    """Unknown family, bad parameters, or an index below the family minimum."""


@dataclass(frozen=True)
class ClusterCount:
    """Nondecreasing rule ``n -> number of clusters``."""

    rule: str = "log"
    value: int = 0

    def __post_init__(self) -> None:
        if self.rule not in ("log", "sqrt", "const"):
            raise FamilyError(f"unknown cluster-count rule {self.rule!r}")
        if self.rule == "const" and self.value < 1:
            raise FamilyError("constant cluster count must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "ClusterCount":
        text = text.strip().lower()
        if text in ("log", "sqrt"):
            return cls(text)
        if text.startswith("const:"):
            text = text[len("const:"):]
        try:
            return cls("const", int(text))
        except ValueError:
            raise FamilyError(f"bad cluster-count rule {text!r}") from None

    def __call__(self, n: int) -> int:
        if self.rule == "log":
            return max(1, math.ceil(math.log(n + 1)))
        if self.rule == "sqrt":
            return math.isqrt(n - 1) + 1 if n >= 1 else 1
        return self.value

    @property
    def unbounded(self) -> bool:
        return self.rule != "const"

    def __str__(self) -> str:
        return str(self.value) if self.rule == "const" else self.rule


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    arity: int = 2
    k: int = 1
    clusters: ClusterCount = field(default_factory=ClusterCount)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise FamilyError(f"unknown family {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind == "balancedtree" and self.arity < 2:
            raise FamilyError("tree arity must be >= 2")
        if self.kind == "hamming" and self.k < 1:
            raise FamilyError("Hamming dimension k must be >= 1")

    @property
    def min_index(self) -> int:
        return 1 if self.kind == "star" else 2

    def __str__(self) -> str:
        if self.kind == "balancedtree":
            return f"balancedtree:r={self.arity}"
        if self.kind == "hamming":
            return f"hamming:k={self.k}"
        if self.kind == "clusterchain":
            return f"clusterchain:k={self.clusters}"
        if self.kind == "matchedchain":
            return f"matchedchain:f={self.clusters}"
        return self.kind


def parse_family(text: str) -> FamilySpec:
    """Parse strings such as ``hamming:k=3`` or ``clusterchain:k=log``."""
    name, _, rest = text.strip().lower().partition(":")
    name = {"tree": "balancedtree", "k": "complete"}.get(name, name)
    if name not in KINDS:
        raise FamilyError(f"unknown family {name!r}; expected one of {', '.join(KINDS)}")
    opts: dict[str, str] = {}
    if rest:
        key, eq, value = rest.partition("=")
        if not eq:
            raise FamilyError(f"expected key=value after ':' in {text!r}")
        opts[key.strip()] = value.strip()
    allowed = {"balancedtree": "r", "hamming": "k", "clusterchain": "k", "matchedchain": "f"}.get(name)
    for key in opts:
        if key != allowed:
            raise FamilyError(f"family {name!r} takes no parameter {key!r}")
    try:
        if name == "balancedtree":
            return FamilySpec(name, arity=int(opts.get("r", 2)))
        if name == "hamming":
            return FamilySpec(name, k=int(opts.get("k", 2)))
    except ValueError:
        raise FamilyError(f"non-integer parameter in {text!r}") from None
    if name in ("clusterchain", "matchedchain"):
        return FamilySpec(name, clusters=ClusterCount.parse(opts.get(allowed, "log")))
    return FamilySpec(name)


def _check_index(spec: FamilySpec, n: int) -> None:
    if n < spec.min_index:
        raise FamilyError(f"{spec} needs n >= {spec.min_index}, got {n}")


def _clique(start: int, size: int) -> Iterator[tuple[int, int]]:
    return itertools.combinations(range(start, start + size), 2)


def generate(spec: FamilySpec, n: int) -> Graph:
    _check_index(spec, n)
    kind = spec.kind
    if kind == "complete":
        return Graph(n, tuple(_clique(0, n)))
    if kind == "path":
        return Graph(n, tuple((i, i + 1) for i in range(n - 1)))
    if kind == "star":
        return Graph(n + 1, tuple((0, i) for i in range(1, n + 1)))
    if kind == "balancedtree":
        return Graph(n, tuple(((i - 1) // spec.arity, i) for i in range(1, n)))
    if kind == "dumbbell":
        return Graph(2 * n, tuple(itertools.chain(_clique(0, n), _clique(n, n), [(n - 1, n)])))
    if kind == "clusterchain":
        count = spec.clusters(n)
        edges = [e for m in range(count) for e in _clique(m * n, n)]
        edges += [(m * n + n - 1, (m + 1) * n) for m in range(count - 1)]
        return Graph(n * count, tuple(edges))
    if kind == "hamming":
        return hamming_graph(spec.k, n)
    count = spec.clusters(n)
    edges = [e for m in range(count) for e in _clique(m * n, n)]
    edges += [(m * n + i, (m + 1) * n + i) for m in range(count - 1) for i in range(n)]
    return Graph(n * count, tuple(edges))


def hamming_graph(k: int, n: int) -> Graph:
    size = n**k
    edges = []
    for v in range(size):
        # flipping digit j (weight n**(k-1-j)) to a larger value gives each edge once
        for j in range(k):
            weight = n ** (k - 1 - j)
            digit = (v // weight) % n
            for new in range(digit + 1, n):
                edges.append((v, v + (new - digit) * weight))
    return Graph(size, tuple(edges))


def hamming_index(digits: tuple[int, ...], n: int) -> int:
    index = 0
    for x in digits:
        index = index * n + x
    return index


def hamming_digits(index: int, k: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(k):
        index, r = divmod(index, n)
        out.append(r)
    return tuple(reversed(out))


def hamming_paths(k: int, n: int, u: int, v: int) -> list[tuple[int, ...]]:
    """The ``n - 1`` explicit edge-disjoint u-v paths of length at most ``k + 1``.

    One path fixes the differing coordinates left to right. For the first
    differing coordinate ``c`` and every value ``x`` other than ``u[c]`` and
    ``v[c]``, another path first moves coordinate ``c`` to ``x``, fixes the
    remaining differing coordinates, and finally moves ``c`` to ``v[c]``.
    """
    if u == v:
        raise FamilyError("endpoints must differ")
    a, b = hamming_digits(u, k, n), hamming_digits(v, k, n)
    differ = [j for j in range(k) if a[j] != b[j]]

    def walk(start: list[int], coords: list[int]) -> list[int]:
        cur = list(start)
        out = []
        for j in coords:
            cur[j] = b[j]
            out.append(hamming_index(tuple(cur), n))
        return out

    paths = [tuple([u] + walk(list(a), differ))]
    first = differ[0]
    for x in range(n):
        if x in (a[first], b[first]):
            continue
        start = list(a)
        start[first] = x
        middle = [hamming_index(tuple(start), n)] + walk(start, differ[1:])
        paths.append(tuple([u] + middle + [v]))
    return paths


@dataclass(frozen=True)
class PathHypothesis:
    path_count: GrowthExpr
    length_cap: int


@dataclass(frozen=True)
class SubsetDescriptor:
    subset_size: GrowthExpr
    subset_max_degree: GrowthExpr


@dataclass(frozen=True)
class FamilyDescriptors:
    """Asymptotic descriptors; everything except ``order_fn`` is stated in N = |G_n|."""

    order_fn: GrowthExpr
    delta_min: GrowthExpr
    delta_max: GrowthExpr
    edge_connectivity: GrowthExpr | None = None
    diameter: GrowthExpr | None = None
    path_hypothesis: PathHypothesis | None = None
    subset_descriptor: SubsetDescriptor | None = None

    def to_dict(self) -> dict:
        def g(x):
            return None if x is None else x.to_dict()

        return {
            "order_fn": g(self.order_fn),
            "delta_min": g(self.delta_min),
            "delta_max": g(self.delta_max),
            "edge_connectivity": g(self.edge_connectivity),
            "diameter": g(self.diameter),
            "path_hypothesis": None
            if self.path_hypothesis is None
            else {"path_count": g(self.path_hypothesis.path_count), "length_cap": self.path_hypothesis.length_cap},
            "subset_descriptor": None
            if self.subset_descriptor is None
            else {
                "subset_size": g(self.subset_descriptor.subset_size),
                "subset_max_degree": g(self.subset_descriptor.subset_max_degree),
            },
        }


def _clustered_growth(clusters: ClusterCount):
    """(order in n, clique size n in N, cluster count in N) for block constructions."""
    if clusters.rule == "log":
        # N ~ n ln n, so n ~ N / ln N and the cluster count ~ ln N
        return GrowthExpr(1, 1, 1), GrowthExpr(1, 1, -1), GrowthExpr(1, 0, 1)
    if clusters.rule == "sqrt":
        # N ~ n^(3/2)
        return GrowthExpr(1, Fraction(3, 2), 0), GrowthExpr(1, Fraction(2, 3), 0), GrowthExpr(1, Fraction(1, 3), 0)
    c = clusters.value
    return GrowthExpr(c, 1, 0), GrowthExpr(Fraction(1, c), 1, 0), GrowthExpr.bounded(c)


def descriptors(spec: FamilySpec) -> FamilyDescriptors:
    kind = spec.kind
    if kind == "complete":
        return FamilyDescriptors(
            order_fn=LINEAR,
            delta_min=LINEAR,
            delta_max=LINEAR,
            edge_connectivity=LINEAR,
            diameter=BOUNDED,
            path_hypothesis=PathHypothesis(LINEAR, 2),
        )
    if kind == "path":
        return FamilyDescriptors(LINEAR, BOUNDED, GrowthExpr.bounded(2), BOUNDED, LINEAR)
    if kind == "star":
        return FamilyDescriptors(
            order_fn=LINEAR,
            delta_min=BOUNDED,
            delta_max=LINEAR,
            edge_connectivity=BOUNDED,
            diameter=GrowthExpr.bounded(2),
            subset_descriptor=SubsetDescriptor(LINEAR, BOUNDED),
        )
    if kind == "balancedtree":
        return FamilyDescriptors(LINEAR, BOUNDED, GrowthExpr.bounded(spec.arity + 1), BOUNDED, None)
    if kind == "dumbbell":
        return FamilyDescriptors(
            order_fn=GrowthExpr(2, 1, 0),
            delta_min=GrowthExpr(Fraction(1, 2), 1, 0),
            delta_max=GrowthExpr(Fraction(1, 2), 1, 0),
            edge_connectivity=BOUNDED,
            diameter=GrowthExpr.bounded(3),
        )
    if kind == "hamming":
        k = spec.k
        root = GrowthExpr(k, Fraction(1, k), 0)
        return FamilyDescriptors(
            order_fn=GrowthExpr(1, k, 0),
            delta_min=root,
            delta_max=root,
            edge_connectivity=root,
            diameter=GrowthExpr.bounded(k),
            path_hypothesis=PathHypothesis(GrowthExpr(1, Fraction(1, k), 0), k + 1),
        )
    order, clique, count = _clustered_growth(spec.clusters)
    if kind == "clusterchain":
        if spec.clusters.rule == "const" and spec.clusters.value == 1:
            return descriptors(FamilySpec("complete"))
        diam = GrowthExpr(2 * count.coefficient, count.power, count.log_power)
        return FamilyDescriptors(order, clique, clique, BOUNDED, diam)
    # matchedchain: clique size n bounds degrees and the edge cut between blocks
    return FamilyDescriptors(order, clique, clique, clique, count)


def exact_parameters(spec: FamilySpec, n: int) -> dict[str, int | None]:
    """Closed-form values for ``generate(spec, n)``; ``None`` where no formula is claimed."""
    _check_index(spec, n)
    kind = spec.kind
    out: dict[str, int | None]
    if kind == "complete":
        out = dict(vertex_count=n, edge_count=n * (n - 1) // 2, delta_min=n - 1, delta_max=n - 1,
                   edge_connectivity=n - 1, vertex_connectivity=n - 1, diameter=1)
    elif kind == "path":
        out = dict(vertex_count=n, edge_count=n - 1, delta_min=1, delta_max=min(2, n - 1),
                   edge_connectivity=1, vertex_connectivity=1, diameter=n - 1)
    elif kind == "star":
        out = dict(vertex_count=n + 1, edge_count=n, delta_min=1, delta_max=n,
                   edge_connectivity=1, vertex_connectivity=1, diameter=min(2, n))
    elif kind == "balancedtree":
        r = spec.arity
        dmax = max(min(r, n - 1), 1 + min(r, max(0, n - r - 1)))
        out = dict(vertex_count=n, edge_count=n - 1, delta_min=1, delta_max=dmax,
                   edge_connectivity=1, vertex_connectivity=1, diameter=None)
    elif kind == "dumbbell":
        out = dict(vertex_count=2 * n, edge_count=n * (n - 1) + 1, delta_min=n - 1, delta_max=n,
                   edge_connectivity=1, vertex_connectivity=1, diameter=3)
    elif kind == "hamming":
        k = spec.k
        out = dict(vertex_count=n**k, edge_count=n**k * k * (n - 1) // 2, delta_min=k * (n - 1),
                   delta_max=k * (n - 1), edge_connectivity=k * (n - 1), vertex_connectivity=k * (n - 1),
                   diameter=k)
    else:
        c = spec.clusters(n)
        clique_edges = c * n * (n - 1) // 2
        if c == 1:
            return dict(vertex_count=n, edge_count=clique_edges, delta_min=n - 1, delta_max=n - 1,
                        edge_connectivity=n - 1, vertex_connectivity=n - 1, diameter=1)
        if kind == "clusterchain":
            out = dict(vertex_count=n * c, edge_count=clique_edges + c - 1, delta_min=n - 1, delta_max=n,
                       edge_connectivity=1, vertex_connectivity=1, diameter=2 * c - 1)
        else:
            out = dict(vertex_count=n * c, edge_count=clique_edges + (c - 1) * n, delta_min=n,
                       delta_max=n + 1 if c >= 3 else n, edge_connectivity=n, vertex_connectivity=n,
                       diameter=c)
    return out


@dataclass
class DescriptorCheck:
    n: int
    expected: dict[str, int | None]
    measured: dict[str, int | None]
    connected: bool

    @property
    def mismatches(self) -> list[str]:
        return [key for key, want in self.expected.items() if want is not None and self.measured.get(key) != want]

    @property
    def ok(self) -> bool:
        return self.connected and not self.mismatches


@dataclass
class DescriptorReport:
    spec: FamilySpec
    checks: list[DescriptorCheck]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[DescriptorCheck]:
        return [c for c in self.checks if not c.ok]


def measure(graph: Graph, with_vertex_connectivity: bool = True) -> dict[str, int | None]:
    prof = degree_profile(graph)
    return dict(
        vertex_count=graph.vertex_count,
        edge_count=len(graph.edges),
        delta_min=prof.delta_min,
        delta_max=prof.delta_max,
        edge_connectivity=edge_connectivity(graph),
        vertex_connectivity=vertex_connectivity(graph) if with_vertex_connectivity else None,
        diameter=diameter(graph),
    )


def verify_descriptors(spec: FamilySpec, n_values) -> DescriptorReport:
    """Generate each instance, measure it with the graph routines and compare to the closed forms."""
    checks = []
    for n in n_values:
        g = generate(spec, n)
        expected = exact_parameters(spec, n)
        connected = g.is_connected()
        measured = measure(g) if connected else {}
        checks.append(DescriptorCheck(n, expected, measured, connected))
    return DescriptorReport(spec, checks)


CATALOG = (
    FamilySpec("complete"),
    FamilySpec("dumbbell"),
    FamilySpec("hamming", k=1),
    FamilySpec("hamming", k=2),
    FamilySpec("hamming", k=3),
    FamilySpec("matchedchain"),
    FamilySpec("path"),
    FamilySpec("star"),
    FamilySpec("balancedtree", arity=2),
    FamilySpec("clusterchain"),
)
