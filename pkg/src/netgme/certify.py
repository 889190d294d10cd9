"""Finite-size biseparability and GME certificates, family verdicts and cluster partitions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import __version__
from .families import FamilyDescriptors, FamilySpec, descriptors
from .graph import (
    DisconnectedGraphError,
    Graph,
    GraphError,
    diameter,
    edge_connectivity,
    greedy_disjoint_paths,
    min_edge_cut,
)
from .growth import LINEAR, LOGARITHMIC, is_big_omega, is_little_o, is_little_omega, log_of
from .isotropic import (
    HASHING,
    ExponentModel,
    IsotropicParams,
    bs_fidelity_cap,
    cascade_visibility,
    log_distillation_error,
)

REL_TOL = 1e-12


class CertificateConflictError(RuntimeError):
    """Both a biseparability and a GME certificate were produced for the same input."""


class ClassificationConflictError(RuntimeError):
    """An AGME rule and an ABS rule fired for the same family."""


# biseparability


def vertex_factor(degree: int, d: int, p: float) -> float:
    """Worst case over ``k = 1..degree`` of ``(d p / (1-p))**k * (2**degree - 1)``."""
    if degree < 1:
        raise ValueError("vertex must have at least one edge")
    if p >= 1.0:
        return math.inf
    ratio = d * p / (1.0 - p)
    k = degree if ratio >= 1.0 else 1
    return ratio**k * (2**degree - 1)


@dataclass(frozen=True)
class BiseparabilityCertificate:
    kind: str
    params: IsotropicParams
    subset: tuple[int, ...] = ()
    per_vertex_margin: dict[int, float] = field(default_factory=dict)
    factors: dict[int, float] = field(default_factory=dict)

    @property
    def min_margin(self) -> float | None:
        return min(self.per_vertex_margin.values()) if self.per_vertex_margin else None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": {"d": self.params.d, "p": self.params.p},
            "subset": list(self.subset),
            "per_vertex": [
                {"vertex": v, "factor": self.factors[v], "margin": self.per_vertex_margin[v]} for v in self.subset
            ],
            "citations": [
                "isotropic links at or below visibility 1/(d+1) are separable"
                if self.kind == "TrivialAllLinksSeparable"
                else "degree construction: each subset vertex satisfies (d p/(1-p))^k (2^deg - 1) <= |subset|"
            ],
            "version": __version__,
        }


def _require_connected(graph: Graph) -> None:
    if graph.vertex_count < 2:
        raise GraphError("certificates need at least two vertices")
    if not graph.is_connected():
        raise DisconnectedGraphError("graph is disconnected")


def bs_certificate(graph: Graph, params: IsotropicParams) -> BiseparabilityCertificate | None:
    """Constructive biseparability certificate, or ``None`` when the construction does not apply.

    Candidate vertices are scanned by ascending factor (ties by index) and kept
    only if no neighbour was kept before, so the subset is independent and no
    term of the expansion is borrowed by two adjacent subset vertices. The
    certificate uses the longest prefix of that list whose last factor is at
    most its length.
    """
    _require_connected(graph)
    if params.p <= params.threshold:
        return BiseparabilityCertificate("TrivialAllLinksSeparable", params)
    factor = {v: vertex_factor(graph.degree(v), params.d, params.p) for v in range(graph.vertex_count)}
    picked: list[int] = []
    blocked: set[int] = set()
    for v in sorted(factor, key=lambda x: (factor[x], x)):
        if v in blocked or math.isinf(factor[v]):
            continue
        picked.append(v)
        blocked.add(v)
        blocked.update(graph.adjacency[v])
    size = 0
    for m in range(1, len(picked) + 1):
        if factor[picked[m - 1]] <= m * (1 + REL_TOL):
            size = m
    if size == 0:
        return None
    subset = tuple(sorted(picked[:size]))
    return BiseparabilityCertificate(
        "DegreeConstruction",
        params,
        subset,
        {v: size - factor[v] for v in subset},
        {v: factor[v] for v in subset},
    )


# GME


@dataclass(frozen=True)
class PairBound:
    path_count: int
    length_cap: int
    delivered_visibility: float
    epsilon: float
    log_epsilon: float


@dataclass(frozen=True)
class GmeCertificate:
    params: IsotropicParams
    per_pair: dict[tuple[int, int], PairBound]
    multiplicity: dict[tuple[int, int], int]
    average_fidelity_lower_bound: float
    cap: float
    exponent_model: str

    def to_dict(self) -> dict:
        return {
            "kind": "GmeCertificate",
            "parameters": {"d": self.params.d, "p": self.params.p},
            "per_pair": [
                {
                    "pair": list(pair),
                    "multiplicity": self.multiplicity[pair],
                    "path_count": b.path_count,
                    "length_cap": b.length_cap,
                    "delivered_visibility": b.delivered_visibility,
                    "epsilon": b.epsilon,
                    "log_epsilon": b.log_epsilon,
                }
                for pair, b in sorted(self.per_pair.items())
            ],
            "average_fidelity_lower_bound": self.average_fidelity_lower_bound,
            "cap": self.cap,
            "exponent_model": self.exponent_model,
            "model_conditional": True,
            "validity": "conditional on a positive distillation exponent under the chosen model",
            "citations": [
                "LOCC maps on a biseparable N-party state give average pairwise fidelity at most 1 - 1/N",
                "m edge-disjoint paths of length C deliver m links of visibility p^(2^(C-1))",
            ],
            "version": __version__,
        }


def pair_bounds(
    graph: Graph,
    u: int,
    v: int,
    params: IsotropicParams,
    caps: Sequence[int],
    model: ExponentModel = HASHING,
) -> PairBound:
    """Best error bound for one pair over the length caps; ties keep the smaller cap."""
    bundle = greedy_disjoint_paths(graph, u, v, max(caps))
    lengths = bundle.lengths
    best = None
    for cap in sorted(caps):
        m = sum(1 for x in lengths if x <= cap)
        q = cascade_visibility(params.p, cap)
        log_eps = 0.0 if m == 0 else log_distillation_error(m, IsotropicParams(params.d, q), model)
        if best is None or log_eps < best.log_epsilon:
            best = PairBound(m, cap, q, math.exp(log_eps), log_eps)
    return best


def gme_certificate(
    graph: Graph,
    params: IsotropicParams,
    caps: Iterable[int] | None = None,
    model: ExponentModel = HASHING,
    pair_orbits: Sequence[tuple[tuple[int, int], int]] | None = None,
) -> GmeCertificate | None:
    """Certificate that the average distillable pair fidelity beats the biseparable cap.

    ``caps`` defaults to ``diameter .. diameter + 3``. ``pair_orbits`` lets a
    caller with a symmetric graph evaluate one representative pair per orbit
    with its multiplicity instead of every pair.
    """
    if graph.vertex_count < 2 or not graph.is_connected():
        return None
    if params.p <= params.threshold:
        return None
    n = graph.vertex_count
    if caps is None:
        diam = diameter(graph)
        caps = range(diam, diam + 4)
    caps = sorted(set(caps))
    if not caps or caps[0] < 1:
        raise ValueError("length caps must be positive")
    if pair_orbits is None:
        pair_orbits = [((u, v), 1) for u in range(n) for v in range(u + 1, n)]
    total = sum(mult for _, mult in pair_orbits)
    if total != n * (n - 1) // 2:
        raise ValueError(f"pair multiplicities sum to {total}, expected {n * (n - 1) // 2}")
    per_pair = {}
    multiplicity = {}
    eps_sum = 0.0
    for (u, v), mult in pair_orbits:
        key = (min(u, v), max(u, v))
        bound = pair_bounds(graph, key[0], key[1], params, caps, model)
        per_pair[key] = bound
        multiplicity[key] = mult
        eps_sum += mult * bound.epsilon
    fidelity = 1.0 - eps_sum / total
    cap = bs_fidelity_cap(n)
    if fidelity <= cap:
        return None
    return GmeCertificate(params, per_pair, multiplicity, fidelity, cap, str(model))


def complete_graph_orbits(n: int) -> list[tuple[tuple[int, int], int]]:
    return [((0, 1), n * (n - 1) // 2)]


@dataclass(frozen=True)
class ConflictReport:
    bs: BiseparabilityCertificate | None
    gme: GmeCertificate | None


def certificate_conflict_check(
    graph: Graph, params: IsotropicParams, model: ExponentModel = HASHING
) -> ConflictReport:
    bs = bs_certificate(graph, params)
    gme = gme_certificate(graph, params, model=model)
    if bs is not None and gme is not None:
        raise CertificateConflictError(
            f"both certificates issued for N={graph.vertex_count}, d={params.d}, p={params.p}"
        )
    return ConflictReport(bs, gme)


# critical visibility bracket


def visibility_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive grid ``start, start+step, ... <= stop`` rounded to 12 decimals."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    if stop < start:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


@dataclass(frozen=True)
class Bracket:
    p_lo: float
    p_hi: float
    refined_by_oracle: bool
    exponent_model: str


def critical_visibility_bracket(
    graph: Graph,
    d: int,
    grid: Sequence[float] | float = 0.01,
    model: ExponentModel = HASHING,
) -> Bracket:
    """Grid bracket around the critical visibility.

    ``grid`` is either an explicit list of visibilities or a step size for a
    uniform grid on [0, 1]. A single-edge graph is refined with the dense PPT
    test, which is exact for one isotropic link.
    """
    _require_connected(graph)
    points = sorted(visibility_grid(0.0, 1.0, grid) if isinstance(grid, (int, float)) else grid)
    p_lo = 1.0 / (d + 1)
    p_hi = 1.0
    for p in points:
        if bs_certificate(graph, IsotropicParams(d, p)) is not None:
            p_lo = max(p_lo, p)
    for p in points:
        if gme_certificate(graph, IsotropicParams(d, p), model=model) is not None:
            p_hi = p
            break
    refined = False
    if len(graph.edges) == 1:
        from .exact import locate_ppt_threshold

        _, p_hi = locate_ppt_threshold(d)
        refined = True
    return Bracket(p_lo, max(p_hi, p_lo) if refined else p_hi, refined, str(model))


# family classification


RULES = {
    "R1": ("AGME", "minimum degree in Omega(N) implies AGME"),
    "R2": ("AGME", "edge-connectivity in Omega(N) implies AGME"),
    "R3": ("AGME", "omega(log N) edge-disjoint paths of bounded length between every pair imply AGME"),
    "R4": ("ABS", "maximum degree in o(log N) implies ABS"),
    "R5": ("ABS", "a vertex subset V' of diverging size with maximum degree in o(log |V'|) implies ABS"),
}

FAMILY_RULES = {
    "dumbbell": ("AGME", "two cliques joined by one bridge are AGME although lambda = kappa = 1"),
    "clusterchain": (
        "ABS",
        "cliques chained by single bridges with a diverging, sublinear cluster count are ABS",
    ),
    "matchedchain": (
        "AGME",
        "cliques chained by perfect matchings with a slowly diverging cluster count are AGME with unbounded diameter",
    ),
}


@dataclass(frozen=True)
class RuleHit:
    rule: str
    verdict: str
    citation: str


@dataclass(frozen=True)
class FamilyVerdict:
    verdict: str
    rules_fired: tuple[RuleHit, ...]
    descriptors_used: FamilyDescriptors
    family: str
    d: int
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "d": self.d,
            "verdict": self.verdict,
            "rules_fired": [{"rule": h.rule, "verdict": h.verdict, "citation": h.citation} for h in self.rules_fired],
            "descriptors": self.descriptors_used.to_dict(),
            "notes": list(self.notes),
            "version": __version__,
        }


def classify_family(spec: FamilySpec, d: int = 2) -> FamilyVerdict:
    """Asymptotic verdict from symbolic descriptors; the first rule that fires decides."""
    if d < 2:
        raise ValueError("d must be >= 2")
    desc = descriptors(spec)
    fired: list[str] = []
    if is_big_omega(desc.delta_min, LINEAR):
        fired.append("R1")
    if desc.edge_connectivity is not None and is_big_omega(desc.edge_connectivity, LINEAR):
        fired.append("R2")
    if desc.path_hypothesis is not None and is_little_omega(desc.path_hypothesis.path_count, LOGARITHMIC):
        fired.append("R3")
    if is_little_o(desc.delta_max, LOGARITHMIC):
        fired.append("R4")
    sub = desc.subset_descriptor
    if sub is not None and sub.subset_size.power > 0 and is_little_o(sub.subset_max_degree, log_of(sub.subset_size)):
        fired.append("R5")
    hits = [RuleHit(r, *RULES[r]) for r in fired]
    notes: list[str] = []
    meta = FAMILY_RULES.get(spec.kind)
    if meta is not None and (spec.kind == "dumbbell" or spec.clusters.unbounded):
        hits.append(RuleHit("R6", *meta))
        if spec.kind == "matchedchain":
            notes.append("the AGME guarantee requires a sufficiently slowly growing cluster count")
    verdicts = {h.verdict for h in hits}
    if len(verdicts) > 1:
        raise ClassificationConflictError(f"{spec}: rules {[h.rule for h in hits]} disagree")
    verdict = hits[0].verdict if hits else "Unknown"
    return FamilyVerdict(verdict, tuple(hits), desc, str(spec), d, tuple(notes))


# recursive cluster partition


@dataclass(frozen=True)
class SplitStep:
    size: int
    edge_connectivity: int
    threshold: float
    depth: int
    split: bool


@dataclass(frozen=True)
class ClusterPartition:
    clusters: tuple[frozenset[int], ...]
    cut_edges: tuple[tuple[int, int], ...]
    split_trace: tuple[SplitStep, ...]
    K_bound: int


def cluster_partition(graph: Graph, tau: float, max_depth: int | None = None) -> ClusterPartition:
    """Split along minimum edge cuts until every piece has edge-connectivity >= tau * size."""
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau must lie in (0, 1], got {tau}")
    _require_connected(graph)
    if max_depth is None:
        max_depth = math.ceil(1.0 / tau)
    clusters: list[frozenset[int]] = []
    cuts: list[tuple[int, int]] = []
    trace: list[SplitStep] = []
    stack: list[tuple[list[int], int]] = [(list(range(graph.vertex_count)), 0)]
    while stack:
        verts, depth = stack.pop()
        if len(verts) == 1:
            clusters.append(frozenset(verts))
            continue
        sub, mapping = graph.induced(verts)
        back = {new: old for old, new in mapping.items()}
        lam = edge_connectivity(sub)
        threshold = tau * len(verts)
        split = lam < threshold and depth < max_depth
        trace.append(SplitStep(len(verts), lam, threshold, depth, split))
        if not split:
            clusters.append(frozenset(verts))
            continue
        cut = min_edge_cut(sub)
        cuts.extend(tuple(sorted((back[a], back[b]))) for a, b in cut.edges)
        inside = sorted(back[x] for x in cut.side)
        outside = sorted(back[x] for x in range(len(verts)) if x not in cut.side)
        stack.append((outside, depth + 1))
        stack.append((inside, depth + 1))
    clusters.sort(key=min)
    return ClusterPartition(tuple(clusters), tuple(sorted(cuts)), tuple(trace), 2**max_depth)


def f_c_recursion(c: float, k: int) -> float:
    """``c / (1 - k c)``: the connectivity fraction after ``k`` recursive splits."""
    if not 0.0 < c <= 0.5:
        raise ValueError(f"c must lie in (0, 1/2], got {c}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k * c >= 1.0:
        raise ValueError(f"k*c = {k * c} must be < 1")
    return c / (1.0 - k * c)
