"""Dense density-matrix oracle for small isotropic networks.

Every subsystem carries a key ``(party, edge)`` where ``edge`` is the canonical
``(u, v)`` pair the subsystem belongs to. States built from a graph order their
subsystems by party, then by edge, which is also the order used throughout
this module when layouts are rebuilt.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph
from .isotropic import IsotropicParams

Key = tuple[int, tuple[int, int]]

DEFAULT_DIM_CAP = 2**12
TOL = 1e-10


class DimensionCapError(ValueError):
    """The requested dense matrix exceeds the configured dimension cap."""


class LayoutError(ValueError):
    """Unknown subsystem label or a state of the wrong shape for the operation."""


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True, eq=False)
class DenseState:
    """Density matrix with one ``(party, edge)`` key and dimension per tensor factor."""

    matrix: np.ndarray
    keys: tuple[Key, ...]
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "keys", tuple((int(a), (int(e[0]), int(e[1]))) for a, e in self.keys))
        object.__setattr__(self, "dims", tuple(int(x) for x in self.dims))
        if len(self.keys) != len(self.dims):
            raise LayoutError("one dimension per subsystem key is required")
        if len(set(self.keys)) != len(self.keys):
            raise LayoutError("subsystem keys must be unique")
        total = int(np.prod(self.dims)) if self.dims else 1
        if m.shape != (total, total):
            raise LayoutError(f"matrix shape {m.shape} does not match layout dimension {total}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def parties(self) -> tuple[int, ...]:
        return tuple(sorted({a for a, _ in self.keys}))

    def invariant_violations(self, tol: float = TOL) -> list[str]:
        m = self.matrix
        out = []
        if abs(np.trace(m) - 1.0) > tol:
            out.append(f"trace {np.trace(m).real:.3e} != 1")
        if np.abs(m - m.conj().T).max(initial=0.0) > tol:
            out.append("not Hermitian")
        if m.size and np.linalg.eigvalsh(_hermitize(m)).min() < -tol:
            out.append("negative eigenvalue")
        return out

    def is_valid(self, tol: float = TOL) -> bool:
        return not self.invariant_violations(tol)

    def resolve(self, labels: Iterable) -> list[int]:
        """Positions of the subsystems named by ``labels`` (party ints or ``(party, edge)`` keys)."""
        out: set[int] = set()
        for lab in labels:
            if isinstance(lab, (int, np.integer)):
                hits = [i for i, (a, _) in enumerate(self.keys) if a == lab]
            else:
                a, e = lab
                key = (int(a), (int(e[0]), int(e[1])))
                hits = [i for i, k in enumerate(self.keys) if k == key]
            if not hits:
                raise LayoutError(f"unknown subsystem label {lab!r}")
            out.update(hits)
        return sorted(out)

    def permuted(self, order: Sequence[int]) -> "DenseState":
        order = list(order)
        n = len(self.dims)
        t = self.matrix.reshape(self.dims + self.dims)
        t = t.transpose(order + [n + i for i in order])
        dims = tuple(self.dims[i] for i in order)
        total = int(np.prod(dims)) if dims else 1
        return DenseState(t.reshape(total, total), tuple(self.keys[i] for i in order), dims)

    def canonical(self) -> "DenseState":
        order = sorted(range(len(self.keys)), key=lambda i: self.keys[i])
        return self.permuted(order)

    def allclose(self, other: "DenseState", tol: float = TOL) -> bool:
        return self.keys == other.keys and self.dims == other.dims and max_abs_diff(self, other) <= tol


def max_abs_diff(a: DenseState, b: DenseState) -> float:
    if a.matrix.shape != b.matrix.shape:
        return float("inf")
    return float(np.abs(a.matrix - b.matrix).max(initial=0.0))


def _check_cap(dim: int, dim_cap: int) -> None:
    if dim > dim_cap:
        raise DimensionCapError(f"dense dimension {dim} exceeds cap {dim_cap}")


def max_ent_vector(d: int) -> np.ndarray:
    v = np.zeros(d * d, dtype=complex)
    v[:: d + 1] = 1.0
    return v / np.sqrt(d)


def isotropic_matrix(d: int, p: float) -> np.ndarray:
    phi = max_ent_vector(d)
    return p * np.outer(phi, phi.conj()) + (1.0 - p) * np.eye(d * d) / d**2


def build_isotropic(params: IsotropicParams, dim_cap: int = DEFAULT_DIM_CAP) -> DenseState:
    d = params.d
    _check_cap(d * d, dim_cap)
    return DenseState(isotropic_matrix(d, params.p), ((0, (0, 1)), (1, (0, 1))), (d, d))


def network_keys(graph: Graph) -> list[Key]:
    return sorted((x, e) for e in graph.edges for x in e)


def _edge_factors(graph: Graph, d: int, factors: Sequence[np.ndarray], dim_cap: int) -> DenseState:
    """Tensor one ``d^2 x d^2`` factor per edge and move subsystems into canonical order."""
    _check_cap(d ** (2 * len(graph.edges)), dim_cap)
    if not graph.edges:
        raise LayoutError("graph has no edges")
    mat = factors[0]
    for f in factors[1:]:
        mat = np.kron(mat, f)
    keys = tuple(k for e in graph.edges for k in ((e[0], e), (e[1], e)))
    return DenseState(mat, keys, (d,) * len(keys)).canonical()


def build_network_state(graph: Graph, params: IsotropicParams, dim_cap: int = DEFAULT_DIM_CAP) -> DenseState:
    """One isotropic state per edge, subsystems grouped by party."""
    rho = isotropic_matrix(params.d, params.p)
    return _edge_factors(graph, params.d, [rho] * len(graph.edges), dim_cap)


def partial_trace(state: DenseState, labels: Iterable) -> DenseState:
    """Trace out the subsystems named by ``labels``; tracing everything leaves a 1x1 state."""
    gone = state.resolve(labels)
    keep = [i for i in range(len(state.dims)) if i not in gone]
    perm = state.permuted(keep + gone)
    kd = int(np.prod([state.dims[i] for i in keep])) if keep else 1
    td = int(np.prod([state.dims[i] for i in gone])) if gone else 1
    reduced = np.einsum("aibi->ab", perm.matrix.reshape(kd, td, kd, td))
    return DenseState(reduced, tuple(state.keys[i] for i in keep), tuple(state.dims[i] for i in keep))


def partial_transpose(state: DenseState, labels: Iterable) -> np.ndarray:
    idx = state.resolve(labels)
    n = len(state.dims)
    t = state.matrix.reshape(state.dims + state.dims)
    axes = list(range(2 * n))
    for i in idx:
        axes[i], axes[n + i] = axes[n + i], axes[i]
    return t.transpose(axes).reshape(state.dim, state.dim)


def ppt_min_eigenvalue(state: DenseState, bipartition: Iterable) -> float:
    """Smallest eigenvalue of the partial transpose on one side of the bipartition."""
    idx = state.resolve(bipartition)
    if not idx or len(idx) == len(state.dims):
        raise LayoutError("bipartition must split the subsystems into two nonempty sides")
    pt = partial_transpose(state, [state.keys[i] for i in idx])
    return float(np.linalg.eigvalsh(_hermitize(pt)).min())


def fidelity_with_max_ent(state: DenseState, d: int) -> float:
    if state.dims != (d, d):
        raise LayoutError(f"expected a {d}x{d} bipartite state, got dims {state.dims}")
    phi = max_ent_vector(d)
    return float(np.real(phi.conj() @ state.matrix @ phi))


def _shift_clock(d: int, j: int, k: int) -> np.ndarray:
    shift = np.roll(np.eye(d), j, axis=0)
    clock = np.diag(np.exp(2j * np.pi * k * np.arange(d) / d))
    return shift @ clock


def teleport_once(state: DenseState, middle_party: int) -> DenseState:
    """Bell-measure the two subsystems of ``middle_party`` and correct at the far end.

    The middle party must hold exactly two subsystems, on edges ``(a, m)`` and
    ``(m, b)``. Its half of the edge towards the smaller neighbour is
    teleported along the other edge; the result is a state in which ``a`` and
    ``b`` share a new edge ``(a, b)`` and the middle party is gone. Applied to
    the middle of a two-edge chain of isotropic links with visibility ``p`` it
    yields the isotropic state with visibility ``p**2``.
    """
    mine = [i for i, (x, _) in enumerate(state.keys) if x == middle_party]
    if len(mine) != 2:
        raise LayoutError(f"party {middle_party} must hold exactly two subsystems, found {len(mine)}")
    i_in, i_out = mine
    e_in, e_out = state.keys[i_in][1], state.keys[i_out][1]
    a = e_in[0] if e_in[1] == middle_party else e_in[1]
    b = e_out[0] if e_out[1] == middle_party else e_out[1]
    if a == b:
        raise LayoutError("both edges of the middle party lead to the same neighbour")
    try:
        i_a = state.keys.index((a, e_in))
        i_b = state.keys.index((b, e_out))
    except ValueError:
        raise LayoutError("edge partners of the middle party are missing from the layout") from None
    d = state.dims[i_in]
    if {state.dims[i_out], state.dims[i_a], state.dims[i_b]} != {d}:
        raise LayoutError("teleportation needs equal local dimensions on both edges")
    new_edge = (min(a, b), max(a, b))
    if (a, new_edge) in state.keys or (b, new_edge) in state.keys:
        raise LayoutError(f"edge {new_edge} already present")

    others = [i for i in range(len(state.dims)) if i not in (i_in, i_out, i_b)]
    perm = state.permuted(others + [i_in, i_out, i_b])
    rest = int(np.prod([state.dims[i] for i in others])) if others else 1
    m = perm.matrix.reshape(rest, d**3, rest, d**3)
    phi = max_ent_vector(d)
    out = np.zeros((rest, d, rest, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            w = _shift_clock(d, j, k)
            bell = np.kron(np.eye(d), w) @ phi
            op = np.kron(bell.conj()[None, :], w.T)
            out += np.einsum("iy,aybz,jz->aibj", op, m, op.conj(), optimize=True)
    keys = []
    for i in others:
        x, e = state.keys[i]
        keys.append((x, new_edge) if i == i_a else (x, e))
    keys.append((b, new_edge))
    dims = tuple(state.dims[i] for i in others) + (d,)
    total = rest * d
    return DenseState(out.reshape(total, total), tuple(keys), dims).canonical()


def chain_graph(edges: int) -> Graph:
    return Graph(edges + 1, tuple((i, i + 1) for i in range(edges)))


def teleport_chain(state: DenseState) -> DenseState:
    """Teleport through every interior party of a chain state, lowest party first."""
    while True:
        interior = [x for x in state.parties if sum(1 for y, _ in state.keys if y == x) == 2]
        if not interior:
            return state
        state = teleport_once(state, interior[0])


def dump_state(state: DenseState) -> bytes:
    """Debug dump: one JSON header line, then row-major complex128 entries."""
    header = {"dims": list(state.dims), "keys": [[a, list(e)] for a, e in state.keys]}
    buf = io.BytesIO()
    buf.write(b"NETGME-DENSE 1\n")
    buf.write(json.dumps(header).encode() + b"\n")
    buf.write(np.ascontiguousarray(state.matrix, dtype="<c16").tobytes())
    return buf.getvalue()


def load_state(data: bytes) -> DenseState:
    magic, header, payload = data.split(b"\n", 2)
    if magic != b"NETGME-DENSE 1":
        raise LayoutError("not a dense-state dump")
    meta = json.loads(header)
    dims = tuple(meta["dims"])
    total = int(np.prod(dims)) if dims else 1
    mat = np.frombuffer(payload, dtype="<c16").reshape(total, total).copy()
    return DenseState(mat, tuple((a, tuple(e)) for a, e in meta["keys"]), dims)


# biseparable witness reconstruction


@dataclass(frozen=True)
class WitnessBlock:
    """A recombined block at ``vertex`` or a leftover product term.

    Recombined blocks are ``weight_full * T_F + weight_partner * T_F'`` where
    ``T_F`` puts maximally entangled states on the edges in ``F`` and white
    noise elsewhere, and ``F'`` removes the edges at ``vertex`` from ``F``.
    ``visibility`` is the isotropic parameter of the edges at ``vertex`` inside
    the normalized block; the block is separable across ``vertex`` exactly when
    it is at most ``1 / (d**k + 1)`` with ``k`` the number of those edges.
    """

    kind: str
    term: frozenset[int]
    vertex: int | None
    partner: frozenset[int] | None
    weight_full: float
    weight_partner: float
    visibility: float | None
    separable: bool

    @property
    def weight(self) -> float:
        return self.weight_full + self.weight_partner


@dataclass(frozen=True)
class Overdraft:
    term: frozenset[int]
    budget: float
    consumed: float


@dataclass
class WitnessDecomposition:
    blocks: list[WitnessBlock]
    residual_norm: float
    dense_residual: float | None
    overdraft_report: list[Overdraft]
    term_classes: dict[str, int] = field(default_factory=dict)

    @property
    def separability_flags(self) -> list[bool]:
        return [b.separable for b in self.blocks]

    @property
    def total_weight(self) -> float:
        return float(sum(b.weight for b in self.blocks))

    @property
    def min_weight(self) -> float:
        return min((min(b.weight_full, b.weight_partner) for b in self.blocks), default=0.0)

    def violated_blocks(self) -> list[WitnessBlock]:
        return [b for b in self.blocks if not b.separable]

    @property
    def valid(self) -> bool:
        residual = self.residual_norm if self.dense_residual is None else max(self.residual_norm, self.dense_residual)
        return (
            residual <= 1e-9
            and not self.overdraft_report
            and all(self.separability_flags)
            and self.min_weight >= -1e-12
            and abs(self.total_weight - 1.0) <= 1e-10
        )


def term_matrix(graph: Graph, d: int, term: Iterable[int], dim_cap: int = DEFAULT_DIM_CAP) -> DenseState:
    """Dense ``T_F``: maximally entangled on edge indices in ``term``, white noise on the rest."""
    chosen = set(term)
    phi = max_ent_vector(d)
    proj = np.outer(phi, phi.conj())
    noise = np.eye(d * d) / d**2
    factors = [proj if i in chosen else noise for i in range(len(graph.edges))]
    return _edge_factors(graph, d, factors, dim_cap)


def reconstruct_bs_witness(
    graph: Graph,
    params: IsotropicParams,
    subset: Iterable[int],
    max_edges: int = 20,
    dense_cap: int = 2**10,
    rel_tol: float = 1e-12,
) -> WitnessDecomposition:
    """Expand the network state over edge subsets and regroup it into 1-biseparable blocks.

    Every term whose edge set touches all vertices is split evenly among the
    vertices of ``subset``; the share at ``v`` is paired with a slice of the
    term obtained by deleting the edges at ``v``, sized as one over the number
    of nonempty subsets of the edges at ``v``. Slices drawn beyond a term's
    weight are reported as overdraft. Whatever weight remains on terms with an
    empty vertex is kept as product leftovers.
    """
    m = len(graph.edges)
    if m > max_edges:
        raise DimensionCapError(f"{m} edges exceed the enumeration budget of {max_edges}")
    chosen = sorted(set(subset))
    if not chosen:
        raise ValueError("subset must be nonempty")
    for v in chosen:
        graph.check_vertex(v)
    d, p = params.d, params.p
    inc_mask = [sum(1 << i for i in graph.incident[v]) for v in range(graph.vertex_count)]
    deg = [graph.degree(v) for v in range(graph.vertex_count)]
    weights = np.array([p ** bin(f).count("1") * (1.0 - p) ** (m - bin(f).count("1")) for f in range(1 << m)])
    chosen_set = set(chosen)

    def empty_vertices(f: int) -> list[int]:
        return [v for v in range(graph.vertex_count) if not f & inc_mask[v]]

    classes = {"B": 0, "A": 0, "C": 0}
    full_terms = []
    for f in range(1 << m):
        empty = empty_vertices(f)
        if not empty:
            classes["B"] += 1
            full_terms.append(f)
        elif len(empty) == 1 and empty[0] in chosen_set:
            classes["A"] += 1
        else:
            classes["C"] += 1

    blocks: list[WitnessBlock] = []
    consumed = np.zeros(1 << m)
    rebuilt = np.zeros(1 << m)
    for f in full_terms:
        share = weights[f] / len(chosen)
        for v in chosen:
            partner = f & ~inc_mask[v]
            k = bin(f & inc_mask[v]).count("1")
            draw = weights[partner] / (2 ** deg[v] - 1)
            consumed[partner] += draw
            rebuilt[f] += share
            rebuilt[partner] += draw
            total = share + draw
            q = share / total if total > 0 else 0.0
            bound = 1.0 / (d**k + 1)
            blocks.append(
                WitnessBlock(
                    "recombined",
                    _edge_set(f),
                    v,
                    _edge_set(partner),
                    float(share),
                    float(draw),
                    float(q),
                    q <= bound * (1 + rel_tol),
                )
            )

    overdraft = []
    for f in range(1 << m):
        if consumed[f] > weights[f] * (1 + rel_tol) + 1e-15:
            overdraft.append(Overdraft(_edge_set(f), float(weights[f]), float(consumed[f])))
    full_set = set(full_terms)
    for f in range(1 << m):
        if f in full_set:
            continue
        left = weights[f] - consumed[f]
        if consumed[f] == 0.0 and weights[f] == 0.0:
            continue
        rebuilt[f] += left
        blocks.append(WitnessBlock("leftover", _edge_set(f), None, None, float(left), 0.0, None, True))

    residual = float(np.abs(rebuilt - weights).max())
    dense_residual = None
    dim = d ** (2 * m)
    if dim <= dense_cap:
        target = build_network_state(graph, params, dim_cap=dense_cap).matrix
        acc = np.zeros_like(target)
        coeff = {}
        for b in blocks:
            coeff[b.term] = coeff.get(b.term, 0.0) + b.weight_full
            if b.partner is not None:
                coeff[b.partner] = coeff.get(b.partner, 0.0) + b.weight_partner
        for term, c in coeff.items():
            if c != 0.0:
                acc += c * term_matrix(graph, d, term, dense_cap).matrix
        dense_residual = float(np.abs(acc - target).max())
    return WitnessDecomposition(blocks, residual, dense_residual, overdraft, classes)


def _edge_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def block_state(graph: Graph, d: int, block: WitnessBlock) -> DenseState:
    """Normalized dense matrix of a witness block (for cross-checking its separability)."""
    mat = block.weight_full * term_matrix(graph, d, block.term).matrix
    if block.partner is not None:
        mat = mat + block.weight_partner * term_matrix(graph, d, block.partner).matrix
    template = term_matrix(graph, d, block.term)
    return DenseState(mat / block.weight, template.keys, template.dims)


def locate_ppt_threshold(d: int, tol: float = 1e-9) -> tuple[float, float]:
    """Bisect the visibility where the partial transpose of the isotropic state turns negative.

    Returns ``(lo, hi)`` with ``hi - lo <= tol``, the state PPT at ``lo`` and
    NPT at ``hi``.
    """
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ppt_min_eigenvalue(build_isotropic(IsotropicParams(d, mid)), [0]) < 0.0:
            hi = mid
        else:
            lo = mid
    return lo, hi
