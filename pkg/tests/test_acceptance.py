"""End-to-end acceptance checks. Each test prints a single PASS/FAIL line, then asserts it."""

from __future__ import annotations

import itertools
import time

import networkx as nx
import numpy as np
import pytest

from conftest import complete, random_connected_graphs, small_connected_graphs, to_nx
from netgme.certify import (
    bs_certificate,
    certificate_conflict_check,
    classify_family,
    complete_graph_orbits,
    gme_certificate,
    pair_bounds,
)
from netgme.exact import (
    build_network_state,
    chain_graph,
    isotropic_matrix,
    locate_ppt_threshold,
    partial_trace,
    reconstruct_bs_witness,
    teleport_chain,
)
from netgme.families import CATALOG, FamilySpec, generate, hamming_paths, parse_family, verify_descriptors
from netgme.graph import (
    degree_profile,
    edge_connectivity,
    maximal_edge_connectivity_check,
    min_edge_cut,
    pair_edge_connectivity,
    subgraph,
    vertex_connectivity,
)
from netgme.isotropic import IsotropicParams, bsa

pytestmark = pytest.mark.acceptance


def report(capsys, number, title, ok, detail=""):
    with capsys.disabled():
        print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else ""))
    assert ok, detail


def test_01_isotropic_threshold(capsys):
    start = time.perf_counter()
    errors = {}
    for d in (2, 3, 4):
        lo, hi = locate_ppt_threshold(d, tol=1e-9)
        inside = lo - 1e-9 <= 1 / (d + 1) <= hi + 1e-9
        errors[d] = abs(0.5 * (lo + hi) - 1 / (d + 1)) if inside and hi - lo <= 1e-9 else float("inf")
    elapsed = time.perf_counter() - start
    ok = all(e <= 1e-9 for e in errors.values()) and elapsed < 5
    detail = ", ".join(f"d={d} err={e:.1e}" for d, e in errors.items()) + f", {elapsed:.2f}s"
    report(capsys, 1, "PPT boundary of the isotropic state at 1/(d+1)", ok, detail)


def test_02_bsa_identity(capsys):
    start = time.perf_counter()
    worst = 0.0
    for d in (2, 3):
        phi = np.zeros(d * d)
        phi[:: d + 1] = 1 / np.sqrt(d)
        proj = np.outer(phi, phi)
        sep = isotropic_matrix(d, 1 / (d + 1))
        for p in np.linspace(1 / (d + 1), 1, 21)[1:]:
            rest = isotropic_matrix(d, p) - bsa(IsotropicParams(d, p)) * sep
            coeff = float(np.real(phi @ rest @ phi))
            worst = max(worst, -np.linalg.eigvalsh(rest).min(), np.abs(rest - coeff * proj).max())
    elapsed = time.perf_counter() - start
    report(capsys, 2, "best separable approximation identity", worst <= 1e-10 and elapsed < 5, f"max deviation {worst:.1e}, {elapsed:.2f}s")


def test_03_teleportation_cascade(capsys):
    start = time.perf_counter()
    misses = []
    for hops, p in itertools.product((2, 3, 4), (0.5, 0.8, 1.0)):
        out = teleport_chain(build_network_state(chain_graph(hops), IsotropicParams(2, p)))
        target = isotropic_matrix(2, p ** (2 ** (hops - 1)))
        err = float(np.abs(out.matrix - target).max())
        if err > 1e-9:
            misses.append(f"L={hops} p={p} err={err:.3f}")
    elapsed = time.perf_counter() - start
    ok = not misses and elapsed < 30
    detail = "; ".join(misses) if misses else f"{elapsed:.2f}s"
    report(capsys, 3, "swap chain output equals rho(p^(2^(L-1)))", ok, detail)


def test_04_edge_deletion(capsys):
    worst = 0.0
    graphs = [g for g in small_connected_graphs() if len(g.edges) <= 5]
    for g in graphs:
        for p in (0.0, 0.4, 1.0):
            params = IsotropicParams(2, p)
            full = build_network_state(g, params)
            for r in range(1, len(g.edges)):
                for gone in itertools.combinations(g.edges, r):
                    reduced = partial_trace(full, [(x, e) for e in gone for x in e])
                    rest, _ = subgraph(g, gone, delete_isolated=True)
                    worst = max(worst, float(np.abs(reduced.matrix - build_network_state(rest, params).matrix).max()))
    report(capsys, 4, "partial trace equals the edge-deleted network state", worst <= 1e-10, f"{len(graphs)} graphs, max deviation {worst:.1e}")


def test_05_connectivity_suite(capsys):
    start = time.perf_counter()
    failures = []
    corpus = small_connected_graphs() + random_connected_graphs(200)
    for index, g in enumerate(corpus):
        h = to_nx(g)
        prof = degree_profile(g)
        lam = edge_connectivity(g)
        kappa = vertex_connectivity(g)
        if not prof.delta_min >= lam >= kappa:
            failures.append(f"#{index} ordering")
        cut = min_edge_cut(g)
        rest = h.copy()
        rest.remove_edges_from(cut.edges)
        if cut.size != lam or nx.is_connected(rest):
            failures.append(f"#{index} cut")
        last = g.vertex_count - 1
        if pair_edge_connectivity(g, 0, last) != len(list(nx.edge_disjoint_paths(h, 0, last))):
            failures.append(f"#{index} menger")
        if prof.delta_min >= g.vertex_count // 2 and (not maximal_edge_connectivity_check(g) or lam != prof.delta_min):
            failures.append(f"#{index} maximal")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    report(capsys, 5, "connectivity ordering, Menger duality, maximal edge connectivity", ok, f"{len(corpus)} graphs, {elapsed:.1f}s {failures[:5]}")


EXPECTED = {
    "complete": "AGME",
    "dumbbell": "AGME",
    "hamming:k=1": "AGME",
    "hamming:k=2": "AGME",
    "hamming:k=3": "AGME",
    "matchedchain:f=log": "AGME",
    "path": "ABS",
    "star": "ABS",
    "balancedtree:r=2": "ABS",
    "clusterchain:k=log": "ABS",
}


def test_06_family_verdicts(capsys):
    wrong = []
    for family, verdict in EXPECTED.items():
        result = classify_family(parse_family(family))
        if result.verdict != verdict or not all(h.citation for h in result.rules_fired):
            wrong.append(f"{family}={result.verdict}")
    report(capsys, 6, "family verdict table", not wrong, ", ".join(wrong) or f"{len(EXPECTED)} families")


def test_07_construction_fidelity(capsys):
    failures = []
    for spec in CATALOG:
        rep = verify_descriptors(spec, range(spec.min_index, 13))
        failures.extend(f"{spec} n={c.n} {c.mismatches}" for c in rep.failures())
    for k in (1, 2, 3):
        for n in range(2, 6):
            g = generate(FamilySpec("hamming", k=k), n)
            for u, v in itertools.combinations(range(g.vertex_count), 2):
                used = set()
                for route in hamming_paths(k, n, u, v):
                    steps = {tuple(sorted(e)) for e in zip(route, route[1:])}
                    if len(route) - 1 > k + 1 or steps & used or not all(g.has_edge(*e) for e in steps):
                        failures.append(f"hamming k={k} n={n} pair {u},{v}")
                    used |= steps
    report(capsys, 7, "descriptor closed forms and explicit Hamming paths", not failures, "; ".join(failures[:5]))


def test_08_witness_end_to_end(capsys):
    star3 = generate(FamilySpec("star"), 3)
    cert = bs_certificate(star3, IsotropicParams(2, 0.6))
    good = reconstruct_bs_witness(star3, IsotropicParams(2, 0.6), cert.subset) if cert else None
    ok_good = (
        good is not None
        and good.residual_norm <= 1e-9
        and abs(good.total_weight - 1) <= 1e-10
        and all(good.separability_flags)
        and not good.overdraft_report
    )
    absent = bs_certificate(star3, IsotropicParams(2, 0.7)) is None
    bad = reconstruct_bs_witness(star3, IsotropicParams(2, 0.7), [1, 2, 3])
    ok = ok_good and absent and bool(bad.violated_blocks())
    report(capsys, 8, "star-3 witness validates at 0.6 and flags the violation at 0.7", ok)


def test_09_certificate_consistency(capsys):
    instances = [(spec, n) for spec in CATALOG for n in (4,)] + [(parse_family("complete"), 9), (parse_family("star"), 8)]
    assert len(instances) == 12
    both = []
    for (spec, n), d, p in itertools.product(instances, (2, 3), np.linspace(0.1, 1.0, 10)):
        rep = certificate_conflict_check(generate(spec, n), IsotropicParams(d, float(p)))
        if rep.bs is not None and rep.gme is not None:
            both.append(f"{spec} n={n} d={d} p={p:.2f}")
    report(capsys, 9, "BS and GME certificates never coexist", not both, f"{len(instances) * 20} cases")


def test_10_gme_pipeline_complete_graphs(capsys):
    params = IsotropicParams(2, 0.95)
    sizes = list(range(2, 161)) + [200, 300, 400, 500]
    eps, fired = [], []
    for n in sizes:
        g = complete(n)
        cert = gme_certificate(g, params, pair_orbits=complete_graph_orbits(n))
        eps.append(pair_bounds(g, 0, 1, params, [1, 2, 3, 4]).epsilon)
        fired.append(cert is not None)
    monotone = all(b <= a for a, b in zip(eps, eps[1:]))
    n0 = next((n for i, n in enumerate(sizes) if all(fired[i:])), None)
    ok = monotone and n0 is not None and n0 <= 500
    report(capsys, 10, "K_n GME certificate fires for every n >= n0 (hashing model)", ok, f"n0={n0}")
