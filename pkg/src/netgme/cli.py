"""Command-line front end.

Exit codes: 0 success, 2 bad arguments or unparsable input, 3 ``classify``
returned Unknown, 4 I/O failure, 1 a failed ``exact-check`` suite.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .certify import (
    bs_certificate,
    classify_family,
    cluster_partition,
    critical_visibility_bracket,
    gme_certificate,
    visibility_grid,
)
from .exact import (
    DEFAULT_DIM_CAP,
    DimensionCapError,
    build_network_state,
    chain_graph,
    isotropic_matrix,
    locate_ppt_threshold,
    partial_trace,
    reconstruct_bs_witness,
    teleport_chain,
)
from .families import FamilyError, generate, parse_family
from .graph import (
    Graph,
    GraphError,
    degree_profile,
    diameter,
    erdos_diameter_bound,
    format_edge_list,
    maximal_edge_connectivity_check,
    min_edge_cut,
    parse_edge_list,
    vertex_connectivity,
)
from .isotropic import ExponentModel, IsotropicParams, bsa, cascade_visibility

SWEEP_COLUMNS = ["graph_id", "N", "d", "p", "bs_certified", "gme_certified", "p_lo", "p_hi", "min_margin"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNKNOWN, EXIT_IO = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class IOFailure(Exception):
    pass


def _read_graph(path: str) -> Graph:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc.strerror}") from None
    try:
        return parse_edge_list(text)
    except GraphError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc.strerror}") from None


def _params(d: int, p: float) -> IsotropicParams:
    try:
        return IsotropicParams(d, p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _model(text: str) -> ExponentModel:
    try:
        return ExponentModel.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def parse_grid(text: str) -> list[float]:
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"grid must be a:b:step, got {text!r}") from None
    if step <= 0:
        raise UsageError("grid step must be positive")
    points = visibility_grid(start, stop, step)
    if not points:
        raise UsageError(f"grid {text!r} is empty")
    if points[0] < 0 or points[-1] > 1:
        raise UsageError("grid points must lie in [0, 1]")
    return points


def _family_graph(family: str, n: int) -> Graph:
    try:
        return generate(parse_family(family), n)
    except FamilyError as exc:
        raise UsageError(str(exc)) from None


def cmd_generate(args) -> int:
    graph = _family_graph(args.family, args.n)
    _write(args.out, format_edge_list(graph, f"{args.family} n={args.n}"))
    return EXIT_OK


def cmd_analyze(args) -> int:
    graph = _read_graph(args.input)
    prof = degree_profile(graph)
    connected = graph.is_connected()
    rows = [
        ("N", graph.vertex_count),
        ("edges", len(graph.edges)),
        ("delta_min", prof.delta_min),
        ("delta_max", prof.delta_max),
        ("connected", str(connected).lower()),
    ]
    if graph.vertex_count >= 2:
        rows.append(("lambda", min_edge_cut(graph).size))
    if connected and graph.vertex_count >= 2:
        rows.append(("kappa", vertex_connectivity(graph)))
        rows.append(("diameter", diameter(graph)))
        rows.append(("maximally_edge_connected_check", str(maximal_edge_connectivity_check(graph)).lower()))
        rows.append(("erdos_bound", erdos_diameter_bound(graph) if prof.delta_min >= 2 else "n/a"))
    _write(args.out, "".join(f"{k}={v}\n" for k, v in rows))
    return EXIT_OK


def cmd_classify(args) -> int:
    try:
        spec = parse_family(args.family)
    except FamilyError as exc:
        raise UsageError(str(exc)) from None
    if args.d < 2:
        raise UsageError("d must be >= 2")
    verdict = classify_family(spec, args.d)
    _write(args.out, _json(verdict.to_dict()))
    return EXIT_UNKNOWN if verdict.verdict == "Unknown" else EXIT_OK


def _absent(kind: str, params: IsotropicParams, model: ExponentModel | None = None) -> dict:
    out = {"kind": kind, "status": "absent", "parameters": {"d": params.d, "p": params.p}, "version": __version__}
    if model is not None:
        out["exponent_model"] = str(model)
    return out


def cmd_certify(args) -> int:
    graph = _read_graph(args.input)
    params = _params(args.d, args.p)
    model = _model(args.exponent_model)
    if not graph.is_connected() or graph.vertex_count < 2:
        raise UsageError("certificates need a connected graph with at least two vertices")
    out = {}
    if args.mode in ("bs", "both"):
        bs = bs_certificate(graph, params)
        out["bs"] = bs.to_dict() if bs is not None else _absent("BiseparabilityCertificate", params)
    if args.mode in ("gme", "both"):
        gme = gme_certificate(graph, params, model=model)
        out["gme"] = gme.to_dict() if gme is not None else _absent("GmeCertificate", params, model)
    _write(args.out, _json(out if args.mode == "both" else out[args.mode]))
    return EXIT_OK


def _sweep_instance(task) -> list[list]:
    graph_id, graph, d, grid, model_text = task
    model = ExponentModel.parse(model_text)
    bracket = critical_visibility_bracket(graph, d, grid, model)
    rows = []
    for p in grid:
        params = IsotropicParams(d, p)
        bs = bs_certificate(graph, params)
        gme = gme_certificate(graph, params, model=model)
        margin = "" if bs is None or bs.min_margin is None else f"{bs.min_margin:.12g}"
        rows.append(
            [graph_id, graph.vertex_count, d, f"{p:.12g}", str(bs is not None).lower(),
             str(gme is not None).lower(), f"{bracket.p_lo:.12g}", f"{bracket.p_hi:.12g}", margin]
        )
    return rows


def cmd_sweep(args) -> int:
    grid = parse_grid(args.grid)
    model = _model(args.exponent_model)
    if args.d < 2:
        raise UsageError("d must be >= 2")
    instances = []
    if args.input:
        instances.append((Path(args.input).stem, _read_graph(args.input)))
    if args.family:
        for n in _int_list(args.n):
            instances.append((f"{args.family}/n={n}", _family_graph(args.family, n)))
    if not instances:
        raise UsageError("sweep needs --family/--n or --in")
    for gid, g in instances:
        if not g.is_connected() or g.vertex_count < 2:
            raise UsageError(f"{gid}: graph must be connected with at least two vertices")
    tasks = [(gid, g, args.d, grid, str(model)) for gid, g in instances]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_instance, tasks))
    else:
        results = [_sweep_instance(t) for t in tasks]
    buf = io.StringIO()
    if not args.no_header:
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        buf.write(f"# netgme {__version__} exponent_model={model} generated={stamp}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    # rows stay in input instance order, then grid order, however the pool finished
    for rows in results:
        writer.writerows(rows)
    _write(args.out, buf.getvalue())
    return EXIT_OK


def _int_list(text: str | None) -> list[int]:
    if not text:
        raise UsageError("--n is required with --family")
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --n {text!r}") from None


def cmd_partition(args) -> int:
    graph = _read_graph(args.input)
    if not graph.is_connected():
        raise UsageError("graph is disconnected")
    try:
        part = cluster_partition(graph, args.tau)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = {
        "clusters": [sorted(c) for c in part.clusters],
        "cut_edges": [list(e) for e in part.cut_edges],
        "K_bound": part.K_bound,
        "trace": [vars(s) for s in part.split_trace],
        "tau": args.tau,
    }
    _write(args.out, _json(report))
    return EXIT_OK


# exact-check suites: each yields (check name, passed, detail)


def _suite_ppt(cap):
    for d in (2, 3, 4):
        lo, hi = locate_ppt_threshold(d)
        target = 1.0 / (d + 1)
        ok = lo - 1e-9 <= target <= hi + 1e-9 and hi - lo <= 1e-9
        yield f"ppt threshold d={d}", ok, f"located {0.5 * (lo + hi):.10f} +- {hi - lo:.1e}, expected {target:.10f}"


def _suite_bsa(cap):
    for d in (2, 3):
        sep = isotropic_matrix(d, 1.0 / (d + 1))
        phi = np.zeros(d * d)
        phi[:: d + 1] = 1.0 / np.sqrt(d)
        proj = np.outer(phi, phi)
        worst = 0.0
        for p in np.linspace(1.0 / (d + 1), 1.0, 21)[1:]:
            rest = isotropic_matrix(d, p) - bsa(IsotropicParams(d, p)) * sep
            coeff = float(np.real(phi @ rest @ phi))
            worst = max(worst, float(np.abs(rest - coeff * proj).max()), max(0.0, -coeff))
        yield f"bsa decomposition d={d}", worst <= 1e-10, f"max deviation {worst:.2e}"


def _suite_cascade(cap):
    for hops in (2, 3, 4):
        for p in (0.5, 0.8, 1.0):
            out = teleport_chain(build_network_state(chain_graph(hops), IsotropicParams(2, p), cap))
            err = float(np.abs(out.matrix - isotropic_matrix(2, p**hops)).max())
            yield f"swap chain L={hops} p={p}", err <= 1e-9, f"|out - rho(p^L)| = {err:.1e}"
            assigned = cascade_visibility(p, hops)
            yield f"assigned visibility L={hops} p={p}", assigned <= p**hops + 1e-15, (
                f"p^(2^(L-1)) = {assigned:.6g} <= p^L = {p**hops:.6g}"
            )


def _suite_edge_deletion(cap):
    graphs = {
        "triangle": Graph(3, ((0, 1), (0, 2), (1, 2))),
        "path4": chain_graph(3),
        "star4": Graph(5, ((0, 1), (0, 2), (0, 3), (0, 4))),
    }
    for name, g in graphs.items():
        for p in (0.0, 0.4, 1.0):
            params = IsotropicParams(2, p)
            full = build_network_state(g, params, cap)
            worst = 0.0
            for idx in range(len(g.edges)):
                gone = g.edges[idx]
                reduced = partial_trace(full, [(gone[0], gone), (gone[1], gone)])
                rest = Graph(g.vertex_count, tuple(e for e in g.edges if e != gone))
                expected = build_network_state(rest, params, cap)
                worst = max(worst, float(np.abs(reduced.matrix - expected.matrix).max()))
            yield f"edge deletion {name} p={p}", worst <= 1e-10, f"max deviation {worst:.1e}"


def _suite_witness(cap):
    star = Graph(4, ((0, 1), (0, 2), (0, 3)))
    cert = bs_certificate(star, IsotropicParams(2, 0.6))
    wit = reconstruct_bs_witness(star, IsotropicParams(2, 0.6), cert.subset)
    yield "star-3 p=0.6 witness", wit.valid, f"residual {wit.residual_norm:.1e}, blocks {len(wit.blocks)}"
    bad = reconstruct_bs_witness(star, IsotropicParams(2, 0.7), (1, 2, 3))
    yield "star-3 p=0.7 flags violation", bool(bad.violated_blocks()), f"{len(bad.violated_blocks())} blocks above bound"
    edge = Graph(2, ((0, 1),))
    triv = reconstruct_bs_witness(edge, IsotropicParams(2, 0.2), (0,))
    yield "single edge p=0.2 witness", triv.valid, f"residual {triv.residual_norm:.1e}"


SUITES = {
    "ppt": _suite_ppt,
    "bsa": _suite_bsa,
    "cascade": _suite_cascade,
    "edge-deletion": _suite_edge_deletion,
    "witness": _suite_witness,
}


def cmd_exact_check(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    lines = []
    all_ok = True
    for name, ok, detail in SUITES[args.suite](args.dim_cap):
        all_ok &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name:<40} {detail}")
    lines.append(f"suite {args.suite}: {'pass' if all_ok else 'fail'}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if all_ok else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="netgme", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"netgme {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common_out(p):
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("generate", help="write a family instance as an edge list")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    common_out(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="report degrees, connectivities and diameter")
    p.add_argument("--in", dest="input", required=True)
    common_out(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", help="asymptotic AGME/ABS verdict for a family")
    p.add_argument("--family", required=True)
    p.add_argument("--d", type=int, default=2)
    common_out(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("certify", help="biseparability and/or GME certificate as JSON")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mode", choices=("bs", "gme", "both"), default="both")
    p.add_argument("--exponent-model", default="hashing")
    common_out(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("sweep", help="certificates over a visibility grid as CSV")
    p.add_argument("--family")
    p.add_argument("--n", help="comma-separated indices for --family")
    p.add_argument("--in", dest="input")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--grid", default="0:1:0.05", help="a:b:step")
    p.add_argument("--exponent-model", default="hashing")
    p.add_argument("--no-header", action="store_true", help="omit the version/timestamp comment line")
    p.add_argument("--jobs", type=int, default=1)
    common_out(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("partition", help="recursive minimum-cut cluster partition")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--tau", type=float, default=0.3)
    common_out(p)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("exact-check", help="run a dense-oracle check suite")
    p.add_argument("suite")
    p.add_argument("--dim-cap", type=int, default=DEFAULT_DIM_CAP)
    common_out(p)
    p.set_defaults(func=cmd_exact_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"netgme: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DimensionCapError as exc:
        print(f"netgme: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IOFailure as exc:
        print(f"netgme: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
