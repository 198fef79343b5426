"""Command-line front end: generation, compression, exact solving,
benchmark sweeps, and validation.

Exit codes: 0 success / budget met, 2 best-effort result over budget,
3 infeasible or timed out, 1 bad input. Machine-readable data goes to the
output files; stdout carries human-readable text only. ``DLITE_LOG``
controls verbosity (DEBUG, INFO, WARNING, ...).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, compress, exact, graphio, spanner, synthgen
from .graph import (SceneGraph, SchemaError, TerminalQuery,
                    UnreachablePairError, dijkstra, shortest_path)

log = logging.getLogger("dsglite")

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_BEST_EFFORT = 2
EXIT_INFEASIBLE = 3


def _params_from_args(args) -> spanner.SpannerParams:
    return spanner.SpannerParams(eps=args.eps, p=args.p, alpha=args.alpha,
                                 c=args.c, seed=args.seed)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--alpha", type=float, default=4.0)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n")


def cmd_gen(args) -> int:
    if args.preset:
        if args.preset == "fig3":
            g, cut = synthgen.gen_fig3_toy()
            query = None
            log.info("toy cut node: %d", cut)
        elif args.preset == "budlite":
            g, query = synthgen.gen_budlite_toy(args.variant)
        else:
            g, query = synthgen.gen_todlite_toy(args.variant)
    else:
        spec = synthgen.GridWorldSpec(
            rooms_x=args.rooms_x, rooms_y=args.rooms_y,
            places_per_room_side=args.places_per_room_side,
            room_size=args.room_size,
            door_count_per_shared_wall=args.doors,
            buildings=args.buildings, seed=args.seed)
        g = synthgen.gen_grid_world(spec)
        query = None
    graphio.save_graph(g, args.out)
    print(f"wrote {args.out}: {g.num_nodes} nodes, {g.num_edges} edges, "
          f"{g.layer_count} layers")
    if query is not None and args.query_out:
        graphio.save_query(query, args.query_out)
        print(f"wrote {args.query_out}")
    return EXIT_OK


def _load_inputs(args) -> tuple[SceneGraph, TerminalQuery]:
    g = graphio.load_graph(args.input)
    query = graphio.load_query(args.query)
    if args.budget is not None:
        query = TerminalQuery(pairs=query.pairs, budget=args.budget)
    query.validate(g)
    return g, query


def cmd_compress(args) -> int:
    g, query = _load_inputs(args)
    params = _params_from_args(args)
    if args.alg == "bud":
        result = compress.bud_lite(g, query, params, cap=args.cap)
    else:
        result = compress.tod_lite(g, query, params)
    out = Path(args.out)
    graphio.save_graph(result.compressed, out.with_suffix(".graph.json"))
    stats = {
        "alg": args.alg,
        "budget": query.budget,
        "size": result.compressed.num_nodes,
        "beta": result.beta_achieved,
        "k": result.iterations_k,
        "nodes_abstracted": result.nodes_abstracted,
        "met_budget": result.met_budget,
        "spanner_size": result.spanner.subgraph.num_nodes,
        "wall_ms": result.wall_time * 1000.0,
    }
    _write_json(out.with_suffix(".stats.json"), stats)
    print(f"{args.alg}: size {stats['size']} (budget {query.budget}), "
          f"beta {result.beta_achieved:.4f}, k {result.iterations_k}, "
          f"met_budget {result.met_budget}")
    return EXIT_OK if result.met_budget else EXIT_BEST_EFFORT


def cmd_spanner(args) -> int:
    g, query = _load_inputs(args)
    params = _params_from_args(args)
    result = spanner.build_spanner(g, query.pairs, params)
    out = Path(args.out)
    graphio.save_graph(result.subgraph, out.with_suffix(".graph.json"))
    stats = {
        "size": result.subgraph.num_nodes,
        "edges": result.subgraph.num_edges,
        "additive_budgets": list(result.additive_budgets),
        "path_lengths": [rec.length for rec in result.paths],
    }
    _write_json(out.with_suffix(".stats.json"), stats)
    print(f"spanner: {result.subgraph.num_nodes} nodes, "
          f"{result.subgraph.num_edges} edges")
    return EXIT_OK


def cmd_exact(args) -> int:
    g, query = _load_inputs(args)
    model = exact.build_ilp_model(g, query)
    if args.export_lp:
        model.export_lp(args.export_lp)
        print(f"wrote {args.export_lp}")
    solution = exact.solve_exact(model, time_limit=args.time_limit)
    data = {
        "status": solution.status,
        "beta_opt": solution.beta_opt if math.isfinite(solution.beta_opt) else "inf",
        "selected_nodes": list(solution.selected_nodes),
        "pair_paths": [list(p) if p is not None else None
                       for p in solution.pair_paths],
        "nodes_explored": solution.nodes_explored,
        "branches": solution.branches,
    }
    if args.out:
        _write_json(Path(args.out), data)
    print(f"exact: status {solution.status}, beta {solution.beta_opt}")
    return EXIT_OK if solution.status == "optimal" else EXIT_INFEASIBLE


def _sweep_query(g: SceneGraph, terminals: int, seed: int) -> TerminalQuery:
    """Deterministic terminal sample: one source against t-1 targets."""
    rng = np.random.default_rng([seed, terminals])
    places = g.nodes_in_layer(0)
    picked = [places[i] for i in rng.choice(len(places), size=terminals,
                                            replace=False)]
    pairs = tuple((picked[0], other) for other in picked[1:])
    return TerminalQuery(pairs=pairs, budget=1)


def _sweep_group(graph_path: str, terminals: int, seed: int, budgets: list[int],
                 algs: list[str], params: spanner.SpannerParams, cap: int,
                 with_bound: bool) -> list[dict]:
    """All rows sharing (terminals, seed): the spanner and the bound
    profile are computed once per group."""
    g = graphio.load_graph(graph_path)
    rows = []
    try:
        query0 = _sweep_query(g, terminals, seed)
        spn = spanner.build_spanner(g, query0.pairs, params)
    except Exception as exc:  # noqa: BLE001 - sweep rows must never abort
        log.warning("group (t=%d seed=%d) failed: %s", terminals, seed, exc)
        return [analysis.sweep_row(alg, b, terminals, seed, -1, "error", -1,
                                   0.0, None)
                for alg in algs for b in budgets]
    profile = analysis.bounds_profile(g, query0.pairs) if with_bound else None
    beta_spanner = params.additive_allowance(g.num_nodes, 1.0)
    for alg in algs:
        for budget in budgets:
            query = TerminalQuery(pairs=query0.pairs, budget=budget)
            try:
                if alg == "bud":
                    res = compress.bud_lite(g, query, params, cap=cap, spanner=spn)
                else:
                    res = compress.tod_lite(g, query, params, spanner=spn)
                bound = None
                if with_bound and alg == "bud" and profile is not None:
                    measured = max((e.dist_compressed for e in
                                    analysis.achieved_distortion(
                                        g, res.compressed, query.pairs)[1]),
                                   default=0.0)
                    bound = analysis.bud_bound(
                        profile, res.nodes_abstracted, len(query.pairs),
                        beta_spanner, measured_max_distance=measured).bound_value
                rows.append(analysis.sweep_row(
                    alg, budget, terminals, seed, res.compressed.num_nodes,
                    res.beta_achieved, res.iterations_k,
                    res.wall_time * 1000.0, bound))
            except Exception as exc:  # noqa: BLE001
                log.warning("cell (%s b=%d t=%d seed=%d) failed: %s",
                            alg, budget, terminals, seed, exc)
                rows.append(analysis.sweep_row(alg, budget, terminals, seed,
                                               -1, "error", -1, 0.0, None))
    return rows


def cmd_sweep(args) -> int:
    budgets = [int(x) for x in args.budgets.split(",")]
    terminal_counts = [int(x) for x in args.terminals.split(",")]
    seeds = [int(x) for x in args.seeds.split(",")]
    algs = [x.strip() for x in args.algs.split(",")]
    for alg in algs:
        if alg not in ("bud", "tod"):
            raise SchemaError(f"unknown algorithm {alg!r}")
    params = _params_from_args(args)

    out = Path(args.out)
    done: set[tuple] = set()
    if out.exists():
        with out.open() as fh:
            for row in csv.DictReader(fh):
                done.add((row["alg"], int(row["budget"]), int(row["terminals"]),
                          int(row["seed"])))
    groups = [(t, s) for t in terminal_counts for s in seeds]
    groups = [(t, s) for t, s in groups
              if any((alg, b, t, s) not in done for alg in algs for b in budgets)]

    new_file = not out.exists()
    results: list[list[dict]] = []
    if args.jobs > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [pool.submit(_sweep_group, args.input, t, s, budgets,
                                   algs, params, args.cap, not args.no_bound)
                       for t, s in groups]
            results = [f.result() for f in futures]
    else:
        results = [_sweep_group(args.input, t, s, budgets, algs, params,
                                args.cap, not args.no_bound)
                   for t, s in groups]

    with out.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=analysis.SWEEP_COLUMNS)
        if new_file:
            writer.writeheader()
        count = 0
        for rows in results:
            for row in rows:
                key = (row["alg"], row["budget"], row["terminals"], row["seed"])
                if key in done:
                    continue
                writer.writerow(row)
                count += 1
    print(f"wrote {count} rows to {out}")
    return EXIT_OK


def _validate_report(g: SceneGraph, compressed: SceneGraph,
                     query: TerminalQuery) -> list[tuple[str, bool, str]]:
    checks: list[tuple[str, bool, str]] = []
    extra = set(compressed.node_ids()) - set(g.node_ids())
    checks.append(("subset", not extra, f"foreign nodes: {sorted(extra)[:5]}"))
    ok = all(compressed.has_node(t) for t in query.terminals())
    checks.append(("terminals-present", ok, "missing terminals"))
    disconnected = []
    for s, t in query.pairs:
        if not (compressed.has_node(s) and compressed.has_node(t)):
            disconnected.append((s, t))
            continue
        d = dijkstra(compressed.adjacency, s, targets=(t,)).get(t, math.inf)
        if math.isinf(d):
            disconnected.append((s, t))
    checks.append(("connectivity", not disconnected,
                   f"disconnected pairs: {disconnected}"))
    checks.append(("budget", compressed.num_nodes <= query.budget,
                   f"{compressed.num_nodes} > {query.budget}"))
    oracle = compress._WeightOracle(g)
    bad_edges = []
    for u, v, w in compressed.edges():
        expect = oracle.edge_weight(u, v)
        if not math.isclose(w, expect, rel_tol=1e-9, abs_tol=1e-9):
            bad_edges.append((u, v, w, expect))
    checks.append(("edge-weights", not bad_edges,
                   f"off-model edges: {bad_edges[:3]}"))
    stretch_bad = []
    for s, t in query.pairs:
        rec = shortest_path(g, s, t)
        if rec is None:
            continue
        if compressed.has_node(s) and compressed.has_node(t):
            d = dijkstra(compressed.adjacency, s, targets=(t,)).get(t, math.inf)
            if d < rec.length - 1e-9:
                stretch_bad.append((s, t, d, rec.length))
    checks.append(("stretch-sanity", not stretch_bad,
                   f"shorter than full graph: {stretch_bad}"))
    return checks


def cmd_validate(args) -> int:
    g = graphio.load_graph(args.input)
    compressed = graphio.load_graph(args.compressed)
    query = graphio.load_query(args.query)
    query.validate(g)
    checks = _validate_report(g, compressed, query)
    failed = [name for name, ok, _ in checks if not ok]
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}" + ("" if ok else f": {detail}"))
    if args.stats:
        stats = json.loads(Path(args.stats).read_text())
        profile = analysis.bounds_profile(g, query.pairs)
        params = _params_from_args(args)
        beta_spanner = params.additive_allowance(g.num_nodes, 1.0)
        measured = max((e.dist_compressed for e in analysis.achieved_distortion(
            g, compressed, query.pairs)[1]), default=0.0)
        report = analysis.bud_bound(profile, int(stats["nodes_abstracted"]),
                                    len(query.pairs), beta_spanner,
                                    measured_max_distance=measured)
        ok = report.bound_value >= measured - 1e-9
        print(f"{'PASS' if ok else 'FAIL'} bound-dominance: "
              f"bound {report.bound_value:.3f} vs measured {measured:.3f}")
        if not ok:
            failed.append("bound-dominance")
    return EXIT_OK if not failed else EXIT_BAD_INPUT


def cmd_bound(args) -> int:
    g = graphio.load_graph(args.input)
    query = graphio.load_query(args.query)
    query.validate(g)
    params = _params_from_args(args)
    profile = analysis.bounds_profile(g, query.pairs)
    beta_spanner = (args.beta_spanner if args.beta_spanner is not None
                    else params.additive_allowance(g.num_nodes, 1.0))
    report = analysis.bud_bound(profile, args.k, len(query.pairs), beta_spanner)
    data = {"k": report.k, "alpha_k": report.alpha_k, "l_max": report.l_max,
            "l_0": report.l_0, "bound_value": report.bound_value,
            "clamped": report.clamped}
    if args.out:
        _write_json(Path(args.out), data)
    print(json.dumps(data, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsglite",
        description="Budgeted compression of layered scene graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic world")
    p.add_argument("--rooms-x", type=int, default=2)
    p.add_argument("--rooms-y", type=int, default=2)
    p.add_argument("--places-per-room-side", type=int, default=4)
    p.add_argument("--room-size", type=float, default=10.0)
    p.add_argument("--doors", type=int, default=1)
    p.add_argument("--buildings", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--preset", choices=["fig3", "budlite", "todlite"])
    p.add_argument("--variant", choices=["a", "b"], default="a")
    p.add_argument("--query-out")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compress", help="run a budgeted compressor")
    p.add_argument("--input", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--alg", choices=["bud", "tod"], required=True)
    p.add_argument("--cap", type=int, default=20)
    _add_param_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("spanner", help="build the pairwise spanner only")
    p.add_argument("--input", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--budget", type=int)
    _add_param_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_spanner)

    p = sub.add_parser("exact", help="solve the exact optimum")
    p.add_argument("--input", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--budget", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--export-lp")
    _add_param_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("sweep", help="benchmark grid to CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--budgets", default="10,30,60,100,150")
    p.add_argument("--terminals", default="2,4,6")
    p.add_argument("--seeds", default="0,1,2")
    p.add_argument("--algs", default="bud,tod")
    p.add_argument("--cap", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-bound", action="store_true")
    _add_param_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check a compression result")
    p.add_argument("--input", required=True)
    p.add_argument("--compressed", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--stats")
    _add_param_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bound", help="evaluate the worst-case stretch bound")
    p.add_argument("--input", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--beta-spanner", type=float)
    _add_param_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("DLITE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except UnreachablePairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
