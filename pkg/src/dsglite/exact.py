"""Exact optimum of the budgeted compression problem.

The mixed-integer model carries one binary variable per node, one binary
edge-use variable per directed edge per terminal pair, a continuous stretch
objective, and the distortion / flow / degree / linking / budget constraint
groups. At desk scale the optimum is found by a depth-first branch and bound
over node selections whose bound evaluates induced-subgraph distances
directly, so no external solver is required; the full model can still be
exported in LP format for cross-checking with any solver.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .graph import (NodeId, SceneGraph, TerminalQuery, dijkstra,
                    lex_shortest_path, shortest_path)

BRUTE_FORCE_NODE_LIMIT = 20


@dataclass(frozen=True)
class ExactModel:
    """Explicit optimization model for one compression instance."""

    g: SceneGraph
    query: TerminalQuery
    node_vars: tuple[NodeId, ...]
    directed_edges: tuple[tuple[NodeId, NodeId], ...]  # both orientations
    pair_dist: tuple[float, ...]       # d_g(s, t) per pair
    pair_wmax: tuple[float, ...]       # W_max(s, t) per pair

    @property
    def num_edge_vars(self) -> int:
        return len(self.directed_edges) * len(self.query.pairs)

    def flow_rhs(self, pair_index: int, node: NodeId) -> int:
        s, t = self.query.pairs[pair_index]
        if node == s:
            return 1
        if node == t:
            return -1
        return 0

    def lp_string(self) -> str:
        """Deterministic LP-format rendering of the model."""
        pairs = self.query.pairs

        def xn(n: NodeId) -> str:
            return f"x_n{n}"

        def xe(pi: int, i: NodeId, j: NodeId) -> str:
            return f"x_p{pi}_e{i}_{j}"

        out = ["\\ budgeted subgraph stretch minimization", "Minimize", " obj: beta",
               "Subject To"]
        for pi in range(len(pairs)):
            terms = [f"{w!r} {xe(pi, i, j)}"
                     for (i, j), w in zip(self.directed_edges, self._dir_weights())]
            out.append(f" dist_p{pi}: " + " + ".join(terms)
                       + f" - {self.pair_wmax[pi]!r} beta <= {self.pair_dist[pi]!r}")
        for pi in range(len(pairs)):
            for n in self.node_vars:
                outs = [xe(pi, i, j) for i, j in self.directed_edges if i == n]
                ins = [xe(pi, j, i) for j, i in self.directed_edges if i == n]
                lhs = " + ".join(outs) + "".join(f" - {v}" for v in ins)
                out.append(f" flow_p{pi}_n{n}: {lhs} = {self.flow_rhs(pi, n)}")
                out.append(f" deg_p{pi}_n{n}: " + " + ".join(outs) + " <= 1")
        for pi in range(len(pairs)):
            for u, v in self.directed_edges:
                if u < v:
                    for n in (u, v):
                        out.append(
                            f" link_p{pi}_n{n}_e{u}_{v}: {xn(n)} - {xe(pi, u, v)}"
                            f" - {xe(pi, v, u)} >= 0")
        out.append(" budget: " + " + ".join(xn(n) for n in self.node_vars)
                   + f" <= {self.query.budget}")
        out.append("Bounds")
        out.append(" beta >= 0")
        out.append("Binary")
        for n in self.node_vars:
            out.append(f" {xn(n)}")
        for pi in range(len(pairs)):
            for i, j in self.directed_edges:
                out.append(f" {xe(pi, i, j)}")
        out.append("End")
        return "\n".join(out) + "\n"

    def _dir_weights(self) -> list[float]:
        return [self.g.weight(i, j) for i, j in self.directed_edges]

    def export_lp(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.lp_string())


def build_ilp_model(g: SceneGraph, query: TerminalQuery) -> ExactModel:
    """Assemble the exact model over the bidirected edge set."""
    query.validate(g)
    pair_dist = []
    pair_wmax = []
    for s, t in query.pairs:
        rec = shortest_path(g, s, t)
        if rec is None:
            raise ValueError(f"pair ({s}, {t}) is disconnected in the input graph")
        pair_dist.append(rec.length)
        pair_wmax.append(rec.max_edge_weight)
    directed = []
    for u, v, _ in g.edges():
        directed.append((u, v))
        directed.append((v, u))
    directed.sort()
    return ExactModel(g=g, query=query, node_vars=g.node_ids(),
                      directed_edges=tuple(directed),
                      pair_dist=tuple(pair_dist), pair_wmax=tuple(pair_wmax))


@dataclass(frozen=True)
class ExactSolution:
    status: str                     # "optimal" | "timeout" | "infeasible"
    beta_opt: float
    selected_nodes: tuple[NodeId, ...]
    pair_paths: tuple[Optional[tuple[NodeId, ...]], ...]
    nodes_explored: int = 0
    branches: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _subset_beta(
    g: SceneGraph,
    keep: frozenset[NodeId],
    pairs: tuple[tuple[NodeId, NodeId], ...],
    pair_dist: tuple[float, ...],
    pair_wmax: tuple[float, ...],
) -> float:
    """Worst-pair stretch of the subgraph induced by ``keep`` (inf when a
    pair disconnects)."""
    adj = {n: {m: w for m, w in g.neighbors(n).items() if m in keep}
           for n in keep}
    worst = 0.0
    for i, (s, t) in enumerate(pairs):
        if s == t:
            continue
        d = dijkstra(adj, s, targets=(t,)).get(t, math.inf)
        if math.isinf(d):
            return math.inf
        if pair_wmax[i] > 0:
            worst = max(worst, (d - pair_dist[i]) / pair_wmax[i])
    return worst


def _solution_paths(g: SceneGraph, keep: frozenset[NodeId],
                    pairs) -> tuple[Optional[tuple[NodeId, ...]], ...]:
    adj = {n: {m: w for m, w in g.neighbors(n).items() if m in keep}
           for n in keep}
    paths = []
    for s, t in pairs:
        nodes = lex_shortest_path(adj, s, t) if s in keep and t in keep else None
        paths.append(tuple(nodes) if nodes is not None else None)
    return tuple(paths)


def solve_exact(model: ExactModel, time_limit: Optional[float] = None) -> ExactSolution:
    """Depth-first branch and bound over node selections.

    Nodes are branched in id order, exclusion first. The lower bound of a
    partial state is the stretch of the subgraph induced by all not-yet
    excluded nodes, which only grows as exclusions accumulate; any state
    with at most ``budget`` undecided-or-included nodes is a leaf whose
    bound is attained exactly. Hitting the time limit returns the incumbent
    with status ``"timeout"``.
    """
    g = model.g
    query = model.query
    pairs = query.pairs
    terminals = set(query.terminals())
    free = [n for n in g.node_ids() if n not in terminals]
    budget = query.budget
    deadline = None if time_limit is None else time.perf_counter() + float(time_limit)

    best_beta = math.inf
    best_keep: Optional[frozenset[NodeId]] = None
    explored = 0
    branches = 0
    timed_out = False

    if budget < len(terminals):
        return ExactSolution(status="infeasible", beta_opt=math.inf,
                             selected_nodes=(), pair_paths=(None,) * len(pairs))

    all_nodes = frozenset(g.node_ids())

    def recurse(idx: int, excluded: frozenset[NodeId]) -> None:
        nonlocal best_beta, best_keep, explored, branches, timed_out
        if timed_out:
            return
        if deadline is not None and time.perf_counter() > deadline:
            timed_out = True
            return
        explored += 1
        keep = all_nodes - excluded
        lb = _subset_beta(g, keep, pairs, model.pair_dist, model.pair_wmax)
        if lb >= best_beta:
            return
        if len(keep) <= budget:
            # Keeping every undecided node attains the bound.
            best_beta = lb
            best_keep = keep
            return
        if idx == len(free):
            return  # over budget with no nodes left to exclude
        branches += 1
        recurse(idx + 1, excluded | {free[idx]})
        recurse(idx + 1, excluded)

    recurse(0, frozenset())

    if best_keep is None:
        status = "timeout" if timed_out else "infeasible"
        return ExactSolution(status=status, beta_opt=math.inf, selected_nodes=(),
                             pair_paths=(None,) * len(pairs),
                             nodes_explored=explored, branches=branches)
    status = "timeout" if timed_out else "optimal"
    return ExactSolution(status=status, beta_opt=best_beta,
                         selected_nodes=tuple(sorted(best_keep)),
                         pair_paths=_solution_paths(g, best_keep, pairs),
                         nodes_explored=explored, branches=branches)


def brute_force_oracle(g: SceneGraph, query: TerminalQuery) -> ExactSolution:
    """Exhaustive reference optimum for instances of at most
    ``BRUTE_FORCE_NODE_LIMIT`` nodes.

    Every node subset containing the terminals and within budget is scored
    by induced-subgraph stretch; ties prefer smaller subsets, then the
    lexicographically first. Kept deliberately independent of the branch
    and bound."""
    if g.num_nodes > BRUTE_FORCE_NODE_LIMIT:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_NODE_LIMIT} nodes, "
            f"got {g.num_nodes}")
    query.validate(g)
    pairs = query.pairs
    pair_dist = []
    pair_wmax = []
    for s, t in pairs:
        rec = shortest_path(g, s, t)
        if rec is None:
            raise ValueError(f"pair ({s}, {t}) is disconnected in the input graph")
        pair_dist.append(rec.length)
        pair_wmax.append(rec.max_edge_weight)
    pair_dist = tuple(pair_dist)
    pair_wmax = tuple(pair_wmax)

    terminals = tuple(query.terminals())
    others = [n for n in g.node_ids() if n not in set(terminals)]
    best_beta = math.inf
    best_keep: Optional[frozenset[NodeId]] = None
    max_extra = min(len(others), query.budget - len(terminals))
    if max_extra < 0:
        return ExactSolution(status="infeasible", beta_opt=math.inf,
                             selected_nodes=(), pair_paths=(None,) * len(pairs))
    for extra in range(max_extra + 1):
        for combo in itertools.combinations(others, extra):
            keep = frozenset(terminals) | frozenset(combo)
            beta = _subset_beta(g, keep, pairs, pair_dist, pair_wmax)
            if beta < best_beta:
                best_beta = beta
                best_keep = keep
    if best_keep is None or math.isinf(best_beta):
        return ExactSolution(status="infeasible", beta_opt=math.inf,
                             selected_nodes=(), pair_paths=(None,) * len(pairs))
    return ExactSolution(status="optimal", beta_opt=best_beta,
                         selected_nodes=tuple(sorted(best_keep)),
                         pair_paths=_solution_paths(g, best_keep, pairs))
