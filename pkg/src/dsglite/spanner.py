"""Pairwise weighted-additive spanner construction and stretch verification.

The builder combines three seed edge sets (per-node lightest edges, a random
cross-layer sample, and a greedy multiplicative spanner) and then buys whole
shortest paths for terminal pairs whose stretch would otherwise exceed the
additive allowance ``c * n^((1-eps)/2) * alpha * W_max(s, t)``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .graph import (NodeId, PathRecord, SceneGraph, UnreachablePairError,
                    dijkstra, lex_shortest_path, _record_from_nodes,
                    shortest_path)

Edge = tuple[NodeId, NodeId]


def _norm(u: NodeId, v: NodeId) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class SpannerParams:
    eps: float = 0.5
    p: float = 0.1
    alpha: float = 4.0
    c: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not self.alpha > 2.0:
            raise ValueError("alpha must exceed 2")
        if not self.c > 0.0:
            raise ValueError("c must be positive")

    def additive_allowance(self, num_nodes: int, wmax: float) -> float:
        return self.c * num_nodes ** ((1.0 - self.eps) / 2.0) * self.alpha * wmax


@dataclass(frozen=True)
class SpannerResult:
    subgraph: SceneGraph
    paths: tuple[PathRecord, ...]
    additive_budgets: tuple[float, ...]
    params: SpannerParams


def d_light_init(g: SceneGraph, d: int) -> frozenset[Edge]:
    """Union over nodes of each node's ``d`` lightest incident edges
    (ties break to the smaller opposite node id)."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    kept: set[Edge] = set()
    for n in g.node_ids():
        incident = sorted((w, m) for m, w in g.neighbors(n).items())
        for w, m in incident[:d]:
            kept.add(_norm(n, m))
    return frozenset(kept)


def sample_cross_layer(g: SceneGraph, p: float, seed: int) -> frozenset[Edge]:
    """Each cross-layer edge is kept independently with probability ``p``
    using a generator fully determined by ``seed``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    kept: set[Edge] = set()
    for u, v, _ in g.edges():
        if g.layer_of(u) != g.layer_of(v):
            if rng.random() < p:
                kept.add((u, v))
    return frozenset(kept)


def greedy_multiplicative(g: SceneGraph, alpha: float) -> frozenset[Edge]:
    """Classic greedy multiplicative spanner.

    Edges are scanned in nondecreasing weight (ties by id pair); an edge is
    added exactly when the spanner built so far cannot connect its endpoints
    within ``alpha`` times its weight. The result satisfies
    ``d'(u, v) <= alpha * d_g(u, v)`` for all node pairs.
    """
    if alpha < 1.0:
        raise ValueError("alpha must be at least 1")
    ids = g.node_ids()
    index = {n: i for i, n in enumerate(ids)}
    n = len(ids)
    adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    dist = [math.inf] * n
    touched: list[int] = []
    kept: set[Edge] = set()
    for w, u, v in sorted((w, u, v) for u, v, w in g.edges()):
        ui, vi = index[u], index[v]
        cutoff = alpha * w
        # Bounded search: succeed as soon as vi settles within the cutoff.
        dist[ui] = 0.0
        touched.append(ui)
        heap = [(0.0, ui)]
        reachable = False
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist[x]:
                continue
            if x == vi:
                reachable = True
                break
            for y, wy in adj[x]:
                nd = d + wy
                if nd <= cutoff and nd < dist[y]:
                    if math.isinf(dist[y]):
                        touched.append(y)
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        for t in touched:
            dist[t] = math.inf
        touched.clear()
        if not reachable:
            kept.add((u, v))
            adj[ui].append((vi, w))
            adj[vi].append((ui, w))
    return frozenset(kept)


def _edge_adjacency(g: SceneGraph, edge_sets: Iterable[frozenset[Edge]]):
    adj: dict[NodeId, dict[NodeId, float]] = {n: {} for n in g.node_ids()}
    for edges in edge_sets:
        for u, v in edges:
            w = g.weight(u, v)
            adj[u][v] = w
            adj[v][u] = w
    return adj


def build_spanner(
    g: SceneGraph,
    pairs: Iterable[tuple[NodeId, NodeId]],
    params: SpannerParams = SpannerParams(),
) -> SpannerResult:
    """Build the pairwise spanner for the given terminal pairs.

    A working graph unions the three seed edge sets. Pairs are then
    processed in nondecreasing ``W_max`` order (ties by input position):
    when the working graph misses a pair's additive allowance, the pair's
    full-graph shortest path is added to both the working graph and the
    output; otherwise the working-graph path is added to the output. The
    output keeps exactly the nodes and edges of the chosen per-pair paths.
    """
    params.validate()
    pairs = tuple((int(s), int(t)) for s, t in pairs)
    n = g.num_nodes
    d = math.ceil(n ** params.eps)

    base_records: list[PathRecord] = []
    for s, t in pairs:
        rec = shortest_path(g, s, t)
        if rec is None:
            raise UnreachablePairError((s, t), "input graph")
        base_records.append(rec)

    working = _edge_adjacency(g, (
        d_light_init(g, d),
        sample_cross_layer(g, params.p, params.seed),
        greedy_multiplicative(g, params.alpha),
    ))

    order = sorted(range(len(pairs)), key=lambda i: (base_records[i].max_edge_weight, i))
    chosen: list[Optional[PathRecord]] = [None] * len(pairs)
    budgets = [params.additive_allowance(n, base_records[i].max_edge_weight)
               for i in range(len(pairs))]
    for i in order:
        s, t = pairs[i]
        base = base_records[i]
        d_work = dijkstra(working, s, targets=(t,)).get(t, math.inf)
        if d_work > base.length + budgets[i]:
            # Buy the exact path: insert it into the working graph too so
            # later pairs can reuse it.
            for a, b in zip(base.nodes, base.nodes[1:]):
                w = g.weight(a, b)
                working[a][b] = w
                working[b][a] = w
            chosen[i] = base
        else:
            nodes = lex_shortest_path(working, s, t)
            assert nodes is not None
            chosen[i] = _record_from_nodes(working, pairs[i], nodes)

    keep_nodes: set[NodeId] = set()
    keep_edges: set[Edge] = set()
    for i, rec in enumerate(chosen):
        assert rec is not None
        keep_nodes.update(rec.nodes)
        keep_nodes.update(pairs[i])
        keep_edges.update(_norm(a, b) for a, b in zip(rec.nodes, rec.nodes[1:]))
    sub = g.subgraph(sorted(keep_nodes), sorted(keep_edges))
    return SpannerResult(subgraph=sub, paths=tuple(chosen),
                         additive_budgets=tuple(budgets), params=params)


@dataclass(frozen=True)
class StretchEntry:
    pair: tuple[NodeId, NodeId]
    dist_full: float
    dist_sub: float
    max_edge_weight: float
    bound: float
    slack: float
    ok: bool


@dataclass(frozen=True)
class StretchReport:
    alpha: float
    beta: float
    entries: tuple[StretchEntry, ...]
    ok: bool = field(default=False)
    worst: Optional[StretchEntry] = None


def verify_stretch(
    g: SceneGraph,
    sub: SceneGraph,
    alpha: float,
    beta: float,
    pairs: Optional[Iterable[tuple[NodeId, NodeId]]] = None,
) -> StretchReport:
    """Check ``d_sub(u, v) <= alpha * d_g(u, v) + beta * W_max(u, v)`` for
    the given pairs (default: all node pairs of ``sub``).

    Violations are collected, not raised; ``worst`` is the entry with the
    most negative slack (or the tightest pair when everything holds).
    """
    if pairs is None:
        ids = sub.node_ids()
        pairs = [(u, v) for i, u in enumerate(ids) for v in ids[i + 1:]]
    entries = []
    for u, v in pairs:
        rec = shortest_path(g, u, v)
        if rec is None:
            raise UnreachablePairError((u, v), "full graph")
        d_sub = (dijkstra(sub.adjacency, u, targets=(v,)).get(v, math.inf)
                 if sub.has_node(u) and sub.has_node(v) else math.inf)
        bound = alpha * rec.length + beta * rec.max_edge_weight
        slack = bound - d_sub
        entries.append(StretchEntry(pair=(u, v), dist_full=rec.length,
                                    dist_sub=d_sub, max_edge_weight=rec.max_edge_weight,
                                    bound=bound, slack=slack,
                                    ok=d_sub <= bound + 1e-9))
    worst = min(entries, key=lambda e: e.slack, default=None)
    return StretchReport(alpha=alpha, beta=beta, entries=tuple(entries),
                         ok=all(e.ok for e in entries), worst=worst)
