"""Budgeted compressors over the layer hierarchy.

Two complementary greedy strategies:

* :func:`bud_lite` starts from the pairwise spanner and abstracts runs of
  sibling nodes bottom-up into their parent until the node budget is met.
* :func:`tod_lite` starts from the coarsest connected skeleton (terminals
  plus common ancestors) and expands high-traffic nodes top-down while the
  budget allows.

Both return a :class:`CompressionResult` whose graph never contains nodes
outside the input graph; rewired edges that do not exist in the input carry
the exploration-aware weights of the weight model.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .analysis import achieved_distortion
from .graph import (NodeId, PathRecord, SceneGraph, TerminalQuery,
                    UnreachablePairError, dijkstra, euclidean,
                    lowest_common_ancestor, representative_child_node,
                    shortest_path)
from .spanner import SpannerParams, SpannerResult, build_spanner


@dataclass(frozen=True)
class Replacement:
    """One bottom-up abstraction step on a stored path."""

    pair_index: int
    layer: int
    parent: NodeId
    removed: tuple[NodeId, ...]
    old_segment_length: float
    new_segment_length: float
    size_after: int


@dataclass(frozen=True)
class Expansion:
    """One top-down expansion step, with any connectivity repairs."""

    node: NodeId
    layer: int
    added: tuple[NodeId, ...]
    repaired: tuple[NodeId, ...]
    size_after: int


@dataclass(frozen=True)
class CompressionResult:
    compressed: SceneGraph
    paths: tuple[Optional[PathRecord], ...]
    beta_achieved: float
    iterations_k: int
    nodes_abstracted: int
    met_budget: bool
    wall_time: float
    size_trace: tuple[int, ...]
    spanner: SpannerResult
    replacements: tuple[Replacement, ...] = ()
    expansions: tuple[Expansion, ...] = ()


@dataclass(frozen=True)
class HierarchicalSpanner:
    """A target subgraph closed upward under the parent hierarchy.

    Deleting every node outside ``target_nodes`` recovers the target
    subgraph exactly.
    """

    graph: SceneGraph
    target_nodes: frozenset[NodeId]


class _WeightOracle:
    """Weights for edges materialized during compression.

    Same-layer edges cost the Euclidean distance of the endpoint centroids;
    cross-layer edges follow the exploration-aware rule evaluated on the
    full input graph. Distance maps are cached per representative node.
    """

    def __init__(self, g: SceneGraph):
        self.g = g
        self._rep: dict[NodeId, NodeId] = {}
        self._adj_below: dict[int, dict[NodeId, dict[NodeId, float]]] = {}
        self._dist: dict[tuple[NodeId, int], Mapping[NodeId, float]] = {}

    def _restricted_adj(self, below: int) -> dict[NodeId, dict[NodeId, float]]:
        if below not in self._adj_below:
            adj: dict[NodeId, dict[NodeId, float]] = {}
            for layer in range(below):
                for n in self.g.nodes_in_layer(layer):
                    adj[n] = {m: w for m, w in self.g.neighbors(n).items()
                              if self.g.layer_of(m) < below}
            self._adj_below[below] = adj
        return self._adj_below[below]

    def cross_weight(self, hi: NodeId, lo: NodeId) -> float:
        if hi not in self._rep:
            self._rep[hi] = representative_child_node(self.g, hi)
        y0 = self._rep[hi]
        offset = euclidean(self.g, hi, y0)
        if y0 == lo:
            return offset
        key = (y0, self.g.layer_of(hi))
        if key not in self._dist:
            self._dist[key] = dijkstra(self._restricted_adj(key[1]), y0)
        return offset + self._dist[key].get(lo, math.inf)

    def edge_weight(self, u: NodeId, v: NodeId) -> float:
        if self.g.has_edge(u, v):
            return self.g.weight(u, v)
        lu, lv = self.g.layer_of(u), self.g.layer_of(v)
        if lu == lv:
            return euclidean(self.g, u, v)
        hi, lo = (u, v) if lu > lv else (v, u)
        return self.cross_weight(hi, lo)


def _compressed_graph(g: SceneGraph, nodes: Iterable[NodeId],
                      adj: Mapping[NodeId, Mapping[NodeId, float]]) -> SceneGraph:
    keep = sorted(nodes)
    rows = [(n, g.layer_of(n), g.pos_of(n), g.label_of(n)) for n in keep]
    edges = []
    for u in keep:
        for v, w in adj[u].items():
            if u < v:
                edges.append((u, v, w))
    parents = {c: p for c, p in g.parent_map().items()
               if c in adj and p in adj}
    return SceneGraph(g.layer_count, rows, edges, parents, check="basic")


def _finalize(
    g: SceneGraph,
    query: TerminalQuery,
    nodes: set[NodeId],
    adj: Mapping[NodeId, Mapping[NodeId, float]],
    spanner: SpannerResult,
    iterations_k: int,
    nodes_abstracted: int,
    wall_start: float,
    size_trace: list[int],
    replacements: tuple[Replacement, ...] = (),
    expansions: tuple[Expansion, ...] = (),
) -> CompressionResult:
    compressed = _compressed_graph(g, nodes, adj)
    beta, table = achieved_distortion(g, compressed, query.pairs)
    paths = tuple(shortest_path(compressed, s, t)
                  if compressed.has_node(s) and compressed.has_node(t) else None
                  for s, t in query.pairs)
    return CompressionResult(
        compressed=compressed,
        paths=paths,
        beta_achieved=beta,
        iterations_k=iterations_k,
        nodes_abstracted=nodes_abstracted,
        met_budget=len(nodes) <= query.budget,
        wall_time=time.perf_counter() - wall_start,
        size_trace=tuple(size_trace),
        spanner=spanner,
        replacements=replacements,
        expansions=expansions,
    )


# -- bottom-up compression -------------------------------------------------


class _BudState:
    def __init__(self, g: SceneGraph, query: TerminalQuery, spanner: SpannerResult,
                 cap: int):
        self.g = g
        self.query = query
        self.cap = cap
        self.terminals = set(query.terminals())
        self.oracle = _WeightOracle(g)
        sub = spanner.subgraph
        self.nodes: set[NodeId] = set(sub.node_ids())
        self.adj: dict[NodeId, dict[NodeId, float]] = {
            n: dict(sub.neighbors(n)) for n in sub.node_ids()}
        self.paths: list[list[NodeId]] = [list(rec.nodes) for rec in spanner.paths]
        self.usage: dict[NodeId, set[int]] = {n: set() for n in self.nodes}
        for i, path in enumerate(self.paths):
            for n in path:
                self.usage[n].add(i)
        self.k = 0
        self.removed_total = 0
        self.size_trace: list[int] = [len(self.nodes)]
        self.replacements: list[Replacement] = []

    def _find_run(self, pi: int, layer: int, strict: bool):
        """First candidate run ``(start, end, parent)`` on the path; in
        strict mode only runs whose replacement shrinks the graph."""
        g = self.g
        path = self.paths[pi]
        j = 1
        while j < len(path) - 1:
            u = path[j]
            if g.layer_of(u) != layer or u in self.terminals:
                j += 1
                continue
            par = g.parent_map().get(u)
            if par is None:
                j += 1
                continue
            end = j
            while (end + 1 < len(path) - 1
                   and end - j + 1 < self.cap
                   and g.layer_of(path[end + 1]) == layer
                   and path[end + 1] not in self.terminals
                   and g.parent_map().get(path[end + 1]) == par):
                end += 1
            if strict and self._net_change(pi, j, end, par) >= 0:
                j = end + 1
                continue
            return j, end, par
        return None

    def _net_change(self, pi: int, j: int, end: int, par: NodeId) -> int:
        path = self.paths[pi]
        run = path[j:end + 1]
        gain = 0 if par in self.nodes else 1
        outside = set(path[:j] + path[end + 1:])
        for m in set(run):
            if m in outside:
                continue
            if self.usage[m] <= {pi}:
                gain -= 1
        return gain

    def _segment_length(self, seq: list[NodeId]) -> float:
        return sum(self.adj[a][b] for a, b in zip(seq, seq[1:]))

    def _ensure_edge(self, a: NodeId, b: NodeId) -> None:
        if b in self.adj[a]:
            return
        w = self.oracle.edge_weight(a, b)
        self.adj[a][b] = w
        self.adj[b][a] = w

    def _replace(self, pi: int, j: int, end: int, par: NodeId, layer: int) -> None:
        path = self.paths[pi]
        prev, nxt = path[j - 1], path[end + 1]
        old_len = self._segment_length(path[j - 1:end + 2])
        removed = tuple(path[j:end + 1])

        if par not in self.nodes:
            self.nodes.add(par)
            self.adj[par] = {}
            self.usage[par] = set()
        # Collapse adjacent duplicates of the parent node: when prev or nxt
        # already is the parent, the spliced segment folds onto it.
        seg = [prev]
        if seg[-1] != par:
            seg.append(par)
        if seg[-1] != nxt:
            seg.append(nxt)
        for a, b in zip(seg, seg[1:]):
            self._ensure_edge(a, b)
        path[j - 1:end + 2] = seg
        new_len = self._segment_length(seg)

        self.usage[par].add(pi)
        for m in set(removed):
            if m not in path:
                self.usage[m].discard(pi)
            if not self.usage[m] and m not in self.terminals:
                self._delete_node(m)
        self.k += 1
        self.removed_total += len(removed)
        self.size_trace.append(len(self.nodes))
        self.replacements.append(Replacement(
            pair_index=pi, layer=layer, parent=par, removed=removed,
            old_segment_length=old_len, new_segment_length=new_len,
            size_after=len(self.nodes)))

    def _delete_node(self, m: NodeId) -> None:
        self.nodes.discard(m)
        for nbr in list(self.adj[m]):
            del self.adj[nbr][m]
        del self.adj[m]
        del self.usage[m]

    def run_layer(self, layer: int, budget: int) -> bool:
        """Process one layer; returns True once the budget is met."""
        strict = True
        while True:
            made = False
            for pi in range(len(self.paths)):
                found = self._find_run(pi, layer, strict)
                if found is None:
                    continue
                j, end, par = found
                self._replace(pi, j, end, par, layer)
                made = True
                if len(self.nodes) <= budget:
                    return True
            if made:
                strict = True
            elif strict:
                # No shrinking run is left: allow size-neutral abstractions
                # so the layer can still empty out.
                strict = False
            else:
                return False


def bud_lite(
    g: SceneGraph,
    query: TerminalQuery,
    params: SpannerParams = SpannerParams(),
    cap: int = 20,
    spanner: Optional[SpannerResult] = None,
) -> CompressionResult:
    """Bottom-up budgeted compression of the pairwise spanner.

    Starting from the spanner and its per-pair paths, runs of same-parent
    sibling nodes on a stored path are replaced by their parent, layer by
    layer from the bottom, with at most ``cap`` nodes per step. Nodes whose
    paths have all moved on are dropped; terminals are never touched.
    Returns as soon as the node count reaches the budget, or with
    ``met_budget=False`` after all layers are exhausted.
    """
    t0 = time.perf_counter()
    if cap < 1:
        raise ValueError("cap must be at least 1")
    query.validate(g)
    if spanner is None:
        spanner = build_spanner(g, query.pairs, params)
    state = _BudState(g, query, spanner, cap)

    def result() -> CompressionResult:
        return _finalize(g, query, state.nodes, state.adj, spanner,
                         state.k, state.removed_total, t0, state.size_trace,
                         replacements=tuple(state.replacements))

    if len(state.nodes) <= query.budget:
        return result()
    for layer in range(g.top_layer):
        if state.run_layer(layer, query.budget):
            return result()
    return result()


# -- top-down expansion ------------------------------------------------------


def hierarchical_spanner(
    g: SceneGraph,
    target: Union[SpannerResult, SceneGraph],
) -> HierarchicalSpanner:
    """Close a target subgraph upward through the parent hierarchy.

    The result holds the target, every ancestor of a target node, the
    cross-layer edges climbing the chains, and the intra-layer edges of the
    input graph between those ancestors.
    """
    tsub = target.subgraph if isinstance(target, SpannerResult) else target
    tnodes = frozenset(tsub.node_ids())
    hnodes: set[NodeId] = set(tnodes)
    for n in tnodes:
        cur = g.parent_map().get(n)
        while cur is not None and cur not in hnodes:
            hnodes.add(cur)
            cur = g.parent_map().get(cur)

    edges: dict[tuple[NodeId, NodeId], float] = {}
    for u, v, w in tsub.edges():
        edges[(u, v)] = w
    for m in hnodes:
        p = g.parent_map().get(m)
        if p is None or p not in hnodes:
            continue
        if m in tnodes and p in tnodes:
            continue  # edges between target nodes are the target's own
        edges[(min(m, p), max(m, p))] = g.weight(m, p)
    ancestors = hnodes - tnodes
    for u in ancestors:
        for v, w in g.neighbors(u).items():
            if v in ancestors and g.layer_of(v) == g.layer_of(u):
                edges[(min(u, v), max(u, v))] = w

    rows = [(n, g.layer_of(n), g.pos_of(n), g.label_of(n)) for n in sorted(hnodes)]
    parents = {c: p for c, p in g.parent_map().items()
               if c in hnodes and p in hnodes}
    graph = SceneGraph(g.layer_count, rows,
                       [(u, v, w) for (u, v), w in sorted(edges.items())],
                       parents, check="basic")
    return HierarchicalSpanner(graph=graph, target_nodes=tnodes)


class _TodState:
    def __init__(self, g: SceneGraph, query: TerminalQuery, target: SpannerResult):
        self.g = g
        self.query = query
        self.target = target
        self.hier = hierarchical_spanner(g, target)
        self.H = self.hier.graph
        self.oracle = _WeightOracle(g)
        self._childmap: dict[NodeId, list[NodeId]] = {}
        for c, p in self.H.parent_map().items():
            self._childmap.setdefault(p, []).append(c)
        for kids in self._childmap.values():
            kids.sort()
        self.priority = self._priorities()
        self.nodes: set[NodeId] = set()
        self.adj: dict[NodeId, dict[NodeId, float]] = {}
        self.expanded: set[NodeId] = set()
        self.expansions: list[Expansion] = []
        self.size_trace: list[int] = []

    def _priorities(self) -> dict[NodeId, int]:
        d = {n: 0 for n in self.H.node_ids()}
        for rec in self.target.paths:
            for n in set(rec.nodes):
                d[n] += 1
        for layer in range(1, self.g.layer_count):
            for n in self.H.nodes_in_layer(layer):
                d[n] += sum(d[c] for c in self._children_h(n))
        return d

    def _children_h(self, n: NodeId) -> tuple[NodeId, ...]:
        return tuple(self._childmap.get(n, ()))

    def _add_node(self, n: NodeId) -> None:
        if n not in self.nodes:
            self.nodes.add(n)
            self.adj.setdefault(n, {})

    def _add_edge(self, a: NodeId, b: NodeId, w: float) -> None:
        self.adj[a][b] = w
        self.adj[b][a] = w

    def initialize(self) -> None:
        for s, t in self.query.pairs:
            self._add_node(s)
            self._add_node(t)
        for s, t in self.query.pairs:
            if s == t:
                continue
            a = lowest_common_ancestor(self.g, s, t)
            if a is None:
                raise UnreachablePairError((s, t), "no common ancestor")
            self._add_node(a)
            for term in (s, t):
                if term not in self.adj[a]:
                    w = self.oracle.cross_weight(a, term)
                    if math.isinf(w):
                        raise UnreachablePairError((s, t), "ancestor link")
                    self._add_edge(a, term, w)
        self.size_trace.append(len(self.nodes))

    def _connected(self, adj, s: NodeId, t: NodeId) -> bool:
        return t in self._component(adj, s)

    @staticmethod
    def _component(adj, start: NodeId) -> set[NodeId]:
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    def _bridge(self, comp_s: set[NodeId], comp_t: set[NodeId],
                banned: set[NodeId]) -> Optional[list[NodeId]]:
        """Cheapest path through allowed hierarchy nodes linking the two
        components; deterministic via id tie-breaks."""
        H = self.H
        dist: dict[NodeId, float] = {}
        pred: dict[NodeId, NodeId] = {}
        heap: list[tuple[float, NodeId]] = []
        for src in sorted(comp_s):
            dist[src] = 0.0
            heapq.heappush(heap, (0.0, src))
        done: set[NodeId] = set()
        hit: Optional[NodeId] = None
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            if u in comp_t:
                hit = u
                break
            for v, w in H.neighbors(u).items():
                if v in banned:
                    continue
                nd = d + w
                if nd < dist.get(v, math.inf):
                    dist[v] = nd
                    pred[v] = u
                    heapq.heappush(heap, (nd, v))
        if hit is None:
            return None
        path = [hit]
        while path[-1] not in comp_s:
            path.append(pred[path[-1]])
        path.reverse()
        return path

    def try_expand(self, n: NodeId, budget: int) -> bool:
        kids = self._children_h(n)
        if not kids:
            return False
        new_nodes = set(self.nodes)
        new_adj = {u: dict(vs) for u, vs in self.adj.items()}
        new_nodes.discard(n)
        for nbr in list(new_adj[n]):
            del new_adj[nbr][n]
        del new_adj[n]
        added = []
        for c in kids:
            if c not in new_nodes:
                new_nodes.add(c)
                new_adj.setdefault(c, {})
                added.append(c)
        for c in kids:
            for m, w in self.H.neighbors(c).items():
                if m in new_nodes and m != c:
                    new_adj[c][m] = w
                    new_adj[m][c] = w

        banned = self.expanded | {n}
        repaired: list[NodeId] = []
        for s, t in self.query.pairs:
            if s == t:
                continue
            comp_s = self._component(new_adj, s)
            if t in comp_s:
                continue
            comp_t = self._component(new_adj, t)
            bridge = self._bridge(comp_s, comp_t, banned)
            if bridge is None:
                return False
            for b in bridge:
                if b not in new_nodes:
                    new_nodes.add(b)
                    new_adj.setdefault(b, {})
                    repaired.append(b)
            for a, b in zip(bridge, bridge[1:]):
                new_adj[a][b] = self.H.weight(a, b)
                new_adj[b][a] = self.H.weight(a, b)

        if len(new_nodes) > budget:
            return False
        self.nodes = new_nodes
        self.adj = new_adj
        self.expanded.add(n)
        self.size_trace.append(len(self.nodes))
        self.expansions.append(Expansion(
            node=n, layer=self.g.layer_of(n), added=tuple(added),
            repaired=tuple(repaired), size_after=len(self.nodes)))
        return True


def tod_lite(
    g: SceneGraph,
    query: TerminalQuery,
    params: SpannerParams = SpannerParams(),
    spanner: Optional[SpannerResult] = None,
) -> CompressionResult:
    """Top-down budgeted expansion toward the pairwise spanner.

    The compressed graph starts as terminals plus each pair's lowest common
    ancestor. Layer by layer from the top, present nodes are expanded into
    their hierarchy children in order of how many pair paths they serve,
    pulling in neighboring hierarchy nodes when a pair would otherwise
    disconnect; an expansion only happens when the resulting node count
    stays within budget. A layer pass that expands nothing ends the run.
    """
    t0 = time.perf_counter()
    query.validate(g)
    if spanner is None:
        spanner = build_spanner(g, query.pairs, params)
    state = _TodState(g, query, spanner)
    state.initialize()

    if len(state.nodes) <= query.budget:
        for layer in range(g.top_layer, 0, -1):
            snapshot = sorted((n for n in state.nodes if g.layer_of(n) == layer),
                              key=lambda n: (-state.priority.get(n, 0), n))
            if not snapshot:
                continue
            any_expanded = False
            for n in snapshot:
                if n not in state.nodes:
                    continue
                if state.try_expand(n, query.budget):
                    any_expanded = True
            if not any_expanded:
                break

    return _finalize(g, query, state.nodes, state.adj, spanner,
                     len(state.expansions), 0, t0, state.size_trace,
                     expansions=tuple(state.expansions))
