"""Layered scene-graph model: nodes with positions, intra/cross-layer edges,
parent hierarchy, shortest paths, and the exploration-aware weight model.

Layer 0 holds free-space "place" nodes; higher layers hold progressively
coarser abstractions (rooms, buildings). Every node below the top layer has
exactly one parent in the layer immediately above. Graphs are immutable after
construction; all mutating operations return new values.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

NodeId = int

#: Absolute tolerance for distance equality comparisons (meters).
ATOL = 1e-9


class SchemaError(ValueError):
    """Raised when a graph or query violates its structural contract."""


class UnreachablePairError(RuntimeError):
    """Raised when a terminal pair cannot be connected."""

    def __init__(self, pair: tuple[NodeId, NodeId], context: str = ""):
        self.pair = pair
        msg = f"terminal pair {pair} is unreachable"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


@dataclass(frozen=True)
class PathRecord:
    """A concrete path between a terminal pair.

    ``length`` is the sum of traversed edge weights; ``max_edge_weight`` is
    the heaviest edge on the path (0 for single-node paths).
    """

    pair: tuple[NodeId, NodeId]
    nodes: tuple[NodeId, ...]
    length: float
    max_edge_weight: float


@dataclass(frozen=True)
class TerminalQuery:
    """Ordered source/target pairs (all layer-0 nodes) plus a node budget."""

    pairs: tuple[tuple[NodeId, NodeId], ...]
    budget: int

    def terminals(self) -> tuple[NodeId, ...]:
        seen: dict[NodeId, None] = {}
        for s, t in self.pairs:
            seen.setdefault(s)
            seen.setdefault(t)
        return tuple(seen)

    def validate(self, g: "SceneGraph") -> None:
        if not self.pairs:
            raise SchemaError("query has no terminal pairs")
        if self.budget < 1:
            raise SchemaError("budget must be a positive integer")
        for s, t in self.pairs:
            if s == t:
                raise SchemaError(f"pair ({s}, {t}) has identical source and target")
            for n in (s, t):
                if not g.has_node(n):
                    raise SchemaError(f"terminal {n} is not a node of the graph")
                if g.layer_of(n) != 0:
                    raise SchemaError(f"terminal {n} is not in layer 0")


class SceneGraph:
    """Immutable layered weighted undirected graph.

    Parameters
    ----------
    layer_count:
        Number of layers ``L + 1``; layers are indexed ``0..L``.
    nodes:
        Iterable of ``(id, layer, position, label)``.
    edges:
        Iterable of ``(u, v, weight)``; ``weight`` may be ``None`` for
        unweighted input (fill with :func:`assign_weights`).
    parents:
        Mapping ``child -> parent`` covering every node below the top layer.
    check:
        ``"full"`` enforces every structural invariant (the contract for
        input scene graphs), ``"basic"`` only sanity (used for compressed
        outputs, which may drop parents and carry multi-layer edges).
    """

    __slots__ = ("layer_count", "_layer", "_pos", "_label", "_adj", "_parent",
                 "_children", "_layer_nodes", "_poscache")

    def __init__(
        self,
        layer_count: int,
        nodes: Iterable[tuple[NodeId, int, Sequence[float], str]],
        edges: Iterable[tuple[NodeId, NodeId, Optional[float]]],
        parents: Mapping[NodeId, NodeId],
        check: str = "full",
    ):
        if layer_count < 1:
            raise SchemaError("layer_count must be >= 1")
        self.layer_count = int(layer_count)
        self._layer: dict[NodeId, int] = {}
        self._pos: dict[NodeId, np.ndarray] = {}
        self._label: dict[NodeId, str] = {}
        self._adj: dict[NodeId, dict[NodeId, float]] = {}
        for nid, layer, pos, label in nodes:
            nid = int(nid)
            if nid in self._layer:
                raise SchemaError(f"duplicate node id {nid}")
            if nid < 0:
                raise SchemaError(f"node id {nid} must be nonnegative")
            if not 0 <= layer < self.layer_count:
                raise SchemaError(f"node {nid} layer {layer} out of range")
            p = np.asarray(pos, dtype=float)
            if p.shape != (3,):
                raise SchemaError(f"node {nid} position must be a 3-vector")
            self._layer[nid] = int(layer)
            self._pos[nid] = p
            self._pos[nid].setflags(write=False)
            self._label[nid] = str(label)
            self._adj[nid] = {}
        for u, v, w in edges:
            self._add_edge(int(u), int(v), w)
        self._parent: dict[NodeId, NodeId] = {}
        for c, p in parents.items():
            c, p = int(c), int(p)
            if c not in self._layer or p not in self._layer:
                raise SchemaError(f"parent entry ({c}, {p}) references unknown node")
            self._parent[c] = p
        self._children: dict[NodeId, tuple[NodeId, ...]] = {}
        kids: dict[NodeId, list[NodeId]] = {}
        for c, p in self._parent.items():
            kids.setdefault(p, []).append(c)
        for p, cs in kids.items():
            self._children[p] = tuple(sorted(cs))
        self._layer_nodes: dict[int, tuple[NodeId, ...]] = {}
        by_layer: dict[int, list[NodeId]] = {}
        for nid, layer in self._layer.items():
            by_layer.setdefault(layer, []).append(nid)
        for layer, ids in by_layer.items():
            self._layer_nodes[layer] = tuple(sorted(ids))
        self._poscache: dict[int, np.ndarray] = {}
        if check == "full":
            self.validate()
        elif check != "basic":
            raise ValueError(f"unknown check mode {check!r}")

    def _add_edge(self, u: NodeId, v: NodeId, w: Optional[float]) -> None:
        if u == v:
            raise SchemaError(f"self-edge on node {u}")
        if u not in self._adj or v not in self._adj:
            raise SchemaError(f"edge ({u}, {v}) references unknown node")
        if v in self._adj[u]:
            raise SchemaError(f"duplicate edge ({u}, {v})")
        wf = math.nan if w is None else float(w)
        if not math.isnan(wf) and wf < 0:
            raise SchemaError(f"edge ({u}, {v}) has negative weight {wf}")
        self._adj[u][v] = wf
        self._adj[v][u] = wf

    # -- inspection ------------------------------------------------------

    @property
    def top_layer(self) -> int:
        return self.layer_count - 1

    @property
    def num_nodes(self) -> int:
        return len(self._layer)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self._adj.values()) // 2

    def node_ids(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self._layer))

    def has_node(self, n: NodeId) -> bool:
        return n in self._layer

    def layer_of(self, n: NodeId) -> int:
        return self._layer[n]

    def pos_of(self, n: NodeId) -> np.ndarray:
        return self._pos[n]

    def label_of(self, n: NodeId) -> str:
        return self._label[n]

    def nodes_in_layer(self, layer: int) -> tuple[NodeId, ...]:
        return self._layer_nodes.get(layer, ())

    def neighbors(self, n: NodeId) -> Mapping[NodeId, float]:
        return self._adj[n]

    def layer_positions(self, layer: int) -> np.ndarray:
        """Positions of a layer's nodes stacked in node-id order (cached)."""
        if layer not in self._poscache:
            ids = self.nodes_in_layer(layer)
            arr = (np.stack([self._pos[n] for n in ids])
                   if ids else np.zeros((0, 3)))
            arr.setflags(write=False)
            self._poscache[layer] = arr
        return self._poscache[layer]

    def has_edge(self, u: NodeId, v: NodeId) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: NodeId, v: NodeId) -> float:
        return self._adj[u][v]

    def edges(self) -> Iterator[tuple[NodeId, NodeId, float]]:
        """Yield each undirected edge once as ``(u, v, w)`` with ``u < v``."""
        for u in sorted(self._adj):
            for v, w in sorted(self._adj[u].items()):
                if u < v:
                    yield u, v, w

    @property
    def adjacency(self) -> Mapping[NodeId, Mapping[NodeId, float]]:
        """Read-only adjacency view (do not mutate)."""
        return self._adj

    def parent_map(self) -> Mapping[NodeId, NodeId]:
        return self._parent

    # -- invariants ------------------------------------------------------

    def validate(self) -> None:
        """Enforce the full structural contract for input scene graphs."""
        top = self.top_layer
        for n, layer in self._layer.items():
            if layer < top:
                p = self._parent.get(n)
                if p is None:
                    raise SchemaError(f"node {n} below top layer has no parent")
                if self._layer[p] != layer + 1:
                    raise SchemaError(
                        f"parent of {n} must be one layer above, got layer {self._layer[p]}")
                if not self.has_edge(n, p):
                    raise SchemaError(f"parent link ({n}, {p}) missing from edges")
            elif n in self._parent:
                raise SchemaError(f"top-layer node {n} cannot have a parent")
        for u, v, w in self.edges():
            gap = abs(self._layer[u] - self._layer[v])
            if gap > 1:
                raise SchemaError(f"edge ({u}, {v}) spans {gap} layers")

    # -- derivation ------------------------------------------------------

    def subgraph(
        self,
        nodes: Iterable[NodeId],
        edges: Optional[Iterable[tuple[NodeId, NodeId]]] = None,
    ) -> "SceneGraph":
        """Restriction to ``nodes`` (induced edges, or exactly ``edges``)."""
        keep = set(nodes)
        node_rows = [(n, self._layer[n], self._pos[n], self._label[n])
                     for n in sorted(keep)]
        if edges is None:
            edge_rows = [(u, v, w) for u, v, w in self.edges()
                         if u in keep and v in keep]
        else:
            edge_rows = [(u, v, self._adj[u][v]) for u, v in edges
                         if u in keep and v in keep]
        parents = {c: p for c, p in self._parent.items()
                   if c in keep and p in keep}
        return SceneGraph(self.layer_count, node_rows, edge_rows, parents,
                          check="basic")

    def remap_dense(self) -> tuple["SceneGraph", dict[NodeId, NodeId]]:
        """Renumber nodes to ``0..n-1`` (sorted order); returns old->new map."""
        ids = self.node_ids()
        table = {old: new for new, old in enumerate(ids)}
        nodes = [(table[n], self._layer[n], self._pos[n], self._label[n]) for n in ids]
        edges = [(table[u], table[v], w) for u, v, w in self.edges()]
        parents = {table[c]: table[p] for c, p in self._parent.items()}
        return SceneGraph(self.layer_count, nodes, edges, parents, check="basic"), table


# -- shortest paths ------------------------------------------------------


def dijkstra(
    adj: Mapping[NodeId, Mapping[NodeId, float]],
    source: NodeId,
    targets: Optional[Iterable[NodeId]] = None,
    cutoff: float = math.inf,
) -> dict[NodeId, float]:
    """Single-source distances over an adjacency mapping.

    Stops once every node in ``targets`` is settled or distances exceed
    ``cutoff``. Heap ties resolve by ascending node id, so the settle order
    is deterministic.
    """
    pending = set(targets) if targets is not None else None
    dist: dict[NodeId, float] = {source: 0.0}
    done: set[NodeId] = set()
    heap: list[tuple[float, NodeId]] = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if pending is not None:
            pending.discard(u)
            if not pending:
                break
        for v, w in adj[u].items():
            nd = d + w
            if nd > cutoff:
                continue
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return {n: dist[n] for n in done}


def distance(
    adj: Mapping[NodeId, Mapping[NodeId, float]],
    s: NodeId,
    t: NodeId,
) -> float:
    """Shortest-path length between two nodes (``inf`` if unreachable)."""
    if s == t:
        return 0.0
    return dijkstra(adj, s, targets=(t,)).get(t, math.inf)


def lex_shortest_path(
    adj: Mapping[NodeId, Mapping[NodeId, float]],
    s: NodeId,
    t: NodeId,
) -> Optional[list[NodeId]]:
    """Minimum-weight path with the lexicographically smallest node sequence.

    Among all paths of minimum total weight (compared within ``ATOL``), the
    node-id sequence chosen is the lexicographic minimum, which makes results
    reproducible across runs. Returns ``None`` when ``t`` is unreachable.
    """
    if s == t:
        return [s]
    dist_s = dijkstra(adj, s)
    if t not in dist_s:
        return None
    dist_t = dijkstra(adj, t)
    total = dist_s[t]
    path = [s]
    u = s
    visited = {s}
    while u != t:
        best = None
        du = dist_s[u]
        for v, w in adj[u].items():
            if v in visited:
                continue
            dv = dist_s.get(v)
            if dv is None or v not in dist_t:
                continue
            # v continues a shortest path iff the prefix through u stays
            # tight and the remainder through v closes to the total length.
            if abs(du + w - dv) <= ATOL and abs(dv + dist_t[v] - total) <= ATOL:
                if best is None or v < best:
                    best = v
        if best is None:
            raise RuntimeError("shortest-path walk failed to make progress")
        path.append(best)
        visited.add(best)
        u = best
    return path


def _record_from_nodes(
    adj: Mapping[NodeId, Mapping[NodeId, float]],
    pair: tuple[NodeId, NodeId],
    nodes: Sequence[NodeId],
) -> PathRecord:
    length = 0.0
    wmax = 0.0
    for a, b in zip(nodes, nodes[1:]):
        w = adj[a][b]
        length += w
        wmax = max(wmax, w)
    return PathRecord(pair=tuple(pair), nodes=tuple(nodes), length=length,
                      max_edge_weight=wmax)


def shortest_path(g: SceneGraph, s: NodeId, t: NodeId) -> Optional[PathRecord]:
    """Canonical shortest path between two nodes.

    Returns ``None`` when no path exists (a typed outcome, not an error).
    Ties between equal-length paths break to the lexicographically smallest
    node-id sequence.
    """
    if not g.has_node(s) or not g.has_node(t):
        raise KeyError(f"nodes ({s}, {t}) must belong to the graph")
    nodes = lex_shortest_path(g.adjacency, s, t)
    if nodes is None:
        return None
    return _record_from_nodes(g.adjacency, (s, t), nodes)


def path_max_weight(rec: PathRecord) -> float:
    """Heaviest edge weight along a path record (0 for single-node paths)."""
    return rec.max_edge_weight if len(rec.nodes) >= 2 else 0.0


# -- hierarchy queries ---------------------------------------------------


def parent(g: SceneGraph, n: NodeId) -> Optional[NodeId]:
    """Parent in the layer immediately above, or ``None`` at the top layer."""
    return g.parent_map().get(n)


def children(g: SceneGraph, n: NodeId) -> tuple[NodeId, ...]:
    """All nodes whose parent is ``n`` (sorted; empty for leaves)."""
    return g._children.get(n, ())


def ancestor(g: SceneGraph, n: NodeId, i: int) -> NodeId:
    """The unique layer-``i`` node reached by repeatedly taking parents."""
    layer = g.layer_of(n)
    if i <= layer or i > g.top_layer:
        raise ValueError(f"ancestor layer {i} must be in ({layer}, {g.top_layer}]")
    cur = n
    while g.layer_of(cur) < i:
        nxt = g.parent_map().get(cur)
        if nxt is None:
            raise SchemaError(f"node {cur} has no parent on the way to layer {i}")
        cur = nxt
    return cur


def lowest_common_ancestor(g: SceneGraph, u: NodeId, v: NodeId) -> Optional[NodeId]:
    """Lowest-layer node that is an ancestor of both layer-0 nodes.

    ``lca(u, u)`` is ``u`` itself; returns ``None`` when the ancestor chains
    never meet (several roots, e.g. multi-building graphs).
    """
    if u == v:
        return u
    chain_u = set()
    cur = u
    while cur is not None:
        chain_u.add(cur)
        cur = g.parent_map().get(cur)
    cur = g.parent_map().get(v)
    while cur is not None:
        if cur in chain_u:
            return cur
        cur = g.parent_map().get(cur)
    return None


def diameter(g: SceneGraph, n: NodeId) -> int:
    """Largest node count of a shortest path between two children of ``n``.

    A single-child node has diameter 1. Paths are the canonical shortest
    paths of the full graph.
    """
    kids = children(g, n)
    if not kids:
        raise ValueError(f"diameter is undefined for childless node {n}")
    if len(kids) == 1:
        return 1
    adj = g.adjacency
    dist_maps = {c: dijkstra(adj, c, targets=kids) for c in kids}
    best = 1
    for i, c1 in enumerate(kids):
        for c2 in kids[i + 1:]:
            if c2 not in dist_maps[c1]:
                continue
            nodes = _lex_walk_between(adj, c1, c2, dist_maps[c1], dist_maps[c2])
            best = max(best, len(nodes))
    return best


def _lex_walk_between(
    adj: Mapping[NodeId, Mapping[NodeId, float]],
    s: NodeId,
    t: NodeId,
    dist_s: Mapping[NodeId, float],
    dist_t: Mapping[NodeId, float],
) -> list[NodeId]:
    """Lexicographic shortest-path walk from precomputed distance maps."""
    total = dist_s[t]
    path = [s]
    u = s
    visited = {s}
    while u != t:
        best = None
        du = dist_s[u]
        for v, w in adj[u].items():
            if v in visited or v not in dist_s or v not in dist_t:
                continue
            if abs(du + w - dist_s[v]) <= ATOL and abs(dist_s[v] + dist_t[v] - total) <= ATOL:
                if best is None or v < best:
                    best = v
        if best is None:
            raise RuntimeError("shortest-path walk failed to make progress")
        path.append(best)
        visited.add(best)
        u = best
    return path


# -- exploration-aware weight model --------------------------------------


def representative_child_node(g: SceneGraph, x: NodeId) -> NodeId:
    """Child-layer node of ``x`` nearest (Euclidean) to the centroid of
    ``x``'s children; ties break to the smallest node id."""
    kids = children(g, x)
    if not kids:
        raise ValueError(f"node {x} has no children")
    centroid = np.mean([g.pos_of(c) for c in kids], axis=0)
    layer = g.layer_of(x) - 1
    ids = g.nodes_in_layer(layer)
    d = np.linalg.norm(g.layer_positions(layer) - centroid, axis=1)
    # ids are sorted, so the first index within tolerance of the minimum is
    # the smallest-id tie winner.
    first = int(np.nonzero(d <= d.min() + ATOL)[0][0])
    return ids[first]


def _lower_layers_adjacency(g: SceneGraph, below: int) -> dict[NodeId, dict[NodeId, float]]:
    """Adjacency restricted to nodes in layers strictly below ``below``."""
    adj: dict[NodeId, dict[NodeId, float]] = {}
    for layer in range(below):
        for n in g.nodes_in_layer(layer):
            adj[n] = {v: w for v, w in g.neighbors(n).items()
                      if g.layer_of(v) < below}
    return adj


def interlayer_weight(g: SceneGraph, x: NodeId, y: NodeId) -> Optional[float]:
    """Weight of a (higher ``x``, lower ``y``) cross-layer edge.

    The cost is the offset from ``x`` to its representative child-layer node
    ``y0`` plus the shortest-path length from ``y0`` to ``y`` through layers
    below ``x``, which models the local exploration a robot needs when only
    the abstract node is known. Returns ``None`` when ``y`` is unreachable
    from ``y0``.
    """
    lx, ly = g.layer_of(x), g.layer_of(y)
    if lx <= ly:
        raise ValueError(f"expected layer({x}) > layer({y}), got {lx} <= {ly}")
    y0 = representative_child_node(g, x)
    offset = float(np.linalg.norm(g.pos_of(x) - g.pos_of(y0)))
    if y0 == y:
        return offset
    adj = _lower_layers_adjacency(g, lx)
    d = dijkstra(adj, y0, targets=(y,)).get(y, math.inf)
    if math.isinf(d):
        return None
    return offset + d


def euclidean(g: SceneGraph, u: NodeId, v: NodeId) -> float:
    return float(np.linalg.norm(g.pos_of(u) - g.pos_of(v)))


def assign_weights(g: SceneGraph) -> SceneGraph:
    """Return a copy with the canonical weight model applied.

    Intra-layer edges weigh their endpoints' Euclidean distance; cross-layer
    edges weigh :func:`interlayer_weight` of their (higher, lower) endpoints.
    Cross-layer weights are assigned bottom-up so that the lower layers a
    weight depends on are already final.
    """
    intra: list[tuple[NodeId, NodeId, float]] = []
    cross_by_layer: dict[int, list[tuple[NodeId, NodeId]]] = {}
    for u, v, _ in g.edges():
        lu, lv = g.layer_of(u), g.layer_of(v)
        if lu == lv:
            intra.append((u, v, euclidean(g, u, v)))
        else:
            hi, lo = (u, v) if lu > lv else (v, u)
            cross_by_layer.setdefault(g.layer_of(hi), []).append((hi, lo))

    weighted: dict[tuple[NodeId, NodeId], float] = {}
    for u, v, w in intra:
        weighted[(min(u, v), max(u, v))] = w

    def lookup(a: NodeId, b: NodeId) -> float:
        return weighted[(min(a, b), max(a, b))]

    for hi_layer in sorted(cross_by_layer):
        # Distances below hi_layer only use weights already assigned.
        adj: dict[NodeId, dict[NodeId, float]] = {}
        for layer in range(hi_layer):
            for n in g.nodes_in_layer(layer):
                adj[n] = {m: lookup(n, m) for m in g.neighbors(n)
                          if g.layer_of(m) < hi_layer}
        dist_cache: dict[NodeId, dict[NodeId, float]] = {}
        rep_cache: dict[NodeId, NodeId] = {}
        for hi, lo in cross_by_layer[hi_layer]:
            if hi not in rep_cache:
                rep_cache[hi] = representative_child_node(g, hi)
            y0 = rep_cache[hi]
            offset = euclidean(g, hi, y0)
            if y0 == lo:
                w = offset
            else:
                if y0 not in dist_cache:
                    dist_cache[y0] = dijkstra(adj, y0)
                d = dist_cache[y0].get(lo, math.inf)
                if math.isinf(d):
                    raise SchemaError(
                        f"cross-layer edge ({hi}, {lo}): {lo} unreachable from "
                        f"representative node {y0}")
                w = offset + d
            weighted[(min(hi, lo), max(hi, lo))] = w

    nodes = [(n, g.layer_of(n), g.pos_of(n), g.label_of(n)) for n in g.node_ids()]
    edges = [(u, v, weighted[(u, v)]) for (u, v) in sorted(weighted)]
    return SceneGraph(g.layer_count, nodes, edges, dict(g.parent_map()), check="full")
