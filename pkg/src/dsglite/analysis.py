"""Distortion metrics, per-layer extremal profiles, the worst-case stretch
bound for bottom-up compression runs, and benchmark-row helpers."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .graph import (NodeId, PathRecord, SceneGraph, ancestor, children,
                    diameter, dijkstra, lex_shortest_path,
                    representative_child_node, shortest_path)

log = logging.getLogger("dsglite")

#: Column order of sweep CSV rows.
SWEEP_COLUMNS = ("alg", "budget", "terminals", "seed", "size", "beta", "k",
                 "wall_ms", "bound")


@dataclass(frozen=True)
class DistortionEntry:
    pair: tuple[NodeId, NodeId]
    dist_full: float
    dist_compressed: float
    max_edge_weight: float
    beta: float


def achieved_distortion(
    g: SceneGraph,
    compressed: SceneGraph,
    pairs: Iterable[tuple[NodeId, NodeId]],
) -> tuple[float, tuple[DistortionEntry, ...]]:
    """Per-pair and worst-case stretch of the compressed graph.

    Each pair contributes ``(d_c - d_g) / W_max`` where ``W_max`` is the
    heaviest edge on the pair's full-graph shortest path; a disconnected
    pair contributes infinity.
    """
    entries = []
    for s, t in pairs:
        rec = shortest_path(g, s, t)
        if rec is None:
            raise ValueError(f"pair ({s}, {t}) is disconnected in the full graph")
        if compressed.has_node(s) and compressed.has_node(t):
            d_c = dijkstra(compressed.adjacency, s, targets=(t,)).get(t, math.inf)
        else:
            d_c = math.inf
        if s == t:
            beta = 0.0
        elif math.isinf(d_c):
            beta = math.inf
        else:
            wmax = rec.max_edge_weight
            beta = (d_c - rec.length) / wmax if wmax > 0 else 0.0
        entries.append(DistortionEntry(pair=(s, t), dist_full=rec.length,
                                       dist_compressed=d_c,
                                       max_edge_weight=rec.max_edge_weight,
                                       beta=beta))
    best = max((e.beta for e in entries), default=0.0)
    return best, tuple(entries)


@dataclass(frozen=True)
class BoundsProfile:
    """Per-layer extremal quantities of the input graph and query.

    Intra-layer weight extremes ``wmax/wmin`` are indexed by layer
    ``0..L``; cross-layer extremes ``wcmax/wcmin`` by the upper layer
    ``1..L``; ``mmin[i]`` is the least node count of a shortest path
    between the pairs' layer-``i`` ancestors, and ``bmin[i]`` the least
    diameter of a layer-``i`` node. Entries are ``None`` where undefined
    (empty layer, no such edges, childless layer).
    """

    layer_count: int
    wmax: tuple[Optional[float], ...]
    wmin: tuple[Optional[float], ...]
    wcmax: tuple[Optional[float], ...]
    wcmin: tuple[Optional[float], ...]
    mmin: tuple[Optional[int], ...]
    bmin: tuple[Optional[int], ...]
    pair_dist: tuple[tuple[float, float], ...]  # (d_g, W_max) per pair


def bounds_profile(
    g: SceneGraph,
    pairs: Iterable[tuple[NodeId, NodeId]],
) -> BoundsProfile:
    """Extract the per-layer extremal scans feeding the stretch bound."""
    pairs = tuple(pairs)
    if g.layer_count < 2:
        raise ValueError("profile requires at least 2 layers")
    L = g.top_layer
    wmax: list[Optional[float]] = [None] * (L + 1)
    wmin: list[Optional[float]] = [None] * (L + 1)
    wcmax: list[Optional[float]] = [None] * (L + 1)
    wcmin: list[Optional[float]] = [None] * (L + 1)
    for u, v, w in g.edges():
        lu, lv = g.layer_of(u), g.layer_of(v)
        if lu == lv:
            wmax[lu] = w if wmax[lu] is None else max(wmax[lu], w)
            wmin[lu] = w if wmin[lu] is None else min(wmin[lu], w)
        else:
            hi = max(lu, lv)
            wcmax[hi] = w if wcmax[hi] is None else max(wcmax[hi], w)
            wcmin[hi] = w if wcmin[hi] is None else min(wcmin[hi], w)

    mmin: list[Optional[int]] = [None] * (L + 1)
    pair_dist: list[tuple[float, float]] = []
    for s, t in pairs:
        rec = shortest_path(g, s, t)
        if rec is None:
            raise ValueError(f"pair ({s}, {t}) is disconnected")
        pair_dist.append((rec.length, rec.max_edge_weight))
    for i in range(L + 1):
        counts = []
        for s, t in pairs:
            a = ancestor(g, s, i) if i > g.layer_of(s) else s
            b = ancestor(g, t, i) if i > g.layer_of(t) else t
            if a == b:
                counts.append(1)
                continue
            nodes = lex_shortest_path(g.adjacency, a, b)
            if nodes is not None:
                counts.append(len(nodes))
        mmin[i] = min(counts) if counts else None

    bmin: list[Optional[int]] = [None] * (L + 1)
    for i in range(1, L + 1):
        diams = [diameter(g, n) for n in g.nodes_in_layer(i) if children(g, n)]
        bmin[i] = min(diams) if diams else None

    return BoundsProfile(layer_count=g.layer_count,
                         wmax=tuple(wmax), wmin=tuple(wmin),
                         wcmax=tuple(wcmax), wcmin=tuple(wcmin),
                         mmin=tuple(mmin), bmin=tuple(bmin),
                         pair_dist=tuple(pair_dist))


@dataclass(frozen=True)
class BoundReport:
    k: int
    alpha_k: int
    l_max: int
    l_0: int
    bound_value: float
    measured_max_distance: float
    clamped: bool


def bud_bound(
    profile: BoundsProfile,
    k: int,
    pairs_count: int,
    beta_spanner: float,
    measured_max_distance: float = math.nan,
) -> BoundReport:
    """Worst-case terminal distance after ``k`` bottom-up iterations.

    ``l_0`` is the coarsest layer the initial spanner's additive allowance
    already implies, ``l_max`` the coarsest layer reachable after ``k``
    iterations, and ``alpha_k`` how many nodes of that layer the paths can
    have consumed. With no iterations the report falls back to the spanner
    guarantee itself. A negative middle term is clamped to zero and
    flagged.
    """
    if k < 0 or pairs_count < 1:
        raise ValueError("k must be >= 0 and pairs_count >= 1")
    L = profile.layer_count - 1

    def _num(x: Optional[float], what: str) -> float:
        if x is None:
            # Undefined extremes mean no such edges/paths exist in that
            # layer, so their contribution to the bound is exactly zero.
            log.debug("profile quantity %s is undefined; contributes 0", what)
            return 0.0
        return x

    spanner_worst = max((d + beta_spanner * w for d, w in profile.pair_dist),
                        default=0.0)
    min_allowance = min((d + beta_spanner * w for d, w in profile.pair_dist),
                        default=0.0)

    l_0 = 0
    for ell in range(L + 1):
        lhs = min_allowance
        rhs = 2.0 * sum(_num(profile.wcmin[i], f"wcmin[{i}]") for i in range(1, ell + 1))
        mm = profile.mmin[ell]
        wm = profile.wmin[ell]
        if mm is not None and wm is not None:
            rhs += mm * wm
        if lhs >= rhs:
            l_0 = ell

    if k == 0:
        return BoundReport(k=0, alpha_k=0, l_max=l_0, l_0=l_0,
                           bound_value=spanner_worst,
                           measured_max_distance=measured_max_distance,
                           clamped=False)

    def iter_floor(ell: int) -> float:
        return pairs_count * sum(_num(profile.mmin[i], f"mmin[{i}]")
                                 for i in range(l_0, ell))

    l_max = l_0
    for ell in range(l_0, L + 1):
        if k > iter_floor(ell):
            l_max = ell

    alpha_k = math.ceil(k / pairs_count - sum(_num(profile.mmin[i], f"mmin[{i}]")
                                              for i in range(l_0, l_max)))
    if l_max == 0:
        return BoundReport(k=k, alpha_k=alpha_k, l_max=0, l_0=l_0,
                           bound_value=spanner_worst,
                           measured_max_distance=measured_max_distance,
                           clamped=False)

    cross = 2.0 * sum(_num(profile.wcmax[i], f"wcmax[{i}]")
                      for i in range(1, l_max + 1))
    mid_raw = (_num(profile.mmin[l_max - 1], f"mmin[{l_max - 1}]")
               - alpha_k * _num(profile.bmin[l_max], f"bmin[{l_max}]"))
    clamped = mid_raw < 0
    if clamped:
        log.warning("bound middle term %.3f clamped to 0", mid_raw)
    mid = max(mid_raw, 0.0) * _num(profile.wmax[l_max - 1], f"wmax[{l_max - 1}]")
    top = alpha_k * _num(profile.wmax[l_max], f"wmax[{l_max}]")
    return BoundReport(k=k, alpha_k=alpha_k, l_max=l_max, l_0=l_0,
                       bound_value=cross + mid + top,
                       measured_max_distance=measured_max_distance,
                       clamped=clamped)


def nominal_mission_time(
    g_full: SceneGraph,
    compressed_path: PathRecord,
    v_max: float,
) -> float:
    """Travel time of a compressed-graph path projected onto the full graph.

    Abstract waypoints project to their representative child-layer node,
    recursively down to layer 0; the projected waypoints are then joined by
    full-graph shortest paths and the total length divided by the maximum
    velocity. Infinite when consecutive projections are disconnected.
    """
    if v_max <= 0:
        raise ValueError("v_max must be positive")

    def project(n: NodeId) -> NodeId:
        while g_full.layer_of(n) > 0:
            n = representative_child_node(g_full, n)
        return n

    waypoints = [project(n) for n in compressed_path.nodes]
    total = 0.0
    for a, b in zip(waypoints, waypoints[1:]):
        if a == b:
            continue
        d = dijkstra(g_full.adjacency, a, targets=(b,)).get(b, math.inf)
        if math.isinf(d):
            return math.inf
        total += d
    return total / v_max


def compression_stats(result) -> dict:
    """Flat summary of a compression result (see Table-style reporting)."""
    return {
        "size": result.compressed.num_nodes,
        "beta": result.beta_achieved,
        "k": result.iterations_k,
        "wall_time": result.wall_time,
    }


def sweep_row(alg: str, budget: int, terminals: int, seed: int, size: int,
              beta: float, k: int, wall_ms: float,
              bound: Optional[float]) -> dict:
    return {"alg": alg, "budget": budget, "terminals": terminals, "seed": seed,
            "size": size, "beta": beta, "k": k, "wall_ms": wall_ms,
            "bound": "" if bound is None else bound}
