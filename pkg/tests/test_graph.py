"""Graph model: shortest paths, hierarchy queries, and the weight model."""

from __future__ import annotations

import itertools
import json
import math

import networkx as nx
import numpy as np
import pytest

from dsglite import (SceneGraph, SchemaError, TerminalQuery, ancestor,
                     assign_weights, children, diameter, gen_fig3_toy,
                     gen_grid_world, GridWorldSpec, interlayer_weight,
                     lowest_common_ancestor, parent, path_max_weight,
                     shortest_path)
from dsglite.graph import PathRecord, dijkstra, euclidean, representative_child_node
from dsglite import graphio

from conftest import app_c_toy


def to_networkx(g: SceneGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(g.node_ids())
    for u, v, w in g.edges():
        G.add_edge(u, v, weight=w)
    return G


def random_weighted_graph(seed: int, n: int = 9) -> SceneGraph:
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2)) * 5.0
    nodes = [(i, 0, (float(x), float(y), 0.0), "") for i, (x, y) in enumerate(pts)]
    edges = []
    seen = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.append((j, i, float(rng.random() * 3 + 0.1)))
        seen.add((j, i))
    for _ in range(n):
        u, v = sorted(rng.integers(0, n, size=2).tolist())
        if u != v and (u, v) not in seen:
            seen.add((u, v))
            edges.append((u, v, float(rng.random() * 3 + 0.1)))
    return SceneGraph(1, nodes, edges, {}, check="full")


# -- shortest paths --------------------------------------------------------


def brute_force_shortest(g: SceneGraph, s: int, t: int):
    """All simple paths by exhaustive enumeration; returns (length, best
    lexicographic path among the shortest)."""
    G = to_networkx(g)
    best_len = math.inf
    best_paths = []
    for path in nx.all_simple_paths(G, s, t):
        length = sum(G[a][b]["weight"] for a, b in zip(path, path[1:]))
        if length < best_len - 1e-9:
            best_len = length
            best_paths = [path]
        elif abs(length - best_len) <= 1e-9:
            best_paths.append(path)
    return best_len, min(map(tuple, best_paths)) if best_paths else None


def test_shortest_path_identity():
    g, _ = gen_fig3_toy()
    rec = shortest_path(g, 2, 2)
    assert rec.nodes == (2,)
    assert rec.length == 0.0
    assert path_max_weight(rec) == 0.0


def test_shortest_path_fig3_values():
    g, cut = gen_fig3_toy()
    assert shortest_path(g, 0, 3).length == 3.0
    pruned = g.subgraph([n for n in g.node_ids() if n != cut])
    assert shortest_path(pruned, 0, 3).length == 5.0


@pytest.mark.parametrize("seed", range(12))
def test_shortest_path_matches_enumeration(seed):
    g = random_weighted_graph(seed, n=9)
    ids = g.node_ids()
    for s, t in [(ids[0], ids[-1]), (ids[1], ids[-2]), (ids[2], ids[-1])]:
        expect_len, expect_path = brute_force_shortest(g, s, t)
        rec = shortest_path(g, s, t)
        assert rec.length == pytest.approx(expect_len, abs=1e-9)
        assert rec.nodes == expect_path


def test_shortest_path_lexicographic_tiebreak():
    # Two equal-length routes 0-1-3 and 0-2-3: pick the one through node 1.
    nodes = [(i, 0, (0.0, 0.0, 0.0), "") for i in range(4)]
    edges = [(0, 1, 1.0), (1, 3, 1.0), (0, 2, 1.0), (2, 3, 1.0)]
    g = SceneGraph(1, nodes, edges, {}, check="basic")
    assert shortest_path(g, 0, 3).nodes == (0, 1, 3)


def test_shortest_path_unreachable_is_none():
    nodes = [(0, 0, (0, 0, 0), ""), (1, 0, (1, 0, 0), "")]
    g = SceneGraph(1, nodes, [], {}, check="basic")
    assert shortest_path(g, 0, 1) is None


def test_path_max_weight_cases():
    rec = PathRecord(pair=(0, 4), nodes=(0, 1, 2, 3, 4), length=4.0,
                     max_edge_weight=1.0)
    assert path_max_weight(rec) == 1.0
    rec = PathRecord(pair=(0, 3), nodes=(0, 1, 2, 3), length=3.8,
                     max_edge_weight=2.5)
    assert path_max_weight(rec) == 2.5
    g, _ = gen_fig3_toy()
    rec = shortest_path(g, 0, 3)
    assert path_max_weight(rec) == max(
        g.weight(a, b) for a, b in zip(rec.nodes, rec.nodes[1:])) == 1.0


# -- hierarchy -------------------------------------------------------------


def test_children_parent_round_trip():
    g = app_c_toy()
    assert children(g, 7) == (0, 1)  # R1 -> {P1, P2}
    for n in g.nodes_in_layer(0):
        assert n in children(g, parent(g, n))
    leaf = 0
    assert children(g, leaf) == ()
    assert parent(g, 10) is None


def test_ancestor_chain():
    g = app_c_toy()
    assert ancestor(g, 0, 1) == 7      # P1 -> R1
    assert ancestor(g, 0, 2) == 10     # P1 -> building
    assert ancestor(g, 0, g.layer_of(0) + 1) == parent(g, 0)
    with pytest.raises(ValueError):
        ancestor(g, 0, 0)
    with pytest.raises(ValueError):
        ancestor(g, 0, 3)


def test_lowest_common_ancestor():
    g = app_c_toy()
    assert lowest_common_ancestor(g, 0, 0) == 0
    assert lowest_common_ancestor(g, 0, 1) == 7      # same room
    assert lowest_common_ancestor(g, 0, 4) == 10     # across rooms
    multi = gen_grid_world(GridWorldSpec(rooms_x=2, rooms_y=1,
                                         places_per_room_side=2, buildings=2))
    left = multi.nodes_in_layer(0)[0]
    right = multi.nodes_in_layer(0)[-1]
    assert lowest_common_ancestor(multi, left, right) is None


def test_diameter_values():
    g = app_c_toy()
    assert [diameter(g, r) for r in (7, 8, 9)] == [2, 2, 3]
    with pytest.raises(ValueError):
        diameter(g, 0)  # childless place
    for r in (7, 8, 9, 10):
        child_layer = g.layer_of(r) - 1
        assert 1 <= diameter(g, r) <= len(g.nodes_in_layer(child_layer))


def test_ancestor_chain_strictly_climbs():
    g = app_c_toy()
    for n in g.nodes_in_layer(0):
        chain = [n]
        while parent(g, chain[-1]) is not None:
            chain.append(parent(g, chain[-1]))
        layers = [g.layer_of(m) for m in chain]
        assert layers == sorted(set(layers))          # strictly increasing
        assert layers[-1] == g.top_layer              # terminates at the top
        assert len(chain) <= g.layer_count            # within L steps


def test_diameter_single_child_and_star():
    # hub 0 with leaves 1..3; all live under room 5, single-child room 6.
    nodes = [(i, 0, (float(i), 0.0, 0.0), "") for i in range(5)]
    nodes += [(5, 1, (1.0, 0.0, 0.0), ""), (6, 1, (4.0, 0.0, 0.0), "")]
    parents = {0: 5, 1: 5, 2: 5, 3: 5, 4: 6}
    edges = [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (3, 4, 1.0), (5, 6, 3.0)]
    edges += [(c, p, 1.0) for c, p in parents.items()]
    g = SceneGraph(2, nodes, edges, parents)
    assert diameter(g, 6) == 1   # single child
    assert diameter(g, 5) == 3   # leaf-hub-leaf


# -- weight model ----------------------------------------------------------


def two_room_world() -> SceneGraph:
    return gen_grid_world(GridWorldSpec(rooms_x=2, rooms_y=1,
                                        places_per_room_side=3, seed=11))


def test_interlayer_weight_representative_case():
    g = two_room_world()
    room = g.nodes_in_layer(1)[0]
    y0 = representative_child_node(g, room)
    assert interlayer_weight(g, room, y0) == pytest.approx(
        euclidean(g, room, y0), abs=1e-12)


def test_interlayer_weight_dominates_restricted_distance():
    g = two_room_world()
    room = g.nodes_in_layer(1)[0]
    y0 = representative_child_node(g, room)
    G = to_networkx(g)
    places_only = G.subgraph(g.nodes_in_layer(0))
    for y in g.nodes_in_layer(0):
        w = interlayer_weight(g, room, y)
        d = nx.shortest_path_length(places_only, y0, y, weight="weight")
        assert w >= d - 1e-9


def test_interlayer_weight_hand_run():
    """Independent evaluation of the two-term rule on a grid world."""
    g = two_room_world()
    room = g.nodes_in_layer(1)[1]
    kids = children(g, room)
    centroid = np.mean([g.pos_of(c) for c in kids], axis=0)
    layer0 = g.nodes_in_layer(0)
    dists = [float(np.linalg.norm(g.pos_of(m) - centroid)) for m in layer0]
    y0 = layer0[int(np.argmin(dists))]
    G = to_networkx(g).subgraph(layer0)
    for y in (layer0[0], layer0[-1]):
        expect = (float(np.linalg.norm(g.pos_of(room) - g.pos_of(y0)))
                  + nx.shortest_path_length(G, y0, y, weight="weight"))
        assert interlayer_weight(g, room, y) == pytest.approx(expect, abs=1e-9)


def test_interlayer_weight_layer_precondition():
    g = two_room_world()
    place = g.nodes_in_layer(0)[0]
    room = g.nodes_in_layer(1)[0]
    with pytest.raises(ValueError):
        interlayer_weight(g, place, room)


def test_interlayer_weight_unreachable_returns_none():
    # two one-place rooms whose places have no route below the room layer
    nodes = [(0, 0, (0.0, 0.0, 0.0), ""), (1, 0, (5.0, 0.0, 0.0), ""),
             (2, 1, (0.0, 0.0, 0.0), ""), (3, 1, (5.0, 0.0, 0.0), "")]
    parents = {0: 2, 1: 3}
    edges = [(0, 2, None), (1, 3, None), (2, 3, None)]
    g = assign_weights(SceneGraph(2, nodes, edges, parents))
    assert interlayer_weight(g, 2, 1) is None


def test_assign_weights_colinear_places():
    nodes = [(i, 0, (float(i), 0.0, 0.0), "") for i in range(3)]
    nodes.append((3, 1, (1.0, 0.0, 0.0), "room"))
    parents = {0: 3, 1: 3, 2: 3}
    edges = [(0, 1, None), (1, 2, None)] + [(c, 3, None) for c in parents]
    g = assign_weights(SceneGraph(2, nodes, edges, parents))
    assert g.weight(0, 1) == pytest.approx(1.0)
    assert g.weight(1, 2) == pytest.approx(1.0)
    # the representative child is the middle place: cross weight to it is
    # the centroid offset alone
    assert representative_child_node(g, 3) == 1
    assert g.weight(1, 3) == pytest.approx(0.0, abs=1e-12)


def test_assign_weights_full_world_matches_recomputation():
    """Every edge weight re-derived independently from the rule."""
    g = gen_grid_world(GridWorldSpec(rooms_x=2, rooms_y=2,
                                     places_per_room_side=3, seed=2))
    G = to_networkx(g)
    for u, v, w in g.edges():
        lu, lv = g.layer_of(u), g.layer_of(v)
        if lu == lv:
            assert w == pytest.approx(
                float(np.linalg.norm(g.pos_of(u) - g.pos_of(v))), abs=1e-9)
        else:
            hi, lo = (u, v) if lu > lv else (v, u)
            kids = children(g, hi)
            centroid = np.mean([g.pos_of(c) for c in kids], axis=0)
            lower = [n for n in g.node_ids() if g.layer_of(n) == g.layer_of(hi) - 1]
            dists = [float(np.linalg.norm(g.pos_of(m) - centroid)) for m in lower]
            y0 = lower[int(np.argmin(dists))]
            allowed = [n for n in g.node_ids() if g.layer_of(n) < g.layer_of(hi)]
            sub = G.subgraph(allowed)
            expect = float(np.linalg.norm(g.pos_of(hi) - g.pos_of(y0)))
            if y0 != lo:
                expect += nx.shortest_path_length(sub, y0, lo, weight="weight")
            assert w == pytest.approx(expect, abs=1e-9)


def test_triangle_inequality_on_generated_world():
    g = two_room_world()
    ids = list(g.node_ids())[::4]
    dist = {u: dijkstra(g.adjacency, u) for u in ids}
    for u, z, v in itertools.permutations(ids[:6], 3):
        assert dist[u][v] <= dist[u][z] + dist[z][v] + 1e-9


# -- structure and validation ----------------------------------------------


def test_validation_errors():
    nodes = [(0, 0, (0, 0, 0), ""), (1, 0, (1, 0, 0), "")]
    with pytest.raises(SchemaError):
        SceneGraph(1, nodes, [(0, 0, 1.0)], {}, check="basic")  # self edge
    with pytest.raises(SchemaError):
        SceneGraph(1, nodes, [(0, 1, 1.0), (1, 0, 2.0)], {}, check="basic")
    with pytest.raises(SchemaError):
        SceneGraph(1, nodes, [(0, 1, -1.0)], {}, check="basic")
    with pytest.raises(SchemaError):  # node below top layer without parent
        SceneGraph(2, [(0, 0, (0, 0, 0), ""), (1, 1, (0, 0, 0), "")],
                   [(0, 1, 1.0)], {}, check="full")
    with pytest.raises(SchemaError):  # edge spanning two layers
        SceneGraph(3, [(0, 0, (0, 0, 0), ""), (1, 1, (0, 0, 0), ""),
                       (2, 2, (0, 0, 0), "")],
                   [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
                   {0: 1, 1: 2}, check="full")


def test_remap_dense_round_trip():
    g = app_c_toy()
    sub = g.subgraph([0, 1, 2, 7, 8, 10])
    dense, table = sub.remap_dense()
    assert dense.node_ids() == tuple(range(sub.num_nodes))
    assert set(table) == set(sub.node_ids())
    for old, new in table.items():
        assert dense.layer_of(new) == sub.layer_of(old)


def test_terminal_query_validation():
    g = app_c_toy()
    TerminalQuery(pairs=((0, 4),), budget=5).validate(g)
    with pytest.raises(SchemaError):
        TerminalQuery(pairs=(), budget=5).validate(g)
    with pytest.raises(SchemaError):
        TerminalQuery(pairs=((0, 0),), budget=5).validate(g)
    with pytest.raises(SchemaError):
        TerminalQuery(pairs=((0, 4),), budget=0).validate(g)
    with pytest.raises(SchemaError):
        TerminalQuery(pairs=((0, 7),), budget=5).validate(g)  # room terminal
    with pytest.raises(SchemaError):
        TerminalQuery(pairs=((0, 99),), budget=5).validate(g)


# -- file format -----------------------------------------------------------


def test_graph_json_round_trip(tmp_path):
    g = two_room_world()
    path = tmp_path / "g.json"
    graphio.save_graph(g, path)
    h = graphio.load_graph(path)
    assert h.node_ids() == g.node_ids()
    assert list(h.edges()) == list(g.edges())
    assert dict(h.parent_map()) == dict(g.parent_map())
    for n in g.node_ids():
        assert np.allclose(h.pos_of(n), g.pos_of(n))
        assert h.label_of(n) == g.label_of(n)
    # serialization is stable byte-for-byte
    graphio.save_graph(h, tmp_path / "h.json")
    assert (tmp_path / "g.json").read_bytes() == (tmp_path / "h.json").read_bytes()


def test_query_json_round_trip(tmp_path):
    q = TerminalQuery(pairs=((1, 5), (1, 9)), budget=42)
    path = tmp_path / "q.json"
    graphio.save_query(q, path)
    assert graphio.load_query(path) == q


def test_graph_schema_errors(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"schema": "other/1"}))
    with pytest.raises(SchemaError):
        graphio.load_graph(path)
    path.write_text("not json")
    with pytest.raises(SchemaError):
        graphio.load_graph(path)
    path.write_text(json.dumps({"schema": "dlite-graph/1", "layers": 1,
                                "nodes": [{"id": 0}], "edges": [],
                                "parents": []}))
    with pytest.raises(SchemaError):
        graphio.load_graph(path)


def test_weightless_input_then_assign(tmp_path):
    nodes = [(0, 0, (0.0, 0.0, 0.0), ""), (1, 0, (2.0, 0.0, 0.0), ""),
             (2, 1, (1.0, 0.0, 0.0), "")]
    parents = {0: 2, 1: 2}
    g = SceneGraph(2, nodes, [(0, 1, None), (0, 2, None), (1, 2, None)], parents)
    path = tmp_path / "g.json"
    graphio.save_graph(g, path)
    data = json.loads(path.read_text())
    assert all("w" not in e for e in data["edges"])
    h = assign_weights(graphio.load_graph(path))
    assert h.weight(0, 1) == pytest.approx(2.0)
