"""Shared corpora and worlds for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from dsglite import (GridWorldSpec, SceneGraph, assign_weights,
                     gen_grid_world)


def random_small_instance(seed: int) -> tuple[SceneGraph, tuple]:
    """Two-layer instance (<= 14 nodes, one room) with jittered positions
    and at most two terminal pairs; positions are generic so optima are
    numerically unique."""
    rng = np.random.default_rng(seed)
    n_places = int(rng.integers(7, 14))
    pts = rng.random((n_places, 2)) * 10.0
    nodes = [(i, 0, (float(x), float(y), 0.0), f"p{i}") for i, (x, y) in enumerate(pts)]
    edges = set()
    for i in range(1, n_places):
        edges.add((i - 1, i))
    for i in range(n_places):
        dd = np.linalg.norm(pts - pts[i], axis=1)
        for j in np.argsort(dd)[1:3]:
            edges.add((min(i, int(j)), max(i, int(j))))
    room = n_places
    parents = {i: room for i in range(n_places)}
    centroid = np.mean(pts, axis=0)
    nodes.append((room, 1, (float(centroid[0]), float(centroid[1]), 0.0), "room"))
    all_edges = ([(u, v, None) for u, v in sorted(edges)]
                 + [(c, room, None) for c in range(n_places)])
    g = assign_weights(SceneGraph(2, nodes, all_edges, parents))
    places = g.nodes_in_layer(0)
    k = int(rng.integers(1, 3))
    picks = rng.choice(len(places), size=2 * k, replace=False)
    pairs = tuple((places[picks[2 * i]], places[picks[2 * i + 1]]) for i in range(k))
    return g, pairs


def sweep_terminal_pairs(g: SceneGraph, terminals: int, seed: int) -> tuple:
    """One source against terminals-1 targets, sampled deterministically."""
    rng = np.random.default_rng([seed, terminals])
    places = g.nodes_in_layer(0)
    picked = [places[i] for i in rng.choice(len(places), size=terminals,
                                            replace=False)]
    return tuple((picked[0], other) for other in picked[1:])


def app_c_toy() -> SceneGraph:
    """Three-layer corridor with rooms of diameter 2, 2, and 3."""
    # places P1..P7 = 0..6, rooms R1..R3 = 7..9, building = 10
    parents = {0: 7, 1: 7, 2: 8, 3: 8, 4: 9, 5: 9, 6: 9, 7: 10, 8: 10, 9: 10}
    nodes = [(i, 0, (float(i), 0.0, 0.0), f"P{i + 1}") for i in range(7)]
    for r, kids in ((7, (0, 1)), (8, (2, 3)), (9, (4, 5, 6))):
        cx = float(np.mean([k for k in kids]))
        nodes.append((r, 1, (cx, 0.0, 0.0), f"R{r - 6}"))
    nodes.append((10, 2, (3.0, 0.0, 0.0), "building"))
    place_edges = [(0, 1), (2, 3), (4, 5), (5, 6), (1, 2), (3, 4)]
    room_edges = [(7, 8), (8, 9)]
    cross = [(c, p) for c, p in parents.items()]
    edges = [(u, v, None) for u, v in place_edges + room_edges + cross]
    return assign_weights(SceneGraph(3, nodes, edges, parents))


@pytest.fixture(scope="session")
def world_mid() -> SceneGraph:
    """~1000-node world used by the sweep-style tests."""
    return gen_grid_world(GridWorldSpec(rooms_x=4, rooms_y=3,
                                        places_per_room_side=9, seed=5))


@pytest.fixture(scope="session")
def world_small() -> SceneGraph:
    return gen_grid_world(GridWorldSpec(rooms_x=2, rooms_y=2,
                                        places_per_room_side=4, seed=3))
