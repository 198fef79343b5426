"""Deterministic generators for synthetic layered worlds and small demo
graphs used throughout the test suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import NodeId, SceneGraph, TerminalQuery, assign_weights


@dataclass(frozen=True)
class GridWorldSpec:
    """A rooms_x x rooms_y grid of square rooms, each meshed with
    places_per_room_side^2 free-space places, grouped into vertical
    building strips."""

    rooms_x: int
    rooms_y: int
    places_per_room_side: int
    room_size: float = 10.0
    door_count_per_shared_wall: int = 1
    buildings: int = 1
    seed: int = 0

    def validate(self) -> None:
        if min(self.rooms_x, self.rooms_y, self.places_per_room_side,
               self.door_count_per_shared_wall, self.buildings) < 1:
            raise ValueError("all grid-world dimensions must be positive")
        if self.room_size <= 0:
            raise ValueError("room_size must be positive")
        if self.buildings > self.rooms_x:
            raise ValueError("buildings cannot exceed rooms_x")
        if self.door_count_per_shared_wall > self.places_per_room_side:
            raise ValueError("door count cannot exceed places per wall")

    @property
    def total_places(self) -> int:
        return self.rooms_x * self.rooms_y * self.places_per_room_side ** 2

    @property
    def total_nodes(self) -> int:
        return self.total_places + self.rooms_x * self.rooms_y + self.buildings


def gen_grid_world(spec: GridWorldSpec) -> SceneGraph:
    """Three-layer world: jittered place meshes per room, door links between
    adjacent rooms, a room-adjacency layer, and building strips above.

    Output is a pure function of the spec (including its seed); weights carry
    the canonical weight model.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    pps = spec.places_per_room_side
    spacing = spec.room_size / pps

    nodes: list[tuple[NodeId, int, tuple[float, float, float], str]] = []
    edges: list[tuple[NodeId, NodeId, None]] = []
    parents: dict[NodeId, NodeId] = {}

    place_id: dict[tuple[int, int, int, int], NodeId] = {}
    nid = 0
    for rx in range(spec.rooms_x):
        for ry in range(spec.rooms_y):
            for i in range(pps):
                for j in range(pps):
                    jx, jy = (rng.random(2) - 0.5) * 0.3 * spacing
                    x = rx * spec.room_size + (i + 0.5) * spacing + jx
                    y = ry * spec.room_size + (j + 0.5) * spacing + jy
                    nodes.append((nid, 0, (float(x), float(y), 0.0),
                                  f"place_{rx}_{ry}_{i}_{j}"))
                    place_id[(rx, ry, i, j)] = nid
                    nid += 1

    def connect(a: NodeId, b: NodeId) -> None:
        edges.append((a, b, None))

    for rx in range(spec.rooms_x):
        for ry in range(spec.rooms_y):
            for i in range(pps):
                for j in range(pps):
                    if i + 1 < pps:
                        connect(place_id[(rx, ry, i, j)], place_id[(rx, ry, i + 1, j)])
                    if j + 1 < pps:
                        connect(place_id[(rx, ry, i, j)], place_id[(rx, ry, i, j + 1)])

    doors = [((d + 1) * pps) // (spec.door_count_per_shared_wall + 1)
             for d in range(spec.door_count_per_shared_wall)]
    doors = sorted({min(max(j, 0), pps - 1) for j in doors})
    for rx in range(spec.rooms_x):
        for ry in range(spec.rooms_y):
            if rx + 1 < spec.rooms_x:
                for j in doors:
                    connect(place_id[(rx, ry, pps - 1, j)], place_id[(rx + 1, ry, 0, j)])
            if ry + 1 < spec.rooms_y:
                for i in doors:
                    connect(place_id[(rx, ry, i, pps - 1)], place_id[(rx, ry + 1, i, 0)])

    room_id: dict[tuple[int, int], NodeId] = {}
    for rx in range(spec.rooms_x):
        for ry in range(spec.rooms_y):
            members = [place_id[(rx, ry, i, j)] for i in range(pps) for j in range(pps)]
            centroid = np.mean([nodes[m][2] for m in members], axis=0)
            nodes.append((nid, 1, tuple(float(c) for c in centroid), f"room_{rx}_{ry}"))
            room_id[(rx, ry)] = nid
            for m in members:
                parents[m] = nid
                connect(m, nid)
            nid += 1

    for rx in range(spec.rooms_x):
        for ry in range(spec.rooms_y):
            if rx + 1 < spec.rooms_x:
                connect(room_id[(rx, ry)], room_id[(rx + 1, ry)])
            if ry + 1 < spec.rooms_y:
                connect(room_id[(rx, ry)], room_id[(rx, ry + 1)])

    building_of = {rx: rx * spec.buildings // spec.rooms_x for rx in range(spec.rooms_x)}
    for b in range(spec.buildings):
        rooms = [room_id[(rx, ry)] for rx in range(spec.rooms_x)
                 for ry in range(spec.rooms_y) if building_of[rx] == b]
        centroid = np.mean([nodes[r][2] for r in rooms], axis=0)
        bid = nid
        nodes.append((bid, 2, tuple(float(c) for c in centroid), f"building_{b}"))
        for r in rooms:
            parents[r] = bid
            connect(r, bid)
        if b > 0:
            connect(bid - 1, bid)
        nid += 1

    g = SceneGraph(3, nodes, edges, parents, check="full")
    return assign_weights(g)


def gen_fig3_toy() -> tuple[SceneGraph, NodeId]:
    """Single-layer unit-weight graph with a 3-edge route and a 5-edge
    detour between nodes 0 and 3; deleting the returned node forces the
    detour."""
    pos = {0: (0, 0), 1: (1, 0.2), 2: (2, 0.2), 3: (3, 0),
           4: (0.5, -1), 5: (1.3, -1.2), 6: (2.1, -1.2), 7: (2.7, -1)}
    labels = {0: "s", 1: "a", 2: "b", 3: "t", 4: "c", 5: "d", 6: "e", 7: "f"}
    nodes = [(n, 0, (float(x), float(y), 0.0), labels[n]) for n, (x, y) in pos.items()]
    unit_edges = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 7), (7, 3)]
    edges = [(u, v, 1.0) for u, v in unit_edges]
    g = SceneGraph(1, nodes, edges, {}, check="full")
    return g, 1


# Shared layout for the two compression toys: a place corridor under three
# rooms. Node ids: 0=s, 1..6=P1..P6, 7=t1, 8=t2, 9..11=R1..R3 (+12=building
# in the expansion toy).


def gen_budlite_toy(variant: str = "a") -> tuple[SceneGraph, TerminalQuery]:
    """Two-layer corridor world for the bottom-up compressor.

    Terminals s, t1, t2 sit under rooms R1, R3, R2; non-terminal places form
    the corridor s-P1-...-P6-t1 with a branch to t2. ``variant`` toggles the
    ambiguous branch attachment (``"a"``: t2 off P2, ``"b"``: t2 off P3).
    """
    if variant not in ("a", "b"):
        raise ValueError("variant must be 'a' or 'b'")
    t2_x = 2.0 if variant == "a" else 3.0
    pos0 = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0), 3: (3.0, 0.0),
            4: (4.0, 0.0), 5: (5.0, 0.0), 6: (6.0, 0.0), 7: (7.0, 0.0),
            8: (t2_x, 1.2)}
    labels = {0: "s", 1: "P1", 2: "P2", 3: "P3", 4: "P4", 5: "P5", 6: "P6",
              7: "t1", 8: "t2", 9: "R1", 10: "R2", 11: "R3"}
    parents = {0: 9, 1: 9, 2: 10, 3: 10, 4: 10, 8: 10, 5: 11, 6: 11, 7: 11}
    nodes = [(n, 0, (x, y, 0.0), labels[n]) for n, (x, y) in pos0.items()]
    for r in (9, 10, 11):
        kids = [c for c, p in parents.items() if p == r]
        cx = float(np.mean([pos0[c][0] for c in kids]))
        cy = float(np.mean([pos0[c][1] for c in kids]))
        nodes.append((r, 1, (cx, cy, 0.0), labels[r]))
    corridor = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)]
    branch = (2, 8) if variant == "a" else (3, 8)
    rooms = [(9, 10), (10, 11)]
    cross = [(c, p) for c, p in parents.items()]
    edges = [(u, v, None) for u, v in corridor + [branch] + rooms + cross]
    g = assign_weights(SceneGraph(2, nodes, edges, parents, check="full"))
    return g, TerminalQuery(pairs=((0, 7), (0, 8)), budget=6)


def gen_todlite_toy(variant: str = "a") -> tuple[SceneGraph, TerminalQuery]:
    """Three-layer corridor world for the top-down expander.

    Expanding the highest-priority room disconnects a pair until a
    neighboring place is pulled in, which exercises the connectivity repair.
    ``variant`` toggles the ambiguous corridor attachment of the t2 branch.
    """
    if variant not in ("a", "b"):
        raise ValueError("variant must be 'a' or 'b'")
    branch_root = 4 if variant == "a" else 3
    pos0 = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 0.0), 3: (3.0, 0.0),
            4: (4.0, 0.0), 7: (5.0, 0.0),
            5: (float(branch_root), -1.0), 6: (float(branch_root), -2.0),
            8: (float(branch_root), -3.0)}
    labels = {0: "s", 1: "P1", 2: "P2", 3: "P3", 4: "P4", 5: "P5", 6: "P6",
              7: "t1", 8: "t2", 9: "R1", 10: "R2", 11: "R3", 12: "building"}
    parents = {0: 9, 1: 9, 2: 9, 3: 10, 4: 10, 7: 10, 5: 11, 6: 11, 8: 11,
               9: 12, 10: 12, 11: 12}
    nodes = [(n, 0, (x, y, 0.0), labels[n]) for n, (x, y) in pos0.items()]
    for r in (9, 10, 11):
        kids = [c for c, p in parents.items() if p == r]
        cx = float(np.mean([pos0[c][0] for c in kids]))
        cy = float(np.mean([pos0[c][1] for c in kids]))
        nodes.append((r, 1, (cx, cy, 0.0), labels[r]))
    nodes.append((12, 2, (float(np.mean([n[2][0] for n in nodes if n[1] == 1])),
                          float(np.mean([n[2][1] for n in nodes if n[1] == 1])),
                          0.0), labels[12]))
    corridor = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 7)]
    branch = [(branch_root, 5), (5, 6), (6, 8)]
    rooms = [(9, 10), (10, 11)]
    cross = [(c, p) for c, p in parents.items()]
    edges = [(u, v, None) for u, v in corridor + branch + rooms + cross]
    g = assign_weights(SceneGraph(3, nodes, edges, parents, check="full"))
    return g, TerminalQuery(pairs=((0, 7), (0, 8)), budget=9)
