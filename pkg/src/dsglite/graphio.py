"""Versioned JSON file formats: ``dlite-graph/1`` and ``dlite-query/1``.

Serialization is deterministic (sorted ids, fixed key order) so identical
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Union

from .graph import SceneGraph, SchemaError, TerminalQuery

GRAPH_SCHEMA = "dlite-graph/1"
QUERY_SCHEMA = "dlite-query/1"


def graph_to_dict(g: SceneGraph) -> dict[str, Any]:
    nodes = [{"id": n, "layer": g.layer_of(n), "pos": [float(c) for c in g.pos_of(n)],
              "label": g.label_of(n)} for n in g.node_ids()]
    edges = []
    for u, v, w in g.edges():
        row: dict[str, Any] = {"u": u, "v": v}
        if not math.isnan(w):
            row["w"] = float(w)
        edges.append(row)
    parents = [{"child": c, "parent": p} for c, p in sorted(g.parent_map().items())]
    return {"schema": GRAPH_SCHEMA, "layers": g.layer_count, "nodes": nodes,
            "edges": edges, "parents": parents}


def graph_from_dict(data: dict[str, Any]) -> SceneGraph:
    if not isinstance(data, dict):
        raise SchemaError("graph document must be a JSON object")
    if data.get("schema") != GRAPH_SCHEMA:
        raise SchemaError(f"expected schema {GRAPH_SCHEMA!r}, got {data.get('schema')!r}")
    for key in ("layers", "nodes", "edges", "parents"):
        if key not in data:
            raise SchemaError(f"graph document missing field {key!r}")
    layers = data["layers"]
    if not isinstance(layers, int) or layers < 1:
        raise SchemaError("'layers' must be a positive integer")
    nodes = []
    for row in data["nodes"]:
        try:
            nodes.append((int(row["id"]), int(row["layer"]),
                          [float(c) for c in row["pos"]], str(row.get("label", ""))))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad node row {row!r}: {exc}") from exc
    edges = []
    for row in data["edges"]:
        try:
            w = row.get("w")
            edges.append((int(row["u"]), int(row["v"]),
                          None if w is None else float(w)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad edge row {row!r}: {exc}") from exc
    parents = {}
    for row in data["parents"]:
        try:
            parents[int(row["child"])] = int(row["parent"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad parent row {row!r}: {exc}") from exc
    return SceneGraph(layers, nodes, edges, parents, check="basic")


def query_to_dict(q: TerminalQuery) -> dict[str, Any]:
    return {"schema": QUERY_SCHEMA,
            "pairs": [{"s": s, "t": t} for s, t in q.pairs],
            "budget": q.budget}


def query_from_dict(data: dict[str, Any]) -> TerminalQuery:
    if not isinstance(data, dict):
        raise SchemaError("query document must be a JSON object")
    if data.get("schema") != QUERY_SCHEMA:
        raise SchemaError(f"expected schema {QUERY_SCHEMA!r}, got {data.get('schema')!r}")
    try:
        pairs = tuple((int(row["s"]), int(row["t"])) for row in data["pairs"])
        budget = int(data["budget"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad query document: {exc}") from exc
    if not pairs:
        raise SchemaError("query has no terminal pairs")
    if budget < 1:
        raise SchemaError("budget must be a positive integer")
    return TerminalQuery(pairs=pairs, budget=budget)


def dumps(data: dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


def save_graph(g: SceneGraph, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(graph_to_dict(g)))


def load_graph(path: Union[str, Path]) -> SceneGraph:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    return graph_from_dict(data)


def save_query(q: TerminalQuery, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(query_to_dict(q)))


def load_query(path: Union[str, Path]) -> TerminalQuery:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    return query_from_dict(data)
