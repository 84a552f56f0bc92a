"""JSON readers and writers for graphs and other external formats."""

from __future__ import annotations

import json
from pathlib import Path

from .graph import Multigraph


def graph_from_json(data: dict) -> Multigraph:
    """``{"n": int, "edges": [[u, v, mult], ...]}``; ``mult`` defaults to 1."""
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise ValueError('graph JSON needs keys "n" and "edges"')
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError('"n" must be an integer')
    edges = data["edges"]
    if not isinstance(edges, list):
        raise ValueError('"edges" must be a list')
    for e in edges:
        if not isinstance(e, list) or len(e) not in (2, 3) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in e
        ):
            raise ValueError(f"malformed edge entry {e!r}")
    return Multigraph(n, edges)


def graph_to_json(graph: Multigraph) -> dict:
    return {"n": graph.n, "edges": [list(e) for e in graph.edge_items()]}


def load_graph(path: str | Path) -> Multigraph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
    return graph_from_json(data)


def dump_graph(graph: Multigraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(graph)) + "\n")
