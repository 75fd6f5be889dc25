# subgraph_detect/edgelist.py
"""Edge-list text format: a header line ``N m`` followed by m lines ``i j``."""
from __future__ import annotations

import io
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from subgraph_detect.errors import DomainError, OutputError, ParseError
from subgraph_detect.graphs import Graph


def format_edgelist(g: Graph) -> str:
    lines = [f"{g.num_vertices} {g.num_edges}"]
    lines.extend(f"{i} {j}" for i, j in g.edges.tolist())
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str, source: str = "<text>") -> Graph:
    stripped = text.strip()
    if not stripped:
        raise ParseError(f"{source}: empty edge list, expected a header line 'N m'")
    header, _, body = stripped.partition("\n")
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"{source}: header must be 'N m', got {header!r}")
    try:
        N, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"{source}: header must hold two integers, got {header!r}") from None
    edges = _read_pairs(body, source)
    if edges.shape[0] != m:
        raise ParseError(f"{source}: header announces {m} edges, found {edges.shape[0]}")
    try:
        return Graph.from_edges(N, edges)
    except DomainError as exc:
        raise ParseError(f"{source}: {exc}") from None


def _read_pairs(body: str, source: str) -> np.ndarray:
    if not body.strip():
        return np.zeros((0, 2), dtype=np.int64)
    try:
        df = pd.read_csv(io.StringIO(body), sep=r"\s+", header=None, comment="#", dtype=np.int64, engine="python")
    except (ValueError, pd.errors.ParserError) as exc:
        raise ParseError(f"{source}: edge lines must be 'i j' integer pairs ({exc})") from None
    if df.shape[1] != 2:
        raise ParseError(f"{source}: edge lines must hold exactly two integers, found {df.shape[1]} columns")
    return df.to_numpy(dtype=np.int64)


def read_edgelist(path: Union[str, Path]) -> Graph:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot read edge list {path}: {exc}") from exc
    return parse_edgelist(text, source=str(path))


def write_edgelist(g: Graph, path: Union[str, Path]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_edgelist(g), encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OutputError(f"cannot write edge list {path}: {exc}") from exc
    return path
