"""Edge-list text format.

First line ``n m``, then one ``u v`` pair per line (0-based, whitespace
separated). A weights file holds one positive integer per line, line ``i``
being the weight of vertex ``i``. Blank lines and ``#`` comments are skipped.
"""

from __future__ import annotations

import io
import os
from typing import IO, Iterator, List, Optional, Tuple, Union

from .graph import Graph, GraphError, WeightedGraph, build_graph

PathOrFile = Union[str, os.PathLike, IO[str]]


def _lines(f: IO[str]) -> Iterator[Tuple[int, str]]:
    for lineno, line in enumerate(f, 1):
        line = line.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _open(src: PathOrFile):
    if isinstance(src, (str, os.PathLike)):
        return open(src, "r", encoding="utf-8")
    return _Borrowed(src)


class _Borrowed:
    def __init__(self, f):
        self.f = f

    def __enter__(self):
        return self.f

    def __exit__(self, *exc):
        return False


def iter_edge_list(f: IO[str]) -> Tuple[int, int, Iterator[Tuple[int, int]]]:
    """Parse the header and return ``(n, m, edges)`` where ``edges`` is a lazy
    iterator over the remaining lines; nothing beyond the current line is buffered."""
    lines = _lines(f)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise GraphError("empty edge-list input") from None
    parts = header.split()
    if len(parts) != 2:
        raise GraphError(f"line {lineno}: expected header 'n m', got {header!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphError(f"line {lineno}: non-integer header {header!r}") from None

    def edges():
        count = 0
        for lineno, line in lines:
            parts = line.split()
            if len(parts) != 2:
                raise GraphError(f"line {lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphError(f"line {lineno}: non-integer edge {line!r}") from None
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"line {lineno}: edge ({u}, {v}) out of range for n={n}", (u, v))
            count += 1
            yield u, v
        if count != m:
            raise GraphError(f"header declares {m} edges, found {count}")

    return n, m, edges()


def read_edge_list(src: PathOrFile) -> Graph:
    with _open(src) as f:
        n, _, edges = iter_edge_list(f)
        return build_graph(n, list(edges))


def read_weights(src: PathOrFile, n: Optional[int] = None) -> List[int]:
    with _open(src) as f:
        out = []
        for lineno, line in _lines(f):
            try:
                w = int(line)
            except ValueError:
                raise GraphError(f"line {lineno}: weight {line!r} is not an integer") from None
            if w < 1:
                raise GraphError(f"line {lineno}: weight must be positive, got {w}")
            out.append(w)
    if n is not None and len(out) != n:
        raise GraphError(f"expected {n} weights, got {len(out)}")
    return out


def read_weighted(graph_src: PathOrFile, weights_src: PathOrFile) -> WeightedGraph:
    g = read_edge_list(graph_src)
    return WeightedGraph(g, tuple(read_weights(weights_src, g.n)))


def write_edge_list(g: Graph, dst: PathOrFile) -> None:
    """Write ``g`` with edges sorted, so equal graphs give identical files."""
    if isinstance(g, WeightedGraph):
        g = g.graph
    with _open_w(dst) as f:
        f.write(f"{g.n} {g.m}\n")
        for u, v in g.edges():
            f.write(f"{u} {v}\n")


def write_weights(weights, dst: PathOrFile) -> None:
    with _open_w(dst) as f:
        for w in weights:
            f.write(f"{int(w)}\n")


def _open_w(dst: PathOrFile):
    if isinstance(dst, (str, os.PathLike)):
        return open(dst, "w", encoding="utf-8")
    return _Borrowed(dst)


def dumps_edge_list(g: Graph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def loads_edge_list(text: str) -> Graph:
    return read_edge_list(io.StringIO(text))
