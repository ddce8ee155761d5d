"""Immutable simple undirected graphs, weighted graphs and vertex sets."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np


class GraphError(ValueError):
    """Raised for malformed graph input. ``edge`` names the offending pair, if any."""

    def __init__(self, message: str, edge: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.edge = edge


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    Build through :func:`build_graph`; the constructor trusts its input.
    """

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    m: int

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adjacency == other.adjacency

    def __hash__(self):
        return hash((self.n, self.adjacency))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def avg_degree(self) -> Fraction:
        if self.n == 0:
            return Fraction(0)
        return Fraction(2 * self.m, self.n)

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, in sorted order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    @cached_property
    def csr(self) -> Tuple[np.ndarray, np.ndarray]:
        """``(indptr, indices)`` arrays; row ``v`` lists N(v) in sorted order."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees)
        indices = np.fromiter(
            (u for nbrs in self.adjacency for u in nbrs), dtype=np.int64, count=2 * self.m
        )
        return indptr, indices

    @cached_property
    def bitmasks(self) -> Tuple[int, ...]:
        """Neighborhood of each vertex as an int bitmask."""
        out = []
        for nbrs in self.adjacency:
            mask = 0
            for u in nbrs:
                mask |= 1 << u
            out.append(mask)
        return tuple(out)


@dataclass(frozen=True)
class WeightedGraph:
    """A :class:`Graph` with a positive integer weight on every vertex."""

    graph: Graph
    weights: Tuple[int, ...]

    def __post_init__(self):
        weights = tuple(self.weights)
        if len(weights) != self.graph.n:
            raise GraphError(
                f"expected {self.graph.n} weights, got {len(weights)}"
            )
        for v, w in enumerate(weights):
            if isinstance(w, bool) or int(w) != w or w < 1:
                raise GraphError(f"weight of vertex {v} must be a positive integer, got {w!r}")
        object.__setattr__(self, "weights", tuple(int(w) for w in weights))

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    def weight(self, vertices: Iterable[int]) -> int:
        return sum(self.weights[v] for v in vertices)

    def closed_nbhd_weight(self, v: int) -> int:
        """w(N[v])."""
        return self.weights[v] + sum(self.weights[u] for u in self.graph.adjacency[v])


AnyGraph = Union[Graph, WeightedGraph]


def split_weights(g: AnyGraph) -> Tuple[Graph, Optional[Tuple[int, ...]]]:
    if isinstance(g, WeightedGraph):
        return g.graph, g.weights
    return g, None


@dataclass(frozen=True)
class VertexSet:
    """A set of vertex ids drawn from ``range(universe)``."""

    members: frozenset
    universe: int

    def __post_init__(self):
        members = frozenset(int(v) for v in self.members)
        for v in members:
            if not 0 <= v < self.universe:
                raise GraphError(f"vertex {v} outside universe of size {self.universe}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Iterable[int], universe: int) -> "VertexSet":
        return cls(frozenset(members), universe)

    @classmethod
    def from_mask(cls, mask: Sequence[bool]) -> "VertexSet":
        return cls(frozenset(int(v) for v in np.flatnonzero(mask)), len(mask))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, v):
        return v in self.members

    def __le__(self, other: "VertexSet") -> bool:
        return self.members <= other.members

    def sorted(self) -> list:
        return sorted(self.members)

    def weight(self, g: AnyGraph) -> int:
        _, weights = split_weights(g)
        if weights is None:
            return len(self.members)
        return sum(weights[v] for v in self.members)


@dataclass(frozen=True)
class DegreeProfile:
    max_degree: int
    avg_degree: Fraction
    histogram: Tuple[int, ...]
    opt_histogram: Optional[Tuple[int, ...]] = None
    m_opt: Optional[int] = field(default=None)


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Validate an edge list and build a :class:`Graph`.

    Self-loops, duplicate edges (in either orientation) and out-of-range
    endpoints raise :class:`GraphError` carrying the offending edge.
    """
    if n < 0:
        raise GraphError(f"vertex count must be nonnegative, got {n}")
    adj = [set() for _ in range(n)]
    m = 0
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}", (u, v))
        if u == v:
            raise GraphError(f"self-loop at vertex {u}", (u, v))
        if v in adj[u]:
            raise GraphError(f"duplicate edge ({u}, {v})", (u, v))
        adj[u].add(v)
        adj[v].add(u)
        m += 1
    return Graph(n, tuple(tuple(sorted(a)) for a in adj), m)


def build_weighted(g: Graph, weights: Iterable[int]) -> WeightedGraph:
    return WeightedGraph(g, tuple(weights))


def check_graph(g: Graph) -> None:
    """Re-verify the structural invariants of ``g``; raise :class:`GraphError` on failure."""
    if len(g.adjacency) != g.n:
        raise GraphError("adjacency length differs from n")
    total = 0
    for v, nbrs in enumerate(g.adjacency):
        if list(nbrs) != sorted(set(nbrs)):
            raise GraphError(f"adjacency of {v} is not sorted and duplicate-free")
        for u in nbrs:
            if u == v:
                raise GraphError(f"self-loop at vertex {v}", (v, v))
            if not 0 <= u < g.n:
                raise GraphError(f"neighbor {u} of {v} out of range", (v, u))
            if v not in g.adjacency[u]:
                raise GraphError(f"asymmetric adjacency between {v} and {u}", (v, u))
        total += len(nbrs)
    if total != 2 * g.m:
        raise GraphError(f"m={g.m} but adjacency lists sum to {total}")


def is_independent(g: AnyGraph, s: Union[VertexSet, Iterable[int]]) -> bool:
    graph, _ = split_weights(g)
    members = s.members if isinstance(s, VertexSet) else frozenset(s)
    return not any(u in members for v in members for u in graph.adjacency[v])


def degree_profile(g: AnyGraph, opt: Optional[Union[VertexSet, Iterable[int]]] = None) -> DegreeProfile:
    """Degree statistics; with ``opt`` also the per-degree counts of ``opt`` and
    the number of edges with an endpoint in ``opt``."""
    graph, _ = split_weights(g)
    delta = graph.max_degree
    counts = Counter(graph.degrees)
    histogram = tuple(counts.get(i, 0) for i in range(delta + 1))
    if opt is None:
        return DegreeProfile(delta, graph.avg_degree, histogram)
    members = opt.members if isinstance(opt, VertexSet) else frozenset(opt)
    if not is_independent(graph, members):
        raise GraphError("opt is not an independent set")
    opt_counts = Counter(graph.degrees[v] for v in members)
    opt_histogram = tuple(opt_counts.get(i, 0) for i in range(delta + 1))
    m_opt = sum(i * c for i, c in enumerate(opt_histogram))
    return DegreeProfile(delta, graph.avg_degree, histogram, opt_histogram, m_opt)
