"""Instance generators: cliques, regular bipartite graphs, the tight families."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Set, Tuple

import numpy as np

from .graph import Graph, GraphError, WeightedGraph, build_graph

MAX_ATTEMPTS = 1000
# Random permutations tried per matching before falling back to augmenting paths.
PERMUTATION_TRIES = 50


def gen_clique(k: int) -> Graph:
    if k < 1:
        raise GraphError(f"clique size must be >= 1, got {k}")
    return build_graph(k, ((u, v) for u in range(k) for v in range(u + 1, k)))


def gen_petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, outer + spokes + inner)


def gen_gnp(n: int, p: float, seed: Optional[int] = None) -> Graph:
    """Erdos-Renyi G(n, p). Same seed, same edge list."""
    if not 0.0 <= p <= 1.0:
        raise GraphError(f"edge probability must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return build_graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def _complement_matching(taken: List[Set[int]], side: int, rng) -> Optional[List[int]]:
    """Perfect matching of left to right avoiding ``taken`` edges (Kuhn's augmenting paths,
    randomized visiting order). Returns ``match[left] = right`` or None."""
    match_right = [-1] * side
    options = []
    for i in range(side):
        opts = [j for j in range(side) if j not in taken[i]]
        rng.shuffle(opts)
        options.append(opts)

    def augment(i, seen):
        for j in options[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_right[j] < 0 or augment(match_right[j], seen):
                match_right[j] = i
                return True
        return False

    order = list(range(side))
    rng.shuffle(order)
    for i in order:
        if not augment(i, set()):
            return None
    match = [0] * side
    for j, i in enumerate(match_right):
        match[i] = j
    return match


def regular_bipartite_edges(delta: int, side: int, seed: Optional[int] = None) -> List[Tuple[int, int]]:
    """Edges ``(left, right)`` with both indices in ``range(side)`` of a
    ``delta``-regular bipartite graph, as a union of ``delta`` perfect matchings."""
    if delta < 0 or side < 0:
        raise GraphError("delta and side must be nonnegative")
    if delta > side:
        raise GraphError(
            f"no simple {delta}-regular bipartite graph with sides of size {side}; "
            f"use side >= {delta}"
        )
    rng = np.random.default_rng(seed)
    py_rng = np.random.default_rng(rng.integers(2**63))
    taken: List[Set[int]] = [set() for _ in range(side)]
    for _ in range(delta):
        match = None
        for _ in range(PERMUTATION_TRIES):
            perm = rng.permutation(side).tolist()
            if all(perm[i] not in taken[i] for i in range(side)):
                match = perm
                break
        attempts = PERMUTATION_TRIES
        while match is None and attempts < MAX_ATTEMPTS:
            # Complement of a k-regular bipartite graph is regular, so this succeeds.
            match = _complement_matching(taken, side, py_rng)
            attempts += 1
        if match is None:
            raise GraphError(
                f"could not build a {delta}-regular bipartite graph on {side}+{side} "
                f"vertices after {MAX_ATTEMPTS} attempts; try a larger side"
            )
        for i, j in enumerate(match):
            taken[i].add(j)
    return sorted((i, j) for i in range(side) for j in taken[i])


def gen_regular_bipartite(delta: int, side: int, seed: Optional[int] = None) -> Graph:
    """``delta``-regular bipartite graph; left side ``0..side-1``, right side ``side..2*side-1``."""
    edges = regular_bipartite_edges(delta, side, seed)
    return build_graph(2 * side, ((i, side + j) for i, j in edges))


def gen_biregular_bipartite(large: int, small: int, degree: int) -> Graph:
    """Bipartite graph with regular sides: ``large`` vertices of degree ``degree``
    and ``small`` vertices of degree ``large*degree/small``.

    Left vertex ``i`` is joined to right vertices ``(i*degree + j) mod small``.
    """
    if small < 1 or large < small:
        raise GraphError("need large >= small >= 1")
    if degree > small or (large * degree) % small:
        raise GraphError(f"degree {degree} incompatible with sides {large}, {small}")
    edges = [(i, large + (i * degree + j) % small) for i in range(large) for j in range(degree)]
    return build_graph(large + small, edges)


def gen_turan_tight(delta: int, seed: Optional[int] = None) -> Tuple[Graph, int]:
    """Delta-regular bipartite graph on two sides of ``2*delta - 1`` vertices
    plus two isolated vertices. Returns the graph and its independence number ``2*delta + 1``."""
    if delta < 1:
        raise GraphError(f"delta must be >= 1, got {delta}")
    side = 2 * delta - 1
    edges = regular_bipartite_edges(delta, side, seed)
    g = build_graph(4 * delta, ((i, side + j) for i, j in edges))
    return g, 2 * delta + 1


def gen_weighted_bipartite(delta: int, side: int, beta, seed: Optional[int] = None) -> WeightedGraph:
    """Delta-regular bipartite graph with left weight 1 and right weight ``beta`` (0 < beta <= 1).

    Weights are integers: left vertices get ``beta.denominator``, right vertices
    ``beta.numerator``.
    """
    beta = Fraction(beta)
    if not 0 < beta <= 1:
        raise GraphError(f"beta must lie in (0, 1], got {beta}")
    g = gen_regular_bipartite(delta, side, seed)
    weights = [beta.denominator] * side + [beta.numerator] * side
    return WeightedGraph(g, tuple(weights))


def gen_weighted_complete_bipartite(n_side: int, q: int) -> WeightedGraph:
    """K_{N,N}; vertices ``0..N-1`` weigh 1, vertices ``N..2N-1`` weigh ``q``."""
    if n_side < 1 or q < 1:
        raise GraphError("need n_side >= 1 and q >= 1")
    g = build_graph(2 * n_side, ((i, n_side + j) for i in range(n_side) for j in range(n_side)))
    return WeightedGraph(g, tuple([1] * n_side + [int(q)] * n_side))
