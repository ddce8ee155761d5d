"""Exact maximum (weight) independent set by branch and bound, for small graphs."""

from __future__ import annotations

from typing import Optional, Tuple

from .graph import AnyGraph, VertexSet, split_weights

DEFAULT_LIMIT = 40


class OracleLimitError(ValueError):
    pass


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _clique_cover_bound(cand: int, nbr, weights, order) -> int:
    # Greedy clique cover over the candidates; an independent set holds at most
    # one vertex per clique, so the sum of per-clique maxima bounds it.
    cliques = []  # [common-neighbour mask, max weight]
    total = 0
    for v in order:
        if not (cand >> v) & 1:
            continue
        for c in cliques:
            if (c[0] >> v) & 1:
                c[0] &= nbr[v]
                break
        else:
            cliques.append([nbr[v] & cand, weights[v]])
            total += weights[v]
    return total


def exact_max_is(g: AnyGraph, limit: int = DEFAULT_LIMIT) -> Tuple[VertexSet, int]:
    """Maximum-weight independent set (cardinality if ``g`` is unweighted).

    Branches on a maximum-degree candidate; takes isolated candidates and
    dominant degree-1 candidates without branching; prunes with a greedy
    clique-cover bound. The incumbent starts from a greedy solution.
    Raises :class:`OracleLimitError` when ``g.n > limit``.
    """
    graph, weights = split_weights(g)
    n = graph.n
    if n > limit:
        raise OracleLimitError(f"exact oracle limited to n <= {limit}, got n = {n}")
    if weights is None:
        weights = (1,) * n
    nbr = graph.bitmasks
    # Heavier vertices open cliques first, which tightens the bound.
    order = sorted(range(n), key=lambda v: (-weights[v], v))

    best_mask, best_val = _greedy_incumbent(n, nbr, weights)
    best = [best_val, best_mask]

    def search(cand: int, chosen: int, value: int):
        # Reductions: isolated candidates are always taken; a degree-1
        # candidate at least as heavy as its neighbour is taken.
        while True:
            progress = False
            for v in _bits(cand):
                nb = nbr[v] & cand
                if nb == 0:
                    chosen |= 1 << v
                    value += weights[v]
                    cand &= ~(1 << v)
                    progress = True
                elif nb & (nb - 1) == 0 and weights[v] >= weights[nb.bit_length() - 1]:
                    chosen |= 1 << v
                    value += weights[v]
                    cand &= ~((1 << v) | nb)
                    progress = True
                    break
            if not progress:
                break
        if cand == 0:
            if value > best[0]:
                best[0], best[1] = value, chosen
            return
        if value + _clique_cover_bound(cand, nbr, weights, order) <= best[0]:
            return
        v = max(_bits(cand), key=lambda u: (bin(nbr[u] & cand).count("1"), -u))
        search(cand & ~(1 << v) & ~nbr[v], chosen | (1 << v), value + weights[v])
        search(cand & ~(1 << v), chosen, value)

    search((1 << n) - 1, 0, 0)
    return VertexSet(frozenset(_bits(best[1])), n), best[0]


def _greedy_incumbent(n, nbr, weights) -> Tuple[int, int]:
    cand = (1 << n) - 1
    chosen = 0
    value = 0
    while cand:
        v = max(
            _bits(cand),
            key=lambda u: (weights[u] / (weights[u] + sum(weights[x] for x in _bits(nbr[u] & cand))), -u),
        )
        chosen |= 1 << v
        value += weights[v]
        cand &= ~((1 << v) | nbr[v])
    return chosen, value


def independence_number(g: AnyGraph, limit: Optional[int] = None) -> int:
    return exact_max_is(g, DEFAULT_LIMIT if limit is None else limit)[1]
