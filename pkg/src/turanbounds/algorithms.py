"""Solution-producing procedures and the Monte Carlo harness.

Randomized rules work from a :class:`RankAssignment`: a vertex beats a
neighbour when its key is larger, with equal keys resolved in favour of the
lower vertex id. Algorithm tags (stable strings): ``boppana``, ``max``,
``selkow``, ``greedy-min``, ``greedy-max``, ``gwmin2``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from .bounds import caro_wei
from .graphcore import AnyGraph, Graph, VertexSet, WeightedGraph, split_weights

UNWEIGHTED = "unweighted"
WEIGHTED = "weighted"

RANDOMIZED_TAGS = ("boppana", "max", "selkow")
DETERMINISTIC_TAGS = ("greedy-min", "greedy-max", "gwmin2")
ALGORITHM_TAGS = RANDOMIZED_TAGS + DETERMINISTIC_TAGS

# Trials per RNG block. Trial i is row i % BLOCK of block i // BLOCK, so its
# keys depend only on (seed, i) and not on how blocks are scheduled.
BLOCK = 1024
# Upper bound on booleans materialized at once in the vectorized kernel.
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True, eq=False)
class RankAssignment:
    """Per-vertex rank keys.

    Unweighted mode holds uniform 64-bit integers. Weighted mode holds
    ``ln(x_v)/w(v)`` for uniform ``x_v``, which orders vertices exactly as
    ``x_v ** (1/w(v))`` does; ``uniforms`` keeps the ``x_v`` themselves.
    """

    keys: np.ndarray
    mode: str = UNWEIGHTED
    uniforms: Optional[np.ndarray] = None

    @classmethod
    def from_keys(cls, keys: Sequence, mode: str = UNWEIGHTED) -> "RankAssignment":
        return cls(np.asarray(keys), mode)

    def __len__(self):
        return len(self.keys)

    def beats(self, v: int, u: int) -> bool:
        kv, ku = self.keys[v], self.keys[u]
        return bool(kv > ku or (kv == ku and v < u))

    def transformed(self, fn: Callable[[np.ndarray], np.ndarray]) -> "RankAssignment":
        return RankAssignment(fn(self.keys), self.mode, self.uniforms)


def _uniform_keys(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.integers(0, np.iinfo(np.uint64).max, size=shape, dtype=np.uint64, endpoint=True)


def _weighted_keys(rng: np.random.Generator, shape, weights) -> Tuple[np.ndarray, np.ndarray]:
    x = 1.0 - rng.random(shape)  # uniform on (0, 1]
    return weighted_key(x, weights), x


def weighted_key(x, w):
    """Rank key for uniform draw(s) ``x`` and weight(s) ``w``: ln(x)/w."""
    return np.log(x) / np.asarray(w, dtype=float)


def sample_ranks(
    g: AnyGraph, mode: str = UNWEIGHTED, weights: Optional[Sequence[int]] = None, seed=None
) -> RankAssignment:
    graph, own_weights = split_weights(g)
    rng = np.random.default_rng(seed)
    if mode == UNWEIGHTED:
        return RankAssignment(_uniform_keys(rng, graph.n), UNWEIGHTED)
    if mode != WEIGHTED:
        raise ValueError(f"unknown rank mode {mode!r}")
    weights = weights if weights is not None else own_weights
    if weights is None:
        raise ValueError("weighted ranks need weights")
    if len(weights) != graph.n:
        raise ValueError("one weight per vertex required")
    keys, x = _weighted_keys(rng, graph.n, weights)
    return RankAssignment(keys, WEIGHTED, x)


def _check_ranks(graph: Graph, ranks: RankAssignment) -> None:
    if len(ranks) != graph.n:
        raise ValueError(f"ranks cover {len(ranks)} vertices, graph has {graph.n}")


def local_maxima(graph: Graph, ranks: RankAssignment) -> VertexSet:
    _check_ranks(graph, ranks)
    return VertexSet(
        frozenset(
            v for v in range(graph.n) if all(ranks.beats(v, u) for u in graph.adjacency[v])
        ),
        graph.n,
    )


def boppana(g: AnyGraph, ranks: RankAssignment) -> VertexSet:
    """Vertices whose rank exceeds that of every neighbour."""
    graph, _ = split_weights(g)
    return local_maxima(graph, ranks)


def expected_boppana_size(g: AnyGraph) -> Fraction:
    """E|boppana(g)| under uniform ranks, which is the Caro-Wei bound."""
    return caro_wei(g)


def max_alg(wg: WeightedGraph, ranks: RankAssignment, delta1_fix: bool = False) -> VertexSet:
    """MAX rule: local maxima of weight-tilted ranks. ``delta1_fix`` switches to
    :func:`max_alg_delta1_fix` (graphs of maximum degree <= 1 only)."""
    if delta1_fix:
        return max_alg_delta1_fix(wg, ranks)
    graph, _ = split_weights(wg)
    if ranks.mode != WEIGHTED:
        raise ValueError("max_alg needs weighted ranks")
    return local_maxima(graph, ranks)


def max_alg_delta1_fix(wg: WeightedGraph, ranks: RankAssignment) -> VertexSet:
    """On a matching, keep the heavier endpoint of each edge (ties by rank)."""
    graph, weights = split_weights(wg)
    if graph.max_degree > 1:
        raise ValueError(f"delta1 fix needs maximum degree <= 1, got {graph.max_degree}")
    _check_ranks(graph, ranks)
    chosen = set()
    for v in range(graph.n):
        nbrs = graph.adjacency[v]
        if not nbrs:
            chosen.add(v)
            continue
        u = nbrs[0]
        if weights[v] > weights[u] or (weights[v] == weights[u] and ranks.beats(v, u)):
            chosen.add(v)
    return VertexSet(frozenset(chosen), graph.n)


def selkow_two_round(g: AnyGraph, ranks: RankAssignment) -> VertexSet:
    """Boppana's set plus a second round among vertices it did not dominate.

    A survivor joins in round two when it beats every neighbour that also
    survived round one.
    """
    graph, _ = split_weights(g)
    first = local_maxima(graph, ranks).members
    removed = set(first)
    for v in first:
        removed.update(graph.adjacency[v])
    second = {
        v
        for v in range(graph.n)
        if v not in removed
        and all(ranks.beats(v, u) for u in graph.adjacency[v] if u not in removed)
    }
    return VertexSet(frozenset(first | second), graph.n)


def greedy_min_degree(g: AnyGraph) -> VertexSet:
    """Repeatedly take a minimum-degree vertex and delete its closed neighbourhood."""
    graph, _ = split_weights(g)
    alive = [True] * graph.n
    deg = list(graph.degrees)
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    chosen = []
    while heap:
        d, v = heapq.heappop(heap)
        if not alive[v] or d != deg[v]:
            continue
        chosen.append(v)
        dropped = [v] + [u for u in graph.adjacency[v] if alive[u]]
        for u in dropped:
            alive[u] = False
        for u in dropped:
            for x in graph.adjacency[u]:
                if alive[x]:
                    deg[x] -= 1
                    heapq.heappush(heap, (deg[x], x))
    return VertexSet(frozenset(chosen), graph.n)


def greedy_max_degree_removal(g: AnyGraph) -> VertexSet:
    """Delete a maximum-degree vertex until no edges remain; return the survivors."""
    graph, _ = split_weights(g)
    alive = [True] * graph.n
    deg = list(graph.degrees)
    heap = [(-d, v) for v, d in enumerate(deg) if d > 0]
    heapq.heapify(heap)
    while heap:
        d, v = heapq.heappop(heap)
        if not alive[v] or -d != deg[v]:
            continue
        alive[v] = False
        for u in graph.adjacency[v]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] > 0:
                    heapq.heappush(heap, (-deg[u], u))
    return VertexSet(frozenset(v for v in range(graph.n) if alive[v]), graph.n)


def gwmin2(wg: AnyGraph) -> VertexSet:
    """Greedy on w(v)/w(N[v]) over the remaining graph, deleting closed neighbourhoods."""
    graph, weights = split_weights(wg)
    if weights is None:
        weights = (1,) * graph.n
    alive = [True] * graph.n
    closed = [weights[v] + sum(weights[u] for u in graph.adjacency[v]) for v in range(graph.n)]
    heap = [(-Fraction(weights[v], closed[v]), v) for v in range(graph.n)]
    heapq.heapify(heap)
    chosen = []
    while heap:
        key, v = heapq.heappop(heap)
        if not alive[v] or -key != Fraction(weights[v], closed[v]):
            continue
        chosen.append(v)
        dropped = [v] + [u for u in graph.adjacency[v] if alive[u]]
        for u in dropped:
            alive[u] = False
        touched = set()
        for u in dropped:
            for x in graph.adjacency[u]:
                if alive[x]:
                    closed[x] -= weights[u]
                    touched.add(x)
        for x in touched:
            heapq.heappush(heap, (-Fraction(weights[x], closed[x]), x))
    return VertexSet(frozenset(chosen), graph.n)


# --- runs and Monte Carlo -------------------------------------------------


@dataclass(frozen=True)
class RunResult:
    solution: VertexSet
    value: int
    seed: Optional[int]
    algorithm: str


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    trials: int
    target: Optional[float] = None

    def deviation(self) -> Optional[float]:
        """|mean - target| in units of stderr (inf when stderr is 0 and they differ)."""
        if self.target is None:
            return None
        gap = abs(self.mean - float(self.target))
        if self.stderr == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / self.stderr

    def within(self, k: float = 4.0, target: Optional[float] = None) -> bool:
        target = self.target if target is None else target
        return abs(self.mean - float(target)) <= k * self.stderr


def _require_weights(tag: str, weights) -> None:
    if weights is None:
        raise ValueError(f"algorithm {tag!r} needs a weighted graph")


def run_algorithm(tag: str, g: AnyGraph, seed=None) -> RunResult:
    """One run of ``tag`` on ``g``; randomized rules draw ranks from ``seed``."""
    graph, weights = split_weights(g)
    if tag == "boppana":
        sol = boppana(graph, sample_ranks(graph, UNWEIGHTED, seed=seed))
    elif tag == "selkow":
        sol = selkow_two_round(graph, sample_ranks(graph, UNWEIGHTED, seed=seed))
    elif tag == "max":
        _require_weights(tag, weights)
        sol = max_alg(g, sample_ranks(graph, WEIGHTED, weights, seed=seed))
    elif tag == "greedy-min":
        sol = greedy_min_degree(graph)
    elif tag == "greedy-max":
        sol = greedy_max_degree_removal(graph)
    elif tag == "gwmin2":
        sol = gwmin2(g)
    else:
        raise ValueError(f"unknown algorithm tag {tag!r}; expected one of {ALGORITHM_TAGS}")
    return RunResult(sol, sol.weight(g), seed, tag)


def _block_rng(seed, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))


def block_ranks(g: AnyGraph, mode: str, seed, block: int) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Keys for trials ``block*BLOCK .. block*BLOCK + BLOCK - 1`` as a ``(BLOCK, n)`` array."""
    graph, weights = split_weights(g)
    rng = _block_rng(seed, block)
    if mode == UNWEIGHTED:
        return _uniform_keys(rng, (BLOCK, graph.n)), None
    _require_weights("max", weights)
    return _weighted_keys(rng, (BLOCK, graph.n), weights)


def trial_ranks(g: AnyGraph, mode: str, seed, trial: int) -> RankAssignment:
    """The rank assignment Monte Carlo trial ``trial`` uses."""
    keys, x = block_ranks(g, mode, seed, trial // BLOCK)
    row = trial % BLOCK
    return RankAssignment(keys[row].copy(), mode, None if x is None else x[row].copy())


class _Arcs:
    """Directed arcs in CSR order, for batched local-maximum tests."""

    def __init__(self, graph: Graph):
        indptr, indices = graph.csr
        degrees = np.diff(indptr)
        self.n = graph.n
        self.src = np.repeat(np.arange(graph.n), degrees)
        self.dst = indices
        self.lower_id = self.src < self.dst
        self.nonempty = np.flatnonzero(degrees > 0)
        self.starts = indptr[:-1][self.nonempty]

    def all_per_vertex(self, arc_values: np.ndarray) -> np.ndarray:
        """For each vertex, AND of ``arc_values`` over its outgoing arcs (True if none)."""
        out = np.ones((arc_values.shape[0], self.n), dtype=bool)
        if self.nonempty.size:
            out[:, self.nonempty] = np.logical_and.reduceat(arc_values, self.starts, axis=1)
        return out

    def any_per_vertex(self, arc_values: np.ndarray) -> np.ndarray:
        out = np.zeros((arc_values.shape[0], self.n), dtype=bool)
        if self.nonempty.size:
            out[:, self.nonempty] = np.logical_or.reduceat(arc_values, self.starts, axis=1)
        return out

    def wins(self, keys: np.ndarray) -> np.ndarray:
        ks, kd = keys[:, self.src], keys[:, self.dst]
        return (ks > kd) | ((ks == kd) & self.lower_id)


def _batch_select(arcs: _Arcs, keys: np.ndarray, two_round: bool) -> np.ndarray:
    wins = arcs.wins(keys)
    first = arcs.all_per_vertex(wins)
    if not two_round:
        return first
    removed = first | arcs.any_per_vertex(first[:, arcs.dst])
    second = ~removed & arcs.all_per_vertex(wins | removed[:, arcs.dst])
    return first | second


def iter_selections(tag: str, g: AnyGraph, trials: int, seed) -> Iterator[np.ndarray]:
    """Boolean ``(rows, n)`` selection matrices covering trials ``0..trials-1`` in order."""
    if tag not in RANDOMIZED_TAGS:
        raise ValueError(f"{tag!r} is not a randomized algorithm tag")
    graph, weights = split_weights(g)
    if tag == "max":
        _require_weights(tag, weights)
    mode = WEIGHTED if tag == "max" else UNWEIGHTED
    arcs = _Arcs(graph)
    rows_per_chunk = max(1, _CHUNK_CELLS // max(1, 2 * graph.m))
    for block in range(-(-trials // BLOCK)):
        keys, _ = block_ranks(g, mode, seed, block)
        keys = keys[: min(BLOCK, trials - block * BLOCK)]
        for lo in range(0, keys.shape[0], rows_per_chunk):
            yield _batch_select(arcs, keys[lo : lo + rows_per_chunk], tag == "selkow")


def monte_carlo(tag: str, g: AnyGraph, trials: int, seed=0, target=None) -> MonteCarloEstimate:
    """Mean and standard error of the solution value (weight on weighted graphs)."""
    if trials < 2:
        raise ValueError("Monte Carlo needs at least 2 trials")
    if tag not in ALGORITHM_TAGS:
        raise ValueError(f"unknown algorithm tag {tag!r}; expected one of {ALGORITHM_TAGS}")
    target = None if target is None else float(target)
    if tag in DETERMINISTIC_TAGS:
        value = float(run_algorithm(tag, g).value)
        return MonteCarloEstimate(value, 0.0, trials, target)
    _, weights = split_weights(g)
    w = None if weights is None else np.asarray(weights, dtype=float)
    values = np.concatenate(
        [sel.sum(axis=1) if w is None else sel @ w for sel in iter_selections(tag, g, trials, seed)]
    ).astype(float)
    return MonteCarloEstimate(
        float(values.mean()), float(values.std(ddof=1) / math.sqrt(trials)), trials, target
    )


def selection_frequencies(tag: str, g: AnyGraph, trials: int, seed=0) -> np.ndarray:
    """Fraction of trials in which each vertex was selected."""
    counts = None
    for sel in iter_selections(tag, g, trials, seed):
        c = sel.sum(axis=0)
        counts = c if counts is None else counts + c
    return counts / trials


def subset_weight_samples(tag: str, g: WeightedGraph, subset: Sequence[int], trials: int, seed=0) -> np.ndarray:
    """Per-trial w(subset ∩ solution)."""
    graph, weights = split_weights(g)
    w = np.zeros(graph.n)
    idx = np.asarray(list(subset), dtype=int)
    w[idx] = np.asarray(weights, dtype=float)[idx]
    return np.concatenate([sel @ w for sel in iter_selections(tag, g, trials, seed)])


ALGORITHMS: Dict[str, Callable] = {
    "boppana": boppana,
    "max": max_alg,
    "selkow": selkow_two_round,
    "greedy-min": greedy_min_degree,
    "greedy-max": greedy_max_degree_removal,
    "gwmin2": gwmin2,
}
