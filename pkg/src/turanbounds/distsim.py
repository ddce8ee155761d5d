"""The one-round rule as a Broadcast-CONGEST protocol and as an edge-stream /
preemptive online algorithm.

Both executors take the same :class:`RankAssignment` as the library
algorithms and produce the same set; that equivalence is the contract the
tests hold them to.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .algorithms import (
    UNWEIGHTED,
    WEIGHTED,
    RankAssignment,
    monte_carlo,
    sample_ranks,
    weighted_key,
)
from .graphcore import (
    Graph,
    GraphError,
    VertexSet,
    gen_clique,
    gen_regular_bipartite,
    iter_edge_list,
    split_weights,
)

KEY_BITS = 64
WEIGHT_BITS = 64


@dataclass(frozen=True)
class Message:
    sender: int
    key: object
    weight: Optional[int] = None
    uniform: Optional[float] = None


@dataclass(frozen=True)
class NodeView:
    """Everything a node knows after one round: its own draw and one message per port."""

    own_id: int
    own_key: object
    inbox: Tuple[Tuple[int, Message], ...]
    own_weight: Optional[int] = None


@dataclass
class RoundTrace:
    messages_sent: int
    max_message_bits: int
    decisions: List[bool]
    bit_budget: int


def _id_bits(n: int) -> int:
    return max(1, (n - 1).bit_length())


def decide(view: NodeView) -> bool:
    """Join iff the own key beats every received key (lower id wins ties)."""
    for _, msg in view.inbox:
        if msg.key > view.own_key or (msg.key == view.own_key and msg.sender < view.own_id):
            return False
    return True


def _quantize(keys: np.ndarray, bits: int, weighted: bool) -> np.ndarray:
    if weighted:
        return np.floor(np.asarray(keys, dtype=float) * 2.0**bits) / 2.0**bits
    shift = np.uint64(KEY_BITS - bits)
    return np.asarray(keys, dtype=np.uint64) >> shift


def simulate_one_round(
    g,
    ranks: Optional[RankAssignment] = None,
    *,
    weights: Optional[Sequence[int]] = None,
    seed=None,
    bit_budget: Optional[int] = None,
    quantize_bits: Optional[int] = None,
) -> Tuple[VertexSet, RoundTrace]:
    """Run one synchronous round: every node broadcasts its draw (and weight) on
    all ports, then decides from its :class:`NodeView` alone.

    In weighted mode the message carries the uniform draw ``x`` and the
    weight, and receivers compute the sender's key themselves. Messages also
    carry the sender id (``ceil(log2 n)`` bits) so ties resolve as in the
    library algorithms. ``quantize_bits`` truncates draws to that many bits.
    """
    graph, own_weights = split_weights(g)
    weights = weights if weights is not None else own_weights
    weighted = weights is not None
    if ranks is None:
        ranks = sample_ranks(graph, WEIGHTED if weighted else UNWEIGHTED, weights, seed)
    if len(ranks) != graph.n:
        raise ValueError("ranks must cover every vertex")
    if weighted and ranks.uniforms is None:
        raise ValueError("weighted simulation needs ranks carrying their uniform draws")
    payload_bits = (quantize_bits or KEY_BITS) + (WEIGHT_BITS if weighted else 0)
    msg_bits = payload_bits + _id_bits(graph.n)
    if bit_budget is None:
        bit_budget = KEY_BITS + (WEIGHT_BITS if weighted else 0) + _id_bits(graph.n)

    if weighted:
        draws = ranks.uniforms
        if quantize_bits:
            # Keep draws in (0, 1] after truncation.
            draws = np.maximum(_quantize(draws, quantize_bits, True), 2.0**-quantize_bits)
        # The key every receiver derives from a sender's (x, w) pair.
        derived = weighted_key(draws, weights)
        outbox = [
            Message(v, derived[v], int(weights[v]), float(draws[v])) for v in range(graph.n)
        ]
    else:
        keys = ranks.keys
        if quantize_bits:
            keys = _quantize(keys, quantize_bits, False)
        outbox = [Message(v, keys[v]) for v in range(graph.n)]

    # Delivery: one copy of each broadcast per incident port.
    sent = 0
    views = []
    for v in range(graph.n):
        inbox = tuple((port, outbox[u]) for port, u in enumerate(graph.adjacency[v]))
        sent += len(inbox)
        views.append(NodeView(v, outbox[v].key, inbox, outbox[v].weight))
    if sent and msg_bits > bit_budget:
        raise RuntimeError(f"message of {msg_bits} bits exceeds budget of {bit_budget}")
    decisions = [decide(view) for view in views]
    trace = RoundTrace(sent, msg_bits if sent else 0, decisions, bit_budget)
    return VertexSet(frozenset(v for v, d in enumerate(decisions) if d), graph.n), trace


def node_views(g, ranks: RankAssignment) -> List[NodeView]:
    graph, _ = split_weights(g)
    msgs = [Message(v, ranks.keys[v]) for v in range(graph.n)]
    return [
        NodeView(v, ranks.keys[v], tuple((p, msgs[u]) for p, u in enumerate(graph.adjacency[v])))
        for v in range(graph.n)
    ]


@dataclass
class StreamState:
    """Candidate bit-vector plus the rank keys; no edge is ever stored."""

    alive: np.ndarray
    keys: RankAssignment
    edges_processed: int = 0

    @classmethod
    def start(cls, ranks: RankAssignment) -> "StreamState":
        return cls(np.ones(len(ranks), dtype=bool), ranks)

    def process(self, u: int, v: int) -> Optional[int]:
        """Apply edge (u, v): the lower-ranked endpoint can no longer be a local
        maximum. Returns it if this edge evicted it, else None."""
        n = len(self.alive)
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge ({u}, {v}) out of range for n={n}", (u, v))
        if u == v:
            raise GraphError(f"self-loop at vertex {u}", (u, v))
        self.edges_processed += 1
        loser = v if self.keys.beats(u, v) else u
        if self.alive[loser]:
            self.alive[loser] = False
            return loser
        return None

    def current_set(self) -> VertexSet:
        return VertexSet.from_mask(self.alive)

    def state_bytes(self) -> int:
        return self.alive.nbytes + self.keys.keys.nbytes


def stream_ranks(n, mode, weights, seed, ranks):
    if ranks is not None:
        if len(ranks) != n:
            raise ValueError("ranks must cover every vertex")
        return ranks
    return sample_ranks(Graph(n, ((),) * n, 0), mode, weights, seed)


def stream_run(
    n: int,
    edges: Iterable[Tuple[int, int]],
    mode: str = UNWEIGHTED,
    weights: Optional[Sequence[int]] = None,
    seed=None,
    ranks: Optional[RankAssignment] = None,
) -> VertexSet:
    """Single pass over ``edges``; the result does not depend on edge order."""
    state = StreamState.start(stream_ranks(n, mode, weights, seed, ranks))
    for u, v in edges:
        state.process(u, v)
    return state.current_set()


def stream_file(f: IO[str], mode: str = UNWEIGHTED, weights=None, seed=None):
    """Stream an edge-list file line by line. Returns ``(set, state)``."""
    n, _, edges = iter_edge_list(f)
    state = StreamState.start(stream_ranks(n, mode, weights, seed, None))
    for u, v in edges:
        state.process(u, v)
    return state.current_set(), state


class OnlineSession:
    """Edges arrive one at a time; vertices can be evicted but never readmitted."""

    def __init__(self, n: int, mode: str = UNWEIGHTED, weights=None, seed=None, ranks=None):
        self.state = StreamState.start(stream_ranks(n, mode, weights, seed, ranks))

    def add_edge(self, u: int, v: int) -> dict:
        evicted = self.state.process(u, v)
        return {"edge": [int(u), int(v)], "evicted": None if evicted is None else int(evicted)}

    def current_set(self) -> VertexSet:
        return self.state.current_set()


def online_session(n: int, mode: str = UNWEIGHTED, weights=None, seed=None, ranks=None) -> OnlineSession:
    return OnlineSession(n, mode, weights, seed, ranks)


def eviction_report_line(report: dict) -> str:
    return json.dumps(report, separators=(",", ":"))


def indistinguishability_demo(delta: int, seed=0, trials: int = 20000) -> dict:
    """Run the one-round rule on K_{D+1} and on a D-regular bipartite graph with
    sides of D+1 vertices. Every node sees D messages in both; both solutions
    come out at n/(D+1) scale while the bipartite graph has independence number n/2."""
    if delta < 1:
        raise ValueError("delta must be >= 1")
    instances = {
        "clique": (gen_clique(delta + 1), 1),
        "bipartite": (gen_regular_bipartite(delta, delta + 1, seed), delta + 1),
    }
    report = {"delta": delta, "seed": seed, "trials": trials}
    for name, (g, alpha) in instances.items():
        chosen, trace = simulate_one_round(g, seed=seed)
        views = node_views(g, sample_ranks(g, seed=seed))
        # Position of the own key among the D+1 keys a node sees.
        positions = [sum(msg.key < view.own_key for _, msg in view.inbox) for view in views]
        est = monte_carlo("boppana", g, trials, seed, target=g.n / (delta + 1))
        report[name] = {
            "n": g.n,
            "alpha": alpha,
            "inbox_sizes": sorted({len(view.inbox) for view in views}),
            "own_key_positions": positions,
            "messages_sent": trace.messages_sent,
            "one_run_size": len(chosen),
            "mean_size": est.mean,
            "stderr": est.stderr,
            "expected_size": g.n / (delta + 1),
            "ratio_alpha_over_mean": alpha / est.mean if est.mean else math.inf,
        }
    report["guarantee"] = (delta + 1) / 2
    return report
