"""Closed-form independent-set bounds, performance-ratio formulas and rho(Delta).

Graph bounds accumulate in exact rationals (:class:`fractions.Fraction`);
call ``float()`` at the reporting boundary. The ratio formulas take Delta
or the average degree directly so they can be tabulated without instances.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np

from .graphcore import AnyGraph, Graph, WeightedGraph, split_weights

GRID_POINTS = 1000
INV_PHI = (math.sqrt(5) - 1) / 2
ASYMPTOTIC_CONSTANT = 2 ** (2 / 3) / 3  # limit of rho(D)/(D+1)
SPARSE_CONSTANT = 4 * (math.sqrt(2) - 1)


@dataclass(frozen=True)
class BoundReport:
    turan: Fraction
    caro_wei: Fraction
    weighted_nbhd: Fraction
    max_degree: int
    avg_degree: Fraction


@dataclass(frozen=True)
class RatioTable:
    delta: int
    cw_ratio: Fraction
    turan_ratio: Fraction
    rho: float
    rho_argmin: float
    rho_asymptotic: float

    CSV_HEADER = ("delta", "cw_ratio", "turan_ratio", "rho", "argmin_x", "rho_over_delta_plus_1")

    def csv_row(self) -> Tuple:
        return (
            self.delta,
            float(self.cw_ratio),
            float(self.turan_ratio),
            self.rho,
            self.rho_argmin,
            self.rho / (self.delta + 1),
        )


def turan_bound(g: AnyGraph) -> Fraction:
    """n / (avg_degree + 1) = n^2 / (2m + n)."""
    graph, _ = split_weights(g)
    if graph.n < 1:
        raise ValueError("Turan bound needs n >= 1")
    return Fraction(graph.n * graph.n, 2 * graph.m + graph.n)


def caro_wei(g: AnyGraph) -> Fraction:
    """Sum over vertices of 1/(d(v)+1)."""
    graph, _ = split_weights(g)
    return sum((Fraction(1, d + 1) for d in graph.degrees), Fraction(0))


def weighted_nbhd_bound(wg: AnyGraph) -> Fraction:
    """Sum over vertices of w(v)^2 / w(N[v]); the expected weight of MAX."""
    graph, weights = split_weights(wg)
    if weights is None:
        weights = (1,) * graph.n
    total = Fraction(0)
    for v, nbrs in enumerate(graph.adjacency):
        closed = weights[v] + sum(weights[u] for u in nbrs)
        total += Fraction(weights[v] * weights[v], closed)
    if graph.n:
        assert total >= Fraction(sum(weights), graph.max_degree + 1)
    return total


def bound_report(g: AnyGraph) -> BoundReport:
    graph, _ = split_weights(g)
    return BoundReport(
        turan=turan_bound(graph),
        caro_wei=caro_wei(graph),
        weighted_nbhd=weighted_nbhd_bound(g),
        max_degree=graph.max_degree,
        avg_degree=graph.avg_degree,
    )


def _check_delta(delta) -> None:
    if delta < 1:
        raise ValueError(f"Delta must be >= 1, got {delta}")


def cw_ratio(delta: int) -> Fraction:
    _check_delta(delta)
    return Fraction(delta + 1, 2)


def turan_ratio(delta: int) -> Fraction:
    """(2D+1)^2 / (8D), which equals cw_ratio(D) + 1/(8D)."""
    _check_delta(delta)
    return Fraction((2 * delta + 1) ** 2, 8 * delta)


def sparse_ratio(avg_degree: float) -> float:
    """Caro-Wei ratio bound in terms of average degree: (d+2) / (4(sqrt2 - 1))."""
    if avg_degree < 0:
        raise ValueError("average degree must be nonnegative")
    return (float(avg_degree) + 2) / SPARSE_CONSTANT


def inv_perf_bipartite(tau: float, avg_degree: float) -> float:
    """Reciprocal Caro-Wei ratio on bipartite graphs with regular sides, where the
    larger side holds a fraction ``tau`` of the vertices."""
    if not 0.5 <= tau < 1:
        raise ValueError(f"tau must lie in [1/2, 1), got {tau}")
    if avg_degree <= 0:
        raise ValueError("average degree must be positive")
    half = avg_degree / 2
    return tau / (half + tau) + ((1 - tau) ** 2 / tau) / (half + 1 - tau)


def max_objective(x, delta):
    """x^2/(D+x) + 1/(xD+1); its minimum over (0, 1] is 1/rho(D). Vectorizes over x."""
    return x * x / (delta + x) + 1 / (x * delta + 1)


def golden_section(f, a: float, b: float, tol: float) -> float:
    """Minimizer of ``f`` on ``[a, b]`` to absolute tolerance ``tol``, assuming
    one local minimum in the bracket."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return (a + b) / 2


def rho(delta: float, tol: float = 1e-10) -> Tuple[float, float]:
    """Performance ratio of the MAX rule at maximum degree ``delta``.

    Unimodality of the objective is not assumed: a 1000-point grid over (0, 1]
    locates the best cell, then golden-section search refines inside the two
    neighbouring cells. Returns ``(rho, argmin_x)``.
    """
    _check_delta(delta)
    if tol <= 0:
        raise ValueError("tol must be positive")
    xs = np.linspace(1.0 / GRID_POINTS, 1.0, GRID_POINTS)
    i = int(np.argmin(max_objective(xs, delta)))
    lo = xs[i - 1] if i > 0 else 0.0
    hi = xs[i + 1] if i + 1 < GRID_POINTS else 1.0
    f = lambda x: max_objective(x, delta)  # noqa: E731
    x = golden_section(f, float(lo), float(hi), tol)
    # The bracket endpoint may beat the interior (minimum at x = 1).
    best_x, best_f = x, f(x)
    if i + 1 == GRID_POINTS and f(1.0) <= best_f:
        best_x, best_f = 1.0, f(1.0)
    return 1.0 / best_f, best_x


def rho_asymptotic(delta: float) -> float:
    """2^(2/3) (D+1) / 3."""
    _check_delta(delta)
    return ASYMPTOTIC_CONSTANT * (delta + 1)


def max_tight_value(delta: float, beta: float) -> float:
    """E[w(MAX)] / w(opt) on the delta-regular bipartite family with side weights 1 and beta."""
    return 1 / (1 + delta * beta) + beta * beta / (beta + delta)


def eval_lemma_technical(a, b, Y, Z, X, t) -> float:
    """a/(Y + tX) + b/(Z + (1-t)X), for a > b > 0, Z - Y >= X > 0, t in [0, 1].

    Nonincreasing in ``t``; the minimum over the interval sits at ``t = 1``.
    """
    if not a > b > 0:
        raise ValueError(f"need a > b > 0, got a={a}, b={b}")
    if not (X > 0 and Z - Y >= X):
        raise ValueError(f"need Z - Y >= X > 0, got Y={Y}, Z={Z}, X={X}")
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    return a / (Y + t * X) + b / (Z + (1 - t) * X)


def cauchy_schwarz_gap(w: Iterable[float], x: Iterable[float]) -> float:
    """sum(w_i^2/x_i) - (sum w_i)^2 / sum(x_i); nonnegative for positive inputs."""
    w = np.asarray(list(w), dtype=float)
    x = np.asarray(list(x), dtype=float)
    if np.any(w <= 0) or np.any(x <= 0):
        raise ValueError("entries must be positive")
    # Same quantity written as sum x_i (w_i/x_i - W/X)^2, which cannot round below zero.
    return float(np.sum(x * (w / x - w.sum() / x.sum()) ** 2))


def ratio_table(delta: int, tol: float = 1e-10) -> RatioTable:
    r, x = rho(delta, tol)
    return RatioTable(
        delta=delta,
        cw_ratio=cw_ratio(delta),
        turan_ratio=turan_ratio(delta),
        rho=r,
        rho_argmin=x,
        rho_asymptotic=rho_asymptotic(delta),
    )


def sweep(deltas: Iterable[int], tol: float = 1e-10) -> List[RatioTable]:
    return [ratio_table(d, tol) for d in deltas]


def ratio_tables_csv(rows: Iterable[RatioTable], asymptote_column: bool = False) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(RatioTable.CSV_HEADER)
    if asymptote_column:
        header.append("asymptote")
    writer.writerow(header)
    for row in rows:
        values = list(row.csv_row())
        if asymptote_column:
            values.append(ASYMPTOTIC_CONSTANT)
        writer.writerow(values)
    return buf.getvalue()


def report_dict(report: BoundReport) -> dict:
    return {k: (float(v) if isinstance(v, Fraction) else v) for k, v in asdict(report).items()}
