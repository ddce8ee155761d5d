"""Command-line front end.

Subcommands: ``bounds``, ``run``, ``tight``, ``sweep-rho``, ``stream``,
``simulate``. Exit status is 0 on success, 1 on bad input and 2 when a
reported value violates its guarantee.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

from . import __version__
from . import bounds
from .algorithms import (
    ALGORITHM_TAGS,
    DETERMINISTIC_TAGS,
    WEIGHTED,
    UNWEIGHTED,
    monte_carlo,
    run_algorithm,
)
from .distsim import (
    eviction_report_line,
    indistinguishability_demo,
    simulate_one_round,
    StreamState,
    stream_ranks,
)
from .graphcore import (
    DEFAULT_LIMIT,
    GraphError,
    OracleLimitError,
    WeightedGraph,
    build_graph,
    exact_max_is,
    gen_biregular_bipartite,
    gen_clique,
    gen_gnp,
    gen_petersen,
    gen_regular_bipartite,
    gen_turan_tight,
    gen_weighted_bipartite,
    gen_weighted_complete_bipartite,
    iter_edge_list,
    read_edge_list,
    read_weights,
    split_weights,
)

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2
BAND = 4.0
BETA_DENOMINATOR = 1000


class InputError(Exception):
    pass


# --- generator specs --------------------------------------------------------


def _args(text: str, count: int, name: str) -> List[str]:
    parts = [p for p in text.split(",") if p] if text else []
    if len(parts) != count:
        raise InputError(f"generator {name!r} takes {count} argument(s), got {text!r}")
    return parts


def parse_gen_spec(spec: str, seed: Optional[int] = None) -> Tuple[object, Optional[int], dict]:
    """Build an instance from ``name[:a,b,...]``.

    Returns ``(graph, alpha_or_None, description)``; ``alpha`` is filled when
    the construction fixes it.
    """
    name, _, rest = spec.partition(":")
    desc = {"gen": spec, "seed": seed}
    try:
        if name == "clique":
            (k,) = _args(rest, 1, name)
            return gen_clique(int(k)), 1, desc
        if name == "petersen":
            _args(rest, 0, name)
            return gen_petersen(), 4, desc
        if name == "empty":
            (n,) = _args(rest, 1, name)
            return build_graph(int(n), []), int(n), desc
        if name == "gnp":
            n, p = _args(rest, 2, name)
            return gen_gnp(int(n), float(p), seed), None, desc
        if name == "reg-bipartite":
            d, side = _args(rest, 2, name)
            alpha = int(side) if int(d) > 0 else 2 * int(side)
            return gen_regular_bipartite(int(d), int(side), seed), alpha, desc
        if name == "biregular":
            large, small, d = _args(rest, 3, name)
            return gen_biregular_bipartite(int(large), int(small), int(d)), int(large), desc
        if name == "turan-tight":
            (d,) = _args(rest, 1, name)
            g, alpha = gen_turan_tight(int(d), seed)
            return g, alpha, desc
        if name == "knn":
            n_side, q = _args(rest, 2, name)
            return gen_weighted_complete_bipartite(int(n_side), int(q)), int(n_side) * int(q), desc
        if name == "weighted-bipartite":
            d, side, beta = _args(rest, 3, name)
            wg = gen_weighted_bipartite(int(d), int(side), Fraction(beta), seed)
            return wg, int(side) * Fraction(beta).denominator, desc
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad generator spec {spec!r}: {exc}") from exc
    raise InputError(f"unknown generator {name!r}")


def load_instance(args) -> Tuple[object, Optional[int], dict]:
    if bool(args.graph) == bool(args.gen):
        raise InputError("give exactly one of --graph FILE or --gen SPEC")
    if args.gen:
        g, alpha, desc = parse_gen_spec(args.gen, args.seed)
    else:
        try:
            g = read_edge_list(args.graph)
        except OSError as exc:
            raise InputError(f"cannot read {args.graph}: {exc}") from exc
        alpha, desc = None, {"graph": args.graph}
    if getattr(args, "weights", None):
        graph, _ = split_weights(g)
        try:
            g = WeightedGraph(graph, tuple(read_weights(args.weights, graph.n)))
        except OSError as exc:
            raise InputError(f"cannot read {args.weights}: {exc}") from exc
        desc["weights"] = args.weights
        alpha = None
    return g, alpha, desc


# --- output -----------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return value.item()
    return value


def _flatten(d: dict, prefix: str = "") -> List[Tuple[str, object]]:
    rows = []
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            rows.extend(_flatten(v, key + "."))
        elif isinstance(v, list):
            rows.append((key, json.dumps(v)))
        else:
            rows.append((key, v))
    return rows


def render(report: dict, fmt: str) -> str:
    report = _jsonable(report)
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(_flatten(report))
    return buf.getvalue()


def emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def stamp(args, **extra) -> dict:
    config = {k: v for k, v in vars(args).items() if k not in ("func",)}
    return {"version": __version__, "seed": args.seed, "config": config, **extra}


# --- commands ---------------------------------------------------------------


def _oracle(g) -> Tuple[Optional[int], Optional[str]]:
    try:
        return exact_max_is(g)[1], None
    except OracleLimitError as exc:
        return None, str(exc)


def _bounds_block(g) -> dict:
    graph, weights = split_weights(g)
    delta = graph.max_degree
    out = {
        "n": graph.n,
        "m": graph.m,
        "max_degree": delta,
        "avg_degree": graph.avg_degree,
        "turan": bounds.turan_bound(graph) if graph.n else 0,
        "caro_wei": bounds.caro_wei(graph),
    }
    if weights is not None:
        out["weighted_nbhd"] = bounds.weighted_nbhd_bound(g)
        out["total_weight"] = sum(weights)
    if delta >= 1:
        r, x = bounds.rho(delta)
        out["guarantees"] = {
            "cw_ratio": bounds.cw_ratio(delta),
            "turan_ratio": bounds.turan_ratio(delta),
            "sparse_ratio": bounds.sparse_ratio(float(graph.avg_degree)),
            "rho": r,
            "rho_argmin": x,
            "rho_asymptotic": bounds.rho_asymptotic(delta),
        }
    return out


def cmd_bounds(args) -> int:
    g, alpha, desc = load_instance(args)
    report = stamp(args, instance=desc, bounds=_bounds_block(g))
    if alpha is not None:
        report["alpha"] = alpha
    emit(render(report, args.format), args.out)
    return EXIT_OK


def guaranteed_ratio(tag: str, g) -> Optional[float]:
    graph, weights = split_weights(g)
    delta = graph.max_degree
    if delta < 1:
        return 1.0
    if weights is None or tag in ("greedy-min", "greedy-max"):
        if weights is not None:
            return None
        return float(bounds.cw_ratio(delta))
    if tag in ("max", "gwmin2"):
        return bounds.rho(delta)[0]
    if tag in ("boppana", "selkow"):
        return float(delta + 1)
    return None


def cmd_run(args) -> int:
    g, alpha, desc = load_instance(args)
    report = stamp(args, instance=desc, algorithm=args.alg)
    if alpha is None:
        alpha, notice = _oracle(g)
        if notice:
            report["notice"] = f"{notice}; ratio omitted"
        report["alpha_source"] = "oracle" if alpha is not None else None
    else:
        report["alpha_source"] = "construction"
    report["alpha"] = alpha
    report["bounds"] = _bounds_block(g)
    if args.alg in DETERMINISTIC_TAGS:
        res = run_algorithm(args.alg, g)
        mean, stderr = float(res.value), 0.0
        report["value"] = res.value
        report["solution"] = res.solution.sorted()
    else:
        est = monte_carlo(args.alg, g, args.trials, args.seed)
        mean, stderr = est.mean, est.stderr
        report["mean"], report["stderr"], report["trials"] = mean, stderr, est.trials
    status = EXIT_OK
    guarantee = guaranteed_ratio(args.alg, g)
    report["guaranteed_ratio"] = guarantee
    if alpha is not None and mean > 0:
        ratio = alpha / mean
        ratio_err = alpha * stderr / mean**2
        report["achieved_ratio"] = ratio
        report["achieved_ratio_stderr"] = ratio_err
        if guarantee is not None and ratio > guarantee + BAND * ratio_err + 1e-9:
            report["violation"] = "achieved ratio exceeds guarantee"
            status = EXIT_VIOLATION
    emit(render(report, args.format), args.out)
    return status


def _band_check(mean, stderr, target) -> bool:
    return abs(mean - float(target)) <= BAND * stderr + 1e-12


def tight_report(family: str, args) -> dict:
    """Build a tight-family instance and compare achieved against guaranteed ratio."""
    seed = args.seed
    if family == "turan":
        d = args.delta
        g, alpha = gen_turan_tight(d, seed)
        oracle = exact_max_is(g)[1] if g.n <= DEFAULT_LIMIT else None
        t = bounds.turan_bound(g)
        achieved = Fraction(alpha, 1) / t
        guarantee = bounds.turan_ratio(d)
        ok = achieved == guarantee and (oracle is None or oracle == alpha)
        return {
            "family": family, "delta": d, "n": g.n, "m": g.m, "alpha": alpha,
            "alpha_oracle": oracle, "turan": t, "achieved_ratio": achieved,
            "achieved_ratio_exact": str(achieved), "guaranteed_ratio": guarantee,
            "tight": ok,
        }
    if family == "cw-regular-bipartite":
        d, side = args.delta, args.side or 2 * args.delta
        g = gen_regular_bipartite(d, side, seed)
        oracle = exact_max_is(g)[1] if g.n <= DEFAULT_LIMIT else None
        cw = bounds.caro_wei(g)
        achieved = Fraction(side) / cw
        est = monte_carlo("boppana", g, args.trials, seed, target=cw)
        ok = (
            achieved == bounds.cw_ratio(d)
            and cw == Fraction(g.n, d + 1)
            and (oracle is None or oracle == side)
            and _band_check(est.mean, est.stderr, cw)
        )
        return {
            "family": family, "delta": d, "side": side, "n": g.n, "alpha": side,
            "alpha_oracle": oracle, "caro_wei": cw, "achieved_ratio": achieved,
            "guaranteed_ratio": bounds.cw_ratio(d), "boppana_mean": est.mean,
            "boppana_stderr": est.stderr, "tight": ok,
        }
    if family == "weighted-bipartite":
        d, side = args.delta, args.side or 50
        r, x = bounds.rho(d)
        beta = Fraction(args.beta) if args.beta else Fraction(x).limit_denominator(BETA_DENOMINATOR)
        wg = gen_weighted_bipartite(d, side, beta, seed)
        w_opt = side * beta.denominator
        closed_form = w_opt * bounds.max_tight_value(d, float(beta))
        est = monte_carlo("max", wg, args.trials, seed, target=closed_form)
        achieved = w_opt / est.mean
        ratio_err = w_opt * est.stderr / est.mean**2
        expected_ratio = 1 / bounds.max_tight_value(d, float(beta))
        ok = _band_check(est.mean, est.stderr, closed_form) and (
            abs(achieved - r) <= BAND * ratio_err + abs(expected_ratio - r)
        )
        return {
            "family": family, "delta": d, "side": side, "beta": str(beta),
            "w_opt": w_opt, "closed_form_mean": closed_form, "max_mean": est.mean,
            "max_stderr": est.stderr, "achieved_ratio": achieved,
            "achieved_ratio_stderr": ratio_err, "guaranteed_ratio": r, "tight": ok,
        }
    if family == "weighted-knn":
        n_side, q = args.n_side, args.q
        wg = gen_weighted_complete_bipartite(n_side, q)
        d = n_side
        target = Fraction(n_side + n_side * q, d + 1)
        est = monte_carlo("boppana", wg, args.trials, seed, target=target)
        w_opt = n_side * q
        expected_ratio = Fraction(d + 1) / (1 + Fraction(1, q))
        achieved = w_opt / est.mean
        ratio_err = w_opt * est.stderr / est.mean**2
        ok = _band_check(est.mean, est.stderr, target) and achieved <= d + 1 + BAND * ratio_err
        return {
            "family": family, "n_side": n_side, "q": q, "delta": d, "w_opt": w_opt,
            "expected_weight": target, "boppana_mean": est.mean,
            "boppana_stderr": est.stderr, "achieved_ratio": achieved,
            "achieved_ratio_stderr": ratio_err, "expected_ratio": expected_ratio,
            "guaranteed_ratio": d + 1, "tight": ok,
        }
    raise InputError(f"unknown family {family!r}")


def cmd_tight(args) -> int:
    report = stamp(args, result=tight_report(args.family, args))
    emit(render(report, args.format), args.out)
    return EXIT_OK if report["result"]["tight"] else EXIT_VIOLATION


def sweep_rows(delta_min: int, delta_max: int, tol: float) -> List[bounds.RatioTable]:
    if delta_max < delta_min:
        raise InputError("empty delta range")
    return bounds.sweep(range(delta_min, delta_max + 1), tol)


def cmd_sweep_rho(args) -> int:
    rows = sweep_rows(args.delta_min, args.delta_max, args.tol)
    scaled = [row.rho / (row.delta + 1) for row in rows]
    monotone = all(b <= a + 1e-12 for a, b in zip(scaled, scaled[1:]))
    if args.format == "csv":
        text = bounds.ratio_tables_csv(rows, asymptote_column=True)
    else:
        text = render(
            stamp(args, rows=[dict(zip(bounds.RatioTable.CSV_HEADER, r.csv_row())) for r in rows],
                  asymptote=bounds.ASYMPTOTIC_CONSTANT, nonincreasing=monotone),
            "json",
        )
    emit(text, args.out)
    return EXIT_OK if monotone else EXIT_VIOLATION


def cmd_stream(args) -> int:
    weights = read_weights(args.weights) if args.weights else None
    mode = WEIGHTED if weights is not None else UNWEIGHTED
    events = open(args.events, "w", encoding="utf-8") if args.events else None
    try:
        with open(args.graph, "r", encoding="utf-8") as f:
            n, _, edges = iter_edge_list(f)
            if weights is not None and len(weights) != n:
                raise InputError(f"expected {n} weights, got {len(weights)}")
            state = StreamState.start(stream_ranks(n, mode, weights, args.seed, None))
            for u, v in edges:
                evicted = state.process(u, v)
                if events:
                    events.write(eviction_report_line(
                        {"edge": [u, v], "evicted": None if evicted is None else int(evicted)}) + "\n")
    except OSError as exc:
        raise InputError(str(exc)) from exc
    finally:
        if events:
            events.close()
    chosen = state.current_set()
    report = stamp(
        args,
        n=n,
        edges_processed=state.edges_processed,
        size=len(chosen),
        weight=sum(weights[v] for v in chosen) if weights else len(chosen),
        state_bytes=state.state_bytes(),
    )
    if args.show_set:
        report["solution"] = chosen.sorted()
    emit(render(report, args.format), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.demo_delta:
        report = stamp(args, demo=indistinguishability_demo(args.demo_delta, args.seed, args.trials))
        emit(render(report, args.format), args.out)
        return EXIT_OK
    g, _, desc = load_instance(args)
    chosen, trace = simulate_one_round(g, seed=args.seed, quantize_bits=args.quantize_bits)
    report = stamp(
        args,
        instance=desc,
        solution=chosen.sorted(),
        size=len(chosen),
        value=chosen.weight(g),
        messages_sent=trace.messages_sent,
        max_message_bits=trace.max_message_bits,
        bit_budget=trace.bit_budget,
    )
    emit(render(report, args.format), args.out)
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="turanbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, source=True, fmt="json"):
        if source:
            p.add_argument("--graph", help="edge-list file")
            p.add_argument("--gen", help="generator spec, e.g. turan-tight:3, reg-bipartite:3,50, knn:3,9")
            p.add_argument("--weights", help="weights file, one positive integer per line")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default=fmt)

    p = sub.add_parser("bounds", help="Turan, Caro-Wei and weighted bounds plus ratio guarantees")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("run", help="run an algorithm and compare with the optimum")
    common(p)
    p.add_argument("--alg", choices=ALGORITHM_TAGS, default="boppana")
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("tight", help="reproduce a tight instance family")
    common(p, source=False)
    p.add_argument("--family", required=True,
                   choices=("turan", "cw-regular-bipartite", "weighted-bipartite", "weighted-knn"))
    p.add_argument("--delta", type=int, default=3)
    p.add_argument("--side", type=int)
    p.add_argument("--beta", help="rational weight ratio for weighted-bipartite (default: argmin of rho)")
    p.add_argument("--n-side", type=int, default=3)
    p.add_argument("--q", type=int, default=9)
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_tight)

    p = sub.add_parser("sweep-rho", help="tabulate rho(D) and rho(D)/(D+1)")
    common(p, source=False, fmt="csv")
    p.add_argument("--delta-min", type=int, default=2)
    p.add_argument("--delta-max", type=int, default=20)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_sweep_rho)

    p = sub.add_parser("stream", help="single pass over an edge-list file")
    common(p, source=False)
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--weights", help="weights file (selects the weighted rule)")
    p.add_argument("--events", help="write one JSON eviction report per edge here")
    p.add_argument("--show-set", action="store_true")
    p.set_defaults(func=cmd_stream)

    p = sub.add_parser("simulate", help="one Broadcast-CONGEST round")
    common(p)
    p.add_argument("--quantize-bits", type=int)
    p.add_argument("--demo-delta", type=int, help="run the K_{D+1} vs D-regular bipartite comparison")
    p.add_argument("--trials", type=int, default=20_000)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GraphError, OracleLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
