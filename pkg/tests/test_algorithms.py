import random
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_graph, random_weighted
from oracles import (
    brute_force_max_is,
    local_max_rule,
    permutation_expectation,
    selection_probability_quadrature,
    two_round_rule,
)
from turanbounds import bounds
from turanbounds.algorithms import (
    ALGORITHM_TAGS,
    BLOCK,
    WEIGHTED,
    MonteCarloEstimate,
    RankAssignment,
    boppana,
    expected_boppana_size,
    gwmin2,
    greedy_max_degree_removal,
    greedy_min_degree,
    iter_selections,
    max_alg,
    max_alg_delta1_fix,
    monte_carlo,
    run_algorithm,
    sample_ranks,
    selection_frequencies,
    selkow_two_round,
    subset_weight_samples,
    trial_ranks,
)
from turanbounds.graphcore import (
    VertexSet,
    WeightedGraph,
    build_graph,
    gen_clique,
    gen_petersen,
    gen_weighted_bipartite,
    gen_weighted_complete_bipartite,
    is_independent,
)

P3 = build_graph(3, [(0, 1), (1, 2)])
P5 = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
C6 = build_graph(6, [(i, (i + 1) % 6) for i in range(6)])
STAR = build_graph(6, [(0, i) for i in range(1, 6)])
EDGE31 = WeightedGraph(build_graph(2, [(0, 1)]), (3, 1))


def ranks(*keys):
    return RankAssignment.from_keys(keys)


# --- ranks --------------------------------------------------------------------


def test_sample_ranks_reproducible():
    g = build_graph(5, [])
    a, b = sample_ranks(g, seed=3), sample_ranks(g, seed=3)
    assert a.keys.dtype == np.uint64
    assert np.array_equal(a.keys, b.keys)
    assert not np.array_equal(a.keys, sample_ranks(g, seed=4).keys)


def test_sample_ranks_weighted_requires_weights():
    with pytest.raises(ValueError):
        sample_ranks(P3, WEIGHTED)
    r = sample_ranks(EDGE31, WEIGHTED, seed=1)
    assert np.allclose(r.keys, np.log(r.uniforms) / np.array([3.0, 1.0]))


def test_weighted_keys_order_like_power_rule():
    g = build_graph(6, [])
    weights = (1, 2, 3, 5, 8, 13)
    for seed in range(50):
        r = sample_ranks(g, WEIGHTED, weights, seed)
        powered = r.uniforms ** (1 / np.array(weights, dtype=float))
        assert list(np.argsort(r.keys, kind="stable")) == list(np.argsort(powered, kind="stable"))


def test_weighted_keys_survive_huge_weights():
    g = build_graph(3, [(0, 1), (1, 2)])
    r = sample_ranks(g, WEIGHTED, (2**62, 2**61, 1), seed=0)
    assert np.all(np.isfinite(r.keys)) and len(set(r.keys.tolist())) == 3


def test_pair_max_probability_matches_weight_ratio():
    # Pr[heavier of a pair wins] = q/(q+1).
    q = 4
    g = WeightedGraph(build_graph(2, [(0, 1)]), (q, 1))
    freq = selection_frequencies("max", g, 100_000, seed=9)
    stderr = np.sqrt(freq * (1 - freq) / 100_000)
    assert abs(freq[0] - q / (q + 1)) <= 4 * stderr[0]


def test_equal_weights_reduce_to_uniform_order():
    g = gen_petersen()
    wg = WeightedGraph(g, (7,) * g.n)
    mc = monte_carlo("max", wg, 50_000, seed=2)
    assert mc.within(4, 7 * 2.5)


def test_ties_resolved_by_lower_id():
    # 1 beats 2 on the tie, so 2 is not a local maximum even though 0 beats 1.
    assert boppana(P3, ranks(5, 5, 5)).sorted() == [0]
    assert boppana(P3, ranks(5, 4, 4)).sorted() == [0]
    assert boppana(P3, ranks(4, 4, 5)).sorted() == [0, 2]
    assert boppana(gen_clique(4), ranks(1, 1, 1, 1)).sorted() == [0]


# --- boppana ------------------------------------------------------------------


def test_boppana_examples():
    assert boppana(P3, ranks(1, 5, 2)).sorted() == [1]
    assert boppana(P3, ranks(5, 1, 4)).sorted() == [0, 2]
    g = build_graph(3, [(0, 1)])
    for seed in range(20):
        assert 2 in boppana(g, sample_ranks(g, seed=seed))


def test_boppana_local_optimality(corpus):
    for i, g in enumerate(corpus):
        r = sample_ranks(g, seed=i)
        sol = boppana(g, r)
        assert is_independent(g, sol)
        for v in range(g.n):
            if v in sol:
                continue
            # Excluded vertices have a higher-ranked neighbour.
            assert any(r.beats(u, v) for u in g.neighbors(v))


def test_monotone_relabeling_invariance(corpus):
    for i, g in enumerate(corpus[:60]):
        r = sample_ranks(g, seed=i)
        as_float = r.transformed(lambda k: k.astype(np.float64))
        shifted = r.transformed(lambda k: np.log1p(k.astype(np.float64)) * 3 + 7)
        # float conversion may merge nearby keys; compare only when it does not
        if len(set(as_float.keys.tolist())) == g.n:
            assert boppana(g, as_float) == boppana(g, r)
            assert selkow_two_round(g, shifted) == selkow_two_round(g, r)
        wg = random_weighted(i)
        rw = sample_ranks(wg, WEIGHTED, seed=i)
        assert max_alg(wg, rw.transformed(lambda k: np.exp(k) * 5 - 2)) == max_alg(wg, rw)


def test_expected_boppana_size_matches_permutation_oracle():
    for g, edges in [(P5, [(0, 1), (1, 2), (2, 3), (3, 4)]), (STAR, [(0, i) for i in range(1, 6)])]:
        assert expected_boppana_size(g) == permutation_expectation(g.n, edges, local_max_rule)
    assert expected_boppana_size(gen_clique(6)) == 1
    assert expected_boppana_size(gen_petersen()) == Fraction(5, 2)


def test_boppana_monte_carlo_petersen():
    g = gen_petersen()
    est = monte_carlo("boppana", g, 100_000, seed=1, target=expected_boppana_size(g))
    assert est.within(4)


def test_vectorized_kernel_matches_scalar_path(corpus):
    for i, g in enumerate(corpus[:40]):
        sels = np.concatenate(list(iter_selections("boppana", g, 40, seed=i)))
        two = np.concatenate(list(iter_selections("selkow", g, 40, seed=i)))
        for t in (0, 17, 39):
            r = trial_ranks(g, "unweighted", i, t)
            assert VertexSet.from_mask(sels[t]) == boppana(g, r)
            assert VertexSet.from_mask(two[t]) == selkow_two_round(g, r)
        wg = random_weighted(i)
        wsel = np.concatenate(list(iter_selections("max", wg, 30, seed=i)))
        for t in (0, 29):
            assert VertexSet.from_mask(wsel[t]) == max_alg(wg, trial_ranks(wg, WEIGHTED, i, t))


def test_vectorized_kernel_tie_rule():
    from turanbounds.algorithms import _Arcs, _batch_select

    g = gen_clique(4)
    keys = np.array([[1, 1, 1, 1], [2, 3, 3, 1]], dtype=np.uint64)
    sel = _batch_select(_Arcs(g), keys, False)
    assert sel[0].tolist() == [True, False, False, False]
    assert sel[1].tolist() == [False, True, False, False]


def test_trial_streams_independent_of_trial_count():
    g = gen_petersen()
    a = np.concatenate(list(iter_selections("boppana", g, BLOCK + 10, seed=5)))
    b = np.concatenate(list(iter_selections("boppana", g, 3 * BLOCK, seed=5)))
    assert np.array_equal(a, b[: BLOCK + 10])


def test_monte_carlo_reproducible():
    g = gen_petersen()
    assert monte_carlo("boppana", g, 5000, seed=3) == monte_carlo("boppana", g, 5000, seed=3)
    assert monte_carlo("boppana", g, 5000, seed=3) != monte_carlo("boppana", g, 5000, seed=4)


def test_monte_carlo_stderr_definition():
    g = gen_petersen()
    sizes = np.concatenate([s.sum(axis=1) for s in iter_selections("boppana", g, 3000, seed=8)])
    est = monte_carlo("boppana", g, 3000, seed=8)
    assert est.mean == pytest.approx(sizes.mean())
    assert est.stderr == pytest.approx(sizes.std(ddof=1) / np.sqrt(3000))


def test_monte_carlo_errors():
    with pytest.raises(ValueError):
        monte_carlo("luby", P3, 10)
    with pytest.raises(ValueError):
        monte_carlo("boppana", P3, 1)
    with pytest.raises(ValueError):
        monte_carlo("max", P3, 10)


def test_estimate_helpers():
    est = MonteCarloEstimate(2.0, 0.5, 10, target=3.0)
    assert est.deviation() == 2.0
    assert est.within(2) and not est.within(1.9)


# --- MAX ------------------------------------------------------------------------


def test_max_single_edge_probabilities():
    # Single edge with weights 3 and 1: probabilities 3/4 and 1/4.
    assert selection_probability_quadrature(3, [1]) == pytest.approx(0.75)
    freq = selection_frequencies("max", EDGE31, 100_000, seed=4)
    stderr = np.sqrt(freq * (1 - freq) / 100_000)
    assert np.all(np.abs(freq - [0.75, 0.25]) <= 4 * stderr)
    est = monte_carlo("max", EDGE31, 100_000, seed=4, target=2.5)
    assert est.within(4)


def test_max_selection_probability_quadrature():
    for seed in range(5):
        wg = random_weighted(seed, n_max=12)
        for v in range(wg.n):
            nbrs = [wg.weights[u] for u in wg.graph.neighbors(v)]
            assert selection_probability_quadrature(wg.weights[v], nbrs) == pytest.approx(
                wg.weights[v] / wg.closed_nbhd_weight(v), rel=1e-7
            )


def test_max_on_weighted_knn_matches_closed_formula():
    wg = gen_weighted_complete_bipartite(3, 9)
    target = bounds.weighted_nbhd_bound(wg)
    est = monte_carlo("max", wg, 100_000, seed=6, target=target)
    assert est.within(4)


def test_max_on_weighted_bipartite_family():
    wg = gen_weighted_bipartite(3, 50, Fraction(1, 2), seed=2)
    target = 50 * 2 * (1 / (1 + 3 * 0.5)) + 50 * 1 * (0.5 / (0.5 + 3))
    assert float(bounds.weighted_nbhd_bound(wg)) == pytest.approx(target)
    assert target == pytest.approx(100 * bounds.max_tight_value(3, 0.5))
    est = monte_carlo("max", wg, 100_000, seed=2, target=target)
    assert est.within(4)


def test_max_weight_scaling_invariance():
    for seed in range(3):
        wg = random_weighted(seed + 40, n_max=15)
        scaled = WeightedGraph(wg.graph, tuple(5 * w for w in wg.weights))
        a = selection_frequencies("max", wg, 40_000, seed=seed)
        b = selection_frequencies("max", scaled, 40_000, seed=seed + 100)
        err = np.sqrt(a * (1 - a) / 40_000 + b * (1 - b) / 40_000)
        assert np.all(np.abs(a - b) <= 4 * err + 1e-12)


def test_max_subset_lemma():
    rng = random.Random(0)
    for seed in range(5):
        wg = random_weighted(seed + 70, n_max=20)
        for _ in range(4):
            subset = [v for v in range(wg.n) if rng.random() < 0.5] or [0]
            samples = subset_weight_samples("max", wg, subset, 20_000, seed=seed)
            mean, stderr = samples.mean(), samples.std(ddof=1) / np.sqrt(len(samples))
            exact = sum(Fraction(wg.weights[v] ** 2, wg.closed_nbhd_weight(v)) for v in subset)
            lower = Fraction(sum(wg.weights[v] for v in subset) ** 2, sum(wg.closed_nbhd_weight(v) for v in subset))
            assert exact >= lower
            assert abs(mean - float(exact)) <= 4 * stderr + 1e-12
            assert mean >= float(lower) - 4 * stderr


def test_max_requires_weighted_ranks():
    with pytest.raises(ValueError):
        max_alg(EDGE31, ranks(1, 2))


def test_delta1_fix():
    r = ranks(0.1, 0.9)
    assert max_alg_delta1_fix(EDGE31, r).sorted() == [0]
    assert max_alg(EDGE31, r, delta1_fix=True).sorted() == [0]
    matching = WeightedGraph(build_graph(6, [(0, 1), (2, 3), (4, 5)]), (5, 2, 1, 1, 4, 9))
    sol = max_alg_delta1_fix(matching, ranks(0, 0, 3, 7, 0, 0))
    assert sol.sorted() == [0, 3, 5]
    assert sol.weight(matching) == 15 == brute_force_max_is(6, [(0, 1), (2, 3), (4, 5)], [5, 2, 1, 1, 4, 9])[0]
    empty = WeightedGraph(build_graph(4, []), (1, 2, 3, 4))
    assert max_alg_delta1_fix(empty, ranks(0, 0, 0, 0)).sorted() == [0, 1, 2, 3]
    with pytest.raises(ValueError):
        max_alg_delta1_fix(WeightedGraph(P3, (1, 1, 1)), ranks(1, 2, 3))


# --- Selkow ------------------------------------------------------------------------


def test_selkow_path_trace():
    r = ranks(5, 1, 2, 1.5, 4)
    assert boppana(P5, r).sorted() == [0, 2, 4]
    assert selkow_two_round(P5, r).sorted() == [0, 2, 4]


def test_selkow_second_round_adds():
    # 0-1-2-3: keys make 1 the only round-one winner; 3 survives and joins in round two.
    g = build_graph(4, [(0, 1), (1, 2), (2, 3)])
    r = ranks(1, 9, 5, 2)
    assert boppana(g, r).sorted() == [1]
    assert selkow_two_round(g, r).sorted() == [1, 3]


def test_selkow_on_clique():
    for seed in range(20):
        g = gen_clique(5)
        assert len(selkow_two_round(g, sample_ranks(g, seed=seed))) == 1


def test_selkow_superset_and_independent(corpus):
    for i, g in enumerate(corpus):
        r = sample_ranks(g, seed=i)
        s = selkow_two_round(g, r)
        assert boppana(g, r) <= s
        assert is_independent(g, s)


def test_selkow_exact_expectations():
    # Frozen by enumerating all permutations.
    cases = [
        (P5, [(0, 1), (1, 2), (2, 3), (3, 4)], Fraction(49, 20)),
        (C6, [(i, (i + 1) % 6) for i in range(6)], Fraction(31, 12)),
        (STAR, [(0, i) for i in range(1, 6)], Fraction(13, 3)),
    ]
    for g, edges, expected in cases:
        assert permutation_expectation(g.n, edges, two_round_rule) == expected
        est = monte_carlo("selkow", g, 100_000, seed=3, target=expected)
        assert est.within(4)
        assert expected >= bounds.caro_wei(g)


def test_selkow_not_worse_than_caro_wei():
    from turanbounds.graphcore import gen_regular_bipartite

    for delta, side in [(2, 6), (3, 8), (4, 10)]:
        g = gen_regular_bipartite(delta, side, seed=delta)
        est = monte_carlo("selkow", g, 20_000, seed=delta)
        assert est.mean + 4 * est.stderr >= float(bounds.caro_wei(g))


# --- greedy baselines ------------------------------------------------------------------


def test_greedy_examples():
    assert greedy_min_degree(STAR).sorted() == [1, 2, 3, 4, 5]
    assert len(greedy_min_degree(gen_clique(4))) == 1
    assert greedy_max_degree_removal(STAR).sorted() == [1, 2, 3, 4, 5]
    c4 = build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    assert len(greedy_max_degree_removal(c4)) == 2


def test_gwmin2_examples():
    assert gwmin2(EDGE31).sorted() == [0]
    assert gwmin2(EDGE31).weight(EDGE31) >= bounds.weighted_nbhd_bound(EDGE31)


def test_greedy_meet_caro_wei():
    for seed in range(1000):
        g = random_graph(seed)
        cw = bounds.caro_wei(g)
        for sol in (greedy_min_degree(g), greedy_max_degree_removal(g), gwmin2(g)):
            assert is_independent(g, sol)
            assert len(sol) >= cw


def test_gwmin2_meets_weighted_bound():
    for seed in range(500):
        wg = random_weighted(seed)
        sol = gwmin2(wg)
        assert is_independent(wg, sol)
        assert sol.weight(wg) >= bounds.weighted_nbhd_bound(wg)


def test_run_algorithm_all_tags():
    wg = random_weighted(5)
    for tag in ALGORITHM_TAGS:
        res = run_algorithm(tag, wg, seed=1)
        assert res.algorithm == tag
        assert is_independent(wg, res.solution)
        assert res.value == res.solution.weight(wg)
    res = run_algorithm("boppana", gen_petersen(), seed=2)
    assert res.value == len(res.solution)
    with pytest.raises(ValueError):
        run_algorithm("max", gen_petersen())
    with pytest.raises(ValueError):
        run_algorithm("nope", gen_petersen())


def test_deterministic_tags_in_monte_carlo():
    est = monte_carlo("greedy-min", STAR, 10)
    assert (est.mean, est.stderr) == (5.0, 0.0)
