import itertools

import numpy as np
import pytest

from aztec_dimers.kasteleyn import (EnumerationTooLarge, dump_matrix, edge_probabilities,
                                    enumerate_matchings, enumeration_statistics, exact_mean_height,
                                    exact_mean_heights, inverse_columns, inverse_kasteleyn,
                                    joint_centered_correlation, joint_probability,
                                    kasteleyn_matrix, load_matrix, partition_function)
from aztec_dimers.lattice import AztecGraph, WeightScheme, height_function


def _setup(N, ws):
    g = AztecGraph(N, ws)
    K = kasteleyn_matrix(g)
    return g, K, inverse_kasteleyn(K)


@pytest.mark.parametrize("order,count", [(1, 2), (2, 8), (3, 64), (4, 1024)])
def test_uniform_counts(order, count):
    g = AztecGraph(order, WeightScheme.uniform())
    assert partition_function(kasteleyn_matrix(g)) == pytest.approx(count, rel=1e-12)
    if order <= 3:
        assert len(enumerate_matchings(g)) == count


def test_two_periodic_partition_function():
    g = AztecGraph(1, WeightScheme.two_periodic(0.7))
    total = sum(w for _, w in enumerate_matchings(g))
    assert partition_function(kasteleyn_matrix(g)) == pytest.approx(total, rel=1e-9)


def test_entries_and_structure():
    a = 0.7
    K = kasteleyn_matrix(AztecGraph(1, WeightScheme.two_periodic(a)))
    vals = np.unique(np.round(K, 12))
    assert set(vals) <= {0.0, 1.0, -1.0, round(a, 12), round(1 / a, 12)}
    Kr = kasteleyn_matrix(AztecGraph(1, WeightScheme.random(2, 2, np.random.default_rng(0))))
    assert (Kr != 0).sum(axis=0).max() <= 4
    assert (Kr != 0).sum(axis=1).max() <= 4


def test_order_one_inverse():
    g, K, Kinv = _setup(1, WeightScheme.uniform())
    assert K.shape == (2, 2)
    assert np.allclose(edge_probabilities(g, K, Kinv), 0.5)


def test_inverse_matches_sparse_solve():
    g, K, Kinv = _setup(1, WeightScheme.random(2, 2, np.random.default_rng(2)))
    cols = inverse_columns(kasteleyn_matrix(g, sparse_format=True), [0, 3, 7])
    assert np.abs(cols - Kinv[:, [0, 3, 7]]).max() < 1e-10


def test_probabilities_sum_to_one_at_each_white():
    for N, ws in ((2, WeightScheme.uniform()), (1, WeightScheme.two_periodic(0.7))):
        g, K, Kinv = _setup(N, ws)
        p = edge_probabilities(g, K, Kinv)
        assert np.all((p >= -1e-14) & (p <= 1 + 1e-14))
        sums = np.bincount(g.edge_white, weights=p, minlength=g.num_white)
        assert np.abs(sums - 1).max() < 1e-12


def test_probabilities_match_enumeration():
    g, K, Kinv = _setup(2, WeightScheme.uniform())
    ind, probs = enumeration_statistics(g)
    assert np.abs(edge_probabilities(g, K, Kinv) - probs @ ind).max() < 1e-12


def test_pair_correlation_formula():
    g, K, Kinv = _setup(2, WeightScheme.uniform())
    ind, probs = enumeration_statistics(g)
    p = probs @ ind
    e1, e2 = 0, 13
    (w1, b1), (w2, b2) = [(g.edge_white[e], g.edge_black[e]) for e in (e1, e2)]
    assert len({w1, w2}) == 2 and len({b1, b2}) == 2
    formula = -K[w1, b1] * K[w2, b2] * Kinv[b2, w1] * Kinv[b1, w2]
    brute = probs @ ((ind[:, e1] - p[e1]) * (ind[:, e2] - p[e2]))
    assert formula == pytest.approx(brute, abs=1e-12)
    assert joint_centered_correlation(K, Kinv, [(w1, b1), (w2, b2)]) == pytest.approx(brute, abs=1e-12)


def test_repeated_vertex_rejected():
    g, K, Kinv = _setup(2, WeightScheme.uniform())
    e = (g.edge_white[0], g.edge_black[0])
    with pytest.raises(ValueError):
        joint_probability(K, Kinv, [e, e])


def test_triple_correlation_order_four():
    g, K, Kinv = _setup(1, WeightScheme.two_periodic(0.7))
    ind, probs = enumeration_statistics(g)
    p = probs @ ind
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 5:
        es = rng.choice(g.num_edges, 3, replace=False)
        ws, bs = g.edge_white[es], g.edge_black[es]
        if len(set(ws)) < 3 or len(set(bs)) < 3:
            continue
        brute = probs @ np.prod(ind[:, es] - p[es], axis=1)
        got = joint_centered_correlation(K, Kinv, list(zip(ws, bs)))
        assert got == pytest.approx(brute, abs=1e-9)
        assert joint_probability(K, Kinv, list(zip(ws, bs))) == pytest.approx(
            probs @ np.prod(ind[:, es], axis=1), abs=1e-9)
        checked += 1


def test_exact_mean_height_matches_enumeration():
    g, K, Kinv = _setup(2, WeightScheme.uniform())
    matchings = enumerate_matchings(g)
    centre = g.face_id(2, 2)
    brute = np.mean([height_function(g, m).heights[centre] for m, _ in matchings])
    assert exact_mean_height(g, K, Kinv, centre) == pytest.approx(brute, abs=1e-12)
    assert exact_mean_height(g, K, Kinv, g.default_base_face) == 0.0


def test_exact_mean_heights_weighted():
    g, K, Kinv = _setup(1, WeightScheme.two_periodic(0.7))
    matchings = enumerate_matchings(g)
    w = np.array([x for _, x in matchings])
    H = np.array([height_function(g, m).heights for m, _ in matchings])
    assert np.abs(exact_mean_heights(g, K, Kinv) - (w / w.sum()) @ H).max() < 1e-12


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge):
        enumerate_matchings(AztecGraph(7, WeightScheme.uniform()))


def test_matrix_dump_roundtrip(tmp_path):
    g, K, _ = _setup(1, WeightScheme.two_periodic(0.6))
    dump_matrix(tmp_path / "K.txt", K)
    assert np.array_equal(load_matrix(tmp_path / "K.txt"), K)


def test_enumerated_matchings_are_distinct_and_perfect():
    g = AztecGraph(3, WeightScheme.uniform())
    ms = [m for m, _ in enumerate_matchings(g)]
    assert len(set(ms)) == len(ms)
    assert all(m.is_perfect(g) for m in itertools.islice(ms, 10))
