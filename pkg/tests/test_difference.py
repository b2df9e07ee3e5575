import itertools

import numpy as np
import pytest

from analysis.clustering import (
    cluster_metrics,
    cluster_pole,
    cluster_poles_jointly,
    farthest_first_seeds,
)
from analysis.difference import NEGATIVE, POSITIVE, difference_gradient, select_pole_candidates
from conftest import unit_vector
from embeddings.store import EmbeddingSpace, l2_normalize
from fitting.pls import Gradient
from synth.generator import generate_blobs
from utils.errors import ClusteringError, CoincidentGradientsError, ConfigurationError

E1 = Gradient(np.array([1.0, 0.0]), language='a', dimension='valence')
E2 = Gradient(np.array([0.0, 1.0]), language='b', dimension='valence')


def _random_space(rng, V, d, prefix='w'):
    rows = rng.standard_normal((V, d))
    return l2_normalize(EmbeddingSpace('x', tuple(f"{prefix}{i:04d}" for i in range(V)), rows))


def _random_dg(rng, d):
    return difference_gradient(Gradient(unit_vector(rng, d), 'a'), Gradient(unit_vector(rng, d), 'b'))


def test_difference_of_orthogonal_axes():
    dg = difference_gradient(E1, E2)

    np.testing.assert_array_equal(dg.delta, [1.0, -1.0])
    np.testing.assert_allclose(dg.delta_unit, [np.sqrt(0.5), -np.sqrt(0.5)], atol=1e-15)
    assert dg.languages == ('a', 'b')
    assert dg.source_cosine == 0.0


def test_difference_of_opposite_gradients():
    dg = difference_gradient(E1, Gradient(-E1.direction, 'b'))

    np.testing.assert_array_equal(dg.delta, [2.0, 0.0])
    np.testing.assert_array_equal(dg.delta_unit, [1.0, 0.0])


def test_coincident_gradients_raise():
    with pytest.raises(CoincidentGradientsError):
        difference_gradient(E1, Gradient(E1.direction.copy(), 'b'))


def test_swapping_languages_negates_delta_and_exchanges_poles():
    rng = np.random.default_rng(0)
    g_a, g_b = Gradient(unit_vector(rng, 6), 'a'), Gradient(unit_vector(rng, 6), 'b')
    space = _random_space(rng, 200, 6)

    forward, backward = difference_gradient(g_a, g_b), difference_gradient(g_b, g_a)

    np.testing.assert_array_equal(backward.delta, -forward.delta)
    assert select_pole_candidates(space, backward, POSITIVE, 40) == select_pole_candidates(space, forward, NEGATIVE, 40)
    assert select_pole_candidates(space, backward, NEGATIVE, 40) == select_pole_candidates(space, forward, POSITIVE, 40)


def test_pole_candidates_cover_vocabulary_when_m_equals_v():
    rng = np.random.default_rng(1)
    space = _random_space(rng, 30, 4)
    dg = _random_dg(rng, 4)

    words = select_pole_candidates(space, dg, POSITIVE, 30)

    assert sorted(words) == sorted(space.vocab)
    projections = [space.vectors[space.index_of(w)] @ dg.delta_unit for w in words]
    assert projections == sorted(projections, reverse=True)


def test_pole_candidate_bounds():
    rng = np.random.default_rng(2)
    space = _random_space(rng, 30, 4)
    dg = _random_dg(rng, 4)

    with pytest.raises(ConfigurationError):
        select_pole_candidates(space, dg, POSITIVE, 9)
    with pytest.raises(ConfigurationError):
        select_pole_candidates(space, dg, POSITIVE, 31)


def test_difference_direction_itself_ranks_first():
    rng = np.random.default_rng(3)
    dg = _random_dg(rng, 5)
    rows = np.vstack([rng.standard_normal((40, 5)), dg.delta_unit])
    rows[:40] /= np.linalg.norm(rows[:40], axis=1)[:, None]
    space = EmbeddingSpace('x', tuple(f"w{i}" for i in range(40)) + ('delta',), rows)

    assert select_pole_candidates(space, dg, POSITIVE, 10)[0] == 'delta'
    assert 'delta' not in select_pole_candidates(space, dg, NEGATIVE, 10)


def test_pole_candidates_match_full_sort():
    rng = np.random.default_rng(4)
    space = _random_space(rng, 1000, 12)
    dg = _random_dg(rng, 12)

    projections = space.vectors @ dg.delta_unit
    expected = [space.vocab[i] for i in sorted(range(1000), key=lambda i: (-projections[i], i))[:100]]

    assert select_pole_candidates(space, dg, POSITIVE, 100) == expected


def test_cluster_metrics_identical_rows():
    dg = difference_gradient(E1, E2)
    rows = np.tile([0.6, 0.8], (4, 1))

    centroid_cos, coherence = cluster_metrics(rows, dg)

    assert coherence == pytest.approx(1.0, abs=1e-12)
    assert centroid_cos == pytest.approx((0.6 - 0.8) / np.sqrt(2), abs=1e-12)


def test_cluster_metrics_orthogonal_pair_and_singleton():
    dg = difference_gradient(E1, Gradient(-E1.direction, 'b'))

    centroid_cos, coherence = cluster_metrics(np.eye(2), dg)
    assert coherence == pytest.approx(0.0, abs=1e-15)
    assert centroid_cos == pytest.approx(np.sqrt(0.5), abs=1e-12)

    assert cluster_metrics(np.array([[3.0, 4.0]]), dg) == (pytest.approx(0.6), 1.0)


def test_cluster_metrics_match_pairwise_average():
    rng = np.random.default_rng(5)
    dg = _random_dg(rng, 7)
    for n in (2, 3, 11, 20):
        rows = rng.standard_normal((n, 7))
        unit = rows / np.linalg.norm(rows, axis=1)[:, None]
        pairwise = [unit[i] @ unit[j] for i, j in itertools.combinations(range(n), 2)]
        centroid = rows.mean(axis=0)

        centroid_cos, coherence = cluster_metrics(rows, dg)

        assert coherence == pytest.approx(np.mean(pairwise), abs=1e-12)
        assert min(pairwise) <= coherence <= max(pairwise)
        assert centroid_cos == pytest.approx(centroid @ dg.delta_unit / np.linalg.norm(centroid), abs=1e-12)


def test_farthest_first_seeds_are_distinct_rows():
    rng = np.random.default_rng(6)
    rows = rng.standard_normal((50, 3))

    seeds = farthest_first_seeds(rows, 4, np.random.default_rng(0))

    assert seeds.shape == (4, 3)
    assert len({tuple(s) for s in seeds}) == 4


def test_blobs_recover_planted_clusters():
    space, assignment = generate_blobs(n_per_blob=30, d=10, sigma=0.01, seed=0)
    dg = difference_gradient(Gradient(np.eye(10)[0], 'a'), Gradient(np.eye(10)[1], 'b'))

    report = cluster_pole(list(space.vocab), space, dg, k_min=2, k_max=6, seed=0)

    assert report.k == 3
    assert report.silhouette > 0.6
    assert sorted(report.silhouette_by_k) == [2, 3, 4, 5, 6]
    found = sorted(sorted(space.index_of(w) for w in cluster.words) for cluster in report.clusters)
    planted = sorted(sorted(np.flatnonzero(assignment == b).tolist()) for b in range(3))
    assert found == planted
    # e1 blob points along delta, e2 against it
    assert report.clusters[0].words[0].startswith('blob0_')
    assert report.clusters[-1].words[0].startswith('blob1_')


def test_chosen_partition_beats_every_restart():
    from sklearn.cluster import KMeans

    rng = np.random.default_rng(7)
    space = _random_space(rng, 60, 5)
    dg = _random_dg(rng, 5)

    report = cluster_pole(list(space.vocab), space, dg, k_min=4, k_max=4, seed=3, restarts=10)

    rows = space.vectors
    for restart in range(10):
        init = farthest_first_seeds(rows, 4, np.random.default_rng([3, 4, restart, 0]))
        model = KMeans(n_clusters=4, init=init, n_init=1, max_iter=300, tol=0.0, algorithm='lloyd').fit(rows)
        assert report.inertia <= model.inertia_ + 1e-9


def test_cluster_report_partitions_candidates():
    rng = np.random.default_rng(8)
    space = _random_space(rng, 300, 8)
    dg = _random_dg(rng, 8)
    words = select_pole_candidates(space, dg, POSITIVE, 80)

    report = cluster_pole(words, space, dg, k_min=2, k_max=5, seed=1, pole=POSITIVE)

    assert sum(c.n for c in report.clusters) == 80
    assert sorted(w for c in report.clusters for w in c.words) == sorted(words)
    assert all(c.n == len(c.words) >= 1 for c in report.clusters)
    assert all(-1.0 <= c.coherence <= 1.0 for c in report.clusters)
    cosines = [c.centroid_cos for c in report.clusters]
    assert cosines == sorted(cosines, reverse=True)
    assert report.pole == POSITIVE and report.vocabulary_source == 'x'


def test_clustering_is_deterministic_across_workers():
    rng = np.random.default_rng(9)
    space = _random_space(rng, 120, 6)
    dg = _random_dg(rng, 6)
    words = list(space.vocab)

    first = cluster_pole(words, space, dg, k_min=2, k_max=6, seed=4, workers=1)
    second = cluster_pole(words, space, dg, k_min=2, k_max=6, seed=4, workers=3)

    assert first == second


def test_zero_dispersion_is_rejected():
    rows = np.tile([1.0, 0.0, 0.0], (12, 1))
    space = EmbeddingSpace('x', tuple(f"w{i}" for i in range(12)), rows)
    dg = difference_gradient(Gradient(np.eye(3)[0], 'a'), Gradient(np.eye(3)[1], 'b'))

    with pytest.raises(ClusteringError):
        cluster_pole(list(space.vocab), space, dg, k_min=2, k_max=4)


def test_k_values_beyond_candidate_count_are_skipped():
    rng = np.random.default_rng(10)
    space = _random_space(rng, 5, 3)
    dg = _random_dg(rng, 3)

    report = cluster_pole(list(space.vocab), space, dg, k_min=2, k_max=8)
    assert set(report.silhouette_by_k) <= {2, 3, 4}

    with pytest.raises(ClusteringError):
        cluster_pole(list(space.vocab)[:2], space, dg, k_min=2, k_max=3)
    with pytest.raises(ClusteringError):
        cluster_pole(list(space.vocab), space, dg, k_min=1, k_max=3)


def test_joint_clustering_signs_clusters_by_centroid():
    space, _ = generate_blobs(n_per_blob=20, d=6, sigma=0.01, seed=1)
    dg = difference_gradient(Gradient(np.eye(6)[0], 'a'), Gradient(np.eye(6)[1], 'b'))
    positive = select_pole_candidates(space, dg, POSITIVE, 30)
    negative = select_pole_candidates(space, dg, NEGATIVE, 30)

    pos, neg = cluster_poles_jointly(positive, negative, space, dg, k_min=2, k_max=5, seed=0)

    assert pos.pole == POSITIVE and neg.pole == NEGATIVE
    assert all(c.centroid_cos >= 0 for c in pos.clusters)
    assert all(c.centroid_cos < 0 for c in neg.clusters)
    union = set(positive) | set(negative)
    assert sum(c.n for c in pos.clusters + neg.clusters) == len(union)
