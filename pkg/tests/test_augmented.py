import numpy as np
import pytest

from augkmeans.augmented import run_augmented, scatter_points
from augkmeans.evaluation import match_rate
from augkmeans.kmeans import (
    ClusteringConfig,
    RunResult,
    assign,
    kmeanspp_init,
    run_kmeans,
    squared_distances,
    total_sse,
)
from augkmeans.logistic import LogisticFitConfig

NEAR_ONE = 1 + 1e-9


def _separated(seed, K=3, n_per=15):
    rng = np.random.default_rng(seed)
    means = rng.normal(scale=40.0, size=(K, 2))
    X = np.vstack([m + rng.normal(scale=0.5, size=(n_per, 2)) for m in means])
    return X


def test_tight_blobs_match_kmeans(blobs_1d):
    X, truth = blobs_1d
    init = np.array([[0.0], [10.0]])
    cfg = ClusteringConfig(K=2)
    aug, km = run_augmented(X, init, cfg), run_kmeans(X, init, cfg)
    assert aug.labels.tolist() == km.labels.tolist() == truth.tolist()
    assert aug.firm_mask.all()
    assert scatter_points(aug).size == 0


@pytest.mark.parametrize("scheme", ["ovr", "multinomial"])
def test_gate_reduction_bit_for_bit(scheme):
    X = _separated(7)
    cfg = ClusteringConfig(K=3, ratio_threshold=NEAR_ONE, logistic=LogisticFitConfig(scheme=scheme))
    init = kmeanspp_init(X, 3, 7)
    aug, km = run_augmented(X, init, cfg), run_kmeans(X, init, cfg)
    assert aug.firm_mask.all()
    assert aug.sse_history == km.sse_history
    assert aug.labels.tobytes() == km.labels.tobytes()
    assert aug.centers.tobytes() == km.centers.tobytes()
    assert all(a.tobytes() == b.tobytes() for a, b in zip(aug.trajectory, km.trajectory))


def test_sse_is_unfiltered(bench):
    res = run_augmented(bench.X, kmeanspp_init(bench.X, 4, 5), ClusteringConfig(K=4))
    assert not res.firm_mask.all()
    recomputed = []
    for C in res.trajectory:
        dist = squared_distances(bench.X, C)
        recomputed.append(total_sse(dist, assign(dist)))
    assert recomputed == res.sse_history


def test_every_observation_labelled(bench):
    cfg = ClusteringConfig(K=4, max_iter=30)
    res = run_augmented(bench.X, kmeanspp_init(bench.X, 4, 11), cfg)
    assert res.labels.shape == (bench.n,)
    assert set(res.labels.tolist()) <= set(range(4))
    assert res.iterations <= cfg.max_iter
    assert res.iterations == len(res.sse_history) == len(res.trajectory)


def test_deterministic(bench):
    cfg = ClusteringConfig(K=4)
    init = kmeanspp_init(bench.X, 4, 3)
    a, b = run_augmented(bench.X, init, cfg), run_augmented(bench.X, init, cfg)
    assert a.sse_history == b.sse_history
    assert a.centers.tobytes() == b.centers.tobytes()
    assert a.firm_mask.tolist() == b.firm_mask.tolist()


def test_scatter_points_selection():
    r = RunResult(np.zeros((2, 1)), np.zeros(4, int), [0.0], [np.zeros((2, 1))],
                  np.array([True, False, True, False]), 1, True)
    assert scatter_points(r).tolist() == [1, 3]


def test_scatter_empty_for_kmeans(bench):
    res = run_kmeans(bench.X, kmeanspp_init(bench.X, 4, 0), ClusteringConfig(K=4))
    assert scatter_points(res).size == 0


def test_scatter_lies_between_clusters(bench):
    res = run_augmented(bench.X, kmeanspp_init(bench.X, 4, 2), ClusteringConfig(K=4))
    d = squared_distances(bench.X, res.centers).min(axis=1)
    scatter = scatter_points(res)
    assert scatter.size > 0
    firm = np.setdiff1d(np.arange(bench.n), scatter)
    assert np.sqrt(d[scatter]).mean() > np.sqrt(d[firm]).mean()


def test_masked_update_can_empty_a_cluster():
    # a three-way tie point set: the lone middle cluster is never firm
    X = np.array([[0.0], [0.1], [5.0], [10.0], [10.1]])
    cfg = ClusteringConfig(K=3, max_iter=5, ratio_threshold=50.0)
    res = run_augmented(X, np.array([[0.0], [5.0], [10.0]]), cfg)
    assert res.empty_cluster_events >= 1
    assert np.all(np.isfinite(res.centers))


def test_kmeans_rate_reasonable_on_blobs():
    X = _separated(3)
    truth = np.repeat(np.arange(3), 15)
    res = run_augmented(X, kmeanspp_init(X, 3, 3), ClusteringConfig(K=3))
    assert match_rate(truth, res.labels, 3) == 1.0
