"""Lloyd-style k-means with k-means++ seeding.

The building blocks here (distances, assignment, masked mean update, SSE)
are shared with the augmented variant so both loops do identical
arithmetic when every observation is used.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .logistic import LogisticFitConfig

logger = logging.getLogger(__name__)


@dataclass
class ClusteringConfig:
    K: int = 3
    epsilon: float = 1e-6
    max_iter: int = 100
    seed: int = 0
    ratio_threshold: float = 1.5
    logistic: LogisticFitConfig = field(default_factory=LogisticFitConfig)

    def __post_init__(self):
        if int(self.K) < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")
        if int(self.max_iter) < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.ratio_threshold > 1:
            raise ValueError(f"ratio_threshold must be > 1, got {self.ratio_threshold}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if isinstance(self.logistic, dict):
            self.logistic = LogisticFitConfig(**self.logistic)

    def check_dataset(self, n: int):
        if self.K > n:
            raise ValueError(f"K={self.K} exceeds the number of observations n={n}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunResult:
    centers: np.ndarray
    labels: np.ndarray
    sse_history: List[float]
    trajectory: List[np.ndarray]
    firm_mask: np.ndarray
    iterations: int
    converged: bool
    empty_cluster_events: int = 0
    sse_increases: int = 0
    logistic_nonconverged: int = 0

    @property
    def sse(self) -> float:
        return self.sse_history[-1]


def _check_pair(X, centers):
    X = np.asarray(X, dtype=float)
    centers = np.asarray(centers, dtype=float)
    if X.ndim != 2 or centers.ndim != 2:
        raise ValueError("X and centers must be 2-D")
    if X.shape[1] != centers.shape[1]:
        raise ValueError(f"dimension mismatch: data has p={X.shape[1]}, centers have p={centers.shape[1]}")
    return X, centers


def squared_distances(X, centers) -> np.ndarray:
    """``(n, K)`` matrix of squared Euclidean distances."""
    X, centers = _check_pair(X, centers)
    diff = X[:, None, :] - centers[None, :, :]
    return np.einsum("ikj,ikj->ik", diff, diff)


def assign(dist) -> np.ndarray:
    # np.argmin returns the first minimum, i.e. ties go to the lowest index
    return np.argmin(np.asarray(dist), axis=1)


def update_means(X, labels, previous, include=None):
    """Recompute cluster means from observations with ``include`` set.

    Clusters left with no contributing observation keep their row of
    ``previous``.

    Returns
    -------
    centers : ndarray (K, p)
    empty : ndarray of int
        Indices of clusters that had no contributing observation.
    """
    X = np.asarray(X, dtype=float)
    previous = np.asarray(previous, dtype=float)
    labels = np.asarray(labels)
    K = previous.shape[0]
    if include is None:
        include = np.ones(X.shape[0], dtype=bool)
    include = np.asarray(include, dtype=bool)
    if include.shape != labels.shape or labels.shape[0] != X.shape[0]:
        raise ValueError("labels and include must both have one entry per observation")

    centers = previous.copy()
    empty = []
    for k in range(K):
        sel = include & (labels == k)
        if sel.any():
            centers[k] = X[sel].mean(axis=0)
        else:
            empty.append(k)
    return centers, np.array(empty, dtype=np.int64)


def total_sse(dist, labels) -> float:
    dist = np.asarray(dist)
    return float(dist[np.arange(dist.shape[0]), labels].sum())


def kmeanspp_init(X, K: int, seed=None) -> np.ndarray:
    """k-means++ seeding (D^2 weighting).

    ``seed`` may be an int or a ``numpy.random.Generator``; a generator is
    consumed in place so callers can share one stream. Returned rows are
    copies of rows of ``X``.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if K < 1 or n < K:
        raise ValueError(f"cannot pick K={K} centers from n={n} observations")
    rng = np.random.default_rng(seed)

    idx = [int(rng.integers(n))]
    d2 = squared_distances(X, X[idx[0]][None, :])[:, 0]
    for _ in range(1, K):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            logger.warning("k-means++: all points coincide with chosen centers; drawing uniformly")
            nxt = int(rng.integers(n))
        idx.append(nxt)
        d2 = np.minimum(d2, squared_distances(X, X[nxt][None, :])[:, 0])
    return X[idx].copy()


def _lloyd(X, init, cfg: ClusteringConfig, gate=None) -> RunResult:
    """Shared iteration loop; ``gate(X, labels) -> (mask, ok)`` filters the update."""
    X, centers = _check_pair(X, init)
    if centers.shape[0] != cfg.K:
        raise ValueError(f"init has {centers.shape[0]} rows, config has K={cfg.K}")
    cfg.check_dataset(X.shape[0])

    n = X.shape[0]
    sse_history, trajectory = [], []
    mask = np.ones(n, dtype=bool)
    converged = False
    n_empty = n_up = n_fail = 0

    for t in range(cfg.max_iter):
        trajectory.append(centers.copy())
        dist = squared_distances(X, centers)
        labels = assign(dist)
        if gate is not None:
            mask, ok = gate(X, labels)
            n_fail += not ok
        centers, empty = update_means(X, labels, centers, mask)
        if empty.size:
            n_empty += 1
            logger.debug("iteration %d: clusters %s received no observations; kept previous centers",
                         t + 1, empty.tolist())
        sse = total_sse(dist, labels)
        sse_history.append(sse)
        if t > 0:
            if sse > sse_history[-2]:
                n_up += 1
                logger.debug("iteration %d: SSE rose from %.10g to %.10g", t + 1, sse_history[-2], sse)
            if abs(sse_history[-2] - sse) < cfg.epsilon:
                converged = True
                break

    return RunResult(
        centers=centers,
        labels=labels,
        sse_history=sse_history,
        trajectory=trajectory,
        firm_mask=mask,
        iterations=len(sse_history),
        converged=converged,
        empty_cluster_events=n_empty,
        sse_increases=n_up,
        logistic_nonconverged=n_fail,
    )


def run_kmeans(X, init, cfg: ClusteringConfig) -> RunResult:
    """Plain k-means from ``init`` until ``|S_{t-1} - S_t| < epsilon`` or ``max_iter``."""
    return _lloyd(X, init, cfg)
