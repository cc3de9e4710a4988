"""scikit-learn compatible wrappers around the functional core."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .augmented import run_augmented, scatter_points
from .kmeans import ClusteringConfig, assign, kmeanspp_init, run_kmeans, squared_distances
from .logistic import LogisticFitConfig, firm_mask, fit_logistic, predict_proba, top2_ratios


class KMeans(ClusterMixin, TransformerMixin, BaseEstimator):
    """Lloyd k-means stopping on the absolute change in total SSE.

    Parameters
    ----------
    n_clusters : int, default=3
    init : {"k-means++"} or array-like of shape (n_clusters, n_features)
    tol : float, default=1e-6
        Stop when ``|S_{t-1} - S_t| < tol``.
    max_iter : int, default=100
    random_state : int or None
        Seed for k-means++.

    Attributes
    ----------
    cluster_centers_, labels_, inertia_, n_iter_, converged_,
    sse_history_, trajectory_ (list of center matrices, one per iteration)
    """

    def __init__(self, n_clusters=3, init="k-means++", tol=1e-6, max_iter=100, random_state=None):
        self.n_clusters = n_clusters
        self.init = init
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _config(self):
        seed = 0 if self.random_state is None else int(self.random_state)
        return ClusteringConfig(K=self.n_clusters, epsilon=self.tol, max_iter=self.max_iter, seed=seed)

    def _initial_centers(self, X):
        if isinstance(self.init, str):
            if self.init != "k-means++":
                raise ValueError(f"unknown init {self.init!r}")
            return kmeanspp_init(X, self.n_clusters, np.random.default_rng(self.random_state))
        init = check_array(self.init)
        if init.shape != (self.n_clusters, X.shape[1]):
            raise ValueError(f"init has shape {init.shape}, expected {(self.n_clusters, X.shape[1])}")
        return init

    def _run(self, X, init, cfg):
        return run_kmeans(X, init, cfg)

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        cfg = self._config()
        cfg.check_dataset(X.shape[0])
        self.n_features_in_ = X.shape[1]
        res = self._run(X, self._initial_centers(X), cfg)
        self.result_ = res
        self.cluster_centers_ = res.centers
        self.labels_ = res.labels
        self.inertia_ = res.sse
        self.n_iter_ = res.iterations
        self.converged_ = res.converged
        self.sse_history_ = np.asarray(res.sse_history)
        self.trajectory_ = res.trajectory
        return self

    def _check_X(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, model was fitted with {self.n_features_in_}")
        return X

    def predict(self, X):
        return assign(squared_distances(self._check_X(X), self.cluster_centers_))

    def transform(self, X):
        """Euclidean distance to every center."""
        return np.sqrt(squared_distances(self._check_X(X), self.cluster_centers_))

    def score(self, X, y=None):
        d = squared_distances(self._check_X(X), self.cluster_centers_)
        return -float(d.min(axis=1).sum())


class AugmentedKMeans(KMeans):
    """k-means with a logistic-regression gate on the mean update.

    Observations whose top-2 cluster-probability ratio is not above
    ``ratio_threshold`` are left out of the mean update of that iteration;
    after fitting, ``scatter_indices_`` lists those excluded by the final
    gate.
    """

    def __init__(self, n_clusters=3, init="k-means++", tol=1e-6, max_iter=100, random_state=None,
                 ratio_threshold=1.5, l2_lambda=1.0, logistic_scheme="ovr", fit_tol=1e-8, fit_max_iter=200):
        super().__init__(n_clusters=n_clusters, init=init, tol=tol, max_iter=max_iter, random_state=random_state)
        self.ratio_threshold = ratio_threshold
        self.l2_lambda = l2_lambda
        self.logistic_scheme = logistic_scheme
        self.fit_tol = fit_tol
        self.fit_max_iter = fit_max_iter

    def _config(self):
        cfg = super()._config()
        cfg.ratio_threshold = self.ratio_threshold
        cfg.logistic = LogisticFitConfig(l2_lambda=self.l2_lambda, fit_tol=self.fit_tol,
                                         fit_max_iter=self.fit_max_iter, scheme=self.logistic_scheme)
        cfg.__post_init__()
        return cfg

    def _run(self, X, init, cfg):
        return run_augmented(X, init, cfg)

    def fit(self, X, y=None):
        super().fit(X, y)
        self.firm_mask_ = self.result_.firm_mask
        self.scatter_indices_ = scatter_points(self.result_)
        return self


class LogisticGate(ClassifierMixin, BaseEstimator):
    """Penalized logistic classifier exposing the top-2 probability gate.

    ``scheme`` is ``"ovr"`` (default) or ``"multinomial"``; labels may be
    arbitrary and are encoded through ``classes_``.
    """

    def __init__(self, l2_lambda=1.0, scheme="ovr", fit_intercept=True, tol=1e-8, max_iter=200):
        self.l2_lambda = l2_lambda
        self.scheme = scheme
        self.fit_intercept = fit_intercept
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = check_array(X, dtype=float)
        y = np.asarray(y)
        if y.shape[0] != X.shape[0]:
            raise ValueError("X and y have inconsistent lengths")
        self.classes_, codes = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise ValueError("need at least two classes")
        cfg = LogisticFitConfig(l2_lambda=self.l2_lambda, fit_tol=self.tol, fit_max_iter=self.max_iter,
                                include_intercept=self.fit_intercept, scheme=self.scheme)
        self.model_ = fit_logistic(X, codes, self.classes_.size, cfg)
        self.n_features_in_ = X.shape[1]
        self.n_iter_ = self.model_.n_iter
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "model_")
        return predict_proba(self.model_, check_array(X, dtype=float))

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def ratio(self, X):
        """Top-2 probability ratio per observation."""
        return top2_ratios(self.predict_proba(X))

    def firm(self, X, threshold=1.5):
        return firm_mask(self.predict_proba(X), threshold)
