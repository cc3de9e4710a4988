"""Augmented k-means: k-means whose mean update only uses firmly classified points.

Each iteration fits a multinomial logistic model to the current assignment
and drops observations whose two most likely clusters are too close in
probability (top-2 ratio not above ``cfg.ratio_threshold``) from the mean
update. The SSE driving the stopping rule is still computed over every
observation.
"""

from __future__ import annotations

import logging

import numpy as np

from .kmeans import ClusteringConfig, RunResult, _lloyd
from .logistic import firm_mask, fit_logistic, predict_proba

logger = logging.getLogger(__name__)


def logistic_gate(cfg: ClusteringConfig):
    """Build the per-iteration gate used by :func:`run_augmented`."""

    def gate(X, labels):
        model = fit_logistic(X, labels, cfg.K, cfg.logistic)
        if not model.converged:
            logger.info("logistic fit did not converge in %d iterations; using last iterate", model.n_iter)
        return firm_mask(predict_proba(model, X), cfg.ratio_threshold), model.converged

    return gate


def run_augmented(X, init, cfg: ClusteringConfig) -> RunResult:
    """Run augmented k-means from ``init``.

    ``RunResult.labels`` covers every observation; ``RunResult.firm_mask``
    is the gate from the final iteration. ``sse_increases`` counts
    iterations where the unfiltered SSE went up, which the masked update
    does not rule out.
    """
    res = _lloyd(X, init, cfg, gate=logistic_gate(cfg))
    if res.sse_increases:
        logger.info("augmented run: SSE increased on %d of %d iterations", res.sse_increases, res.iterations)
    return res


def scatter_points(result: RunResult) -> np.ndarray:
    """Indices of observations not firmly placed at convergence."""
    return np.flatnonzero(~np.asarray(result.firm_mask, dtype=bool))
