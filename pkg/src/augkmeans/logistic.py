"""Penalized logistic regression used to gate the k-means mean update.

Two schemes are available:

``multinomial``
    One softmax model with class ``K-1`` as the reference: its coefficient
    row is fixed at zero, so the model stores ``K-1`` rows.
``ovr``
    ``K`` independent binary models (class k against the rest), each an
    L2-penalized logistic regression; per-class scores are normalized to
    sum to one. This is the scheme the mainstream library applied by
    default when asked for "logistic regression" on multi-class labels.

The intercept (when used) is column 0 of every coefficient row.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, logsumexp

logger = logging.getLogger(__name__)


SCHEMES = ("ovr", "multinomial")


@dataclass
class LogisticFitConfig:
    """Estimator settings.

    ``penalize_intercept=None`` means: penalize for ``ovr`` (matching the
    liblinear convention of treating the intercept as an ordinary feature),
    leave unpenalized for ``multinomial``.
    """

    l2_lambda: float = 1.0
    fit_tol: float = 1e-8
    fit_max_iter: int = 200
    include_intercept: bool = True
    scheme: str = "ovr"
    penalize_intercept: Optional[bool] = None

    @property
    def intercept_penalized(self) -> bool:
        if self.penalize_intercept is None:
            return self.scheme == "ovr"
        return bool(self.penalize_intercept)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.l2_lambda >= 0:
            raise ValueError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if not self.fit_tol > 0:
            raise ValueError(f"fit_tol must be > 0, got {self.fit_tol}")
        if int(self.fit_max_iter) < 1:
            raise ValueError(f"fit_max_iter must be >= 1, got {self.fit_max_iter}")


@dataclass
class LogisticModel:
    """Fitted coefficients.

    ``beta`` has ``K-1`` rows for the multinomial scheme (reference class
    ``K-1`` implicit at zero) and ``K`` rows for one-vs-rest; column 0 is the
    intercept when ``include_intercept``.
    """

    beta: np.ndarray
    include_intercept: bool = True
    scheme: str = "multinomial"
    converged: bool = True
    n_iter: int = 0
    objective: float = float("nan")

    @property
    def n_classes(self) -> int:
        return self.beta.shape[0] + (self.scheme == "multinomial")


def _design(X, include_intercept):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if include_intercept:
        return np.hstack([np.ones((X.shape[0], 1)), X])
    return X


def _scores(Z, beta):
    # reference class appended as a zero column
    S = Z @ beta.T
    return np.hstack([S, np.zeros((S.shape[0], 1))])


def penalty_mask(shape, include_intercept=True, penalize_intercept=False):
    m = np.ones(shape)
    if include_intercept and not penalize_intercept:
        m[:, 0] = 0.0
    return m


def _probs(S):
    S = S - S.max(axis=1, keepdims=True)
    E = np.exp(S)
    return E / E.sum(axis=1, keepdims=True)


# -- multinomial -------------------------------------------------------------

def penalized_loglik(beta, Z, Y, l2_lambda, pen=None) -> float:
    """Multinomial log-likelihood minus ``l2_lambda / 2 * ||pen * beta||^2``.

    ``Z`` is the design matrix (intercept column already added if used), ``Y``
    the one-hot ``(n, K)`` label matrix and ``pen`` a 0/1 mask selecting the
    penalized coefficients (default: all but column 0).
    """
    pen = penalty_mask(beta.shape) if pen is None else pen
    S = _scores(Z, beta)
    ll = float(np.sum(Y * S) - np.sum(logsumexp(S, axis=1)))
    b = beta * pen
    return ll - 0.5 * l2_lambda * float(np.sum(b * b))


def gradient(beta, Z, Y, l2_lambda, pen=None) -> np.ndarray:
    pen = penalty_mask(beta.shape) if pen is None else pen
    P = _probs(_scores(Z, beta))
    G = (Y - P)[:, :-1].T @ Z
    return G - l2_lambda * beta * pen


def _neg_hessian(beta, Z, l2_lambda, pen):
    P = _probs(_scores(Z, beta))[:, :-1]
    km1, d = beta.shape
    # W[i, k, l] = P_ik (delta_kl - P_il)
    W = -P[:, :, None] * P[:, None, :]
    idx = np.arange(km1)
    W[:, idx, idx] += P
    H = np.einsum("ikl,ij,im->kjlm", W, Z, Z).reshape(km1 * d, km1 * d)
    H[np.diag_indices_from(H)] += l2_lambda * pen.ravel()
    return H


# -- binary (one-vs-rest building block) ------------------------------------

def _binary_objective(w, Z, y, l2_lambda, pen):
    s = Z @ w
    # log-likelihood of y in {0, 1}: y*s - log(1 + e^s)
    ll = float(np.sum(y * s - np.logaddexp(0.0, s)))
    b = w * pen
    return ll - 0.5 * l2_lambda * float(b @ b)


def _binary_gradient(w, Z, y, l2_lambda, pen):
    return Z.T @ (y - expit(Z @ w)) - l2_lambda * w * pen


def _binary_neg_hessian(w, Z, l2_lambda, pen):
    q = expit(Z @ w)
    H = (Z * (q * (1 - q))[:, None]).T @ Z
    H[np.diag_indices_from(H)] += l2_lambda * pen
    return H


def _newton_ascent(f, grad, neg_hess, x0, tol, max_iter):
    """Damped Newton ascent; returns ``(x, f(x), n_iter, converged)``.

    Steps are halved until the objective does not decrease, so the accepted
    objective values are nondecreasing.
    """
    x = x0
    fx = f(x)
    it = 0
    converged = False
    while it < max_iter:
        g = grad(x)
        if np.linalg.norm(g) < tol:
            converged = True
            break
        it += 1
        H = neg_hess(x)
        try:
            step = np.linalg.solve(H, g.ravel())
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g.ravel(), rcond=None)[0]
        step = step.reshape(x.shape)

        t = 1.0
        for _ in range(60):
            cand = x + t * step
            f_cand = f(cand)
            if f_cand >= fx:
                break
            t *= 0.5
        else:
            # no ascent possible at working precision
            break
        stalled = f_cand == fx
        x, fx = cand, f_cand
        if stalled:
            break
    if not converged:
        converged = bool(np.linalg.norm(grad(x)) < tol)
    return x, fx, it, converged


def _check_labels(X, labels, K, cfg):
    if K < 2:
        raise ValueError(f"need K >= 2 classes, got {K}")
    labels = np.asarray(labels)
    if labels.min() < 0 or labels.max() >= K:
        raise ValueError(f"labels must lie in 0..{K - 1}")
    Z = _design(X, cfg.include_intercept)
    if labels.shape[0] != Z.shape[0]:
        raise ValueError("labels must have one entry per observation")
    missing = np.setdiff1d(np.arange(K), labels)
    if missing.size:
        logger.debug("logistic fit: classes %s have no members", missing.tolist())
    return Z, labels


def fit_multinomial(X, labels, K: int, cfg: LogisticFitConfig = None, beta0=None) -> LogisticModel:
    """Maximize the penalized multinomial log-likelihood by damped Newton ascent.

    Starts from ``beta0`` (zeros by default) and stops when the gradient norm
    drops below ``cfg.fit_tol``. Hitting ``cfg.fit_max_iter`` returns the
    last (best) iterate with ``converged=False``. ``cfg.scheme`` is ignored.
    """
    cfg = cfg or LogisticFitConfig(scheme="multinomial")
    Z, labels = _check_labels(X, labels, K, cfg)
    n, d = Z.shape
    Y = np.zeros((n, K))
    Y[np.arange(n), labels] = 1.0
    lam = cfg.l2_lambda
    pen = penalty_mask((K - 1, d), cfg.include_intercept,
                       bool(cfg.penalize_intercept) if cfg.penalize_intercept is not None else False)

    beta = np.zeros((K - 1, d)) if beta0 is None else np.array(beta0, dtype=float).reshape(K - 1, d)
    beta, f, it, ok = _newton_ascent(
        lambda b: penalized_loglik(b, Z, Y, lam, pen),
        lambda b: gradient(b, Z, Y, lam, pen),
        lambda b: _neg_hessian(b, Z, lam, pen),
        beta, cfg.fit_tol, cfg.fit_max_iter,
    )
    if not ok:
        logger.debug("multinomial fit stopped after %d iterations without reaching tol=%g", it, cfg.fit_tol)
    return LogisticModel(beta, cfg.include_intercept, "multinomial", ok, it, f)


def fit_ovr(X, labels, K: int, cfg: LogisticFitConfig = None) -> LogisticModel:
    """Fit ``K`` penalized binary logistic models, class ``k`` against the rest.

    ``objective`` on the result is the sum of the binary penalized
    log-likelihoods; ``converged`` requires every binary fit to converge.
    """
    cfg = cfg or LogisticFitConfig(scheme="ovr")
    Z, labels = _check_labels(X, labels, K, cfg)
    d = Z.shape[1]
    lam = cfg.l2_lambda
    pen = penalty_mask((1, d), cfg.include_intercept, cfg.intercept_penalized)[0]

    beta = np.zeros((K, d))
    total, n_iter, ok_all = 0.0, 0, True
    for k in range(K):
        y = (labels == k).astype(float)
        w, f, it, ok = _newton_ascent(
            lambda w: _binary_objective(w, Z, y, lam, pen),
            lambda w: _binary_gradient(w, Z, y, lam, pen),
            lambda w: _binary_neg_hessian(w, Z, lam, pen),
            np.zeros(d), cfg.fit_tol, cfg.fit_max_iter,
        )
        beta[k] = w
        total += f
        n_iter = max(n_iter, it)
        ok_all &= ok
    if not ok_all:
        logger.debug("one-vs-rest fit: some binary models missed tol=%g", cfg.fit_tol)
    return LogisticModel(beta, cfg.include_intercept, "ovr", ok_all, n_iter, total)


def fit_logistic(X, labels, K: int, cfg: LogisticFitConfig = None) -> LogisticModel:
    """Dispatch on ``cfg.scheme``."""
    cfg = cfg or LogisticFitConfig()
    if cfg.scheme == "ovr":
        return fit_ovr(X, labels, K, cfg)
    return fit_multinomial(X, labels, K, cfg)


def predict_proba(model: LogisticModel, X) -> np.ndarray:
    """``(n, K)`` class probabilities; rows sum to one."""
    Z = _design(X, model.include_intercept)
    if Z.shape[1] != model.beta.shape[1]:
        raise ValueError(
            f"model expects {model.beta.shape[1] - model.include_intercept} features, got {Z.shape[1] - model.include_intercept}"
        )
    if model.scheme == "ovr":
        Q = expit(Z @ model.beta.T)
        tot = Q.sum(axis=1, keepdims=True)
        # every sigmoid underflowed: fall back to the uniform row
        Q = np.where(tot > 0, Q, 1.0)
        return Q / Q.sum(axis=1, keepdims=True)
    return _probs(_scores(Z, model.beta))


def top2_ratio(row) -> float:
    """Largest over second-largest probability; ``inf`` when the runner-up is zero."""
    row = np.asarray(row, dtype=float)
    if row.size < 2:
        raise ValueError("need at least two class probabilities")
    p2, p1 = np.partition(row, -2)[-2:]
    if p2 == 0:
        return float("inf")
    with np.errstate(over="ignore"):
        return float(p1 / p2)


def top2_ratios(P) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[1] < 2:
        raise ValueError("need an (n, K) probability matrix with K >= 2")
    top = np.partition(P, -2, axis=1)[:, -2:]
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(top[:, 0] > 0, top[:, 1] / np.where(top[:, 0] > 0, top[:, 0], 1.0), np.inf)


def firm_mask(P, threshold: float = 1.5) -> np.ndarray:
    """True where the top-2 probability ratio is strictly above ``threshold``."""
    if not threshold > 1:
        raise ValueError(f"threshold must be > 1, got {threshold}")
    return top2_ratios(np.atleast_2d(P)) > threshold
