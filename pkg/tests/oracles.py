"""Deliberately naive reference implementations (plain Python loops).

Nothing here imports from the package under test.
"""

import itertools
import math


def sq_dist(X, C):
    out = []
    for x in X:
        row = []
        for c in C:
            s = 0.0
            for a, b in zip(x, c):
                s += (a - b) * (a - b)
            row.append(s)
        out.append(row)
    return out


def argmin_rows(D):
    labels = []
    for row in D:
        best, best_k = row[0], 0
        for k, v in enumerate(row):
            if v < best:
                best, best_k = v, k
        labels.append(best_k)
    return labels


def masked_means(X, labels, previous, include):
    K = len(previous)
    p = len(X[0])
    sums = [[0.0] * p for _ in range(K)]
    counts = [0] * K
    for x, lab, inc in zip(X, labels, include):
        if inc:
            counts[lab] += 1
            for j in range(p):
                sums[lab][j] += x[j]
    return [
        [sums[k][j] / counts[k] for j in range(p)] if counts[k] else list(previous[k])
        for k in range(K)
    ]


def sse(D, labels):
    total = 0.0
    for row, lab in zip(D, labels):
        total += row[lab]
    return total


def permuted_accuracy(truth, pred, K):
    best = 0
    for perm in itertools.permutations(range(K)):
        hits = 0
        for t, p in zip(truth, pred):
            if perm[p] == t:
                hits += 1
        best = max(best, hits)
    return best / len(truth)


def multinomial_objective(beta, X, labels, lam, intercept=True):
    """Reference-category penalized log-likelihood; beta rows are [b0, b1..bp]."""
    K = len(beta) + 1
    total = 0.0
    for x, y in zip(X, labels):
        z = ([1.0] if intercept else []) + list(x)
        scores = [sum(b * v for b, v in zip(row, z)) for row in beta] + [0.0]
        m = max(scores)
        lse = m + math.log(sum(math.exp(s - m) for s in scores))
        total += scores[y] - lse
    pen = 0.0
    for row in beta:
        for j, b in enumerate(row):
            if intercept and j == 0:
                continue
            pen += b * b
    assert K >= 2
    return total - 0.5 * lam * pen
