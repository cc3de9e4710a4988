"""Scoring against ground truth and paired Monte Carlo comparisons."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import permutations
from typing import List, Sequence

import numpy as np

from .augmented import run_augmented
from .kmeans import ClusteringConfig, kmeanspp_init, run_kmeans

MAX_K = 8

RECORD_FIELDS = ("replication", "seed", "rate_aug", "rate_km", "iters_aug", "iters_km")


def match_rate(truth, pred, K: int) -> float:
    """Best accuracy over all relabelings of the predicted cluster indices."""
    truth = np.asarray(truth, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if truth.shape != pred.shape:
        raise ValueError("truth and pred must have equal length")
    if K > MAX_K:
        raise ValueError(f"exhaustive matching supports K <= {MAX_K}, got {K}")
    if truth.size == 0:
        raise ValueError("empty label vectors")
    if min(truth.min(), pred.min()) < 0 or max(truth.max(), pred.max()) >= K:
        raise ValueError(f"labels must lie in 0..{K - 1}")
    conf = np.zeros((K, K), dtype=np.int64)
    np.add.at(conf, (pred, truth), 1)
    rows = np.arange(K)
    best = max(int(conf[rows, perm].sum()) for perm in permutations(range(K)))
    return best / truth.size


@dataclass
class ComparisonRecord:
    replication: int
    seed: int
    rate_aug: float
    rate_km: float
    iters_aug: int
    iters_km: int
    elapsed_aug: float = 0.0
    elapsed_km: float = 0.0


@dataclass
class ComparisonSummary:
    n_reps: int
    rate_better: float
    rate_better_or_equal: float
    iters_better: float
    iters_better_or_equal: float
    avg_rate_gain_when_better: float  # percentage points
    avg_iter_gain_when_better: float  # iterations

    def to_dict(self) -> dict:
        d = asdict(self)
        # NaN is not valid JSON
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self, title: str = "") -> str:
        def pct(v):
            return "n/a" if math.isnan(v) else f"{100 * v:.1f}%"

        gain_rate = "n/a" if math.isnan(self.avg_rate_gain_when_better) else f"{self.avg_rate_gain_when_better:.2f}%"
        gain_iter = "n/a" if math.isnan(self.avg_iter_gain_when_better) else f"{self.avg_iter_gain_when_better:.2f}"
        lines = []
        if title:
            lines.append(title)
        lines.append(f"Augmented k-means relative to k-means over {self.n_reps} paired replications")
        lines.append(f"{'':>17}  {'Correct Class. Rate':>20}  {'Number Iterations':>18}")
        lines.append("-" * 61)
        lines.append(f"{'Better':>17}  {pct(self.rate_better):>20}  {pct(self.iters_better):>18}")
        lines.append(
            f"{'Better or Equal':>17}  {pct(self.rate_better_or_equal):>20}  {pct(self.iters_better_or_equal):>18}"
        )
        lines.append("-" * 61)
        lines.append("Average improvement when Augmented k-means is better")
        lines.append(f"{'':>17}  {gain_rate:>20}  {gain_iter:>18}")
        return "\n".join(lines) + "\n"


def compare_pair(X, truth, cfg: ClusteringConfig, seed: int, replication: int = 0) -> ComparisonRecord:
    """One paired replication: a single k-means++ init shared by both algorithms."""
    if truth is None:
        raise ValueError("paired comparison needs ground-truth labels")
    init = kmeanspp_init(X, cfg.K, np.random.default_rng(seed))
    t0 = time.perf_counter()
    km = run_kmeans(X, init, cfg)
    t1 = time.perf_counter()
    aug = run_augmented(X, init, cfg)
    t2 = time.perf_counter()
    return ComparisonRecord(
        replication=replication,
        seed=int(seed),
        rate_aug=match_rate(truth, aug.labels, cfg.K),
        rate_km=match_rate(truth, km.labels, cfg.K),
        iters_aug=aug.iterations,
        iters_km=km.iterations,
        elapsed_aug=t2 - t1,
        elapsed_km=t1 - t0,
    )


def summarize(records: Sequence[ComparisonRecord]) -> ComparisonSummary:
    if not records:
        raise ValueError("cannot summarize an empty record list")
    rate_aug = np.array([r.rate_aug for r in records])
    rate_km = np.array([r.rate_km for r in records])
    it_aug = np.array([r.iters_aug for r in records])
    it_km = np.array([r.iters_km for r in records])
    n = len(records)

    rate_b = rate_aug > rate_km
    iter_b = it_aug < it_km
    # sorted sums keep the result independent of record order
    rate_gain = float(np.sum(np.sort(rate_aug[rate_b] - rate_km[rate_b]))) * 100 / int(rate_b.sum()) if rate_b.any() else math.nan
    iter_gain = float(np.sum(it_km[iter_b] - it_aug[iter_b])) / int(iter_b.sum()) if iter_b.any() else math.nan
    return ComparisonSummary(
        n_reps=n,
        rate_better=int(rate_b.sum()) / n,
        rate_better_or_equal=int((rate_aug >= rate_km).sum()) / n,
        iters_better=int(iter_b.sum()) / n,
        iters_better_or_equal=int((it_aug <= it_km).sum()) / n,
        avg_rate_gain_when_better=rate_gain,
        avg_iter_gain_when_better=iter_gain,
    )


def _pair_job(args):
    X, truth, cfg, seed, rep = args
    return compare_pair(X, truth, cfg, seed, rep)


def run_comparison(X, truth, cfg: ClusteringConfig, reps: int, master_seed: int = None,
                   jobs: int = 1, progress=None) -> List[ComparisonRecord]:
    """Run ``reps`` paired replications; replication ``r`` uses seed ``master_seed + r``.

    Records come back ordered by replication index whatever ``jobs`` is.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    master_seed = cfg.seed if master_seed is None else master_seed
    X = np.asarray(X, dtype=float)
    tasks = [(X, truth, cfg, master_seed + r, r) for r in range(reps)]
    out = []
    if jobs <= 1:
        for t in tasks:
            out.append(_pair_job(t))
            if progress:
                progress(len(out), reps)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for rec in ex.map(_pair_job, tasks, chunksize=max(1, reps // (4 * jobs))):
                out.append(rec)
                if progress:
                    progress(len(out), reps)
    return out
