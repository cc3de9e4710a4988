"""k-means and Augmented k-means clustering."""

__version__ = "0.1.0"

from .augmented import run_augmented, scatter_points
from .dataset import Dataset, MixtureSpec, bench_spec, describe, generate_mixture, load_bundled, load_csv
from .estimators import AugmentedKMeans, KMeans, LogisticGate
from .evaluation import ComparisonRecord, ComparisonSummary, compare_pair, match_rate, run_comparison, summarize
from .kmeans import (
    ClusteringConfig,
    RunResult,
    assign,
    kmeanspp_init,
    run_kmeans,
    squared_distances,
    total_sse,
    update_means,
)
from .logistic import (
    LogisticFitConfig,
    LogisticModel,
    firm_mask,
    fit_logistic,
    fit_multinomial,
    fit_ovr,
    predict_proba,
    top2_ratio,
)
