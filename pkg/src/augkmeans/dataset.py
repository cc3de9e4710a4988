"""Dataset loading, synthesis and summaries."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

BUNDLED = ("iris", "wine")


class DatasetError(ValueError):
    pass


@dataclass
class Dataset:
    """An ``n x p`` observation matrix with optional ground-truth labels.

    ``label_map`` records how raw label values in a file were remapped to
    dense 0-based integers (raw text -> index).
    """

    X: np.ndarray
    truth: Optional[np.ndarray] = None
    name: str = "dataset"
    label_map: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DatasetError(f"X must be a non-empty 2-D matrix, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise DatasetError("X contains non-finite entries")
        self.X = X
        if self.truth is not None:
            truth = np.asarray(self.truth)
            if truth.shape != (X.shape[0],):
                raise DatasetError(f"truth has shape {truth.shape}, expected ({X.shape[0]},)")
            if not np.issubdtype(truth.dtype, np.integer):
                raise DatasetError("truth labels must be integers")
            if truth.min() < 0:
                raise DatasetError("truth labels must be non-negative")
            self.truth = truth.astype(np.int64)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        if self.truth is None:
            return 0
        return int(self.truth.max()) + 1

    def standardized(self) -> "Dataset":
        """Return a copy with every feature z-scored (zero-variance columns left centred)."""
        sd = self.X.std(axis=0)
        sd[sd == 0] = 1.0
        X = (self.X - self.X.mean(axis=0)) / sd
        return Dataset(X, self.truth, self.name + "[z]", dict(self.label_map))


@dataclass
class MixtureComponent:
    mean: Sequence[float]
    sigma: Sequence[float]
    n: int


@dataclass
class MixtureSpec:
    components: list
    seed: int = 0

    def validate(self):
        if not self.components:
            raise DatasetError("mixture spec has no components")
        p = len(self.components[0].mean)
        for i, c in enumerate(self.components):
            if len(c.mean) != p or len(c.sigma) != p:
                raise DatasetError(f"component {i}: mean/sigma must both have length {p}")
            if any(not s > 0 for s in c.sigma):
                raise DatasetError(f"component {i}: standard deviations must be > 0")
            if int(c.n) < 1:
                raise DatasetError(f"component {i}: count must be >= 1")
        if self.seed < 0:
            raise DatasetError("seed must be non-negative")

    @classmethod
    def from_dict(cls, d: dict) -> "MixtureSpec":
        try:
            comps = [
                MixtureComponent(list(map(float, c["mean"])), list(map(float, c["sigma"])), int(c["n"]))
                for c in d["components"]
            ]
            seed = int(d.get("seed", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetError(f"invalid mixture spec: {exc!r}") from exc
        spec = cls(comps, seed)
        spec.validate()
        return spec

    def to_dict(self) -> dict:
        return {
            "components": [
                {"mean": list(c.mean), "sigma": list(c.sigma), "n": int(c.n)} for c in self.components
            ],
            "seed": int(self.seed),
        }

    @classmethod
    def from_json(cls, path) -> "MixtureSpec":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def bench_spec(seed: int = 0) -> MixtureSpec:
    """Four overlapping bivariate clusters, 75 points each, sigma 1.25."""
    means = [(0.0, 0.0), (3.0, 0.0), (0.0, 3.0), (3.0, 3.0)]
    return MixtureSpec([MixtureComponent(list(m), [1.25, 1.25], 75) for m in means], seed)


def generate_mixture(spec: MixtureSpec) -> Dataset:
    """Draw rows component by component from axis-aligned Gaussians.

    Deterministic for a fixed ``spec.seed`` (numpy PCG64 stream).
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    blocks, labels = [], []
    for k, comp in enumerate(spec.components):
        mean = np.asarray(comp.mean, dtype=float)
        sigma = np.asarray(comp.sigma, dtype=float)
        blocks.append(mean + sigma * rng.standard_normal((int(comp.n), mean.size)))
        labels.append(np.full(int(comp.n), k, dtype=np.int64))
    return Dataset(np.vstack(blocks), np.concatenate(labels), name=f"mixture(seed={spec.seed})")


def load_csv(path, label_column: Optional[int] = None, header: bool = False) -> Dataset:
    """Read a comma-separated numeric file.

    ``label_column`` may be negative (``-1`` is the last column). Labels are
    remapped densely to ``0..K-1`` in order of their sorted raw values; the
    mapping is kept on ``Dataset.label_map`` and logged.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such dataset file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if header:
        rows = rows[1:]
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    width = len(rows[0])
    offset = 2 if header else 1
    for i, r in enumerate(rows):
        if len(r) != width:
            raise DatasetError(f"{path}: row {i + offset} has {len(r)} fields, expected {width}")

    lc = None
    if label_column is not None:
        lc = label_column + width if label_column < 0 else label_column
        if not 0 <= lc < width:
            raise DatasetError(f"label column {label_column} out of range for {width} columns")
        if width < 2:
            raise DatasetError("label column leaves no feature columns")

    X = np.empty((len(rows), width - (lc is not None)))
    raw_labels = []
    for i, r in enumerate(rows):
        j_out = 0
        for j, cell in enumerate(r):
            if j == lc:
                try:
                    raw_labels.append(int(cell.strip()))
                except ValueError:
                    raise DatasetError(
                        f"{path}: row {i + offset}, column {j + 1}: label {cell!r} is not an integer"
                    ) from None
                continue
            try:
                v = float(cell)
            except ValueError:
                raise DatasetError(f"{path}: row {i + offset}, column {j + 1}: {cell!r} is not numeric") from None
            if not np.isfinite(v):
                raise DatasetError(f"{path}: row {i + offset}, column {j + 1}: non-finite value {cell!r}")
            X[i, j_out] = v
            j_out += 1

    truth, label_map = None, {}
    if lc is not None:
        uniq = sorted(set(raw_labels))
        label_map = {str(u): k for k, u in enumerate(uniq)}
        truth = np.array([label_map[str(v)] for v in raw_labels], dtype=np.int64)
        if uniq != list(range(len(uniq))):
            logger.info("%s: remapped labels %s", path.name, label_map)
    return Dataset(X, truth, name=path.stem, label_map=label_map)


def write_csv(d: Dataset, path) -> None:
    """Write ``d`` with the truth labels (if any) as the last column.

    Floats use ``repr`` so that :func:`load_csv` reproduces them exactly.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for i in range(d.n):
            row = [repr(float(v)) for v in d.X[i]]
            if d.truth is not None:
                row.append(str(int(d.truth[i])))
            w.writerow(row)


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise DatasetError(f"unknown bundled dataset {name!r}; choose from {BUNDLED}")
    return Path(str(resources.files("augkmeans").joinpath("data", f"{name}.csv")))


def load_bundled(name: str) -> Dataset:
    """Load ``iris`` (150 x 4) or ``wine`` (178 x 13); labels in the last column."""
    d = load_csv(bundled_path(name), label_column=-1)
    d.name = name
    return d


def describe(d: Dataset) -> dict:
    out = {
        "name": d.name,
        "n": d.n,
        "p": d.p,
        "min": d.X.min(axis=0).tolist(),
        "max": d.X.max(axis=0).tolist(),
        "mean": d.X.mean(axis=0).tolist(),
    }
    if d.truth is not None:
        counts = np.bincount(d.truth, minlength=d.n_classes)
        out["n_classes"] = int(d.n_classes)
        out["class_counts"] = counts.tolist()
    return out
