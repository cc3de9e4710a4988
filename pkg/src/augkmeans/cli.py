"""Command-line front end.

Examples::

    augkmeans generate --out bench.csv
    augkmeans run bench.csv --label-column -1 --k 4 --out-dir out/run
    augkmeans compare iris --reps 1000 --jobs 4 --out-dir out/iris
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .augmented import run_augmented, scatter_points
from .dataset import BUNDLED, MixtureSpec, bench_spec, bundled_path, generate_mixture, load_csv, write_csv
from .evaluation import RECORD_FIELDS, match_rate, run_comparison, summarize
from .kmeans import ClusteringConfig, kmeanspp_init, run_kmeans
from .logistic import SCHEMES, LogisticFitConfig


class CLIError(Exception):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _manifest(command, cfg, dataset_identity, outputs, extra=None):
    m = {
        "artifact": "augkmeans",
        "version": __version__,
        "command": command,
        "argv": sys.argv[1:],
        "config": cfg.to_dict() if cfg is not None else None,
        "dataset": dataset_identity,
        "outputs": sorted(str(o) for o in outputs),
    }
    if extra:
        m.update(extra)
    return m


def _resolve_dataset(args):
    path = Path(args.dataset)
    label_column = args.label_column
    header = args.header
    if not path.exists() and args.dataset in BUNDLED:
        path = bundled_path(args.dataset)
        if label_column is None:
            label_column = -1
    d = load_csv(path, label_column=label_column, header=header)
    if args.dataset in BUNDLED:
        d.name = args.dataset
    identity = {
        "path": str(path),
        "sha256": _sha256(path),
        "label_column": label_column,
        "header": header,
        "standardize": args.standardize,
        "n": d.n,
        "p": d.p,
    }
    if d.label_map:
        identity["label_map"] = d.label_map
    if args.standardize:
        d = d.standardized()
    return d, identity


def _config(args, d):
    K = args.k
    if K is None:
        if d.truth is None:
            raise CLIError("--k is required when the dataset has no label column")
        K = d.n_classes
    cfg = ClusteringConfig(
        K=K,
        epsilon=args.epsilon,
        max_iter=args.max_iter,
        seed=args.seed,
        ratio_threshold=args.ratio_threshold,
        logistic=LogisticFitConfig(l2_lambda=args.l2_lambda, scheme=args.logistic_scheme),
    )
    cfg.check_dataset(d.n)
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- generate -------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = MixtureSpec.from_json(args.spec) if args.spec else bench_spec()
    if args.seed is not None:
        spec.seed = args.seed
    spec.validate()
    d = generate_mixture(spec)
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(d, out)
    manifest_path = out.with_name(out.name + ".manifest.json")
    _write_json(manifest_path, _manifest(
        "generate", None,
        {"generator": "axis-aligned gaussian mixture", "spec": spec.to_dict(),
         "spec_file": str(args.spec) if args.spec else None},
        [out, manifest_path],
    ))
    print(f"wrote {d.n} rows x {d.p} features (+label) to {out}")
    return 0


# -- run ------------------------------------------------------------------

def _write_trajectory(path: Path, res, p):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["iteration", "cluster"] + [f"c{j}" for j in range(p)])
        for t, C in enumerate(res.trajectory, start=1):
            for k, row in enumerate(C):
                w.writerow([t, k] + [repr(float(v)) for v in row])


def cmd_run(args) -> int:
    d, identity = _resolve_dataset(args)
    cfg = _config(args, d)
    init = kmeanspp_init(d.X, cfg.K, np.random.default_rng(cfg.seed))
    km = run_kmeans(d.X, init, cfg)
    aug = run_augmented(d.X, init, cfg)
    scatter = scatter_points(aug)

    out = _out_dir(args)
    files = {
        "init": out / "init_centers.csv",
        "traj_km": out / "trajectory_kmeans.csv",
        "traj_aug": out / "trajectory_augmented.csv",
        "labels": out / "labels.csv",
        "excluded": out / "excluded.csv",
        "sse": out / "sse.csv",
        "result": out / "result.json",
        "manifest": out / "manifest.json",
    }
    with files["init"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cluster"] + [f"c{j}" for j in range(d.p)])
        for k, row in enumerate(init):
            w.writerow([k] + [repr(float(v)) for v in row])
    _write_trajectory(files["traj_km"], km, d.p)
    _write_trajectory(files["traj_aug"], aug, d.p)
    with files["labels"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "truth", "kmeans", "augmented", "firm"])
        for i in range(d.n):
            truth = "" if d.truth is None else int(d.truth[i])
            w.writerow([i, truth, int(km.labels[i]), int(aug.labels[i]), int(aug.firm_mask[i])])
    with files["excluded"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index"] + [f"x{j}" for j in range(d.p)])
        for i in scatter:
            w.writerow([int(i)] + [repr(float(v)) for v in d.X[i]])
    with files["sse"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["algorithm", "iteration", "sse"])
        for name, res in (("kmeans", km), ("augmented", aug)):
            for t, s in enumerate(res.sse_history, start=1):
                w.writerow([name, t, repr(s)])

    summary = {}
    for name, res in (("kmeans", km), ("augmented", aug)):
        summary[name] = {
            "iterations": res.iterations,
            "converged": res.converged,
            "final_sse": res.sse,
            "centers": res.centers.tolist(),
            "empty_cluster_events": res.empty_cluster_events,
            "sse_increases": res.sse_increases,
        }
        if d.truth is not None:
            summary[name]["classification_rate"] = match_rate(d.truth, res.labels, cfg.K)
    summary["augmented"]["n_excluded"] = int(scatter.size)
    summary["augmented"]["logistic_nonconverged"] = aug.logistic_nonconverged
    _write_json(files["result"], summary)
    _write_json(files["manifest"], _manifest("run", cfg, identity, files.values()))

    for name, label in (("kmeans", "k-means"), ("augmented", "Augmented k-means")):
        s = summary[name]
        rate = f"class. rate {100 * s['classification_rate']:.1f}%, " if "classification_rate" in s else ""
        print(f"{label:>18}: {rate}iterations {s['iterations']}, SSE {s['final_sse']:.6g}")
    print(f"{'excluded':>18}: {scatter.size} observations")
    return 0


# -- compare --------------------------------------------------------------

def cmd_compare(args) -> int:
    if args.reps < 1:
        raise CLIError("--reps must be >= 1")
    d, identity = _resolve_dataset(args)
    if d.truth is None:
        raise CLIError("compare needs ground-truth labels (use --label-column)")
    cfg = _config(args, d)

    def progress(done, total):
        if not args.quiet and (done % 100 == 0 or done == total):
            print(f"replication {done}/{total}", file=sys.stderr)

    records = run_comparison(d.X, d.truth, cfg, args.reps, cfg.seed, jobs=args.jobs, progress=progress)
    summary = summarize(records)

    out = _out_dir(args)
    files = {
        "summary_json": out / "summary.json",
        "summary_txt": out / "summary.txt",
        "records": out / "records.csv",
        "timing": out / "timing.json",
        "manifest": out / "manifest.json",
    }
    table = summary.to_table(title=f"Dataset: {d.name} (n={d.n}, p={d.p}, K={cfg.K})")
    files["summary_json"].write_text(summary.to_json(), encoding="utf-8")
    files["summary_txt"].write_text(table, encoding="utf-8")
    with files["records"].open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow([r.replication, r.seed, repr(r.rate_aug), repr(r.rate_km), r.iters_aug, r.iters_km])
    # wall-clock numbers vary run to run, so they stay out of summary/records
    _write_json(files["timing"], {
        "mean_elapsed_kmeans": float(np.mean([r.elapsed_km for r in records])),
        "mean_elapsed_augmented": float(np.mean([r.elapsed_aug for r in records])),
        "elapsed_kmeans": [r.elapsed_km for r in records],
        "elapsed_augmented": [r.elapsed_aug for r in records],
    })
    _write_json(files["manifest"], _manifest(
        "compare", cfg, identity, files.values(),
        {"reps": args.reps, "master_seed": cfg.seed, "replication_seed_rule": "master_seed + replication_index",
         "jobs": args.jobs},
    ))
    print(table, end="")
    return 0


# -- parser ---------------------------------------------------------------

def _add_common(p):
    p.add_argument("dataset", help=f"CSV file, or one of the bundled datasets {', '.join(BUNDLED)}")
    p.add_argument("--k", type=int, default=None, help="number of clusters (default: number of truth classes)")
    p.add_argument("--epsilon", type=float, default=1e-6, help="SSE-change tolerance (default 1e-6)")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--ratio-threshold", type=float, default=1.5)
    p.add_argument("--l2-lambda", type=float, default=1.0)
    p.add_argument("--logistic-scheme", choices=SCHEMES, default="ovr")
    p.add_argument("--seed", type=int, default=0, help="seed (master seed for compare)")
    p.add_argument("--label-column", type=int, default=None, help="0-based label column; negative counts from the end")
    p.add_argument("--header", action="store_true", help="skip the first line of the CSV")
    p.add_argument("--standardize", action="store_true", help="z-score every feature before clustering")
    p.add_argument("--out-dir", required=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="augkmeans", description="k-means and Augmented k-means")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a Gaussian-mixture dataset as CSV (label in last column)")
    g.add_argument("--spec", help="JSON mixture spec; default is the 4-cluster bench mixture")
    g.add_argument("--seed", type=int, default=None, help="override the spec seed")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="one paired run with trajectory and exclusion dumps")
    _add_common(r)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="paired Monte Carlo comparison")
    _add_common(c)
    c.add_argument("--reps", type=int, default=1000)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--quiet", action="store_true", help="no replication counter")
    c.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (CLIError, ValueError, OSError) as exc:
        print(f"augkmeans: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
