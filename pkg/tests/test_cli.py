import csv
import json
import subprocess
import sys

import pytest

from augkmeans.cli import main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_generate_default(tmp_path):
    out = tmp_path / "bench.csv"
    assert main(["generate", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 300 and all(len(r) == 3 for r in rows)
    manifest = json.loads((tmp_path / "bench.csv.manifest.json").read_text())
    assert manifest["dataset"]["spec"]["seed"] == 0


def test_generate_single_component_and_determinism(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"components": [{"mean": [0, 0], "sigma": [1, 1], "n": 5}], "seed": 7}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["generate", "--spec", str(spec), "--out", str(a)]) == 0
    assert main(["generate", "--spec", str(spec), "--out", str(b)]) == 0
    rows = _rows(a)
    assert len(rows) == 5 and {r[-1] for r in rows} == {"0"}
    assert a.read_bytes() == b.read_bytes()


def test_generate_invalid_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"components": [{"mean": [0], "sigma": [-1], "n": 5}]}))
    assert main(["generate", "--spec", str(spec), "--out", str(tmp_path / "x.csv")]) == 1
    assert "error" in capsys.readouterr().err


def test_run_bench(tmp_path, capsys):
    data = tmp_path / "bench.csv"
    main(["generate", "--out", str(data)])
    out = tmp_path / "run"
    assert main(["run", str(data), "--label-column", "-1", "--seed", "2", "--out-dir", str(out)]) == 0
    result = json.loads((out / "result.json").read_text())
    traj = _rows(out / "trajectory_augmented.csv")
    assert len(traj) - 1 == result["augmented"]["iterations"] * 4
    assert len(_rows(out / "trajectory_kmeans.csv")) - 1 == result["kmeans"]["iterations"] * 4
    assert len(_rows(out / "excluded.csv")) > 1
    assert len(_rows(out / "labels.csv")) == 301
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["K"] == 4 and manifest["config"]["epsilon"] == 1e-6
    assert "class. rate" in capsys.readouterr().out


def test_run_separated_blobs_no_exclusions(tmp_path):
    data = tmp_path / "blobs.csv"
    lines = []
    for c, (cx, cy) in enumerate(((0, 0), (50, 0), (0, 50))):
        for i in range(10):
            lines.append(f"{cx + 0.1 * (i % 3)},{cy + 0.1 * (i // 3)},{c}")
    data.write_text("\n".join(lines) + "\n")
    out = tmp_path / "run"
    assert main(["run", str(data), "--label-column", "2", "--out-dir", str(out)]) == 0
    assert _rows(out / "excluded.csv") == [["index", "x0", "x1"]]
    assert json.loads((out / "result.json").read_text())["augmented"]["classification_rate"] == 1.0


def test_run_missing_file(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "augkmeans", "run", str(tmp_path / "nope.csv"), "--k", "2",
         "--out-dir", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode != 0
    assert "nope.csv" in proc.stderr and proc.stdout == ""


def test_run_requires_k_without_labels(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("1,2\n3,4\n5,6\n")
    assert main(["run", str(data), "--out-dir", str(tmp_path / "o")]) == 1


def test_compare_single_rep(tmp_path):
    out = tmp_path / "c"
    assert main(["compare", "iris", "--reps", "1", "--quiet", "--out-dir", str(out)]) == 0
    s = json.loads((out / "summary.json").read_text())
    for key in ("rate_better", "rate_better_or_equal", "iters_better", "iters_better_or_equal"):
        assert s[key] in (0.0, 1.0)
    assert (out / "summary.txt").exists() and (out / "timing.json").exists()
    assert len(_rows(out / "records.csv")) == 2


def test_compare_repeatable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for o in (a, b):
        assert main(["compare", "wine", "--reps", "4", "--seed", "9", "--quiet", "--out-dir", str(o)]) == 0
    for name in ("summary.json", "summary.txt", "records.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("argv", [["--reps", "0"], ["--k", "1"]])
def test_compare_bad_flags(tmp_path, argv):
    assert main(["compare", "iris", "--quiet", "--out-dir", str(tmp_path / "o")] + argv) == 1


def test_compare_needs_truth(tmp_path):
    data = tmp_path / "d.csv"
    data.write_text("1,2\n3,4\n5,6\n")
    assert main(["compare", str(data), "--k", "2", "--out-dir", str(tmp_path / "o")]) == 1


def test_standardize_flag(tmp_path):
    out = tmp_path / "o"
    assert main(["run", "wine", "--standardize", "--out-dir", str(out)]) == 0
    assert json.loads((out / "manifest.json").read_text())["dataset"]["standardize"] is True


def test_flag_defaults():
    from augkmeans.cli import build_parser

    args = build_parser().parse_args(["compare", "iris", "--out-dir", "x"])
    assert (args.epsilon, args.max_iter, args.ratio_threshold, args.l2_lambda) == (1e-6, 100, 1.5, 1.0)
    assert args.standardize is False and args.jobs == 1
