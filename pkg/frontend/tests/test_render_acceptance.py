"""Secondary acceptance: every artifact schema the simulation CLI publishes
renders without error, and the figure-side gap recomputation agrees with the
comparison report to 1e-9.

The simulation package is exercised only through its installed command-line
interface; nothing is imported from it.
"""

import json
import math
import subprocess
import sys

import pytest

from ustlab_plots.cli import main as plots_main
from ustlab_plots.figures import FigureSpec, render


def ustlab(*argv):
    proc = subprocess.run(
        ["ustlab", *map(str, argv)], capture_output=True, text=True
    )
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="module")
def artifacts(tmp_path_factory):
    """One artifact per published schema, produced by the real CLI."""
    root = tmp_path_factory.mktemp("artifacts")
    paths = {
        "lerw": root / "lerw.csv",
        "kpoints": root / "kpoints.csv",
        "crt": root / "crt.csv",
        "constants": root / "constants.json",
        "limits": root / "limits.json",
        "report": root / "report.json",
    }
    ustlab("lerw", "sample", "--graph", "ring:n=12", "--samples", 400,
           "--seed", 1, "--threads", 1, "--out", paths["lerw"])
    ustlab("ust", "kpoints", "--graph", "ring:n=16", "--k", 2, "--kill-abs",
           "1.5", "--samples", 200, "--seed", 2, "--threads", 1,
           "--out", paths["kpoints"])
    ustlab("crt", "sample", "--k", 3, "--samples", 2000, "--seed", 3,
           "--threads", 1, "--out", paths["crt"])
    ustlab("constants", "--graph", "complete:m=100", "--scales",
           "tau=1,s=2,q=5,r=20", "--samples", 100, "--seed", 4,
           "--out", paths["constants"])
    ustlab("lattice-limits", "--d", 5, "--trunc", 100, "--samples", 100,
           "--seed", 5, "--out", paths["limits"])
    ustlab("compare", "--dists", paths["crt"], "--ref", "rayleigh",
           "--normalize", "median", "--column", "d_0_1",
           "--threshold", "0.5", "--out", paths["report"])
    return {k: str(v) for k, v in paths.items()}


def test_every_schema_renders(tmp_path, artifacts):
    specs = [
        {"kind": "cdf-overlay", "inputs": [artifacts["crt"]],
         "reference": "rayleigh", "normalize": "median", "column": "d_0_1"},
        {"kind": "cdf-overlay", "inputs": [artifacts["lerw"]],
         "column": "le_length"},
        {"kind": "histogram", "inputs": [artifacts["kpoints"]],
         "column": "d_0_1"},
        {"kind": "histogram", "inputs": [artifacts["lerw"]], "column": "T"},
        {"kind": "trend", "inputs": [artifacts["report"]], "metric": "value"},
        {"kind": "trend", "inputs": [artifacts["constants"]],
         "metric": "gamma.value"},
        {"kind": "trend", "inputs": [artifacts["limits"]],
         "metric": "gamma_inf.value"},
    ]
    for i, payload in enumerate(specs):
        payload["output"] = str(tmp_path / f"fig{i}.svg")
        result = render(FigureSpec.from_dict(payload))
        assert (tmp_path / f"fig{i}.svg").exists(), payload


def test_figure_gap_matches_the_comparison_report(tmp_path, artifacts):
    report = json.load(open(artifacts["report"]))
    assert report["kind"] == "KS"
    result = render(
        FigureSpec.from_dict(
            {
                "kind": "cdf-overlay",
                "inputs": [artifacts["crt"]],
                "output": str(tmp_path / "ks.svg"),
                "reference": "rayleigh",
                "normalize": "median",
                "column": "d_0_1",
            }
        )
    )
    assert math.isclose(result["ks"], report["value"], abs_tol=1e-9)


def test_cli_round_trip_and_error_paths(tmp_path, artifacts):
    spec_path = tmp_path / "spec.json"
    out = tmp_path / "cli.svg"
    spec_path.write_text(
        json.dumps(
            {
                "kind": "cdf-overlay",
                "inputs": [artifacts["crt"]],
                "output": str(out),
                "reference": "rayleigh",
                "column": "d_0_1",
            }
        )
    )
    assert plots_main(["render", "--spec", str(spec_path)]) == 0
    assert out.exists()

    bad_csv = tmp_path / "bad.csv"
    bad_csv.write_text("# seed=1\na,d_0_1\n1.0\n")
    bad_spec = tmp_path / "bad.json"
    bad_spec.write_text(
        json.dumps(
            {"kind": "histogram", "inputs": [str(bad_csv)], "output": str(out)}
        )
    )
    assert plots_main(["render", "--spec", str(bad_spec)]) == 2

    empty_csv = tmp_path / "empty.csv"
    empty_csv.write_text("a,d_0_1\n")
    empty_spec = tmp_path / "empty.json"
    empty_spec.write_text(
        json.dumps(
            {"kind": "histogram", "inputs": [str(empty_csv)], "output": str(out)}
        )
    )
    assert plots_main(["render", "--spec", str(empty_spec)]) == 2
