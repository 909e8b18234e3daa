import json
import math

import numpy as np
import pytest

from ustlab_plots.figures import FigureSpec, ks_gap, rayleigh_cdf, render


def write_csv(path, header, columns, rows):
    lines = list(header) + [",".join(columns)]
    for row in rows:
        lines.append(",".join("" if v is None else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def rayleigh_csv(tmp_path, n=2000, seed=0, name="d.csv"):
    rng = np.random.default_rng(seed)
    d = np.sqrt(2.0 * rng.exponential(size=n))
    return write_csv(
        tmp_path / name, ["# graph=test"], ["d_0_1"], [[float(v)] for v in d]
    )


def test_spec_validation():
    with pytest.raises(ValueError, match="unknown figure kind"):
        FigureSpec.from_dict({"kind": "pie", "inputs": ["x"], "output": "y"})
    with pytest.raises(ValueError, match="at least one input"):
        FigureSpec.from_dict({"kind": "trend", "inputs": [], "output": "y"})
    with pytest.raises(ValueError, match="unknown spec fields"):
        FigureSpec.from_dict(
            {"kind": "trend", "inputs": ["x"], "output": "y", "colour": "red"}
        )
    with pytest.raises(ValueError, match="output path"):
        FigureSpec.from_dict({"kind": "trend", "inputs": ["x"], "output": ""})


def test_ks_gap_hand_oracle():
    uniform = lambda x: np.clip(x, 0.0, 1.0)
    assert math.isclose(ks_gap(np.array([0.5]), uniform), 0.5)
    assert math.isclose(ks_gap(np.array([0.25, 0.75]), uniform), 0.25)


def test_cdf_overlay_reports_the_gap_and_writes_svg(tmp_path):
    csv = rayleigh_csv(tmp_path)
    out = tmp_path / "fig.svg"
    spec = FigureSpec.from_dict(
        {
            "kind": "cdf-overlay",
            "inputs": [csv],
            "output": str(out),
            "reference": "rayleigh",
            "title": "overlay",
        }
    )
    result = render(spec)
    assert out.exists() and out.read_text().startswith("<?xml")
    # the reported gap is the plotted data's own sup distance
    d = np.array([row[0] for row in _read_rows(csv)])
    assert math.isclose(result["ks"], ks_gap(d, rayleigh_cdf), abs_tol=1e-12)
    assert result["ks"] < 0.05


def _read_rows(csv):
    rows = []
    for line in open(csv):
        if line.startswith("#") or line.startswith("d_"):
            continue
        rows.append([float(x) for x in line.split(",")])
    return rows


def test_rendering_is_deterministic(tmp_path):
    csv = rayleigh_csv(tmp_path)
    payload = {
        "kind": "cdf-overlay",
        "inputs": [csv],
        "output": "",
        "reference": "rayleigh",
    }
    blobs = []
    for name in ("a.svg", "b.svg"):
        payload["output"] = str(tmp_path / name)
        render(FigureSpec.from_dict(payload))
        blobs.append((tmp_path / name).read_bytes())
    assert blobs[0] == blobs[1]


def test_median_normalization_matches_the_report_convention(tmp_path):
    rng = np.random.default_rng(1)
    d = 7.0 * np.sqrt(2.0 * rng.exponential(size=4000))  # scaled Rayleigh
    csv = write_csv(tmp_path / "s.csv", [], ["d_0_1"], [[float(v)] for v in d])
    out = tmp_path / "fig.svg"
    result = render(
        FigureSpec.from_dict(
            {
                "kind": "cdf-overlay",
                "inputs": [csv],
                "output": str(out),
                "reference": "rayleigh",
                "normalize": "median",
            }
        )
    )
    median = float(np.median(d))
    scale = median / math.sqrt(2.0 * math.log(2.0))
    assert math.isclose(result["ks"], ks_gap(d / scale, rayleigh_cdf), abs_tol=1e-12)
    assert result["ks"] < 0.05


def test_overlay_against_an_empirical_reference(tmp_path):
    a = rayleigh_csv(tmp_path, seed=1, name="a.csv")
    out = tmp_path / "fig.svg"
    result = render(
        FigureSpec.from_dict(
            {
                "kind": "cdf-overlay",
                "inputs": [a],
                "output": str(out),
                "reference": a,  # self-comparison: gap is at most 1/n
            }
        )
    )
    assert result["ks"] <= 1.0 / 2000 + 1e-12


def test_trend_reads_json_metrics_in_order(tmp_path):
    paths = []
    for i, v in enumerate((0.3, 0.2, 0.1)):
        p = tmp_path / f"r{i}.json"
        p.write_text(json.dumps({"kind": "KS", "value": v}))
        paths.append(str(p))
    out = tmp_path / "trend.svg"
    result = render(
        FigureSpec.from_dict(
            {
                "kind": "trend",
                "inputs": paths,
                "output": str(out),
                "x": [4, 6, 8],
            }
        )
    )
    assert result["values"] == [0.3, 0.2, 0.1]
    assert out.exists()
    with pytest.raises(ValueError, match="one abscissa per input"):
        render(
            FigureSpec.from_dict(
                {"kind": "trend", "inputs": paths, "output": str(out), "x": [1]}
            )
        )


def test_trend_supports_nested_metrics(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"gamma": {"value": 0.7}, "vol": 100}))
    out = tmp_path / "t.svg"
    result = render(
        FigureSpec.from_dict(
            {
                "kind": "trend",
                "inputs": [str(p)],
                "output": str(out),
                "metric": "gamma.value",
            }
        )
    )
    assert result["values"] == [0.7]


def test_histogram_excludes_and_counts_infinities(tmp_path):
    csv = write_csv(
        tmp_path / "h.csv",
        ["# graph=ring:n=12"],
        ["task", "d_0_1"],
        [[0, 1.0], [0, None], [0, 2.0], [0, None]],
    )
    out = tmp_path / "h.svg"
    result = render(
        FigureSpec.from_dict(
            {"kind": "histogram", "inputs": [csv], "output": str(out)}
        )
    )
    assert result["n_inf"] == 2
    assert out.exists()


def test_all_infinite_column_is_an_error(tmp_path):
    csv = write_csv(
        tmp_path / "i.csv", [], ["task", "d_0_1"], [[0, None], [0, None]]
    )
    with pytest.raises(ValueError, match="no finite values"):
        render(
            FigureSpec.from_dict(
                {"kind": "histogram", "inputs": [csv], "output": "x.svg"}
            )
        )
