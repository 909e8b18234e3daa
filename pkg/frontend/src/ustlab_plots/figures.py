"""Figure construction: CDF overlays, trend polylines, histograms.

The overlay recomputes its goodness-of-fit gap from the plotted data with
the same conventions the comparison reports use (sorted empirical CDF,
two-sided sup gap, median- or beta-normalization), so the number printed on
the figure matches the report to floating-point accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "ustlab-plots"

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .io import CsvTable, distance_column, read_json, read_table, json_metric

KINDS = ("cdf-overlay", "trend", "histogram")
RAYLEIGH_MEDIAN = math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: list[str]
    output: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    column: str | None = None
    reference: str | None = None  # "rayleigh" or a CSV path
    normalize: str | None = None  # "median" or "beta"
    constants: str | None = None  # constants JSON for beta normalization
    x: list[float] | None = None  # trend abscissae
    metric: str = "value"  # dotted path into JSON inputs for trend
    bins: int = 40

    @classmethod
    def from_dict(cls, payload: dict, path: str = "<spec>") -> "FigureSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(payload) - known
        if extra:
            raise ValueError(f"{path}: unknown spec fields {sorted(extra)}")
        try:
            spec = cls(**payload)
        except TypeError as exc:
            raise ValueError(f"{path}: {exc}") from None
        if spec.kind not in KINDS:
            raise ValueError(
                f"{path}: unknown figure kind {spec.kind!r} (expected one of {KINDS})"
            )
        if not spec.inputs:
            raise ValueError(f"{path}: at least one input is required")
        if not spec.output:
            raise ValueError(f"{path}: an output path is required")
        return spec


def rayleigh_cdf(x: np.ndarray) -> np.ndarray:
    return -np.expm1(-np.square(np.maximum(x, 0.0)) / 2.0)


def ks_gap(values: np.ndarray, cdf) -> float:
    """Two-sided sup gap between the empirical CDF and a reference."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def _finite_values(table: CsvTable, column: str | None) -> tuple[np.ndarray, int]:
    name = distance_column(table, column)
    arr = np.asarray(table.column(name), dtype=float)
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        raise ValueError(f"{table.path}: column {name!r} has no finite values")
    return finite, int(arr.size - finite.size)


def _normalized(values: np.ndarray, spec: FigureSpec) -> np.ndarray:
    if spec.normalize is None:
        return values
    if spec.normalize == "median":
        scale = float(np.median(values)) / RAYLEIGH_MEDIAN
    elif spec.normalize == "beta":
        if not spec.constants:
            raise ValueError("beta normalization needs a constants JSON input")
        consts = read_json(spec.constants)
        scale = json_metric(consts, "beta.value", spec.constants) * math.sqrt(
            json_metric(consts, "vol", spec.constants)
        )
    else:
        raise ValueError(f"unknown normalization {spec.normalize!r}")
    if scale <= 0:
        raise ValueError("normalization scale must be positive")
    return values / scale


def _empirical_cdf_reference(path: str, spec: FigureSpec):
    table = read_table(path)
    ref, _ = _finite_values(table, spec.column)
    ref_sorted = np.sort(ref)

    def cdf(x):
        return np.searchsorted(ref_sorted, x, side="right") / ref_sorted.size

    return cdf, ref_sorted


def _new_axes(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.set_title(spec.title)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    return fig, ax


def _save(fig, spec: FigureSpec) -> None:
    fig.savefig(spec.output, format="svg", metadata={"Date": None})
    plt.close(fig)


def _render_cdf_overlay(spec: FigureSpec) -> dict:
    fig, ax = _new_axes(spec)
    result: dict = {"kind": spec.kind, "output": spec.output}
    ref_cdf = None
    if spec.reference == "rayleigh":
        ref_cdf = rayleigh_cdf
    elif spec.reference is not None:
        ref_cdf, ref_sorted = _empirical_cdf_reference(spec.reference, spec)
        ax.step(
            ref_sorted,
            np.arange(1, ref_sorted.size + 1) / ref_sorted.size,
            where="post",
            label="reference",
            color="black",
            lw=1.0,
        )
    gaps = []
    for path in spec.inputs:
        table = read_table(path)
        values, n_inf = _finite_values(table, spec.column)
        values = _normalized(values, spec)
        x = np.sort(values)
        y = np.arange(1, x.size + 1) / x.size
        label = table.meta.get("graph", path)
        if n_inf:
            label += f" ({n_inf} inf)"
        ax.step(x, y, where="post", label=label, lw=1.2)
        if ref_cdf is not None:
            gaps.append(ks_gap(values, ref_cdf))
    if spec.reference == "rayleigh":
        hi = max(float(np.max(ax.get_xlim())), 3.5)
        grid = np.linspace(0.0, hi, 400)
        ax.plot(grid, rayleigh_cdf(grid), color="black", lw=1.0, label="Rayleigh")
    if gaps:
        result["ks"] = gaps if len(gaps) > 1 else gaps[0]
        shown = max(gaps)
        ax.text(
            0.98, 0.05, f"max CDF gap = {shown:.4f}",
            transform=ax.transAxes, ha="right", va="bottom", fontsize=9,
        )
    ax.legend(loc="lower right" if not gaps else "upper left", fontsize=8)
    _save(fig, spec)
    return result


def _render_trend(spec: FigureSpec) -> dict:
    ys = []
    for path in spec.inputs:
        payload = read_json(path)
        ys.append(json_metric(payload, spec.metric, path))
    xs = spec.x if spec.x is not None else list(range(len(ys)))
    if len(xs) != len(ys):
        raise ValueError(
            f"trend needs one abscissa per input: {len(xs)} x values, "
            f"{len(ys)} inputs"
        )
    fig, ax = _new_axes(spec)
    ax.plot(xs, ys, marker="o")
    _save(fig, spec)
    return {"kind": spec.kind, "output": spec.output, "values": ys}


def _render_histogram(spec: FigureSpec) -> dict:
    fig, ax = _new_axes(spec)
    total_inf = 0
    for path in spec.inputs:
        table = read_table(path)
        values, n_inf = _finite_values(table, spec.column)
        values = _normalized(values, spec)
        total_inf += n_inf
        label = table.meta.get("graph", path)
        if n_inf:
            label += f" ({n_inf} inf excluded)"
        ax.hist(values, bins=spec.bins, density=True, alpha=0.6, label=label)
    ax.legend(fontsize=8)
    _save(fig, spec)
    return {"kind": spec.kind, "output": spec.output, "n_inf": total_inf}


def render(spec: FigureSpec) -> dict:
    """Render the figure and return the recomputed statistics."""
    if spec.kind == "cdf-overlay":
        return _render_cdf_overlay(spec)
    if spec.kind == "trend":
        return _render_trend(spec)
    return _render_histogram(spec)
