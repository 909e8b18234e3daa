"""Goodness-of-fit engine: KS against references, TV on finite supports.

Infinite distances (forest cross-component pairs) are tracked separately:
they are regular atoms in TV comparisons and excluded-but-reported in KS.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, asdict
from typing import Callable, Iterable

import numpy as np


@dataclass(frozen=True)
class EmpiricalSample:
    """Finite values plus a separately tracked count of infinities."""

    values: np.ndarray
    n_inf: int = 0
    label: str = ""
    seed: int | None = None

    @classmethod
    def from_values(
        cls, values: Iterable[float], label: str = "", seed: int | None = None
    ) -> "EmpiricalSample":
        arr = np.asarray(list(values), dtype=float)
        finite = arr[np.isfinite(arr)]
        return cls(finite, int(arr.size - finite.size), label, seed)

    @property
    def n_total(self) -> int:
        return int(self.values.size) + self.n_inf

    @property
    def inf_fraction(self) -> float:
        return self.n_inf / self.n_total if self.n_total else 0.0


@dataclass(frozen=True)
class ComparisonReport:
    kind: str  # "KS" | "TV" | "chi2"
    value: float
    n_a: int
    n_b: int
    threshold: float | None
    passed: bool | None
    inf_fraction_a: float
    inf_fraction_b: float

    def to_json(self) -> str:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return json.dumps(d, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ComparisonReport":
        d = json.loads(text)
        d["passed"] = d.pop("pass")
        return cls(**d)


def _verdict(value: float, threshold: float | None) -> bool | None:
    return None if threshold is None else value <= threshold


def ks_statistic(values: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sup distance between the empirical CDF of `values` and `cdf`."""
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def ks_against(
    sample: EmpiricalSample,
    cdf: Callable[[np.ndarray], np.ndarray],
    threshold: float | None = None,
) -> ComparisonReport:
    """KS of the finite part against a reference CDF; inf fraction reported."""
    if sample.values.size == 0:
        raise ValueError("empty finite part; KS undefined")
    value = ks_statistic(sample.values, cdf)
    return ComparisonReport(
        "KS",
        value,
        sample.n_total,
        0,
        threshold,
        _verdict(value, threshold),
        sample.inf_fraction,
        0.0,
    )


def two_sample_tv(
    a: EmpiricalSample, b: EmpiricalSample, threshold: float | None = None
) -> ComparisonReport:
    """Total variation between empirical pmfs; infinity is a regular atom."""
    if a.n_total == 0 or b.n_total == 0:
        raise ValueError("both samples must be nonempty")
    ca: Counter = Counter(a.values.tolist())
    cb: Counter = Counter(b.values.tolist())
    ca[math.inf] += a.n_inf
    cb[math.inf] += b.n_inf
    support = set(ca) | set(cb)
    value = 0.5 * sum(
        abs(ca[v] / a.n_total - cb[v] / b.n_total) for v in support
    )
    return ComparisonReport(
        "TV",
        value,
        a.n_total,
        b.n_total,
        threshold,
        _verdict(value, threshold),
        a.inf_fraction,
        b.inf_fraction,
    )


def normalize_by_scale(
    sample: EmpiricalSample, scale: float | str
) -> EmpiricalSample:
    """Divide finite values by a scale, or by their median under "median"."""
    if scale == "median":
        if sample.values.size == 0:
            raise ValueError("median normalization needs a nonempty finite part")
        scale = float(np.median(sample.values))
    if not isinstance(scale, (int, float)) or scale <= 0:
        raise ValueError(f"scale must be positive, got {scale!r}")
    return EmpiricalSample(
        sample.values / scale, sample.n_inf, sample.label, sample.seed
    )
