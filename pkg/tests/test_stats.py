import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ustlab.rng import substream
from ustlab.stats import (
    ComparisonReport,
    EmpiricalSample,
    ks_against,
    ks_statistic,
    normalize_by_scale,
    two_sample_tv,
)


def test_empirical_sample_separates_infinities():
    s = EmpiricalSample.from_values([1.0, math.inf, 2.0, math.inf], label="d")
    assert s.values.tolist() == [1.0, 2.0]
    assert s.n_inf == 2
    assert s.n_total == 4
    assert s.inf_fraction == 0.5
    assert EmpiricalSample.from_values([]).inf_fraction == 0.0


def test_ks_statistic_hand_oracles():
    uniform = lambda x: np.clip(x, 0.0, 1.0)
    assert math.isclose(ks_statistic(np.array([0.5]), uniform), 0.5)
    assert math.isclose(ks_statistic(np.array([0.25, 0.75]), uniform), 0.25)
    # a sample drawn exactly at the quantile midpoints minimizes the gap
    n = 100
    x = (np.arange(n) + 0.5) / n
    assert math.isclose(ks_statistic(x, uniform), 0.5 / n)


def test_ks_statistic_dkw_bound_on_uniform_samples():
    rng = substream(8, 0)
    n = 10**4
    x = rng.random(n)
    # DKW: exceeding 1.36/sqrt(n) has probability < 5%
    assert ks_statistic(x, lambda v: np.clip(v, 0, 1)) < 2.0 * 1.36 / math.sqrt(n)


@given(
    data=st.lists(
        st.floats(0.01, 10.0, allow_nan=False), min_size=2, max_size=50
    ),
    a=st.floats(0.1, 5.0),
)
@settings(max_examples=100, deadline=None)
def test_ks_is_invariant_under_increasing_rescaling(data, a):
    x = np.array(data)
    cdf = lambda v: -np.expm1(-np.maximum(v, 0.0))
    scaled_cdf = lambda v: -np.expm1(-np.maximum(v / a, 0.0))
    assert math.isclose(
        ks_statistic(x, cdf), ks_statistic(a * x, scaled_cdf), rel_tol=1e-9
    )


def test_ks_against_reports_and_verdicts():
    sample = EmpiricalSample.from_values([0.1, 0.4, math.inf])
    cdf = lambda v: np.clip(v, 0, 1)
    report = ks_against(sample, cdf, threshold=0.9)
    assert report.kind == "KS"
    assert report.passed is True
    assert report.n_a == 3
    assert math.isclose(report.inf_fraction_a, 1 / 3)
    assert ks_against(sample, cdf).passed is None
    with pytest.raises(ValueError):
        ks_against(EmpiricalSample.from_values([math.inf]), cdf)


def test_two_sample_tv_oracles_and_symmetry():
    a = EmpiricalSample.from_values([1, 1, 2, 2])
    b = EmpiricalSample.from_values([1, 1, 1, 1])
    r = two_sample_tv(a, b)
    assert math.isclose(r.value, 0.5)
    assert math.isclose(two_sample_tv(b, a).value, r.value)
    same = two_sample_tv(a, a)
    assert same.value == 0.0
    disjoint = two_sample_tv(
        EmpiricalSample.from_values([1]), EmpiricalSample.from_values([2])
    )
    assert disjoint.value == 1.0


def test_two_sample_tv_treats_infinity_as_an_atom():
    a = EmpiricalSample.from_values([1.0, math.inf])
    b = EmpiricalSample.from_values([1.0, 1.0])
    assert math.isclose(two_sample_tv(a, b).value, 0.5)
    with pytest.raises(ValueError):
        two_sample_tv(a, EmpiricalSample.from_values([]))


def test_comparison_report_json_round_trip():
    report = ComparisonReport("TV", 0.25, 100, 200, 0.3, True, 0.0, 0.1)
    payload = json.loads(report.to_json())
    assert payload["pass"] is True
    assert "passed" not in payload
    assert payload["kind"] == "TV"
    assert ComparisonReport.from_json(report.to_json()) == report


def test_normalize_by_scale():
    s = EmpiricalSample.from_values([2.0, 4.0, 8.0, math.inf])
    by_two = normalize_by_scale(s, 2.0)
    assert by_two.values.tolist() == [1.0, 2.0, 4.0]
    assert by_two.n_inf == 1
    by_median = normalize_by_scale(s, "median")
    assert math.isclose(float(np.median(by_median.values)), 1.0)
    with pytest.raises(ValueError):
        normalize_by_scale(s, 0.0)
    with pytest.raises(ValueError):
        normalize_by_scale(s, -1.0)
    with pytest.raises(ValueError):
        normalize_by_scale(EmpiricalSample.from_values([math.inf]), "median")
