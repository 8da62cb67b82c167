"""Tests for the report builders."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zerotap.errors import InvalidArgumentError
from zerotap.pipeline import (
    auto_grid,
    derivative_comparison,
    jentzsch_condition,
    jentzsch_statistic,
    make_grid,
    theorem1_check,
    uniformity_report,
)
from zerotap.roots import newton_polygon_radii
from zerotap.series import (
    explicit_coeffs,
    geometric_partial_sum,
    hardy,
    hardy_truncation,
    rule_partial_sum,
    ruelle_truncation,
    ruelle_zeta,
)

T_GRID = np.linspace(-1.0, 2.0, 301)


def test_make_grid():
    grid = make_grid(-1.0, 2.0, 301)
    assert grid[0] == -1.0 and grid[-1] == 2.0 and len(grid) == 301
    with pytest.raises(InvalidArgumentError):
        make_grid(1.0, 1.0, 10)
    with pytest.raises(InvalidArgumentError):
        make_grid(0.0, 1.0, 1)


def test_auto_grid_follows_newton_slopes():
    grid = auto_grid(explicit_coeffs([1.0, 0.0, 1e-6]), points=11)
    assert grid[0] == pytest.approx(math.log(1000.0) - 1.0)
    assert grid[-1] == pytest.approx(math.log(1000.0) + 1.0)
    monomial = auto_grid(explicit_coeffs([0.0, 0.0, 1.0]))
    assert (monomial[0], monomial[-1], len(monomial)) == (-1.0, 2.0, 301)
    shifted = auto_grid(explicit_coeffs([0.0, 0.0, 1.0]), points=21, default_grid=(-3.0, 0.5))
    assert (shifted[0], shifted[-1], len(shifted)) == (-3.0, 0.5, 21)


@pytest.mark.parametrize(
    "f",
    [ruelle_zeta(-2.00001, ruelle_truncation(-2.00001)), hardy(0.995, hardy_truncation(0.995))],
    ids=["ruelle", "hardy"],
)
def test_auto_grid_stops_at_truncation_radius(f):
    grid = auto_grid(f)
    assert max(s for s, _ in newton_polygon_radii(f)) + 1.0 > math.log(4.0) + 1.0
    assert grid[-1] == pytest.approx(math.log(4.0) + 1.0)
    assert grid[0] == pytest.approx(min(s for s, _ in newton_polygon_radii(f)) - 1.0)
    wider = auto_grid(f, truncation_radius=16.0)
    assert wider[-1] == pytest.approx(math.log(16.0) + 1.0)


def test_auto_grid_ignores_radius_for_polynomials():
    grid = auto_grid(geometric_partial_sum(10), truncation_radius=1.5)
    assert (grid[0], grid[-1]) == (-1.0, 1.0)


def test_theorem1_on_geometric_sum(s200):
    report = theorem1_check(s200, T_GRID)
    assert report.duality_residual <= 1e-9
    assert report.sandwich_gap <= math.log(201) / 200 + 1e-12
    data = report.to_json()
    assert data["V"] == 200.0
    assert data["psi"]["breakpoints"] == [0.0, 1.0]
    assert len(data["profile"]["lower"]) == 301


@pytest.mark.parametrize("eps", [0.05, 0.1, 0.2])
def test_geometric_sum_meets_coefficient_criterion(eps):
    f = geometric_partial_sum(100)
    assert jentzsch_statistic(f, eps) == (0.0, pytest.approx(eps * 100))
    assert jentzsch_condition(f, eps)


def test_binomial_fails_coefficient_criterion():
    """(1 + z)^100 has all zeros at -1: ln C(100, 50) - ln C(100, 10) is about 36.3."""
    f = rule_partial_sum("binomial", 100)
    difference, bound = jentzsch_statistic(f, 0.1)
    assert difference == pytest.approx(math.log(math.comb(100, 50)) - math.log(math.comb(100, 10)), rel=1e-12)
    assert difference == pytest.approx(36.3, abs=0.05)
    assert bound == pytest.approx(10.0)
    assert not jentzsch_condition(f, 0.1)


def test_coefficient_criterion_argument_checks():
    f = geometric_partial_sum(10)
    for eps in (0.0, 0.5, -0.1):
        with pytest.raises(InvalidArgumentError):
            jentzsch_statistic(f, eps)
    with pytest.raises(InvalidArgumentError):
        jentzsch_statistic(explicit_coeffs([1.0, 1.0, 1.0], V=7.5), 0.1)
    with pytest.raises(InvalidArgumentError, match="normalized"):
        jentzsch_statistic(hardy(0.5, 6), 0.1)


coefficient_lists = st.lists(
    st.floats(min_value=-1e3, max_value=1e3, allow_nan=False), min_size=4, max_size=60
).map(lambda values: values + [1.0])
windows = st.floats(min_value=1e-3, max_value=0.499)


@settings(max_examples=80, deadline=None)
@given(coefficient_lists, windows, windows)
def test_coefficient_criterion_is_monotone_in_eps(values, e1, e2):
    f = explicit_coeffs(values)
    small, large = sorted((e1, e2))
    if jentzsch_condition(f, small):
        assert jentzsch_condition(f, large)
    d_small, _ = jentzsch_statistic(f, small)
    d_large, _ = jentzsch_statistic(f, large)
    assert d_large <= d_small


def test_uniformity_on_geometric_sum(s200):
    report = uniformity_report(s200, t_grid=T_GRID)
    assert report.segmentation is not None and report.detector_note is None
    [circle] = report.circles
    assert abs(circle.radius - 1.0) < 0.01
    assert circle.predicted_mass == pytest.approx(1.0, abs=1e-6)
    assert circle.measured_mass == pytest.approx(1.0)
    assert circle.discrepancy < 0.02
    assert report.discrepancy < 0.02
    assert report.radial.annulus_mass == pytest.approx(1.0)
    data = report.to_json()
    assert data["converged"] and data["degree"] == 200
    assert data["detector"]["flat_start"]


def test_geometric_sum_discrepancy_is_golden(s200, golden):
    """Zeros of S_200 are the 201st roots of unity other than 1: D = 2/201."""
    report = uniformity_report(s200, t_grid=T_GRID)
    golden("geometric_sum_discrepancy_n200", report.discrepancy)


def test_uniformity_with_radius_guess(unit_root):
    report = uniformity_report(unit_root(60), radius_guess=1.0, t_grid=T_GRID)
    [circle] = report.circles
    assert circle.predicted_mass is None
    assert circle.measured_mass == pytest.approx(1.0)
    assert circle.discrepancy == pytest.approx(1 / 60, rel=1e-6)


def test_uniformity_reports_unresolved_profile(s200):
    report = uniformity_report(s200, t_grid=T_GRID, detector_tol=1e-3)
    assert report.segmentation is None
    assert "exceeds detector tolerance" in report.detector_note
    assert report.circles == []
    assert report.to_json()["detector"] is None


def test_ruelle_profile_resolves_the_circle_of_radius_two():
    c = -2.00001
    f = ruelle_zeta(c, ruelle_truncation(c))
    report = uniformity_report(f)
    assert report.profile.t_grid[-1] <= math.log(4.0) + 1.0 + 1e-12
    seg = report.segmentation
    assert seg is not None, report.detector_note
    assert seg.flat_start
    assert seg.slope_tol == pytest.approx(min(seg.tol, 0.5))
    near_two = [circle for circle in seg.circles if abs(math.log(circle.radius / 2.0)) <= 0.15]
    assert near_two
    assert 0.5 < sum(circle.mass for circle in near_two) <= 1.0 + 1e-9
    assert report.roots.converged


def test_hardy_zeros_gather_near_the_unit_circle():
    a = 0.995
    f = hardy(a, hardy_truncation(a))
    report = uniformity_report(f, radius_guess=1.0, delta=0.2)
    assert report.profile.t_grid[-1] <= math.log(4.0) + 1.0 + 1e-12
    assert report.roots.converged
    [circle] = report.circles
    assert circle.measured_mass >= 0.2


def test_derivative_comparison_on_unit_root(unit_root, golden):
    """Zeros on the unit circle, critical points all at the origin: W1 = 1."""
    report = derivative_comparison(unit_root(200))
    golden("unit_root_w1_zeros_vs_critical_n200", report.w1_zero_vs_crit, rel=1e-6)
    assert report.w1_zero_vs_crit == pytest.approx(1.0, abs=1e-6)
    assert report.critical.zero_multiplicity == 199
    assert report.exclusion_radius == pytest.approx(0.05)
    assert math.isfinite(report.pointwise_gap)
    assert report.constancy_flags
    assert all(flag.constant for flag in report.constancy_flags)
    assert report.to_json()["sample_count"] == report.sample_count


def test_derivative_comparison_needs_degree_two():
    with pytest.raises(InvalidArgumentError):
        derivative_comparison(explicit_coeffs([1.0, 1.0]))
