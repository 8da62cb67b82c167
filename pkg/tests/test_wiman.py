"""Tests for maximal terms, profile bounds and the piecewise-harmonic detector."""

import math

import numpy as np
import pytest

from zerotap.errors import ConvexityError, InvalidArgumentError, ProfileNotResolvedError
from zerotap.series import explicit_coeffs, geometric_partial_sum, hardy
from zerotap.wiman import (
    Profile,
    central_index_bound,
    detect_piecewise_harmonic,
    maximal_term,
    maximal_terms,
    phi_profile,
    sampled_log_max_modulus,
    valiron_upper,
)

T_GRID = np.linspace(-1.0, 2.0, 301)


def _random_polynomial(rng, max_degree=200):
    degree = int(rng.integers(1, max_degree + 1))
    coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return explicit_coeffs(list(coeffs), label=f"random-{degree}")


def test_maximal_term_of_geometric_sum():
    f = geometric_partial_sum(50)
    assert maximal_term(f, -1.0) == (0.0, 0)
    log_m, nu = maximal_term(f, 1.0)
    assert log_m == pytest.approx(50.0)
    assert nu == 50
    # every term ties at r = 1; the largest index wins
    assert maximal_term(f, 0.0) == (0.0, 50)


def test_maximal_terms_is_vectorized():
    f = explicit_coeffs([1.0, 0.0, 4.0])
    log_m, nu = maximal_terms(f, [-2.0, 0.0, 2.0])
    np.testing.assert_allclose(log_m, [0.0, math.log(4.0), math.log(4.0) + 4.0])
    np.testing.assert_array_equal(nu, [0, 2, 2])


def test_central_index_is_nondecreasing(rng):
    t = np.linspace(-3.0, 3.0, 241)
    for _ in range(20):
        _, nu = maximal_terms(_random_polynomial(rng), t)
        assert np.all(np.diff(nu) >= 0)
    _, nu = maximal_terms(hardy(0.5, 12), np.linspace(-1.0, 1500.0, 500))
    assert np.all(np.diff(nu) >= 0) and nu[-1] == 12


def test_central_index_bound(rng):
    for _ in range(20):
        f = _random_polynomial(rng)
        t = float(rng.uniform(-2.0, 2.0))
        check = central_index_bound(f, t, t + float(rng.uniform(0.01, 1.0)))
        assert check.holds, check
    with pytest.raises(InvalidArgumentError):
        central_index_bound(geometric_partial_sum(3), 1.0, 1.0)


def test_geometric_profile_bounds(s200):
    p = phi_profile(s200, T_GRID)
    np.testing.assert_allclose(p.lower, np.maximum(T_GRID, 0.0), atol=1e-12)
    assert p.gap <= math.log(201) / 200 + 1e-12
    assert np.all(p.upper >= p.lower)
    assert p.nu[0] == 0 and p.nu[-1] == 200


def test_profile_rejects_bad_grid(s200):
    with pytest.raises(InvalidArgumentError):
        phi_profile(s200, [0.0])
    with pytest.raises(InvalidArgumentError):
        phi_profile(s200, [0.0, 1.0, 0.5])


def test_sampled_max_modulus_of_geometric_sum():
    f = geometric_partial_sum(10)
    assert sampled_log_max_modulus(f, math.log(2.0)) == pytest.approx(math.log(2**11 - 1))


def test_valiron_sandwich_on_random_polynomials(rng):
    """lower <= (1/V) ln max_{|z|=e^t} |f| <= upper on 50 random polynomials."""
    t_grid = np.array([-0.5, 0.0, 0.3, 1.0])
    for _ in range(50):
        f = _random_polynomial(rng)
        p = phi_profile(f, t_grid)
        for i, t in enumerate(t_grid):
            # 256 samples exceed the degree, so the sampled max is at least m(r)
            sampled = sampled_log_max_modulus(f, float(t), points=256) / f.V
            assert p.lower[i] - 1e-9 <= sampled <= p.upper[i] + 1e-9
        assert valiron_upper(f, 0.0, 0.3) >= sampled_log_max_modulus(f, 0.0, points=256) - 1e-9


def test_detector_finds_the_unit_circle(s200):
    p = phi_profile(s200, T_GRID)
    tol = max(1.05 * p.gap, 1e-3)
    seg = detect_piecewise_harmonic(p, tol, unit_range=True)
    assert seg.detected
    assert len(seg.circles) == 1
    circle = seg.circles[0]
    assert abs(circle.radius - 1.0) < 0.01
    assert circle.mass == pytest.approx(1.0, abs=1e-6)
    assert seg.pieces[0].slope == pytest.approx(0.0, abs=1e-6)
    assert seg.pieces[-1].slope == pytest.approx(1.0, abs=1e-6)
    assert seg.flat_start
    assert seg.slopes_in_unit_range


def test_detector_on_two_kinks():
    t = np.linspace(-1.0, 3.0, 401)
    y = np.maximum(t, 0.0) + np.maximum(t - 1.0, 0.0)
    seg = detect_piecewise_harmonic(Profile(t, y, y, V=1.0), tol=0.01)
    assert [round(piece.slope, 9) for piece in seg.pieces] == [0.0, 1.0, 2.0]
    radii = [c.radius for c in seg.circles]
    np.testing.assert_allclose(radii, [1.0, math.e], rtol=1e-9)
    np.testing.assert_allclose([c.mass for c in seg.circles], [1.0, 1.0], rtol=1e-9)
    assert seg.slopes_in_unit_range is None
    assert seg.to_json()["circles"][1]["radius"] == pytest.approx(math.e)


def test_detector_refuses_unresolved_profile(s200):
    p = phi_profile(s200, T_GRID)
    with pytest.raises(ProfileNotResolvedError):
        detect_piecewise_harmonic(p, tol=0.01)
    with pytest.raises(InvalidArgumentError):
        detect_piecewise_harmonic(p, tol=0.0)


def test_detector_rejects_concave_profile():
    t = np.linspace(-1.0, 1.0, 201)
    y = -np.maximum(t, 0.0)
    with pytest.raises(ConvexityError):
        detect_piecewise_harmonic(Profile(t, y, y, V=1.0), tol=0.01)


def test_detector_without_pieces_reports_nothing():
    t = np.linspace(0.0, 1.0, 4)
    y = t**3
    seg = detect_piecewise_harmonic(Profile(t, y, y, V=1.0), tol=1e-6, min_piece_intervals=3)
    assert not seg.detected
    assert seg.circles == []


def test_slope_tolerance_is_separate_from_the_gap():
    """A wide sandwich gap still separates slopes 0 and 0.6."""
    t = np.linspace(-1.0, 1.0, 201)
    y = 0.6 * np.maximum(t, 0.0)
    p = Profile(t, y, y + 0.7, V=1.0)
    seg = detect_piecewise_harmonic(p, tol=0.8)
    assert seg.slope_tol == 0.5 and seg.tol == 0.8
    [circle] = seg.circles
    assert circle.radius == pytest.approx(1.0, abs=1e-9)
    assert circle.mass == pytest.approx(0.6, abs=1e-9)
    assert seg.flat_start
    assert seg.to_json()["slope_tol"] == 0.5

    merged = detect_piecewise_harmonic(p, tol=0.8, slope_tol=0.8)
    assert len(merged.pieces) == 1 and merged.circles == []
    with pytest.raises(InvalidArgumentError):
        detect_piecewise_harmonic(p, tol=0.8, slope_tol=0.0)
