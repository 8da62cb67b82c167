"""Convergence experiments on the built-in families.

These solve families of degree up to 300 and take a minute or more; deselect
with ``-m "not slow"``.
"""

import numpy as np
import pytest

from zerotap.config import TRUNCATION_RADIUS
from zerotap.measures import angular_discrepancy, annulus_mass, empirical, wasserstein1
from zerotap.pipeline import uniformity_report
from zerotap.roots import aberth_roots, critical_points
from zerotap.series import (
    explicit_coeffs,
    hardy,
    random_roots_disk,
    rule_partial_sum,
    ruelle_truncation,
    ruelle_zeta,
    tutte_coeffseq,
)
from zerotap.tutte import tutte_connected
from zerotap.wiman import phi_profile, sampled_log_max_modulus

pytestmark = pytest.mark.slow

# c = -2 - delta with delta shrinking by four orders of magnitude per step
RUELLE_PARAMETERS = (-2.0 - 1e-5, -2.0 - 1e-9, -2.0 - 1e-13)
# the zero converging to z = 1 stays inside this radius
RUELLE_BULK_INNER = 1.5


def _assert_certified(rs):
    assert rs.converged, rs.label
    assert rs.degree_accounted + rs.zero_multiplicity == rs.degree


def test_harmonic_partial_sums_equidistribute(golden):
    discrepancies = []
    for n in (50, 100, 200):
        report = uniformity_report(rule_partial_sum("harmonic", n), radius_guess=1.0)
        _assert_certified(report.roots)
        discrepancies.append(report.discrepancy)
        golden(f"harmonic_discrepancy_n{n}", report.discrepancy)
        if n == 200:
            assert report.circles[0].measured_mass >= 0.95
    assert discrepancies[0] > discrepancies[1] > discrepancies[2]
    assert discrepancies[2] <= 0.06


def test_tutte_zeros_approach_the_unit_circle(golden):
    """Angular discrepancy falls with n.

    The annulus mass in [0.8, 1.25] is carried by the zero of multiplicity
    n - 1 at y = 1 and does not grow at these sizes: 7/28, 9/45, 13/66.
    """
    discrepancies = []
    for n in (8, 10, 12):
        rs = aberth_roots(tutte_coeffseq(tutte_connected(n), n))
        _assert_certified(rs)
        m = empirical(rs)
        discrepancies.append(angular_discrepancy(m))
        golden(f"tutte_annulus_mass_n{n}", annulus_mass(m, 0.8, 1.25), rel=1e-12)
    assert discrepancies[0] > discrepancies[1] > discrepancies[2]


def test_ruelle_bulk_approaches_radius_two():
    """Zeros of F_c between the isolated zero near z = 1 and the truncation radius close in on |z| = 2."""
    deviations = []
    for c in RUELLE_PARAMETERS:
        f = ruelle_zeta(c, ruelle_truncation(c))
        rs = aberth_roots(f)
        _assert_certified(rs)
        moduli = np.exp(rs.modulus_log)
        bulk = moduli[(moduli > RUELLE_BULK_INNER) & (moduli < TRUNCATION_RADIUS)]
        assert len(bulk) >= 3, c
        deviations.append(abs(float(np.median(bulk)) / 2.0 - 1.0))
    assert deviations[0] > deviations[1] > deviations[2]
    assert deviations[2] <= 0.15


def test_hardy_zeros_move_towards_the_unit_circle():
    medians = []
    for a in (0.9, 0.95, 0.99):
        f = hardy(a, 40)
        rs = aberth_roots(f)
        _assert_certified(rs)
        medians.append(float(np.median(rs.smallest(min(100, f.degree)))))
        # sum of log-moduli is fixed by the end coefficients
        logs = f.log_abs_coeffs()
        assert np.sum(rs.modulus_log) == pytest.approx(logs[0] - logs[-1], rel=1e-9)
    assert medians[0] > medians[1] > medians[2] > 0.0


def test_disk_zeros_and_critical_points_merge(golden):
    sizes = (50, 100, 200, 300)
    decreasing = 0
    for seed in (1, 2, 3):
        distances = []
        for n in sizes:
            f = random_roots_disk(n, seed=seed)
            crit = critical_points(f)
            _assert_certified(crit)
            distances.append(wasserstein1(empirical(aberth_roots(f)), empirical(crit)))
        assert distances[-1] <= 0.08
        if seed == 1:
            golden("disk_w1_zeros_vs_critical_n300_seed1", distances[-1])
        decreasing += all(a > b for a, b in zip(distances, distances[1:]))
    assert decreasing >= 2


def test_valiron_sandwich_with_full_circle_sampling(rng):
    t_grid = np.linspace(-1.0, 1.0, 9)
    for _ in range(50):
        degree = int(rng.integers(1, 201))
        f = explicit_coeffs(list(rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)))
        p = phi_profile(f, t_grid)
        for i, t in enumerate(t_grid):
            sampled = sampled_log_max_modulus(f, float(t))
            assert f.V * p.lower[i] - 0.001 <= sampled <= f.V * p.upper[i] + 1e-9
