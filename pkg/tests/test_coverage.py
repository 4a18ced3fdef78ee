import math

import numpy as np
import pytest

from raftguard.channel import NetworkParams, db_to_linear
from raftguard.coverage import (
    ORACLE_GRID,
    ORACLE_GRID_GAMMA,
    ORACLE_GRID_RHO_J,
    CoverageMethod,
    CoverageResult,
    coverage_dl,
    coverage_joint,
    coverage_ul,
    laplace_interference,
)
from raftguard.geometry import AnnulusRegion

RHO_J = 15.0 / (math.pi * 500.0**2)
ANNULUS = AnnulusRegion(0.0, 300.0)

# Laplace transform at r=100 m, beta=-20 dB, gamma=0.01, default jammer
# intensity, alpha=3, annulus (0, 300).  Pinned from the adaptive
# quadrature of the defining radial integral; a 5e6-trial Monte Carlo
# over jammer patterns and fading reproduced it to within 8e-6.
LAPLACE_REF = 0.996918587473064


def test_laplace_frozen_reference():
    val = laplace_interference(
        100.0, 0.01, 0.01, RHO_J, 3.0, ANNULUS, method="quadrature"
    )
    assert val == pytest.approx(LAPLACE_REF, abs=1e-10)


def test_oracle_grid_shape():
    assert len(ORACLE_GRID) == 108


def test_closed_form_matches_quadrature_on_grid():
    worst = 0.0
    for alpha, beta_db, annulus, r in ORACLE_GRID:
        beta = db_to_linear(beta_db)
        cf = laplace_interference(
            r, beta, ORACLE_GRID_GAMMA, ORACLE_GRID_RHO_J, alpha, annulus,
            method="closed_form",
        )
        quad = laplace_interference(
            r, beta, ORACLE_GRID_GAMMA, ORACLE_GRID_RHO_J, alpha, annulus,
            method="quadrature",
        )
        worst = max(worst, abs(cf - quad))
    assert worst <= 1e-8


def test_laplace_in_unit_interval():
    for alpha, beta_db, annulus, r in ORACLE_GRID[::7]:
        val = laplace_interference(
            r, db_to_linear(beta_db), 0.1, RHO_J, alpha, annulus
        )
        assert 0.0 < val <= 1.0


@pytest.mark.parametrize("which", ["beta", "rho_j", "r"])
def test_laplace_monotone_non_increasing(which):
    grids = {
        "beta": [(b, RHO_J, 100.0) for b in (1e-3, 1e-2, 1e-1, 1.0, 10.0)],
        "rho_j": [(0.01, s * RHO_J, 100.0) for s in (0.5, 1.0, 2.0, 4.0, 8.0)],
        "r": [(0.01, RHO_J, r) for r in (20.0, 50.0, 100.0, 200.0, 400.0)],
    }
    vals = [
        laplace_interference(r, beta, 0.01, rho, 3.0, AnnulusRegion(10.0, 60.0))
        for beta, rho, r in grids[which]
    ]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_laplace_trivial_limits():
    assert laplace_interference(100.0, 0.0, 0.01, RHO_J, 3.0, ANNULUS) == 1.0
    assert laplace_interference(100.0, 0.01, 0.01, 0.0, 3.0, ANNULUS) == 1.0


def test_closed_form_requires_positive_inner_radius():
    with pytest.raises(ValueError):
        laplace_interference(100.0, 0.01, 0.01, RHO_J, 3.0, ANNULUS, method="closed_form")


def test_auto_routes_zero_inner_through_quadrature():
    # annulus starting at the receiver still evaluates fine
    val = laplace_interference(100.0, 0.01, 0.01, RHO_J, 3.0, ANNULUS)
    assert 0.0 < val < 1.0


def test_laplace_rejects_bad_arguments():
    with pytest.raises(ValueError):
        laplace_interference(0.0, 0.01, 0.01, RHO_J, 3.0, ANNULUS)
    with pytest.raises(ValueError):
        laplace_interference(100.0, -0.01, 0.01, RHO_J, 3.0, ANNULUS)
    with pytest.raises(ValueError):
        laplace_interference(100.0, 0.01, 0.01, RHO_J, 2.0, ANNULUS)


# ---------------------------------------------------------------- coverage


def default_params(**kw):
    kw.setdefault("beta_dl_db", -20.0)
    kw.setdefault("beta_ul_db", -20.0)
    return NetworkParams(**kw)


def test_coverage_frozen_references():
    """Regression values pinned from an independent composition of the
    quadrature Laplace route with the typical-distance density."""
    res = coverage_joint(default_params())
    assert res.p_dl == pytest.approx(0.9949296786701333, abs=1e-6)
    assert res.p_ul == pytest.approx(0.9774667596210966, abs=1e-6)
    assert res.p_joint == pytest.approx(0.972510689060554, abs=1e-6)


def test_coverage_joint_is_product():
    res = coverage_joint(default_params(beta_dl_db=0.0, beta_ul_db=0.0))
    assert res.p_joint == res.p_dl * res.p_ul


def test_coverage_methods_agree():
    p = default_params(annulus=AnnulusRegion(50.0, 150.0))
    closed = coverage_joint(p, method="closed_form")
    quad = coverage_joint(p, method="quadrature")
    assert closed.method is CoverageMethod.CLOSED_FORM
    assert quad.method is CoverageMethod.QUADRATURE_ORACLE
    assert closed.p_joint == pytest.approx(quad.p_joint, abs=1e-6)


def test_coverage_without_jammers_is_one():
    res = coverage_joint(default_params(rho_j=0.0))
    assert res.p_dl == pytest.approx(1.0, abs=1e-8)
    assert res.p_ul == pytest.approx(1.0, abs=1e-8)
    assert res.p_joint == pytest.approx(1.0, abs=1e-8)


def test_coverage_decreases_with_threshold():
    vals = [coverage_joint(default_params(beta_dl_db=b, beta_ul_db=b)).p_joint
            for b in (-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_coverage_decreases_with_jammer_power():
    # raising jammer power scales the interference term up
    base = default_params()
    vals = [
        coverage_ul(NetworkParams(p_jammer_dbm=pj, beta_dl_db=-20.0, beta_ul_db=-20.0))
        for pj in (0.0, 5.0, 10.0, 15.0, 20.0)
    ]
    assert coverage_ul(base) == vals[2]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_coverage_decreases_with_jammer_intensity():
    lo = coverage_joint(default_params()).p_joint
    hi = coverage_joint(default_params(rho_j=2.0 * RHO_J)).p_joint
    assert hi < lo


def test_dl_beats_ul_at_equal_threshold():
    # the leader transmits stronger, so downlink tolerates more jamming
    res = coverage_joint(default_params())
    assert res.p_dl > res.p_ul


# ------------------------------------------------------------------ result


def test_result_rejects_inconsistent_joint():
    with pytest.raises(ValueError):
        CoverageResult(p_dl=0.9, p_ul=0.9, p_joint=0.5, method=CoverageMethod.CLOSED_FORM)


def test_result_rejects_out_of_range():
    with pytest.raises(ValueError):
        CoverageResult(p_dl=1.2, p_ul=0.9, p_joint=1.08, method=CoverageMethod.CLOSED_FORM)


def test_result_rejects_negative_ci():
    with pytest.raises(ValueError):
        CoverageResult(
            p_dl=0.5, p_ul=0.5, p_joint=0.25,
            method=CoverageMethod.MONTE_CARLO, ci_dl=-0.1,
        )
