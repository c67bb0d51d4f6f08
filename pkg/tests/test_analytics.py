import math

import numpy as np
import pytest

from rebitlab import analytics
from rebitlab.analytics import (
    boundary_c2_max,
    boundary_r_max,
    maximal_family_metrics,
    maximal_family_state,
    pure_concurrence_density,
    pure_entanglement_density_curve,
)
from rebitlab.entanglement import concurrence_cfr, eof_from_concurrence, participation_ratio
from rebitlab.states import SIGMA_YY

LN2 = math.log(2)

# mpmath (40 digits): 1 / (dE/dC) at selected concurrences
DENSITY_AT = {
    0.1: 2.304114234646931,
    0.3: 1.176242795121596,
    0.7: 0.7895946462462594,
    0.9: 0.7186340002306267,
    0.99: 0.6954794416168120,
}


def test_family_state_examples():
    np.testing.assert_array_equal(maximal_family_state(0.0).matrix, np.eye(4) / 4)
    w = np.linalg.eigvalsh(maximal_family_state(0.5).matrix)[::-1]
    np.testing.assert_allclose(w, [0.5, 0.5, 0, 0], atol=1e-15)
    w = np.linalg.eigvalsh(maximal_family_state(0.25).matrix)[::-1]
    np.testing.assert_allclose(w, [3 / 8, 3 / 8, 1 / 8, 1 / 8], atol=1e-15)
    with pytest.raises(ValueError):
        maximal_family_state(0.6)


@pytest.mark.parametrize("beta,expected", [(0.0, (0, 0, 4)), (0.5, (-1, 1, 2)), (-0.5, (1, 1, 2))])
def test_family_metrics_examples(beta, expected):
    assert maximal_family_metrics(beta) == pytest.approx(expected, abs=1e-15)


def test_family_metrics_match_direct_evaluation():
    for k in range(101):
        beta = (k - 50) / 100
        rho = maximal_family_state(beta).matrix
        expect, c2, r = maximal_family_metrics(beta)
        assert np.trace(rho @ SIGMA_YY) == pytest.approx(expect, abs=1e-12)
        assert concurrence_cfr(rho) ** 2 == pytest.approx(c2, abs=1e-12)
        assert participation_ratio(rho) == pytest.approx(r, abs=1e-12)


def test_boundary_examples():
    assert boundary_r_max(0.0) == 4.0
    assert boundary_r_max(1.0) == 2.0
    assert boundary_r_max(1 / 3) == pytest.approx(3.0, abs=1e-15)
    assert boundary_c2_max(1.5) == 1.0
    assert boundary_c2_max(2.0) == 1.0
    assert boundary_c2_max(4.0) == 0.0
    with pytest.raises(ValueError):
        boundary_c2_max(0.9)
    with pytest.raises(ValueError):
        boundary_r_max(1.2)


def test_boundary_shape():
    c2 = np.linspace(0, 1, 1001)
    r = np.array([boundary_r_max(x) for x in c2])
    assert np.all(np.diff(r) < 0)
    assert r.min() >= 2 and r.max() <= 4
    np.testing.assert_allclose(boundary_c2_max(r), c2, atol=1e-12)
    left = boundary_c2_max(2.0 - 1e-12)
    right = boundary_c2_max(2.0 + 1e-12)
    assert abs(left - right) < 1e-11


def test_pure_concurrence_density():
    for c in (0.0, 0.5, 1.0):
        assert pure_concurrence_density(c) == 1.0
    with pytest.raises(ValueError):
        pure_concurrence_density(1.5)


def test_density_curve_endpoint_and_shape():
    curve = pure_entanglement_density_curve(1000)
    assert curve[-1].abscissa == 1.0
    assert abs(curve[-1].ordinate - LN2) <= 1e-9
    e = np.array([p.abscissa for p in curve])
    d = np.array([p.ordinate for p in curve])
    assert np.all(np.diff(e) > 0)
    assert np.all(d > 0) and np.all(np.isfinite(d))
    assert curve[499].abscissa == pytest.approx(0.3545789026652699, abs=1e-12)
    with pytest.raises(ValueError):
        pure_entanglement_density_curve(1)


def test_density_against_finite_differences():
    c = np.linspace(0.01, 0.999, 400)
    h = 1e-6
    fd = (eof_from_concurrence(c + h) - eof_from_concurrence(c - h)) / (2 * h)
    closed = analytics.eof_derivative(c)
    np.testing.assert_allclose(closed, fd, rtol=1e-7)
    np.testing.assert_allclose(analytics.pure_entanglement_density(c) * np.abs(closed), 1.0, atol=1e-10)


@pytest.mark.parametrize("c", sorted(DENSITY_AT))
def test_density_against_high_precision(c):
    assert analytics.pure_entanglement_density(c) == pytest.approx(DENSITY_AT[c], rel=1e-12)


def test_density_approaches_ln2_continuously():
    assert analytics.pure_entanglement_density(1 - 1e-12) == pytest.approx(LN2, abs=1e-9)


def test_density_integrates_to_one():
    curve = np.array(pure_entanglement_density_curve(10_000))
    integral = np.trapezoid(curve[:, 1], curve[:, 0])
    assert integral == pytest.approx(1.0, abs=1e-3)


def test_concurrence_from_eof_inverts():
    for c in (0.0, 0.1, 0.5, 0.9, 1.0):
        assert analytics.concurrence_from_eof(float(eof_from_concurrence(c))) == pytest.approx(c, abs=1e-9)
