import math

import pytest

from subgraph_detect.analytic import eta, rate_I
from subgraph_detect.boundaries import (
    CURVE_COLUMNS,
    boundary_curves,
    cc_subcritical_full_lambda1,
    cc_subcritical_lambda1,
    cc_supercritical_lambda1,
    ktree_lower_lambda1,
    no_test_lambda1,
    no_test_second_lambda1,
    total_degree_lambda1,
)
from subgraph_detect.errors import DomainError


def test_total_degree_contour():
    assert total_degree_lambda1(1.0, 10_000, 100) == pytest.approx(1.01)


def test_cc_subcritical_contours():
    N, n = 10_000, 50
    for l0 in (0.1, 0.5, 0.9):
        l1 = cc_subcritical_lambda1(l0, N, n)
        assert l0 < l1 < 1.0
        assert rate_I(l1) * math.log(N) == pytest.approx(rate_I(l0) * math.log(n), rel=1e-9)
        full = cc_subcritical_full_lambda1(l0, N, n)
        assert 0.0 < full <= 1.0
    assert cc_subcritical_lambda1(0.5, 100, 100) == 0.5
    with pytest.raises(DomainError):
        cc_subcritical_lambda1(1.5, N, n)


def test_cc_supercritical_contour():
    N = 10_000
    for l0 in (1.2, 1.5, 2.0):
        l1 = cc_supercritical_lambda1(l0, N, 1000)
        assert l1 > l0
        assert (eta(l0) - eta(l1)) * 1000 == pytest.approx(math.sqrt(N), rel=1e-6)
    # larger communities push the contour down towards lambda1 = lambda0
    assert cc_supercritical_lambda1(2.0, N, 5000) < cc_supercritical_lambda1(2.0, N, 1000)
    # a shift of sqrt(N) needs more than n vertices
    assert cc_supercritical_lambda1(2.0, N, 50) is None
    with pytest.raises(DomainError):
        cc_supercritical_lambda1(0.8, N, 1000)


def test_no_test_contours():
    assert no_test_lambda1(math.e) == pytest.approx(1.0)
    # kappa = 1/2 leaves no second frontier
    assert no_test_second_lambda1(0.5, 100, 10) is None
    second = no_test_second_lambda1(0.5, 10 ** 6, 20)
    if second is not None:
        assert no_test_lambda1(0.5) < second < 1.0


def test_ktree_lower_contour():
    assert ktree_lower_lambda1(3.0, 10 ** 6, 30) is None
    value = ktree_lower_lambda1(0.5, 10 ** 6, 30, points=200)
    if value is not None:
        assert no_test_lambda1(0.5) < value < 1.0


def test_poisson_curves():
    curves = boundary_curves("poisson", 10_000, 50)
    assert list(curves.columns) == CURVE_COLUMNS
    names = set(curves["curve_name"])
    assert {"total_degree", "broad_scan", "cc_subcritical", "cc_subcritical_full", "no_test"} <= names
    assert (curves.loc[curves["curve_name"] == "broad_scan", "lambda1"] == 1.0).all()
    sub = curves[curves["curve_name"] == "cc_subcritical"]
    assert (sub["lambda0"] < 1.0).all()


def test_sparse_and_polynomial_curves():
    sparse = boundary_curves("sparse", 10_000, 100, [0.01, 0.5, 2.0])
    kappa = math.log(100) / math.log(10_000)
    assert sparse["lambda1"].tolist() == pytest.approx([0.01 ** kappa, 0.5 ** kappa, 1.0])
    poly = boundary_curves("polynomial", 10_000, 100, [2.0, 50.0, 500.0])
    broad = poly[poly["curve_name"] == "broad_scan_polynomial"]
    assert broad["lambda0"].tolist() == [2.0, 50.0]
    alpha = math.log(2.0) / math.log(100)
    assert broad["lambda1"].iloc[0] == pytest.approx(1 / (1 - alpha))
    every = boundary_curves("all", 10_000, 100, [0.5])
    assert {"sparse", "broad_scan_polynomial", "no_test"} <= set(every["curve_name"])
    rich = boundary_curves("all", 10_000, 1000, [0.5, 2.0])
    sup = rich[rich["curve_name"] == "cc_supercritical"]
    assert (sup["lambda0"] == 2.0).all() and len(sup) == 2
    assert sup["lambda1"].iloc[0] == pytest.approx(cc_supercritical_lambda1(2.0, 10_000, 1000))


def test_boundary_curves_domain():
    with pytest.raises(DomainError):
        boundary_curves("dense", 100, 10)
    with pytest.raises(DomainError):
        boundary_curves("poisson", 100, 100)
