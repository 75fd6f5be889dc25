import math

import numpy as np
import pandas as pd
import pytest

from subgraph_detect.cache import LRUCache
from subgraph_detect.errors import DomainError, ParseError
from subgraph_detect.inference import (
    DIAGRAM_COLUMNS,
    TestSpec,
    broad_scan_signal,
    calibrate,
    cell_seeds,
    critical_value,
    diagram,
    power,
    risk,
    simulate_null,
)


def test_test_spec_parse_and_bind():
    spec = TestSpec.parse("scan mode=exact k=3")
    assert spec.label == "scan k=3 mode=exact"
    assert spec.param_dict == {"k": 3, "mode": "exact"}
    assert spec.integer_valued
    bound = TestSpec.parse("scan").bind(N=100, n=7)
    assert bound.param_dict["k"] == 7
    assert not TestSpec.parse("broad_scan").integer_valued
    with pytest.raises(ParseError):
        TestSpec.parse("density")
    with pytest.raises(DomainError):
        TestSpec("triangles", direction="less")


def test_critical_value():
    values = np.array([0.0] * 95 + [1.0] * 5)
    assert critical_value(values, 0.05) == (1.0, 0.05)
    assert critical_value(values, 0.01) == (2.0, 0.0)
    t, achieved = critical_value(values, 0.01, integer_valued=False)
    assert t > 1.0 and t == np.nextafter(1.0, 2.0) and achieved == 0.0
    assert critical_value(values, 1.0) == (-math.inf, 1.0)


def test_calibrate():
    spec = TestSpec.parse("triangles")
    cal = calibrate(spec, (200, 1 / 200), 0.05, 200, seed=4)
    assert cal.achieved_level <= 0.05
    assert cal.t >= 1
    assert cal == calibrate(spec, (200, 1 / 200), 0.05, 200, seed=4)
    assert cal.as_row()["test"] == "triangles"
    assert calibrate(spec, (200, 0.01), 1.0, 10, seed=0).t == -math.inf
    with pytest.raises(DomainError):
        calibrate(spec, (200, 0.01), 0.05, 50, seed=0)
    with pytest.raises(DomainError):
        calibrate(spec, (200, 0.01), 0.0, 200, seed=0)


def test_power_and_risk_shortcuts():
    spec = TestSpec.parse("total_degree")
    alt = (50, 0.1, 10, 0.5)
    assert power(spec, alt, -math.inf, 100, 0).power == 1.0
    assert power(spec, alt, math.inf, 100, 0).power == 0.0
    est = risk(spec, (50, 0.1), alt, math.inf, 100, 0)
    assert (est.type1, est.type2, est.risk) == (0.0, 1.0, 1.0)


def test_planted_dense_community_is_detected():
    spec = TestSpec.parse("triangles")
    null, alt = (200, 1 / 200), (200, 1 / 200, 20, 0.8)
    cal = calibrate(spec, null, 0.05, 200, seed=1)
    assert power(spec, alt, cal.t, 100, seed=2).power >= 0.95
    est = risk(spec, null, alt, cal.t, 200, seed=3)
    assert est.type1 <= 0.15 and est.risk <= 0.2


def test_simulation_is_independent_of_threads():
    spec = TestSpec.parse("largest_cc")
    one = simulate_null(spec, 100, 0.02, 24, seed=5, threads=1)
    two = simulate_null(spec, 100, 0.02, 24, seed=5, threads=2)
    np.testing.assert_array_equal(one, two)


def test_cell_seeds_share_calibration_along_row():
    assert cell_seeds(7, 0, 0, "triangles")[0] == cell_seeds(7, 0, 3, "triangles")[0]
    assert cell_seeds(7, 0, 0, "triangles")[1] != cell_seeds(7, 0, 3, "triangles")[1]
    assert cell_seeds(7, 0, 0, "triangles") != cell_seeds(7, 1, 0, "triangles")


def test_diagram_grid():
    specs = [TestSpec.parse("triangles"), TestSpec.parse("total_degree")]
    cache = LRUCache()
    grid = diagram((60, 10), [1.0], [0.1, 5.0], specs, 0.05, 100, seed=9, cache=cache)
    frame = grid.results_frame()
    assert list(frame.columns) == DIAGRAM_COLUMNS
    assert len(frame) == 4
    invalid = frame[frame["lambda1"] == 0.1]
    assert invalid[["t", "type1", "type2", "risk"]].isna().all().all()
    valid = frame[frame["lambda1"] == 5.0]
    assert valid["risk"].between(0.0, 2.0).all()
    assert cache.misses == 2
    assert not grid.curves.empty
    table = grid.risk_table("triangles")
    assert table.shape == (2, 1)


def test_diagram_single_cell_matches_its_grid_cell():
    specs = [TestSpec.parse("total_degree")]
    full = diagram((60, 10), [1.0], [3.0, 5.0], specs, 0.05, 100, seed=2, with_curves=False)
    one = diagram((60, 10), [1.0], [3.0], specs, 0.05, 100, seed=2, with_curves=False)
    row = full.results_frame().iloc[[0]].reset_index(drop=True)
    pd.testing.assert_frame_equal(row, one.results_frame(), check_dtype=False)


def test_diagram_domain():
    spec = [TestSpec.parse("triangles")]
    with pytest.raises(DomainError):
        diagram((60, 10), [], [1.0], spec, 0.05, 100, 0)
    with pytest.raises(DomainError):
        diagram((60, 10), [1.0], [20.0], spec, 0.05, 100, 0)
    with pytest.raises(DomainError):
        diagram((10, 60), [1.0], [1.0], spec, 0.05, 100, 0)


def test_broad_scan_signal():
    sig = broad_scan_signal(1000, 20, 0.002, 0.5, R=5, seed=1)
    assert sig.alpha == pytest.approx(math.log(2.0) / math.log(50.0))
    assert sig.k in sig.mean_density
    assert sig.value == pytest.approx((1 - sig.alpha) * sig.mean_density[sig.k])
    assert sig.value > 0


@pytest.mark.slow
def test_desk_scale_separation():
    N, n, l0, level, R = 5000, 70, 1.0, 0.05, 2000
    null = (N, l0 / N)
    for text in ("broad_scan mode=component", "largest_cc"):
        spec = TestSpec.parse(text).bind(N=N, n=n)
        cal = calibrate(spec, null, level, R, seed=1, threads=4)
        strong = power(spec, (N, l0 / N, n, 4.0 / n), cal.t, R, seed=2, threads=4)
        weak = power(spec, (N, l0 / N, n, 0.5 / n), cal.t, R, seed=3, threads=4)
        assert strong.power >= 0.9
        assert weak.power <= 0.15


def test_total_degree_power_grows_with_p1():
    spec = TestSpec.parse("total_degree")
    N, p0, n, R = 100, 0.02, 10, 400
    cal = calibrate(spec, (N, p0), 0.05, R, seed=21)
    estimates = [power(spec, (N, p0, n, p1), cal.t, R, seed=22) for p1 in (0.02, 0.1, 0.3, 0.6, 1.0)]
    for low, high in zip(estimates, estimates[1:]):
        assert high.power >= low.power - 3 * math.hypot(low.se, high.se)
    assert estimates[0].power <= 0.15 and estimates[-1].power >= 0.9


def test_triangle_critical_value_grows_along_diagram_row():
    specs = [TestSpec.parse("triangles")]
    grid = diagram((200, 20), [0.5, 1.0, 2.0], [5.0], specs, 0.05, 400, seed=11, with_curves=False)
    t = grid.results_frame().sort_values("lambda0")["t"].to_numpy()
    assert np.all(np.diff(t) >= 0)
    assert t[0] == 1 and t[1] == 2


@pytest.mark.slow
def test_planted_clique_is_separated_exactly():
    spec = TestSpec.parse("scan k=8 mode=exact")
    null, alt = (30, 0.05), (30, 0.05, 8, 1.0)
    cal = calibrate(spec, null, 0.05, 100, seed=31)
    assert power(spec, alt, cal.t, 100, seed=32).power == 1.0
    # an 8-clique in G(30, 0.05) has probability below 1e-29
    est = risk(spec, null, alt, math.comb(8, 2), 100, seed=33)
    assert (est.type1, est.type2, est.risk) == (0.0, 0.0, 0.0)


@pytest.mark.slow
def test_triangle_calibration_in_poisson_limit():
    # P(Poisson(1/6) >= 1) ~ 0.153 > 0.05 >= P(Poisson(1/6) >= 2) ~ 0.012
    cal = calibrate(TestSpec.parse("triangles"), (1000, 1 / 1000), 0.05, 20_000, seed=41, threads=4)
    assert cal.t == 2
    assert 0.005 <= cal.achieved_level <= 0.02
