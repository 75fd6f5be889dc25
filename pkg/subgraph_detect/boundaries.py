# boundaries.py: finite-N contours of the detection boundaries, emitted as
# (curve_name, lambda0, lambda1) rows for overlay on a detection diagram.

from __future__ import annotations

import math
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import optimize

from subgraph_detect.analytic import eta, ktree_constant_interval, rate_I
from subgraph_detect.errors import DomainError

CURVE_COLUMNS = ["curve_name", "lambda0", "lambda1"]
REGIMES = ("poisson", "polynomial", "sparse", "all")
KTREE_SCAN_POINTS = 2000
_EDGE = 1e-12


def default_lambda0_grid(regime: str) -> np.ndarray:
    if regime == "polynomial":
        return np.geomspace(1.05, 50.0, 200)
    if regime == "sparse":
        return np.geomspace(1e-3, 1e3, 241)
    return np.geomspace(0.02, 5.0, 241)


def _check_sizes(N: int, n: int) -> None:
    if not (2 <= n < N):
        raise DomainError(f"boundary curves require 2 <= n < N, got n={n!r}, N={N!r}")


# --------------------------- Individual contours ---------------------------

def total_degree_lambda1(lambda0: float, N: int, n: int) -> float:
    """zeta = 1 solved for lambda1: lambda0 n/N + sqrt(lambda0 N)/n."""
    return lambda0 * n / N + math.sqrt(lambda0 * N) / n


def cc_subcritical_lambda1(lambda0: float, N: int, n: int) -> float:
    """Subcritical community size at which I_{lambda1} log N = I_{lambda0} log n, lambda0 <= lambda1 < 1."""
    if not (0.0 < lambda0 < 1.0):
        raise DomainError(f"subcritical contour requires 0 < lambda0 < 1, got {lambda0!r}")
    if not (2 <= n <= N):
        raise DomainError(f"need 2 <= n <= N, got n={n!r}, N={N!r}")
    if n == N:
        return lambda0
    target = rate_I(lambda0) * math.log(n) / math.log(N)
    return optimize.brentq(lambda x: rate_I(x) - target, lambda0, 1.0 - _EDGE, xtol=1e-14)


def cc_subcritical_full_lambda1(lambda0: float, N: int, n: int) -> float:
    """Contour of lambda0 + x - lambda0 e^x = I_{lambda0} log n / log N with x = I_{lambda1}, lambda1 < 1."""
    if not (0.0 < lambda0 < 1.0):
        raise DomainError(f"subcritical contour requires 0 < lambda0 < 1, got {lambda0!r}")
    _check_sizes(N, n)
    target = rate_I(lambda0) * math.log(n) / math.log(N)
    x_max = -math.log(lambda0)
    x = optimize.brentq(lambda s: lambda0 + s - lambda0 * math.exp(s) - target, 0.0, x_max, xtol=1e-14)
    if x <= 0.0:
        return 1.0
    return optimize.brentq(lambda v: rate_I(v) - x, _EDGE, 1.0, xtol=1e-14)


def cc_supercritical_lambda1(lambda0: float, N: int, n: int) -> Optional[float]:
    """Supercritical lambda0 > 1: lambda1 whose community giant lifts |C_max| by sqrt(N).

    Solves (eta_{lambda0} - eta_{lambda1}) n = sqrt(N), inverting the fixed
    point as lambda = log(eta)/(eta - 1). None when even eta_{lambda1} = 0
    falls short. Tends to lambda1 = lambda0 once n^2/N grows.
    """
    if lambda0 <= 1.0:
        raise DomainError(f"supercritical contour requires lambda0 > 1, got {lambda0!r}")
    _check_sizes(N, n)
    target = eta(lambda0) - math.sqrt(N) / n
    if target <= 0.0:
        return None
    return math.log(target) / (target - 1.0)


def no_test_lambda1(lambda0: float) -> float:
    """lambda1^2 e = lambda0: below this no test is powerful."""
    return math.sqrt(lambda0 / math.e)


def no_test_second_lambda1(lambda0: float, N: int, n: int) -> Optional[float]:
    """Root of (1-2k)/k * I_{lambda1} / log(e lambda1^2/lambda0) = 1 with k = log n/log N; None when absent."""
    _check_sizes(N, n)
    kappa = math.log(n) / math.log(N)
    if kappa >= 0.5 or lambda0 >= math.e:
        return None
    factor = (1.0 - 2.0 * kappa) / kappa
    lo = no_test_lambda1(lambda0)

    def g(v: float) -> float:
        return factor * rate_I(v) - math.log(math.e * v * v / lambda0)

    a, b = lo * (1.0 + 1e-12) + _EDGE, 1.0 - _EDGE
    if g(a) <= 0.0 or g(b) >= 0.0:
        return None
    return optimize.brentq(g, a, b, xtol=1e-14)


def ktree_lower_lambda1(lambda0: float, N: int, n: int, points: int = KTREE_SCAN_POINTS) -> Optional[float]:
    """Smallest lambda1 in (sqrt(lambda0/e), 1) where the k-tree test condition holds, on a grid."""
    lo = no_test_lambda1(lambda0)
    if lo >= 1.0:
        return None
    for v in np.linspace(lo, 1.0, points + 2)[1:-1]:
        if ktree_constant_interval(N, n, lambda0, float(v)) is not None:
            return float(v)
    return None


# --------------------------- Curve sets ---------------------------

def _rows(name: str, lambda0s: Iterable[float], fn: Callable[[float], Optional[float]]) -> List[Dict]:
    rows = []
    for l0 in lambda0s:
        l1 = fn(float(l0))
        if l1 is not None and math.isfinite(l1):
            rows.append({"curve_name": name, "lambda0": float(l0), "lambda1": float(l1)})
    return rows


def _poisson(N: int, n: int, grid: Sequence[float]) -> List[Dict]:
    sub = [x for x in grid if x < 1.0]
    below_e = [x for x in grid if x < math.e]
    rows = []
    rows += _rows("total_degree", grid, lambda l0: total_degree_lambda1(l0, N, n))
    rows += _rows("broad_scan", grid, lambda l0: 1.0)
    rows += _rows("cc_subcritical", sub, lambda l0: cc_subcritical_lambda1(l0, N, n))
    rows += _rows("cc_subcritical_full", sub, lambda l0: cc_subcritical_full_lambda1(l0, N, n))
    rows += _rows("cc_supercritical", [x for x in grid if x > 1.0], lambda l0: cc_supercritical_lambda1(l0, N, n))
    rows += _rows("no_test", below_e, no_test_lambda1)
    rows += _rows("no_test_second", below_e, lambda l0: no_test_second_lambda1(l0, N, n))
    rows += _rows("ktree_lower", below_e, lambda l0: ktree_lower_lambda1(l0, N, n))
    return rows


def _polynomial(N: int, n: int, grid: Sequence[float]) -> List[Dict]:
    scale = math.log(N / n)

    def broad(l0: float) -> Optional[float]:
        alpha = math.log(l0) / scale
        return 1.0 / (1.0 - alpha) if 0.0 < alpha < 1.0 else None

    rows = _rows("total_degree", grid, lambda l0: total_degree_lambda1(l0, N, n))
    rows += _rows("broad_scan_polynomial", grid, broad)
    rows += _rows("cc_supercritical", [x for x in grid if x > 1.0], lambda l0: cc_supercritical_lambda1(l0, N, n))
    return rows


def _sparse(N: int, n: int, grid: Sequence[float]) -> List[Dict]:
    kappa = math.log(n) / math.log(N)
    return _rows("sparse", grid, lambda l0: l0 ** kappa if l0 < 1.0 else 1.0)


_REGIME_BUILDERS = {"poisson": _poisson, "polynomial": _polynomial, "sparse": _sparse}


def boundary_curves(regime: str, N: int, n: int, lambda0_grid: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """Contour points of the detection boundaries for one regime (or ``all``)."""
    if regime not in REGIMES:
        raise DomainError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    _check_sizes(N, n)
    rows: List[Dict] = []
    for name in (_REGIME_BUILDERS if regime == "all" else [regime]):
        grid = default_lambda0_grid(name) if lambda0_grid is None else lambda0_grid
        rows += _REGIME_BUILDERS[name](N, n, [float(x) for x in grid if x > 0])
    return pd.DataFrame(rows, columns=CURVE_COLUMNS)
