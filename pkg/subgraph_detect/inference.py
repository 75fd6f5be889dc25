# inference.py: Monte-Carlo engine: null/alternative simulation, critical
# values, power, risk, and (lambda0, lambda1) detection diagrams.

from __future__ import annotations

import logging
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from subgraph_detect.boundaries import boundary_curves
from subgraph_detect.bridge import get_entry, parse_statistic_spec, resolve_params
from subgraph_detect.cache import LRUCache
from subgraph_detect.errors import DomainError
from subgraph_detect.graphs import gen_er, gen_planted
from subgraph_detect.hashing import derive_seed, sha256_json
from subgraph_detect.statistics import ComponentScanner, broad_scan_range, scan

log = logging.getLogger(__name__)

MIN_REPLICATES = 100
DIAGRAM_COLUMNS = ["lambda0", "lambda1", "test", "t", "type1", "type2", "risk", "R", "seed"]
CALIBRATION_COLUMNS = ["test", "N", "p0", "level", "t", "achieved_level", "R", "seed"]

__all__ = [
    "TestSpec", "CalibrationResult", "PowerEstimate", "RiskEstimate", "DiagramGrid",
    "simulate_null", "simulate_alternative", "calibrate", "power", "risk", "diagram",
    "cell_seeds", "broad_scan_signal", "boundary_curves",
]


# --------------------------- Types ---------------------------

@dataclass(frozen=True)
class TestSpec:
    """A registered statistic with bound parameters; the test rejects for large values."""
    __test__ = False  # not a pytest class

    name: str
    params: Tuple[Tuple[str, Any], ...] = ()
    direction: str = "greater"

    def __post_init__(self):
        get_entry(self.name)
        if self.direction != "greater":
            raise DomainError(f"only tests rejecting for large values are supported, got {self.direction!r}")

    @classmethod
    def parse(cls, text: str) -> "TestSpec":
        name, params = parse_statistic_spec(text)
        return cls.of(name, **params)

    @classmethod
    def of(cls, name: str, **params: Any) -> "TestSpec":
        resolved = resolve_params(name, params, require=False)
        return cls(name, tuple(sorted(resolved.items())))

    @property
    def param_dict(self) -> Dict[str, Any]:
        return dict(self.params)

    @property
    def integer_valued(self) -> bool:
        return get_entry(self.name).integer_valued

    @property
    def label(self) -> str:
        return " ".join([self.name] + [f"{k}={v}" for k, v in self.params])

    def bind(self, **context: Any) -> "TestSpec":
        """Fill parameters the experiment determines (k = n for scan, the k-tree size, ...)."""
        resolved = resolve_params(self.name, self.param_dict, context)
        return replace(self, params=tuple(sorted(resolved.items())))

    def evaluate(self, g) -> float:
        entry = get_entry(self.name)
        return entry.func(g, **resolve_params(self.name, self.param_dict))


@dataclass(frozen=True)
class CalibrationResult:
    t: float
    level: float
    achieved_level: float
    R: int
    seed: int
    test: str = ""
    N: int = 0
    p0: float = 0.0

    def as_row(self) -> Dict[str, Any]:
        return {"test": self.test, "N": self.N, "p0": self.p0, "level": self.level, "t": self.t,
                "achieved_level": self.achieved_level, "R": self.R, "seed": self.seed}


@dataclass(frozen=True)
class PowerEstimate:
    power: float
    se: float
    R: int


@dataclass(frozen=True)
class RiskEstimate:
    type1: float
    type2: float
    se_type1: float
    se_type2: float
    R: int

    @property
    def risk(self) -> float:
        return self.type1 + self.type2


@dataclass
class DiagramGrid:
    N: int
    n: int
    lambda0s: List[float]
    lambda1s: List[float]
    tests: List[str]
    frame: pd.DataFrame
    curves: pd.DataFrame = field(default_factory=lambda: pd.DataFrame(columns=["curve_name", "lambda0", "lambda1"]))

    def results_frame(self) -> pd.DataFrame:
        """Rows in the stable CSV schema."""
        return self.frame[DIAGRAM_COLUMNS].copy()

    def risk_table(self, test: str) -> pd.DataFrame:
        sub = self.frame[self.frame["test"] == test]
        return sub.pivot(index="lambda1", columns="lambda0", values="risk")


# --------------------------- Replicate engine ---------------------------

def _null_replicate(args: Tuple[TestSpec, int, float, int]) -> float:
    spec, N, p0, rep_seed = args
    return float(spec.evaluate(gen_er(N, p0, rep_seed)))


def _alt_replicate(args: Tuple[TestSpec, int, float, int, float, int]) -> float:
    spec, N, p0, n, p1, rep_seed = args
    return float(spec.evaluate(gen_planted(N, p0, n, p1, rep_seed).graph))


def _map_replicates(fn: Callable, jobs: List[tuple], threads: int, executor: Optional[Executor]) -> np.ndarray:
    # executor.map keeps job order, so results never depend on the worker count
    if executor is not None:
        return np.fromiter(executor.map(fn, jobs, chunksize=max(1, len(jobs) // 64)), dtype=float, count=len(jobs))
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return np.fromiter(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))),
                               dtype=float, count=len(jobs))
    return np.fromiter((fn(job) for job in jobs), dtype=float, count=len(jobs))


def simulate_null(spec: TestSpec, N: int, p0: float, R: int, seed: int,
                  threads: int = 1, executor: Optional[Executor] = None) -> np.ndarray:
    """Statistic values on R draws of G(N, p0); replicate r uses derive_seed(seed, r)."""
    jobs = [(spec, N, p0, derive_seed(seed, r)) for r in range(R)]
    log.debug("null simulation %s N=%d p0=%g R=%d", spec.label, N, p0, R)
    return _map_replicates(_null_replicate, jobs, threads, executor)


def simulate_alternative(spec: TestSpec, N: int, p0: float, n: int, p1: float, R: int, seed: int,
                         threads: int = 1, executor: Optional[Executor] = None) -> np.ndarray:
    """Statistic values on R planted instances with a uniformly drawn community."""
    jobs = [(spec, N, p0, n, p1, derive_seed(seed, r)) for r in range(R)]
    log.debug("alternative simulation %s N=%d n=%d p0=%g p1=%g R=%d", spec.label, N, n, p0, p1, R)
    return _map_replicates(_alt_replicate, jobs, threads, executor)


# --------------------------- Calibration / power / risk ---------------------------

def critical_value(values: np.ndarray, level: float, integer_valued: bool = True) -> Tuple[float, float]:
    """Smallest observed t with empirical P(stat >= t) <= level, and that achieved level.

    When no observed value qualifies the threshold sits just above the maximum,
    so the test never rejects on the simulated sample.
    """
    R = values.size
    if level >= 1.0:
        return -math.inf, 1.0
    uniq, counts = np.unique(values, return_counts=True)
    tail = np.cumsum(counts[::-1])[::-1] / R
    ok = np.flatnonzero(tail <= level)
    if ok.size:
        i = int(ok[0])
        return float(uniq[i]), float(tail[i])
    top = float(uniq[-1])
    return (top + 1.0 if integer_valued else float(np.nextafter(top, math.inf))), 0.0


def _check_R(R: int) -> None:
    if R < MIN_REPLICATES:
        raise DomainError(f"need at least {MIN_REPLICATES} replicates, got R={R!r}")


def calibrate(spec: TestSpec, null: Tuple[int, float], level: float, R: int, seed: int,
              threads: int = 1, executor: Optional[Executor] = None) -> CalibrationResult:
    N, p0 = null
    if not level > 0.0:
        raise DomainError(f"level must be positive, got {level!r}")
    if level >= 1.0:
        return CalibrationResult(-math.inf, level, 1.0, R, seed, spec.label, N, p0)
    _check_R(R)
    values = simulate_null(spec, N, p0, R, seed, threads, executor)
    t, achieved = critical_value(values, level, spec.integer_valued)
    log.info("calibrated %s at N=%d p0=%g: t=%g (achieved %.4f <= %.4f)", spec.label, N, p0, t, achieved, level)
    return CalibrationResult(t, level, achieved, R, seed, spec.label, N, p0)


def _binomial_se(p: float, R: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / R)


def power(spec: TestSpec, alt: Tuple[int, float, int, float], t: float, R: int, seed: int,
          threads: int = 1, executor: Optional[Executor] = None) -> PowerEstimate:
    """Fraction of planted replicates with statistic >= t; uniform S covers the worst case by label symmetry."""
    if t == -math.inf:
        return PowerEstimate(1.0, 0.0, R)
    if t == math.inf:
        return PowerEstimate(0.0, 0.0, R)
    _check_R(R)
    N, p0, n, p1 = alt
    values = simulate_alternative(spec, N, p0, n, p1, R, seed, threads, executor)
    estimate = float(np.mean(values >= t))
    return PowerEstimate(estimate, _binomial_se(estimate, R), R)


def risk(spec: TestSpec, null: Tuple[int, float], alt: Tuple[int, float, int, float], t: float,
         R: int, seed: int, threads: int = 1, executor: Optional[Executor] = None) -> RiskEstimate:
    """Empirical type-I error plus type-II error, on independent null and planted streams."""
    N, p0 = null
    if math.isinf(t):
        type1 = 1.0 if t < 0 else 0.0
        return RiskEstimate(type1, 1.0 - type1, 0.0, 0.0, R)
    _check_R(R)
    null_values = simulate_null(spec, N, p0, R, derive_seed(seed, "null"), threads, executor)
    type1 = float(np.mean(null_values >= t))
    pw = power(spec, alt, t, R, derive_seed(seed, "alt"), threads, executor)
    return RiskEstimate(type1, 1.0 - pw.power, _binomial_se(type1, R), pw.se, R)


# --------------------------- Diagram ---------------------------

def cell_seeds(master: int, i0: int, i1: int, test: str) -> Tuple[int, int]:
    """(calibration seed, risk seed) of diagram cell (i0, i1); the calibration seed is shared along the row."""
    return derive_seed(master, "calibrate", i0, test), derive_seed(master, "risk", i0, i1, test)


def _invalid_row(l0: float, l1: float, test: str, R: int, seed: int) -> Dict[str, Any]:
    nan = float("nan")
    return {"lambda0": l0, "lambda1": l1, "test": test, "t": nan, "type1": nan, "type2": nan,
            "risk": nan, "R": R, "seed": seed, "power": nan, "calibration_seed": None, "valid": False}


def diagram(fixed: Tuple[int, int], lambda0s: Sequence[float], lambda1s: Sequence[float],
            specs: Sequence[TestSpec], level: float, R: int, seed: int,
            threads: int = 1, ktree_c: Optional[float] = None,
            cache: Optional[LRUCache] = None, with_curves: bool = True) -> DiagramGrid:
    """Calibrated risk of every test on every (lambda0, lambda1) cell.

    Cells with p1 < p0 are listed but not computed. Every number depends only
    on (seed, grid, R), never on ``threads``.
    """
    N, n = fixed
    if not lambda0s or not lambda1s or not specs:
        raise DomainError("diagram needs a nonempty lambda0 grid, lambda1 grid and test list")
    if not (2 <= n <= N):
        raise DomainError(f"diagram requires 2 <= n <= N, got n={n!r}, N={N!r}")
    for l0 in lambda0s:
        if not (0.0 < l0 <= N):
            raise DomainError(f"lambda0={l0!r} gives p0 outside (0, 1]")
    for l1 in lambda1s:
        if not (0.0 < l1 <= n):
            raise DomainError(f"lambda1={l1!r} gives p1 outside (0, 1]")
    cache = cache if cache is not None else LRUCache(capacity=max(64, len(specs) * len(lambda1s)))

    rows: List[Dict[str, Any]] = []
    executor = ProcessPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for i0, l0 in enumerate(lambda0s):
            p0 = l0 / N
            for i1, l1 in enumerate(lambda1s):
                p1 = l1 / n
                for spec in specs:
                    bound = spec.bind(N=N, n=n, lambda0=l0, lambda1=l1, ktree_c=ktree_c)
                    cal_seed, risk_seed = cell_seeds(seed, i0, i1, spec.label)
                    if p1 < p0:
                        rows.append(_invalid_row(l0, l1, spec.label, R, risk_seed))
                        continue
                    key = sha256_json({"test": bound.label, "N": N, "p0": p0, "level": level, "R": R, "seed": cal_seed})
                    cal = cache.get_or_compute(
                        key, lambda: calibrate(bound, (N, p0), level, R, cal_seed, threads, executor)
                    )
                    est = risk(bound, (N, p0), (N, p0, n, p1), cal.t, R, risk_seed, threads, executor)
                    rows.append({
                        "lambda0": l0, "lambda1": l1, "test": spec.label, "t": cal.t,
                        "type1": est.type1, "type2": est.type2, "risk": est.risk, "R": R, "seed": risk_seed,
                        "power": 1.0 - est.type2, "calibration_seed": cal_seed, "valid": True,
                    })
            log.info("diagram row lambda0=%g done (%d/%d)", l0, i0 + 1, len(lambda0s))
    finally:
        if executor is not None:
            executor.shutdown()
    log.debug("calibration cache: %d hits, %d misses", cache.hits, cache.misses)

    frame = pd.DataFrame(rows)
    curves = boundary_curves("poisson", N, n, lambda0s) if with_curves and n < N else None
    grid = DiagramGrid(N=N, n=n, lambda0s=list(lambda0s), lambda1s=list(lambda1s),
                       tests=[s.label for s in specs], frame=frame)
    if curves is not None:
        grid.curves = curves
    return grid


# --------------------------- Broad-scan signal ---------------------------

@dataclass(frozen=True)
class BroadScanSignal:
    value: float
    k: int
    alpha: float
    mean_density: Dict[int, float]


def broad_scan_signal(N: int, n: int, p0: float, p1: float, R: int, seed: int,
                      mode: str = "component") -> BroadScanSignal:
    """(1 - alpha) * max_k E_S[W*_{k,S}]/k over the broad-scan range, W*_{k,S} scanned inside G(n, p1)."""
    if not (2 <= n < N) or not (0.0 < p0 <= p1 <= 1.0):
        raise DomainError(f"invalid broad-scan signal parameters N={N!r}, n={n!r}, p0={p0!r}, p1={p1!r}")
    k_lo, k_hi = broad_scan_range(N, n)
    ks = list(range(k_lo, k_hi + 1))
    totals = np.zeros(len(ks))
    for r in range(R):
        g = gen_er(n, p1, derive_seed(seed, r))
        if mode == "component":
            scanner = ComponentScanner(g)
            values = [scanner.best(k).value if k < n else g.num_edges for k in ks]
        else:
            values = [scan(g, k, mode=mode).value for k in ks]
        totals += np.asarray(values, dtype=float)
    means = totals / R
    density = means / np.asarray(ks, dtype=float)
    best = int(np.argmax(density))
    alpha = math.log(N * p0) / math.log(N / n)
    return BroadScanSignal(
        value=(1.0 - alpha) * float(density[best]), k=ks[best], alpha=alpha,
        mean_density={k: float(d) for k, d in zip(ks, density)},
    )
