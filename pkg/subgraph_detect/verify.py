# verify.py: oracle and invariant battery. Each check compares a fast
# implementation with an enumeration oracle, an exact identity or a CLT band.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Tuple

import numpy as np
from scipy import stats

from subgraph_detect import analytic
from subgraph_detect.combinatorics import (
    cayley_forest_bound,
    count_trees_containing,
    enumerate_labelled_trees,
    forest_counts,
    labelled_tree_count,
    nonisomorphic_trees,
    trees_containing_forest,
    trees_containing_tree,
)
from subgraph_detect.errors import DomainError
from subgraph_detect.graphs import Graph, count_simple_cycles, gen_er
from subgraph_detect.hashing import derive_seed
from subgraph_detect.likelihood import (
    TruncationEvent,
    exhaustive_moments,
    mc_event_probability,
    risk_lower_bound,
    second_moment_hypergeometric,
)
from subgraph_detect.statistics import (
    broad_scan,
    broad_scan_range,
    brute_force_ktrees,
    brute_force_scan,
    ktree_count,
    largest_cc,
    scan,
    triangles,
)

log = logging.getLogger(__name__)

SCALES = ("quick", "full")


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class VerifyReport:
    scale: str
    seed: int
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(r.ok for r in self.results)

    @property
    def failed(self) -> int:
        return len(self.results) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def text(self) -> str:
        lines = [f"🔍 Verification battery (scale={self.scale}, seed={self.seed})"]
        for r in self.results:
            mark = "✅" if r.ok else "❌"
            lines.append(f"{mark} {r.name}" + (f": {r.detail}" if r.detail else ""))
        lines.append(f"📈 {self.passed} passed, {self.failed} failed")
        return "\n".join(lines)


Check = Callable[[str, int], Tuple[bool, str]]


# ---- combinatorics ----

def _check_cayley(scale: str, seed: int) -> Tuple[bool, str]:
    top = 8 if scale == "full" else 7
    bad = [l for l in range(1, top + 1) if sum(1 for _ in enumerate_labelled_trees(l)) != labelled_tree_count(l)]
    return not bad, f"l <= {top}" + (f", mismatch at {bad}" if bad else "")


def _check_trees_containing(scale: str, seed: int) -> Tuple[bool, str]:
    top = 7 if scale == "full" else 6
    checked = 0
    for l in range(2, top + 1):
        for k in range(1, l + 1):
            # every unlabelled tree shape, embedded on the first k vertices
            shapes = nonisomorphic_trees(k) if scale == "full" or k <= 5 else [
                frozenset((i, i + 1) for i in range(k - 1))
            ]
            for shape in shapes:
                if count_trees_containing(shape, l) != trees_containing_tree(k, l):
                    return False, f"k={k}, l={l}, tree={sorted(shape)}"
                checked += 1
    return True, f"{checked} embedded trees, l <= {top}"


def _check_forest_counts(scale: str, seed: int) -> Tuple[bool, str]:
    top = 8 if scale == "full" else 6
    for k in range(1, top + 1):
        table = forest_counts(k)
        cayley = labelled_tree_count(k)
        if table[1] != cayley or table[k] != 1:
            return False, f"k={k}: endpoints {table[1]}, {table[k]}"
        if any(table[j] < table[j + 1] for j in range(1, k)) or max(table.counts) > cayley:
            return False, f"k={k}: {table.counts}"
    return True, f"k <= {top}"


def _check_forest_bound(scale: str, seed: int) -> Tuple[bool, str]:
    top = 7 if scale == "full" else 6
    checked = 0
    for l in range(3, top + 1):
        for r in (1, 2, 3):
            for sizes in _size_tuples(r, l):
                # paths on consecutive blocks of vertices
                edges, start = [], 0
                for s in sizes:
                    edges += [(start + i, start + i + 1) for i in range(s - 1)]
                    start += s
                exact = count_trees_containing(edges, l)
                if exact != trees_containing_forest(sizes, l) or exact > cayley_forest_bound(sizes, l) + 1e-9:
                    return False, f"sizes={sizes}, l={l}: {exact}"
                checked += 1
    return True, f"{checked} forests"


def _size_tuples(r: int, l: int):
    """Ordered tree sizes (k_1..k_r), all >= 1, with k_1 + ... + k_r <= l."""
    if r == 1:
        yield from ((s,) for s in range(1, l + 1))
        return
    for s in range(1, l - r + 2):
        yield from ((s,) + rest for rest in _size_tuples(r - 1, l - s))


# ---- analytic ----

def _check_eta(scale: str, seed: int) -> Tuple[bool, str]:
    lams = np.geomspace(1.0001, 100.0, 400 if scale == "full" else 80)
    etas = [analytic.eta(float(x)) for x in lams]
    residual = max(abs(e - math.exp(x * (e - 1.0))) for x, e in zip(lams, etas))
    below = all(e < 1.0 / x for x, e in zip(lams, etas))
    f = [x * (1.0 + e) for x, e in zip(lams, etas)]
    increasing = all(b > a for a, b in zip(f, f[1:]))
    return residual < 1e-12 and below and increasing, f"max residual {residual:.2e}"


def _check_entropy(scale: str, seed: int) -> Tuple[bool, str]:
    side = 100 if scale == "full" else 30
    grid = np.linspace(0.001, 0.9, side)
    worst = 0.0
    for p in grid:
        for q in grid:
            if p > q:
                continue
            gap = analytic.entropy_gap(float(q), float(p))
            direct = analytic.kl_bernoulli(q, p) - p * analytic.h(q / p)
            if abs(gap - direct) > 1e-10 or gap < -1e-12 or gap > 2 * q * q / (1 - q) + 1e-12:
                return False, f"p={p:.4f}, q={q:.4f}, gap={gap:.3e}"
            worst = max(worst, gap)
    return True, f"{side * (side + 1) // 2} pairs"


def _check_legendre(scale: str, seed: int) -> Tuple[bool, str]:
    grid = np.linspace(0.01, 0.98, 60 if scale == "full" else 20)
    worst = max(analytic.legendre_residual(float(q), float(p)) for p in grid for q in grid if q > p)
    tilts = max(abs(analytic.tilt(float(p), float(q)).Delta - analytic.delta_via_cgf(float(p), float(q)))
                for p in grid for q in grid if q > p)
    return worst < 1e-12 and tilts < 1e-12, f"duality {worst:.1e}, Delta {tilts:.1e}"


def _check_chernoff(scale: str, seed: int) -> Tuple[bool, str]:
    grid = np.linspace(0.05, 0.95, 19)
    for n in range(1, 31):
        for p in grid:
            for q in grid:
                if q < p:
                    continue
                if analytic.chernoff_tail(n, float(p), float(q)) < analytic.exact_binomial_tail(n, float(p), float(q)) - 1e-12:
                    return False, f"n={n}, p={p:.2f}, q={q:.2f}"
    return True, "n <= 30"


def _check_binomial_bounds(scale: str, seed: int) -> Tuple[bool, str]:
    top = 60 if scale == "full" else 30
    for n in range(1, top + 1):
        for k in range(1, n + 1):
            lo, hi = analytic.binomial_bounds(n, k)
            exact = math.comb(n, k)
            if lo > exact * (1 + 1e-9) or exact > hi * (1 + 1e-9):
                return False, f"C({n},{k})={exact} outside [{lo:.6g}, {hi:.6g}]"
    return True, f"n <= {top}"


def _check_hypergeom(scale: str, seed: int) -> Tuple[bool, str]:
    # each draw succeeds with probability at most m/(N-m) while n <= m + 1
    sizes = (40, 120, 400) if scale == "full" else (40, 120)
    checked = 0
    for N in sizes:
        for m in range(1, N // 2, max(1, N // 40)):
            for n in range(0, m + 2, 2):
                if not analytic.hypergeom_dominated(N, m, n):
                    return False, f"N={N}, m={m}, n={n}"
                checked += 1
    return True, f"{checked} (N, m, n) triples"


def _check_delta_k(scale: str, seed: int) -> Tuple[bool, str]:
    closed = analytic.delta_k(0.001, 0.02, 101)
    grid = analytic.delta_k_grid(0.001, 0.02, 101)
    return abs(closed - grid) < 1e-10, f"closed {closed:.12f} vs grid {grid:.12f}"


# ---- graphs and statistics ----

def _check_cycles(scale: str, seed: int) -> Tuple[bool, str]:
    k4 = count_simple_cycles(Graph.complete(4))
    c4 = count_simple_cycles(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]))
    return k4 == 7 and c4 == 1, f"K4={k4}, C4={c4}"


def _check_scan(scale: str, seed: int) -> Tuple[bool, str]:
    graphs = 50 if scale == "full" else 10
    for r in range(graphs):
        rs = derive_seed(seed, "scan", r)
        N = 12 + r % 9 if scale == "full" else 10 + r % 5
        g = gen_er(N, 0.2 + 0.1 * (r % 3), rs)
        for k in range(3, 7):
            exact = scan(g, k, "exact")
            greedy = scan(g, k, "greedy", seed=rs)
            comp = scan(g, k, "component")
            brute = brute_force_scan(g, k)
            if exact.value != brute or not (exact.value >= greedy.value >= comp.value):
                return False, f"graph {r} k={k}: exact {exact.value}, brute {brute}, greedy {greedy.value}, component {comp.value}"
        n = min(8, N - 1)
        k_lo, k_hi = broad_scan_range(N, n)
        expected = max(brute_force_scan(g, k) / k for k in range(k_lo, k_hi + 1))
        if abs(broad_scan(g, n, "exact").value - expected) > 1e-12:
            return False, f"graph {r}: broad scan"
    return True, f"{graphs} graphs, k in 3..6"


def _check_ktrees(scale: str, seed: int) -> Tuple[bool, str]:
    graphs = 20 if scale == "full" else 6
    for r in range(graphs):
        N = 8 + r % 5
        g = gen_er(N, 0.35, derive_seed(seed, "ktree", r))
        for k in range(1, 6):
            if ktree_count(g, k) != brute_force_ktrees(g, k):
                return False, f"graph {r} k={k}"
    return True, f"{graphs} graphs, k <= 5"


# ---- likelihood ----

def _check_likelihood_exact(scale: str, seed: int) -> Tuple[bool, str]:
    grid = [0.125, 0.25, 0.375, 0.5, 0.625, 0.75] if scale == "full" else [0.25, 0.5, 0.75]
    count = 0
    for p0 in grid:
        for p1 in grid:
            if p1 < p0:
                continue
            m = exhaustive_moments(4, 2, p0, p1, TruncationEvent.forest(), exact=True)
            if m.E0_L != 1 or m.E0_Lt != m.P_S_event:
                return False, f"p0={p0}, p1={p1}"
            count += 1
    forest3 = exhaustive_moments(4, 3, 0.25, 0.5, TruncationEvent.forest(), exact=True)
    if forest3.E0_Lt != 1 - Fraction(1, 2) ** 3:
        return False, f"n=3 forest: E0[L~]={forest3.E0_Lt}"
    if risk_lower_bound(1.0, 1.0) != 4.0 / 27.0:
        return False, "risk_lower_bound(1, 1)"
    return True, f"{count} dyadic pairs"


def _check_second_moment(scale: str, seed: int) -> Tuple[bool, str]:
    m = exhaustive_moments(5 if scale == "full" else 4, 2, 0.2, 0.6)
    N = 5 if scale == "full" else 4
    hyp = second_moment_hypergeometric(N, 2, 0.2, 0.6)
    return abs(float(m.E0_L2) - hyp) < 1e-10, f"exhaustive {float(m.E0_L2):.12f} vs hypergeometric {hyp:.12f}"


# ---- Monte-Carlo limits (full scale) ----

def _check_giant(scale: str, seed: int) -> Tuple[bool, str]:
    m, lam, R = 10_000, 2.0, 200
    sizes, edges = [], []
    for r in range(R):
        cc = largest_cc(gen_er(m, lam / m, derive_seed(seed, "giant", r)))
        sizes.append(cc.size / m)
        edges.append(cc.edges / m)
    frac, dens = analytic.giant_fraction(lam), analytic.giant_edge_density(lam)
    ok = abs(np.mean(sizes) / frac - 1) < 0.02 and abs(np.mean(edges) / dens - 1) < 0.03
    return ok, f"|C|/m {np.mean(sizes):.4f} vs {frac:.4f}, W/m {np.mean(edges):.4f} vs {dens:.4f}"


def _check_triangles(scale: str, seed: int) -> Tuple[bool, str]:
    N, R = 2000, 20_000
    values = np.array([triangles(gen_er(N, 1.0 / N, derive_seed(seed, "tri", r))) for r in range(R)])
    mean = analytic.triangle_poisson_mean(1.0)
    se = math.sqrt(mean / R)
    observed = [np.sum(values == 0), np.sum(values == 1), np.sum(values >= 2)]
    pois = stats.poisson(mean)
    expected = np.array([pois.pmf(0), pois.pmf(1), pois.sf(1)]) * R
    p_value = stats.chisquare(observed, expected).pvalue
    return abs(values.mean() - mean) < 3 * se and p_value > 0.01, f"mean {values.mean():.4f}, chi-square p={p_value:.3f}"


def _check_forest_probability(scale: str, seed: int) -> Tuple[bool, str]:
    est = mc_event_probability(2000, 0.5 / 2000, TruncationEvent.forest(), 5000, derive_seed(seed, "forest"))
    target = math.exp(-analytic.cycle_intensity(0.5))
    return abs(est.mean - target) < 0.01, f"P(forest) {est.mean:.4f} vs {target:.4f}"


def _check_null_ktrees(scale: str, seed: int) -> Tuple[bool, str]:
    N, lam, k, R = 300, 1.5, 4, 5000
    values = np.array([ktree_count(gen_er(N, lam / N, derive_seed(seed, "ktree-null", r)), k) for r in range(R)])
    expected = analytic.expected_null_ktrees(N, lam / N, k)
    se = values.std(ddof=1) / math.sqrt(R)
    return abs(values.mean() - expected) < 4 * se, f"mean {values.mean():.2f} vs {expected:.2f} (se {se:.2f})"


QUICK_CHECKS: List[Tuple[str, Check]] = [
    ("Cayley counts vs Pruefer enumeration", _check_cayley),
    ("trees containing a labelled tree", _check_trees_containing),
    ("forest counts F_{k,j}", _check_forest_counts),
    ("trees containing a forest and Cayley bound", _check_forest_bound),
    ("eta fixed point", _check_eta),
    ("entropy gap bound", _check_entropy),
    ("Legendre duality and Delta", _check_legendre),
    ("Chernoff bound vs exact binomial tail", _check_chernoff),
    ("binomial coefficient bounds", _check_binomial_bounds),
    ("hypergeometric domination", _check_hypergeom),
    ("delta_k vs grid minimisation", _check_delta_k),
    ("simple cycle enumeration", _check_cycles),
    ("scan modes vs brute force", _check_scan),
    ("k-tree enumeration vs brute force", _check_ktrees),
    ("exhaustive likelihood identities", _check_likelihood_exact),
    ("second moment vs hypergeometric representation", _check_second_moment),
]

FULL_CHECKS: List[Tuple[str, Check]] = [
    ("giant component size and edges", _check_giant),
    ("triangle count Poisson limit", _check_triangles),
    ("forest probability vs cycle intensity", _check_forest_probability),
    ("null k-tree mean", _check_null_ktrees),
]


def run_battery(scale: str = "quick", seed: int = 0) -> VerifyReport:
    if scale not in SCALES:
        raise DomainError(f"scale must be one of {SCALES}, got {scale!r}")
    report = VerifyReport(scale=scale, seed=seed)
    checks = QUICK_CHECKS + (FULL_CHECKS if scale == "full" else [])
    for name, check in checks:
        try:
            ok, detail = check(scale, seed)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        log.info("%s: %s", name, "ok" if ok else "FAILED")
        report.results.append(CheckResult(name, bool(ok), detail))
    return report
