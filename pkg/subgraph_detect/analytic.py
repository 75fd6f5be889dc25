# analytic.py: closed-form scalar functions shared by the tests, the boundary
# curves and the likelihood laboratory. Pure functions, double precision.

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import optimize, special, stats

from subgraph_detect.errors import DomainError, InteriorMinimizerError

ETA_BRACKET_EPS = 1e-15
ETA_XTOL = 1e-13
ETA_RESIDUAL_TOL = 1e-12


# --------------------------- Domain checks ---------------------------

def _check_open_unit(name: str, x: float) -> None:
    if not (0.0 < x < 1.0) or math.isnan(x):
        raise DomainError(f"{name} must lie in the open interval (0, 1), got {x!r}")


def _check_positive(name: str, x: float) -> None:
    if not (x > 0.0) or math.isinf(x):
        raise DomainError(f"{name} must be a positive finite real, got {x!r}")


# --------------------------- Types ---------------------------

@dataclass(frozen=True)
class RateParams:
    lambda0: float
    lambda1: float
    alpha: float
    zeta: float


@dataclass(frozen=True)
class Tilt:
    theta: float
    Lambda_theta: float
    Delta: float


# --------------------------- Entropy ---------------------------

def kl_bernoulli(q: float, p: float) -> float:
    """H_p(q): Kullback-Leibler divergence of Bern(q) from Bern(p)."""
    _check_open_unit("q", q)
    _check_open_unit("p", p)
    value = float(special.rel_entr(q, p) + special.rel_entr(1.0 - q, 1.0 - p))
    return max(value, 0.0)


def h(x: float) -> float:
    """h(x) = x log x - x + 1, with h(0) = 1."""
    if x < 0:
        raise DomainError(f"h is defined for x >= 0, got {x!r}")
    return float(special.xlogy(x, x)) - x + 1.0


def entropy_gap(q: float, p: float) -> float:
    """H_p(q) - p*h(q/p); nonnegative and O(q^2/(1-q)) for p <= q."""
    if p > q:
        raise DomainError(f"entropy_gap requires p <= q, got p={p!r}, q={q!r}")
    # closed form of the difference, exact cancellation of the q*log(q/p) terms
    return float(special.xlogy(1.0 - q, (1.0 - q) / (1.0 - p))) + q - p


def chernoff_tail(n: int, p: float, q: float) -> float:
    """exp(-n H_p(q)), an upper bound on P(Bin(n, p) >= q n) for q >= p."""
    _check_open_unit("p", p)
    _check_open_unit("q", q)
    if q < p:
        raise DomainError(f"chernoff_tail requires q >= p, got q={q!r} < p={p!r}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    return math.exp(-n * kl_bernoulli(q, p))


def exact_binomial_tail(n: int, p: float, q: float) -> float:
    """P(Bin(n, p) >= q n), computed from the binomial survival function."""
    threshold = math.ceil(q * n - 1e-12)
    return float(stats.binom.sf(threshold - 1, n, p))


# --------------------------- Branching process ---------------------------

def rate_I(lam: float) -> float:
    """I_lambda = lambda - 1 - log(lambda)."""
    _check_positive("lambda", lam)
    x = lam - 1.0
    return x - math.log1p(x)


def eta(lam: float) -> float:
    """Smallest root of eta = exp(lambda (eta - 1)).

    Bisection runs on d = 1 - eta over [1e-15, 1], where the residual is
    -expm1(-lambda d) - d and stays well conditioned as lambda -> 1+.
    """
    _check_positive("lambda", lam)
    if lam <= 1.0:
        return 1.0

    def residual(d: float) -> float:
        return -math.expm1(-lam * d) - d

    d = optimize.bisect(residual, ETA_BRACKET_EPS, 1.0, xtol=ETA_XTOL, maxiter=400)
    value = 1.0 - d
    check = abs(value - math.exp(lam * (value - 1.0)))
    if check >= ETA_RESIDUAL_TOL:
        # one Newton polish step; bisection bracket is already tight
        f = value - math.exp(lam * (value - 1.0))
        fp = 1.0 - lam * math.exp(lam * (value - 1.0))
        if fp != 0.0:
            value -= f / fp
    return value


def giant_fraction(lam: float) -> float:
    """Limit of |C_max|/m in G(m, lambda/m)."""
    return 1.0 - eta(lam)


def giant_edge_density(lam: float) -> float:
    """Limit of W_{C_max}/m in G(m, lambda/m): (lambda/2)(1 - eta^2)."""
    e = eta(lam)
    return 0.5 * lam * (1.0 - e * e)


# --------------------------- Exponential tilting ---------------------------

def _cgf(xi: float, p0: float) -> float:
    """Lambda(xi) = log(1 - p0 + p0 e^xi), the cumulant generating function of Bern(p0)."""
    if xi > 30.0:
        return xi + math.log(p0) + math.log1p((1.0 - p0) * math.exp(-xi) / p0)
    return math.log1p(p0 * math.expm1(xi))


def _theta(q: float, p0: float) -> float:
    return math.log(q) - math.log(p0) + math.log1p(-p0) - math.log1p(-q)


def legendre_dual(q: float, p0: float) -> float:
    """theta_q = log(q (1-p0) / (p0 (1-q))), the maximiser in H(q) = sup q*theta - Lambda(theta)."""
    _check_open_unit("q", q)
    _check_open_unit("p0", p0)
    if q <= p0:
        raise DomainError(f"legendre_dual requires q > p0, got q={q!r} <= p0={p0!r}")
    return _theta(q, p0)


def legendre_residual(q: float, p0: float) -> float:
    theta_q = legendre_dual(q, p0)
    return abs(kl_bernoulli(q, p0) - (q * theta_q - _cgf(theta_q, p0)))


def tilt(p0: float, p1: float) -> Tilt:
    _check_open_unit("p0", p0)
    _check_open_unit("p1", p1)
    if p1 < p0:
        raise DomainError(f"tilt requires p0 <= p1, got p0={p0!r} > p1={p1!r}")
    if p1 == p0:
        return Tilt(0.0, 0.0, 0.0)
    theta = legendre_dual(p1, p0)
    Lambda_theta = _cgf(theta, p0)
    Delta = math.log1p((p1 - p0) ** 2 / (p0 * (1.0 - p0)))
    return Tilt(theta=theta, Lambda_theta=Lambda_theta, Delta=Delta)


def delta_via_cgf(p0: float, p1: float) -> float:
    """Delta as Lambda(2 theta) - 2 Lambda(theta); agrees with the closed form in ``tilt``."""
    t = tilt(p0, p1)
    return _cgf(2.0 * t.theta, p0) - 2.0 * t.Lambda_theta


def delta_k(p0: float, p1: float, k: int) -> float:
    """Delta_k = -2 H_{p1}(q_k) + H_{p0}(q_k) with q_k = 2/(k-1).

    Raises InteriorMinimizerError when 2*theta_{p1} < theta_{q_k}; callers fall
    back to the Delta bound in that case.
    """
    if k < 4:
        raise DomainError(f"delta_k requires k >= 4, got {k!r}")
    _check_open_unit("p0", p0)
    _check_open_unit("p1", p1)
    q = 2.0 / (k - 1)
    if not (p0 < q < 1.0):
        raise DomainError(f"delta_k requires p0 < q_k < 1, got q_k={q!r}, p0={p0!r}")
    theta = _theta(p1, p0)
    theta_q = legendre_dual(q, p0)
    if 2.0 * theta < theta_q:
        raise InteriorMinimizerError(
            f"interior minimiser missing: 2*theta_p1={2.0 * theta:.6g} < theta_qk={theta_q:.6g}; use Delta instead"
        )
    return -2.0 * kl_bernoulli(q, p1) + kl_bernoulli(q, p0)


def delta_k_grid(p0: float, p1: float, k: int, points: int = 200_001) -> float:
    """Grid minimisation of Lambda(xi) + (2 theta - xi) q_k - 2 Lambda(theta) over [0, 2 theta]."""
    q = 2.0 / (k - 1)
    t = tilt(p0, p1)
    xi = np.linspace(0.0, 2.0 * t.theta, points)
    cgf = np.log1p(p0 * np.expm1(xi))
    values = cgf + (2.0 * t.theta - xi) * q - 2.0 * t.Lambda_theta
    i = int(np.argmin(values))
    # refine around the best grid point
    lo = xi[max(i - 1, 0)]
    hi = xi[min(i + 1, points - 1)]
    res = optimize.minimize_scalar(
        lambda x: _cgf(x, p0) + (2.0 * t.theta - x) * q - 2.0 * t.Lambda_theta,
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-14},
    )
    return float(min(res.fun, values[i]))


# --------------------------- Signal strength ---------------------------

def signal_zeta(N: int, n: int, p0: float, p1: float) -> float:
    """zeta = (p1 - p0)^2 / p0 * n^4 / N^2."""
    if not (2 <= n < N):
        raise DomainError(f"signal_zeta requires 2 <= n < N, got n={n!r}, N={N!r}")
    _check_open_unit("p0", p0)
    _check_open_unit("p1", p1)
    if p1 < p0:
        raise DomainError(f"signal_zeta requires p0 <= p1, got p0={p0!r} > p1={p1!r}")
    return (p1 - p0) ** 2 / p0 * (n / N) ** 2 * n * n


def rate_params(N: int, n: int, p0: float, p1: float) -> RateParams:
    zeta = signal_zeta(N, n, p0, p1)
    lambda0 = N * p0
    alpha = math.log(lambda0) / math.log(N / n)
    return RateParams(lambda0=lambda0, lambda1=n * p1, alpha=alpha, zeta=zeta)


def cycle_intensity(lam: float) -> float:
    """a(lambda) = 1/2 log(1/(1-lambda)) - lambda/2 - lambda^2/4: Poisson mean of the cycle count."""
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"cycle_intensity requires 0 <= lambda < 1, got {lam!r}")
    return -0.5 * math.log1p(-lam) - 0.5 * lam - 0.25 * lam * lam


def expected_cycle_count(n: int, p: float) -> float:
    """Sum over k >= 3 of n!/((n-k)! 2k) p^k, the mean number of cycles in G(n, p)."""
    total = 0.0
    falling = float(n * (n - 1))
    for k in range(3, n + 1):
        falling *= n - k + 1
        total += falling / (2 * k) * p ** k
    return total


def triangle_poisson_mean(lambda0: float, lambda1: float = 0.0) -> float:
    """(lambda0^3 + lambda1^3)/6, limit mean of the triangle count (lambda1 = 0 under the null)."""
    return (lambda0 ** 3 + lambda1 ** 3) / 6.0


def expected_null_ktrees(N: int, p0: float, k: int) -> float:
    """E0[N^tree_k] = C(N,k) k^(k-2) p0^(k-1) (1-p0)^(C(k,2)-k+1), by Cayley's formula."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k!r}")
    trees = 1 if k <= 2 else k ** (k - 2)
    non_edges = k * (k - 1) // 2 - k + 1
    log_value = (
        math.log(special.comb(N, k, exact=True)) + math.log(trees)
        + (k - 1) * math.log(p0) + non_edges * math.log1p(-p0)
    )
    return math.exp(log_value)


# --------------------------- Binomial / hypergeometric ---------------------------

def binomial_bounds(n: int, k: int) -> Tuple[float, float]:
    """((n/k)^k, (e n/k)^k), bracketing C(n, k) for 1 <= k <= n."""
    if not (1 <= k <= n):
        raise DomainError(f"binomial_bounds requires 1 <= k <= n, got k={k!r}, n={n!r}")
    return (n / k) ** k, (math.e * n / k) ** k


def hypergeom_dominated(N: int, m: int, n: int, tol: float = 1e-12) -> bool:
    """True when Hyp(N, m, n) is stochastically below Bin(n, m/(N-m)) at every support point."""
    if not (0 < m < N and 0 <= n <= N):
        raise DomainError(f"invalid hypergeometric parameters N={N!r}, m={m!r}, n={n!r}")
    rho = m / (N - m)
    if rho >= 1.0:
        return True  # Bin(n, 1) is a point mass at n
    xs = np.arange(0, n + 1)
    hyp_sf = stats.hypergeom.sf(xs - 1, N, m, n)
    bin_sf = stats.binom.sf(xs - 1, n, rho)
    return bool(np.all(hyp_sf <= bin_sf + tol))


# --------------------------- k-tree constant ---------------------------

def ktree_constant_interval(N: int, n: int, lambda0: float, lambda1: float) -> Optional[Tuple[float, float]]:
    """Admissible (c_lo, c_hi) for k = c log n from the two Chebyshev conditions of the k-tree test.

    Returns None outside sqrt(lambda0/e) < lambda1 < 1, or when the interval is empty.
    """
    if not (math.sqrt(lambda0 / math.e) < lambda1 < 1.0):
        return None
    a = lambda0 / (lambda1 * math.e)
    gap = rate_I(a) - rate_I(math.sqrt(lambda0 / math.e))
    if gap <= 0.0:
        return None
    c_hi = 1.0 / (2.0 * (1.0 - a) * rate_I(math.sqrt(lambda1) / math.e))
    c_lo = max(math.log(N / (n * n)) / math.log(n), 0.0) / (2.0 * gap)
    if c_lo >= c_hi:
        return None
    return c_lo, c_hi


def ktree_default_k(N: int, n: int, lambda0: float, lambda1: float,
                    c: Optional[float] = None, k_min: int = 3, k_max: int = 12) -> int:
    """k = round(c log n); c defaults to the midpoint of the admissible interval, else 1."""
    if c is None:
        interval = ktree_constant_interval(N, n, lambda0, lambda1)
        c = 0.5 * (interval[0] + interval[1]) if interval else 1.0
    return int(min(max(round(c * math.log(n)), k_min), k_max))
