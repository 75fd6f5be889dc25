# likelihood.py: likelihood ratio laboratory: L_S, the subset-averaged
# likelihood L, its truncated version, and exhaustive null moments on graphs
# small enough to enumerate.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from subgraph_detect.analytic import rate_I, tilt
from subgraph_detect.errors import DomainError, FeasibilityError, InvariantError, ParseError, SizeCapError
from subgraph_detect.graphs import Graph, components, gen_er, induced, is_forest, make_rng
from subgraph_detect.hashing import derive_seed
from subgraph_detect.statistics import edges_within, scan

log = logging.getLogger(__name__)

FULL_L_SUBSET_CAP = 1_000_000
EXHAUSTIVE_MAX_VERTICES = 5
DEFAULT_CAP_CONSTANT = 0.1
EVENT_KINDS = ("none", "forest", "forest_with_cap", "edge_cap_profile")

Number = Union[float, Fraction]


# --------------------------- Truncation events ---------------------------

@dataclass(frozen=True)
class TruncationEvent:
    """Decreasing event Gamma_S on the induced subgraph G_S.

    none              always true, so the truncated likelihood is L itself
    forest            G_S is a forest
    forest_with_cap   G_S is a forest whose largest tree has at most f vertices
    edge_cap_profile  W_T <= w_k for every T inside S with |T| = k in the profile
    """

    kind: str = "none"
    f: Optional[float] = None
    profile: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise DomainError(f"unknown truncation kind {self.kind!r}; expected one of {EVENT_KINDS}")
        if self.kind == "forest_with_cap" and (self.f is None or self.f < 1):
            raise DomainError(f"forest_with_cap requires f >= 1, got {self.f!r}")
        if self.kind == "edge_cap_profile" and not self.profile:
            raise DomainError("edge_cap_profile requires a nonempty k -> w_k profile")

    @classmethod
    def none(cls) -> "TruncationEvent":
        return cls("none")

    @classmethod
    def forest(cls) -> "TruncationEvent":
        return cls("forest")

    @classmethod
    def forest_with_cap(cls, f: float) -> "TruncationEvent":
        return cls("forest_with_cap", f=float(f))

    @classmethod
    def edge_cap_profile(cls, w: Mapping[int, int]) -> "TruncationEvent":
        return cls("edge_cap_profile", profile=tuple(sorted((int(k), int(v)) for k, v in w.items())))

    @classmethod
    def parse(cls, text: str, n: Optional[int] = None, lambda1: Optional[float] = None) -> "TruncationEvent":
        """Read an event from its label.

        ``none`` and ``forest`` take no argument. ``forest_with_cap:F`` fixes the
        cap; bare ``forest_with_cap`` derives it from the community as
        ``forest_cap(n, lambda1)``. ``edge_cap_profile:k=w,k=w`` lists the
        thresholds, ``edge_cap_profile:alpha=A,c=C`` builds them from the
        polynomial-regime formula and bare ``edge_cap_profile`` from the forest
        cap, over k = 2..n.
        """
        kind, sep, arg = text.strip().partition(":")
        if kind in ("none", "forest"):
            if arg:
                raise ParseError(f"truncation event {kind!r} takes no argument, got {text!r}")
            return cls(kind)
        if kind not in ("forest_with_cap", "edge_cap_profile"):
            raise DomainError(f"unknown truncation event {text!r}")
        if sep and not arg:
            raise ParseError(f"truncation event {text!r} has an empty argument")
        if kind == "forest_with_cap":
            f = _number(arg, float, "forest_with_cap") if arg else _community_cap(n, lambda1)
            return cls.forest_with_cap(f)
        if not arg:
            return cls.edge_cap_profile(profile_from_cap(_community_cap(n, lambda1), _profile_sizes(n)))
        items = [item.split("=") for item in arg.split(",")]
        if any(len(item) != 2 for item in items):
            raise ParseError(f"edge_cap_profile expects k=w pairs, got {arg!r}")
        pairs = dict(items)
        if set(pairs) == {"alpha", "c"}:
            alpha = _number(pairs["alpha"], float, "edge_cap_profile alpha")
            c = _number(pairs["c"], float, "edge_cap_profile c")
            return cls.edge_cap_profile(profile_from_alpha(alpha, c, _profile_sizes(n)))
        return cls.edge_cap_profile({
            _number(k, int, "edge_cap_profile size"): _number(w, int, "edge_cap_profile threshold")
            for k, w in pairs.items()
        })

    @property
    def label(self) -> str:
        if self.kind == "forest_with_cap":
            return f"forest_with_cap:{self.f:g}"
        if self.kind == "edge_cap_profile":
            return "edge_cap_profile:" + ",".join(f"{k}={w}" for k, w in self.profile)
        return self.kind

    def holds(self, g_S: Graph) -> bool:
        if self.kind == "none":
            return True
        if self.kind == "forest":
            return bool(is_forest(g_S))
        if self.kind == "forest_with_cap":
            if not is_forest(g_S):
                return False
            sizes = components(g_S).sizes
            return not sizes or sizes[0] <= self.f
        # W_T <= w_k for all |T| = k, i.e. the size-k scan of G_S stays under w_k
        for k, w in self.profile:
            if k > g_S.num_vertices:
                continue
            if scan(g_S, k, mode="exact").value > w:
                return False
        return True


def forest_cap(n: int, lambda1: float, c: float = DEFAULT_CAP_CONSTANT) -> float:
    """f_n = (1 + c) log(n) / I_{lambda1}."""
    if c <= 0:
        raise DomainError(f"c must be positive, got {c!r}")
    rate = rate_I(lambda1)
    if rate == 0.0:
        raise DomainError("forest_cap is undefined at lambda1 = 1")
    return (1.0 + c) * math.log(n) / rate


def profile_from_cap(f: float, ks: Iterable[int]) -> Dict[int, int]:
    """w_k = k - ceil(k/f): a forest with trees of at most f vertices has at least ceil(k/f) trees."""
    return {k: k - math.ceil(k / f) for k in ks}


def profile_from_alpha(alpha: float, c: float, ks: Iterable[int]) -> Dict[int, int]:
    """w_k = floor(k sqrt(1 - c) / (1 - alpha))."""
    if not (0.0 < c < 1.0) or alpha >= 1.0:
        raise DomainError(f"profile_from_alpha requires 0 < c < 1 and alpha < 1, got c={c!r}, alpha={alpha!r}")
    scale = math.sqrt(1.0 - c) / (1.0 - alpha)
    return {k: math.floor(k * scale) for k in ks}


def _number(text: str, kind: type, what: str):
    try:
        return kind(text)
    except ValueError:
        raise ParseError(f"{what}: cannot read {text!r} as {kind.__name__}") from None


def _community_cap(n: Optional[int], lambda1: Optional[float]) -> float:
    if n is None or lambda1 is None:
        raise DomainError("a derived truncation cap needs the community size n and lambda1")
    return forest_cap(n, lambda1)


def _profile_sizes(n: Optional[int]) -> range:
    if n is None or n < 2:
        raise DomainError(f"a derived edge-cap profile needs n >= 2, got n={n!r}")
    return range(2, n + 1)


# --------------------------- L_S and L ---------------------------

def _check_probs(p0: float, p1: float) -> None:
    if not (0.0 < p0 <= p1 < 1.0):
        raise DomainError(f"likelihood requires 0 < p0 <= p1 < 1, got p0={p0!r}, p1={p1!r}")


def log_ls(w_s: int, s: int, p0: float, p1: float) -> float:
    """log L_S = theta W_S - Lambda(theta) s(s-1)/2."""
    t = tilt(p0, p1)
    return t.theta * w_s - t.Lambda_theta * (s * (s - 1) // 2)


def ls(g: Graph, S: Iterable[int], p0: float, p1: float) -> float:
    """L_S = exp(theta W_S - Lambda(theta) |S|(|S|-1)/2)."""
    _check_probs(p0, p1)
    S = list(S)
    if len(S) < 2:
        raise DomainError(f"|S| must be >= 2, got {len(S)}")
    return math.exp(log_ls(edges_within(g, S), len(S), p0, p1))


def ls_closed_form(w_s: int, s: int, p0: float, p1: float) -> float:
    """(p1/p0)^W_S ((1-p1)/(1-p0))^(s(s-1)/2 - W_S)."""
    pairs = s * (s - 1) // 2
    return (p1 / p0) ** w_s * ((1.0 - p1) / (1.0 - p0)) ** (pairs - w_s)


def _subset_count(N: int, n: int) -> int:
    count = math.comb(N, n)
    if count > FULL_L_SUBSET_CAP:
        raise FeasibilityError(
            f"full likelihood sums over C({N}, {n}) = {count} subsets; the cap is {FULL_L_SUBSET_CAP}"
        )
    return count


def full_L(g: Graph, n: int, p0: float, p1: float, trunc: TruncationEvent = TruncationEvent()) -> float:
    """C(N,n)^-1 sum over |S| = n of L_S 1{Gamma_S}; with no truncation this is L."""
    _check_probs(p0, p1)
    N = g.num_vertices
    if not (2 <= n <= N):
        raise DomainError(f"full_L requires 2 <= n <= N, got n={n!r}, N={N!r}")
    count = _subset_count(N, n)
    t = tilt(p0, p1)
    pair_term = t.Lambda_theta * (n * (n - 1) // 2)
    masks = g.bitmasks
    logs = []
    for subset in combinations(range(N), n):
        if trunc.kind != "none" and not trunc.holds(induced(g, subset)):
            continue
        chosen = 0
        w = 0
        for v in subset:
            w += (masks[v] & chosen).bit_count()
            chosen |= 1 << v
        logs.append(t.theta * w - pair_term)
    if not logs:
        return 0.0
    return float(math.exp(special.logsumexp(logs) - math.log(count)))


# --------------------------- Exhaustive moments ---------------------------

@dataclass(frozen=True)
class ExhaustiveMoments:
    E0_L: Number
    E0_L2: Number
    E0_Lt: Number
    E0_Lt2: Number
    P_S_event: Number
    bayes_risk: Number

    def as_dict(self) -> Dict[str, float]:
        return {
            "E0_L": float(self.E0_L),
            "E0_L2": float(self.E0_L2),
            "E0_Lt": float(self.E0_Lt),
            "E0_Lt2": float(self.E0_Lt2),
            "P_S_event": float(self.P_S_event),
            "bayes_risk": float(self.bayes_risk),
        }


def _local_pairs(n: int) -> Dict[Tuple[int, int], int]:
    return {pair: idx for idx, pair in enumerate(combinations(range(n), 2))}


def _graph_from_mask(n: int, mask: int, pairs: Sequence[Tuple[int, int]]) -> Graph:
    return Graph.from_edges(n, [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1])


def event_probability(n: int, p1: Number, trunc: TruncationEvent) -> Number:
    """P(G(n, p1) in Gamma) by summing over all 2^C(n,2) graphs; equals P_S(Gamma_S)."""
    pairs = list(combinations(range(n), 2))
    total_pairs = len(pairs)
    one = Fraction(1) if isinstance(p1, Fraction) else 1.0
    total = 0 * one
    for mask in range(1 << total_pairs):
        if trunc.holds(_graph_from_mask(n, mask, pairs)):
            w = mask.bit_count()
            total += p1 ** w * (one - p1) ** (total_pairs - w)
    return total


def exhaustive_moments(N: int, n: int, p0: float, p1: float,
                       trunc: TruncationEvent = TruncationEvent(), exact: bool = False) -> ExhaustiveMoments:
    """Exact null moments of L and the truncated L by summing over every graph on N vertices.

    With ``exact`` the sums run in rational arithmetic on the binary values of
    p0 and p1, so E0[L] = 1 and E0[L~] = P_S(Gamma_S) hold as equalities.
    """
    if N > EXHAUSTIVE_MAX_VERTICES:
        raise SizeCapError(f"exhaustive moments are capped at N <= {EXHAUSTIVE_MAX_VERTICES}, got {N}")
    if not (2 <= n <= N):
        raise DomainError(f"exhaustive_moments requires 2 <= n <= N, got n={n!r}, N={N!r}")
    _check_probs(p0, p1)
    if exact:
        q0, q1, one = Fraction(p0), Fraction(p1), Fraction(1)
    else:
        q0, q1, one = float(p0), float(p1), 1.0

    pairs = list(combinations(range(N), 2))
    index = {pair: i for i, pair in enumerate(pairs)}
    total_pairs = len(pairs)
    local = list(combinations(range(n), 2))
    n_pairs = len(local)
    subsets = list(combinations(range(N), n))
    # bit positions of each subset's internal pairs, in local pair order
    subset_bits = [[index[(S[a], S[b])] for a, b in local] for S in subsets]
    up = q1 / q0
    down = (one - q1) / (one - q0)
    ls_by_w = [up ** w * down ** (n_pairs - w) for w in range(n_pairs + 1)]
    event_cache: Dict[int, bool] = {}

    def event_holds(local_mask: int) -> bool:
        if local_mask not in event_cache:
            event_cache[local_mask] = trunc.holds(_graph_from_mask(n, local_mask, local))
        return event_cache[local_mask]

    E_L = E_L2 = E_Lt = E_Lt2 = E_abs = 0 * one
    num_subsets = len(subsets)
    for mask in range(1 << total_pairs):
        m = mask.bit_count()
        weight = q0 ** m * (one - q0) ** (total_pairs - m)
        L = Lt = 0 * one
        for bits in subset_bits:
            local_mask = 0
            for pos, b in enumerate(bits):
                if (mask >> b) & 1:
                    local_mask |= 1 << pos
            value = ls_by_w[local_mask.bit_count()]
            L += value
            if event_holds(local_mask):
                Lt += value
        L /= num_subsets
        Lt /= num_subsets
        E_L += weight * L
        E_L2 += weight * L * L
        E_Lt += weight * Lt
        E_Lt2 += weight * Lt * Lt
        E_abs += weight * abs(L - one)

    p_event = event_probability(n, q1, trunc)
    if exact:
        if E_L != 1:
            raise InvariantError(f"E0[L] = {E_L} in rational arithmetic, expected exactly 1")
        if E_Lt != p_event:
            raise InvariantError(f"E0[L~] = {E_Lt} differs from P_S(Gamma_S) = {p_event}")
    elif not math.isclose(E_Lt, p_event, rel_tol=1e-10, abs_tol=1e-12):
        raise InvariantError(f"E0[L~] = {E_Lt!r} differs from P_S(Gamma_S) = {p_event!r}")
    log.debug("exhaustive moments N=%d n=%d trunc=%s: E0[L~]=%s", N, n, trunc.label, float(E_Lt))
    return ExhaustiveMoments(
        E0_L=E_L, E0_L2=E_L2, E0_Lt=E_Lt, E0_Lt2=E_Lt2,
        P_S_event=p_event, bayes_risk=one - E_abs / 2,
    )


def second_moment_hypergeometric(N: int, n: int, p0: float, p1: float) -> float:
    """E[exp(Delta K(K-1)/2)] with K ~ Hyp(N, n, n), the untruncated second moment E0[L^2]."""
    _check_probs(p0, p1)
    delta = tilt(p0, p1).Delta
    ks = np.arange(0, n + 1)
    pmf = stats.hypergeom.pmf(ks, N, n, n)
    return float(np.sum(pmf * np.exp(delta * ks * (ks - 1) / 2.0)))


def risk_lower_bound(E0_Lt: float, E0_Lt2: float) -> float:
    """(4/27) E0[L~]^3 / E0[L~^2], with 0/0 = 0."""
    if E0_Lt < 0:
        raise DomainError(f"E0_Lt must be nonnegative, got {E0_Lt!r}")
    if E0_Lt == 0:
        return 0.0
    if E0_Lt2 <= 0:
        raise DomainError(f"E0_Lt2 must be positive, got {E0_Lt2!r}")
    return 4.0 / 27.0 * float(E0_Lt) ** 3 / float(E0_Lt2)


# --------------------------- Monte-Carlo checks ---------------------------

@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    se: float
    R: int


def _estimate(values: np.ndarray) -> MonteCarloEstimate:
    R = int(values.size)
    se = float(values.std(ddof=1) / math.sqrt(R)) if R > 1 else float("nan")
    return MonteCarloEstimate(mean=float(values.mean()), se=se, R=R)


def mc_event_probability(n: int, p1: float, trunc: TruncationEvent, R: int, seed: int) -> MonteCarloEstimate:
    """Fraction of R draws of G(n, p1) inside Gamma; estimates P_S(Gamma_S)."""
    hits = np.array(
        [1.0 if trunc.holds(gen_er(n, p1, derive_seed(seed, r))) else 0.0 for r in range(R)]
    )
    return _estimate(hits)


def mc_truncated_first_moment(N: int, n: int, p0: float, p1: float, trunc: TruncationEvent,
                              R: int, seed: int) -> MonteCarloEstimate:
    """Monte-Carlo E0[L~] = E0[L_S 1{Gamma_S}] with S uniform, over R null graphs."""
    _check_probs(p0, p1)
    t = tilt(p0, p1)
    pair_term = t.Lambda_theta * (n * (n - 1) // 2)
    values = np.empty(R)
    for r in range(R):
        rep_seed = derive_seed(seed, r)
        g = gen_er(N, p0, rep_seed)
        S = np.sort(make_rng(derive_seed(rep_seed, "subset")).choice(N, size=n, replace=False))
        g_S = induced(g, S)
        values[r] = math.exp(t.theta * g_S.num_edges - pair_term) if trunc.holds(g_S) else 0.0
    return _estimate(values)
