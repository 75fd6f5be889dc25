# statistics.py: test statistics: total degree, edges within a subset,
# exact / greedy / component scan, broad scan, largest component, triangles,
# induced k-tree counts.

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from subgraph_detect.errors import DomainError, FeasibilityError
from subgraph_detect.graphs import Graph, make_rng

log = logging.getLogger(__name__)

EXACT_SCAN_MAX_VERTICES = 40
EXACT_SCAN_ALWAYS_K = 3
GREEDY_RESTARTS = 8
COMPONENT_CANDIDATES = 8
KTREE_NODE_BUDGET = 5_000_000
SCAN_MODES = ("exact", "greedy", "component")


# --------------------------- Results ---------------------------

@dataclass(frozen=True)
class ScanResult:
    value: int
    witness: Tuple[int, ...]
    exact: bool


@dataclass(frozen=True)
class BroadScanResult:
    value: float
    k: int
    witness: Tuple[int, ...]
    exact: bool


@dataclass(frozen=True)
class LargestComponent:
    size: int
    edges: int
    min_label: int


# --------------------------- Simple counts ---------------------------

def total_degree(g: Graph) -> int:
    """W = sum_{i<j} W_ij, the number of edges."""
    return g.num_edges


def _membership(g: Graph, S: Iterable[int]) -> np.ndarray:
    verts = np.asarray(list(S), dtype=np.int64)
    if verts.size and (verts.min() < 0 or verts.max() >= g.num_vertices):
        raise DomainError(f"vertex set contains labels outside 0..{g.num_vertices - 1}")
    mask = np.zeros(g.num_vertices, dtype=bool)
    mask[verts] = True
    return mask


def edges_within(g: Graph, S: Iterable[int]) -> int:
    """W_S: edges with both endpoints in S."""
    mask = _membership(g, S)
    if g.num_edges == 0:
        return 0
    return int(np.count_nonzero(mask[g.edges[:, 0]] & mask[g.edges[:, 1]]))


# --------------------------- Exact scan ---------------------------

def _check_exact_feasible(g: Graph, k: int) -> None:
    if g.num_vertices > EXACT_SCAN_MAX_VERTICES and k > EXACT_SCAN_ALWAYS_K and k != g.num_vertices:
        raise FeasibilityError(
            f"exact scan needs N <= {EXACT_SCAN_MAX_VERTICES} or k <= {EXACT_SCAN_ALWAYS_K}; "
            f"got N={g.num_vertices}, k={k}. Use mode=greedy or mode=component."
        )


def _exact_small_k(g: Graph, k: int) -> ScanResult:
    """k <= 3 on graphs of any size: look for a triangle, then a cherry, then an edge."""
    N = g.num_vertices
    if k == 1:
        return ScanResult(0, (0,), True)
    if g.num_edges == 0:
        return ScanResult(0, tuple(range(k)), True)
    if k == 2:
        i, j = g.edges[0].tolist()
        return ScanResult(1, (i, j), True)
    adj = g.adjacency
    for i, j in g.edges.tolist():
        common = adj[i] & adj[j]
        if common:
            return ScanResult(3, tuple(sorted((i, j, min(common)))), True)
    deg = g.degrees
    centre = int(np.argmax(deg))
    if deg[centre] >= 2:
        a, b = sorted(adj[centre])[:2]
        return ScanResult(2, tuple(sorted((centre, a, b))), True)
    i, j = g.edges[0].tolist()
    other = next(v for v in range(N) if v not in (i, j))
    return ScanResult(1, tuple(sorted((i, j, other))), True)


def _exact_branch_and_bound(g: Graph, k: int, incumbent: ScanResult) -> ScanResult:
    """Include/exclude search over vertices in decreasing-degree order.

    Bound for r = k - |chosen| further vertices taken from the candidate suffix:
    current edges + top-r edges into the chosen set + min(top-r half-degrees
    inside the suffix, C(r, 2)).
    """
    N = g.num_vertices
    masks = g.bitmasks
    order = sorted(range(N), key=lambda v: (-int(g.degrees[v]), v))
    suffix = [0] * (N + 1)
    for pos in range(N - 1, -1, -1):
        suffix[pos] = suffix[pos + 1] | (1 << order[pos])

    best_value = incumbent.value
    best_witness = incumbent.witness

    def bound(pos: int, chosen: int, r: int) -> float:
        cand = suffix[pos]
        to_chosen = []
        half_inner = []
        for v in order[pos:]:
            to_chosen.append((masks[v] & chosen).bit_count())
            half_inner.append(min((masks[v] & cand).bit_count(), r - 1) / 2.0)
        to_chosen.sort(reverse=True)
        half_inner.sort(reverse=True)
        return sum(to_chosen[:r]) + min(sum(half_inner[:r]), r * (r - 1) / 2.0)

    def search(pos: int, chosen: int, picked: List[int], edges: int) -> None:
        nonlocal best_value, best_witness
        r = k - len(picked)
        if r == 0:
            if edges > best_value:
                best_value, best_witness = edges, tuple(sorted(picked))
            return
        if N - pos < r:
            return
        if edges + bound(pos, chosen, r) <= best_value:
            return
        v = order[pos]
        picked.append(v)
        search(pos + 1, chosen | (1 << v), picked, edges + (masks[v] & chosen).bit_count())
        picked.pop()
        search(pos + 1, chosen, picked, edges)

    search(0, 0, [], 0)
    return ScanResult(best_value, best_witness, True)


# --------------------------- Component scan ---------------------------

def _peel(g: Graph, vertices: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Repeatedly delete a minimum-degree vertex of the induced subgraph.

    Returns (removal order, edges_left) where edges_left[s] is the edge count
    of the s surviving vertices; the survivors are the last s removed.
    """
    members = set(vertices)
    adj = g.adjacency
    deg = {v: len(adj[v] & members) for v in members}
    edges = sum(deg.values()) // 2
    heap = [(d, v) for v, d in deg.items()]
    heapq.heapify(heap)
    alive = set(members)
    removed: List[int] = []
    edges_left = [0] * (len(members) + 1)
    edges_left[len(members)] = edges
    while heap:
        d, v = heapq.heappop(heap)
        if v not in alive or d != deg[v]:
            continue
        alive.discard(v)
        removed.append(v)
        edges -= d
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
        edges_left[len(alive)] = edges
    return removed, edges_left


class ComponentScanner:
    """Densest-k candidates seeded from the connected components of a graph.

    Peeling profiles are computed once per component, so every k of a broad
    scan reuses them.
    """

    def __init__(self, g: Graph):
        self.g = g
        count, labels = csgraph.connected_components(g.csr, directed=False) if g.num_vertices else (0, np.zeros(0))
        members: Dict[int, List[int]] = {}
        for v, c in enumerate(np.asarray(labels).tolist()):
            members.setdefault(c, []).append(v)
        comp_edges = np.zeros(count, dtype=np.int64)
        if g.num_edges:
            np.add.at(comp_edges, np.asarray(labels)[g.edges[:, 0]], 1)
        # densest first, then larger, then smaller minimum label
        self.components = sorted(
            members.values(),
            key=lambda vs: (-comp_edges[labels[vs[0]]] / len(vs), -len(vs), vs[0]),
        )
        self._by_size = sorted(members.values(), key=lambda vs: (-comp_edges[labels[vs[0]]], -len(vs), vs[0]))
        self._profiles: Dict[int, Tuple[List[int], List[int]]] = {}

    def _profile(self, vertices: List[int]) -> Tuple[List[int], List[int]]:
        key = vertices[0]
        if key not in self._profiles:
            self._profiles[key] = _peel(self.g, vertices)
        return self._profiles[key]

    def _survivors(self, vertices: List[int], s: int) -> List[int]:
        removed, _ = self._profile(vertices)
        return removed[len(removed) - s:] if s else []

    def best(self, k: int) -> ScanResult:
        candidates: List[Tuple[int, ...]] = []
        big = [vs for vs in self._by_size if len(vs) >= k][:COMPONENT_CANDIDATES]
        for vs in big:
            candidates.append(tuple(self._survivors(vs, k)))
        # pack whole components, then peel the next one down to the remaining room
        packed: List[int] = []
        for vs in self.components:
            room = k - len(packed)
            if room == 0:
                break
            if len(vs) <= room:
                packed.extend(vs)
            else:
                packed.extend(self._survivors(vs, room))
        candidates.append(tuple(packed))
        best: Optional[ScanResult] = None
        for cand in candidates:
            witness = tuple(sorted(cand))
            value = edges_within(self.g, witness)
            if best is None or value > best.value:
                best = ScanResult(value, witness, False)
        return best


# --------------------------- Greedy scan ---------------------------

def _hill_climb(g: Graph, start: Iterable[int]) -> Tuple[int, ...]:
    """Apply the best single swap (one vertex out, one in) until no swap adds edges."""
    N = g.num_vertices
    members = np.zeros(N, dtype=bool)
    members[list(start)] = True
    adj = g.adjacency
    A = g.csr
    while True:
        conn = A @ members.astype(np.int64)
        inside = np.flatnonzero(members)
        outside = np.flatnonzero(~members)
        if outside.size == 0 or inside.size == 0:
            break
        inside = inside[np.argsort(conn[inside], kind="stable")]
        outside = outside[np.argsort(-conn[outside], kind="stable")]
        top_out = int(conn[outside[0]])
        best_gain, best_swap = 0, None
        for u in inside.tolist():
            cu = int(conn[u])
            if top_out - cu <= best_gain:
                break
            for v in outside.tolist():
                cv = int(conn[v])
                if cv - cu <= best_gain:
                    break
                adjacent = v in adj[u]
                gain = cv - cu - (1 if adjacent else 0)
                if gain > best_gain:
                    best_gain, best_swap = gain, (u, v)
                if not adjacent:
                    break
        if best_swap is None:
            break
        u, v = best_swap
        members[u] = False
        members[v] = True
    return tuple(np.flatnonzero(members).tolist())


def _greedy_scan(g: Graph, k: int, seed: int, scanner: Optional[ComponentScanner] = None) -> ScanResult:
    scanner = scanner or ComponentScanner(g)
    seeded = scanner.best(k)
    starts: List[Sequence[int]] = [seeded.witness]
    # k highest-degree vertices of the densest component (padded from the rest)
    top = sorted(scanner.components[0], key=lambda v: (-int(g.degrees[v]), v)) if scanner.components else []
    in_top = set(top)
    rest = [v for v in np.argsort(-g.degrees, kind="stable").tolist() if v not in in_top]
    starts.append((top + rest)[:k])
    rng = make_rng(seed)
    for _ in range(GREEDY_RESTARTS):
        starts.append(rng.choice(g.num_vertices, size=k, replace=False).tolist())
    best = seeded
    for start in starts:
        witness = tuple(sorted(_hill_climb(g, start)))
        value = edges_within(g, witness)
        if value > best.value:
            best = ScanResult(value, witness, False)
    return best


# --------------------------- Scan ---------------------------

def scan(g: Graph, k: int, mode: str = "exact", seed: int = 0) -> ScanResult:
    """W*_k = max over |T| = k of W_T, exactly or heuristically.

    exact      branch-and-bound, capped at N <= 40 or k <= 3
    greedy     best-swap hill climbing from the component seed, a top-degree
               start and GREEDY_RESTARTS random starts
    component  densest-k peeling inside the connected components
    """
    N = g.num_vertices
    if not (1 <= k <= N):
        raise DomainError(f"scan requires 1 <= k <= N, got k={k!r}, N={N!r}")
    if mode not in SCAN_MODES:
        raise DomainError(f"unknown scan mode {mode!r}; expected one of {SCAN_MODES}")
    if k == N:
        return ScanResult(g.num_edges, tuple(range(N)), True)
    if mode == "component":
        return ComponentScanner(g).best(k)
    if mode == "greedy":
        return _greedy_scan(g, k, seed)
    _check_exact_feasible(g, k)
    if k <= EXACT_SCAN_ALWAYS_K:
        return _exact_small_k(g, k)
    return _exact_branch_and_bound(g, k, _greedy_scan(g, k, seed))


def broad_scan_range(N: int, n: int) -> Tuple[int, int]:
    """[k_lo, n] with k_lo = max(2, ceil(n/u)), u = max(log log(N/n), 2)."""
    ratio = N / n
    u = 2.0
    if ratio > math.e:
        u = max(math.log(math.log(ratio)), 2.0)
    return max(2, math.ceil(n / u)), n


def broad_scan(g: Graph, n: int, mode: str = "component", seed: int = 0) -> BroadScanResult:
    """W^dagger_n = max over k in the broad-scan range of W*_k / k."""
    N = g.num_vertices
    if not (2 <= n <= N):
        raise DomainError(f"broad_scan requires 2 <= n <= N, got n={n!r}, N={N!r}")
    if mode not in SCAN_MODES:
        raise DomainError(f"unknown scan mode {mode!r}; expected one of {SCAN_MODES}")
    k_lo, k_hi = broad_scan_range(N, n)
    if mode == "exact":
        for k in range(k_lo, k_hi + 1):
            if k != N:
                _check_exact_feasible(g, k)
    scanner = ComponentScanner(g) if mode != "exact" else None
    best: Optional[BroadScanResult] = None
    for k in range(k_lo, k_hi + 1):
        if mode == "component" and k != N:
            res = scanner.best(k)
        elif mode == "greedy" and k != N:
            res = _greedy_scan(g, k, seed, scanner)
        else:
            res = scan(g, k, mode, seed)
        density = res.value / k
        if best is None or density > best.value:
            best = BroadScanResult(density, k, res.witness, res.exact)
    return best


def brute_force_scan(g: Graph, k: int) -> int:
    """max over all C(N, k) subsets; oracle for small graphs."""
    masks = g.bitmasks
    best = 0
    for subset in combinations(range(g.num_vertices), k):
        chosen = 0
        edges = 0
        for v in subset:
            edges += (masks[v] & chosen).bit_count()
            chosen |= 1 << v
        best = max(best, edges)
    return best


# --------------------------- Components ---------------------------

def largest_cc(g: Graph) -> LargestComponent:
    """Largest connected component; ties go to the component with the smallest minimum label."""
    N = g.num_vertices
    if N == 0:
        return LargestComponent(0, 0, -1)
    count, labels = csgraph.connected_components(g.csr, directed=False)
    sizes = np.bincount(labels, minlength=count)
    first = np.full(count, N, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(N))
    chosen = int(np.lexsort((first, -sizes))[0])
    edges = int(np.count_nonzero(labels[g.edges[:, 0]] == chosen)) if g.num_edges else 0
    return LargestComponent(size=int(sizes[chosen]), edges=edges, min_label=int(first[chosen]))


# --------------------------- Triangles ---------------------------

def triangles(g: Graph) -> int:
    """Triangle count by forward neighbour intersection.

    Edges are oriented from lower to higher (degree, label) rank; each triangle
    is then counted once as U[u,v] * U[v,w] * U[u,w] with U the oriented
    adjacency.
    """
    if g.num_edges < 3:
        return 0
    N = g.num_vertices
    rank = np.empty(N, dtype=np.int64)
    rank[np.lexsort((np.arange(N), g.degrees))] = np.arange(N)
    a, b = g.edges[:, 0], g.edges[:, 1]
    forward = rank[a] < rank[b]
    src = np.where(forward, a, b)
    dst = np.where(forward, b, a)
    U = sparse.csr_matrix((np.ones(src.size, dtype=np.int64), (src, dst)), shape=(N, N))
    return int((U @ U).multiply(U).sum())


# --------------------------- k-trees ---------------------------

def ktree_count(g: Graph, k: int, budget: int = KTREE_NODE_BUDGET) -> int:
    """Number of k-subsets whose induced subgraph is a tree.

    Connected induced subgraphs are enumerated by vertex extension with
    exclusive neighbourhoods, rooted at their smallest vertex; a branch is cut
    once it holds a cycle, since every superset then contains it too.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k!r}")
    N = g.num_vertices
    if k == 1:
        return N
    adj = g.adjacency
    count = 0
    nodes = 0

    def extend(sub: frozenset, neighbourhood: frozenset, ext: set, root: int, edges: int) -> None:
        nonlocal count, nodes
        nodes += 1
        if nodes > budget:
            raise FeasibilityError(
                f"k-tree enumeration exceeded the node budget of {budget}; lower k or raise the budget"
            )
        if len(sub) == k:
            if edges == k - 1:
                count += 1
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            added = len(adj[w] & sub)
            if edges + added >= len(sub) + 1:
                continue  # the induced subgraph on sub + w has a cycle
            exclusive = {u for u in adj[w] if u > root and u not in sub and u not in neighbourhood}
            extend(sub | {w}, neighbourhood | adj[w] | sub, ext | exclusive, root, edges + added)

    for v in range(N):
        ext = {u for u in adj[v] if u > v}
        extend(frozenset((v,)), frozenset(adj[v]) | {v}, ext, v, 0)
    return count


def brute_force_ktrees(g: Graph, k: int) -> int:
    """Naive C(N, k) oracle: connected with exactly k - 1 edges."""
    masks = g.bitmasks
    total = 0
    for subset in combinations(range(g.num_vertices), k):
        chosen = 0
        edges = 0
        for v in subset:
            edges += (masks[v] & chosen).bit_count()
            chosen |= 1 << v
        if edges != k - 1:
            continue
        # connectivity by flood fill inside the subset
        seen = 1 << subset[0]
        frontier = seen
        while frontier:
            grow = 0
            for v in subset:
                if (frontier >> v) & 1:
                    grow |= masks[v] & chosen
            frontier = grow & ~seen
            seen |= grow
        if seen == chosen:
            total += 1
    return total
