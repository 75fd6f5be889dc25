# graphs.py: immutable undirected simple graphs, Erdős–Rényi and planted
# generators, and structural primitives (components, induced subgraphs,
# forests, cycles).

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from subgraph_detect.errors import DomainError, SizeCapError

log = logging.getLogger(__name__)

# Below this edge probability pairs are sampled by geometric skipping.
SPARSE_SAMPLING_THRESHOLD = 0.25
CYCLE_ENUMERATION_CAP = 16


# --------------------------- Union-find ---------------------------

class DisjointSet:
    """Union by size with path compression."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size
        self.components = size

    def find(self, node: int) -> int:
        root = node
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[node] != root:
            self.parent[node], node = root, self.parent[node]
        return root

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; False when they were already joined (a cycle edge)."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


# --------------------------- Graph ---------------------------

@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices 0..N-1.

    ``edges`` is an (m, 2) int64 array of pairs i < j in lexicographic order,
    without duplicates; it is read-only. Adjacency views are derived lazily.
    """

    num_vertices: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.edges.setflags(write=False)

    @classmethod
    def from_edges(cls, num_vertices: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        if num_vertices < 0:
            raise DomainError(f"number of vertices must be >= 0, got {num_vertices!r}")
        arr = np.asarray([tuple(p) for p in pairs], dtype=np.int64).reshape(-1, 2)
        if arr.size:
            if arr.min() < 0 or arr.max() >= num_vertices:
                raise DomainError(f"edge endpoint outside 0..{num_vertices - 1}")
            if np.any(arr[:, 0] == arr[:, 1]):
                raise DomainError("self-loops are not allowed")
        arr = np.sort(arr, axis=1)
        arr = _lexsorted(arr)
        if arr.shape[0] > 1 and np.any(np.all(arr[1:] == arr[:-1], axis=1)):
            raise DomainError("duplicate edges are not allowed")
        return cls(num_vertices, arr)

    @classmethod
    def empty(cls, num_vertices: int) -> "Graph":
        return cls(num_vertices, np.zeros((0, 2), dtype=np.int64))

    @classmethod
    def complete(cls, num_vertices: int) -> "Graph":
        i, j = np.triu_indices(num_vertices, k=1)
        return cls(num_vertices, np.column_stack([i, j]).astype(np.int64))

    # ---- basic views ----

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix with sorted column indices."""
        n = self.num_vertices
        rows = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        cols = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        data = np.ones(rows.shape[0], dtype=np.int32)
        mat = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        mat.sort_indices()
        return mat

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_vertices, dtype=np.int64)
        np.add.at(deg, self.edges.ravel(), 1)
        return deg

    @cached_property
    def adjacency(self) -> Tuple[FrozenSet[int], ...]:
        indptr, indices = self.csr.indptr, self.csr.indices
        return tuple(
            frozenset(indices[indptr[v]:indptr[v + 1]].tolist()) for v in range(self.num_vertices)
        )

    @cached_property
    def bitmasks(self) -> Tuple[int, ...]:
        """Neighbourhoods as Python int bitmasks, for small-graph enumeration."""
        masks = [0] * self.num_vertices
        for i, j in self.edges.tolist():
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return tuple(masks)

    def neighbors(self, v: int) -> np.ndarray:
        indptr = self.csr.indptr
        return self.csr.indices[indptr[v]:indptr[v + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adjacency[i]

    def edge_list(self) -> List[Tuple[int, int]]:
        return [tuple(e) for e in self.edges.tolist()]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.num_vertices == other.num_vertices and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.num_vertices, self.edges.tobytes()))


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    graph: Graph
    community: Tuple[int, ...]
    N: int
    n: int
    p0: float
    p1: float


def _lexsorted(arr: np.ndarray) -> np.ndarray:
    if arr.shape[0] == 0:
        return arr.reshape(0, 2)
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    return np.ascontiguousarray(arr[order])


# --------------------------- Sampling ---------------------------

def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def _pairs_from_index(idx: np.ndarray) -> np.ndarray:
    """Map colex pair indices k = j(j-1)/2 + i (i < j) back to (i, j)."""
    idx = idx.astype(np.int64)
    j = np.floor((1.0 + np.sqrt(1.0 + 8.0 * idx.astype(np.float64))) / 2.0).astype(np.int64)
    # float rounding can be off by one in either direction
    j = np.where(j * (j - 1) // 2 > idx, j - 1, j)
    j = np.where((j + 1) * j // 2 <= idx, j + 1, j)
    i = idx - j * (j - 1) // 2
    return np.column_stack([i, j])


def _sample_pair_indices(num_pairs: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of the pairs kept when each of ``num_pairs`` is kept independently with probability p."""
    if p <= 0.0 or num_pairs == 0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(num_pairs, dtype=np.int64)
    if p >= SPARSE_SAMPLING_THRESHOLD:
        return np.flatnonzero(rng.random(num_pairs) < p).astype(np.int64)
    # geometric skipping: gaps between successive kept pairs are Geometric(p)
    chunks = []
    last = -1
    expected = num_pairs * p
    chunk = int(expected + 4.0 * math.sqrt(expected + 1.0)) + 16
    while last < num_pairs:
        gaps = rng.geometric(p, size=chunk)
        pos = last + np.cumsum(gaps)
        chunks.append(pos[pos < num_pairs])
        last = int(pos[-1])
        chunk = max(16, chunk // 4)
    return np.concatenate(chunks).astype(np.int64)


def _sample_edges(num_vertices: int, p: float, rng: np.random.Generator) -> np.ndarray:
    num_pairs = num_vertices * (num_vertices - 1) // 2
    return _pairs_from_index(_sample_pair_indices(num_pairs, p, rng))


def _check_probability(name: str, p: float) -> None:
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {p!r}")


def gen_er(N: int, p: float, seed: int) -> Graph:
    """G(N, p): every pair is an edge independently with probability p."""
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N!r}")
    _check_probability("p", p)
    rng = make_rng(seed)
    return Graph(N, _lexsorted(_sample_edges(N, p, rng)))


def gen_planted(N: int, p0: float, n: int, p1: float, seed: int) -> PlantedInstance:
    """G(N, p0; n, p1): uniform community S of size n, inner pairs Bern(p1), the rest Bern(p0)."""
    if not (2 <= n <= N):
        raise DomainError(f"gen_planted requires 2 <= n <= N, got n={n!r}, N={N!r}")
    _check_probability("p0", p0)
    _check_probability("p1", p1)
    if p1 < p0:
        raise DomainError(f"gen_planted requires p0 <= p1, got p0={p0!r} > p1={p1!r}")
    rng = make_rng(seed)
    community = np.sort(rng.choice(N, size=n, replace=False)).astype(np.int64)
    background = _sample_edges(N, p0, rng)
    in_s = np.zeros(N, dtype=bool)
    in_s[community] = True
    if background.size:
        background = background[~(in_s[background[:, 0]] & in_s[background[:, 1]])]
    inner = community[_sample_edges(n, p1, rng)]
    edges = np.concatenate([background, inner.reshape(-1, 2)])
    graph = Graph(N, _lexsorted(edges))
    return PlantedInstance(graph=graph, community=tuple(community.tolist()), N=N, n=n, p0=p0, p1=p1)


# --------------------------- Structure ---------------------------

@dataclass(frozen=True, eq=False)
class Partition:
    labels: np.ndarray = field(repr=False)
    sizes: List[int]

    @property
    def count(self) -> int:
        return len(self.sizes)


def components(g: Graph) -> Partition:
    """Connected components; ``sizes`` sorted in decreasing order and summing to N."""
    if g.num_vertices == 0:
        return Partition(np.zeros(0, dtype=np.int64), [])
    count, labels = csgraph.connected_components(g.csr, directed=False)
    sizes = np.bincount(labels, minlength=count)
    return Partition(labels=labels, sizes=sorted(sizes.tolist(), reverse=True))


def induced(g: Graph, S: Iterable[int]) -> Graph:
    """Subgraph induced by S, relabelled 0..|S|-1 in increasing label order."""
    verts = np.unique(np.asarray(list(S), dtype=np.int64))
    if verts.size and (verts[0] < 0 or verts[-1] >= g.num_vertices):
        raise DomainError(f"vertex set contains labels outside 0..{g.num_vertices - 1}")
    rank = np.full(g.num_vertices, -1, dtype=np.int64)
    rank[verts] = np.arange(verts.size)
    if g.num_edges == 0:
        return Graph.empty(int(verts.size))
    a, b = rank[g.edges[:, 0]], rank[g.edges[:, 1]]
    keep = (a >= 0) & (b >= 0)
    return Graph(int(verts.size), _lexsorted(np.column_stack([a[keep], b[keep]])))


@dataclass(frozen=True)
class ForestCheck:
    is_forest: bool
    cyclomatic_number: int

    def __bool__(self) -> bool:
        return self.is_forest


def is_forest(g: Graph) -> ForestCheck:
    """Union-find pass over the edges; the first edge joining an already-joined pair closes a cycle."""
    ds = DisjointSet(g.num_vertices)
    acyclic = True
    for i, j in g.edges.tolist():
        if not ds.union(i, j):
            acyclic = False
    cyclomatic = g.num_edges - g.num_vertices + ds.components
    return ForestCheck(is_forest=acyclic, cyclomatic_number=cyclomatic)


def to_networkx(g: Graph) -> nx.Graph:
    """Copy into a networkx graph on nodes 0..N-1."""
    out = nx.Graph()
    out.add_nodes_from(range(g.num_vertices))
    out.add_edges_from(g.edges.tolist())
    return out


def count_simple_cycles(g: Graph) -> int:
    """Number of simple cycles of length >= 3, each counted once."""
    n = g.num_vertices
    if n > CYCLE_ENUMERATION_CAP:
        raise SizeCapError(f"cycle enumeration is capped at {CYCLE_ENUMERATION_CAP} vertices, got {n}")
    return sum(1 for _ in nx.simple_cycles(to_networkx(g)))
