# combinatorics.py: exact counting oracles for labelled trees and forests
# (Cayley counts, trees containing a given tree or forest, forest counts by
# number of components).

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import FrozenSet, Iterable, Iterator, List, Sequence, Tuple

import networkx as nx

from subgraph_detect.errors import DomainError, SizeCapError

FOREST_COUNT_CAP = 8
TREE_ENUMERATION_CAP = 9
CACHED_TREE_ORDER = 7

Edge = Tuple[int, int]
EdgeSet = FrozenSet[Edge]


@dataclass(frozen=True)
class ForestCountTable:
    """F_{k,j}: labelled forests on k vertices with exactly j trees, j = 1..k."""
    k: int
    counts: Tuple[int, ...]

    def __getitem__(self, j: int) -> int:
        if not (1 <= j <= self.k):
            raise DomainError(f"j must lie in 1..{self.k}, got {j!r}")
        return self.counts[j - 1]

    @property
    def total(self) -> int:
        return sum(self.counts)


# --------------------------- Cayley counts ---------------------------

def labelled_tree_count(l: int) -> int:
    """l^(l-2) labelled trees on l vertices; 1 for l = 1."""
    if l < 1:
        raise DomainError(f"l must be >= 1, got {l!r}")
    return 1 if l <= 2 else l ** (l - 2)


def trees_containing_tree(k: int, l: int) -> int:
    """Labelled trees on l vertices that contain a fixed labelled tree on k of them: k * l^(l-k-1)."""
    if not (1 <= k <= l):
        raise DomainError(f"need 1 <= k <= l, got k={k!r}, l={l!r}")
    if k == l:
        return 1
    return k * l ** (l - k - 1)


def trees_containing_forest(sizes: Sequence[int], l: int) -> int:
    """Labelled trees on l vertices containing a fixed forest with tree sizes k_1..k_r.

    Equals k_1 * ... * k_r * l^(l - k + r - 2) with k = sum of sizes.
    """
    sizes = list(sizes)
    if not sizes or min(sizes) < 1:
        raise DomainError(f"tree sizes must be positive, got {sizes!r}")
    k, r = sum(sizes), len(sizes)
    if k > l:
        raise DomainError(f"forest on {k} vertices does not fit in {l}")
    exponent = l - k + r - 2
    if exponent < 0:
        return 1  # the forest is already a spanning tree
    return math.prod(sizes) * l ** exponent


def cayley_forest_bound(sizes: Sequence[int], l: int) -> float:
    """(k/r)^r * l^(l-k+r-1) * (l-k+r-1)^(r-1), an upper bound on trees_containing_forest."""
    sizes = list(sizes)
    k, r = sum(sizes), len(sizes)
    if not sizes or k > l:
        raise DomainError(f"invalid forest sizes {sizes!r} for l={l!r}")
    return (k / r) ** r * float(l) ** (l - k + r - 1) * float(l - k + r - 1) ** (r - 1)


# --------------------------- Pruefer enumeration ---------------------------

def _edge_set(tree: nx.Graph) -> EdgeSet:
    return frozenset((min(a, b), max(a, b)) for a, b in tree.edges())


def prufer_to_tree(seq: Sequence[int], l: int) -> EdgeSet:
    """Decode a Pruefer sequence of length l-2 over 0..l-1 into the edge set of a labelled tree."""
    if len(seq) != max(l - 2, 0):
        raise DomainError(f"Pruefer sequence for l={l} must have length {max(l - 2, 0)}, got {len(seq)}")
    if l == 1:
        return frozenset()
    bad = [v for v in seq if not (0 <= v < l)]
    if bad:
        raise DomainError(f"Pruefer entry {bad[0]!r} outside 0..{l - 1}")
    return _edge_set(nx.from_prufer_sequence(list(seq)))


def enumerate_labelled_trees(l: int) -> Iterator[EdgeSet]:
    """Every labelled tree on vertices 0..l-1, once each."""
    if l < 1:
        raise DomainError(f"l must be >= 1, got {l!r}")
    if l > TREE_ENUMERATION_CAP:
        raise SizeCapError(f"tree enumeration is capped at l <= {TREE_ENUMERATION_CAP}, got {l}")
    for seq in product(range(l), repeat=max(l - 2, 0)):
        yield prufer_to_tree(seq, l)


@lru_cache(maxsize=None)
def _all_trees(l: int) -> Tuple[EdgeSet, ...]:
    return tuple(enumerate_labelled_trees(l))


def _normalise(edges: Iterable[Edge]) -> EdgeSet:
    return frozenset((min(a, b), max(a, b)) for a, b in edges)


def count_trees_containing(edges: Iterable[Edge], l: int) -> int:
    """Enumerate labelled trees on l vertices and count those containing every edge given."""
    required = _normalise(edges)
    trees = _all_trees(l) if l <= CACHED_TREE_ORDER else enumerate_labelled_trees(l)
    return sum(1 for tree in trees if required <= tree)


def nonisomorphic_trees(k: int) -> List[EdgeSet]:
    """One labelled representative on 0..k-1 of every unlabelled tree with k vertices."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k!r}")
    if k > TREE_ENUMERATION_CAP:
        raise SizeCapError(f"tree enumeration is capped at k <= {TREE_ENUMERATION_CAP}, got {k}")
    if k == 1:
        return [frozenset()]
    return [_edge_set(tree) for tree in nx.nonisomorphic_trees(k)]


# --------------------------- Forests ---------------------------

def forest_counts(k: int) -> ForestCountTable:
    """Count acyclic edge subsets of K_k by their number of components.

    Forests are grown one edge at a time in increasing edge order; an edge is
    only added when it joins two different components, so every forest is
    reached exactly once and cyclic subsets are never visited.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k!r}")
    if k > FOREST_COUNT_CAP:
        raise SizeCapError(f"forest enumeration is capped at k <= {FOREST_COUNT_CAP}, got {k}")
    all_edges = list(combinations(range(k), 2))
    counts = [0] * (k + 1)

    def grow(start: int, labels: Tuple[int, ...], num_components: int) -> None:
        counts[num_components] += 1
        for idx in range(start, len(all_edges)):
            a, b = all_edges[idx]
            la, lb = labels[a], labels[b]
            if la == lb:
                continue
            merged = tuple(la if x == lb else x for x in labels)
            grow(idx + 1, merged, num_components - 1)

    grow(0, tuple(range(k)), k)
    return ForestCountTable(k=k, counts=tuple(counts[1:]))
