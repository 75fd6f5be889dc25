from itertools import combinations

import networkx as nx
import pytest

from subgraph_detect.combinatorics import (
    cayley_forest_bound,
    count_trees_containing,
    enumerate_labelled_trees,
    forest_counts,
    labelled_tree_count,
    nonisomorphic_trees,
    prufer_to_tree,
    trees_containing_forest,
    trees_containing_tree,
)
from subgraph_detect.errors import DomainError, SizeCapError
from subgraph_detect.graphs import Graph, is_forest


def test_labelled_tree_count_matches_enumeration():
    assert [labelled_tree_count(l) for l in range(1, 7)] == [1, 1, 3, 16, 125, 1296]
    for l in range(1, 8):
        trees = list(enumerate_labelled_trees(l))
        assert len(trees) == labelled_tree_count(l)
        assert len(set(trees)) == len(trees)


def test_enumerated_trees_are_spanning_trees():
    for tree in enumerate_labelled_trees(5):
        g = Graph.from_edges(5, tree)
        assert g.num_edges == 4 and is_forest(g)


def test_prufer_decoding():
    assert prufer_to_tree([], 2) == frozenset({(0, 1)})
    assert prufer_to_tree([3, 3], 4) == frozenset({(0, 3), (1, 3), (2, 3)})
    assert prufer_to_tree([0, 1, 2], 5) == frozenset({(0, 3), (0, 1), (1, 2), (2, 4)})
    with pytest.raises(DomainError):
        prufer_to_tree([0], 4)
    with pytest.raises(DomainError):
        prufer_to_tree([4, 0], 4)


def test_trees_containing_tree():
    assert trees_containing_tree(3, 3) == 1
    assert trees_containing_tree(1, 4) == labelled_tree_count(4)
    for l in range(2, 7):
        for k in range(1, l + 1):
            for shape in nonisomorphic_trees(k):
                assert count_trees_containing(shape, l) == trees_containing_tree(k, l)
    with pytest.raises(DomainError):
        trees_containing_tree(5, 4)


def test_trees_containing_forest():
    # two disjoint edges inside 4 vertices: 2 * 2 * 4^0 = 4 spanning trees
    assert trees_containing_forest([2, 2], 4) == 4
    assert count_trees_containing([(0, 1), (2, 3)], 4) == 4
    assert trees_containing_forest([3, 2], 6) == count_trees_containing([(0, 1), (1, 2), (3, 4)], 6)
    assert trees_containing_forest([1], 5) == labelled_tree_count(5)
    for sizes, l in [([2, 2], 5), ([3, 1, 2], 7), ([4], 6)]:
        assert trees_containing_forest(sizes, l) <= cayley_forest_bound(sizes, l) + 1e-9
    with pytest.raises(DomainError):
        trees_containing_forest([3, 3], 5)
    with pytest.raises(DomainError):
        trees_containing_forest([0, 2], 5)


def test_nonisomorphic_trees():
    # OEIS A000055
    assert [len(nonisomorphic_trees(k)) for k in range(1, 8)] == [1, 1, 1, 2, 3, 6, 11]
    for k in range(2, 7):
        shapes = [nx.Graph(list(t)) for t in nonisomorphic_trees(k)]
        assert all(nx.is_tree(s) and s.number_of_nodes() == k for s in shapes)
        for i, j in combinations(range(len(shapes)), 2):
            assert not nx.is_isomorphic(shapes[i], shapes[j])
        # every labelled tree has exactly one representative
        for tree in enumerate_labelled_trees(k):
            g = nx.Graph(list(tree))
            assert sum(nx.is_isomorphic(g, s) for s in shapes) == 1
    with pytest.raises(SizeCapError):
        nonisomorphic_trees(10)


def test_forest_counts():
    assert forest_counts(1).counts == (1,)
    assert forest_counts(3).counts == (3, 3, 1)
    # forests on 4 labelled vertices: 16 trees, 15 with two trees, 6 with three, 1 empty
    table = forest_counts(4)
    assert table.counts == (16, 15, 6, 1)
    assert table[1] == 16 and table.total == 38
    with pytest.raises(DomainError):
        table[5]


def test_forest_counts_monotone():
    for k in range(1, 8):
        table = forest_counts(k)
        assert table[1] == labelled_tree_count(k)
        assert table[k] == 1
        assert all(table[j] >= table[j + 1] for j in range(1, k))


def test_enumeration_caps():
    with pytest.raises(SizeCapError):
        forest_counts(9)
    with pytest.raises(SizeCapError):
        list(enumerate_labelled_trees(10))
