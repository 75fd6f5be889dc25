from itertools import combinations

import pytest

from subgraph_detect.errors import DomainError, FeasibilityError
from subgraph_detect.graphs import Graph, gen_er, gen_planted
from subgraph_detect.hashing import derive_seed
from subgraph_detect.statistics import (
    ComponentScanner,
    broad_scan,
    broad_scan_range,
    brute_force_ktrees,
    brute_force_scan,
    edges_within,
    ktree_count,
    largest_cc,
    scan,
    total_degree,
    triangles,
)


def _small_graphs(count, seed=0):
    for r in range(count):
        yield gen_er(10 + r % 6, 0.2 + 0.1 * (r % 3), derive_seed(seed, "graph", r))


def test_total_degree_and_edges_within(k4, triangle_with_tail):
    assert total_degree(k4) == 6
    assert total_degree(Graph.empty(3)) == 0
    assert edges_within(triangle_with_tail, [0, 1, 2, 3]) == 4
    assert edges_within(triangle_with_tail, []) == 0
    with pytest.raises(DomainError):
        edges_within(triangle_with_tail, [6])


def test_scan_small_cases(k4, path5, triangle_with_tail):
    assert scan(k4, 3).value == 3
    assert scan(path5, 3).value == 2
    assert scan(triangle_with_tail, 4).value == 4
    assert scan(triangle_with_tail, 3).witness == (0, 1, 2)
    assert scan(Graph.empty(4), 2).value == 0


def test_scan_whole_graph_and_domain(triangle_with_tail):
    res = scan(triangle_with_tail, 6, mode="component")
    assert res.value == 5 and res.exact
    with pytest.raises(DomainError):
        scan(triangle_with_tail, 0)
    with pytest.raises(DomainError):
        scan(triangle_with_tail, 7)
    with pytest.raises(DomainError):
        scan(triangle_with_tail, 3, mode="fast")


def test_scan_modes_against_brute_force():
    for g in _small_graphs(12):
        for k in range(3, 7):
            brute = brute_force_scan(g, k)
            exact = scan(g, k, "exact")
            greedy = scan(g, k, "greedy", seed=1)
            comp = scan(g, k, "component")
            assert exact.value == brute
            assert exact.value >= greedy.value >= comp.value
            assert edges_within(g, exact.witness) == exact.value
            assert len(exact.witness) == k


def test_exact_scan_is_capped():
    g = gen_er(60, 0.1, 5)
    assert scan(g, 3).exact
    with pytest.raises(FeasibilityError):
        scan(g, 5, mode="exact")
    assert scan(g, 5, mode="greedy").value >= scan(g, 5, mode="component").value


def test_greedy_finds_planted_clique():
    inst = gen_planted(200, 0.01, 10, 1.0, seed=11)
    res = scan(inst.graph, 10, mode="greedy", seed=2)
    assert res.value >= 45


def test_component_scanner_packs_components():
    # K4 on 0..3 and a path on 4..7
    g = Graph.from_edges(8, [(a, b) for a, b in combinations(range(4), 2)] + [(4, 5), (5, 6), (6, 7)])
    scanner = ComponentScanner(g)
    assert scanner.best(4).value == 6
    assert scanner.best(4).witness == (0, 1, 2, 3)
    assert scanner.best(6).value == 7


def test_broad_scan_range():
    assert broad_scan_range(1000, 10) == (5, 10)
    assert broad_scan_range(20, 10) == (5, 10)
    assert broad_scan_range(10 ** 6, 20) == (9, 20)
    assert broad_scan_range(10, 3) == (2, 3)


def test_broad_scan_exact_against_brute_force():
    for g in _small_graphs(6, seed=4):
        N, n = g.num_vertices, 8
        k_lo, k_hi = broad_scan_range(N, n)
        expected = max(brute_force_scan(g, k) / k for k in range(k_lo, k_hi + 1))
        res = broad_scan(g, n, mode="exact")
        assert res.value == pytest.approx(expected, abs=1e-12)
        assert k_lo <= res.k <= k_hi
        assert broad_scan(g, n, mode="component").value <= res.value + 1e-12


def test_broad_scan_domain(k4):
    with pytest.raises(DomainError):
        broad_scan(k4, 1)
    with pytest.raises(DomainError):
        broad_scan(k4, 3, mode="nope")


def test_largest_cc(path5, triangle_with_tail):
    assert largest_cc(path5) == largest_cc(path5)
    cc = largest_cc(path5)
    assert (cc.size, cc.edges, cc.min_label) == (5, 4, 0)
    cc = largest_cc(triangle_with_tail)
    assert (cc.size, cc.edges) == (5, 5)
    tie = largest_cc(Graph.from_edges(6, [(2, 3), (4, 5)]))
    assert (tie.size, tie.edges, tie.min_label) == (2, 1, 2)
    lone = largest_cc(Graph.empty(3))
    assert (lone.size, lone.edges, lone.min_label) == (1, 0, 0)


def test_triangles(k4, path5, triangle_with_tail):
    assert triangles(k4) == 4
    assert triangles(path5) == 0
    assert triangles(triangle_with_tail) == 1
    assert triangles(Graph.complete(6)) == 20
    for g in _small_graphs(6, seed=2):
        brute = sum(1 for a, b, c in combinations(range(g.num_vertices), 3)
                    if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c))
        assert triangles(g) == brute


def test_ktree_count_small_graphs(k4, path5):
    assert ktree_count(k4, 1) == 4
    assert ktree_count(k4, 2) == 6
    assert ktree_count(k4, 3) == 0
    assert ktree_count(path5, 3) == 3
    assert ktree_count(path5, 5) == 1
    with pytest.raises(DomainError):
        ktree_count(k4, 0)


def test_ktree_count_against_brute_force():
    for r in range(8):
        g = gen_er(9 + r % 4, 0.35, derive_seed(7, "ktree", r))
        for k in range(1, 6):
            assert ktree_count(g, k) == brute_force_ktrees(g, k)


def test_ktree_budget():
    g = gen_er(30, 0.3, 1)
    with pytest.raises(FeasibilityError):
        ktree_count(g, 5, budget=10)
