import pytest

from subgraph_detect.graphs import Graph


@pytest.fixture
def k4():
    return Graph.complete(4)


@pytest.fixture
def path5():
    return Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])


@pytest.fixture
def triangle_with_tail():
    # triangle 0-1-2, pendant path 2-3-4, isolated vertex 5
    return Graph.from_edges(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)])


@pytest.fixture
def write_edgelist_file(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write
