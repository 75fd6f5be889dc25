import json

import pytest

from subgraph_detect.bridge import REGISTRY, compute_statistic, parse_statistic_spec, resolve_params
from subgraph_detect.cache import LRUCache
from subgraph_detect.config import THREADS_ENV, RunConfig, default_threads
from subgraph_detect.edgelist import format_edgelist, parse_edgelist, read_edgelist, write_edgelist
from subgraph_detect.errors import (
    DomainError,
    FeasibilityError,
    InvariantError,
    MissingKeyError,
    OutputError,
    ParseError,
    SizeCapError,
    exit_code_for,
)
from subgraph_detect.graphs import Graph, gen_er
from subgraph_detect.hashing import canonical_json, derive_seed, sha256_bytes, sha256_json
from subgraph_detect.manifest import RunManifest, manifest_path_for


# ---- statistic registry ----

def test_registry_names():
    assert set(REGISTRY) == {"total_degree", "scan", "broad_scan", "largest_cc", "triangles", "ktree"}


def test_compute_statistic(k4, path5):
    assert compute_statistic("triangles", k4) == 4
    assert compute_statistic("largest_cc", path5) == 5
    assert compute_statistic("scan", k4, k="3", mode="exact") == 3
    assert compute_statistic("total_degree", path5) == 4
    assert compute_statistic("ktree", path5, k=3) == 3
    assert compute_statistic("broad_scan", k4, n=4, mode="exact") == pytest.approx(1.5)


def test_parse_statistic_spec():
    assert parse_statistic_spec("scan k=3 mode=exact") == ("scan", {"k": "3", "mode": "exact"})
    with pytest.raises(ParseError):
        parse_statistic_spec("")
    with pytest.raises(ParseError):
        parse_statistic_spec("scan 3")
    with pytest.raises(ParseError):
        parse_statistic_spec("clique k=3")


def test_resolve_params():
    assert resolve_params("scan", {"k": "4"}) == {"k": 4}
    assert resolve_params("scan", {}, context={"n": 9}) == {"k": 9}
    assert resolve_params("scan", {}, require=False) == {}
    k = resolve_params("ktree", {}, context={"N": 10 ** 5, "n": 50, "lambda0": 0.5, "lambda1": 0.8})["k"]
    assert 3 <= k <= 12
    with pytest.raises(DomainError):
        resolve_params("scan", {})
    with pytest.raises(ParseError):
        resolve_params("triangles", {"k": 3})
    with pytest.raises(ParseError):
        resolve_params("scan", {"k": "three"})


# ---- config ----

def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "run.env"
    path.write_text(
        "# diagram run\n"
        "export N=5000\n"
        "lambda0 = 0.5, 1.0,2.0\n"
        "tests=\"scan k=3; triangles\"\n"
        "verbose=yes\n"
        "\n",
        encoding="utf-8",
    )
    cfg = RunConfig.load(path, ["N=100", "level=0.01"])
    assert cfg.get_int("N") == 100
    assert cfg.get_float("level") == 0.01
    assert cfg.get_float_list("lambda0") == [0.5, 1.0, 2.0]
    assert cfg.get_list("tests", sep=";") == ["scan k=3", "triangles"]
    assert cfg.get_bool("verbose") is True
    assert cfg.get_int("R", 200) == 200
    assert "seed" not in cfg
    with pytest.raises(MissingKeyError) as info:
        cfg.get_int("R")
    assert "R" in str(info.value)
    with pytest.raises(ParseError):
        cfg.get_int("lambda0")


def test_config_errors(tmp_path):
    with pytest.raises(OutputError):
        RunConfig.load(tmp_path / "missing.env")
    bad = tmp_path / "bad.env"
    bad.write_text("just words\n", encoding="utf-8")
    with pytest.raises(ParseError):
        RunConfig.load(bad)
    with pytest.raises(ParseError):
        RunConfig.from_pairs(["flag=maybe"]).get_bool("flag")


def test_default_threads(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert default_threads() == 1
    monkeypatch.setenv(THREADS_ENV, "6")
    assert default_threads() == 6
    monkeypatch.setenv(THREADS_ENV, "many")
    with pytest.raises(ParseError):
        default_threads()


# ---- hashing and cache ----

def test_derive_seed():
    assert derive_seed(1, 0) == derive_seed(1, 0)
    assert derive_seed(1, 0) != derive_seed(1, 1)
    assert derive_seed(1, "null") != derive_seed(2, "null")
    assert 0 <= derive_seed(123, "x", 4) < 2 ** 64
    assert sha256_json({"a": 1, "b": 2}) == sha256_json({"b": 2, "a": 1})
    assert sha256_json({"a": 1}) == sha256_bytes(canonical_json({"a": 1}).encode("utf-8"))
    assert sha256_bytes(b"") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_lru_cache():
    cache = LRUCache(capacity=2)
    cache.set("a", 1)
    cache.set("b", 2)
    assert cache.get("a") == 1
    cache.set("c", 3)  # evicts b
    assert "b" not in cache and "a" in cache
    assert cache.get_or_compute("d", lambda: 4) == 4
    assert len(cache) == 2
    assert cache.hits == 1 and cache.misses == 1


# ---- errors ----

@pytest.mark.parametrize("exc, code", [
    (DomainError("x"), 2),
    (ParseError("x"), 2),
    (MissingKeyError("x"), 2),
    (OutputError("x"), 3),
    (FeasibilityError("x"), 4),
    (SizeCapError("x"), 4),
    (InvariantError("x"), 5),
    (RuntimeError("x"), 1),
])
def test_exit_codes(exc, code):
    assert exit_code_for(exc) == code


# ---- edge lists and manifests ----

def test_edgelist_format(path5):
    assert format_edgelist(path5) == "5 4\n0 1\n1 2\n2 3\n3 4\n"
    assert format_edgelist(Graph.empty(5)) == "5 0\n"
    assert parse_edgelist(format_edgelist(path5)) == path5
    assert parse_edgelist("3 0\n") == Graph.empty(3)


@pytest.mark.parametrize("text", ["", "5\n", "3 2\n0 1\n", "3 1\n0 5\n", "3 1\n0 x\n", "3 1\n0 1 2\n"])
def test_edgelist_rejects_malformed(text):
    with pytest.raises(ParseError):
        parse_edgelist(text)


def test_edgelist_files(tmp_path):
    g = gen_er(30, 0.2, 1)
    path = write_edgelist(g, tmp_path / "g.txt")
    assert read_edgelist(path) == g
    with pytest.raises(OutputError):
        read_edgelist(tmp_path / "nope.txt")


def test_manifest_roundtrip(tmp_path):
    out = tmp_path / "x.csv"
    out.write_text("a,b\n1,2\n", encoding="utf-8")
    manifest = RunManifest("diagram", {"N": "100", "R": "200"}, seed=3)
    manifest.record_output(out)
    manifest.finish()
    path = manifest.write(manifest_path_for(out))
    assert path.name == "x.csv.manifest.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["outputs"]["x.csv"] == manifest.outputs["x.csv"]
    assert data["params_digest"] == manifest.params_digest
    loaded = RunManifest.load(path)
    assert loaded.params == manifest.params and loaded.seed == 3
    assert "N=100" in loaded.to_config_text() and "seed=3" in loaded.to_config_text()
