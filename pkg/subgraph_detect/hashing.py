# subgraph_detect/hashing.py
import hashlib
import json
from pathlib import Path
from typing import Any, Union

_SEED_MASK = (1 << 64) - 1


def sha256_bytes(b: bytes) -> str:
    return hashlib.sha256(b).hexdigest()


def canonical_json(data: Any) -> str:
    # Stable canonical JSON string for keying
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)


def sha256_json(data: Any) -> str:
    return sha256_bytes(canonical_json(data).encode("utf-8"))


def sha256_file(path: Union[str, Path]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def derive_seed(master: int, *keys: Any) -> int:
    """64-bit child seed for the stream named by ``keys`` under ``master``.

    Replicate r of a run uses ``derive_seed(master, r)``; nested streams append
    more keys, e.g. ``derive_seed(master, "null", i0, "triangles")``.
    """
    digest = hashlib.sha256(
        canonical_json({"master": int(master), "keys": list(keys)}).encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "big") & _SEED_MASK
