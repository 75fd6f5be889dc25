# subgraph_detect/manifest.py
"""Run manifest written next to every output: command, parameters, master
seed, package version, UTC timestamps and sha256 digests of the outputs."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Optional, Union

from subgraph_detect import __version__
from subgraph_detect.errors import OutputError, ParseError
from subgraph_detect.hashing import sha256_file, sha256_json


def _now_utc_str(fmt: str = "%Y-%m-%dT%H:%M:%SZ") -> str:
    return datetime.now(timezone.utc).strftime(fmt)


@dataclass
class RunManifest:
    command: str
    params: Dict[str, Any]
    seed: Optional[int] = None
    version: str = __version__
    started_utc: str = field(default_factory=_now_utc_str)
    finished_utc: Optional[str] = None
    outputs: Dict[str, str] = field(default_factory=dict)

    @property
    def params_digest(self) -> str:
        return sha256_json({"command": self.command, "params": self.params, "seed": self.seed})

    def record_output(self, path: Union[str, Path]) -> None:
        path = Path(path)
        self.outputs[path.name] = sha256_file(path)

    def finish(self) -> None:
        self.finished_utc = _now_utc_str()

    def to_json(self) -> str:
        data = asdict(self)
        data["params_digest"] = self.params_digest
        return json.dumps(data, indent=2, sort_keys=True, default=str) + "\n"

    def to_config_text(self) -> str:
        """The parameters as a flat key=value file that reproduces the run."""
        lines = [f"{k}={v}" for k, v in sorted(self.params.items()) if v is not None]
        if self.seed is not None and "seed" not in self.params:
            lines.append(f"seed={self.seed}")
        return "\n".join(lines) + "\n"

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_json(), encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write manifest {path}: {exc}") from exc
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunManifest":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise OutputError(f"cannot read manifest {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"manifest {path} is not valid JSON: {exc}") from exc
        data.pop("params_digest", None)
        return cls(**data)


def manifest_path_for(output: Union[str, Path]) -> Path:
    """``results/x.csv`` -> ``results/x.csv.manifest.json``."""
    output = Path(output)
    return output.with_name(output.name + ".manifest.json")
