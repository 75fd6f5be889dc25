"""
Statistic registry: stable names used by the CLI and result files, mapped to
the functions in ``statistics``. Parameters arrive as strings
(``"scan k=3 mode=exact"``) and are matched to the function signature by
introspection, so callers never depend on positional order.
"""
from __future__ import annotations

import inspect
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from subgraph_detect.analytic import ktree_default_k
from subgraph_detect.errors import DomainError, ParseError
from subgraph_detect.graphs import Graph
from subgraph_detect.statistics import (
    KTREE_NODE_BUDGET,
    broad_scan,
    ktree_count,
    largest_cc,
    scan,
    total_degree,
    triangles,
)


# --------------------------- Statistic functions ---------------------------

def _total_degree(g: Graph) -> int:
    return total_degree(g)


def _scan(g: Graph, k: int, mode: str = "exact", seed: int = 0) -> int:
    return scan(g, k, mode=mode, seed=seed).value


def _broad_scan(g: Graph, n: int, mode: str = "component", seed: int = 0) -> float:
    return broad_scan(g, n, mode=mode, seed=seed).value


def _largest_cc(g: Graph) -> int:
    return largest_cc(g).size


def _triangles(g: Graph) -> int:
    return triangles(g)


def _ktree(g: Graph, k: int, budget: int = KTREE_NODE_BUDGET) -> int:
    return ktree_count(g, k, budget=budget)


# context-derived defaults: the experiment (N, n, lambda0, lambda1) fixes k or n
def _scan_defaults(ctx: Mapping[str, Any]) -> Dict[str, Any]:
    return {"k": int(ctx["n"])} if "n" in ctx else {}


def _broad_scan_defaults(ctx: Mapping[str, Any]) -> Dict[str, Any]:
    return {"n": int(ctx["n"])} if "n" in ctx else {}


def _ktree_defaults(ctx: Mapping[str, Any]) -> Dict[str, Any]:
    if not {"N", "n", "lambda0", "lambda1"} <= set(ctx):
        return {}
    return {"k": ktree_default_k(ctx["N"], ctx["n"], ctx["lambda0"], ctx["lambda1"], c=ctx.get("ktree_c"))}


@dataclass(frozen=True)
class StatisticEntry:
    name: str
    func: Callable[..., float]
    integer_valued: bool = True
    context_defaults: Optional[Callable[[Mapping[str, Any]], Dict[str, Any]]] = None

    @property
    def parameters(self) -> Dict[str, inspect.Parameter]:
        params = dict(inspect.signature(self.func).parameters)
        params.pop("g", None)
        return params


REGISTRY: Dict[str, StatisticEntry] = {
    e.name: e
    for e in (
        StatisticEntry("total_degree", _total_degree),
        StatisticEntry("scan", _scan, context_defaults=_scan_defaults),
        StatisticEntry("broad_scan", _broad_scan, integer_valued=False, context_defaults=_broad_scan_defaults),
        StatisticEntry("largest_cc", _largest_cc),
        StatisticEntry("triangles", _triangles),
        StatisticEntry("ktree", _ktree, context_defaults=_ktree_defaults),
    )
}


def get_entry(name: str) -> StatisticEntry:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ParseError(f"unknown statistic {name!r}; registered: {', '.join(sorted(REGISTRY))}") from None


# --------------------------- Parameter handling ---------------------------

def _coerce(name: str, param: inspect.Parameter, value: Any) -> Any:
    ann = param.annotation
    kind = {"int": int, "float": float, "str": str}.get(ann if isinstance(ann, str) else getattr(ann, "__name__", ""))
    if kind is None or isinstance(value, kind) and not isinstance(value, bool):
        return value
    try:
        if kind is int and isinstance(value, float):
            if not value.is_integer():
                raise ValueError
            return int(value)
        return kind(value)
    except (TypeError, ValueError):
        raise ParseError(f"parameter {name}={value!r} is not a valid {kind.__name__}") from None


def parse_statistic_spec(text: str) -> Tuple[str, Dict[str, str]]:
    """``"scan k=3 mode=exact"`` -> ("scan", {"k": "3", "mode": "exact"})."""
    tokens = text.split()
    if not tokens:
        raise ParseError("empty statistic specification")
    name, params = tokens[0], {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ParseError(f"statistic parameter {tok!r} is not of the form key=value")
        key, value = tok.split("=", 1)
        params[key] = value
    get_entry(name)
    return name, params


def resolve_params(name: str, params: Mapping[str, Any],
                   context: Optional[Mapping[str, Any]] = None, require: bool = True) -> Dict[str, Any]:
    """Match ``params`` to the statistic's signature, fill context defaults, coerce types.

    With ``require=False`` parameters the experiment will supply later may stay unset.
    """
    entry = get_entry(name)
    signature = entry.parameters
    unknown = set(params) - set(signature)
    if unknown:
        raise ParseError(f"statistic {name!r} does not take {sorted(unknown)}; accepted: {sorted(signature)}")
    resolved: Dict[str, Any] = {}
    if context and entry.context_defaults:
        resolved.update({k: v for k, v in entry.context_defaults(context).items() if k in signature})
    resolved.update(params)
    missing = [p for p, spec in signature.items() if spec.default is inspect.Parameter.empty and p not in resolved]
    if missing and require:
        raise DomainError(f"statistic {name!r} needs parameter(s) {missing}")
    return {k: _coerce(k, signature[k], v) for k, v in resolved.items()}


def compute_statistic(name: str, g: Graph, **params: Any) -> float:
    """Evaluate a registered statistic on ``g``."""
    entry = get_entry(name)
    kwargs = resolve_params(name, params)
    value = entry.func(g, **kwargs)
    if isinstance(value, float) and math.isnan(value):
        raise DomainError(f"statistic {name!r} returned NaN")
    return value
