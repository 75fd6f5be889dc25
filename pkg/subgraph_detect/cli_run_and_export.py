#!/usr/bin/env python3
"""Batch driver: generate graphs, evaluate statistics, calibrate tests, build
detection diagrams and boundary curves, run the likelihood lab and the
verification battery. Every file written gets a ``.manifest.json`` next to it.

Batch commands read ``key=value`` parameters from ``--config FILE`` and/or the
command line (command-line pairs win)::

    python -m subgraph_detect generate N=200 p0=0.01 n=20 p1=0.3 seed=7
    python -m subgraph_detect stat results/graph.txt "scan k=3 mode=exact"
    python -m subgraph_detect --threads 4 diagram --config diagram.env
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from subgraph_detect import __version__
from subgraph_detect.analytic import rate_params
from subgraph_detect.boundaries import REGIMES, boundary_curves
from subgraph_detect.bridge import compute_statistic, get_entry, parse_statistic_spec
from subgraph_detect.config import RunConfig, default_threads
from subgraph_detect.edgelist import read_edgelist, write_edgelist
from subgraph_detect.errors import DetectionError, DomainError, OutputError, exit_code_for
from subgraph_detect.graphs import gen_er, gen_planted
from subgraph_detect.inference import CALIBRATION_COLUMNS, TestSpec, calibrate, diagram
from subgraph_detect.likelihood import (
    EXHAUSTIVE_MAX_VERTICES,
    TruncationEvent,
    exhaustive_moments,
    mc_event_probability,
    mc_truncated_first_moment,
    risk_lower_bound,
    second_moment_hypergeometric,
)
from subgraph_detect.manifest import RunManifest, _now_utc_str, manifest_path_for
from subgraph_detect.verify import SCALES, run_battery

log = logging.getLogger("subgraph_detect")

FLOAT_FORMAT = "%.10g"
EXIT_VERIFY_FAILED = 5


# --------------------------- Helpers ---------------------------

def _config(args: argparse.Namespace) -> RunConfig:
    if args.config and str(args.config).endswith(".manifest.json"):
        return _replay_config(args)
    if args.config:
        return RunConfig.load(args.config, args.params)
    return RunConfig.from_pairs(args.params)


def _replay_config(args: argparse.Namespace) -> RunConfig:
    """Parameters of a recorded run, read back from its manifest."""
    manifest = RunManifest.load(args.config)
    if manifest.command != args.command:
        raise DomainError(f"{args.config} records a '{manifest.command}' run, not '{args.command}'")
    cfg = RunConfig(source=str(args.config))
    cfg.apply_overrides(manifest.to_config_text().splitlines())
    cfg.apply_overrides(args.params)
    return cfg


def _optional_float(cfg: RunConfig, key: str) -> Optional[float]:
    return cfg.get_float(key) if key in cfg else None


def _p0(cfg: RunConfig, N: int) -> float:
    """p0 given directly (``p0`` or ``p``) or through ``lambda0`` = N p0."""
    for key in ("p0", "p"):
        if key in cfg:
            return cfg.get_float(key)
    return cfg.get_float("lambda0") / N


def _tests(cfg: RunConfig) -> List[TestSpec]:
    # statistic specs contain spaces, so the list separator is ';'
    return [TestSpec.parse(text) for text in cfg.get_list("tests", sep=";")]


def _output_path(args: argparse.Namespace, name: str, ext: str) -> Path:
    return Path(args.out_dir) / f"{args.prefix}_{name}.{ext}"


def _write_csv(df: pd.DataFrame, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def _write_json(data: Dict[str, Any], path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path


def _seal(manifest: RunManifest, outputs: Sequence[Path]) -> List[str]:
    """Record output digests and write one manifest beside every output."""
    for path in outputs:
        manifest.record_output(path)
    manifest.finish()
    lines = []
    for path in outputs:
        manifest.write(manifest_path_for(path))
        lines.append(f"🗂️ Wrote {path}")
    return lines


def _fmt_value(value: float, integer_valued: bool) -> str:
    if integer_valued and float(value).is_integer():
        return str(int(value))
    return FLOAT_FORMAT % value


# --------------------------- Commands ---------------------------

def cmd_generate(args: argparse.Namespace) -> Tuple[str, int]:
    cfg = _config(args)
    N = cfg.get_int("N")
    p0 = _p0(cfg, N)
    seed = cfg.get_int("seed", 0)
    params: Dict[str, Any] = {"N": N, "p0": p0}
    lines = [f"🔍 Generating G({N}, {p0:g})"]
    if "n" in cfg:
        n, p1 = cfg.get_int("n"), cfg.get_float("p1")
        params.update(n=n, p1=p1)
        instance = gen_planted(N, p0, n, p1, seed)
        g = instance.graph
        lines[0] += f" with a planted G({n}, {p1:g})"
        lines.append(f"📝 Community: {' '.join(str(v) for v in instance.community)}")
        if 0.0 < p0 <= p1 < 1.0 and n < N:
            rp = rate_params(N, n, p0, p1)
            lines.append(f"📈 lambda0={rp.lambda0:g}, lambda1={rp.lambda1:g}, alpha={rp.alpha:.4f}, zeta={rp.zeta:.4g}")
    else:
        g = gen_er(N, p0, seed)
    lines.append(f"📈 {g.num_edges} edges")
    path = Path(cfg.get_str("out")) if "out" in cfg else _output_path(args, "graph", "txt")
    write_edgelist(g, path)
    manifest = RunManifest("generate", params, seed=seed)
    lines += _seal(manifest, [path])
    return "\n".join(lines), 0


def cmd_stat(args: argparse.Namespace) -> Tuple[str, int]:
    g = read_edgelist(args.file)
    name, params = parse_statistic_spec(" ".join(args.statistic))
    t0 = time.perf_counter()
    value = compute_statistic(name, g, **params)
    exec_ms = int((time.perf_counter() - t0) * 1000)
    integer_valued = get_entry(name).integer_valued
    value = int(value) if integer_valued else float(value)
    text = _fmt_value(value, integer_valued)
    # the value is the only thing on stdout
    print(text)
    lines: List[str] = []
    if not args.no_record:
        record = {"file": str(args.file), "statistic": name, "params": params,
                  "value": value, "N": g.num_vertices, "m": g.num_edges, "exec_ms": exec_ms}
        path = _write_json(record, _output_path(args, f"stat_{name}", "json"))
        manifest = RunManifest("stat", {"file": str(args.file), "statistic": name, **params})
        lines += _seal(manifest, [path])
    return "\n".join(lines), 0


def cmd_calibrate(args: argparse.Namespace) -> Tuple[str, int]:
    cfg = _config(args)
    N = cfg.get_int("N")
    p0 = _p0(cfg, N)
    level, R, seed = cfg.get_float("level", 0.05), cfg.get_int("R"), cfg.get_int("seed", 0)
    context: Dict[str, Any] = {"N": N, "lambda0": N * p0, "ktree_c": _optional_float(cfg, "ktree_c")}
    if "n" in cfg:
        context["n"] = cfg.get_int("n")
    if "lambda1" in cfg:
        context["lambda1"] = cfg.get_float("lambda1")
    rows, lines = [], [f"🔍 Calibrating at N={N}, p0={p0:g}, level={level:g}, R={R}"]
    for spec in _tests(cfg):
        bound = spec.bind(**context)
        result = calibrate(bound, (N, p0), level, R, seed, args.threads)
        rows.append(result.as_row())
        lines.append(f"✅ {bound.label}: t={result.t:g} (achieved level {result.achieved_level:.4f})")
    path = _write_csv(pd.DataFrame(rows, columns=CALIBRATION_COLUMNS), _output_path(args, "calibration", "csv"))
    manifest = RunManifest("calibrate", cfg.as_dict(), seed=seed)
    lines += _seal(manifest, [path])
    return "\n".join(lines), 0


def cmd_diagram(args: argparse.Namespace) -> Tuple[str, int]:
    cfg = _config(args)
    N, n = cfg.get_int("N"), cfg.get_int("n")
    lambda0s, lambda1s = cfg.get_float_list("lambda0"), cfg.get_float_list("lambda1")
    specs = _tests(cfg)
    level, R, seed = cfg.get_float("level", 0.05), cfg.get_int("R"), cfg.get_int("seed", 0)
    grid = diagram(
        (N, n), lambda0s, lambda1s, specs, level, R, seed,
        threads=args.threads, ktree_c=_optional_float(cfg, "ktree_c"),
        with_curves=cfg.get_bool("curves", True),
    )
    frame = grid.results_frame()
    lines = [f"🔍 Diagram N={N}, n={n}: {len(lambda0s)} x {len(lambda1s)} cells, {len(specs)} test(s), R={R}"]
    valid = grid.frame[grid.frame["valid"]]
    for test in grid.tests:
        sub = valid[valid["test"] == test]
        if sub.empty:
            lines.append(f"❌ {test}: no cell with p1 >= p0")
            continue
        best = sub.loc[sub["risk"].idxmin()]
        lines.append(f"📈 {test}: min risk {best['risk']:.3f} at lambda0={best['lambda0']:g}, lambda1={best['lambda1']:g}")
    outputs = [_write_csv(frame, _output_path(args, "diagram", "csv"))]
    if not grid.curves.empty:
        outputs.append(_write_csv(grid.curves, _output_path(args, "curves", "csv")))
    manifest = RunManifest("diagram", cfg.as_dict(), seed=seed)
    lines += _seal(manifest, outputs)
    return "\n".join(lines), 0


def cmd_curves(args: argparse.Namespace) -> Tuple[str, int]:
    cfg = _config(args)
    regime = cfg.get_str("regime", "poisson")
    N, n = cfg.get_int("N"), cfg.get_int("n")
    grid = cfg.get_float_list("lambda0") if "lambda0" in cfg else None
    curves = boundary_curves(regime, N, n, grid)
    lines = [f"🔍 Boundary curves ({regime}) for N={N}, n={n}"]
    for name, sub in curves.groupby("curve_name", sort=False):
        lines.append(f"📈 {name}: {len(sub)} points")
    path = _write_csv(curves, _output_path(args, f"curves_{regime}", "csv"))
    lines += _seal(RunManifest("curves", cfg.as_dict()), [path])
    return "\n".join(lines), 0


def cmd_lrlab(args: argparse.Namespace) -> Tuple[str, int]:
    cfg = _config(args)
    N, n = cfg.get_int("N"), cfg.get_int("n")
    p0, p1 = _p0(cfg, N), cfg.get_float("p1")
    trunc = TruncationEvent.parse(cfg.get_str("trunc", "none"), n=n, lambda1=p1 * n)
    seed = cfg.get_int("seed", 0)
    record: Dict[str, Any] = {"N": N, "n": n, "p0": p0, "p1": p1, "trunc": trunc.label}
    lines = [f"🔍 Likelihood lab N={N}, n={n}, p0={p0:g}, p1={p1:g}, event={trunc.label}"]
    if N <= EXHAUSTIVE_MAX_VERTICES and not cfg.get_bool("monte_carlo", False):
        moments = exhaustive_moments(N, n, p0, p1, trunc, exact=cfg.get_bool("exact", True))
        record.update(moments.as_dict())
        record["mode"] = "exhaustive"
        record["second_moment_hypergeometric"] = second_moment_hypergeometric(N, n, p0, p1)
        record["risk_lower_bound"] = risk_lower_bound(record["E0_Lt"], record["E0_Lt2"])
        lines.append(f"✅ E0[L]={record['E0_L']:.12g}, E0[L^2]={record['E0_L2']:.12g}")
        lines.append(f"✅ E0[L~]={record['E0_Lt']:.12g} = P_S(Gamma)={record['P_S_event']:.12g}")
        lines.append(f"📈 risk lower bound {record['risk_lower_bound']:.6g}, Bayes risk {record['bayes_risk']:.6g}")
    else:
        R = cfg.get_int("R")
        first = mc_truncated_first_moment(N, n, p0, p1, trunc, R, seed)
        event = mc_event_probability(n, p1, trunc, R, seed)
        record.update(mode="monte_carlo", R=R, seed=seed,
                      E0_Lt=first.mean, E0_Lt_se=first.se, P_S_event=event.mean, P_S_event_se=event.se,
                      second_moment_hypergeometric=second_moment_hypergeometric(N, n, p0, p1))
        lines.append(f"📈 E0[L~]={first.mean:.6g} (se {first.se:.2g}), P_S(Gamma)={event.mean:.6g} (se {event.se:.2g})")
    path = _write_json(record, _output_path(args, "lrlab", "json"))
    lines += _seal(RunManifest("lrlab", cfg.as_dict(), seed=seed), [path])
    return "\n".join(lines), 0


def cmd_verify(args: argparse.Namespace) -> Tuple[str, int]:
    cfg = _config(args)
    scale = cfg.get_str("scale", args.scale)
    seed = cfg.get_int("seed", args.seed)
    report = run_battery(scale, seed)
    frame = pd.DataFrame([{"check": r.name, "ok": r.ok, "detail": r.detail} for r in report.results])
    path = _write_csv(frame, _output_path(args, "verify", "csv"))
    lines = [report.text()]
    lines += _seal(RunManifest("verify", {"scale": scale}, seed=seed), [path])
    return "\n".join(lines), (0 if report.ok else EXIT_VERIFY_FAILED)


# --------------------------- Parser ---------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgraph-detect",
        description="Planted dense subgraph detection: simulation, tests, diagrams and oracles.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--threads", type=int, default=None,
                        help="Worker processes for Monte-Carlo replicates (default $SUBGRAPH_DETECT_THREADS or 1)")
    parser.add_argument("--verbose", action="store_true", help="Log progress at DEBUG level")
    parser.add_argument("--out-dir", default="results", help="Directory for outputs (default results)")
    parser.add_argument("--prefix", default=None,
                        help="Output file prefix (default: UTC timestamp such as 2026-01-01T120000)")
    sub = parser.add_subparsers(dest="command", required=True)

    def batch(name: str, help_text: str, func) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="Flat key=value config file, or a .manifest.json to replay a run")
        p.add_argument("params", nargs="*", help="key=value overrides")
        p.set_defaults(func=func)
        return p

    batch("generate", "Write an edge list of G(N,p0), optionally with a planted G(n,p1)", cmd_generate)

    stat = sub.add_parser("stat", help="Evaluate a registered statistic on an edge-list file")
    stat.add_argument("file", help="Edge-list file ('N m' header, 'i j' lines)")
    stat.add_argument("statistic", nargs="+", help="Statistic name and key=value parameters, e.g. scan k=3")
    stat.add_argument("--no-record", action="store_true", help="Print the value only, write no JSON record")
    stat.set_defaults(func=cmd_stat)

    batch("calibrate", "Monte-Carlo critical values under the null", cmd_calibrate)
    batch("diagram", "Calibrated risk over a (lambda0, lambda1) grid", cmd_diagram)
    batch("curves", f"Boundary curves CSV, regime one of {', '.join(REGIMES)}", cmd_curves)
    batch("lrlab", "Exact or Monte-Carlo likelihood-ratio moments", cmd_lrlab)
    verify = batch("verify", "Run the oracle and invariant battery", cmd_verify)
    verify.add_argument("--scale", choices=SCALES, default="quick")
    verify.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    report = sys.stderr if args.command == "stat" else sys.stdout

    t0 = time.perf_counter()
    try:
        args.threads = default_threads() if args.threads is None else args.threads
        if args.threads < 1:
            raise DomainError(f"--threads must be >= 1, got {args.threads}")
        if args.prefix is None:
            args.prefix = _now_utc_str("%Y-%m-%dT%H%M%S")
        text, code = args.func(args)
    except DetectionError as exc:
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except Exception as exc:
        log.exception("unexpected failure")
        print(f"❌ {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    elapsed = time.perf_counter() - t0

    if text:
        print(text, file=report)
    print(f"⏱️ Compute time: {elapsed:.2f}s", file=report)
    return code


if __name__ == "__main__":
    sys.exit(main())
