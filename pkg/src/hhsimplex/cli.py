"""Command line front end: ``family``, ``verify`` and ``subdivide``.

Exit codes: 0 success, 1 a verification check failed (the report is still
written), 2 invalid configuration, 3 degenerate geometry or a subdivision
level above the cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .convexfns import CATALOG_NAMES, NONCONVEX_NAMES, catalog
from .geometry import (DegenerateSimplexError, GeometryError, Simplex, barycenter,
                       build_delta_k, check_nondegenerate, load_vertices, proper_subsets,
                       random_simplex, volume)
from .quadrature import EvaluationError, QuadratureConfig
from .subdivision import LevelCapError, dr_level
from .verify import EXHAUSTIVE_MAX_N, dr_convergence_report, verify_instance

FAMILY_MAX_N = EXHAUSTIVE_MAX_N


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    dim: int = 2
    simplex: str = "standard"
    scale: float = 1.0
    seed: int = 0
    funcs: list[str] = field(default_factory=lambda: ["all"])
    method: str = "auto"
    samples: int = 100_000
    z: float = 3.0
    pmax: int = 4
    format: str = "json"
    include_nonconvex: bool = False
    workers: int = 1
    # run-time only; left out of the serialized config
    verbose: bool = False

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(self.method, self.samples, self.z, self.workers)

    def function_names(self) -> list[str]:
        if self.funcs == ["all"]:
            names = [n for n in CATALOG_NAMES if n not in NONCONVEX_NAMES]
        else:
            names = list(self.funcs)
        if self.include_nonconvex:
            names += [n for n in NONCONVEX_NAMES if n not in names]
        return names


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _default_seed() -> int:
    raw = os.environ.get("HH_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"HH_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="ambient dimension n (default 2)")
    common.add_argument("--simplex", default="standard",
                        help="standard | random | file:PATH (JSON array of vertex arrays)")
    common.add_argument("--scale", type=float, default=1.0, help="coordinate scale of random simplices")
    common.add_argument("--seed", type=int, default=None, help="master seed (default $HH_SEED or 0)")
    common.add_argument("--func", default="all", help="NAME[,NAME...] or all; names: " + ", ".join(CATALOG_NAMES))
    common.add_argument("--method", choices=("auto", "exact", "mc"), default="auto")
    common.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples per mean")
    common.add_argument("--z", type=float, default=3.0, help="Monte Carlo confidence multiplier")
    common.add_argument("--pmax", type=int, default=4, help="deepest subdivision level")
    common.add_argument("--out", default=None, help="output path (default <command>.<format>)")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--include-nonconvex", action="store_true",
                        help="add the non-convex control function")
    common.add_argument("--workers", type=int, default=1, help="Monte Carlo worker streams")
    common.add_argument("--verbose", action="store_true", help="progress on stdout")

    parser = argparse.ArgumentParser(prog="hhsimplex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("family", parents=[common], help="list every Delta^[K] of a simplex")
    sub.add_parser("verify", parents=[common], help="check the refined Hermite-Hadamard chain")
    sub.add_parser("subdivide", parents=[common], help="barycenter averages over subdivision levels")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    funcs = [s.strip() for s in args.func.split(",") if s.strip()]
    if not funcs:
        raise ConfigError("--func is empty")
    if funcs != ["all"]:
        unknown = [n for n in funcs if n not in CATALOG_NAMES]
        if unknown:
            raise ConfigError(f"unknown function(s) {unknown}; choose from {', '.join(CATALOG_NAMES)}")
    fmt = args.format or ("csv" if args.command == "subdivide" else "json")
    dim = args.dim if args.dim is not None else 2
    cfg = RunConfig(args.command, dim, args.simplex, args.scale, seed, funcs, args.method,
                    args.samples, args.z, args.pmax, fmt, args.include_nonconvex, args.workers,
                    args.verbose)
    if args.simplex.startswith("file:"):
        base = _read_simplex(args.simplex[5:])
        if args.dim is not None and args.dim != base.ambient_dim:
            raise ConfigError(f"--dim {args.dim} does not match the {base.ambient_dim}-dimensional file")
        if base.dim != base.ambient_dim:
            raise ConfigError(f"file holds {len(base)} vertices in R^{base.ambient_dim}; need n + 1")
        cfg.dim = base.ambient_dim
    elif args.simplex not in ("standard", "random"):
        raise ConfigError(f"--simplex must be standard, random or file:PATH, not {args.simplex!r}")
    if cfg.dim < 1:
        raise ConfigError("--dim must be >= 1")
    if cfg.samples < 2 or cfg.z <= 0 or cfg.workers < 1 or cfg.pmax < 0 or not cfg.scale > 0:
        raise ConfigError("need --samples >= 2, --z > 0, --workers >= 1, --pmax >= 0, --scale > 0")
    return cfg


def _read_simplex(path: str) -> Simplex:
    try:
        with open(path, encoding="utf-8") as fh:
            rows = json.load(fh)
        return load_vertices(rows)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read simplex file {path!r}: {exc}") from None
    except GeometryError as exc:
        raise ConfigError(f"bad simplex file {path!r}: {exc}") from None


def make_simplex(cfg: RunConfig) -> Simplex:
    if cfg.simplex == "standard":
        base = Simplex.standard(cfg.dim)
    elif cfg.simplex == "random":
        base = random_simplex(cfg.dim, np.random.default_rng([cfg.seed, 1]), cfg.scale)
    else:
        base = _read_simplex(cfg.simplex[5:])
    return check_nondegenerate(base)


def _config_record(cfg: RunConfig) -> dict:
    record = asdict(cfg)
    del record["verbose"]
    return record


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _dump_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def run_family(cfg: RunConfig) -> tuple[str, int]:
    if cfg.dim > FAMILY_MAX_N:
        raise ConfigError(f"family enumerates 2^(n+1) - 1 subsets; n must be <= {FAMILY_MAX_N}")
    base = make_simplex(cfg)
    b = barycenter(base)
    scale = base.max_edge_length()
    entries = []
    for K in proper_subsets(base.dim):
        dk = build_delta_k(base, K)
        entries.append({
            "K": list(K.members),
            "card": K.card,
            "dimension": dk.dim,
            "vertices": dk.vertices.tolist(),
            "volume": volume(dk),
            "barycenter": barycenter(dk).tolist(),
        })
    deviation = max(float(np.abs(np.array(e["barycenter"]) - b).max()) for e in entries)
    if cfg.format == "csv":
        header = ["K", "card", "dimension", "volume"] + [f"b{i}" for i in range(base.ambient_dim)]
        rows = [[";".join(map(str, e["K"])), e["card"], e["dimension"], _fmt(e["volume"])]
                + [_fmt(x) for x in e["barycenter"]] for e in entries]
        return _dump_csv(header, rows), 0
    doc = {
        "config": _config_record(cfg),
        "base": {"vertices": base.vertices.tolist(), "digest": base.digest(),
                 "volume": volume(base), "barycenter": b.tolist(), "max_edge_length": scale},
        "results": entries,
        "summary": {"count": len(entries), "max_barycenter_deviation": deviation},
    }
    return _dump_json(doc), 0


def _functions(cfg: RunConfig, n: int):
    by_name = {f.name: f for f in catalog(n, cfg.seed)}
    return [by_name[name] for name in cfg.function_names()]


def run_verify(cfg: RunConfig) -> tuple[str, int]:
    base = make_simplex(cfg)
    qcfg = cfg.quadrature()
    fns = _functions(cfg, base.dim)
    if cfg.method == "exact":
        nonpoly = [f.name for f in fns if f.polynomial is None]
        if nonpoly:
            raise ConfigError(f"--method exact needs polynomial functions; drop {nonpoly}")
    reports = []
    for f in fns:
        if cfg.verbose:
            print(f"verifying {f.name} on {base.dim}-simplex {base.digest()}", flush=True)
        reports.append(verify_instance(f, base, qcfg, cfg.seed))

    comps = [(r.function_id, c) for r in reports for c in r.comparisons()]
    failed = [(name, c) for name, c in comps if not c.passed]
    summary = {"pass": len(comps) - len(failed), "fail": len(failed),
               "max_violation": max((c.violation for _, c in comps), default=0.0),
               "failed": [f"{name}: {c.label}" for name, c in failed]}
    for name, c in failed[:20]:
        print(f"FAIL {name}: {c.label}: {c.left_label}={c.left.value:.12g} > "
              f"{c.right_label}={c.right.value:.12g} (tolerance {c.tolerance:.3g})", file=sys.stderr)
    if len(failed) > 20:
        print(f"... and {len(failed) - 20} more failures", file=sys.stderr)
    if failed:
        print(f"{len(failed)} of {len(comps)} comparisons failed", file=sys.stderr)

    if cfg.format == "csv":
        header = ["function_id", "check", "left", "right", "left_value", "right_value",
                  "slack", "tolerance", "verdict"]
        rows = [[name, c.label, c.left_label, c.right_label, _fmt(c.left.value), _fmt(c.right.value),
                 _fmt(c.slack), _fmt(c.tolerance), "pass" if c.passed else "fail"] for name, c in comps]
        text = _dump_csv(header, rows)
    else:
        text = _dump_json({"config": _config_record(cfg),
                           "simplex": {"vertices": base.vertices.tolist(), "digest": base.digest()},
                           "results": [r.to_dict() for r in reports],
                           "summary": summary})
    return text, 1 if failed else 0


def run_subdivide(cfg: RunConfig) -> tuple[str, int]:
    base = make_simplex(cfg)
    dr_level(base, cfg.pmax)  # cap check before any work
    fns = _functions(cfg, base.dim)
    qcfg = cfg.quadrature()
    series = []
    for f in fns:
        if cfg.verbose:
            print(f"subdividing for {f.name}", flush=True)
        series.append(dr_convergence_report(f, base, cfg.pmax, qcfg, cfg.seed))
    if cfg.format == "csv":
        header = ["p", "count"] + [f"avg_{s.function_id}" for s in series] + \
                 [f"ref_{s.function_id}" for s in series]
        rows = []
        for i in range(cfg.pmax + 1):
            rows.append([i, series[0].rows[i].count] if series else [i, (base.dim + 1) ** i])
            rows[-1] += [_fmt(s.rows[i].average) for s in series]
            rows[-1] += [_fmt(s.reference.value) for s in series]
        return _dump_csv(header, rows), 0
    doc = {"config": _config_record(cfg),
           "simplex": {"vertices": base.vertices.tolist(), "digest": base.digest()},
           "results": [s.to_dict() for s in series],
           "summary": {"pass": sum(s.passed for s in series),
                       "fail": sum(not s.passed for s in series)}}
    return _dump_json(doc), 0


COMMANDS = {"family": run_family, "verify": run_verify, "subdivide": run_subdivide}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        text, code = COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DegenerateSimplexError, LevelCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except EvaluationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = args.out or f"{cfg.command}.{cfg.format}"
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if cfg.verbose:
        print(f"wrote {out}", flush=True)
    return code


if __name__ == "__main__":
    sys.exit(main())
