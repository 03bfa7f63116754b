"""Command-line interface for the experiment pipelines.

Subcommands: generate, run, census, sweep-sigma, estar, jumps,
polarization. Each accepts a JSON config file (--config); individual flags
override config fields, and the defaults are desk-scale presets that run
in minutes. Exit codes: 0 success, 1 error, 2 cutoff without convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    ExperimentConfig,
    run_census,
    run_estar,
    run_generate,
    run_jumps,
    run_polarization,
    run_single,
    run_sweep,
)

_RUN_PRESETS = {
    "complete-normal": {
        "hypergraph": {"kind": "complete", "nodes": 500},
        "init": {"kind": "normal", "mean": 0.0, "std": 1.2},
        "condition_first_pick_concordant": True,
    },
    "sparse-uniform": {
        "hypergraph": {"kind": "gnm", "nodes": 1000, "uniform_count": 100},
        "init": {"kind": "uniform", "low": -2.0, "high": 2.0},
    },
    "sparse-normal": {
        "hypergraph": {"kind": "gnm", "nodes": 1000, "uniform_count": 100},
        "init": {"kind": "normal", "mean": 0.0, "std": 1.2},
    },
}

_KIND_DEFAULTS = {
    "run": {"kind": "single-run"},
    "census": {
        "kind": "consensus-census",
        "hypergraph": {"kind": "complete", "nodes": 200},
        "trials": 100,
    },
    "sweep-sigma": {
        "kind": "sigma-sweep",
        "hypergraph": {"kind": "complete", "nodes": 2000},
        "trials": 20,
    },
    "estar": {"kind": "estar-curve"},
    "jumps": {"kind": "jump-slope"},
    "polarization": {"kind": "polarization", "trials": 1},
    "generate": {
        "kind": "generate",
        "hypergraph": {"kind": "gnm", "nodes": 50, "uniform_count": 20},
    },
}


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    parser.add_argument("--config", type=Path, default=None, help="JSON experiment config")
    parser.add_argument("--out-dir", type=Path, default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=None, help="trial-level worker processes")
    parser.add_argument(
        "--paper-scale",
        action="store_true",
        help="full-size experiment parameters (slow; desk-scale is the default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperbcm",
        description=(
            "Asynchronous bounded-confidence opinion dynamics on hypergraphs: "
            "seeded, reproducible experiments emitting CSV/JSON plus figures."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a hypergraph and write it as text")
    _common_flags(p)
    p.add_argument("--out", type=Path, default=None, help="hypergraph file path")

    p = sub.add_parser("run", help="one simulation: trajectory CSV, summary JSON, figure")
    _common_flags(p)
    p.add_argument("--preset", choices=sorted(_RUN_PRESETS), default=None)
    p.add_argument("--hypergraph-file", type=Path, default=None, help="run on a hypergraph file")
    p.add_argument("--nodes", type=int, default=None, help="node count for generated structures")
    p.add_argument("--wide", action="store_true", help="wide trajectory CSV (t,x0,...,xN-1)")

    p = sub.add_parser("census", help="repeated runs; cluster census per trial")
    _common_flags(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--nodes", type=int, default=None)

    p = sub.add_parser("sweep-sigma", help="convergence time across initial-opinion spreads")
    _common_flags(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--sigma-low", type=float, default=None)
    p.add_argument("--sigma-high", type=float, default=None)
    p.add_argument("--sigma-step", type=float, default=None)
    p.add_argument("--cutoff", type=int, default=None)

    p = sub.add_parser("estar", help="expected first-concordant-hyperedge size vs node count")
    _common_flags(p)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--trials-per-size", type=int, default=None)

    p = sub.add_parser("jumps", help="first-step opinion jumps vs mean hyperedge size")
    _common_flags(p)
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--hypergraph-count", type=int, default=None)
    p.add_argument("--trials-per-hypergraph", type=int, default=None)

    p = sub.add_parser("polarization", help="community-structured run with echo-chamber report")
    _common_flags(p)
    p.add_argument("--trials", type=int, default=None)

    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    spec = dict(_KIND_DEFAULTS[args.command])
    spec["hypergraph"] = dict(spec.get("hypergraph", {"kind": "complete", "nodes": 500}))
    if getattr(args, "preset", None):
        for key, value in _RUN_PRESETS[args.preset].items():
            spec[key] = json.loads(json.dumps(value))
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            file_spec = json.load(fh)
        kind = spec["kind"]
        spec.update(file_spec)
        spec.setdefault("kind", kind)
        if file_spec.get("kind", kind) != kind:
            raise ValueError(
                f"config kind {file_spec['kind']!r} does not match subcommand ({kind!r})"
            )

    overrides = {
        "seed": args.seed,
        "out_dir": None if args.out_dir is None else str(args.out_dir),
        "threads": args.threads,
        "trials": getattr(args, "trials", None),
        "sigma_low": getattr(args, "sigma_low", None),
        "sigma_high": getattr(args, "sigma_high", None),
        "sigma_step": getattr(args, "sigma_step", None),
        "cutoff": getattr(args, "cutoff", None),
        "max_size": getattr(args, "max_size", None),
        "trials_per_size": getattr(args, "trials_per_size", None),
        "hypergraph_count": getattr(args, "hypergraph_count", None),
        "trials_per_hypergraph": getattr(args, "trials_per_hypergraph", None),
        "output_file": None if getattr(args, "out", None) is None else str(args.out),
    }
    for key, value in overrides.items():
        if value is not None:
            spec[key] = value
    if getattr(args, "nodes", None) is not None:
        if args.command == "jumps":
            spec["jump_nodes"] = args.nodes
        else:
            spec["hypergraph"] = dict(spec["hypergraph"])
            spec["hypergraph"]["nodes"] = args.nodes
    if getattr(args, "hypergraph_file", None) is not None:
        spec["hypergraph"] = {"kind": "file", "path": str(args.hypergraph_file)}
    if getattr(args, "wide", False):
        spec["trajectory_form"] = "wide"

    cfg = ExperimentConfig.from_dict(spec)
    if args.paper_scale:
        cfg.apply_paper_scale()
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "generate":
            h, paths = run_generate(cfg)
            print(f"wrote {paths['hypergraph']} ({h.node_count} nodes, {h.edge_count()} hyperedges)")
            return 0
        if args.command == "run":
            summary, paths = run_single(cfg)
            print(
                f"stop={summary.stop_reason} t_star={summary.t_star} "
                f"clusters={len(summary.clusters)} mean_drift={summary.mean_drift:.3e}"
            )
            for p in paths.values():
                print(f"wrote {p}")
            return 2 if summary.stop_reason == "cutoff" else 0
        if args.command == "census":
            records, paths = run_census(cfg)
            consensus = sum(1 for r in records if r["n_clusters"] == 1 and r["stop_reason"] != "cutoff")
            print(f"consensus in {consensus}/{len(records)} trials")
            for p in paths.values():
                print(f"wrote {p}")
            return 0
        if args.command == "sweep-sigma":
            records, paths = run_sweep(cfg)
            cut = sum(1 for r in records if r["stop_reason"] == "cutoff")
            print(f"{len(records)} runs, {cut} hit the cutoff")
            for p in paths.values():
                print(f"wrote {p}")
            return 0
        if args.command == "estar":
            result, paths = run_estar(cfg)
            fit = result["fit"]
            print(f"linear fit: slope={fit['slope']:.4f} r_squared={fit['r_squared']:.4f}")
            for p in paths.values():
                print(f"wrote {p}")
            return 0
        if args.command == "jumps":
            result, paths = run_jumps(cfg)
            for sigma, (slope, _) in sorted(result["fits"].items()):
                print(f"std={sigma:g}: slope={slope:.5f}")
            for p in paths.values():
                print(f"wrote {p}")
            return 0
        if args.command == "polarization":
            result, paths = run_polarization(cfg)
            trials = result["trials"]
            absorbing = sum(1 for t in trials if t["absorbing"])
            print(f"absorbing polarized state in {absorbing}/{len(trials)} trials")
            for p in paths.values():
                print(f"wrote {p}")
            return 2 if any(t["stop_reason"] == "cutoff" for t in trials) else 0
        raise AssertionError(f"unhandled command {args.command}")  # pragma: no cover
    except (ValueError, OSError, RuntimeError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
