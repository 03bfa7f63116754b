"""Experiment pipelines behind the CLI subcommands.

Each pipeline is a plain function taking an :class:`ExperimentConfig` and
writing delimited output (CSV/JSON) plus a companion figure into the output
directory. Every output file embeds the resolved scientific configuration
and the master seed, so results are self-describing; execution details
(thread count, output paths) are excluded from the echo so that identical
(config, seed) pairs produce byte-identical CSV/JSON at any parallelism.

Trial-level parallelism uses a process pool with per-trial substreams
derived from (master seed, trial index); results are aggregated in trial
order before writing.
"""

from __future__ import annotations

import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
from scipy.special import gammaln

from . import figures
from .dynamics import SimConfig, SimSummary, StopRule, default_stop, run
from .generators import (
    GnmParams,
    HsbmParams,
    Partition,
    enumerate_complete,
    gen_complete,
    gen_gnm,
    gen_hsbm,
    load_hypergraph,
    save_hypergraph,
)
from .hypergraph import BlockHypergraph, ExplicitHypergraph, Hypergraph
from .rng import derive_rng, derive_seed
from .state import distribution_from_dict, extract_clusters
from .analysis import (
    concordance_prob_mc,
    expected_first_concordant_size,
)
from .dynamics import is_absorbing_clustered

KINDS = (
    "single-run",
    "consensus-census",
    "sigma-sweep",
    "estar-curve",
    "jump-slope",
    "polarization",
    "generate",
)

# Substream key spaces (first spawn-key component) per purpose.
_KEY_STRUCTURE = 1
_KEY_TRIAL = 2
_KEY_INIT = 3
_KEY_SIZE = 4
_KEY_JUMP = 5


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment.

    Fields not applicable to a given kind are ignored by it; the defaults
    are the desk-scale presets, and ``apply_paper_scale`` switches the
    knobs that were shrunk for desk runtimes back to their full sizes.
    """

    kind: str
    seed: int = 0
    out_dir: str = "out"
    threads: int = 1
    # model
    confidence_bound: float = 1.0
    alpha: float = 1.0
    init: dict = field(default_factory=lambda: {"kind": "normal", "mean": 0.0, "std": 1.2})
    stop: dict | None = None
    condition_first_pick_concordant: bool = False
    cluster_tol: float = 1e-9
    zero_tol: float = 1e-12
    # structure
    hypergraph: dict = field(default_factory=lambda: {"kind": "complete", "nodes": 500})
    trials: int = 1
    # trajectory output
    trajectory_form: str = "long"
    max_snapshots: int = 1000
    # sigma sweep
    sigma_low: float = 0.9
    sigma_high: float = 1.1
    sigma_step: float = 0.004
    cutoff: int = 10_000
    convergence_threshold: float = 1e-5
    # first-concordant-size curve
    max_size: int = 500
    trials_per_size: int = 10_000
    # jump scaling
    sigmas: list = field(default_factory=lambda: [0.6, 0.8, 1.0, 1.2])
    hypergraph_count: int = 200
    trials_per_hypergraph: int = 200
    jump_nodes: int = 300
    # polarization
    community_sizes: list = field(default_factory=lambda: [500, 500])
    community_inits: list = field(
        default_factory=lambda: [
            {"kind": "uniform", "low": 1.8, "high": 2.2},
            {"kind": "uniform", "low": -2.2, "high": -1.8},
        ]
    )
    max_mixed_size: int | None = 2
    mixed_edges: bool = True
    # generate
    output_file: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; expected one of {KINDS}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @classmethod
    def from_dict(cls, spec: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(spec) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**spec)

    def science_dict(self) -> dict:
        """Resolved experiment description minus execution details."""
        out = dataclasses.asdict(self)
        out.pop("threads")
        out.pop("out_dir")
        return out

    def apply_paper_scale(self) -> None:
        """Swap desk-scale knobs for the full-size experiment parameters."""
        if self.kind == "consensus-census":
            self.trials = max(self.trials, 1000)
        elif self.kind == "sigma-sweep":
            self.hypergraph = {"kind": "complete", "nodes": 50_000}
            self.trials = max(self.trials, 20)
        elif self.kind == "jump-slope":
            self.jump_nodes = 1000
            self.trials_per_hypergraph = 500
        print(
            "warning: paper-scale parameters selected; runs may take hours "
            "(convergence time grows exponentially with node count when the "
            "initial variance exceeds the confidence bound)",
            file=sys.stderr,
        )


def build_hypergraph(spec: dict, rng: np.random.Generator) -> tuple[Hypergraph, int]:
    """Construct the hypergraph described by ``spec``.

    Returns the hypergraph and the number of skipped lines when loading
    from a file (0 otherwise).
    """
    kind = spec.get("kind")
    if kind == "complete":
        return gen_complete(int(spec["nodes"])), 0
    if kind == "complete-explicit":
        return enumerate_complete(int(spec["nodes"])), 0
    if kind == "gnm":
        nodes = int(spec["nodes"])
        if "uniform_count" in spec:
            per_size = {size: int(spec["uniform_count"]) for size in range(2, nodes + 1)}
        else:
            per_size = {int(k): int(v) for k, v in spec["edges_per_size"].items()}
        return gen_gnm(GnmParams(nodes, per_size), rng), 0
    if kind == "hsbm":
        partition = Partition.from_sizes([int(s) for s in spec["community_sizes"]])
        params = HsbmParams(
            partition,
            p=float(spec.get("p", 1.0)),
            q=float(spec.get("q", 1.0)),
            max_mixed_size=spec.get("max_mixed_size"),
        )
        return gen_hsbm(params, rng, mode=spec.get("mode", "implicit")), 0
    if kind == "file":
        h, skipped = load_hypergraph(spec["path"])
        if skipped:
            print(f"warning: skipped {skipped} undersized hyperedge line(s)", file=sys.stderr)
        return h, skipped
    raise ValueError(f"unknown hypergraph kind {kind!r}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: Iterable[tuple], cfg: ExperimentConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# seed: {cfg.seed}\n")
        fh.write(f"# config: {json.dumps(cfg.science_dict(), sort_keys=True)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path: Path, payload: dict, cfg: ExperimentConfig) -> None:
    body = {"seed": cfg.seed, "config": cfg.science_dict()}
    body.update(payload)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(body, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _sim_config(cfg: ExperimentConfig, seed: int, stop: StopRule, init: dict | None = None) -> SimConfig:
    return SimConfig(
        confidence_bound=cfg.confidence_bound,
        init=distribution_from_dict(init or cfg.init),
        stop=stop,
        seed=seed,
        alpha=cfg.alpha,
        condition_first_pick_concordant=cfg.condition_first_pick_concordant,
        cluster_tol=cfg.cluster_tol,
        zero_tol=cfg.zero_tol,
    )


def _resolve_stop(cfg: ExperimentConfig, h: Hypergraph) -> StopRule:
    if cfg.stop is not None:
        return StopRule.from_dict(cfg.stop)
    base = default_stop(h)
    return StopRule(
        absorbing_every=base.absorbing_every,
        discordance_below=1e-24,
        max_steps=1_000_000,
    )


# ---------------------------------------------------------------------------
# single run


def run_single(cfg: ExperimentConfig) -> tuple[SimSummary, dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h, _ = build_hypergraph(cfg.hypergraph, derive_rng(cfg.seed, _KEY_STRUCTURE))
    stop = _resolve_stop(cfg, h)
    sim = _sim_config(cfg, derive_seed(cfg.seed, _KEY_TRIAL, 0), stop)
    summary = run(h, sim, record_trajectory=True, max_snapshots=cfg.max_snapshots)

    paths = {
        "summary": out / "summary.json",
        "trajectory": out / "trajectory.csv",
        "figure": out / "trajectory.png",
    }
    write_json(paths["summary"], summary.to_json_dict(), cfg)
    traj = summary.trajectory
    if cfg.trajectory_form == "wide":
        header = ["t"] + [f"x{i}" for i in range(summary.node_count)]
        rows = (
            (int(t), *(float(v) for v in state))
            for t, state in zip(traj.times, traj.states)
        )
    else:
        header = ["t", "node", "opinion"]
        rows = (
            (int(t), node, float(traj.states[k, node]))
            for k, t in enumerate(traj.times)
            for node in range(summary.node_count)
        )
    write_csv(paths["trajectory"], header, rows, cfg)
    figures.trajectory_figure(
        paths["figure"],
        traj.times,
        traj.states,
        community_of=h.community_of if isinstance(h, BlockHypergraph) else None,
        provenance={"seed": cfg.seed, "kind": cfg.kind},
    )
    return summary, paths


# ---------------------------------------------------------------------------
# consensus census

_CENSUS_STATE: dict = {}


def _census_init(cfg_dict: dict) -> None:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    h, _ = build_hypergraph(cfg.hypergraph, derive_rng(cfg.seed, _KEY_STRUCTURE))
    _CENSUS_STATE["cfg"] = cfg
    _CENSUS_STATE["h"] = h
    _CENSUS_STATE["stop"] = _resolve_stop(cfg, h)


def _census_trial(trial: int) -> dict:
    cfg: ExperimentConfig = _CENSUS_STATE["cfg"]
    h = _CENSUS_STATE["h"]
    stop = _CENSUS_STATE["stop"]
    seed = derive_seed(cfg.seed, _KEY_TRIAL, trial)
    summary = run(h, _sim_config(cfg, seed, stop))
    single = len(summary.clusters) == 1
    return {
        "trial": trial,
        "seed": seed,
        "t_star": summary.t_star,
        "stop_reason": summary.stop_reason,
        "n_clusters": len(summary.clusters),
        "cluster_value": float(summary.clusters.values[0]) if single else float("nan"),
        "initial_mean": summary.mean_initial,
        "mean_drift": summary.mean_drift,
        "jump_total": summary.jump_total,
    }


def run_census(cfg: ExperimentConfig) -> tuple[list[dict], dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.threads > 1:
        with ProcessPoolExecutor(
            max_workers=cfg.threads, initializer=_census_init, initargs=(dataclasses.asdict(cfg),)
        ) as pool:
            records = list(pool.map(_census_trial, range(cfg.trials)))
    else:
        _census_init(dataclasses.asdict(cfg))
        records = [_census_trial(t) for t in range(cfg.trials)]
    records.sort(key=lambda r: r["trial"])

    header = [
        "trial",
        "seed",
        "t_star",
        "stop_reason",
        "n_clusters",
        "cluster_value",
        "initial_mean",
        "mean_drift",
        "jump_total",
    ]
    paths = {
        "census": out / "census.csv",
        "summary": out / "census_summary.json",
        "figure": out / "census.png",
    }
    write_csv(paths["census"], header, ([r[k] for k in header] for r in records), cfg)
    consensus = [r for r in records if r["n_clusters"] == 1 and r["stop_reason"] != "cutoff"]
    deviations = [
        abs(r["cluster_value"] - r["initial_mean"]) for r in consensus
    ]
    write_json(
        paths["summary"],
        {
            "trials": cfg.trials,
            "consensus_trials": len(consensus),
            "consensus_fraction": len(consensus) / cfg.trials,
            "max_value_deviation_from_initial_mean": max(deviations) if deviations else float("nan"),
            "max_mean_drift": max(r["mean_drift"] for r in records),
            "median_t_star": float(np.median([r["t_star"] for r in records])),
        },
        cfg,
    )
    figures.census_figure(
        paths["figure"],
        np.array([r["n_clusters"] for r in records]),
        provenance={"seed": cfg.seed, "kind": cfg.kind},
    )
    return records, paths


# ---------------------------------------------------------------------------
# sigma sweep

_SWEEP_STATE: dict = {}


def _sweep_init(cfg_dict: dict) -> None:
    cfg = ExperimentConfig.from_dict(cfg_dict)
    h, _ = build_hypergraph(cfg.hypergraph, derive_rng(cfg.seed, _KEY_STRUCTURE))
    _SWEEP_STATE["cfg"] = cfg
    _SWEEP_STATE["h"] = h


def _sweep_cell(item: tuple[int, int, float]) -> dict:
    sigma_index, trial, sigma = item
    cfg: ExperimentConfig = _SWEEP_STATE["cfg"]
    h = _SWEEP_STATE["h"]
    stop = StopRule(discordance_below=cfg.convergence_threshold, max_steps=cfg.cutoff)
    seed = derive_seed(cfg.seed, _KEY_TRIAL, sigma_index, trial)
    sim = _sim_config(cfg, seed, stop, init={"kind": "normal", "mean": 0.0, "std": sigma})
    summary = run(h, sim)
    return {
        "sigma": sigma,
        "trial": trial,
        "t_star": summary.t_star,
        "stop_reason": summary.stop_reason,
    }


def sweep_grid(cfg: ExperimentConfig) -> list[float]:
    count = int(round((cfg.sigma_high - cfg.sigma_low) / cfg.sigma_step))
    return [round(cfg.sigma_low + i * cfg.sigma_step, 12) for i in range(count + 1)]


def run_sweep(cfg: ExperimentConfig) -> tuple[list[dict], dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = sweep_grid(cfg)
    cells = [
        (sigma_index, trial, sigma)
        for sigma_index, sigma in enumerate(grid)
        for trial in range(cfg.trials)
    ]
    if cfg.threads > 1:
        with ProcessPoolExecutor(
            max_workers=cfg.threads, initializer=_sweep_init, initargs=(dataclasses.asdict(cfg),)
        ) as pool:
            records = list(pool.map(_sweep_cell, cells, chunksize=1))
    else:
        _sweep_init(dataclasses.asdict(cfg))
        records = [_sweep_cell(c) for c in cells]
    records.sort(key=lambda r: (r["sigma"], r["trial"]))

    paths = {"sweep": out / "sweep.csv", "figure": out / "sweep.png"}
    write_csv(
        paths["sweep"],
        ["sigma", "trial", "t_star", "stop_reason"],
        ([r["sigma"], r["trial"], r["t_star"], r["stop_reason"]] for r in records),
        cfg,
    )
    sigmas = np.array(grid)
    by_sigma = {s: [] for s in grid}
    for r in records:
        by_sigma[r["sigma"]].append(r["t_star"])
    mean_t = np.array([np.mean(by_sigma[s]) for s in grid])
    std_t = np.array([np.std(by_sigma[s]) for s in grid])
    figures.sweep_figure(
        paths["figure"],
        sigmas,
        mean_t,
        std_t,
        cfg.confidence_bound,
        cfg.cutoff,
        provenance={"seed": cfg.seed, "kind": cfg.kind},
    )
    return records, paths


# ---------------------------------------------------------------------------
# expected size of the first concordant hyperedge


def run_estar(cfg: ExperimentConfig) -> tuple[dict, dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    dist = distribution_from_dict(cfg.init)
    estimates = []
    for n in range(2, cfg.max_size + 1):
        est = concordance_prob_mc(
            n, dist, cfg.confidence_bound, cfg.trials_per_size, derive_rng(cfg.seed, _KEY_SIZE, n)
        )
        estimates.append(est)
    a_hat = np.array([e.a_hat for e in estimates])

    node_counts = np.arange(2, cfg.max_size + 1)
    expected = np.array(
        [expected_first_concordant_size(n, a_hat[: n - 1]) for n in node_counts]
    )
    slope, intercept = np.polyfit(node_counts, expected, 1)
    residual = expected - (slope * node_counts + intercept)
    total = expected - expected.mean()
    r_squared = 1.0 - float(residual @ residual) / float(total @ total)

    paths = {
        "concordance": out / "concordance.csv",
        "estar": out / "estar.csv",
        "fit": out / "estar_fit.json",
        "figure": out / "estar.png",
    }
    write_csv(
        paths["concordance"],
        ["n", "a_hat", "std_err", "trials"],
        ((e.size, e.a_hat, e.std_err, e.trials) for e in estimates),
        cfg,
    )
    write_csv(
        paths["estar"],
        ["N", "expected_size"],
        ((int(n), float(v)) for n, v in zip(node_counts, expected)),
        cfg,
    )
    fit = {"slope": float(slope), "intercept": float(intercept), "r_squared": r_squared}
    write_json(paths["fit"], fit, cfg)
    figures.estar_figure(
        paths["figure"], node_counts, expected, float(slope), float(intercept),
        provenance={"seed": cfg.seed, "kind": cfg.kind},
    )
    return {"fit": fit, "expected": expected, "node_counts": node_counts}, paths


# ---------------------------------------------------------------------------
# jump scaling

_LOG_EPS = 1e-300


def gnm_power_size_distribution(nodes: int, fraction: float) -> np.ndarray:
    """Hyperedge-size distribution of the random hypergraph whose requested
    size-n count is C(nodes, n) * fraction^n, normalized over n = 2..nodes.

    Those counts are astronomically large for mid-range fractions, so the
    distribution is evaluated in log space and hyperedges are sampled from
    it implicitly instead of materializing an edge list.
    """
    sizes = np.arange(2, nodes + 1, dtype=np.float64)
    log_binom = gammaln(nodes + 1) - gammaln(sizes + 1) - gammaln(nodes - sizes + 1)
    log_w = log_binom + sizes * math.log(max(fraction, _LOG_EPS))
    log_w -= log_w.max()
    weights = np.exp(log_w)
    return weights / weights.sum()


def _jump_hypergraph_stats(
    nodes: int,
    sigma: float,
    confidence_bound: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, float]:
    """(mean hyperedge size, mean first-step jump count) for one randomly
    drawn hypergraph of the power-law-count family, with fresh opinions and
    one uniformly drawn hyperedge per trial."""
    fraction = float(rng.uniform())
    while fraction == 0.0:
        fraction = float(rng.uniform())
    probs = gnm_power_size_distribution(nodes, fraction)
    sizes = np.arange(2, nodes + 1)
    mean_size = float(sizes @ probs)
    total_jumps = 0
    drawn = rng.choice(sizes, size=trials, p=probs)
    for n in drawn:
        values = rng.normal(0.0, sigma, size=int(n))
        mean = values.mean()
        ss = float(np.square(values - mean).sum())
        if ss / (n - 1) < confidence_bound:
            total_jumps += int(np.count_nonzero(np.abs(values - mean) > confidence_bound))
    return mean_size, total_jumps / trials


def run_jumps(cfg: ExperimentConfig) -> tuple[dict, dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    rows_by_sigma: dict[float, tuple[np.ndarray, np.ndarray]] = {}
    fits: dict[float, tuple[float, float]] = {}
    for sigma_index, sigma in enumerate(cfg.sigmas):
        mean_sizes = np.empty(cfg.hypergraph_count)
        mean_jumps = np.empty(cfg.hypergraph_count)
        for ell in range(cfg.hypergraph_count):
            rng = derive_rng(cfg.seed, _KEY_JUMP, sigma_index, ell)
            mean_sizes[ell], mean_jumps[ell] = _jump_hypergraph_stats(
                cfg.jump_nodes, sigma, cfg.confidence_bound, cfg.trials_per_hypergraph, rng
            )
            rows.append((sigma, ell, float(mean_sizes[ell]), float(mean_jumps[ell])))
        slope, intercept = np.polyfit(mean_sizes, mean_jumps, 1)
        fits[sigma] = (float(slope), float(intercept))
        rows_by_sigma[sigma] = (mean_sizes, mean_jumps)

    paths = {
        "jumps": out / "jumps.csv",
        "slopes": out / "jump_slopes.csv",
        "figure": out / "jumps.png",
    }
    write_csv(paths["jumps"], ["sigma", "hypergraph_id", "mean_edge_size", "mean_J0"], rows, cfg)
    write_csv(
        paths["slopes"],
        ["sigma", "slope", "intercept", "mean_J0_overall"],
        (
            (sigma, fits[sigma][0], fits[sigma][1], float(rows_by_sigma[sigma][1].mean()))
            for sigma in cfg.sigmas
        ),
        cfg,
    )
    figures.jumps_figure(
        paths["figure"], rows_by_sigma, fits, provenance={"seed": cfg.seed, "kind": cfg.kind}
    )
    return {"fits": fits, "rows_by_sigma": rows_by_sigma}, paths


# ---------------------------------------------------------------------------
# polarization


def run_polarization(cfg: ExperimentConfig) -> tuple[dict, dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    sizes = [int(s) for s in cfg.community_sizes]
    partition = Partition.from_sizes(sizes)
    h = gen_hsbm(
        HsbmParams(
            partition,
            p=1.0,
            q=1.0 if cfg.mixed_edges else 0.0,
            max_mixed_size=cfg.max_mixed_size,
        ),
        derive_rng(cfg.seed, _KEY_STRUCTURE),
        mode="implicit",
    )
    stop = _resolve_stop(cfg, h)
    inits = [distribution_from_dict(spec) for spec in cfg.community_inits]
    if len(inits) != len(sizes):
        raise ValueError("need one initial distribution per community")

    trials_out = []
    example_summary = None
    for trial in range(cfg.trials):
        init_rng = derive_rng(cfg.seed, _KEY_INIT, trial)
        x0 = np.concatenate([dist.sample(init_rng, s) for dist, s in zip(inits, sizes)])
        sim = _sim_config(cfg, derive_seed(cfg.seed, _KEY_TRIAL, trial), stop)
        summary = run(h, sim, x0=x0, record_trajectory=trial == 0, max_snapshots=cfg.max_snapshots)
        if trial == 0:
            example_summary = summary
        final = summary.final_state.opinions
        communities = []
        offset = 0
        for b, size in enumerate(sizes):
            block = slice(offset, offset + size)
            communities.append(
                {
                    "community": b,
                    "size": size,
                    "initial_mean": float(np.mean(x0[block])),
                    "final_value": float(np.mean(final[block])),
                    "final_spread": float(np.ptp(final[block])),
                }
            )
            offset += size
        clusters = extract_clusters(final, cfg.zero_tol)
        absorbing = (
            clusters.max_deviation <= cfg.zero_tol
            and is_absorbing_clustered(clusters, h, cfg.confidence_bound)
        )
        trials_out.append(
            {
                "trial": trial,
                "seed": sim.seed,
                "t_star": summary.t_star,
                "stop_reason": summary.stop_reason,
                "communities": communities,
                "clusters": summary.clusters.as_records(),
                "absorbing": absorbing,
            }
        )

    paths = {"summary": out / "polarization.json", "figure": out / "polarization.png"}
    absorbing_count = sum(1 for t in trials_out if t["absorbing"])
    write_json(
        paths["summary"],
        {
            "trials": trials_out,
            "aggregate": {
                "trials": cfg.trials,
                "absorbing_trials": absorbing_count,
                "absorbing_fraction": absorbing_count / cfg.trials,
            },
        },
        cfg,
    )
    figures.trajectory_figure(
        paths["figure"],
        example_summary.trajectory.times,
        example_summary.trajectory.states,
        community_of=h.community_of,
        title="Opinion trajectories by community",
        provenance={"seed": cfg.seed, "kind": cfg.kind},
    )
    return {"trials": trials_out, "paths": paths}, paths


# ---------------------------------------------------------------------------
# generate


def run_generate(cfg: ExperimentConfig) -> tuple[Hypergraph, dict[str, Path]]:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    h, _ = build_hypergraph(cfg.hypergraph, derive_rng(cfg.seed, _KEY_STRUCTURE))
    if not isinstance(h, ExplicitHypergraph):
        raise ValueError(
            "only explicit hypergraphs can be written to disk; "
            "use an explicit generator kind (gnm, hsbm with mode=explicit, complete-explicit)"
        )
    target = Path(cfg.output_file) if cfg.output_file else out / "hypergraph.txt"
    save_hypergraph(
        h,
        target,
        header_comments=[
            f"seed: {cfg.seed}",
            f"config: {json.dumps(cfg.science_dict(), sort_keys=True)}",
        ],
    )
    return h, {"hypergraph": target}
