"""Asynchronous bounded-confidence dynamics on hypergraphs.

One step: draw a hyperedge uniformly at random; if the discordance of its
members' opinions is strictly below the confidence bound, every member
adopts the hyperedge's mean opinion, otherwise nothing changes. Time
advances either way. The mean opinion is conserved exactly by the update
rule, and the discordance of any superset of an updated hyperedge never
increases, so the discordance of the full node set is non-increasing along
a trajectory.

Update means are computed with exactly rounded summation (math.fsum) and
written bit-identically to every member, which keeps genuine opinion
clusters exactly collapsed and the cumulative mean drift at rounding level
over millions of steps.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .hypergraph import BlockHypergraph, CompleteHypergraph, ExplicitHypergraph, Hypergraph
from .rng import derive_rng
from .state import (
    ClusterSet,
    InitialDistribution,
    OpinionState,
    distribution_from_dict,
    extract_clusters,
)

_FIRST_PICK_ATTEMPT_CAP = 10_000_000
_STOP_REASONS = ("converged", "absorbing", "cutoff")


def discordance(members: Iterable[int] | np.ndarray, state: OpinionState | np.ndarray, alpha: float = 1.0) -> float:
    """Discordance of a hyperedge: (1/(|e|-1))^alpha * sum((x_i - mean)^2).

    At alpha = 1 this is the unbiased sample variance of the members'
    opinions. Computed with Welford's one-pass streaming algorithm.
    """
    opinions = state.opinions if isinstance(state, OpinionState) else np.asarray(state, dtype=np.float64)
    idx = np.asarray(members, dtype=np.int64)
    if idx.size < 2:
        raise ValueError(f"hyperedge must have at least 2 members, got {idx.size}")
    count = 0
    mean = 0.0
    m2 = 0.0
    for value in opinions[idx]:
        count += 1
        delta = value - mean
        mean += delta / count
        m2 += delta * (value - mean)
    if alpha == 1.0:
        return m2 / (count - 1)
    return (count - 1) ** (-alpha) * m2


def _edge_stats(values: np.ndarray, alpha: float) -> tuple[float, float]:
    """(raw sum of squares about the mean, discordance) for edge values."""
    mean = values.mean()
    ss = float(np.square(values - mean).sum())
    n = values.size
    if alpha == 1.0:
        return ss, ss / (n - 1)
    return ss, (n - 1) ** (-alpha) * ss


@dataclass(frozen=True)
class StopRule:
    """Composite stopping rule; the run halts when any active clause fires.

    * ``absorbing_every``: test for an absorbing state every K steps.
    * ``discordance_below``: stop once the discordance of the full node set
      drops below this threshold (the empirical convergence time).
    * ``max_steps``: hard cutoff, reported as such and never conflated with
      convergence.
    """

    absorbing_every: int | None = None
    discordance_below: float | None = None
    max_steps: int | None = None

    def __post_init__(self) -> None:
        if self.absorbing_every is not None and self.absorbing_every < 1:
            raise ValueError("absorbing_every must be >= 1")
        if self.discordance_below is not None and self.discordance_below < 0:
            raise ValueError("discordance_below must be >= 0")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be >= 0")

    @property
    def active(self) -> bool:
        return any(
            v is not None
            for v in (self.absorbing_every, self.discordance_below, self.max_steps)
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, spec: dict) -> "StopRule":
        return cls(
            absorbing_every=spec.get("absorbing_every"),
            discordance_below=spec.get("discordance_below"),
            max_steps=spec.get("max_steps"),
        )


def default_stop(h: Hypergraph, discordance_below: float | None = None, max_steps: int | None = None) -> StopRule:
    """Stop rule with an absorbing-check cadence matched to the hypergraph.

    Explicit hypergraphs are scanned every |E| steps, which amortizes the
    O(total edge size) scan to O(1) per step; implicit representations use
    a short cadence because their check is a cheap cluster extraction.
    """
    if isinstance(h, ExplicitHypergraph):
        cadence = max(1, h.edge_count())
    else:
        cadence = 64
    return StopRule(
        absorbing_every=cadence,
        discordance_below=discordance_below,
        max_steps=max_steps,
    )


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a run besides the hypergraph itself."""

    confidence_bound: float
    init: InitialDistribution
    stop: StopRule
    seed: int = 0
    alpha: float = 1.0
    condition_first_pick_concordant: bool = False
    cluster_tol: float = 1e-9
    zero_tol: float = 1e-12

    def __post_init__(self) -> None:
        if not self.confidence_bound > 0:
            raise ValueError("confidence_bound must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not self.stop.active:
            raise ValueError("stop rule has no active condition")

    def to_dict(self) -> dict:
        return {
            "confidence_bound": self.confidence_bound,
            "alpha": self.alpha,
            "init": self.init.to_dict(),
            "stop": self.stop.to_dict(),
            "seed": self.seed,
            "condition_first_pick_concordant": self.condition_first_pick_concordant,
            "cluster_tol": self.cluster_tol,
            "zero_tol": self.zero_tol,
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "SimConfig":
        return cls(
            confidence_bound=float(spec["confidence_bound"]),
            init=distribution_from_dict(spec["init"]),
            stop=StopRule.from_dict(spec.get("stop", {})),
            seed=int(spec.get("seed", 0)),
            alpha=float(spec.get("alpha", 1.0)),
            condition_first_pick_concordant=bool(spec.get("condition_first_pick_concordant", False)),
            cluster_tol=float(spec.get("cluster_tol", 1e-9)),
            zero_tol=float(spec.get("zero_tol", 1e-12)),
        )


@dataclass
class StepOutcome:
    """Result of one asynchronous step."""

    selected: np.ndarray
    updated: bool
    jumps: int


def apply_update(
    state: OpinionState,
    members: np.ndarray,
    confidence_bound: float,
    alpha: float = 1.0,
) -> StepOutcome:
    """Apply the update rule for a given hyperedge (in place).

    If the members' discordance is strictly below the confidence bound,
    all of them adopt their exactly rounded mean opinion; otherwise the
    state is unchanged. Time advances by one either way. ``jumps`` counts
    members whose opinion moved by more than the confidence bound.
    """
    members = np.asarray(members, dtype=np.int64)
    x = state.opinions
    values = x[members]
    _, d = _edge_stats(values, alpha)
    state.time += 1
    if d < confidence_bound:
        new_value = math.fsum(values) / values.size
        jumps = int(np.count_nonzero(np.abs(values - new_value) > confidence_bound))
        x[members] = new_value
        return StepOutcome(members, True, jumps)
    return StepOutcome(members, False, 0)


def step(h: Hypergraph, state: OpinionState, cfg: SimConfig, rng: np.random.Generator) -> StepOutcome:
    """Draw one hyperedge uniformly and apply the update rule."""
    members = h.sample_edge(rng)
    return apply_update(state, members, cfg.confidence_bound, cfg.alpha)


def is_absorbing_explicit(
    h: ExplicitHypergraph,
    state: OpinionState | np.ndarray,
    confidence_bound: float,
    zero_tol: float = 1e-12,
    alpha: float = 1.0,
) -> bool:
    """True iff every listed hyperedge is discordant or internally unanimous.

    Unanimity is certified as discordance <= zero_tol; floating point cannot
    certify an exact zero.
    """
    opinions = state.opinions if isinstance(state, OpinionState) else np.asarray(state, dtype=np.float64)
    for members in h.iter_edges():
        _, d = _edge_stats(opinions[members], alpha)
        if d < confidence_bound and d > zero_tol:
            return False
    return True


def is_absorbing_clustered(
    clusters: ClusterSet,
    h: CompleteHypergraph | BlockHypergraph,
    confidence_bound: float,
) -> bool:
    """Decide absorption of an exactly clustered state without enumeration.

    On a complete hypergraph the least discordant hyperedge that mixes
    clusters consists of one whole cluster plus a single outsider, giving
    discordance (v_i - v_j)^2 / (N_i + 1); the state is absorbing iff that
    minimum over ordered cluster pairs is >= the confidence bound (or there
    is a single cluster). On a block hypergraph the same criterion applies
    per community (each community is a complete sub-hypergraph), and
    cross-community cluster pairs are constrained by the mixed-edge size
    cap, giving minimum discordance (v_i - v_j)^2 / min(cap, N_i + 1).

    Only the sample-variance discordance (alpha = 1) is supported.
    """
    if clusters.max_deviation > clusters.tol:
        raise ValueError("not a clustered state")
    m = len(clusters)
    if m <= 1:
        return True
    values = clusters.values
    sizes = clusters.sizes
    if isinstance(h, CompleteHypergraph):
        return _pairs_discordant(values, sizes + 1, confidence_bound)
    if not isinstance(h, BlockHypergraph):
        raise TypeError("implicit representations only; use is_absorbing_explicit")
    if clusters.labels is None:
        raise ValueError("block-hypergraph check needs per-node cluster labels")

    # Within each community: complete sub-hypergraph over its own members.
    labels = clusters.labels
    for b in range(h.community_count):
        members = h.community_members(b)
        local = labels[members]
        local_ids, local_sizes = np.unique(local, return_counts=True)
        if local_ids.size > 1:
            if not _pairs_discordant(values[local_ids], local_sizes + 1, confidence_bound):
                return False
    if not h.mixed_allowed:
        return True

    # Cross-community pairs: a hyperedge of size n joining clusters i and j
    # exists whenever they have members in different communities; its
    # discordance is minimized by n-1 members of one cluster plus one of
    # the other, with n capped by the mixed-edge size limit.
    community_sets = [
        set(np.unique(h.community_of[labels == i]).tolist()) for i in range(m)
    ]
    cap = h.max_mixed_size
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            comms_i, comms_j = community_sets[i], community_sets[j]
            joinable = not (len(comms_i) == 1 and comms_i == comms_j)
            if not joinable:
                continue
            edge_size = int(sizes[i]) + 1 if cap is None else min(cap, int(sizes[i]) + 1)
            d_min = (values[i] - values[j]) ** 2 / edge_size
            if d_min < confidence_bound:
                return False
    return True


def _pairs_discordant(values: np.ndarray, edge_sizes: np.ndarray, confidence_bound: float) -> bool:
    """Check (v_i - v_j)^2 / edge_size_i >= bound over ordered pairs i != j."""
    m = values.size
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            if (values[i] - values[j]) ** 2 / edge_sizes[i] < confidence_bound:
                return False
    return True


@dataclass
class Trajectory:
    """Thinned opinion snapshots: times[k] is the step count of states[k]."""

    times: np.ndarray
    states: np.ndarray


@dataclass
class SimSummary:
    """Outcome of a run: limit clusters, timing, and diagnostics."""

    seed: int
    config: dict
    node_count: int
    t_star: int
    stop_reason: str
    steps: int
    updates: int
    clusters: ClusterSet
    mean_initial: float
    mean_final: float
    mean_drift: float
    jump_total: int
    final_state: OpinionState
    jump_counts: np.ndarray | None = None
    trajectory: Trajectory | None = None

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "config": self.config,
            "node_count": self.node_count,
            "t_star": self.t_star,
            "stop_reason": self.stop_reason,
            "steps": self.steps,
            "updates": self.updates,
            "clusters": self.clusters.as_records(),
            "mean_initial": self.mean_initial,
            "mean_final": self.mean_final,
            "mean_drift": self.mean_drift,
            "jump_total": self.jump_total,
        }


class _SnapshotReservoir:
    """Keeps at most ~2*target snapshots, evenly spaced by stride doubling."""

    def __init__(self, target: int):
        self.target = max(2, target)
        self.stride = 1
        self.times: list[int] = []
        self.states: list[np.ndarray] = []

    def offer(self, t: int, x: np.ndarray, force: bool = False) -> None:
        if t % self.stride == 0 or force:
            if self.times and self.times[-1] == t:
                return
            self.times.append(t)
            self.states.append(x.copy())
            if len(self.times) > 2 * self.target and not force:
                self.times = self.times[::2]
                self.states = self.states[::2]
                self.stride *= 2

    def build(self) -> Trajectory:
        return Trajectory(np.asarray(self.times, dtype=np.int64), np.vstack(self.states))


def _global_discordance(x: np.ndarray, alpha: float) -> float:
    _, d = _edge_stats(x, alpha)
    return d


def _is_absorbing_now(h: Hypergraph, x: np.ndarray, cfg: SimConfig) -> bool:
    if isinstance(h, ExplicitHypergraph):
        # Updates write bit-identical means, so a genuinely converged
        # hyperedge is exactly unanimous; demanding that (rather than a
        # discordance tolerance) keeps the certification consistent with
        # cluster extraction at far finer value scales.
        for members in h.iter_edges():
            values = x[members]
            if values.max() == values.min():
                continue
            _, d = _edge_stats(values, cfg.alpha)
            if d < cfg.confidence_bound:
                return False
        return True
    clusters = extract_clusters(x, cfg.zero_tol)
    if clusters.max_deviation > cfg.zero_tol:
        # Not exactly clustered: absorption cannot be certified without
        # enumeration, so defer to the other stop-rule clauses.
        return False
    return is_absorbing_clustered(clusters, h, cfg.confidence_bound)


def run(
    h: Hypergraph,
    cfg: SimConfig,
    x0: OpinionState | np.ndarray | None = None,
    record_trajectory: bool = False,
    record_jumps: bool = False,
    max_snapshots: int = 1000,
) -> SimSummary:
    """Simulate until the stop rule fires.

    Bit-reproducible given (hypergraph, config): the generator is derived
    from cfg.seed alone and the loop is strictly sequential. ``x0``
    overrides the sampled initial opinions (community-structured
    experiments build their own initial state).
    """
    stop = cfg.stop
    if stop.absorbing_every is not None and cfg.alpha != 1.0 and not isinstance(h, ExplicitHypergraph):
        raise ValueError("absorbing detection on implicit representations supports alpha=1 only")
    rng = derive_rng(cfg.seed)
    n = h.node_count
    if x0 is not None:
        raw = x0.opinions if isinstance(x0, OpinionState) else np.asarray(x0, dtype=np.float64)
        if raw.size != n:
            raise ValueError(f"initial state has {raw.size} opinions for {n} nodes")
        state = OpinionState(raw.copy(), 0)
    else:
        state = OpinionState(cfg.init.sample(rng, n), 0)
    x = state.opinions
    c = cfg.confidence_bound
    alpha = cfg.alpha
    mean_initial = math.fsum(x) / n

    reservoir = _SnapshotReservoir(max_snapshots) if record_trajectory else None
    if reservoir is not None:
        reservoir.offer(0, x)
    jumps_log: list[int] | None = [] if record_jumps else None

    # d(V, x) only changes when an update happens; cache it behind a dirty
    # flag so discordant steps do not pay an O(N) recomputation.
    d_global = _global_discordance(x, alpha) if stop.discordance_below is not None else None
    d_dirty = False
    first_pick_pending = cfg.condition_first_pick_concordant

    t = 0
    updates = 0
    jump_total = 0
    stop_reason = None
    while True:
        if stop.discordance_below is not None:
            if d_dirty:
                d_global = _global_discordance(x, alpha)
                d_dirty = False
            if d_global < stop.discordance_below:
                stop_reason = "converged"
                break
        if stop.absorbing_every is not None and t % stop.absorbing_every == 0:
            if _is_absorbing_now(h, x, cfg):
                stop_reason = "absorbing"
                break
        if stop.max_steps is not None and t >= stop.max_steps:
            stop_reason = "cutoff"
            break

        if first_pick_pending:
            members = _draw_concordant(h, x, c, alpha, rng)
            first_pick_pending = False
        else:
            members = h.sample_edge(rng)
        values = x[members]
        _, d = _edge_stats(values, alpha)
        t += 1
        jumps = 0
        if d < c:
            new_value = math.fsum(values) / values.size
            jumps = int(np.count_nonzero(np.abs(values - new_value) > c))
            x[members] = new_value
            updates += 1
            jump_total += jumps
            d_dirty = True
        if jumps_log is not None:
            jumps_log.append(jumps)
        if reservoir is not None:
            reservoir.offer(t, x)

    state.time = t
    if reservoir is not None:
        reservoir.offer(t, x, force=True)
    mean_final = math.fsum(x) / n
    summary = SimSummary(
        seed=cfg.seed,
        config=cfg.to_dict(),
        node_count=n,
        t_star=t,
        stop_reason=stop_reason,
        steps=t,
        updates=updates,
        clusters=extract_clusters(x, cfg.cluster_tol),
        mean_initial=mean_initial,
        mean_final=mean_final,
        mean_drift=abs(mean_final - mean_initial),
        jump_total=jump_total,
        final_state=state,
        jump_counts=None if jumps_log is None else np.asarray(jumps_log, dtype=np.int64),
        trajectory=None if reservoir is None else reservoir.build(),
    )
    return summary


def _draw_concordant(
    h: Hypergraph, x: np.ndarray, c: float, alpha: float, rng: np.random.Generator
) -> np.ndarray:
    """Resample hyperedges until a concordant one appears (a conditioning
    device for the first pick; it does not advance time)."""
    for _ in range(_FIRST_PICK_ATTEMPT_CAP):
        members = h.sample_edge(rng)
        _, d = _edge_stats(x[members], alpha)
        if d < c:
            return members
    raise RuntimeError(
        f"no concordant hyperedge found in {_FIRST_PICK_ATTEMPT_CAP} attempts"
    )
