"""Closed-form predictions, estimators, and constructive procedures.

Cluster extraction lives in :mod:`hyperbcm.state` and is re-exported here
for convenience alongside the estimators that consume it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .hypergraph import ExplicitHypergraph, canonical_edge
from .state import ClusterSet, InitialDistribution, OpinionState, extract_clusters

__all__ = [
    "ClusterSet",
    "extract_clusters",
    "limiting_concordance",
    "BoundParams",
    "chernoff_concordance_bound",
    "ConcordanceEstimate",
    "concordance_prob_mc",
    "conditional_jump_prob_mc",
    "expected_first_concordant_size",
    "JumpModelInputs",
    "expected_jumps",
    "prime_decompose",
    "adversarial_initial_state",
    "consensus_node_threshold",
    "max_cluster_bound",
]


def limiting_concordance(sigma2: float, confidence_bound: float) -> float:
    """Limit of the probability that a size-n hyperedge is concordant as
    n grows, for i.i.d. opinions with variance sigma2: 1 above the
    variance, 1/2 exactly at it, 0 below it.

    The trichotomy compares the floats exactly; the boundary case is a
    measure-zero parameter choice, not a numerical tolerance question.
    """
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    if confidence_bound < 0:
        raise ValueError("confidence_bound must be non-negative")
    if confidence_bound > sigma2:
        return 1.0
    if confidence_bound == sigma2:
        return 0.5
    return 0.0


@dataclass(frozen=True)
class BoundParams:
    """Dimensionless ratio lam = confidence_bound / variance; the decay
    base r = exp((1 - lam)/2) * sqrt(lam) is derived, never stored, and is
    strictly below 1 whenever lam != 1."""

    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("lam must be positive")

    @classmethod
    def from_bound_and_variance(cls, confidence_bound: float, sigma2: float) -> "BoundParams":
        return cls(confidence_bound / sigma2)

    @property
    def r(self) -> float:
        return math.exp(0.5 * (1.0 - self.lam)) * math.sqrt(self.lam)


def chernoff_concordance_bound(params: BoundParams, n: int) -> float:
    """Exponential tail bound r^(n-1) for normally distributed opinions.

    For lam < 1 it upper-bounds the probability that a size-n hyperedge is
    concordant; for lam > 1 it upper-bounds the probability that it is
    discordant (so concordance is at least 1 - r^(n-1)).
    """
    if params.lam == 1.0:
        raise ValueError("bound undefined at lam=1")
    if n < 2:
        raise ValueError("hyperedge size must be >= 2")
    return params.r ** (n - 1)


@dataclass(frozen=True)
class ConcordanceEstimate:
    """Monte Carlo estimate of the per-size concordance probability."""

    size: int
    a_hat: float
    trials: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.a_hat <= 1.0:
            raise ValueError("a_hat must lie in [0, 1]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @property
    def std_err(self) -> float:
        return math.sqrt(self.a_hat * (1.0 - self.a_hat) / self.trials)


_MC_CHUNK_ELEMENTS = 4_000_000


def concordance_prob_mc(
    n: int,
    dist: InitialDistribution,
    confidence_bound: float,
    trials: int,
    rng: np.random.Generator,
) -> ConcordanceEstimate:
    """Fraction of trials in which the sample variance of n fresh draws is
    strictly below the confidence bound."""
    if n < 2:
        raise ValueError("hyperedge size must be >= 2")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    hits = 0
    done = 0
    rows_per_chunk = max(1, _MC_CHUNK_ELEMENTS // n)
    while done < trials:
        rows = min(rows_per_chunk, trials - done)
        draws = dist.sample(rng, (rows, n))
        sample_var = draws.var(axis=1, ddof=1)
        hits += int(np.count_nonzero(sample_var < confidence_bound))
        done += rows
    return ConcordanceEstimate(n, hits / trials, trials)


def conditional_jump_prob_mc(
    n: int,
    dist: InitialDistribution,
    confidence_bound: float,
    trials: int,
    rng: np.random.Generator,
) -> tuple[float, int]:
    """Estimate the probability that a member of a concordant size-n
    hyperedge sits farther than the confidence bound from the hyperedge
    mean. Returns (estimate, number of concordant trials kept); the
    estimate is NaN when no trial was concordant.
    """
    if n < 2:
        raise ValueError("hyperedge size must be >= 2")
    far = 0
    kept = 0
    done = 0
    rows_per_chunk = max(1, _MC_CHUNK_ELEMENTS // n)
    while done < trials:
        rows = min(rows_per_chunk, trials - done)
        draws = dist.sample(rng, (rows, n))
        keep = draws.var(axis=1, ddof=1) < confidence_bound
        if np.any(keep):
            sel = draws[keep]
            deviations = np.abs(sel - sel.mean(axis=1, keepdims=True))
            far += int(np.count_nonzero(deviations > confidence_bound))
            kept += int(np.count_nonzero(keep))
        done += rows
    if kept == 0:
        return float("nan"), 0
    return far / (kept * n), kept


def expected_first_concordant_size(node_count: int, a_hat: np.ndarray) -> float:
    """Expected size of the first concordant hyperedge drawn uniformly from
    the complete hypergraph, given per-size concordance probabilities
    ``a_hat[k]`` for size k+2 (k = 0 .. node_count-2):

        sum_n n * a_n * C(N, n) / sum_n a_n * C(N, n)

    Evaluated in log space (log-binomials plus log-sum-exp); the binomial
    weights overflow direct evaluation far below the node counts of
    interest.
    """
    a_hat = np.asarray(a_hat, dtype=np.float64)
    if node_count < 2:
        raise ValueError("node_count must be >= 2")
    if a_hat.size != node_count - 1:
        raise ValueError(f"need one probability per size 2..{node_count}, got {a_hat.size}")
    if np.any(a_hat < 0) or np.any(a_hat > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    sizes = np.arange(2, node_count + 1, dtype=np.float64)
    positive = a_hat > 0
    if not np.any(positive):
        raise ValueError("no concordant sizes")
    n = sizes[positive]
    log_binom = (
        gammaln(node_count + 1) - gammaln(n + 1) - gammaln(node_count - n + 1)
    )
    log_terms = np.log(a_hat[positive]) + log_binom
    return float(np.exp(logsumexp(log_terms + np.log(n)) - logsumexp(log_terms)))


@dataclass(frozen=True)
class JumpModelInputs:
    """Ingredients of the expected-jump-count formula: the hyperedge-size
    distribution of the hypergraph, per-size concordance probabilities,
    per-size conditional jump probabilities, and their large-size limits."""

    sizes: np.ndarray
    size_probs: np.ndarray
    concordance: np.ndarray
    jump_prob: np.ndarray
    tail_concordance: float
    tail_jump_prob: float

    def __post_init__(self) -> None:
        for name in ("sizes", "size_probs", "concordance", "jump_prob"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if not (self.sizes.shape == self.size_probs.shape == self.concordance.shape == self.jump_prob.shape):
            raise ValueError("all per-size arrays must align")
        if abs(float(self.size_probs.sum()) - 1.0) > 1e-9:
            raise ValueError("size_probs must sum to 1")
        for arr in (self.size_probs, self.concordance, self.jump_prob):
            if np.any(arr < 0) or np.any(arr > 1):
                raise ValueError("probabilities must lie in [0, 1]")
        if not 0.0 <= self.tail_concordance <= 1.0 or not 0.0 <= self.tail_jump_prob <= 1.0:
            raise ValueError("tail probabilities must lie in [0, 1]")


def expected_jumps(inputs: JumpModelInputs) -> float:
    """Expected number of opinion jumps in one step:
    sum_n a_n * P[|e| = n] * p_n * n."""
    return float(
        np.sum(inputs.concordance * inputs.size_probs * inputs.jump_prob * inputs.sizes)
    )


def _smallest_prime_factor(n: int) -> int:
    if n % 2 == 0:
        return 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return f
        f += 2
    return n


def prime_decompose(members) -> list[tuple[int, ...]]:
    """Decompose one mean-update on a node set into a sequence of
    mean-updates on prime-sized node sets with identical composite effect.

    For |e| = p * m with p prime, the sorted members are cut into p
    consecutive blocks of m, each block is decomposed recursively, and the
    sequence finishes with the m size-p stride sets {e[j], e[m+j], ...,
    e[(p-1)m+j]}. Applying the sequence of mean-updates equals the single
    mean-update on e exactly (in exact arithmetic).
    """
    edge = canonical_edge(members)
    n = len(edge)
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    p = _smallest_prime_factor(n)
    if p == n:
        return [edge]
    m = n // p
    sequence: list[tuple[int, ...]] = []
    for k in range(p):
        sequence.extend(prime_decompose(edge[k * m : (k + 1) * m]))
    for j in range(m):
        sequence.append(tuple(edge[k * m + j] for k in range(p)))
    return sequence


def adversarial_initial_state(
    h: ExplicitHypergraph,
    missing: tuple[int, ...] | list[int],
    confidence_bound: float,
) -> OpinionState:
    """Initial opinions under which the dynamics never converge in finite
    time, built around a prime-sized node set that is absent from the
    hyperedge set but induces a connected subhypergraph.

    Members of the missing set start at {0, 2^-r, ..., 2^-r} with
    2^-r < sqrt(confidence_bound), which keeps every hyperedge inside the
    set concordant forever while its opinions stay dyadic rationals that
    can never equal the irreducible limit mean. All other nodes start at a
    common value M, doubled from sqrt(c) + sqrt(2*c*N) until every
    hyperedge that straddles the set is verifiably discordant, so the two
    groups never interact.
    """
    if not isinstance(h, ExplicitHypergraph):
        raise TypeError("explicit hypergraph required")
    edge = canonical_edge(missing)
    p = len(edge)
    if p < 3 or _smallest_prime_factor(p) != p:
        raise ValueError(f"missing set must have prime size >= 3, got {p}")
    if edge[0] < 0 or edge[-1] >= h.node_count:
        raise ValueError("missing set contains node ids out of range")
    if h.contains(edge):
        raise ValueError("the node set is already a hyperedge")
    inside = set(edge)
    induced = [e for e in h.iter_edges() if inside.issuperset(int(m) for m in e)]
    if not _connected(edge, induced):
        raise ValueError("induced subhypergraph on the missing set is not connected")

    eps = math.sqrt(confidence_bound)
    r = 1
    while 2.0**-r >= eps:
        r += 1
    low = 2.0**-r

    n = h.node_count
    x = np.zeros(n)
    for node in edge[1:]:
        x[node] = low
    outsiders = [i for i in range(n) if i not in inside]
    if outsiders:
        level = eps + math.sqrt(2.0 * confidence_bound * n)
        for _ in range(64):
            if _all_straddling_discordant(h, inside, eps, level, confidence_bound):
                break
            level *= 2.0
        else:  # pragma: no cover - doubling always terminates in practice
            raise RuntimeError("could not separate outside opinions")
        for node in outsiders:
            x[node] = level
    return OpinionState(x, 0)


def _connected(edge: tuple[int, ...], induced: list[np.ndarray]) -> bool:
    parent = {node: node for node in edge}

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in induced:
        ids = [int(m) for m in e]
        root = find(ids[0])
        for other in ids[1:]:
            parent[find(other)] = root
    roots = {find(node) for node in edge}
    return len(roots) == 1


def _all_straddling_discordant(
    h: ExplicitHypergraph, inside: set[int], eps: float, level: float, confidence_bound: float
) -> bool:
    # Worst case over reachable states: inside opinions anywhere in
    # [0, eps], outside pinned at `level`; the minimum discordance of a
    # straddling hyperedge is attained with all inside members equal to eps.
    for e in h.iter_edges():
        k = sum(1 for m in e if int(m) in inside)
        size = e.size
        if k == 0 or k == size:
            continue
        d_min = k * (size - k) * (level - eps) ** 2 / (size * (size - 1))
        if d_min < confidence_bound:
            return False
    return True


def consensus_node_threshold(low: float, high: float, confidence_bound: float) -> int:
    """Smallest node count above which a complete hypergraph with initial
    opinions supported on [low, high] reaches consensus almost surely:
    the least integer strictly greater than
    ((high-low)/sqrt(c) + 1) * ((high-low)^2/c - 1)."""
    if not low < high:
        raise ValueError("need low < high")
    if not confidence_bound > 0:
        raise ValueError("confidence_bound must be positive")
    span = high - low
    expr = (span / math.sqrt(confidence_bound) + 1.0) * (span**2 / confidence_bound - 1.0)
    return max(1, math.floor(expr) + 1)


def max_cluster_bound(low: float, high: float, confidence_bound: float) -> int:
    """Largest possible number of limit opinion clusters on a complete
    hypergraph with initial opinions supported on [low, high]:
    floor((high-low)/sqrt(2c)) + 1."""
    if not low < high:
        raise ValueError("need low < high")
    if not confidence_bound > 0:
        raise ValueError("confidence_bound must be positive")
    return math.floor((high - low) / math.sqrt(2.0 * confidence_bound)) + 1
