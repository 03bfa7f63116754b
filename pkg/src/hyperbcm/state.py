"""Opinion states, initial-opinion distributions, and cluster extraction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class OpinionState:
    """Per-node real opinions plus the discrete time counter."""

    opinions: np.ndarray
    time: int = 0

    def __post_init__(self) -> None:
        self.opinions = np.ascontiguousarray(self.opinions, dtype=np.float64)
        if self.opinions.ndim != 1:
            raise ValueError("opinions must be a 1-d vector")
        if not np.all(np.isfinite(self.opinions)):
            raise ValueError("opinions must be finite")
        if self.time < 0:
            raise ValueError("time must be non-negative")

    @property
    def node_count(self) -> int:
        return self.opinions.size

    def copy(self) -> "OpinionState":
        return OpinionState(self.opinions.copy(), self.time)


@dataclass(frozen=True)
class UniformInitial:
    """Opinions drawn uniformly from [low, high)."""

    low: float
    high: float

    def __post_init__(self) -> None:
        if not self.low < self.high:
            raise ValueError(f"need low < high, got [{self.low}, {self.high})")

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=size)

    def to_dict(self) -> dict:
        return {"kind": "uniform", "low": self.low, "high": self.high}


@dataclass(frozen=True)
class NormalInitial:
    """Opinions drawn from a normal distribution."""

    mean: float
    std: float

    def __post_init__(self) -> None:
        if not self.std > 0:
            raise ValueError(f"std must be positive, got {self.std}")

    @property
    def variance(self) -> float:
        return self.std**2

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.normal(self.mean, self.std, size=size)

    def to_dict(self) -> dict:
        return {"kind": "normal", "mean": self.mean, "std": self.std}


InitialDistribution = UniformInitial | NormalInitial


def distribution_from_dict(spec: dict) -> InitialDistribution:
    kind = spec.get("kind")
    if kind == "uniform":
        return UniformInitial(float(spec["low"]), float(spec["high"]))
    if kind == "normal":
        return NormalInitial(float(spec["mean"]), float(spec["std"]))
    raise ValueError(f"unknown initial distribution kind: {kind!r}")


@dataclass
class ClusterSet:
    """Opinion clusters of a state: distinct values with multiplicities.

    ``labels`` maps each node to its cluster index (ascending by value) and
    ``max_deviation`` is the largest distance of any opinion from its
    cluster value; a state is exactly clustered at tolerance t when
    max_deviation <= t.
    """

    values: np.ndarray
    sizes: np.ndarray
    tol: float
    labels: np.ndarray | None = None
    max_deviation: float = 0.0

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        self.sizes = np.asarray(self.sizes, dtype=np.int64)
        if self.values.shape != self.sizes.shape:
            raise ValueError("values and sizes must align")
        if np.any(self.sizes < 1):
            raise ValueError("cluster sizes must be positive")

    def __len__(self) -> int:
        return self.values.size

    @property
    def node_count(self) -> int:
        return int(self.sizes.sum())

    def as_records(self) -> list[dict]:
        return [
            {"value": float(v), "size": int(s)}
            for v, s in zip(self.values, self.sizes)
        ]


def extract_clusters(state: OpinionState | np.ndarray, tol: float = 1e-9) -> ClusterSet:
    """Group opinions into clusters separated by gaps larger than ``tol``.

    Opinions are sorted and split wherever consecutive values differ by
    more than ``tol``; each cluster's value is the mean of its members.
    Updates write bit-identical means, so genuine clusters are exact and
    any tolerance well above machine epsilon separates them.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    opinions = state.opinions if isinstance(state, OpinionState) else np.asarray(state, dtype=np.float64)
    n = opinions.size
    if n == 0:
        return ClusterSet(np.empty(0), np.empty(0, dtype=np.int64), tol, np.empty(0, dtype=np.int64))
    order = np.argsort(opinions, kind="stable")
    ranked = opinions[order]
    boundaries = np.flatnonzero(np.diff(ranked) > tol) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    values = np.empty(starts.size)
    sizes = (ends - starts).astype(np.int64)
    labels = np.empty(n, dtype=np.int64)
    max_dev = 0.0
    for idx, (lo, hi) in enumerate(zip(starts, ends)):
        segment = ranked[lo:hi]
        value = math.fsum(segment) / segment.size
        values[idx] = value
        labels[order[lo:hi]] = idx
        dev = max(abs(float(segment[0]) - value), abs(float(segment[-1]) - value))
        max_dev = max(max_dev, dev)
    return ClusterSet(values, sizes, tol, labels, max_dev)
