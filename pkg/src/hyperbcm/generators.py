"""Hypergraph construction: generative models and the on-disk text format.

The file format is plain text: one hyperedge per line as whitespace-separated
0-based node ids, ``#`` comment lines, and an optional ``nodes=N`` header
declaring the node count. Hyperedges of size < 2 are skipped with a warning
count (single-node hyperedges are excluded by the model).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from pathlib import Path

import numpy as np

from .hypergraph import BlockHypergraph, CompleteHypergraph, ExplicitHypergraph, Hypergraph
from .rng import rand_below

# Fail fast rather than exhaust memory when a parameter choice would
# materialize an astronomically large edge list.
MAX_MATERIALIZED_MEMBERS = 200_000_000
DEFAULT_ENUMERATION_CAP = 20


def gen_complete(node_count: int) -> CompleteHypergraph:
    """Complete hypergraph on ``node_count`` nodes (implicit representation)."""
    return CompleteHypergraph(node_count)


@dataclass(frozen=True)
class GnmParams:
    """Requested hyperedge count per size for the fixed-count random model.

    ``edges_per_size`` maps hyperedge size i (2 <= i <= N) to the requested
    number of size-i hyperedges; the effective count is capped at C(N, i).
    """

    node_count: int
    edges_per_size: dict[int, int]

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be positive")
        for size, count in self.edges_per_size.items():
            if not 2 <= size <= self.node_count:
                raise ValueError(f"hyperedge size {size} outside [2, {self.node_count}]")
            if count < 0:
                raise ValueError(f"negative edge count for size {size}")


def _floyd_sample(rng: np.random.Generator, total: int, k: int) -> list[int]:
    """k distinct uniform ranks from [0, total) without enumerating them."""
    chosen: set[int] = set()
    for j in range(total - k, total):
        t = rand_below(rng, j + 1)
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def _unrank_combination(rank: int, n: int, k: int) -> list[int]:
    """The rank-th size-k subset of range(n) in lexicographic order."""
    out = []
    c = 0
    for remaining in range(k, 0, -1):
        count = comb(n - c - 1, remaining - 1)
        while rank >= count:
            rank -= count
            c += 1
            count = comb(n - c - 1, remaining - 1)
        out.append(c)
        c += 1
    return out


def gen_gnm(params: GnmParams, rng: np.random.Generator) -> ExplicitHypergraph:
    """Random hypergraph with exactly min(m_i, C(N, i)) distinct hyperedges
    of each size i, chosen uniformly without replacement among size-i subsets.

    Sparse sizes use rejection with a hash set; dense sizes (more than half
    of all size-i subsets requested) sample ranks Floyd-style and unrank
    them, so both paths are exactly uniform.
    """
    n = params.node_count
    plan: list[tuple[int, int, int]] = []
    member_budget = 0
    for size in sorted(params.edges_per_size):
        total = comb(n, size)
        want = min(params.edges_per_size[size], total)
        if want == 0:
            continue
        member_budget += want * size
        if member_budget > MAX_MATERIALIZED_MEMBERS:
            raise ValueError(
                "requested hypergraph is too large to materialize "
                f"(> {MAX_MATERIALIZED_MEMBERS} member slots)"
            )
        plan.append((size, want, total))

    chunks: list[np.ndarray] = []
    sizes_out: list[int] = []
    for size, want, total in plan:
        if 2 * want >= total:
            ranks = _floyd_sample(rng, total, want)
            for r in ranks:
                chunks.append(np.array(_unrank_combination(r, n, size), dtype=np.int32))
                sizes_out.append(size)
        else:
            seen: set[bytes] = set()
            while len(seen) < want:
                edge = np.sort(rng.choice(n, size=size, replace=False)).astype(np.int32)
                key = edge.tobytes()
                if key not in seen:
                    seen.add(key)
                    chunks.append(edge)
                    sizes_out.append(size)
    members = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.int32)
    offsets = np.zeros(len(chunks) + 1, dtype=np.int64)
    np.cumsum(sizes_out, out=offsets[1:])
    return ExplicitHypergraph.from_ragged(n, members, offsets)


@dataclass(frozen=True)
class Partition:
    """Assignment of each node to one of k non-empty communities."""

    community_of: np.ndarray

    def __post_init__(self) -> None:
        labels = np.ascontiguousarray(self.community_of, dtype=np.int64)
        object.__setattr__(self, "community_of", labels)
        if labels.size == 0:
            raise ValueError("partition needs at least one node")
        k = int(labels.max()) + 1
        if labels.min() < 0 or np.any(np.bincount(labels, minlength=k) == 0):
            raise ValueError("community labels must be 0..k-1 with every community non-empty")

    @classmethod
    def from_sizes(cls, sizes: list[int]) -> "Partition":
        return cls(np.repeat(np.arange(len(sizes)), sizes))

    @property
    def community_count(self) -> int:
        return int(self.community_of.max()) + 1

    @property
    def node_count(self) -> int:
        return self.community_of.size

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.community_of, minlength=self.community_count)


@dataclass(frozen=True)
class HsbmParams:
    """Block-model parameters: intra-community inclusion probability p,
    inter-community probability q, and an optional cap on the size of
    inter-community hyperedges."""

    partition: Partition
    p: float
    q: float
    max_mixed_size: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0 or not 0.0 <= self.q <= 1.0:
            raise ValueError("p and q must lie in [0, 1]")
        if self.max_mixed_size is not None and self.max_mixed_size < 2:
            raise ValueError("max_mixed_size must be >= 2")


def gen_hsbm(
    params: HsbmParams,
    rng: np.random.Generator,
    mode: str = "explicit",
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> Hypergraph:
    """Generate a block-model hypergraph.

    Explicit mode enumerates every candidate subset and includes it
    independently with probability p (all members in one community),
    q (mixed, and within the size cap when one is set), or 0 (mixed and
    over the cap); it requires node_count <= enumeration_cap. Implicit mode
    returns a :class:`BlockHypergraph` and requires p = 1 and q in {0, 1},
    where the edge categories are countable in closed form.
    """
    labels = params.partition.community_of
    n = params.partition.node_count
    if mode == "implicit":
        if params.p != 1.0:
            raise ValueError("implicit mode requires p = 1")
        if params.q not in (0.0, 1.0):
            raise ValueError("implicit mode requires q in {0, 1}")
        return BlockHypergraph(labels, mixed=params.q == 1.0, max_mixed_size=params.max_mixed_size)
    if mode != "explicit":
        raise ValueError(f"unknown mode {mode!r}, expected 'explicit' or 'implicit'")
    if n > enumeration_cap:
        raise ValueError(
            f"explicit mode enumerates all subsets and requires node_count <= "
            f"{enumeration_cap}, got {n}; use implicit mode"
        )
    edges: list[tuple[int, ...]] = []
    cap = params.max_mixed_size
    for size in range(2, n + 1):
        candidates = list(itertools.combinations(range(n), size))
        if not candidates:
            continue
        draws = rng.random(len(candidates))
        for edge, u in zip(candidates, draws):
            first = labels[edge[0]]
            pure = all(labels[m] == first for m in edge[1:])
            if pure:
                prob = params.p
            elif cap is not None and size > cap:
                prob = 0.0
            else:
                prob = params.q
            if u < prob:
                edges.append(edge)
    return ExplicitHypergraph(n, edges)


def enumerate_complete(node_count: int, enumeration_cap: int = DEFAULT_ENUMERATION_CAP) -> ExplicitHypergraph:
    """Explicitly materialized complete hypergraph (small node counts only)."""
    if node_count > enumeration_cap:
        raise ValueError(f"refusing to enumerate 2^{node_count} subsets; cap is {enumeration_cap}")
    if node_count < 2:
        raise ValueError("complete hypergraph needs at least 2 nodes")
    edges = [
        edge
        for size in range(2, node_count + 1)
        for edge in itertools.combinations(range(node_count), size)
    ]
    return ExplicitHypergraph(node_count, edges)


def load_hypergraph(path: str | Path) -> tuple[ExplicitHypergraph, int]:
    """Parse a hypergraph text file.

    Returns the hypergraph and the number of skipped undersized hyperedges.
    Malformed lines and node ids outside a declared ``nodes=N`` range raise
    ValueError; duplicate hyperedges are merged.
    """
    declared_n: int | None = None
    edges: dict[tuple[int, ...], None] = {}
    skipped = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("nodes="):
                try:
                    declared_n = int(line[len("nodes="):])
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: malformed header {line!r}") from exc
                if declared_n < 1:
                    raise ValueError(f"{path}:{lineno}: node count must be positive")
                continue
            try:
                ids = tuple(sorted({int(tok) for tok in line.split()}))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed line {line!r}") from exc
            if any(i < 0 for i in ids):
                raise ValueError(f"{path}:{lineno}: negative node id")
            if declared_n is not None and ids and ids[-1] >= declared_n:
                raise ValueError(
                    f"{path}:{lineno}: node id {ids[-1]} outside declared range [0, {declared_n})"
                )
            if len(ids) < 2:
                skipped += 1
                continue
            edges.setdefault(ids, None)
    if declared_n is None:
        if not edges:
            raise ValueError(f"{path}: no hyperedges and no 'nodes=N' header")
        declared_n = max(e[-1] for e in edges) + 1
    return ExplicitHypergraph(declared_n, list(edges)), skipped


def save_hypergraph(h: Hypergraph, path: str | Path, header_comments: list[str] | None = None) -> None:
    """Write an explicit hypergraph in the text format (round-trip safe)."""
    if not isinstance(h, ExplicitHypergraph):
        raise TypeError("only explicit hypergraphs can be saved")
    with open(path, "w", encoding="utf-8") as fh:
        for comment in header_comments or []:
            fh.write(f"# {comment}\n")
        fh.write(f"nodes={h.node_count}\n")
        for edge in h.iter_edges():
            fh.write(" ".join(str(int(m)) for m in edge) + "\n")
