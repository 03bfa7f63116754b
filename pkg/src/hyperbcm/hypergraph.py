"""Hypergraph representations with uniform hyperedge sampling.

A hyperedge is canonically a sorted, duplicate-free array of 0-based node
ids with at least two members. Three representations are provided:

* :class:`ExplicitHypergraph` stores an edge list (ragged arrays, so a
  hundred thousand large hyperedges stay compact).
* :class:`CompleteHypergraph` represents every node subset of size >= 2
  without enumerating them; there are 2^N - N - 1 such subsets, so counting
  uses exact integer arithmetic and sampling uses per-node coin flips with
  rejection (exactly uniform, O(N) per draw).
* :class:`BlockHypergraph` represents a community-structured hypergraph in
  which each community is a complete sub-hypergraph and cross-community
  hyperedges are either all present, all present up to a size cap, or
  absent. Sampling picks a category proportionally to its exact count.

All representations are immutable after construction and safe to share
across workers; every consumer owns its own random generator.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .rng import rand_below


def canonical_edge(members: Iterable[int]) -> tuple[int, ...]:
    """Sorted, deduplicated tuple of node ids: the canonical hyperedge form."""
    return tuple(sorted({int(m) for m in members}))


class Hypergraph:
    """Common interface: a fixed node set plus a hyperedge collection."""

    def __init__(self, node_count: int):
        if node_count < 1:
            raise ValueError(f"node_count must be positive, got {node_count}")
        self._n = int(node_count)

    @property
    def node_count(self) -> int:
        return self._n

    def edge_count(self) -> int:
        """Exact number of hyperedges (arbitrary precision)."""
        raise NotImplementedError

    def sample_edge(self, rng: np.random.Generator) -> np.ndarray:
        """Draw a hyperedge uniformly at random, as a sorted id array."""
        raise NotImplementedError

    def contains(self, members: Iterable[int]) -> bool:
        """Membership of the canonical form of ``members`` in the edge set."""
        raise NotImplementedError

    def _check_ids(self, edge: Sequence[int]) -> bool:
        return len(edge) >= 2 and edge[0] >= 0 and edge[-1] < self._n


class ExplicitHypergraph(Hypergraph):
    """Hypergraph backed by an explicit edge list.

    Edges are stored as one concatenated int32 member array plus offsets;
    per-edge views are cheap and the whole structure pickles for worker
    pools. Construction canonicalizes, validates and rejects duplicates.
    """

    def __init__(self, node_count: int, edges: Iterable[Iterable[int]]):
        super().__init__(node_count)
        canon: list[tuple[int, ...]] = []
        seen: set[tuple[int, ...]] = set()
        for raw in edges:
            edge = canonical_edge(raw)
            if len(edge) < 2:
                raise ValueError(f"hyperedge must have at least 2 nodes: {edge}")
            if not self._check_ids(edge):
                raise ValueError(f"node id out of range [0, {node_count}): {edge}")
            if edge in seen:
                raise ValueError(f"duplicate hyperedge: {edge}")
            seen.add(edge)
            canon.append(edge)
        members = np.fromiter(
            (m for e in canon for m in e), dtype=np.int32, count=sum(len(e) for e in canon)
        )
        offsets = np.zeros(len(canon) + 1, dtype=np.int64)
        np.cumsum([len(e) for e in canon], out=offsets[1:])
        self._init_storage(members, offsets)

    def _init_storage(self, members: np.ndarray, offsets: np.ndarray) -> None:
        self._members = members
        self._offsets = offsets
        self._edge_set: frozenset[tuple[int, ...]] | None = None

    @classmethod
    def from_ragged(
        cls, node_count: int, members: np.ndarray, offsets: np.ndarray
    ) -> "ExplicitHypergraph":
        """Wrap pre-canonicalized ragged arrays without revalidating.

        For generator internals that already guarantee canonical, distinct
        edges; the public constructor is the validating path.
        """
        h = cls.__new__(cls)
        Hypergraph.__init__(h, node_count)
        h._init_storage(
            np.ascontiguousarray(members, dtype=np.int32),
            np.ascontiguousarray(offsets, dtype=np.int64),
        )
        return h

    def edge_count(self) -> int:
        return len(self._offsets) - 1

    def edge(self, index: int) -> np.ndarray:
        """Members of the index-th hyperedge (read-only view)."""
        return self._members[self._offsets[index] : self._offsets[index + 1]]

    def iter_edges(self) -> Iterator[np.ndarray]:
        for i in range(self.edge_count()):
            yield self.edge(i)

    def edge_sizes(self) -> np.ndarray:
        return np.diff(self._offsets)

    def edge_set(self) -> frozenset[tuple[int, ...]]:
        """Edges as a frozenset of tuples (built lazily; test-scale only)."""
        if self._edge_set is None:
            self._edge_set = frozenset(tuple(int(m) for m in e) for e in self.iter_edges())
        return self._edge_set

    def sample_edge(self, rng: np.random.Generator) -> np.ndarray:
        count = self.edge_count()
        if count == 0:
            raise ValueError("no hyperedges")
        return self.edge(int(rng.integers(count)))

    def contains(self, members: Iterable[int]) -> bool:
        edge = canonical_edge(members)
        return self._check_ids(edge) and edge in self.edge_set()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExplicitHypergraph):
            return NotImplemented
        return (
            self._n == other._n
            and np.array_equal(self._offsets, other._offsets)
            and np.array_equal(self._members, other._members)
        )

    def __hash__(self) -> int:  # edge lists are mutable-looking but frozen
        return hash((self._n, self._members.tobytes()))

    def __repr__(self) -> str:
        return f"ExplicitHypergraph(node_count={self._n}, edges={self.edge_count()})"


class CompleteHypergraph(Hypergraph):
    """Every subset of size >= 2 is a hyperedge; nothing is enumerated."""

    def __init__(self, node_count: int):
        if node_count < 2:
            raise ValueError(f"complete hypergraph needs at least 2 nodes, got {node_count}")
        super().__init__(node_count)

    def edge_count(self) -> int:
        return (1 << self._n) - self._n - 1

    def sample_edge(self, rng: np.random.Generator) -> np.ndarray:
        # Independent fair coin per node, rejecting subsets of size < 2,
        # is exactly uniform over the edge set; the rejection probability
        # (N + 1) / 2^N is negligible beyond a handful of nodes.
        n = self._n
        while True:
            members = np.flatnonzero(rng.random(n) < 0.5)
            if members.size >= 2:
                return members

    def contains(self, members: Iterable[int]) -> bool:
        return self._check_ids(canonical_edge(members))

    def __repr__(self) -> str:
        return f"CompleteHypergraph(node_count={self._n})"


class BlockHypergraph(Hypergraph):
    """Implicit community-structured hypergraph.

    Every subset of a single community (size >= 2) is a hyperedge. Subsets
    spanning two or more communities are hyperedges iff ``mixed`` is true,
    and, when ``max_mixed_size`` is set, only up to that size. This covers
    the block models whose intra-community inclusion probability is 1 and
    whose inter-community probability is 0 or 1.
    """

    def __init__(
        self,
        community_of: Sequence[int] | np.ndarray,
        mixed: bool,
        max_mixed_size: int | None = None,
    ):
        community_of = np.ascontiguousarray(community_of, dtype=np.int64)
        super().__init__(len(community_of))
        k = int(community_of.max()) + 1 if community_of.size else 0
        if community_of.min() < 0:
            raise ValueError("community labels must be non-negative")
        sizes = np.bincount(community_of, minlength=k)
        if np.any(sizes == 0):
            raise ValueError("every community must be non-empty")
        if max_mixed_size is not None and max_mixed_size < 2:
            raise ValueError(f"max_mixed_size must be >= 2, got {max_mixed_size}")
        self._community_of = community_of
        self._members_of = [np.flatnonzero(community_of == b) for b in range(k)]
        self._mixed = bool(mixed)
        self._max_mixed = None if max_mixed_size is None else int(max_mixed_size)
        self._block_counts = [max(0, (1 << int(s)) - int(s) - 1) for s in sizes]
        self._mixed_size_counts = self._count_mixed_by_size()

    @property
    def community_of(self) -> np.ndarray:
        return self._community_of

    @property
    def community_count(self) -> int:
        return len(self._members_of)

    @property
    def mixed_allowed(self) -> bool:
        return self._mixed

    @property
    def max_mixed_size(self) -> int | None:
        return self._max_mixed

    def community_members(self, b: int) -> np.ndarray:
        return self._members_of[b]

    def _count_mixed_by_size(self) -> dict[int, int]:
        if not self._mixed:
            return {}
        n = self._n
        sizes = [len(m) for m in self._members_of]
        if self._max_mixed is None:
            total_mixed = (1 << n) - n - 1 - sum(self._block_counts)
            return {0: total_mixed}  # key 0: "any size" bucket
        counts = {}
        for size in range(2, min(self._max_mixed, n) + 1):
            pure = sum(comb(s, size) for s in sizes)
            counts[size] = comb(n, size) - pure
        return counts

    def edge_count(self) -> int:
        return sum(self._block_counts) + sum(self._mixed_size_counts.values())

    def mixed_edge_count(self) -> int:
        return sum(self._mixed_size_counts.values())

    def sample_edge(self, rng: np.random.Generator) -> np.ndarray:
        total = self.edge_count()
        if total == 0:
            raise ValueError("no hyperedges")
        pick = rand_below(rng, total)
        for b, count in enumerate(self._block_counts):
            if pick < count:
                return self._sample_within_block(rng, b)
            pick -= count
        for size, count in self._mixed_size_counts.items():
            if pick < count:
                if size == 0:
                    return self._sample_mixed_any(rng)
                return self._sample_mixed_of_size(rng, size)
            pick -= count
        raise AssertionError("category walk exhausted")  # pragma: no cover

    def _sample_within_block(self, rng: np.random.Generator, b: int) -> np.ndarray:
        block = self._members_of[b]
        while True:
            chosen = block[rng.random(block.size) < 0.5]
            if chosen.size >= 2:
                return chosen

    def _sample_mixed_any(self, rng: np.random.Generator) -> np.ndarray:
        labels = self._community_of
        while True:
            members = np.flatnonzero(rng.random(self._n) < 0.5)
            if members.size >= 2 and np.unique(labels[members]).size > 1:
                return members

    def _sample_mixed_of_size(self, rng: np.random.Generator, size: int) -> np.ndarray:
        labels = self._community_of
        while True:
            members = np.sort(rng.choice(self._n, size=size, replace=False))
            if np.unique(labels[members]).size > 1:
                return members

    def contains(self, members: Iterable[int]) -> bool:
        edge = canonical_edge(members)
        if not self._check_ids(edge):
            return False
        communities = {int(self._community_of[m]) for m in edge}
        if len(communities) == 1:
            return True
        if not self._mixed:
            return False
        return self._max_mixed is None or len(edge) <= self._max_mixed

    def __repr__(self) -> str:
        return (
            f"BlockHypergraph(communities={self.community_count}, "
            f"node_count={self._n}, mixed={self._mixed}, max_mixed_size={self._max_mixed})"
        )
