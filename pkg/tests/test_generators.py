"""Generative models and the hypergraph text format."""

import itertools
from math import comb

import numpy as np
import pytest
from scipy.stats import chisquare

from hyperbcm.generators import (
    GnmParams,
    HsbmParams,
    Partition,
    _unrank_combination,
    enumerate_complete,
    gen_complete,
    gen_gnm,
    gen_hsbm,
    load_hypergraph,
    save_hypergraph,
)
from hyperbcm.hypergraph import BlockHypergraph, CompleteHypergraph, ExplicitHypergraph
from hyperbcm.rng import derive_rng


class TestComplete:
    def test_small(self):
        h = gen_complete(3)
        assert isinstance(h, CompleteHypergraph)
        assert h.edge_count() == 4

    def test_large_count_exact(self):
        assert gen_complete(200).edge_count() == 2**200 - 201

    def test_too_small(self):
        with pytest.raises(ValueError):
            gen_complete(1)


class TestUnrank:
    @pytest.mark.parametrize("n,k", [(5, 2), (6, 3), (7, 1), (7, 7), (9, 4)])
    def test_enumerates_lexicographically(self, n, k):
        expected = list(itertools.combinations(range(n), k))
        got = [tuple(_unrank_combination(r, n, k)) for r in range(comb(n, k))]
        assert got == expected


class TestGnm:
    def test_all_pairs_when_saturated(self):
        h = gen_gnm(GnmParams(5, {2: 10}), derive_rng(0))
        assert h.edge_set() == {e for e in itertools.combinations(range(5), 2)}

    def test_five_distinct_triples(self):
        h = gen_gnm(GnmParams(6, {3: 5}), derive_rng(1))
        assert h.edge_count() == 5
        sizes = set(h.edge_sizes().tolist())
        assert sizes == {3}
        assert len(h.edge_set()) == 5

    def test_single_full_edge(self):
        h = gen_gnm(GnmParams(4, {4: 7}), derive_rng(2))
        assert h.edge_set() == {(0, 1, 2, 3)}

    def test_mixed_sizes_counts(self):
        h = gen_gnm(GnmParams(8, {2: 5, 3: 7, 8: 3}), derive_rng(3))
        sizes, counts = np.unique(h.edge_sizes(), return_counts=True)
        assert dict(zip(sizes.tolist(), counts.tolist())) == {2: 5, 3: 7, 8: 1}

    def test_no_duplicates_across_regenerations(self):
        for seed in range(10):
            h = gen_gnm(GnmParams(10, {3: 30, 4: 50}), derive_rng(seed))
            assert len(h.edge_set()) == h.edge_count()

    def test_uniformity_of_triples(self):
        # Marginal inclusion frequency of each triple across regenerations.
        counts = {e: 0 for e in itertools.combinations(range(6), 3)}
        generations = 4000
        for seed in range(generations):
            h = gen_gnm(GnmParams(6, {3: 5}), derive_rng(100 + seed))
            for e in h.edge_set():
                counts[e] += 1
        observed = np.array(list(counts.values()))
        assert chisquare(observed).pvalue > 0.001

    def test_dense_path_uniformity(self):
        # 18 of the 20 triples requested exercises the rank-sampling path.
        counts = {e: 0 for e in itertools.combinations(range(6), 3)}
        generations = 3000
        for seed in range(generations):
            h = gen_gnm(GnmParams(6, {3: 18}), derive_rng(7000 + seed))
            assert h.edge_count() == 18
            for e in h.edge_set():
                counts[e] += 1
        observed = np.array(list(counts.values()))
        assert chisquare(observed).pvalue > 0.001

    def test_materialization_guard(self):
        with pytest.raises(ValueError, match="too large"):
            gen_gnm(GnmParams(400, {200: 10**12}), derive_rng(0))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            GnmParams(5, {1: 3})
        with pytest.raises(ValueError):
            GnmParams(5, {6: 3})
        with pytest.raises(ValueError):
            GnmParams(5, {3: -1})


class TestPartition:
    def test_from_sizes(self):
        part = Partition.from_sizes([2, 3])
        assert part.community_count == 2
        assert part.node_count == 5
        assert part.sizes.tolist() == [2, 3]

    def test_rejects_empty_community(self):
        with pytest.raises(ValueError):
            Partition(np.array([0, 0, 2]))


class TestHsbm:
    def test_two_singletons_all_q(self):
        params = HsbmParams(Partition.from_sizes([1, 1]), p=1.0, q=1.0)
        h = gen_hsbm(params, derive_rng(0), mode="explicit")
        assert h.edge_set() == {(0, 1)}

    def test_disconnected_communities_explicit(self):
        # p=1, q=0 on two communities of four: the union of two complete
        # four-node hypergraphs, 2 * (2^4 - 5) = 22 hyperedges.
        params = HsbmParams(Partition.from_sizes([4, 4]), p=1.0, q=0.0)
        h = gen_hsbm(params, derive_rng(1), mode="explicit")
        assert h.edge_count() == 22
        expected = set()
        for block in (range(4), range(4, 8)):
            for size in range(2, 5):
                expected.update(itertools.combinations(block, size))
        assert h.edge_set() == expected

    def test_implicit_bridged_communities(self):
        params = HsbmParams(Partition.from_sizes([500, 500]), p=1.0, q=1.0, max_mixed_size=2)
        h = gen_hsbm(params, derive_rng(2), mode="implicit")
        assert isinstance(h, BlockHypergraph)
        assert h.mixed_edge_count() == 500 * 500

    def test_explicit_and_implicit_agree_when_deterministic(self):
        params = HsbmParams(Partition.from_sizes([3, 3]), p=1.0, q=1.0, max_mixed_size=2)
        explicit = gen_hsbm(params, derive_rng(3), mode="explicit")
        implicit = gen_hsbm(params, derive_rng(3), mode="implicit")
        assert explicit.edge_count() == implicit.edge_count()
        for e in explicit.iter_edges():
            assert implicit.contains(e)

    def test_inclusion_frequencies(self):
        # Aggregate inclusion counts per category over many generations,
        # within four standard errors of the expected binomial counts.
        params = HsbmParams(Partition.from_sizes([2, 2]), p=0.7, q=0.3, max_mixed_size=2)
        labels = params.partition.community_of
        generations = 10_000
        pure_candidates = []
        mixed_candidates = []
        blocked_candidates = []
        for size in range(2, 5):
            for e in itertools.combinations(range(4), size):
                kinds = {labels[m] for m in e}
                if len(kinds) == 1:
                    pure_candidates.append(e)
                elif size <= 2:
                    mixed_candidates.append(e)
                else:
                    blocked_candidates.append(e)
        pure = mixed = blocked = 0
        for seed in range(generations):
            h = gen_hsbm(params, derive_rng(40_000 + seed), mode="explicit")
            edges = h.edge_set()
            pure += sum(1 for e in pure_candidates if e in edges)
            mixed += sum(1 for e in mixed_candidates if e in edges)
            blocked += sum(1 for e in blocked_candidates if e in edges)
        assert blocked == 0
        for count, candidates, prob in (
            (pure, pure_candidates, 0.7),
            (mixed, mixed_candidates, 0.3),
        ):
            n_trials = generations * len(candidates)
            expected = n_trials * prob
            stderr = (n_trials * prob * (1 - prob)) ** 0.5
            assert abs(count - expected) <= 4 * stderr

    def test_explicit_cap_enforced(self):
        params = HsbmParams(Partition.from_sizes([15, 15]), p=0.1, q=0.1)
        with pytest.raises(ValueError, match="implicit"):
            gen_hsbm(params, derive_rng(0), mode="explicit")

    def test_implicit_requires_deterministic_probs(self):
        with pytest.raises(ValueError, match="p = 1"):
            gen_hsbm(HsbmParams(Partition.from_sizes([2, 2]), p=0.5, q=1.0), derive_rng(0), "implicit")
        with pytest.raises(ValueError, match="q in"):
            gen_hsbm(HsbmParams(Partition.from_sizes([2, 2]), p=1.0, q=0.5), derive_rng(0), "implicit")

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="unknown mode"):
            gen_hsbm(HsbmParams(Partition.from_sizes([2, 2]), p=1.0, q=1.0), derive_rng(0), "magic")


class TestEnumerateComplete:
    def test_matches_implicit_count(self):
        h = enumerate_complete(6)
        assert h.edge_count() == gen_complete(6).edge_count()

    def test_cap(self):
        with pytest.raises(ValueError):
            enumerate_complete(40)


class TestFileFormat:
    def test_basic_load(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("0 1\n1 2 3\n")
        h, skipped = load_hypergraph(path)
        assert skipped == 0
        assert h.node_count == 4
        assert h.edge_set() == {(0, 1), (1, 2, 3)}

    def test_single_node_line_skipped_with_count(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("0 1\n5\n")
        h, skipped = load_hypergraph(path)
        assert skipped == 1
        assert h.edge_set() == {(0, 1)}

    def test_comments_and_header(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("# comment\nnodes=10\n0 1\n")
        h, skipped = load_hypergraph(path)
        assert h.node_count == 10
        assert skipped == 0

    def test_malformed_line(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("0 one\n")
        with pytest.raises(ValueError, match="malformed"):
            load_hypergraph(path)

    def test_out_of_declared_range(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("nodes=3\n0 5\n")
        with pytest.raises(ValueError, match="outside declared range"):
            load_hypergraph(path)

    def test_duplicates_merged(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("0 1\n1 0\n")
        h, _ = load_hypergraph(path)
        assert h.edge_count() == 1

    def test_save_requires_explicit(self, tmp_path):
        with pytest.raises(TypeError):
            save_hypergraph(gen_complete(4), tmp_path / "h.txt")

    @pytest.mark.parametrize("seed", range(8))
    def test_round_trip_identity(self, tmp_path, seed):
        h = gen_gnm(GnmParams(12, {2: 9, 3: 11, 5: 4}), derive_rng(seed))
        path = tmp_path / f"rt{seed}.txt"
        save_hypergraph(h, path, header_comments=["round trip"])
        loaded, skipped = load_hypergraph(path)
        assert skipped == 0
        assert loaded == h

    def test_empty_file_without_header(self, tmp_path):
        path = tmp_path / "h.txt"
        path.write_text("# nothing\n")
        with pytest.raises(ValueError, match="no hyperedges"):
            load_hypergraph(path)
