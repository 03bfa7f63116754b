"""Update rule, simulation loop, and absorbing-state detection."""

import itertools
import math

import numpy as np
import pytest

from hyperbcm.dynamics import (
    SimConfig,
    StopRule,
    apply_update,
    default_stop,
    discordance,
    is_absorbing_clustered,
    is_absorbing_explicit,
    run,
    step,
)
from hyperbcm.generators import HsbmParams, Partition, gen_complete, gen_hsbm
from hyperbcm.hypergraph import BlockHypergraph, CompleteHypergraph, ExplicitHypergraph
from hyperbcm.rng import derive_rng
from hyperbcm.state import NormalInitial, OpinionState, UniformInitial, extract_clusters


def two_pass_variance(values, alpha=1.0):
    values = np.asarray(values, dtype=np.float64)
    mean = values.mean()
    ss = float(np.square(values - mean).sum())
    return (values.size - 1) ** (-alpha) * ss


def brute_force_absorbing(x, confidence_bound, zero_tol=1e-12, sizes=None):
    n = len(x)
    sizes = sizes or range(2, n + 1)
    for size in sizes:
        for e in itertools.combinations(range(n), size):
            d = two_pass_variance(x[list(e)])
            if zero_tol < d < confidence_bound:
                return False
    return True


class TestDiscordance:
    def test_mediator_example_pair(self):
        x = np.array([0.0, 1.0, 0.5])
        assert discordance([0, 1], x) == pytest.approx(0.5, abs=1e-15)

    def test_mediator_example_triple(self):
        x = np.array([0.0, 1.0, 0.5])
        assert discordance([0, 1, 2], x) == pytest.approx(0.25, abs=1e-15)

    def test_unanimous_edge_is_zero(self):
        assert discordance([0, 1, 2], np.array([3.0, 3.0, 3.0])) == 0.0

    def test_even_spread_matches_two_pass_oracle(self):
        x = np.array([0.0, 2.0, 4.0, 6.0])
        assert discordance([0, 1, 2, 3], x) == pytest.approx(20.0 / 3.0, rel=1e-14)
        assert discordance([0, 1, 2, 3], x) == pytest.approx(two_pass_variance(x), rel=1e-14)

    def test_accepts_opinion_state(self):
        state = OpinionState(np.array([0.0, 1.0]))
        assert discordance([0, 1], state) == pytest.approx(0.5)

    def test_size_one_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            discordance([0], np.array([1.0, 2.0]))

    def test_agrees_with_two_pass_on_random_edges(self):
        rng = derive_rng(0)
        for _ in range(50):
            n = int(rng.integers(2, 40))
            x = rng.normal(0, 3, size=n)
            d_stream = discordance(np.arange(n), x)
            assert d_stream == pytest.approx(two_pass_variance(x), rel=1e-12)

    def test_alpha_zero_is_raw_sum_of_squares(self):
        x = np.array([0.0, 2.0, 4.0, 6.0])
        assert discordance([0, 1, 2, 3], x, alpha=0.0) == pytest.approx(20.0, rel=1e-14)

    def test_alpha_zero_hyperedge_monotone(self):
        # Nested hyperedges never decrease the alpha=0 discordance.
        rng = derive_rng(1)
        for _ in range(100):
            n = int(rng.integers(3, 12))
            x = rng.uniform(-5, 5, size=n)
            inner_size = int(rng.integers(2, n))
            perm = rng.permutation(n)
            inner = perm[:inner_size]
            outer = perm[: inner_size + int(rng.integers(1, n - inner_size + 1))]
            assert discordance(inner, x, alpha=0.0) <= discordance(outer, x, alpha=0.0) + 1e-12


class TestApplyUpdate:
    def test_concordant_pair_moves_to_mean(self):
        state = OpinionState(np.array([0.0, 0.1, 5.0]))
        out = apply_update(state, np.array([0, 1]), confidence_bound=1.0)
        assert out.updated and out.jumps == 0
        assert state.opinions[0] == state.opinions[1] == pytest.approx(0.05)
        assert state.opinions[2] == 5.0
        assert state.time == 1

    def test_discordant_pair_is_identity(self):
        state = OpinionState(np.array([0.0, 1.0, 0.5]))
        out = apply_update(state, np.array([0, 1]), confidence_bound=0.3)
        assert not out.updated and out.jumps == 0
        assert state.opinions.tolist() == [0.0, 1.0, 0.5]
        assert state.time == 1

    def test_mediated_triple_updates(self):
        # The pair alone is too discordant, but the full triple is not.
        state = OpinionState(np.array([0.0, 1.0, 0.5]))
        out = apply_update(state, np.array([0, 1, 2]), confidence_bound=0.3)
        assert out.updated
        assert state.opinions.tolist() == [0.5, 0.5, 0.5]

    def test_members_set_bit_identically(self):
        rng = derive_rng(2)
        state = OpinionState(rng.normal(0, 0.1, size=9))
        apply_update(state, np.arange(9), confidence_bound=1.0)
        assert np.unique(state.opinions).size == 1

    def test_jump_counting(self):
        # One extreme member of a wide-but-concordant hyperedge jumps.
        values = np.array([2.5] + [0.0] * 24)
        state = OpinionState(values.copy())
        out = apply_update(state, np.arange(25), confidence_bound=1.0)
        assert out.updated
        assert out.jumps == 1  # only the extremist moved by more than c


class TestStepAndRun:
    def pair_graph(self):
        return ExplicitHypergraph(2, [[0, 1]])

    def test_step_draws_and_updates(self):
        h = self.pair_graph()
        state = OpinionState(np.array([0.0, 0.1]))
        cfg = SimConfig(1.0, UniformInitial(0, 1), StopRule(max_steps=10))
        out = step(h, state, cfg, derive_rng(0))
        assert tuple(out.selected) == (0, 1)
        assert state.opinions[0] == pytest.approx(0.05)

    def test_immediately_absorbing(self):
        h = self.pair_graph()
        cfg = SimConfig(1.0, UniformInitial(0, 1), StopRule(absorbing_every=1, max_steps=100))
        summary = run(h, cfg, x0=np.array([0.0, 10.0]))
        assert summary.stop_reason == "absorbing"
        assert summary.t_star == 0
        assert summary.clusters.values.tolist() == [0.0, 10.0]

    def test_consensus_after_first_pick(self):
        h = self.pair_graph()
        cfg = SimConfig(1.0, UniformInitial(0, 1), StopRule(absorbing_every=1, max_steps=100))
        summary = run(h, cfg, x0=np.array([0.0, 0.1]))
        assert summary.stop_reason == "absorbing"
        assert summary.t_star == 1
        assert len(summary.clusters) == 1
        assert summary.clusters.values[0] == pytest.approx(0.05)

    def test_cutoff_never_reported_as_converged(self):
        h = self.pair_graph()
        cfg = SimConfig(1.0, UniformInitial(0, 1), StopRule(max_steps=5))
        summary = run(h, cfg, x0=np.array([0.0, 10.0]))
        assert summary.stop_reason == "cutoff"
        assert summary.t_star == 5

    def test_conditioned_first_pick_consensus(self):
        # Complete hypergraph, normal opinions wider than the confidence
        # bound: conditioning the first pick makes the run short, and the
        # limit is a single cluster at the conserved mean.
        h = gen_complete(150)
        cfg = SimConfig(
            1.0,
            NormalInitial(0, 1.2),
            StopRule(discordance_below=1e-21, max_steps=200_000),
            seed=11,
            condition_first_pick_concordant=True,
        )
        summary = run(h, cfg)
        assert summary.stop_reason == "converged"
        assert len(summary.clusters) == 1
        assert summary.clusters.values[0] == pytest.approx(summary.mean_initial, abs=1e-8)

    def test_mean_conserved_along_trajectory(self):
        h = gen_complete(40)
        cfg = SimConfig(1.0, NormalInitial(0, 1.0), StopRule(max_steps=1), seed=3)
        state = OpinionState(NormalInitial(0, 1.0).sample(derive_rng(3), 40))
        rng = derive_rng(4)
        previous_mean = math.fsum(state.opinions) / 40
        for _ in range(2000):
            step(h, state, cfg, rng)
            mean = math.fsum(state.opinions) / 40
            assert abs(mean - previous_mean) <= 1e-12 * max(1.0, abs(previous_mean))
            previous_mean = mean

    def test_global_discordance_monotone(self):
        # Recomputed independently from the state at every step.
        rng = derive_rng(5)
        for trial in range(10):
            n = int(rng.integers(10, 120))
            h = gen_complete(n)
            state = OpinionState(rng.normal(0, 1.1, size=n))
            cfg = SimConfig(1.0, NormalInitial(0, 1.1), StopRule(max_steps=1), seed=trial)
            d_prev = np.var(state.opinions, ddof=1)
            for _ in range(400):
                step(h, state, cfg, rng)
                d_now = np.var(state.opinions, ddof=1)
                assert d_now <= d_prev + 1e-12
                d_prev = d_now

    def test_bit_reproducible(self):
        h = gen_complete(30)
        cfg = SimConfig(
            1.0, NormalInitial(0, 1.2), StopRule(discordance_below=1e-12, max_steps=50_000), seed=42
        )
        first = run(h, cfg, record_trajectory=True)
        second = run(h, cfg, record_trajectory=True)
        assert first.t_star == second.t_star
        assert np.array_equal(first.final_state.opinions, second.final_state.opinions)
        assert np.array_equal(first.trajectory.states, second.trajectory.states)
        assert first.to_json_dict() == second.to_json_dict()

    def test_trajectory_thinning_bounded(self):
        h = gen_complete(12)
        cfg = SimConfig(0.05, NormalInitial(0, 2.0), StopRule(max_steps=30_000), seed=9)
        summary = run(h, cfg, record_trajectory=True, max_snapshots=100)
        assert summary.trajectory.times.size <= 201
        assert summary.trajectory.times[0] == 0
        assert summary.trajectory.times[-1] == summary.steps
        assert np.all(np.diff(summary.trajectory.times) > 0)

    def test_jump_counts_recorded(self):
        h = gen_complete(25)
        cfg = SimConfig(1.0, NormalInitial(0, 1.0), StopRule(max_steps=300), seed=13)
        summary = run(h, cfg, record_jumps=True)
        assert summary.jump_counts.size == summary.steps
        assert summary.jump_counts.sum() == summary.jump_total

    def test_stop_rule_must_be_active(self):
        with pytest.raises(ValueError, match="stop rule"):
            SimConfig(1.0, UniformInitial(0, 1), StopRule())

    def test_default_stop_cadences(self):
        explicit = ExplicitHypergraph(3, [[0, 1], [1, 2]])
        assert default_stop(explicit).absorbing_every == 2
        assert default_stop(gen_complete(10)).absorbing_every == 64


class TestAbsorbingExplicit:
    def test_consensus_state(self):
        h = ExplicitHypergraph(3, [[0, 1], [1, 2], [0, 1, 2]])
        assert is_absorbing_explicit(h, np.array([2.0, 2.0, 2.0]), confidence_bound=1.0)

    def test_two_distant_clusters(self):
        # Two pairwise-connected clusters at 0 and 10: every mixed pair has
        # discordance 50, far above the bound.
        edges = [[0, 1], [2, 3], [0, 2], [0, 3], [1, 2], [1, 3]]
        h = ExplicitHypergraph(4, edges)
        x = np.array([0.0, 0.0, 10.0, 10.0])
        assert is_absorbing_explicit(h, x, confidence_bound=1.0)

    def test_mediated_triple_not_absorbing(self):
        h = ExplicitHypergraph(3, [[0, 1, 2]])
        assert not is_absorbing_explicit(h, np.array([0.0, 1.0, 0.5]), confidence_bound=0.3)


class TestAbsorbingClustered:
    def clustered_state(self, values, sizes):
        x = np.concatenate([np.full(s, v) for v, s in zip(values, sizes)])
        return extract_clusters(x, tol=1e-9), x

    def test_dominant_cluster_plus_outsider_rule(self):
        # Values 0 and 1 with sizes 3 and 1: the least discordant mixed
        # hyperedge has discordance 1/4, so absorption holds iff c <= 1/4.
        clusters, _ = self.clustered_state([0.0, 1.0], [3, 1])
        h = CompleteHypergraph(4)
        assert is_absorbing_clustered(clusters, h, confidence_bound=0.25)
        assert not is_absorbing_clustered(clusters, h, confidence_bound=0.2500001)

    def test_singleton_pair_boundary(self):
        # Two singletons exactly sqrt(2c) apart give discordance exactly c,
        # which is absorbing because updates require strict inequality.
        c = 0.7
        gap = math.sqrt(2 * c)
        clusters, _ = self.clustered_state([0.0, gap], [1, 1])
        assert is_absorbing_clustered(clusters, CompleteHypergraph(2), confidence_bound=c)

    def test_bridged_communities_far_apart(self):
        clusters, _ = self.clustered_state([2.0, -2.0], [500, 500])
        h = BlockHypergraph([0] * 500 + [1] * 500, mixed=True, max_mixed_size=2)
        assert is_absorbing_clustered(clusters, h, confidence_bound=1.0)

    def test_single_cluster_always_absorbing(self):
        clusters, _ = self.clustered_state([1.5], [7])
        assert is_absorbing_clustered(clusters, CompleteHypergraph(7), confidence_bound=0.01)

    def test_rejects_unclustered_state(self):
        # Consecutive gaps below the tolerance chain into one wide cluster.
        x = np.arange(8) * 0.9e-3
        clusters = extract_clusters(x, tol=1e-3)
        assert clusters.max_deviation > clusters.tol
        with pytest.raises(ValueError, match="not a clustered"):
            is_absorbing_clustered(clusters, CompleteHypergraph(8), confidence_bound=1.0)

    def test_agrees_with_brute_force_complete(self):
        rng = derive_rng(21)
        for _ in range(300):
            n = int(rng.integers(2, 13))
            m = int(rng.integers(1, min(4, n) + 1))
            values = np.cumsum(rng.uniform(0.05, 3.0, size=m)) * rng.choice([-1.0, 1.0])
            sizes = np.ones(m, dtype=int)
            for _ in range(n - m):
                sizes[rng.integers(m)] += 1
            x = np.concatenate([np.full(s, v) for v, s in zip(values, sizes)])
            x = x[rng.permutation(n)]
            c = float(rng.uniform(0.01, 4.0))
            clusters = extract_clusters(x, tol=1e-9)
            fast = is_absorbing_clustered(clusters, CompleteHypergraph(n), c)
            assert fast == brute_force_absorbing(x, c)

    def test_agrees_with_brute_force_block(self):
        rng = derive_rng(22)
        for trial in range(120):
            sizes = [int(rng.integers(2, 5)) for _ in range(int(rng.integers(2, 4)))]
            part = Partition.from_sizes(sizes)
            q = float(rng.integers(0, 2))
            cap = None if rng.random() < 0.5 else int(rng.integers(2, 4))
            params = HsbmParams(part, p=1.0, q=q, max_mixed_size=cap)
            explicit = gen_hsbm(params, derive_rng(trial), mode="explicit")
            implicit = gen_hsbm(params, derive_rng(trial), mode="implicit")
            n = part.node_count
            m = int(rng.integers(1, 4))
            values = np.cumsum(rng.uniform(0.05, 3.0, size=m))
            labels = rng.integers(0, m, size=n)
            labels[rng.integers(n)] = 0  # every value need not appear; extraction recounts
            x = values[labels]
            c = float(rng.uniform(0.01, 4.0))
            clusters = extract_clusters(x, tol=1e-9)
            fast = is_absorbing_clustered(clusters, implicit, c)
            slow = is_absorbing_explicit(explicit, x, c)
            assert fast == slow, (sizes, q, cap, values[labels], c)

    def test_requires_implicit_representation(self):
        clusters, _ = self.clustered_state([0.0, 5.0], [2, 2])
        h = ExplicitHypergraph(4, [[0, 1]])
        with pytest.raises(TypeError, match="implicit"):
            is_absorbing_clustered(clusters, h, confidence_bound=1.0)
