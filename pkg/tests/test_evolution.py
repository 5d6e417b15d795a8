import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from netgames.engine import Population, init_random, play_step
from netgames.evolution import (
    AdoptionConfig,
    MoranConfig,
    adoption_event,
    adoption_probability,
    moran_event,
    run,
    write_run_csv,
    _select_neighbor,
)
from netgames.networks import Network, complete_graph, regular_random
from netgames.strategies import DEFAULT_MATRIX, named_strategy

M = DEFAULT_MATRIX
ZD = named_strategy("zd_default")
PAVLOV = named_strategy("pavlov")
COOPERATOR = named_strategy("cooperator")
DEFECTOR = named_strategy("defector")

D_ZD_PAVLOV = 5.0 / 11.0  # |E(zd, pavlov) - E(pavlov, zd)| = 27/11 - 22/11


class TestConfigs:
    def test_moran_events_per_step(self):
        assert MoranConfig(0.001).events_per_step(1000) == 1
        assert MoranConfig(0.01).events_per_step(1000) == 10
        assert MoranConfig(0.001).events_per_step(200) == 1  # floor of one event

    def test_moran_rate_validated(self):
        with pytest.raises(ValueError):
            MoranConfig(0.0)
        with pytest.raises(ValueError):
            MoranConfig(1.5)

    def test_adoption_normalizer_for_zd_pavlov(self):
        cfg = AdoptionConfig.for_pair(ZD, PAVLOV, M)
        assert cfg.normalizer == pytest.approx(D_ZD_PAVLOV, abs=1e-12)
        assert cfg.effective_normalizer == pytest.approx(D_ZD_PAVLOV, abs=1e-12)
        assert cfg.fallback_normalizer == 5.0

    def test_tied_pair_uses_fallback(self):
        # tft-vs-pavlov expected payoffs tie exactly, so t - s takes over
        cfg = AdoptionConfig.for_pair(named_strategy("tit_for_tat"), PAVLOV, M)
        assert cfg.effective_normalizer == 5.0

    def test_self_pair_uses_fallback(self):
        cfg = AdoptionConfig.for_pair(PAVLOV, PAVLOV, M)
        assert cfg.effective_normalizer == 5.0


class TestAdoptionProbability:
    def test_large_gap_clamps_to_one(self):
        # unclamped value would be 6 / (3 * 5/11) = 4.4
        assert adoption_probability(4.0, 10.0, 3, 2, D_ZD_PAVLOV) == 1.0

    def test_graded_value(self):
        p = adoption_probability(4.0, 5.0, 3, 2, D_ZD_PAVLOV)
        assert p == pytest.approx(1.0 / (3 * D_ZD_PAVLOV))

    def test_zero_when_not_richer(self):
        assert adoption_probability(10.0, 10.0, 3, 2, D_ZD_PAVLOV) == 0.0
        assert adoption_probability(11.0, 10.0, 3, 2, D_ZD_PAVLOV) == 0.0

    @given(
        st.floats(min_value=-100, max_value=100),
        st.floats(min_value=-100, max_value=100),
        st.integers(min_value=1, max_value=50),
        st.integers(min_value=1, max_value=50),
        st.floats(min_value=0.01, max_value=10),
    )
    def test_always_a_probability(self, px, py, kx, ky, d):
        assert 0.0 <= adoption_probability(px, py, kx, ky, d) <= 1.0


class TestMoranEvent:
    def test_homogeneous_census_unchanged(self):
        net = regular_random(30, 4, seed=1)
        pop = init_random(net, ZD, PAVLOV, 1.0, seed=2)
        rng = np.random.default_rng(3)
        for _ in range(50):
            moran_event(pop, rng)
        assert pop.counts.tolist() == [30, 0]

    def test_replaced_node_copies_neighbor_and_resets(self):
        net = Network(2, [(0, 1)])
        pop = Population(net, (ZD, PAVLOV), np.array([0, 1]))
        pop.pay[:] = [3.0, 9.0]
        rng = np.random.default_rng(4)
        x, y = moran_event(pop, rng)
        assert {x, y} == {0, 1}
        assert pop.strat[x] == pop.strat[y]
        assert pop.pay[x] == 0.0

    def test_zero_fitness_falls_back_to_uniform(self):
        net = Network(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
        pop = Population(net, (ZD,), np.zeros(5, dtype=int))
        rng = np.random.default_rng(5)
        picks = np.array([_select_neighbor(pop, 0, rng) for _ in range(2000)])
        counts = np.bincount(picks, minlength=5)[1:]
        assert counts.min() > 400  # ~500 each under uniform choice

    def test_selection_proportional_to_payoff_over_degree(self):
        net = Network(3, [(0, 1), (0, 2), (1, 2)])
        pop = Population(net, (ZD,), np.zeros(3, dtype=int))
        pop.pay[:] = [0.0, 30.0, 10.0]
        rng = np.random.default_rng(6)
        picks = np.array([_select_neighbor(pop, 0, rng) for _ in range(3000)])
        share = (picks == 1).mean()
        assert 0.7 < share < 0.8  # 30 vs 10 at equal degree: expect 3/4

    def test_topology_untouched(self):
        net = regular_random(20, 4, seed=7)
        pop = init_random(net, ZD, PAVLOV, 0.5, seed=8)
        edges_before = net.edges.copy()
        rng = np.random.default_rng(9)
        for _ in range(100):
            moran_event(pop, rng)
        assert np.array_equal(net.edges, edges_before)


class TestAdoptionEvent:
    def test_never_adopts_from_poorer_neighbor(self):
        net = Network(2, [(0, 1)])
        cfg = AdoptionConfig.for_pair(ZD, PAVLOV, M)
        rng = np.random.default_rng(10)
        for _ in range(200):
            pop = Population(net, (ZD, PAVLOV), np.array([0, 1]))
            pop.pay[:] = [10.0, 1.0]
            x, y, adopted = adoption_event(pop, cfg, rng)
            if x == 0:
                assert not adopted  # neighbor is poorer
                assert pop.strat[0] == 0

    def test_huge_gap_forces_adoption_and_reset(self):
        net = Network(2, [(0, 1)])
        cfg = AdoptionConfig.for_pair(COOPERATOR, DEFECTOR, M)
        rng = np.random.default_rng(11)
        adopted_any = False
        for _ in range(50):
            pop = Population(net, (COOPERATOR, DEFECTOR), np.array([0, 1]))
            pop.pay[:] = [0.0, 100.0]
            pop.mem[:] = 0
            x, y, adopted = adoption_event(pop, cfg, rng)
            if x == 0:
                adopted_any = True
                assert adopted and pop.strat[0] == 1
                assert pop.pay[0] == 0.0
                assert pop.mem[0] == 4  # incident memory forgotten
        assert adopted_any

    def test_extinction_is_absorbing(self):
        net = regular_random(20, 4, seed=12)
        pop = init_random(net, ZD, PAVLOV, 1.0, seed=13)
        cfg = AdoptionConfig.for_pair(ZD, PAVLOV, M)
        rng = np.random.default_rng(14)
        for _ in range(300):
            play_step(pop, M, rng)
            adoption_event(pop, cfg, rng)
        assert pop.counts.tolist() == [20, 0]


class TestRun:
    def test_steps_guard(self):
        net = regular_random(10, 2, seed=15)
        pop = init_random(net, ZD, PAVLOV, 0.5, seed=16)
        with pytest.raises(ValueError):
            run(pop, "moran", 0, M, MoranConfig(), seed=1)

    def test_unknown_process(self):
        net = regular_random(10, 2, seed=15)
        pop = init_random(net, ZD, PAVLOV, 0.5, seed=16)
        with pytest.raises(ValueError):
            run(pop, "replicator", 10, M, MoranConfig(), seed=1)

    def test_mismatched_config(self):
        net = regular_random(10, 2, seed=15)
        pop = init_random(net, ZD, PAVLOV, 0.5, seed=16)
        with pytest.raises(TypeError):
            run(pop, "adoption", 10, M, MoranConfig(), seed=1)

    def test_homogeneous_start_is_flat(self):
        net = regular_random(20, 4, seed=17)
        pop = init_random(net, ZD, PAVLOV, 1.0, seed=18)
        rec = run(pop, "moran", 500, M, MoranConfig(), seed=19, sample_every=100)
        assert np.all(rec.frac_a == 1.0)
        assert rec.extinct_at == 0
        assert rec.final_fraction_a == 1.0

    def test_series_shape_and_final(self):
        net = regular_random(30, 4, seed=20)
        pop = init_random(net, ZD, PAVLOV, 0.5, seed=21)
        rec = run(pop, "moran", 250, M, MoranConfig(), seed=22, sample_every=100)
        assert rec.sample_steps.tolist() == [0, 100, 200, 250]
        assert len(rec.frac_a) == 4
        assert rec.final_fraction_a == rec.frac_a[-1]
        assert np.allclose(rec.frac_a + rec.frac_b, 1.0)

    def test_extinction_padding(self):
        # two nodes, one edge: extinction happens within a few adoption events
        net = Network(2, [(0, 1)])
        pop = Population(net, (COOPERATOR, DEFECTOR), np.array([0, 1]))
        cfg = AdoptionConfig.for_pair(COOPERATOR, DEFECTOR, M)
        rec = run(pop, "adoption", 2000, M, cfg, seed=23, sample_every=500)
        assert rec.extinct_at is not None
        assert rec.final_fraction_a in (0.0, 1.0)
        k = np.searchsorted(rec.sample_steps, rec.extinct_at, side="right")
        assert np.all(rec.frac_a[k:] == rec.final_fraction_a)
        assert np.all(np.isnan(rec.mean_pay_a[k:]) | (rec.frac_a[k:] > 0))

    def test_focal_index_flips_reporting(self):
        net = regular_random(20, 4, seed=24)
        pop = init_random(net, ZD, PAVLOV, 0.3, seed=25)
        rec = run(pop, "moran", 10, M, MoranConfig(), seed=26, focal_index=1)
        assert rec.label_a == "pavlov"
        assert rec.frac_a[0] == pytest.approx(0.7)

    def test_seed_determinism(self):
        recs = []
        for _ in range(2):
            net = regular_random(40, 4, seed=27)
            pop = init_random(net, ZD, PAVLOV, 0.5, seed=28)
            recs.append(run(pop, "adoption", 400, M,
                            AdoptionConfig.for_pair(ZD, PAVLOV, M), seed=29))
        assert np.array_equal(recs[0].frac_a, recs[1].frac_a)
        assert np.array_equal(
            np.nan_to_num(recs[0].mean_pay_a), np.nan_to_num(recs[1].mean_pay_a)
        )

    def test_csv_schema(self, tmp_path):
        net = regular_random(20, 4, seed=30)
        pop = init_random(net, ZD, PAVLOV, 0.5, seed=31)
        rec = run(pop, "moran", 100, M, MoranConfig(), seed=32, sample_every=50)
        path = tmp_path / "run.csv"
        write_run_csv(rec, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "run_id,step,fraction_a,fraction_b,mean_payoff_a,mean_payoff_b"
        assert len(lines) == 1 + len(rec.sample_steps)


class TestNeutralDrift:
    def test_single_mutant_fixation_smoke(self):
        # neutral twin strategies on a small complete graph: the mutant lineage
        # should fix occasionally, at a rate loosely around 1/n
        n, trials = 12, 400
        net = complete_graph(n)
        twin_a, twin_b = DEFECTOR, named_strategy("defector")
        fixed = 0
        for trial in range(trials):
            strat = np.zeros(n, dtype=int)
            strat[0] = 1
            pop = Population(net, (twin_a, twin_b), strat)
            rng = np.random.default_rng(1000 + trial)
            for _ in range(20_000):
                pop.pay[:] = 0.0
                play_step(pop, M, rng)
                moran_event(pop, rng)
                if pop.counts[1] == 0 or pop.counts[0] == 0:
                    break
            fixed += pop.counts[1] == n
        rate = fixed / trials
        assert 0.02 < rate < 0.18  # 1/12 = 0.083 with generous slack
