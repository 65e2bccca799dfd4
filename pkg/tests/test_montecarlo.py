"""Simulation tests: reproducibility, convergence to the tables, detection."""

import math

import numpy as np
import pytest

from usdguard.channel import ChannelModel, EveStrategy, ab_table, aeb_table, solve_eve
from usdguard.montecarlo import SimConfig, SimStats, _chunk_counts, run_experiment, simulate

HONEST = ChannelModel(g=0.9, e=0.01, d0=0.01, d1=0.01)


def cat_attack_eve() -> EveStrategy:
    solved = solve_eve(HONEST, p_s=0.3935, p_d=1.0).strategy
    return EveStrategy(
        p_e=1.0, p_s=solved.p_s, p_d=0.0, g_e=solved.g_e, e_e=solved.e_e,
        d0_e=0.0, d1_e=0.0,
    )


def test_reproducible_counts():
    cfg = SimConfig(n_pulses=50_000, nu=0.01, channel=HONEST, seed=99)
    a = simulate(cfg)
    b = simulate(cfg)
    assert np.array_equal(a.counts, b.counts)
    assert int(a.counts.sum()) == 50_000


def test_chunk_aggregation_order_independent():
    cfg = SimConfig(n_pulses=200_000, nu=0.01, channel=HONEST, seed=5, chunk_size=30_000)
    table = cfg.table().matrix
    input_cum = np.cumsum([(1 - cfg.nu) / 2, (1 - cfg.nu) / 2, cfg.nu])
    row_cum = np.cumsum(table, axis=1)
    sizes = [30_000] * 6 + [20_000]
    parts = [
        _chunk_counts(cfg.seed, i, n, input_cum, row_cum) for i, n in enumerate(sizes)
    ]
    forward = sum(parts[i] for i in range(len(parts)))
    backward = sum(parts[i] for i in reversed(range(len(parts))))
    assert np.array_equal(forward, backward)
    assert np.array_equal(forward, simulate(cfg).counts)


def test_chunk_size_is_part_of_the_contract():
    a = simulate(SimConfig(n_pulses=10_000, nu=0.05, channel=HONEST, seed=3, chunk_size=1000))
    b = simulate(SimConfig(n_pulses=10_000, nu=0.05, channel=HONEST, seed=3, chunk_size=1000))
    assert np.array_equal(a.counts, b.counts)


def _assert_within_4_sigma(stats: SimStats, expected: np.ndarray):
    totals = stats.row_totals
    for i in range(3):
        n = totals[i]
        assert n > 0
        for j in range(3):
            p = expected[i, j]
            sigma = math.sqrt(p * (1.0 - p) / n)
            err = abs(stats.rates[i, j] - p)
            if sigma == 0.0:
                assert err == 0.0
            else:
                assert err <= 4.0 * sigma, (i, j, err, sigma)


def test_honest_rates_converge_to_table():
    cfg = SimConfig(n_pulses=100_000, nu=0.01, channel=HONEST, seed=12345)
    stats = simulate(cfg)
    _assert_within_4_sigma(stats, ab_table(HONEST).matrix)


def test_masked_eve_rates_match_honest_table():
    eve = solve_eve(HONEST, p_s=0.3935, p_d=1.0).strategy
    cfg = SimConfig(n_pulses=100_000, nu=0.01, channel=HONEST, eve=eve, seed=54321)
    stats = simulate(cfg)
    # Table with a statistics-preserving interceptor equals the honest one
    _assert_within_4_sigma(stats, ab_table(HONEST).matrix)


def test_attacked_rates_converge_to_attacked_table():
    eve = cat_attack_eve()
    cfg = SimConfig(n_pulses=100_000, nu=0.01, channel=HONEST, eve=eve, seed=777)
    stats = simulate(cfg)
    _assert_within_4_sigma(stats, aeb_table(HONEST, eve).matrix)


def test_blocked_decoys_land_inconclusive():
    cfg = SimConfig(n_pulses=200_000, nu=0.02, channel=HONEST, eve=cat_attack_eve(), seed=31)
    stats = simulate(cfg)
    assert stats.n_decoys_detected == 0
    assert stats.counts[2, 2] == stats.n_decoys_sent > 0


def test_run_experiment_honest_not_flagged():
    cfg = SimConfig(n_pulses=1_000_000, nu=0.01, channel=HONEST, seed=2024)
    verdict, stats = run_experiment(cfg, z=5.0, d_tilde=0.0)
    assert stats.n_decoys_detected > 0
    assert verdict.bounds_separated
    assert not verdict.attack_detected


def test_run_experiment_attack_flagged():
    cfg = SimConfig(n_pulses=1_000_000, nu=0.01, channel=HONEST, eve=cat_attack_eve(), seed=2024)
    verdict, stats = run_experiment(cfg, z=5.0)
    assert stats.n_decoys_detected == 0
    assert verdict.bounds_separated
    assert verdict.attack_detected


def test_run_experiment_below_separation_point():
    cfg = SimConfig(n_pulses=2_000, nu=0.01, channel=HONEST, eve=cat_attack_eve(), seed=9)
    verdict, _ = run_experiment(cfg, z=5.0)
    assert not verdict.bounds_separated
    assert not verdict.attack_detected


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n_pulses=0, nu=0.01, channel=HONEST)
    with pytest.raises(ValueError):
        SimConfig(n_pulses=10, nu=0.0, channel=HONEST)
    with pytest.raises(ValueError):
        SimConfig(n_pulses=10, nu=0.01, channel=HONEST, chunk_size=0)


def test_stats_consistency():
    cfg = SimConfig(n_pulses=30_000, nu=0.05, channel=HONEST, seed=1)
    stats = simulate(cfg)
    assert int(stats.counts.sum()) == cfg.n_pulses
    assert np.allclose(stats.rates.sum(axis=1), 1.0)
    d = stats.to_dict()
    assert d["n_decoys_detected"] == stats.n_decoys_detected
    assert np.array(d["counts"]).sum() == cfg.n_pulses
