"""Seeded pulse-by-pulse simulation of honest and attacked sessions.

The simulator draws at the conditional-probability level (the channel
tables), not the optical-field level; the physics enters only through
the table parameters.  Randomness is counter-based: each chunk of
pulses gets an independent substream derived from (seed, chunk index),
so serial and parallel executions agree bit for bit as long as
chunk_size is part of the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, CombinedChannel, EveStrategy, ThresholdVerdict, ab_table, aeb_table, threshold_test


@dataclass(frozen=True)
class SimConfig:
    n_pulses: int
    nu: float
    channel: ChannelModel
    eve: EveStrategy | None = None
    seed: int = 0
    chunk_size: int = 65536

    def __post_init__(self):
        if self.n_pulses < 1:
            raise ValueError("n_pulses must be >= 1")
        if not (0.0 < self.nu < 1.0):
            raise ValueError("nu must lie in (0, 1)")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")

    def table(self) -> CombinedChannel:
        if self.eve is None:
            return ab_table(self.channel)
        return aeb_table(self.channel, self.eve)


@dataclass(frozen=True)
class SimStats:
    """Outcome counts per input symbol with derived empirical rates."""

    counts: np.ndarray  # 3x3 int64, rows input 0/1/D, columns output 0/1/?
    n_pulses: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (3, 3):
            raise ValueError("counts must be 3x3")
        if int(counts.sum()) != self.n_pulses:
            raise ValueError("counts must sum to n_pulses")
        object.__setattr__(self, "counts", counts)

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def rates(self) -> np.ndarray:
        totals = np.maximum(self.row_totals, 1)
        return self.counts / totals[:, None]

    @property
    def rate_stderr(self) -> np.ndarray:
        """Binomial standard error per cell (zero for empty rows)."""
        totals = np.maximum(self.row_totals, 1)
        p = self.rates
        return np.sqrt(p * (1.0 - p) / totals[:, None])

    @property
    def n_decoys_sent(self) -> int:
        return int(self.row_totals[2])

    @property
    def n_decoys_detected(self) -> int:
        return int(self.counts[2, 0] + self.counts[2, 1])

    def to_dict(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "n_pulses": self.n_pulses,
            "rates": self.rates.tolist(),
            "rate_stderr": self.rate_stderr.tolist(),
            "n_decoys_sent": self.n_decoys_sent,
            "n_decoys_detected": self.n_decoys_detected,
        }


def _chunk_counts(
    seed: int, chunk_index: int, n: int, input_cum: np.ndarray, row_cum: np.ndarray
) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(chunk_index,)))
    u_in = rng.random(n)
    u_out = rng.random(n)
    idx_in = np.minimum(np.searchsorted(input_cum, u_in, side="right"), 2)
    # outcome j iff u lands in the j-th cumulative slot of the input's row
    idx_out = np.minimum((u_out[:, None] >= row_cum[idx_in]).sum(axis=1), 2)
    return np.bincount(idx_in * 3 + idx_out, minlength=9).reshape(3, 3).astype(np.int64)


def simulate(cfg: SimConfig) -> SimStats:
    """Draw n_pulses through the applicable table, chunk by chunk.

    Each pulse picks an input symbol (0 and 1 each with probability
    (1 - nu)/2, decoy with nu), then an outcome from that input's table
    row.  Identical (seed, chunk_size) give identical counts regardless
    of how chunks are scheduled, since aggregation is a plain sum.
    """
    table = cfg.table().matrix
    input_probs = np.array([(1.0 - cfg.nu) / 2.0, (1.0 - cfg.nu) / 2.0, cfg.nu])
    input_cum = np.cumsum(input_probs)
    row_cum = np.cumsum(table, axis=1)
    counts = np.zeros((3, 3), dtype=np.int64)
    n_chunks = math.ceil(cfg.n_pulses / cfg.chunk_size)
    for i in range(n_chunks):
        n = min(cfg.chunk_size, cfg.n_pulses - i * cfg.chunk_size)
        counts += _chunk_counts(cfg.seed, i, n, input_cum, row_cum)
    return SimStats(counts=counts, n_pulses=cfg.n_pulses)


def run_experiment(
    cfg: SimConfig, z: float, d_tilde: float | None = None
) -> tuple[ThresholdVerdict, SimStats]:
    """Simulate a session and apply the decoy-count threshold test.

    d comes from the honest channel; d_tilde defaults to the attacked
    decoy-detection rate (1 - p_e) d + p_e p_d d_e when an interceptor
    is configured, and to d itself otherwise (no separation possible).
    """
    stats = simulate(cfg)
    d = cfg.channel.d
    if d_tilde is None:
        if cfg.eve is not None:
            eve = cfg.eve
            d_tilde = (1.0 - eve.p_e) * d + eve.p_e * eve.p_d * eve.d_e
        else:
            d_tilde = d
    if stats.n_decoys_sent == 0:
        raise ValueError("no decoys were sent; increase n_pulses or nu")
    verdict = threshold_test(stats.n_decoys_sent, stats.n_decoys_detected, d, d_tilde, z)
    return verdict, stats
