"""Monte Carlo estimates of the capacity and its components.

Samples are generated in fixed blocks of :data:`BLOCK_SIZE` draws.  Block
``b`` always uses the ``b``-th child of the master seed, and per-block
statistics are merged in block order, so an estimate depends only on
``(scenario, n_samples, seed)``: neither ``batch_size`` (how many blocks are
held in memory at once) nor ``workers`` (how many run concurrently) changes
a single bit of the result.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .capacity import resolve_regimes
from .channel import sample_e2e_snr
from .errors import ParameterError

__all__ = ["MCConfig", "MCEstimate", "RunningStats", "BLOCK_SIZE", "COMPONENTS",
           "estimate_capacity", "estimate_component", "estimate_all"]

BLOCK_SIZE = 1 << 16

COMPONENTS = ("C", "C1", "C2", "C12")


@dataclass(frozen=True)
class MCConfig:
    n_samples: int = 10_000_000
    seed: int = 20240101
    batch_size: int = 1 << 20
    workers: int = 1

    def __post_init__(self):
        if int(self.n_samples) < 1000:
            raise ParameterError("n_samples", "must be at least 1000")
        if int(self.batch_size) < 1:
            raise ParameterError("batch_size", "must be positive")
        if int(self.workers) < 1:
            raise ParameterError("workers", "must be positive")


@dataclass(frozen=True)
class MCEstimate:
    """Sample mean with its standard error (sample std / sqrt(n))."""

    mean: float
    std_error: float
    n: int

    def interval(self, z=3.0):
        return self.mean - z * self.std_error, self.mean + z * self.std_error


class RunningStats:
    """Count, mean and centred sum of squares, mergeable (Chan et al.)."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self, n=0, mean=0.0, m2=0.0):
        self.n = n
        self.mean = mean
        self.m2 = m2

    @classmethod
    def of(cls, values):
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return cls()
        mean = float(values.mean())
        return cls(values.size, mean, float(np.sum((values - mean) ** 2)))

    def merge(self, other):
        if other.n == 0:
            return self
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean, other.m2
            return self
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean += delta * other.n / n
        self.m2 += other.m2 + delta * delta * self.n * other.n / n
        self.n = n
        return self

    @property
    def variance(self):
        return self.m2 / (self.n - 1) if self.n > 1 else 0.0

    def estimate(self):
        return MCEstimate(self.mean, math.sqrt(self.variance / self.n) if self.n else 0.0,
                          self.n)


def _block_values(scn, regimes, seed, block, size):
    seq = np.random.SeedSequence(int(seed) & (2 ** 64 - 1), spawn_key=(block,))
    gen = np.random.Generator(np.random.PCG64(seq))
    e2e, g1, g2 = sample_e2e_snr(scn.hop1, scn.hop2, scn.sys, gen, regimes,
                                 size=size, return_hops=True)
    return {
        "C": 0.5 * np.log2(1.0 + e2e),
        "C1": np.log2(1.0 + g1),
        "C2": np.log2(1.0 + g2),
        "C12": np.log2(1.0 + g1 + g2),
    }


def _block_stats(scn, regimes, seed, block, size):
    values = _block_values(scn, regimes, seed, block, size)
    return {key: RunningStats.of(val) for key, val in values.items()}


def estimate_all(scn, cfg=MCConfig()):
    """Estimates of C, C1, C2 and C12 from one shared set of draws."""
    regimes = resolve_regimes(scn)
    n = int(cfg.n_samples)
    n_blocks = -(-n // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, n - b * BLOCK_SIZE) for b in range(n_blocks)]
    per_batch = max(1, int(cfg.batch_size) // BLOCK_SIZE)
    totals = {key: RunningStats() for key in COMPONENTS}

    def run(block):
        return _block_stats(scn, regimes, cfg.seed, block, sizes[block])

    with ThreadPoolExecutor(max_workers=int(cfg.workers)) as pool:
        for start in range(0, n_blocks, per_batch):
            blocks = range(start, min(n_blocks, start + per_batch))
            # map() yields in submission order, which fixes the merge order
            for stats in pool.map(run, blocks):
                for key in COMPONENTS:
                    totals[key].merge(stats[key])
    return {key: totals[key].estimate() for key in COMPONENTS}


def estimate_capacity(scn, cfg=MCConfig()):
    """Monte Carlo estimate of 1/2 E[log2(1 + g_e2e)]."""
    return estimate_component(scn, "C", cfg)


def estimate_component(scn, which, cfg=MCConfig()):
    """Monte Carlo estimate of one of ``"C"``, ``"C1"``, ``"C2"``, ``"C12"``.

    C1 and C2 are E[log2(1 + g_l)], C12 is E[log2(1 + g1 + g2)]; all three
    are pre-halving, like the fields of :class:`~gkrelay.capacity.CapacityResult`.
    """
    which = str(which).upper()
    if which not in COMPONENTS:
        raise ParameterError("which", "must be one of %s" % ", ".join(COMPONENTS))
    return estimate_all(scn, cfg)[which]
