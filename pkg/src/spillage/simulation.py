"""Seeded Monte-Carlo of the extended balls-in-bins model.

Trials run in fixed-size chunks; chunk ``i`` draws from ``PCG64`` seeded by
the i-th child of ``SeedSequence(seed)``.  The merged tally therefore depends
only on ``(params, trials, seed)``, not on how many workers ran the chunks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import SpillageParams, spillage_log_pmf
from .errors import ParameterError
from .occupancy import OccupancyParams, binomial_log_pmf, occupancy_log_pmf

CHUNK_TRIALS = 1 << 16


@dataclass(frozen=True)
class SimRun:
    """Joint counts ``tallies[K, R]`` of occupancy and spillage numbers."""

    params: OccupancyParams
    trials: int
    seed: int
    tallies: np.ndarray = field(repr=False)

    def occupancy_counts(self) -> np.ndarray:
        return self.tallies.sum(axis=1)

    def effective_ball_counts(self) -> np.ndarray:
        n = self.params.n
        out = np.zeros(n + 1, dtype=np.int64)
        for k in range(self.tallies.shape[0]):
            out[k:] += self.tallies[k, : n + 1 - k]
        return out


def _run_chunk(n: int, m: int, theta: float, size: int, seed_seq: np.random.SeedSequence) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    bins = rng.integers(0, m, size=(size, n))
    occupies = rng.random((size, n)) < theta
    n_eff = occupies.sum(axis=1)
    hit = np.zeros((size, m), dtype=bool)
    rows = np.broadcast_to(np.arange(size)[:, None], (size, n))
    hit[rows[occupies], bins[occupies]] = True
    k = hit.sum(axis=1)
    r = n_eff - k
    width = n + 1
    counts = np.bincount(k * width + r, minlength=(min(n, m) + 1) * width)
    return counts.reshape(min(n, m) + 1, width)


def simulate(params: OccupancyParams, trials: int, seed: int, workers: int = 1) -> SimRun:
    """Tally (K_n, R_n) over ``trials`` independent allocations."""
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    n_chunks = -(-trials // CHUNK_TRIALS)
    sizes = [CHUNK_TRIALS] * (n_chunks - 1) + [trials - CHUNK_TRIALS * (n_chunks - 1)]
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    args = [(params.n, params.m, params.theta, s, c) for s, c in zip(sizes, children)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _run_chunk(*a), args))
    else:
        parts = [_run_chunk(*a) for a in args]
    tallies = np.sum(parts, axis=0, dtype=np.int64)
    return SimRun(params, trials, seed, tallies)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


@dataclass(frozen=True)
class ConditionalSpillage:
    """Empirical law of R given K = k next to the exact spillage pmf.

    ``empirical`` and ``tv_distance`` are None when no trial had K = k.
    """

    k: int
    count: int
    exact: np.ndarray
    empirical: Optional[np.ndarray]
    tv_distance: Optional[float]

    @property
    def insufficient_data(self) -> bool:
        return self.count == 0


def conditional_spillage_empirical(run: SimRun, k: int) -> ConditionalSpillage:
    p = run.params
    if not 0 <= k <= p.k_max:
        raise ParameterError(f"k must lie in [0, {p.k_max}]")
    exact = spillage_log_pmf(SpillageParams(p.n, k, p.phi)).pmf
    row = run.tallies[k, : p.n - k + 1]
    count = int(row.sum())
    if count == 0:
        return ConditionalSpillage(k, 0, exact, None, None)
    empirical = row / count
    return ConditionalSpillage(k, count, exact, empirical, total_variation(empirical, exact))


def effective_balls_tv(run: SimRun) -> float:
    """TV distance between the empirical n_eff law and Bin(n, theta)."""
    p = run.params
    binom = np.exp([binomial_log_pmf(p.n, p.theta, x) for x in range(p.n + 1)])
    return total_variation(run.effective_ball_counts() / run.trials, binom)


def occupancy_tv(run: SimRun) -> float:
    """TV distance between the empirical K law and the occupancy pmf."""
    exact = occupancy_log_pmf(run.params).pmf
    return total_variation(run.occupancy_counts() / run.trials, exact)
