"""Exact spillage distribution via the log-space recursion over L(r, k).

For ``0 < phi < inf`` the table

    L(r, k) = log C(n, k+r) + (n-k-r) log phi + log S(k+r, k)

is filled column by column, and column k normalised by its log-sum-exp is the
log-pmf.  ``phi = 0`` and ``phi = inf`` are point masses at ``r = n-k`` and
``r = 0`` respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numba
import numpy as np

from .errors import ParameterError
from .kernel import NEG_INF, log_factorials, log_sum_exp


class Method(str, Enum):
    EXACT = "exact"
    APPROX = "approx"


@dataclass(frozen=True)
class SpillageParams:
    n: int
    k: int
    phi: float

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"size n must be a positive integer, got {self.n!r}")
        if int(self.k) != self.k or not 0 <= self.k <= self.n:
            raise ParameterError(f"occupancy k must satisfy 0 <= k <= n, got k={self.k!r}, n={self.n}")
        phi = float(self.phi)
        if math.isnan(phi) or phi < 0:
            raise ParameterError(f"scale phi must be in [0, inf], got {self.phi!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "phi", phi)

    @property
    def support_size(self) -> int:
        return self.n - self.k + 1

    @property
    def is_point_mass(self) -> bool:
        return self.phi == 0.0 or math.isinf(self.phi) or self.k == 0 or self.k == self.n


@dataclass(frozen=True)
class LogMassVector:
    """Normalised log-pmf over r = 0..n-k."""

    params: SpillageParams
    logmass: np.ndarray = field(repr=False)
    method: Method = Method.EXACT

    def __post_init__(self) -> None:
        self.logmass.flags.writeable = False

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.params.support_size)

    @property
    def pmf(self) -> np.ndarray:
        return np.exp(self.logmass)

    def __len__(self) -> int:
        return self.logmass.size


def point_mass(size: int, at: int) -> np.ndarray:
    out = np.full(size, NEG_INF)
    out[at] = 0.0
    return out


@numba.njit(cache=True, nogil=True)
def _fill_recursion(n, k, rows, log_phi, log_binom_row0):
    # L[r, kk] for r < rows, kk <= k.  Every cell is computed from the same
    # inputs whatever the table shape, so columns are bit-identical between
    # single and block evaluation.
    L = np.full((rows, k + 1), -np.inf)
    L[0, 0] = n * log_phi
    for kk in range(1, k + 1):
        L[0, kk] = log_binom_row0[kk] + (n - kk) * log_phi
        log_kk = math.log(kk)
        for r in range(1, min(rows, n - kk + 1)):
            a = log_kk + L[r - 1, kk]
            b = L[r, kk - 1]
            if a < b:
                a, b = b, a
            if b == -np.inf:
                s = a
            else:
                s = a + math.log1p(math.exp(b - a))
            L[r, kk] = math.log(n - kk - r + 1) - math.log(kk + r) - log_phi + s
    return L


def recursion_table(n: int, k: int, phi: float, rows: int | None = None) -> np.ndarray:
    """Raw L(r, kk) table with ``rows`` rows (default ``n - k + 1``)."""
    if not 0.0 < phi < math.inf:
        raise ParameterError("recursion table needs 0 < phi < inf")
    if rows is None:
        rows = n - k + 1
    lf = log_factorials(n)
    kk = np.arange(k + 1)
    log_binom_row0 = lf[n] - lf[kk] - lf[n - kk]
    return _fill_recursion(n, k, rows, math.log(phi), log_binom_row0)


def _normalise(column: np.ndarray) -> np.ndarray:
    return column - log_sum_exp(column)


def spillage_log_pmf(params: SpillageParams) -> LogMassVector:
    """Exact log-pmf of the spillage distribution."""
    n, k, phi = params.n, params.k, params.phi
    size = params.support_size
    if phi == 0.0:
        logmass = point_mass(size, size - 1)
    elif math.isinf(phi):
        logmass = point_mass(size, 0)
    else:
        L = recursion_table(n, k, phi)
        logmass = _normalise(L[:, k])
    return LogMassVector(params, logmass, Method.EXACT)


def spillage_log_pmf_block(n: int, k_max: int, phi: float) -> list[LogMassVector]:
    """Log-pmfs for every occupancy k = 0..k_max from a single table."""
    SpillageParams(n, k_max, phi)
    if not 0.0 < phi < math.inf:
        raise ParameterError("block evaluation needs 0 < phi < inf")
    L = recursion_table(n, k_max, phi, rows=n + 1)
    return [
        LogMassVector(SpillageParams(n, kk, phi), _normalise(L[: n - kk + 1, kk]), Method.EXACT)
        for kk in range(k_max + 1)
    ]


def _as_logmass(dist: SpillageParams | LogMassVector) -> LogMassVector:
    if isinstance(dist, LogMassVector):
        return dist
    return spillage_log_pmf(dist)


def cdf_vector(dist: SpillageParams | LogMassVector) -> np.ndarray:
    """Cumulative probabilities over the whole support; the last entry is 1."""
    lm = _as_logmass(dist)
    cdf = np.exp(np.logaddexp.accumulate(lm.logmass))
    np.minimum(cdf, 1.0, out=cdf)
    cdf[-1] = 1.0
    return cdf


def spillage_cdf(dist: SpillageParams | LogMassVector, r: int) -> float:
    lm = _as_logmass(dist)
    if r < 0:
        return 0.0
    if r >= len(lm) - 1:
        return 1.0
    return float(cdf_vector(lm)[r])


def spillage_quantile(dist: SpillageParams | LogMassVector, q: float) -> int:
    """Smallest r with ``cdf(r) >= q``; ``q = 0`` gives the lowest support point."""
    if not 0.0 <= q <= 1.0:
        raise ParameterError(f"quantile level must lie in [0, 1], got {q}")
    lm = _as_logmass(dist)
    if q == 0.0:
        return int(np.flatnonzero(lm.logmass > NEG_INF)[0])
    return int(np.searchsorted(cdf_vector(lm), q, side="left"))


def spillage_sample(dist: SpillageParams | LogMassVector, count: int, seed: int) -> np.ndarray:
    """Inverse-CDF draws using numpy's PCG64 seeded with ``seed``."""
    if count < 0:
        raise ParameterError("count must be non-negative")
    cdf = cdf_vector(dist)
    u = np.random.default_rng(seed).random(count)
    # side="right": a zero-mass point can never be selected, even for u = 0
    return np.searchsorted(cdf, u, side="right").astype(np.int64)
