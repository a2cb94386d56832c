"""Extended occupancy distribution and its mixture identities with the spillage law.

With n balls, m bins and occupation probability theta, the occupancy number has

    Occ(k | n, m, theta) = theta^n / m^n * (m)_k * S(n, k, m (1-theta) / theta),

and the effective number of balls K + R is Bin(n, theta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import LogMassVector, Method, SpillageParams, point_mass, spillage_log_pmf, spillage_log_pmf_block
from .errors import NumericalDomainError, ParameterError
from .kernel import (
    NEG_INF,
    log_binomial,
    log_falling_factorial,
    log_sum_exp,
    noncentral_stirling_log_table,
)

NORMALISATION_TOL = 1e-12


def scale_from_occupancy(m: int, theta: float) -> float:
    """``phi = m (1 - theta) / theta``; ``theta = 0`` maps to ``inf``."""
    if theta == 0.0:
        return math.inf
    return m * (1.0 - theta) / theta


@dataclass(frozen=True)
class OccupancyParams:
    n: int
    m: int
    theta: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"number of balls must be a positive integer, got {self.n!r}")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"number of bins must be a positive integer, got {self.m!r}")
        if not 0.0 <= self.theta <= 1.0:
            raise ParameterError(f"theta must lie in [0, 1], got {self.theta!r}")

    @property
    def phi(self) -> float:
        return scale_from_occupancy(self.m, self.theta)

    @property
    def k_max(self) -> int:
        return min(self.n, self.m)


@dataclass(frozen=True)
class OccLogMass:
    params: OccupancyParams
    logmass: np.ndarray = field(repr=False)

    @property
    def pmf(self) -> np.ndarray:
        return np.exp(self.logmass)


def occupancy_log_pmf(params: OccupancyParams) -> OccLogMass:
    """Log-pmf of the occupancy number over k = 0..min(n, m)."""
    n, m, theta = params.n, params.m, params.theta
    size = params.k_max + 1
    if theta == 0.0:
        return OccLogMass(params, point_mass(size, 0))
    table = noncentral_stirling_log_table(n, params.k_max, params.phi)
    base = n * math.log(theta) - n * math.log(m)
    logmass = np.array([base + log_falling_factorial(m, k) + table(n, k) for k in range(size)])
    total = log_sum_exp(logmass)
    if abs(total) > NORMALISATION_TOL:
        raise NumericalDomainError(f"occupancy pmf normalises to exp({total})")
    return OccLogMass(params, logmass)


def classical_occupancy_log_pmf(k: int, n: int, m: int) -> float:
    """``log Occ(k | n, m)`` for the classical case theta = 1."""
    if k < 0 or k > min(n, m):
        return NEG_INF
    if n == 0:
        return 0.0 if k == 0 else NEG_INF
    s = noncentral_stirling_log_table(n, k, 0.0)(n, k)
    return log_falling_factorial(m, k) + s - n * math.log(m)


def binomial_log_pmf(n: int, theta: float, x: int) -> float:
    """``log Bin(x | n, theta)`` with the convention ``0 log 0 = 0``."""
    if x < 0 or x > n:
        return NEG_INF
    out = log_binomial(n, x)
    if x:
        if theta == 0.0:
            return NEG_INF
        out += x * math.log(theta)
    if n - x:
        if theta == 1.0:
            return NEG_INF
        out += (n - x) * math.log1p(-theta)
    return out


def _spillage_columns(n: int, k_max: int, phi: float) -> list[LogMassVector]:
    if 0.0 < phi < math.inf:
        return spillage_log_pmf_block(n, k_max, phi)
    return [spillage_log_pmf(SpillageParams(n, k, phi)) for k in range(k_max + 1)]


def binomial_mixture(n: int, m: int, theta: float) -> np.ndarray:
    """``sum_k Spillage(x-k | n, k, phi) Occ(k | n, m, theta)`` for x = 0..n."""
    params = OccupancyParams(n, m, theta)
    occ = occupancy_log_pmf(params).logmass
    columns = _spillage_columns(n, params.k_max, params.phi)
    out = np.zeros(n + 1)
    for x in range(n + 1):
        terms = [columns[k].logmass[x - k] + occ[k] for k in range(min(x, params.k_max) + 1)]
        out[x] = math.exp(log_sum_exp(terms))
    return out


def mixture_binomial_residual(n: int, m: int, theta: float) -> float:
    """Largest gap between Bin(x | n, theta) and its occupancy/spillage mixture."""
    mixed = binomial_mixture(n, m, theta)
    direct = np.exp([binomial_log_pmf(n, theta, x) for x in range(n + 1)])
    return float(np.max(np.abs(mixed - direct)))


def occupancy_mixture_residual(n: int, m: int, theta: float) -> float:
    """Largest gap in ``Occ(k | n, m, theta) = sum_j Occ(k | j, m) Bin(j | n, theta)``."""
    params = OccupancyParams(n, m, theta)
    occ = occupancy_log_pmf(params).pmf
    worst = 0.0
    for k in range(params.k_max + 1):
        terms = [
            classical_occupancy_log_pmf(k, j, m) + binomial_log_pmf(n, theta, j)
            for j in range(k, n + 1)
        ]
        worst = max(worst, abs(math.exp(log_sum_exp(terms)) - occ[k]))
    return worst


def spillage_via_ratio(n: int, k: int, phi: float, m: int) -> LogMassVector:
    """Spillage pmf as a normalised ``Occ(k | k+r, m) Bin(k+r | n, theta)``, theta = m/(m+phi)."""
    params = SpillageParams(n, k, phi)
    if int(m) != m or m < max(k, 1):
        raise ParameterError(f"need integer m >= max(k, 1), got m={m}, k={k}")
    if not 0.0 < phi < math.inf:
        raise ParameterError("ratio form needs 0 < phi < inf")
    theta = m / (m + phi)
    central = noncentral_stirling_log_table(n, k, 0.0)
    log_ff = log_falling_factorial(m, k)
    log_m = math.log(m)
    lk = np.array([
        log_ff + central(k + r, k) - (k + r) * log_m + binomial_log_pmf(n, theta, k + r)
        for r in range(n - k + 1)
    ])
    return LogMassVector(params, lk - log_sum_exp(lk), Method.EXACT)
