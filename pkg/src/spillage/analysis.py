"""Moments, generating functions and asymptotics of the spillage distribution.

Everything is expressed through ratios of noncentral Stirling numbers

    H_l = phi^l S(n-l, k, phi) / S(n, k, phi),
    Q_l(s) = S(n-l, k, phi e^-s) / S(n, k, phi e^-s),

evaluated from one log-space table per scale value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .core import SpillageParams, spillage_log_pmf
from .errors import ParameterError
from .kernel import log_binomial, noncentral_stirling_log_table

FD_STEP = 1e-5
MOMENT_DPS = 40


def _require_finite_positive_phi(params: SpillageParams) -> None:
    if not 0.0 < params.phi < math.inf:
        raise ParameterError(f"operation needs 0 < phi < inf, got {params.phi}")


@dataclass(frozen=True)
class HVector:
    values: tuple[float, ...]

    def __getitem__(self, ell: int) -> float:
        return self.values[ell]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MomentSet:
    """Mean, variance, skewness and kurtosis.

    Skewness and kurtosis are ``None`` ("undefined") when the variance is 0.
    """

    mean: float
    variance: float
    skewness: Optional[float]
    kurtosis: Optional[float]


@dataclass(frozen=True)
class AsymptoticMomentSet:
    psi: float
    mean: float
    variance: float
    skewness: Optional[float]
    kurtosis: Optional[float]


def h_values(params: SpillageParams, ell_max: int = 4) -> HVector:
    _require_finite_positive_phi(params)
    n, k, phi = params.n, params.k, params.phi
    if not 0 <= ell_max <= n:
        raise ParameterError(f"ell_max must lie in [0, n], got {ell_max}")
    table = noncentral_stirling_log_table(n, k, phi)
    top = table(n, k)
    log_phi = math.log(phi)
    values = [1.0]
    for ell in range(1, ell_max + 1):
        values.append(math.exp(ell * log_phi + table(n - ell, k) - top))
    return HVector(tuple(values))


def h_deficit(params: SpillageParams, ell: int) -> float:
    """``psi^l - H_l`` evaluated without cancellation.

    Uses ``psi^l - H_l = phi^l sum_{j=1..l} (k+phi)^(j-l-1) S(n-j, k-1, phi) / S(n, k, phi)``,
    so the result keeps full relative precision even when it is far below
    machine epsilon relative to ``psi^l``.
    """
    _require_finite_positive_phi(params)
    n, k, phi = params.n, params.k, params.phi
    if not 1 <= ell <= n:
        raise ParameterError("deficit needs 1 <= ell <= n")
    if k == 0:
        return 0.0
    table = noncentral_stirling_log_table(n, k, phi)
    top = table(n, k)
    log_phi, log_kphi = math.log(phi), math.log(k + phi)
    total = 0.0
    for j in range(1, ell + 1):
        total += math.exp(ell * log_phi + (j - ell - 1) * log_kphi + table(n - j, k - 1) - top)
    return total


def precise_h_values(params: SpillageParams, ell_max: int = 4, dps: int = MOMENT_DPS) -> list:
    """H_0..H_ell_max as mpmath numbers carried at ``dps`` significant digits."""
    _require_finite_positive_phi(params)
    n, k = params.n, params.k
    if not 0 <= ell_max <= n:
        raise ParameterError(f"ell_max must lie in [0, n], got {ell_max}")
    with mpmath.workprec(int(dps * 3.33) + 8):
        phi = mpmath.mpf(params.phi)
        weights = [kk + phi for kk in range(k + 1)]
        zero = mpmath.mpf(0)
        row = [mpmath.mpf(1)] + [zero] * k
        rows = {0: row}
        for j in range(1, n + 1):
            row = [weights[0] * row[0]] + [weights[kk] * row[kk] + row[kk - 1] for kk in range(1, k + 1)]
            if j >= n - ell_max:
                rows[j] = row
        top = rows[n][k]
        return [phi**ell * rows[n - ell][k] / top if n - ell in rows else zero
                for ell in range(ell_max + 1)]


def _point_mass_moments(value: float) -> MomentSet:
    return MomentSet(mean=value, variance=0.0, skewness=None, kurtosis=None)


def exact_moments(params: SpillageParams, dps: int = MOMENT_DPS) -> MomentSet:
    """Mean, variance, skewness and kurtosis in closed form from H_1..H_4.

    The cumulant polynomials cancel terms of size ~(n H_1)^4 down to O(1), so
    the H values and the polynomials are evaluated at ``dps`` digits and only
    the final moments are rounded to doubles.
    """
    n, k, phi = params.n, params.k, params.phi
    if phi == 0.0:
        return _point_mass_moments(float(n - k))
    if math.isinf(phi) or k == 0 or k == n:
        return _point_mass_moments(0.0)

    ell_max = min(4, n)
    with mpmath.workprec(int(dps * 3.33) + 8):
        h = precise_h_values(params, ell_max, dps) + [mpmath.mpf(0)] * (4 - ell_max)
        H2, H3, H4 = h[2], h[3], h[4]
        # falling factorials of n; a = n H_1
        n2 = n * (n - 1)
        n3 = n2 * (n - 2)
        n4 = n3 * (n - 3)
        a = n * h[1]

        k1 = (n - k) - a
        k2 = a - a * a + n2 * H2
        k3 = (-a + 3 * a**2 - 3 * n2 * H2 - 2 * a**3
              + 3 * a * n2 * H2 - n3 * H3)
        k4 = (a - 7 * a**2 + 7 * n2 * H2 + 12 * a**3
              - 18 * a * n2 * H2 + 6 * n3 * H3
              - 6 * a**4 + 12 * a**2 * n2 * H2 - 3 * (n2 * H2) ** 2
              - 4 * a * n3 * H3
              + n4 * H4)
        if k2 <= 0:
            return MomentSet(mean=float(k1), variance=0.0, skewness=None, kurtosis=None)
        return MomentSet(
            mean=float(k1),
            variance=float(k2),
            skewness=float(k3 / k2**1.5),
            kurtosis=float(3 + k4 / k2**2),
        )


def asymptotic_psi(k: int, phi: float) -> float:
    if k == 0 and phi == 0.0:
        raise ParameterError("psi = phi/(k+phi) is indeterminate for k = phi = 0")
    if math.isinf(phi):
        return 1.0
    return phi / (k + phi)


def asymptotic_moments(params: SpillageParams) -> AsymptoticMomentSet:
    """Large-n moments, those of Bin(n-k, 1-psi)."""
    n, k = params.n, params.k
    psi = asymptotic_psi(k, params.phi)
    m = n - k
    mean = m * (1.0 - psi)
    pq = psi * (1.0 - psi)
    variance = m * pq
    if variance <= 0.0:
        return AsymptoticMomentSet(psi, mean, 0.0, None, None)
    skew = 2.0 * (psi - 0.5) / math.sqrt(variance)
    kurt = 3.0 + (1.0 - 6.0 * pq) / variance
    return AsymptoticMomentSet(psi, mean, variance, skew, kurt)


def log_asymptotic_variance(n: int, k: int, phi: float) -> float:
    var = asymptotic_moments(SpillageParams(n, k, phi)).variance
    return math.log(var) if var > 0 else float("-inf")


# -- generating functions ---------------------------------------------------


def _log_stirling(n: int, k: int, phi: float) -> float:
    return noncentral_stirling_log_table(n, k, phi)(n, k)


def pgf_eval(params: SpillageParams, z: float) -> float:
    """``G(z) = z^(n-k) S(n, k, phi/z) / S(n, k, phi)``."""
    _require_finite_positive_phi(params)
    if not z > 0:
        raise ParameterError(f"pgf argument must be positive, got {z}")
    n, k, phi = params.n, params.k, params.phi
    return math.exp((n - k) * math.log(z) + _log_stirling(n, k, phi / z) - _log_stirling(n, k, phi))


def cgf_eval(params: SpillageParams, s: float) -> float:
    """``K(s) = s(n-k) + log S(n, k, phi e^-s) - log S(n, k, phi)``."""
    _require_finite_positive_phi(params)
    n, k, phi = params.n, params.k, params.phi
    return s * (n - k) + _log_stirling(n, k, phi * math.exp(-s)) - _log_stirling(n, k, phi)


def mgf_eval(params: SpillageParams, t: float) -> float:
    return math.exp(cgf_eval(params, t))


def q_value(params: SpillageParams, ell: int, s: float) -> float:
    _require_finite_positive_phi(params)
    n, k = params.n, params.k
    if not 0 <= ell <= n:
        raise ParameterError("need 0 <= ell <= n")
    table = noncentral_stirling_log_table(n, k, params.phi * math.exp(-s))
    return math.exp(table(n - ell, k) - table(n, k))


def q_derivative(params: SpillageParams, ell: int, s: float) -> float:
    """Analytic ``dQ_l/ds = phi e^-s [n Q_l Q_1 - (n-l) Q_{l+1}]``."""
    n = params.n
    q1 = q_value(params, 1, s)
    return params.phi * math.exp(-s) * (
        n * q_value(params, ell, s) * q1 - (n - ell) * q_value(params, ell + 1, s)
    )


def q_derivative_check(params: SpillageParams, ell: int, s: float, h: float = FD_STEP) -> float:
    """Absolute gap between a central difference of Q_l and its analytic derivative."""
    if not 0 <= ell <= params.n - params.k - 1:
        raise ParameterError("derivative check needs 0 <= ell <= n-k-1")
    fd = (q_value(params, ell, s + h) - q_value(params, ell, s - h)) / (2 * h)
    return abs(fd - q_derivative(params, ell, s))


def mgf_expansion(params: SpillageParams, t: float) -> float:
    """``e^(t(n-k)) sum_l C(n, l) (e^-t - 1)^l H_l`` over l = 0..n-k."""
    _require_finite_positive_phi(params)
    n, k = params.n, params.k
    h = h_values(params, n - k)
    d = math.expm1(-t)
    total = sum(math.exp(log_binomial(n, ell)) * d**ell * h[ell] for ell in range(n - k + 1))
    return math.exp(t * (n - k)) * total


def mgf_expansion_check(params: SpillageParams, t: float) -> float:
    """Absolute gap between the H-expansion of m(t) and ``sum_r e^(tr) pmf(r)``."""
    pmf = spillage_log_pmf(params).pmf
    direct = float(np.sum(np.exp(t * np.arange(pmf.size)) * pmf))
    return abs(mgf_expansion(params, t) - direct)
