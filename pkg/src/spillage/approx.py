"""Non-recursive approximation of the spillage pmf (Bender's saddle point).

For each r >= 1 the saddle parameter alpha solves

    g(alpha) = (1 + e^alpha) * log1pexp(-alpha) = 1 + r/k,

where g decreases strictly from +inf to 1.  With ``L = log1pexp(-alpha)`` the
default ``kernel="bender"`` log-kernel is

    -log(k+r)/2 - log (n-k-r)! - alpha k + (n-k-r) log phi
        - (k+r-2) log L - log(L - r/k)

up to an additive constant ``log n! - log k! - log(2 pi)/2``.  ``kernel="saddlepoint"``
instead uses the textbook saddle-point form of the same Stirling
approximation, ``-(k+r) log L - log(L - r/k)/2`` in place of the last two terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .core import LogMassVector, Method, SpillageParams, spillage_log_pmf
from .errors import NumericalDomainError, ParameterError
from .kernel import NEG_INF, log1p_exp, log_factorials, log_sum_exp

ALPHA_BRACKET = 40.0
ALPHA_TOL = 1e-12
KERNELS = ("bender", "saddlepoint")
DEFAULT_KERNEL = "bender"
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def alpha_equation(alpha: float) -> float:
    """``(1 + e^alpha) * log1pexp(-alpha)``."""
    if alpha > 0:
        # (1 + e^a) log1p(e^-a) = (1 + e^-a) e^a log1p(e^-a); stays finite for large a
        t = math.exp(-alpha)
        if t < 1e-4:
            # 1 + t/2 - t^2/6 + t^3/12 - ...; keeps g monotone down to its limit
            return 1.0 + t * (0.5 - t * (1.0 / 6.0 - t / 12.0))
        return (1.0 + t) * math.log1p(t) / t
    return (1.0 + math.exp(alpha)) * log1p_exp(-alpha)


@dataclass(frozen=True)
class AlphaSolve:
    r: int
    k: int
    alpha: float
    residual: float

    @property
    def is_sentinel(self) -> bool:
        return math.isinf(self.alpha)


@lru_cache(maxsize=65536)
def solve_alpha(r: int, k: int) -> AlphaSolve:
    """Root of ``g(alpha) = 1 + r/k``; ``alpha = +inf`` for r = 0."""
    if k < 1:
        raise ParameterError("alpha is only defined for k >= 1")
    if r < 0:
        raise ParameterError("r must be non-negative")
    target = 1.0 + r / k
    hi = ALPHA_BRACKET
    if target <= alpha_equation(hi):
        return AlphaSolve(r, k, math.inf, 0.0)
    lo = -ALPHA_BRACKET
    while alpha_equation(lo) < target:
        lo *= 2.0

    def f(a: float) -> float:
        return alpha_equation(a) - target

    alpha = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    residual = f(alpha)
    if abs(residual) > ALPHA_TOL:
        raise NumericalDomainError(f"alpha solve for r={r}, k={k} left residual {residual:.3g}")
    return AlphaSolve(r, k, alpha, residual)


def approx_log_kernel(params: SpillageParams, kernel: str = DEFAULT_KERNEL) -> np.ndarray:
    """Unnormalised log-kernel over r = 0..n-k (needs k >= 1, n > k, 0 < phi < inf)."""
    if kernel not in KERNELS:
        raise ParameterError(f"unknown kernel {kernel!r}; choose from {KERNELS}")
    n, k, phi = params.n, params.k, params.phi
    if k < 1 or k >= n or not 0.0 < phi < math.inf:
        raise ParameterError("approximate kernel needs 1 <= k < n and 0 < phi < inf")
    lf = log_factorials(n)
    log_phi = math.log(phi)
    out = np.full(n - k + 1, NEG_INF)
    # r = 0: exact term S(k, k) = 1, shifted onto the kernel's scale
    out[0] = -lf[n - k] + (n - k) * log_phi + _HALF_LOG_2PI
    for r in range(1, n - k + 1):
        alpha = solve_alpha(r, k).alpha
        L = log1p_exp(-alpha)
        gap = L - r / k
        if not gap > 0.0:
            raise NumericalDomainError(f"log1pexp(-alpha) - r/k = {gap} is not positive at r={r}")
        common = -0.5 * math.log(k + r) - lf[n - k - r] - alpha * k + (n - k - r) * log_phi
        if kernel == "bender":
            out[r] = common - (k + r - 2) * math.log(L) - math.log(gap)
        else:
            out[r] = common - (k + r) * math.log(L) - 0.5 * math.log(gap)
    return out


def approx_log_pmf(params: SpillageParams, kernel: str = DEFAULT_KERNEL) -> LogMassVector:
    """Approximate log-pmf; degenerate parameters fall back to the exact path."""
    if params.k < 1 or params.k == params.n or not 0.0 < params.phi < math.inf:
        return spillage_log_pmf(params)
    lk = approx_log_kernel(params, kernel)
    return LogMassVector(params, lk - log_sum_exp(lk), Method.APPROX)
