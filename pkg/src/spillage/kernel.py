"""Log-space primitives and Stirling-number tables.

Probabilities and kernel weights are carried as natural logarithms in IEEE
doubles; an exact zero is ``-inf``.  The rational helpers at the bottom of the
module are slow, exact references meant for tests only.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ParameterError

NEG_INF = float("-inf")
ORACLE_MAX_N = 25


def log_sum_exp(xs: Sequence[float] | np.ndarray) -> float:
    """Return ``log(sum(exp(xs)))`` using a max shift.

    All ``-inf`` inputs give ``-inf``; ``+inf`` and NaN are rejected.
    """
    a = np.asarray(xs, dtype=float)
    if a.size == 0:
        raise ParameterError("log_sum_exp needs at least one term")
    if np.isnan(a).any() or np.isposinf(a).any():
        raise ParameterError("log_sum_exp terms must be finite or -inf")
    m = float(a.max())
    if m == NEG_INF:
        return NEG_INF
    return m + math.log(float(np.sum(np.exp(a - m))))


def log_add_exp(a: float, b: float) -> float:
    """Two-term log_sum_exp for scalars."""
    if a < b:
        a, b = b, a
    if b == NEG_INF:
        return a
    return a + math.log1p(math.exp(b - a))


def log1p_exp(x: float) -> float:
    """``log(1 + e^x)`` without overflow for large x or underflow for small x."""
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


class _LogFactorialTable:
    # Grows by doubling; readers always see a complete array because the
    # attribute is swapped in one assignment.
    def __init__(self, size: int = 256) -> None:
        self._lock = threading.Lock()
        self._table = gammaln(np.arange(size, dtype=float) + 1.0)

    def upto(self, n: int) -> np.ndarray:
        table = self._table
        if n < table.size:
            return table
        with self._lock:
            if n >= self._table.size:
                size = self._table.size
                while size <= n:
                    size *= 2
                self._table = gammaln(np.arange(size, dtype=float) + 1.0)
            return self._table


_LOG_FACTORIAL = _LogFactorialTable()


def log_factorial(n: int) -> float:
    if n < 0:
        raise ParameterError(f"log_factorial of negative integer {n}")
    return float(_LOG_FACTORIAL.upto(n)[n])


def log_factorials(n: int) -> np.ndarray:
    """Array of ``log j!`` for j = 0..n (read-only view)."""
    view = _LOG_FACTORIAL.upto(n)[: n + 1]
    view.flags.writeable = False
    return view


def log_binomial(n: int, j: int) -> float:
    """``log C(n, j)``; out-of-range j is a zero weight (``-inf``)."""
    if j < 0 or j > n:
        return NEG_INF
    lf = _LOG_FACTORIAL.upto(n)
    return float(lf[n] - lf[j] - lf[n - j])


def log_falling_factorial(m: int, k: int) -> float:
    """``log (m)_k`` with ``(m)_k = m (m-1) ... (m-k+1)``; ``-inf`` when k > m."""
    if k < 0:
        raise ParameterError("falling factorial needs k >= 0")
    if k > m:
        return NEG_INF
    lf = _LOG_FACTORIAL.upto(m)
    return float(lf[m] - lf[m - k])


@dataclass(frozen=True)
class StirlingLogTable:
    """Triangular table of ``log S(j, kk, phi)`` for j <= n_max, kk <= k_max.

    ``entries[j, kk]`` is ``-inf`` wherever the number is zero (kk > j, or
    kk = 0 < j with phi = 0).
    """

    n_max: int
    k_max: int
    phi: float
    entries: np.ndarray

    def __call__(self, n: int, k: int) -> float:
        if k < 0 or k > n:
            return NEG_INF
        if n > self.n_max or k > self.k_max:
            raise IndexError(f"({n}, {k}) outside table of size ({self.n_max}, {self.k_max})")
        return float(self.entries[n, k])


def noncentral_stirling_log_table(n: int, k: int, phi: float) -> StirlingLogTable:
    """Fill ``log S(j, kk, phi)`` by the row recursion
    ``S(j, kk, phi) = (kk + phi) S(j-1, kk, phi) + S(j-1, kk-1, phi)``.

    Base cases: ``S(0, 0, phi) = 1`` and ``S(j, 0, phi) = phi^j``.
    ``phi = 0`` gives the central numbers.
    """
    if n < 0 or k < 0:
        raise ParameterError("table sizes must be non-negative")
    if not (phi >= 0.0) or math.isinf(phi):
        raise ParameterError(f"noncentral Stirling table needs 0 <= phi < inf, got {phi}")
    k = min(k, n)
    entries = np.full((n + 1, k + 1), NEG_INF)
    entries[0, 0] = 0.0
    with np.errstate(divide="ignore"):
        log_weights = np.log(np.arange(k + 1, dtype=float) + phi)
    for j in range(1, n + 1):
        prev = entries[j - 1]
        row = entries[j]
        row[:] = log_weights + prev
        row[1:] = np.logaddexp(row[1:], prev[:-1])
    entries.flags.writeable = False
    return StirlingLogTable(n_max=n, k_max=k, phi=float(phi), entries=entries)


# -- exact references -------------------------------------------------------


class ExactStirlingOracle:
    """Exact central Stirling numbers of the second kind as Python integers."""

    def __init__(self, n_oracle: int = ORACLE_MAX_N) -> None:
        self.n_oracle = n_oracle
        rows = [[1]]
        for j in range(1, n_oracle + 1):
            prev = rows[-1] + [0]
            rows.append([0] + [kk * prev[kk] + prev[kk - 1] for kk in range(1, j + 1)])
        self._rows = rows

    def __call__(self, n: int, k: int) -> int:
        if n > self.n_oracle:
            raise ParameterError(f"oracle limited to n <= {self.n_oracle}")
        if k < 0 or k > n:
            return 0
        return self._rows[n][k]


@lru_cache(maxsize=None)
def _oracle(n_oracle: int) -> ExactStirlingOracle:
    return ExactStirlingOracle(n_oracle)


def exact_spillage_kernel_oracle(n: int, k: int, phi, n_oracle: int = ORACLE_MAX_N) -> list[Fraction]:
    """Exact terms ``C(n, k+r) phi^(n-k-r) S(k+r, k)`` for r = 0..n-k.

    ``phi`` is converted with ``Fraction`` (pass a Fraction or a string such as
    ``"15/2"`` to avoid binary rounding).  Test-only; refuses n > n_oracle.
    """
    if n > n_oracle:
        raise ParameterError(f"exact oracle refuses n = {n} > {n_oracle}")
    if not 0 <= k <= n:
        raise ParameterError("need 0 <= k <= n")
    phi = Fraction(phi)
    if phi < 0:
        raise ParameterError("phi must be non-negative")
    stirling = _oracle(n_oracle)
    return [
        math.comb(n, k + r) * phi ** (n - k - r) * stirling(k + r, k)
        for r in range(n - k + 1)
    ]
