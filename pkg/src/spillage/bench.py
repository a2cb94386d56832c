"""Accuracy of the approximate pmf against the exact recursion, over parameter grids."""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

import numpy as np

from .analysis import asymptotic_psi, log_asymptotic_variance
from .approx import DEFAULT_KERNEL, approx_log_pmf
from .core import LogMassVector, SpillageParams, spillage_log_pmf
from .errors import ParameterError

DEFAULT_MAX_N = 2000
MAX_N_ENV = "SPILLAGE_MAX_N"
CSV_FIELDS = (
    "n", "k", "phi", "psi", "log_asym_variance", "lrmse", "max_abs_diff",
    "runtime_exact_ms", "runtime_approx_ms",
)
MIN_CORRELATION_RECORDS = 10


def max_n_cap() -> int:
    raw = os.environ.get(MAX_N_ENV)
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"{MAX_N_ENV} must be an integer, got {raw!r}") from None


def _check_pair(exact: LogMassVector, approx: LogMassVector) -> None:
    if exact.params != approx.params or len(exact) != len(approx):
        raise ParameterError("mass vectors must share parameters and support")


def lrmse(exact: LogMassVector, approx: LogMassVector) -> float:
    """Half the log of the mean squared pmf difference; ``-inf`` when identical."""
    _check_pair(exact, approx)
    d = exact.pmf - approx.pmf
    mse = float(np.mean(d * d))
    return 0.5 * math.log(mse) if mse > 0 else -math.inf


def max_abs_diff(exact: LogMassVector, approx: LogMassVector) -> float:
    _check_pair(exact, approx)
    return float(np.max(np.abs(exact.pmf - approx.pmf)))


@dataclass(frozen=True)
class AccuracyRecord:
    n: int
    k: int
    phi: float
    psi: float
    log_asym_variance: float
    lrmse: float
    max_abs_diff: float
    runtime_exact_ms: Optional[float] = None
    runtime_approx_ms: Optional[float] = None


def compare(n: int, k: int, phi: float, kernel: str = DEFAULT_KERNEL) -> AccuracyRecord:
    params = SpillageParams(n, k, phi)
    t0 = time.perf_counter()
    exact = spillage_log_pmf(params)
    t1 = time.perf_counter()
    approx = approx_log_pmf(params, kernel)
    t2 = time.perf_counter()
    if k == 0 and phi == 0:
        # psi is indeterminate; follow the phi = 0 point-mass convention
        psi, log_var = 0.0, -math.inf
    else:
        psi, log_var = asymptotic_psi(k, phi), log_asymptotic_variance(n, k, phi)
    return AccuracyRecord(
        n=n, k=k, phi=float(phi),
        psi=psi,
        log_asym_variance=log_var,
        lrmse=lrmse(exact, approx),
        max_abs_diff=max_abs_diff(exact, approx),
        runtime_exact_ms=1e3 * (t1 - t0),
        runtime_approx_ms=1e3 * (t2 - t1),
    )


@dataclass(frozen=True)
class GridSpec:
    """Grid points ``(n, round(f n), c round(f n))`` for every n, k-fraction f and phi multiplier c."""

    n_values: tuple[int, ...] = (10, 20, 50, 100, 200, 500, 1000, 2000)
    k_fractions: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    phi_multipliers: tuple[float, ...] = (0.25, 1.0, 4.0)

    def points(self) -> list[tuple[int, int, float]]:
        out = []
        for n in self.n_values:
            for f in self.k_fractions:
                k = int(round(f * n))
                for c in self.phi_multipliers:
                    out.append((n, k, c * k))
        return out

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``n=10,20;k=0.1,0.5;phi=1,4`` (any field may be omitted)."""
        fields = {}
        for part in filter(None, (p.strip() for p in text.split(";"))):
            key, _, values = part.partition("=")
            key = key.strip()
            try:
                nums = [float(v) for v in values.split(",") if v.strip()]
            except ValueError:
                raise ParameterError(f"bad grid values in {part!r}") from None
            if key == "n":
                fields["n_values"] = tuple(int(v) for v in nums)
            elif key == "k":
                fields["k_fractions"] = tuple(nums)
            elif key == "phi":
                fields["phi_multipliers"] = tuple(nums)
            else:
                raise ParameterError(f"unknown grid field {key!r} (expected n, k or phi)")
        return cls(**fields)


def sweep(
    grid: GridSpec | Iterable[tuple[int, int, float]] = GridSpec(),
    kernel: str = DEFAULT_KERNEL,
    max_n: Optional[int] = None,
    workers: int = 1,
) -> list[AccuracyRecord]:
    """One record per grid point, in grid order."""
    points = grid.points() if isinstance(grid, GridSpec) else list(grid)
    cap = max_n_cap() if max_n is None else max_n
    too_big = [p for p in points if p[0] > cap]
    if too_big:
        raise ParameterError(
            f"{len(too_big)} grid point(s) exceed the size cap n <= {cap} "
            f"(largest n = {max(p[0] for p in too_big)}); raise it with {MAX_N_ENV}"
        )
    for n, k, phi in points:
        SpillageParams(n, k, phi)

    def run(point: tuple[int, int, float]) -> AccuracyRecord:
        return compare(*point, kernel=kernel)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, points))
    return [run(p) for p in points]


def variance_accuracy_correlation(records: Sequence[AccuracyRecord]) -> float:
    """Pearson correlation between lrmse and log asymptotic variance over finite records."""
    pairs = [
        (r.lrmse, r.log_asym_variance)
        for r in records
        if math.isfinite(r.lrmse) and math.isfinite(r.log_asym_variance)
    ]
    if len(pairs) < MIN_CORRELATION_RECORDS:
        raise ParameterError(
            f"need at least {MIN_CORRELATION_RECORDS} finite records, got {len(pairs)}"
        )
    x, y = np.array(pairs).T
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ParameterError("correlation undefined: a variable is constant over the records")
    return float(np.corrcoef(x, y)[0, 1])


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(records: Iterable[AccuracyRecord], stream: TextIO, timing: bool = True) -> None:
    """Write records with a header row; runtime columns stay empty when ``timing`` is off."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in records:
        row = [getattr(r, f) for f in CSV_FIELDS]
        if not timing:
            row[-2:] = [None, None]
        writer.writerow([_fmt(v) for v in row])


def records_to_csv(records: Iterable[AccuracyRecord], timing: bool = True) -> str:
    buf = io.StringIO()
    write_csv(records, buf, timing=timing)
    return buf.getvalue()
