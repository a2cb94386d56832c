import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spillage.approx import (
    KERNELS,
    alpha_equation,
    approx_log_kernel,
    approx_log_pmf,
    solve_alpha,
)
from spillage.bench import lrmse, max_abs_diff
from spillage.core import Method, SpillageParams, spillage_log_pmf
from spillage.errors import ParameterError
from spillage.kernel import log1p_exp


def g_reference(a):
    return (1.0 + math.exp(a)) * math.log1p(math.exp(-a))


def bisect_alpha(target, lo=-40.0, hi=40.0, tol=1e-13):
    # g is decreasing, so g(lo) > target > g(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g_reference(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_alpha_equation_matches_naive_form():
    for a in np.linspace(-30, 30, 121):
        assert alpha_equation(a) == pytest.approx(g_reference(a), rel=1e-13)
    assert alpha_equation(800.0) == 1.0


def test_g_decreasing_on_bracket():
    grid = np.arange(-40.0, 40.0 + 0.25, 0.5)
    vals = [alpha_equation(a) for a in grid]
    # near alpha ~ 35, g - 1 is a few ulps, so neighbours may round to the same double
    eps = np.finfo(float).eps
    for a, b in zip(vals, vals[1:]):
        assert a > b if b - 1.0 > 4 * eps else a >= b
    assert vals[-1] == 1.0


def test_alpha_zero_at_two_log_two():
    target = 2 * math.log(2) - 1
    # choose r, k with r/k close to the target, then check the solved root
    sol = solve_alpha(386294361, 1000000000)
    assert abs(sol.alpha) < 1e-8
    assert alpha_equation(0.0) == pytest.approx(1 + target, rel=1e-15)


def test_r_zero_sentinel():
    sol = solve_alpha(0, 7)
    assert sol.is_sentinel and sol.alpha == math.inf
    assert not solve_alpha(1, 7).is_sentinel


def test_r_equals_k_against_bisection():
    sol = solve_alpha(9, 9)
    assert abs(sol.alpha - bisect_alpha(2.0)) <= 1e-12
    assert abs(alpha_equation(sol.alpha) - 2.0) <= 1e-12


@given(st.integers(1, 2000), st.integers(1, 500))
def test_back_substitution(r, k):
    sol = solve_alpha(r, k)
    assert math.isfinite(sol.alpha)
    assert abs(alpha_equation(sol.alpha) - (1 + r / k)) <= 1e-12
    # log1pexp(-alpha) > r/k is what keeps the kernel's log argument positive
    assert log1p_exp(-sol.alpha) - r / k > 0


def test_large_ratio_extends_bracket():
    sol = solve_alpha(5000, 1)
    assert sol.alpha < -40
    assert abs(alpha_equation(sol.alpha) - 5001) <= 1e-12 * 5001


def test_alpha_rejects_k_zero():
    with pytest.raises(ParameterError):
        solve_alpha(3, 0)


@pytest.mark.parametrize("kernel", KERNELS)
def test_normalised(kernel):
    for n, k, phi in [(5, 2, 1.0), (40, 13, 0.3), (100, 30, 40.0), (300, 250, 1000.0)]:
        lm = approx_log_pmf(SpillageParams(n, k, phi), kernel)
        assert lm.method is Method.APPROX
        assert abs(lm.pmf.sum() - 1.0) <= 1e-12


def test_degenerate_cases_use_exact_path():
    for p in [SpillageParams(8, 8, 3.0), SpillageParams(8, 0, 3.0),
              SpillageParams(8, 3, 0.0), SpillageParams(8, 3, math.inf)]:
        lm = approx_log_pmf(p)
        assert lm.method is Method.EXACT
        assert np.array_equal(lm.logmass, spillage_log_pmf(p).logmass)
    np.testing.assert_array_equal(approx_log_pmf(SpillageParams(6, 6, 1.0)).pmf, [1.0])


def test_kernel_validation():
    with pytest.raises(ParameterError):
        approx_log_kernel(SpillageParams(10, 3, 1.0), kernel="nope")
    with pytest.raises(ParameterError):
        approx_log_kernel(SpillageParams(10, 10, 1.0))


@pytest.mark.parametrize("kernel", KERNELS)
def test_accuracy_improves_with_scale(kernel):
    small = SpillageParams(100, 30, 40.0)
    big = SpillageParams(200, 60, 80.0)
    a = lrmse(spillage_log_pmf(small), approx_log_pmf(small, kernel))
    b = lrmse(spillage_log_pmf(big), approx_log_pmf(big, kernel))
    assert math.isfinite(b) and b <= a


@pytest.mark.parametrize("kernel", KERNELS)
def test_max_abs_diff_decreases_as_n_doubles(kernel):
    diffs = []
    for n in (100, 200, 400, 800, 1600):
        p = SpillageParams(n, round(0.3 * n), round(0.4 * n))
        diffs.append(max_abs_diff(spillage_log_pmf(p), approx_log_pmf(p, kernel)))
    assert all(b < a for a, b in zip(diffs, diffs[1:]))


def test_saddlepoint_kernel_is_closer_at_reference_point():
    p = SpillageParams(100, 30, 40.0)
    exact = spillage_log_pmf(p)
    assert max_abs_diff(exact, approx_log_pmf(p, "saddlepoint")) < max_abs_diff(exact, approx_log_pmf(p))
