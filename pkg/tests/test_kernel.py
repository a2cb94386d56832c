import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spillage.errors import ParameterError
from spillage.kernel import (
    ExactStirlingOracle,
    exact_spillage_kernel_oracle,
    log1p_exp,
    log_add_exp,
    log_binomial,
    log_falling_factorial,
    log_sum_exp,
    noncentral_stirling_log_table,
)

finite = st.floats(min_value=-700, max_value=700, allow_nan=False)


def test_log_sum_exp_examples():
    assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2), abs=1e-15)
    assert log_sum_exp([-math.inf, 3.25]) == 3.25
    # terms of the (5, 2, 1) kernel: 10 + 30 + 35 + 15 = 90
    terms = [math.log(10), math.log(30), math.log(35), math.log(15)]
    assert log_sum_exp(terms) == pytest.approx(math.log(90), abs=1e-14)
    assert log_sum_exp([-math.inf, -math.inf]) == -math.inf


def test_log_sum_exp_rejects_bad_input():
    with pytest.raises(ParameterError):
        log_sum_exp([])
    with pytest.raises(ParameterError):
        log_sum_exp([0.0, math.nan])


@given(st.lists(finite, min_size=1, max_size=20), st.randoms())
def test_log_sum_exp_permutation_and_zero_terms(xs, rnd):
    base = log_sum_exp(xs)
    shuffled = list(xs)
    rnd.shuffle(shuffled)
    assert log_sum_exp(shuffled) == pytest.approx(base, abs=1e-12)
    assert log_sum_exp(xs + [-math.inf]) == pytest.approx(base, abs=1e-12)
    assert base >= max(xs)


@given(finite, finite)
def test_log_add_exp_matches_numpy(a, b):
    assert log_add_exp(a, b) == pytest.approx(np.logaddexp(a, b), rel=1e-15, abs=1e-15)


def test_log1p_exp_branches():
    assert log1p_exp(0.0) == pytest.approx(math.log(2), abs=1e-16)
    assert log1p_exp(1000.0) == 1000.0
    tiny = log1p_exp(-745.0)
    assert tiny > 0
    assert tiny == pytest.approx(math.exp(-745.0), rel=1e-12)


@given(st.floats(min_value=-1e6, max_value=1e6, allow_nan=False))
def test_log1p_exp_bounds(x):
    gap = log1p_exp(x) - max(x, 0.0)
    assert 0.0 <= gap <= math.log(2) + 1e-15


def test_log_binomial():
    assert log_binomial(5, 2) == pytest.approx(math.log(10), abs=1e-14)
    assert log_binomial(17, 0) == 0.0
    exact = math.comb(100, 30)
    assert abs(log_binomial(100, 30) - math.log(exact)) <= 1e-12
    assert log_binomial(5, 6) == -math.inf
    assert log_binomial(5, -1) == -math.inf


@pytest.mark.parametrize("n", [0, 1, 7, 300, 5000])
def test_log_binomial_against_big_integers(n):
    for j in sorted({0, n // 3, n // 2, n}):
        assert abs(log_binomial(n, j) - math.log(math.comb(n, j))) <= 1e-12 * max(1.0, math.log(math.comb(n, j)))


def test_log_falling_factorial():
    assert log_falling_factorial(6, 3) == pytest.approx(math.log(120))
    assert log_falling_factorial(3, 4) == -math.inf
    assert log_falling_factorial(4, 0) == 0.0


def test_exact_oracle_recursion_and_edges():
    oracle = ExactStirlingOracle()
    for n in range(1, oracle.n_oracle):
        assert oracle(n, n) == 1
        assert oracle(n, 1) == 1
        for k in range(1, n + 2):
            assert oracle(n + 1, k) == k * oracle(n, k) + oracle(n, k - 1)
    assert oracle(5, 2) == 15
    assert oracle(0, 0) == 1


def test_exact_kernel_oracle_examples():
    assert exact_spillage_kernel_oracle(5, 2, 1) == [10, 30, 35, 15]
    assert exact_spillage_kernel_oracle(9, 9, "3/7") == [1]
    assert exact_spillage_kernel_oracle(4, 2, 0) == [0, 0, 7]
    with pytest.raises(ParameterError):
        exact_spillage_kernel_oracle(26, 2, 1)


def _rational_noncentral(n, k, phi):
    return sum(exact_spillage_kernel_oracle(n, k, phi))


def test_noncentral_table_examples():
    t = noncentral_stirling_log_table(5, 2, 1.0)
    assert math.exp(t(5, 2)) == pytest.approx(90, rel=1e-14)
    central = noncentral_stirling_log_table(8, 8, 0.0)
    oracle = ExactStirlingOracle()
    for n in range(9):
        for k in range(n + 1):
            expected = oracle(n, k)
            got = math.exp(central(n, k))
            assert got == pytest.approx(expected, rel=1e-13)
    t = noncentral_stirling_log_table(6, 3, 2.5)
    for n in range(7):
        assert t(n, 0) == pytest.approx(n * math.log(2.5), abs=1e-13)
    assert t(0, 0) == 0.0
    assert t(2, 3) == -math.inf


@pytest.mark.parametrize("phi", [Fraction(1, 10), Fraction(1), Fraction(15, 2)])
def test_noncentral_table_matches_rational_expansion(phi):
    table = noncentral_stirling_log_table(15, 15, float(phi))
    for n in range(16):
        for k in range(n + 1):
            expected = _rational_noncentral(n, k, phi)
            got = math.exp(table(n, k))
            assert abs(got - float(expected)) <= 1e-12 * float(expected)


@pytest.mark.parametrize("phi", [0.0, 0.3, 4.0])
def test_noncentral_recursion_holds_a_posteriori(phi):
    table = noncentral_stirling_log_table(30, 12, phi)
    for n in range(1, 31):
        for k in range(1, min(n, 12) + 1):
            again = log_add_exp(math.log(k + phi) + table(n - 1, k), table(n - 1, k - 1))
            assert abs(again - table(n, k)) <= 1e-13 * max(1.0, abs(again))


def test_noncentral_table_monotone_in_n_when_weights_at_least_one():
    # S(n, k, phi) >= (k + phi) S(n-1, k, phi), so growth needs k + phi >= 1
    table = noncentral_stirling_log_table(40, 10, 0.2)
    for k in range(1, 11):
        col = [table(n, k) for n in range(k, 41)]
        assert all(b >= a for a, b in zip(col, col[1:]))


def test_noncentral_table_rejects_infinite_scale():
    with pytest.raises(ParameterError):
        noncentral_stirling_log_table(5, 2, math.inf)
    with pytest.raises(ParameterError):
        noncentral_stirling_log_table(5, 2, -1.0)
