import numpy as np
import pytest

from spillage.errors import ParameterError
from spillage.occupancy import OccupancyParams
from spillage.simulation import (
    CHUNK_TRIALS,
    conditional_spillage_empirical,
    effective_balls_tv,
    occupancy_tv,
    simulate,
)


def test_single_ball_single_bin():
    run = simulate(OccupancyParams(1, 1, 1.0), 1000, seed=5)
    assert run.tallies[1, 0] == 1000
    assert run.tallies.sum() == 1000


def test_two_balls_one_bin():
    run = simulate(OccupancyParams(2, 1, 1.0), 500, seed=9)
    assert run.tallies[1, 1] == 500


def test_two_balls_two_bins_half_collide():
    run = simulate(OccupancyParams(2, 2, 1.0), 1_000_000, seed=11)
    p1 = run.occupancy_counts()[1] / run.trials
    assert abs(p1 - 0.5) <= 0.002


def test_accounting_invariants():
    p = OccupancyParams(7, 4, 0.6)
    run = simulate(p, 20_000, seed=3)
    assert run.tallies.shape == (5, 8)
    assert run.tallies.sum() == 20_000
    # n_eff = K + R <= n, so cells with k + r > n stay empty
    for k in range(5):
        assert run.tallies[k, 8 - k:].sum() == 0
    assert run.effective_ball_counts().sum() == 20_000


def test_reproducible_and_partition_independent():
    p = OccupancyParams(9, 5, 0.55)
    trials = 3 * CHUNK_TRIALS + 123
    a = simulate(p, trials, seed=42)
    b = simulate(p, trials, seed=42)
    c = simulate(p, trials, seed=42, workers=4)
    assert np.array_equal(a.tallies, b.tallies)
    assert np.array_equal(a.tallies, c.tallies)
    assert not np.array_equal(a.tallies, simulate(p, trials, seed=43).tallies)


def test_theta_one_concentrates_on_full_spillage():
    run = simulate(OccupancyParams(6, 3, 1.0), 50_000, seed=1)
    cond = conditional_spillage_empirical(run, 2)
    assert cond.empirical[-1] == 1.0
    assert cond.tv_distance == 0.0


def test_conditional_law_matches_small_example():
    run = simulate(OccupancyParams(5, 2, 2 / 3), 400_000, seed=8)
    cond = conditional_spillage_empirical(run, 2)
    np.testing.assert_allclose(cond.exact, [1 / 9, 1 / 3, 7 / 18, 1 / 6], atol=1e-14)
    np.testing.assert_allclose(cond.empirical, cond.exact, atol=0.01)


def test_insufficient_data():
    run = simulate(OccupancyParams(4, 4, 1.0), 10, seed=0)
    # zero balls occupying is impossible when theta = 1
    cond = conditional_spillage_empirical(run, 0)
    assert cond.insufficient_data
    assert cond.empirical is None and cond.tv_distance is None
    with pytest.raises(ParameterError):
        conditional_spillage_empirical(run, 5)


def test_marginals():
    for n, m, theta in [(10, 6, 0.7), (8, 10, 0.3)]:
        run = simulate(OccupancyParams(n, m, theta), 1_000_000, seed=2)
        assert effective_balls_tv(run) <= 0.01
        assert occupancy_tv(run) <= 0.01


def test_rejects_zero_trials():
    with pytest.raises(ParameterError):
        simulate(OccupancyParams(3, 2, 0.5), 0, seed=1)
