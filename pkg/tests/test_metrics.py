import numpy as np
import pytest

from oracles import oracle_dominated_area, oracle_log_normalize
from swarmfront.metrics import (
    CampaignResult,
    FrontSnapshot,
    NormalizationBounds,
    averaged_cs,
    averaged_hv,
    campaign_bounds,
    convergence_score,
    hypervolume_2d,
    normalize_point,
)

UNIT_BOUNDS = NormalizationBounds(
    minimum=np.array([1.0, 1.0]), maximum=np.array([100.0, 100.0])
)


def snapshot(points, iteration=1):
    return FrontSnapshot.from_points(points, iteration)


def raw_for_normalized(values):
    """Invert the log map under UNIT_BOUNDS: normalized 1 -> 1, 0 -> 100."""
    return tuple(100.0 ** (1.0 - v) for v in values)


class TestFrontSnapshot:
    def test_points_sorted_and_deduplicated(self):
        snap = snapshot([(2, 1), (1, 2), (2, 1)])
        assert snap.points == ((1.0, 2.0), (2.0, 1.0))
        assert len(snap) == 2

    def test_mutual_non_dominance_check(self):
        assert snapshot([(1, 2), (2, 1)]).is_mutually_non_dominated()
        assert not snapshot([(1, 1), (2, 2)]).is_mutually_non_dominated()


class TestNormalizationBounds:
    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            NormalizationBounds(
                minimum=np.array([0.0, 1.0]), maximum=np.array([10.0, 10.0])
            )

    def test_min_not_below_max_rejected(self):
        with pytest.raises(ValueError):
            NormalizationBounds(
                minimum=np.array([5.0, 1.0]), maximum=np.array([5.0, 10.0])
            )

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            NormalizationBounds(
                minimum=np.array([1.0]), maximum=np.array([5.0, 10.0])
            )


class TestNormalizePoint:
    def test_extremes(self):
        assert normalize_point((1.0, 100.0), UNIT_BOUNDS) == pytest.approx([1.0, 0.0])

    def test_hand_value(self):
        result = normalize_point((10.0, 10.0), UNIT_BOUNDS)
        assert result == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_above_maximum_rejected(self):
        with pytest.raises(ValueError):
            normalize_point((101.0, 1.0), UNIT_BOUNDS)

    def test_below_minimum_clamps_to_one(self):
        assert normalize_point((0.5, 1.0), UNIT_BOUNDS)[0] == 1.0
        assert normalize_point((0.0, 1.0), UNIT_BOUNDS)[0] == 1.0

    def test_strictly_decreasing(self):
        grid = np.linspace(1.0, 100.0, 50)
        values = [normalize_point((z, 1.0), UNIT_BOUNDS)[0] for z in grid]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_matches_hand_formula(self):
        for z in (1.0, 2.5, 33.0, 99.0):
            assert normalize_point((z, 1.0), UNIT_BOUNDS)[0] == pytest.approx(
                oracle_log_normalize(z, 1.0, 100.0), abs=1e-12
            )


class TestHypervolume2d:
    def test_best_corner_fills_square(self):
        assert hypervolume_2d(snapshot([(1.0, 1.0)]), UNIT_BOUNDS) == pytest.approx(1.0)

    def test_worst_corner_empty(self):
        assert hypervolume_2d(snapshot([(100.0, 100.0)]), UNIT_BOUNDS) == 0.0

    def test_two_point_staircase(self):
        front = snapshot([raw_for_normalized((1.0, 0.5)), raw_for_normalized((0.5, 1.0))])
        assert hypervolume_2d(front, UNIT_BOUNDS) == pytest.approx(0.75, abs=1e-12)

    def test_dominated_point_contributes_nothing(self):
        lean = snapshot([raw_for_normalized((0.8, 0.8))])
        padded = snapshot(
            [raw_for_normalized((0.8, 0.8)), raw_for_normalized((0.5, 0.5))]
        )
        assert hypervolume_2d(padded, UNIT_BOUNDS) == pytest.approx(
            hypervolume_2d(lean, UNIT_BOUNDS)
        )

    def test_empty_front_rejected(self):
        with pytest.raises(ValueError):
            hypervolume_2d(snapshot([]), UNIT_BOUNDS)

    def test_wrong_objective_count_rejected(self):
        bounds = NormalizationBounds(
            minimum=np.array([1.0]), maximum=np.array([10.0])
        )
        with pytest.raises(ValueError):
            hypervolume_2d(snapshot([(5.0,)]), bounds)

    def test_monotone_under_insertion(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            points = [
                tuple(np.exp(rng.uniform(0.0, np.log(100.0), size=2)))
                for _ in range(rng.integers(1, 8))
            ]
            extra = tuple(np.exp(rng.uniform(0.0, np.log(100.0), size=2)))
            base = hypervolume_2d(snapshot(points), UNIT_BOUNDS)
            grown = hypervolume_2d(snapshot(points + [extra]), UNIT_BOUNDS)
            assert 0.0 <= base <= 1.0
            assert grown >= base - 1e-12

    def test_agrees_with_monte_carlo_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            points = [
                tuple(np.exp(rng.uniform(0.0, np.log(100.0), size=2)))
                for _ in range(rng.integers(1, 11))
            ]
            exact = hypervolume_2d(snapshot(points), UNIT_BOUNDS)
            estimate = oracle_dominated_area(
                points, (1.0, 1.0), (100.0, 100.0), 100_000, rng
            )
            assert exact == pytest.approx(estimate, abs=0.02)


def campaign_from(front_lists, changed_lists, seeds=None):
    if seeds is None:
        seeds = list(range(len(front_lists)))
    return CampaignResult(
        fronts=tuple(
            tuple(snapshot(points, t + 1) for t, points in enumerate(run))
            for run in front_lists
        ),
        front_changed=tuple(tuple(run) for run in changed_lists),
        seeds=tuple(seeds),
    )


class TestAveragedHv:
    def test_single_run_equals_series(self):
        runs = [[[(1.0, 10.0)], [(1.0, 1.0)]]]
        campaign = campaign_from(runs, [[True, True]])
        expected = [
            hypervolume_2d(snapshot([(1.0, 10.0)]), UNIT_BOUNDS),
            hypervolume_2d(snapshot([(1.0, 1.0)]), UNIT_BOUNDS),
        ]
        assert list(averaged_hv(campaign, UNIT_BOUNDS)) == expected

    def test_mean_of_two_runs(self):
        run_a = [[(10.0, 10.0)]]
        run_b = [[(1.0, 10.0)]]
        campaign = campaign_from([run_a, run_b], [[True], [True]])
        hv_a = hypervolume_2d(snapshot(run_a[0]), UNIT_BOUNDS)
        hv_b = hypervolume_2d(snapshot(run_b[0]), UNIT_BOUNDS)
        assert averaged_hv(campaign, UNIT_BOUNDS)[0] == (hv_a + hv_b) / 2.0

    def test_identical_runs_mean_is_any_run(self):
        run = [[(5.0, 5.0)], [(2.0, 2.0)]]
        campaign = campaign_from([run, run], [[True, True], [True, True]])
        single = campaign_from([run], [[True, True]])
        assert list(averaged_hv(campaign, UNIT_BOUNDS)) == list(
            averaged_hv(single, UNIT_BOUNDS)
        )

    def test_empty_front_counts_zero(self):
        campaign = campaign_from([[[], [(1.0, 1.0)]]], [[False, True]])
        series = averaged_hv(campaign, UNIT_BOUNDS)
        assert series[0] == 0.0
        assert series[1] == pytest.approx(1.0)

    def test_no_runs_rejected(self):
        empty = CampaignResult(fronts=(), front_changed=(), seeds=())
        with pytest.raises(ValueError):
            averaged_hv(empty, UNIT_BOUNDS)


class TestConvergenceScore:
    def test_constant_improvement(self):
        assert list(convergence_score([True] * 7)) == [1.0] * 7

    def test_ten_decrements(self):
        flags = [True] + [False] * 10
        series = convergence_score(flags)
        assert series[-1] == 0.90
        assert list(series[:2]) == [1.0, 0.99]

    def test_floor_at_zero(self):
        flags = [True] + [False] * 101
        series = convergence_score(flags)
        assert series[-1] == 0.0
        assert series[-2] == 0.0

    def test_reset_to_one_on_improvement(self):
        flags = [True, False, False, True, False]
        assert list(convergence_score(flags)) == [1.0, 0.99, 0.98, 1.0, 0.99]

    def test_first_flag_value_irrelevant_at_start(self):
        assert convergence_score([False])[0] == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            convergence_score([])

    def test_non_increasing_between_improvements(self):
        rng = np.random.default_rng(2)
        flags = list(rng.random(200) < 0.1)
        series = convergence_score(flags)
        for t in range(1, len(flags)):
            if flags[t]:
                assert series[t] == 1.0
            else:
                assert series[t] <= series[t - 1]
            assert 0.0 <= series[t] <= 1.0


class TestAveragedCs:
    def test_single_run(self):
        campaign = campaign_from(
            [[[(1.0, 1.0)]] * 3], [[True, False, False]]
        )
        assert list(averaged_cs(campaign)) == [1.0, 0.99, 0.98]

    def test_mean_of_two_runs(self):
        length = 21
        run = [[(1.0, 1.0)]] * length
        changed_a = [True] * length
        changed_b = [True] + [False] * (length - 1)
        campaign = campaign_from([run, run], [changed_a, changed_b])
        assert averaged_cs(campaign)[-1] == (1.0 + 0.8) / 2.0

    def test_values_within_unit_interval(self):
        rng = np.random.default_rng(4)
        runs = [list(rng.random(50) < 0.2) for _ in range(5)]
        campaign = campaign_from(
            [[[(1.0, 1.0)]] * 50 for _ in runs], runs
        )
        series = averaged_cs(campaign)
        assert np.all(series >= 0.0)
        assert np.all(series <= 1.0)

    def test_no_runs_rejected(self):
        empty = CampaignResult(fronts=(), front_changed=(), seeds=())
        with pytest.raises(ValueError):
            averaged_cs(empty)


class TestCampaignBounds:
    def test_extremes_across_fronts(self):
        fronts = [
            snapshot([(1.0, 50.0)]),
            snapshot([(10.0, 2.0)]),
            snapshot([(100.0, 7.0)]),
        ]
        bounds = campaign_bounds(fronts)
        assert list(bounds.minimum) == [1.0, 2.0]
        assert list(bounds.maximum) == [100.0, 50.0]

    def test_order_insensitive(self):
        fronts = [snapshot([(1.0, 50.0)]), snapshot([(100.0, 2.0)])]
        forward = campaign_bounds(fronts)
        backward = campaign_bounds(list(reversed(fronts)))
        assert np.array_equal(forward.minimum, backward.minimum)
        assert np.array_equal(forward.maximum, backward.maximum)

    def test_single_point_degenerate(self):
        with pytest.raises(ValueError):
            campaign_bounds([snapshot([(5.0, 5.0)])])

    def test_negative_value_rejected(self):
        with pytest.raises(ValueError):
            campaign_bounds([snapshot([(-1.0, 5.0)]), snapshot([(2.0, 6.0)])])

    def test_zero_values_excluded_from_minimum(self):
        fronts = [snapshot([(0.0, 3.0)]), snapshot([(2.0, 30.0)]), snapshot([(4.0, 9.0)])]
        bounds = campaign_bounds(fronts)
        assert list(bounds.minimum) == [2.0, 3.0]

    def test_all_zero_objective_rejected(self):
        with pytest.raises(ValueError):
            campaign_bounds([snapshot([(0.0, 3.0)]), snapshot([(0.0, 9.0)])])
