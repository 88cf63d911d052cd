import numpy as np
import pytest

from paris.core import LevelSummary, SleepQuality, SleepRecord
from paris.errors import TooFewDays
from paris.recipes import RecipeConfig, extract_recipes, good_cluster_test, tag_sleep_quality

GOOD = SleepQuality.GOOD
POOR = SleepQuality.POOR


def summary(day, minutes):
    return LevelSummary("s", day, 0, 1440, tuple(float(v) for v in minutes))


def record(eff):
    return SleepRecord.from_bed_minutes("s", 0, 480.0, 480.0 * (1 - eff))


def test_tag_sleep_quality_thresholds():
    cfg = RecipeConfig()
    assert tag_sleep_quality(record(0.95), cfg) is GOOD
    assert tag_sleep_quality(record(0.90), cfg) is POOR
    assert tag_sleep_quality(record(0.0), cfg) is POOR


def test_good_cluster_ratio_boundaries():
    cfg = RecipeConfig(min_cluster_days=1)
    assert good_cluster_test(8, 4, cfg) is True  # ratio exactly 2 is inclusive
    assert good_cluster_test(7, 4, cfg) is False
    assert good_cluster_test(3, 0, RecipeConfig(min_cluster_days=3)) is True
    assert good_cluster_test(0, 0, RecipeConfig(min_cluster_days=1)) is False


def test_good_cluster_min_days_guard():
    cfg = RecipeConfig(min_cluster_days=3)
    assert good_cluster_test(2, 0, cfg) is False
    assert good_cluster_test(2, 1, cfg) is True


def test_extract_recipes_planted_groups():
    rng = np.random.default_rng(0)
    summaries = []
    tags = []
    for i in range(10):
        jitter = rng.uniform(-2, 2, 3)
        summaries.append(summary(i, np.array([300.0, 30.0, 10.0]) + jitter))
        tags.append(GOOD if i != 0 else POOR)  # 9 good, 1 poor
    for i in range(10, 12):
        summaries.append(summary(i, [100.0, 5.0, 0.0]))
        tags.append(POOR)
    cfg = RecipeConfig(min_cluster_days=2)
    recipes = extract_recipes(summaries, tags, cfg)
    assert len(recipes) == 1
    (recipe,) = recipes
    assert max(abs(c - t) for c, t in zip(recipe.center, (300, 30, 10))) < 5
    assert recipe.good_count == 9 and recipe.poor_count == 1
    assert recipe.member_days == tuple(range(10))


def test_extract_recipes_all_poor_is_empty():
    summaries = [summary(i, [100 + i, 5, 0]) for i in range(6)]
    tags = [POOR] * 6
    assert extract_recipes(summaries, tags, RecipeConfig(min_cluster_days=1)) == []


def test_extract_recipes_identical_days():
    summaries = [summary(i, [200, 20, 5]) for i in range(5)]
    tags = [GOOD] * 5
    recipes = extract_recipes(summaries, tags, RecipeConfig())
    assert len(recipes) == 1
    assert recipes[0].center == (200.0, 20.0, 5.0)


def test_extract_recipes_too_few_days():
    with pytest.raises(TooFewDays):
        extract_recipes([summary(0, [1, 1, 1])], [GOOD], RecipeConfig())


def test_extract_recipes_k1_fallback_when_range_infeasible():
    summaries = [summary(0, [100, 0, 0]), summary(1, [104, 0, 0])]
    tags = [GOOD, GOOD]
    cfg = RecipeConfig(min_cluster_days=1, subcluster_k_range=(3, 4, 5))
    recipes = extract_recipes(summaries, tags, cfg)
    assert len(recipes) == 1
    assert recipes[0].center == (102.0, 0.0, 0.0)
    assert recipes[0].member_days == (0, 1)


def test_recipe_centers_are_exact_member_means():
    rng = np.random.default_rng(1)
    summaries = []
    tags = []
    for i in range(9):
        base = [300, 30, 10] if i % 2 == 0 else [80, 5, 0]
        summaries.append(summary(i, np.array(base, dtype=float) + rng.uniform(-3, 3, 3)))
        tags.append(GOOD)
    recipes = extract_recipes(summaries, tags, RecipeConfig(min_cluster_days=2))
    points = {s.day_index: np.array(s.minutes) for s in summaries}
    total_members = 0
    for recipe in recipes:
        members = np.array([points[d] for d in recipe.member_days])
        assert np.array_equal(np.array(recipe.center), members.mean(axis=0))
        lo, hi = members.min(axis=0), members.max(axis=0)
        assert np.all(np.array(recipe.center) >= lo) and np.all(np.array(recipe.center) <= hi)
        total_members += recipe.good_count + recipe.poor_count
    assert total_members <= len(summaries)


def test_threshold_zero_passes_quality_half_everywhere():
    cfg = RecipeConfig(good_efficiency_threshold=1e-9, min_cluster_days=1)
    for eff in (0.1, 0.5, 0.9, 0.99):
        assert tag_sleep_quality(record(eff), cfg) is GOOD
    assert good_cluster_test(5, 0, cfg) is True


def test_recipe_config_validation():
    with pytest.raises(ValueError):
        RecipeConfig(good_efficiency_threshold=1.5)
    with pytest.raises(ValueError):
        RecipeConfig(good_ratio_threshold=0)
    with pytest.raises(ValueError):
        RecipeConfig(min_cluster_days=0)
