import pytest

from paris.core import (
    ActivityLevel,
    BehaviorModeModel,
    IntervalType,
    LevelSummary,
    RECIPE_LEVELS,
    Recipe,
    RecipeBook,
    Recommendation,
    RecommendationItem,
    SeriesDomain,
    SleepQuality,
    SleepRecord,
    SubjectMetadata,
    EpochRecord,
    validate_day,
)
from conftest import make_day


def test_activity_levels_and_recipe_order():
    assert len(ActivityLevel) == 4
    assert RECIPE_LEVELS == (
        ActivityLevel.LIGHT,
        ActivityLevel.MODERATE,
        ActivityLevel.VIGOROUS,
    )
    assert ActivityLevel.SEDENTARY not in RECIPE_LEVELS


def test_validate_day_well_formed():
    assert validate_day(make_day()) == []


def test_validate_day_short_counts():
    import dataclasses

    day = dataclasses.replace(make_day(), counts=make_day().counts[:1439])
    report = validate_day(day)
    assert len(report) == 1
    assert "counts.length" in report[0]


def test_validate_day_negative_count():
    counts = [0.0] * 1440
    counts[7] = -3.0
    report = validate_day(make_day(counts=counts))
    assert report == ["counts[7] < 0"]


def test_sleep_record_efficiency_identity():
    # efficiency must equal 1 - awake/in_bed for any construction
    for in_bed, awake in [(480.0, 0.0), (480.0, 40.0), (300.0, 299.5), (1.0, 1.0)]:
        rec = SleepRecord.from_bed_minutes("s", 0, in_bed, awake)
        assert rec.minutes_asleep + rec.minutes_awake_in_bed == pytest.approx(in_bed, abs=1e-9)
        assert rec.efficiency == pytest.approx(1.0 - awake / in_bed, abs=1e-12)


def test_sleep_record_good_threshold_is_strict():
    exactly = SleepRecord.from_bed_minutes("s", 0, 1.0, 0.1)
    assert exactly.efficiency == pytest.approx(0.9, abs=1e-15)
    assert exactly.quality is SleepQuality.POOR
    above = SleepRecord.from_bed_minutes("s", 0, 1.0, 0.1 - 1e-9)
    assert above.efficiency > 0.9
    assert above.quality is SleepQuality.GOOD


def test_sleep_record_degenerate_night():
    rec = SleepRecord.from_bed_minutes("s", 0, 0.0, 0.0)
    assert rec.efficiency == 0.0
    assert rec.quality is SleepQuality.POOR


def _sample_instances():
    day = make_day(counts=[1.5] * 1440, interval=[IntervalType.REST_S] * 1440, wake=[0] * 1440)
    yield day
    yield EpochRecord("s1", 1440.5, 7, IntervalType.REST_S, 1)
    yield LevelSummary("s1", 2, 0, 1440, (880.0, 4.0, 0.0))
    yield SleepRecord.from_bed_minutes("s1", 3, 480.0, 40.0)
    yield SubjectMetadata("s1", age=44.0, gender="F", bmi=27.5, resting_hr=61.0, extensions=(("steps", 9000.0),))
    yield SubjectMetadata("s2")
    yield BehaviorModeModel(
        subject_id="s1",
        domain=SeriesDomain.TIME,
        metric="js",
        k=2,
        centroids=((0.0, 1.5), (2.0, 3.25)),
        day_assignments={0: 0, 1: 1, 6: 0},
        silhouette=0.53,
        fit_config={"k_range": [2, 3], "metrics": ["l2", "js"]},
    )
    yield RecipeBook(
        subject_id="s1",
        modes=(
            (Recipe((300.0, 30.0, 10.0), 4, 1, (0, 2, 4, 7, 9)),),
            (),
        ),
    )
    yield Recommendation(
        mode=1,
        ordered_items=(
            RecommendationItem(0, 0.75, (100.0, 0.0, 10.0), ("resting_hr_demote_vigorous",)),
            RecommendationItem(1, 0.25, (0.0, 0.0, 0.0)),
        ),
    )


def test_json_round_trip_is_exact():
    for obj in _sample_instances():
        decoded = type(obj).from_dict(obj.to_dict())
        assert decoded == obj, type(obj).__name__


def test_metadata_get_field():
    meta = SubjectMetadata("s", age=30.0, extensions=(("steps", 1.0),))
    assert meta.get_field("age") == 30.0
    assert meta.get_field("bmi") is None
    assert meta.get_field("steps") == 1.0
    with pytest.raises(KeyError):
        meta.get_field("unknown_thing")


def test_interval_wire_spelling():
    assert IntervalType.REST_S.value == "REST-S"
    assert IntervalType("REST-S") is IntervalType.REST_S
