"""Epoch CSV parsing and feature building: minute-level days, cut-point
labeling, level summaries, and per-night sleep records.

Epoch CSV format (header required, UTF-8):
    subject_id,day_index,epoch_index,activity_count,interval_type,wake
with epoch_index 0..2879, interval_type one of ACTIVE/REST/REST-S/EXCLUDED
and wake 0/1. Metadata CSV: subject_id,age,gender,bmi,resting_hr[,extra...],
empty string meaning absent.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from . import core
from .core import (
    ActigraphyDay,
    ActivityLevel,
    EpochRecord,
    IntervalType,
    LevelSummary,
    SleepRecord,
    SubjectMetadata,
)
from .errors import BadWindow, MalformedHeader, NoBedInterval, WindowInverted

EPOCH_HEADER = ["subject_id", "day_index", "epoch_index", "activity_count", "interval_type", "wake"]
METADATA_HEADER = ["subject_id", "age", "gender", "bmi", "resting_hr"]

# Minimum complete days a subject must have; extras beyond this are dropped.
REQUIRED_DAYS = 7

# WASO requires this many consecutive wake epochs inside REST-S (= 5 minutes).
WASO_MIN_EPOCHS = 10


@dataclass(frozen=True)
class CutPoints:
    """Counts/minute thresholds separating the four intensity levels.

    Intervals are half-open and lower-inclusive: a minute at exactly
    light_min is Light. Defaults follow the Actical literature values and
    are fully configurable.
    """

    light_min: float = 100.0
    moderate_min: float = 1535.0
    vigorous_min: float = 3962.0

    def __post_init__(self) -> None:
        if not 0 < self.light_min < self.moderate_min < self.vigorous_min:
            raise ValueError("cut-points must satisfy 0 < light < moderate < vigorous")

    def to_dict(self) -> dict:
        return {
            "light_min": self.light_min,
            "moderate_min": self.moderate_min,
            "vigorous_min": self.vigorous_min,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CutPoints":
        return cls(
            light_min=float(d["light_min"]),
            moderate_min=float(d["moderate_min"]),
            vigorous_min=float(d["vigorous_min"]),
        )


DEFAULT_CUT_POINTS = CutPoints()


@dataclass(frozen=True)
class RowIssue:
    line: int
    message: str


@dataclass
class EpochParseResult:
    records: list[EpochRecord]
    errors: list[RowIssue]


def _as_text_lines(source) -> io.TextIOBase:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise TypeError("source must be bytes, str, or a file-like object")


def parse_epochs(source) -> EpochParseResult:
    """Parse the epoch CSV; malformed rows are collected, never fatal.

    Raises MalformedHeader when the header row does not match the documented
    format. Rows violating per-subject timestamp monotonicity are reported
    and skipped.
    """
    reader = csv.reader(_as_text_lines(source))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedHeader("empty input") from None
    if [h.strip() for h in header] != EPOCH_HEADER:
        raise MalformedHeader(f"expected header {','.join(EPOCH_HEADER)}")
    records: list[EpochRecord] = []
    errors: list[RowIssue] = []
    last_ts: dict[str, float] = {}
    interval_by_name = {iv.value: iv for iv in IntervalType}
    append = records.append
    for line_no, row in enumerate(reader, start=2):
        if len(row) != 6:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            errors.append(RowIssue(line_no, f"expected {len(EPOCH_HEADER)} fields, got {len(row)}"))
            continue
        subject_id = row[0].strip()
        try:
            day_index = int(row[1])
            epoch_index = int(row[2])
            count = int(row[3])
            wake = int(row[5])
        except ValueError:
            errors.append(RowIssue(line_no, "non-integer numeric field"))
            continue
        if day_index < 0:
            errors.append(RowIssue(line_no, f"day_index {day_index} < 0"))
            continue
        if not 0 <= epoch_index < core.EPOCHS_PER_DAY:
            errors.append(RowIssue(line_no, f"epoch_index {epoch_index} outside 0..2879"))
            continue
        if count < 0:
            errors.append(RowIssue(line_no, f"activity_count {count} < 0"))
            continue
        interval = interval_by_name.get(row[4].strip())
        if interval is None:
            errors.append(RowIssue(line_no, f"unknown interval_type {row[4].strip()!r}"))
            continue
        if wake not in (0, 1):
            errors.append(RowIssue(line_no, f"wake {wake} not in {{0,1}}"))
            continue
        timestamp = day_index * 1440 + epoch_index * 0.5
        prev = last_ts.get(subject_id)
        if prev is not None and timestamp <= prev:
            errors.append(
                RowIssue(line_no, f"non-monotonic timestamp for subject {subject_id}")
            )
            continue
        last_ts[subject_id] = timestamp
        append(EpochRecord(subject_id, timestamp, count, interval, wake))
    records.sort(key=lambda r: (r.subject_id, r.timestamp))
    return EpochParseResult(records=records, errors=errors)


# Minute-level interval from the two epochs: most restrictive wins.
_INTERVAL_PRECEDENCE = {
    IntervalType.EXCLUDED: 3,
    IntervalType.REST_S: 2,
    IntervalType.REST: 1,
    IntervalType.ACTIVE: 0,
}


@dataclass(frozen=True)
class DroppedDay:
    subject_id: str
    day_index: int
    reason: str


@dataclass
class DayBuildResult:
    days: list[ActigraphyDay]
    dropped: list[DroppedDay]


def epochs_to_days(epochs: list[EpochRecord], day_of_week_anchor: int = 0) -> DayBuildResult:
    """Aggregate 30-second epochs to minute-level days.

    Minute m sums epochs 2m and 2m+1 (pairwise, stride 2); the minute's
    interval takes the most restrictive of the pair and wake the max. Days
    missing any of their 2880 epochs are dropped and reported.

    day_of_week = (day_index + anchor) % 7, anchor 0 meaning day 0 is a
    Monday.
    """
    by_day: dict[tuple[str, int], dict[int, EpochRecord]] = {}
    for rec in epochs:
        day_index = int(rec.timestamp // core.MINUTES_PER_DAY)
        offset = round((rec.timestamp - day_index * core.MINUTES_PER_DAY) / core.EPOCH_MINUTES)
        by_day.setdefault((rec.subject_id, day_index), {})[offset] = rec
    days: list[ActigraphyDay] = []
    dropped: list[DroppedDay] = []
    for (subject_id, day_index), slots in sorted(by_day.items()):
        if len(slots) != core.EPOCHS_PER_DAY:
            dropped.append(
                DroppedDay(subject_id, day_index, f"{core.EPOCHS_PER_DAY - len(slots)} missing epochs")
            )
            continue
        counts = []
        interval = []
        wake = []
        for m in range(core.MINUTES_PER_DAY):
            first, second = slots[2 * m], slots[2 * m + 1]
            counts.append(float(first.activity_count + second.activity_count))
            interval.append(
                max(first.interval_type, second.interval_type, key=_INTERVAL_PRECEDENCE.__getitem__)
            )
            wake.append(max(first.wake, second.wake))
        days.append(
            ActigraphyDay(
                subject_id=subject_id,
                day_index=day_index,
                day_of_week=(day_index + day_of_week_anchor) % 7,
                counts=tuple(counts),
                interval=tuple(interval),
                wake=tuple(wake),
            )
        )
    return DayBuildResult(days=days, dropped=dropped)


def filter_subjects(
    days: list[ActigraphyDay],
    required_days: int = REQUIRED_DAYS,
    truncate: bool = True,
) -> list[ActigraphyDay]:
    """Apply the minimum-days rule: subjects with fewer complete days are
    removed entirely; with truncate (the fitting rule), subjects with more
    keep only their first `required_days` by day_index."""
    by_subject: dict[str, list[ActigraphyDay]] = {}
    for day in days:
        by_subject.setdefault(day.subject_id, []).append(day)
    kept: list[ActigraphyDay] = []
    for subject_id in sorted(by_subject):
        subject_days = sorted(by_subject[subject_id], key=lambda d: d.day_index)
        if len(subject_days) < required_days:
            continue
        kept.extend(subject_days[:required_days] if truncate else subject_days)
    return kept


def label_counts(counts, cp: CutPoints) -> list[ActivityLevel]:
    """Map counts/minute values to intensity levels via the cut-points."""
    labels = []
    for value in counts:
        if value < cp.light_min:
            labels.append(ActivityLevel.SEDENTARY)
        elif value < cp.moderate_min:
            labels.append(ActivityLevel.LIGHT)
        elif value < cp.vigorous_min:
            labels.append(ActivityLevel.MODERATE)
        else:
            labels.append(ActivityLevel.VIGOROUS)
    return labels


def label_minutes(day: ActigraphyDay, cp: CutPoints) -> list[ActivityLevel]:
    """Intensity level of each minute of a day."""
    return label_counts(day.counts, cp)


def summarize_levels(
    day: ActigraphyDay,
    labels: list[ActivityLevel],
    t1: int,
    t2: int,
    active_only: bool = True,
) -> LevelSummary:
    """Minutes per [Light, Moderate, Vigorous] level over [t1, t2).

    With active_only, only minutes whose interval is ACTIVE are counted.
    Sedentary minutes never appear in the output vector.
    """
    if t1 >= t2:
        raise WindowInverted(f"window [{t1}, {t2}) is empty or inverted")
    if not (0 <= t1 and t2 <= core.MINUTES_PER_DAY):
        raise BadWindow(f"window [{t1}, {t2}) outside the day")
    totals = {ActivityLevel.LIGHT: 0.0, ActivityLevel.MODERATE: 0.0, ActivityLevel.VIGOROUS: 0.0}
    for m in range(t1, t2):
        if active_only and day.interval[m] is not IntervalType.ACTIVE:
            continue
        level = labels[m]
        if level in totals:
            totals[level] += 1.0
    return LevelSummary(
        subject_id=day.subject_id,
        day_index=day.day_index,
        window_start=t1,
        window_end=t2,
        minutes=tuple(totals[level] for level in core.RECIPE_LEVELS),  # type: ignore[arg-type]
    )


def compute_sleep_record(night_epochs: list[EpochRecord]) -> SleepRecord:
    """Sleep accounting over one subject-night of epochs.

    minutes_in_bed covers REST and REST-S epochs. Awake time is all REST
    epochs plus WASO: wake runs inside REST-S of at least 10 consecutive
    epochs (5 minutes). Shorter wake runs do not count.
    """
    bed = [e for e in night_epochs if e.interval_type in (IntervalType.REST, IntervalType.REST_S)]
    if not bed:
        raise NoBedInterval("no REST/REST-S epochs in the night")
    n_rest = sum(1 for e in bed if e.interval_type is IntervalType.REST)
    n_rest_s = len(bed) - n_rest
    waso = 0.0
    run = 0
    ordered = sorted(night_epochs, key=lambda e: e.timestamp)
    for epoch in ordered:
        if epoch.interval_type is IntervalType.REST_S and epoch.wake == 1:
            run += 1
        else:
            if run >= WASO_MIN_EPOCHS:
                waso += run * core.EPOCH_MINUTES
            run = 0
    if run >= WASO_MIN_EPOCHS:
        waso += run * core.EPOCH_MINUTES
    minutes_in_bed = (n_rest + n_rest_s) * core.EPOCH_MINUTES
    minutes_awake = n_rest * core.EPOCH_MINUTES + waso
    first = min(bed, key=lambda e: e.timestamp)
    return SleepRecord.from_bed_minutes(
        subject_id=first.subject_id,
        day_index=int(first.timestamp // core.MINUTES_PER_DAY),
        minutes_in_bed=minutes_in_bed,
        minutes_awake_in_bed=minutes_awake,
    )


def locate_night_epochs(
    subject_epochs: list[EpochRecord], day_index: int
) -> list[EpochRecord] | None:
    """Find the night attributed to `day_index`: the maximal contiguous
    REST/REST-S run starting in that day's second half, allowed to extend
    into the following day. Returns None when the day has no such run."""
    lo = day_index * core.MINUTES_PER_DAY
    mid = lo + core.MINUTES_PER_DAY / 2
    hi = lo + 2 * core.MINUTES_PER_DAY
    window = sorted(
        (e for e in subject_epochs if lo <= e.timestamp < hi), key=lambda e: e.timestamp
    )
    best: list[EpochRecord] | None = None
    current: list[EpochRecord] = []
    for epoch in window:
        if epoch.interval_type in (IntervalType.REST, IntervalType.REST_S):
            if current and epoch.timestamp - current[-1].timestamp > core.EPOCH_MINUTES:
                current = []  # gap in the recording breaks the run
            current.append(epoch)
        else:
            current = []
            continue
        starts_tonight = mid <= current[0].timestamp < lo + core.MINUTES_PER_DAY
        if starts_tonight and (best is None or len(current) > len(best)):
            best = list(current)
    return best


def wake_onset_for_day(subject_epochs: list[EpochRecord], day_index: int) -> int:
    """Minute of day the subject woke up: where the previous night's bed
    interval ends when it reaches into this day, else minute 0."""
    if day_index <= 0:
        return 0
    night = locate_night_epochs(subject_epochs, day_index - 1)
    if not night:
        return 0
    end = night[-1].timestamp + core.EPOCH_MINUTES
    day_start = day_index * core.MINUTES_PER_DAY
    if end <= day_start:
        return 0
    return min(core.MINUTES_PER_DAY - 1, int(end - day_start))


def sleep_records_for_subject(subject_epochs: list[EpochRecord]) -> dict[int, SleepRecord]:
    """Per-day sleep records for one subject's epochs; days without a
    locatable bed interval are simply absent from the result."""
    day_indices = sorted({int(e.timestamp // core.MINUTES_PER_DAY) for e in subject_epochs})
    records: dict[int, SleepRecord] = {}
    for day_index in day_indices:
        night = locate_night_epochs(subject_epochs, day_index)
        if night:
            records[day_index] = compute_sleep_record(night)
    return records


def parse_metadata(source) -> dict[str, SubjectMetadata]:
    """Parse the metadata CSV into SubjectMetadata keyed by subject id.

    Columns beyond the documented five become extension fields; empty cells
    mean the field is absent.
    """
    reader = csv.reader(_as_text_lines(source))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MalformedHeader("empty input") from None
    if header[: len(METADATA_HEADER)] != METADATA_HEADER:
        raise MalformedHeader(f"expected header to start with {','.join(METADATA_HEADER)}")
    extra_names = header[len(METADATA_HEADER):]
    out: dict[str, SubjectMetadata] = {}
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        values = [v.strip() for v in row]
        subject_id = values[0]

        def number(idx: int) -> float | None:
            return float(values[idx]) if idx < len(values) and values[idx] else None

        extensions = []
        for offset, name in enumerate(extra_names):
            idx = len(METADATA_HEADER) + offset
            if idx < len(values) and values[idx]:
                extensions.append((name, float(values[idx])))
        out[subject_id] = SubjectMetadata(
            subject_id=subject_id,
            age=number(1),
            gender=values[2] if len(values) > 2 and values[2] else None,
            bmi=number(3),
            resting_hr=number(4),
            extensions=tuple(extensions),
        )
    return out
