"""Shared fixtures: small synthetic cohorts and fitted pipelines."""

from __future__ import annotations

import dataclasses

import pytest

from paris.core import ActigraphyDay, IntervalType
from paris.pipeline import PipelineConfig, run_pipeline
from paris.recipes import RecipeConfig
from paris.synthdata import default_cohort_spec, generate_cohort


def make_day(
    subject_id="S000",
    day_index=0,
    day_of_week=0,
    counts=None,
    interval=None,
    wake=None,
):
    """ActigraphyDay factory with all-zero defaults."""
    counts = tuple(float(v) for v in (counts if counts is not None else [0.0] * 1440))
    interval = tuple(interval if interval is not None else [IntervalType.ACTIVE] * 1440)
    wake = tuple(wake if wake is not None else [1] * 1440)
    return ActigraphyDay(
        subject_id=subject_id,
        day_index=day_index,
        day_of_week=day_of_week,
        counts=counts,
        interval=interval,
        wake=wake,
    )


@pytest.fixture(scope="session")
def small_cohort():
    """4 subjects x 7 days, default two-mode spec."""
    return generate_cohort(default_cohort_spec(n_subjects=4, seed=1))


@pytest.fixture(scope="session")
def small_result(small_cohort):
    return run_pipeline(small_cohort.epoch_csv, small_cohort.metadata_csv, PipelineConfig())


@pytest.fixture(scope="session")
def rich_spec():
    """4 subjects x 14 days: every planted recipe group has >= 2 member days."""
    return dataclasses.replace(default_cohort_spec(n_subjects=4, seed=2), days_per_subject=14)


@pytest.fixture(scope="session")
def rich_cohort(rich_spec):
    return generate_cohort(rich_spec)


@pytest.fixture(scope="session")
def rich_config():
    return PipelineConfig(required_days=14, recipe=RecipeConfig(min_cluster_days=2))


@pytest.fixture(scope="session")
def rich_result(rich_cohort, rich_config):
    return run_pipeline(rich_cohort.epoch_csv, rich_cohort.metadata_csv, rich_config)
