"""Figure-data exports: mode centroid curves, day-of-week composition, and
recipe tables as CSV. Rendering belongs to the UI; these are lossless
projections of the bundle."""

from __future__ import annotations

import io

from .errors import EmptyBundle
from .modes import day_of_week_purity
from .pipeline import ModelBundle

_DOW_COLUMNS = "mon,tue,wed,thu,fri,sat,sun"


def export_mode_centers(bundle: ModelBundle, subject_id: str) -> str:
    """CSV of centroid values: one row per minute, one column per mode."""
    models = bundle.subject(subject_id)
    centroids = models.modes.centroids
    out = io.StringIO()
    header = ",".join(["minute"] + [f"mode{j}" for j in range(len(centroids))])
    out.write(header + "\n")
    for minute in range(len(centroids[0])):
        row = [str(minute)] + [repr(c[minute]) for c in centroids]
        out.write(",".join(row) + "\n")
    return out.getvalue()


def export_composition(bundle: ModelBundle) -> str:
    """CSV of day-of-week counts and purity, one row per (subject, mode)."""
    if not bundle.subjects:
        raise EmptyBundle("bundle has no subjects")
    anchor = int(bundle.config.get("day_of_week_anchor", 0))
    out = io.StringIO()
    out.write(f"subject,mode,{_DOW_COLUMNS},purity\n")
    for subject_id in bundle.subject_ids:
        model = bundle.subjects[subject_id].modes
        dows = {d: (d + anchor) % 7 for d in model.day_assignments}
        purity = day_of_week_purity(model, dows)
        for mode_purity in purity.modes:
            counts = ",".join(str(c) for c in mode_purity.day_counts)
            out.write(f"{subject_id},{mode_purity.mode},{counts},{repr(mode_purity.purity)}\n")
    return out.getvalue()


def export_recipes(bundle: ModelBundle, subject_id: str) -> str:
    """CSV of recipes: mode, index within mode, center, and good/poor counts."""
    models = bundle.subject(subject_id)
    out = io.StringIO()
    out.write("mode,recipe_idx,light,moderate,vigorous,good,poor\n")
    for mode, recipes in enumerate(models.recipes.modes):
        for idx, recipe in enumerate(recipes):
            light, moderate, vigorous = recipe.center
            out.write(
                f"{mode},{idx},{repr(light)},{repr(moderate)},{repr(vigorous)},"
                f"{recipe.good_count},{recipe.poor_count}\n"
            )
    return out.getvalue()
