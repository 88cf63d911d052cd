// Pure HTML/SVG builders: state in, markup out. Nothing here touches the
// DOM or the network, so every rendering is unit-testable as a string.

import type {
  ApiFailure,
  ModeModel,
  RecipeBook,
  RecommendationDoc,
  RecommendationItem,
  SubjectSummary,
} from "./api.js";

const LEVEL_NAMES = ["light", "moderate", "vigorous"] as const;

function esc(value: unknown): string {
  return String(value)
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderSubjectOptions(subjects: SubjectSummary[]): string {
  return subjects
    .map(
      (s) =>
        `<option value="${esc(s.subject_id)}">${esc(s.subject_id)} ` +
        `(k=${s.k}, recipes ${s.recipe_counts.join("/")})</option>`,
    )
    .join("");
}

/** Line chart of the (downsampled) mode centroids as one polyline per mode. */
export function renderCentroidChart(model: ModeModel, width = 720, height = 160): string {
  const all = model.centroids.flat();
  const peak = Math.max(1, ...all);
  const lines = model.centroids
    .map((centroid, mode) => {
      const n = centroid.length;
      const points = centroid
        .map((v, i) => {
          const x = (i / Math.max(1, n - 1)) * width;
          const y = height - (v / peak) * (height - 8);
          return `${x.toFixed(1)},${y.toFixed(1)}`;
        })
        .join(" ");
      return `<polyline class="centroid centroid-${mode}" fill="none" points="${points}"><title>mode ${mode}</title></polyline>`;
    })
    .join("");
  const legend = model.centroids
    .map((_, mode) => `<span class="legend legend-${mode}">mode ${mode}</span>`)
    .join(" ");
  return (
    `<figure class="centroid-chart" data-k="${model.k}" data-metric="${esc(model.metric)}">` +
    `<svg viewBox="0 0 ${width} ${height}" role="img">${lines}</svg>` +
    `<figcaption>${legend} — silhouette ${model.silhouette.toFixed(3)}</figcaption></figure>`
  );
}

/** Grouped bars: per mode, per recipe, one bar per activity level. */
export function renderRecipeBars(book: RecipeBook): string {
  const peak = Math.max(
    1,
    ...book.modes.flat().flatMap((recipe) => recipe.center),
  );
  const groups = book.modes
    .map((recipes, mode) => {
      const cards = recipes
        .map((recipe, idx) => {
          const bars = LEVEL_NAMES.map((name, level) => {
            const minutes = recipe.center[level];
            const h = Math.round((minutes / peak) * 100);
            return (
              `<div class="bar bar-${name}" style="height:${h}%" ` +
              `title="${name} ${minutes.toFixed(0)} min"></div>`
            );
          }).join("");
          return (
            `<div class="recipe" data-mode="${mode}" data-recipe="${idx}">` +
            `<div class="bars">${bars}</div>` +
            `<div class="recipe-label">#${idx} · good ${recipe.good}/poor ${recipe.poor}</div></div>`
          );
        })
        .join("");
      return `<div class="mode-group" data-mode="${mode}"><h3>mode ${mode}</h3>${cards || "<p class=\"empty\">no recipes</p>"}</div>`;
    })
    .join("");
  return `<div class="recipe-bars">${groups}</div>`;
}

function renderItem(item: RecommendationItem, rank: number): string {
  const probability = (item.membership_probability * 100).toFixed(1);
  const total = item.deficit.reduce((a, b) => a + b, 0);
  const rows = LEVEL_NAMES.map((name, level) => {
    const minutes = item.deficit[level];
    const width = Math.min(100, Math.round((minutes / 300) * 100));
    return (
      `<div class="deficit-row deficit-${name}">` +
      `<span class="deficit-label">${name}</span>` +
      `<span class="deficit-bar" style="width:${width}%"></span>` +
      `<span class="deficit-minutes">${minutes.toFixed(0)} min</span></div>`
    );
  }).join("");
  const flags = item.constraint_flags
    .map((rule) => `<span class="flag" data-rule="${esc(rule)}">demoted/limited: ${esc(rule)}</span>`)
    .join(" ");
  const complete =
    total === 0
      ? `<p class="complete">No additional activity needed for this recipe.</p>`
      : "";
  return (
    `<article class="card${total === 0 ? " card-complete" : ""}" data-recipe="${item.recipe_ref}" data-rank="${rank}">` +
    `<header>Recipe #${item.recipe_ref}` +
    `<span class="badge">${probability}%</span></header>` +
    `${rows}${complete}${flags ? `<footer>${flags}</footer>` : ""}</article>`
  );
}

export function renderRecommendation(doc: RecommendationDoc): string {
  const cards = doc.ordered_items.map((item, rank) => renderItem(item, rank)).join("");
  const explain = doc.explain
    ? `<p class="explain">mode ${doc.mode} · achieved ` +
      `[${doc.explain.achieved.map((v) => v.toFixed(0)).join(", ")}] min` +
      (doc.explain.triggered_rules.length
        ? ` · rules: ${doc.explain.triggered_rules.map(esc).join(", ")}`
        : "") +
      `</p>`
    : "";
  return `<section class="recommendation" data-mode="${doc.mode}">${explain}${cards}</section>`;
}

/** Current result next to the previous one, for what-if iteration. */
export function renderComparison(
  current: RecommendationDoc | null,
  previous: RecommendationDoc | null,
): string {
  const left = current ? renderRecommendation(current) : `<p class="empty">no result yet</p>`;
  const right = previous
    ? `<div class="previous"><h3>previous</h3>${renderRecommendation(previous)}</div>`
    : "";
  return `<div class="comparison">${left}${right}</div>`;
}

// Every API error code gets its own banner text (and data-code hook).
const ERROR_RENDERINGS: Record<string, { headline: string; retryable: boolean }> = {
  unknown_subject: { headline: "Subject not found", retryable: false },
  bundle_not_loaded: { headline: "Service has no model bundle loaded yet", retryable: true },
  length_mismatch: { headline: "Painted activity does not match the time slider", retryable: false },
  bad_window: { headline: "Time of day must be between 00:30 and 24:00", retryable: false },
  validation_error: { headline: "The service rejected the request shape", retryable: false },
  no_recipes_for_mode: { headline: "No good-sleep recipes exist for the matched behavior mode", retryable: false },
  forbidden: { headline: "Not allowed", retryable: false },
  network: { headline: "Service unreachable", retryable: true },
};

export function renderError(failure: ApiFailure): string {
  const known = ERROR_RENDERINGS[failure.body.code];
  const headline = known ? known.headline : `Unexpected error (HTTP ${failure.status})`;
  const retry = known?.retryable
    ? `<button class="retry" type="button">retry</button>`
    : "";
  return (
    `<div class="banner error" data-code="${esc(failure.body.code)}" data-status="${failure.status}">` +
    `<strong>${esc(headline)}</strong> <span class="detail">${esc(failure.body.message)}</span>${retry}</div>`
  );
}
