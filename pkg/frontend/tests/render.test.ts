import { describe, expect, it } from "vitest";

import { ApiFailure } from "../src/api.js";
import {
  renderCentroidChart,
  renderComparison,
  renderError,
  renderRecipeBars,
  renderRecommendation,
  renderSubjectOptions,
} from "../src/render.js";

const model = {
  subject_id: "S000",
  domain: "Time",
  metric: "js",
  k: 2,
  centroids: [
    [0, 10, 40, 10, 0],
    [5, 5, 5, 60, 5],
  ],
  day_assignments: { "0": 0 },
  silhouette: 0.53,
};

const book = {
  subject_id: "S000",
  modes: [
    [
      { center: [300, 30, 10], good: 4, poor: 0, days: [0, 2, 7, 9] },
      { center: [150, 10, 0], good: 4, poor: 0, days: [1, 3, 8, 10] },
    ],
    [],
  ],
};

describe("rendering", () => {
  it("subject options carry ids and recipe counts", () => {
    const html = renderSubjectOptions([
      { subject_id: "S000", k: 2, silhouette: 0.5, recipe_counts: [2, 2] },
    ]);
    expect(html).toContain('value="S000"');
    expect(html).toContain("recipes 2/2");
  });

  it("centroid chart draws one polyline per mode", () => {
    const html = renderCentroidChart(model);
    expect(html.match(/<polyline/g)).toHaveLength(2);
    expect(html).toContain('data-k="2"');
    expect(html).toContain("silhouette 0.530");
  });

  it("recipe bars: three bars per recipe, empty modes say so", () => {
    const html = renderRecipeBars(book);
    expect(html.match(/class="bar bar-/g)).toHaveLength(6);
    expect(html).toContain("good 4/poor 0");
    expect(html).toContain("no recipes");
  });

  it("recommendation cards are ranked with probability badges", () => {
    const html = renderRecommendation({
      mode: 1,
      ordered_items: [
        { recipe_ref: 1, membership_probability: 0.939, deficit: [0, 10, 0], constraint_flags: [] },
        { recipe_ref: 0, membership_probability: 0.061, deficit: [150, 30, 10], constraint_flags: [] },
      ],
    });
    expect(html).toContain('data-mode="1"');
    const first = html.indexOf('data-recipe="1"');
    const second = html.indexOf('data-recipe="0"');
    expect(first).toBeGreaterThan(-1);
    expect(first).toBeLessThan(second);
    expect(html).toContain("93.9%");
    expect(html).toContain("6.1%");
  });

  it("zero-deficit items render as complete", () => {
    const html = renderRecommendation({
      mode: 0,
      ordered_items: [
        { recipe_ref: 0, membership_probability: 1.0, deficit: [0, 0, 0], constraint_flags: [] },
      ],
    });
    expect(html).toContain("card-complete");
    expect(html).toContain("No additional activity needed");
  });

  it("constraint flags render on their card", () => {
    const html = renderRecommendation({
      mode: 0,
      ordered_items: [
        { recipe_ref: 0, membership_probability: 1.0, deficit: [0, 0, 30], constraint_flags: ["hr_demote"] },
      ],
    });
    expect(html).toContain('data-rule="hr_demote"');
    expect(html).toContain("demoted/limited: hr_demote");
  });

  it("comparison shows the previous result only when present", () => {
    const doc = { mode: 0, ordered_items: [] };
    expect(renderComparison(doc, null)).not.toContain("previous");
    expect(renderComparison(doc, doc)).toContain("previous");
  });

  it("escapes hostile content", () => {
    const html = renderError(
      new ApiFailure(404, { code: "unknown_subject", message: "<script>alert(1)</script>" }),
    );
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("every documented error code renders distinctly", () => {
    const codes = [
      ["unknown_subject", 404],
      ["bundle_not_loaded", 503],
      ["length_mismatch", 422],
      ["bad_window", 422],
      ["validation_error", 422],
      ["no_recipes_for_mode", 409],
      ["forbidden", 403],
      ["network", 0],
    ] as const;
    const rendered = codes.map(([code, status]) =>
      renderError(new ApiFailure(status, { code, message: "m" })),
    );
    expect(new Set(rendered).size).toBe(codes.length);
    for (const [code] of codes) {
      const matching = rendered.filter((html) => html.includes(`data-code="${code}"`));
      expect(matching).toHaveLength(1);
    }
    // retryable states offer a retry control, terminal ones do not
    expect(rendered[1]).toContain("retry");
    expect(rendered[7]).toContain("retry");
    expect(rendered[0]).not.toContain("retry");
  });
});
