// Secondary-component acceptance: the UI contract against a fixture server.
// The fixtures are real API responses recorded from the fitted planted
// cohort (frontend/scripts/make_fixtures.py).

import { afterEach, describe, expect, it, vi } from "vitest";

import {
  ApiFailure,
  fetchModes,
  fetchRecipes,
  fetchSubjects,
  postRecommend,
  type RecommendationDoc,
} from "../src/api.js";
import {
  initialState,
  paintBlock,
  recommendRequest,
  setMetadata,
  setSubject,
} from "../src/state.js";
import {
  renderCentroidChart,
  renderError,
  renderRecipeBars,
  renderRecommendation,
} from "../src/render.js";

import subjectsFixture from "../fixtures/subjects.json";
import modesFixture from "../fixtures/modes_S000.json";
import recipesFixture from "../fixtures/recipes_S000.json";
import middayFixture from "../fixtures/recommend_midday.json";
import demotedFixture from "../fixtures/recommend_demoted.json";
import errorsFixture from "../fixtures/errors.json";
import requestFixture from "../fixtures/whatif_request.json";

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Stand-in for `paris serve`: replays the recorded fixture responses. */
function fixtureServer() {
  return vi.fn(async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    if (url === "/api/v1/subjects") return json(subjectsFixture);
    if (url.startsWith("/api/v1/subjects/S000/modes")) return json(modesFixture);
    if (url.startsWith("/api/v1/subjects/S000/recipes")) return json(recipesFixture);
    if (url.startsWith("/api/v1/subjects/")) return json(errorsFixture.unknown_subject, 404);
    if (url === "/api/v1/recommend") {
      const body = JSON.parse(String(init?.body));
      if (body.t_m < 1) return json(errorsFixture.bad_window, 422);
      if (body.partial_counts.length !== body.t_m)
        return json(errorsFixture.length_mismatch, 422);
      if (body.metadata && body.metadata.resting_hr >= 85) return json(demotedFixture);
      return json(middayFixture);
    }
    return json({ code: "unknown", message: "no route" }, 500);
  });
}

afterEach(() => vi.unstubAllGlobals());

function middayState() {
  let state = setSubject(initialState(), "S000");
  for (let block = 0; block < 5; block++) {
    state = paintBlock(state, block, "light"); // 150 light minutes
  }
  return state; // slider already at 720
}

describe("criterion 11: what-if UI against the fixture server", () => {
  it("load_subject renders k=2 centroid lines and recipe bars", async () => {
    vi.stubGlobal("fetch", fixtureServer());
    const subjects = await fetchSubjects();
    expect(subjects.map((s) => s.subject_id)).toContain("S000");
    const [modes, recipes] = await Promise.all([
      fetchModes("S000"),
      fetchRecipes("S000"),
    ]);
    const panel = renderCentroidChart(modes) + renderRecipeBars(recipes);
    expect(panel.match(/<polyline/g)).toHaveLength(2);
    expect(panel).toContain('data-k="2"');
    // 2 modes x 2 recipes x 3 level bars
    expect(panel.match(/class="bar bar-/g)).toHaveLength(12);
    console.log("[criterion 11] PASS  load_subject renders k=2 centroids and recipe bars");
  });

  it("submit_whatif reproduces the recorded recommendation card", async () => {
    vi.stubGlobal("fetch", fixtureServer());
    const state = middayState();
    const body = recommendRequest(state);
    // the UI state layer reproduces the recorded request bit for bit
    expect(body).toEqual(requestFixture.midday_body);
    const doc = await postRecommend(body);
    expect(doc).toEqual(middayFixture);
    const html = renderRecommendation(doc);
    const top = middayFixture.ordered_items[0];
    expect(html.indexOf(`data-recipe="${top.recipe_ref}"`)).toBeLessThan(
      html.indexOf(`data-recipe="${middayFixture.ordered_items[1].recipe_ref}"`),
    );
    expect(html).toContain(
      `${(top.membership_probability * 100).toFixed(1)}%`,
    );
    expect(html).not.toContain("data-rule=");
    console.log("[criterion 11] PASS  submit_whatif reproduces the fixture recommendation card");
  });

  it("resting_hr override at 90 surfaces the demotion flag", async () => {
    vi.stubGlobal("fetch", fixtureServer());
    const state = setMetadata(middayState(), "resting_hr", 90);
    const body = recommendRequest(state);
    expect(body).toEqual(requestFixture.demoted_body);
    const doc = await postRecommend(body);
    expect(doc).toEqual(demotedFixture);
    const html = renderRecommendation(doc as RecommendationDoc);
    expect(html).toContain('data-rule="hr_demote"');
    expect(doc.explain?.triggered_rules).toEqual(["hr_demote"]);
    console.log("[criterion 11] PASS  resting_hr override >= 85 surfaces the demotion flag");
  });

  it("every API error code has a distinct rendering", async () => {
    vi.stubGlobal("fetch", fixtureServer());
    const notFound = await fetchModes("ZZZ").catch((e) => e as ApiFailure);
    expect(notFound).toBeInstanceOf(ApiFailure);
    const renderings = new Map<string, string>();
    const recorded = errorsFixture as Record<string, { code: string; message: string }>;
    const statuses: Record<string, number> = {
      unknown_subject: 404,
      bundle_not_loaded: 503,
      length_mismatch: 422,
      bad_window: 422,
      validation_error: 422,
      no_recipes_for_mode: 409,
    };
    for (const [name, body] of Object.entries(recorded)) {
      renderings.set(name, renderError(new ApiFailure(statuses[name], body)));
    }
    renderings.set(
      "network",
      renderError(new ApiFailure(0, { code: "network", message: "offline" })),
    );
    expect(new Set(renderings.values()).size).toBe(renderings.size);
    for (const [name, html] of renderings) {
      const code = name === "network" ? "network" : recorded[name].code;
      expect(html).toContain(`data-code="${code}"`);
    }
    console.log("[criterion 11] PASS  all API error codes render distinctly");
  });
});
