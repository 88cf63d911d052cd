import { describe, expect, it } from "vitest";

import {
  BLOCK_MINUTES,
  DEFAULT_CUT_POINTS,
  N_BLOCKS,
  acceptResponse,
  bandMidpoint,
  cycleLevel,
  initialState,
  paintBlock,
  partialCounts,
  recommendRequest,
  setMetadata,
  setSlider,
  setSubject,
} from "../src/state.js";

describe("what-if state", () => {
  it("starts with a sedentary day at noon", () => {
    const state = initialState();
    expect(state.blocks).toHaveLength(N_BLOCKS);
    expect(new Set(state.blocks)).toEqual(new Set(["sedentary"]));
    expect(state.tM).toBe(720);
  });

  it("band midpoints follow the cut-point bands", () => {
    expect(bandMidpoint("sedentary")).toBe(50);
    expect(bandMidpoint("light")).toBe((100 + 1535) / 2);
    expect(bandMidpoint("moderate")).toBe((1535 + 3962) / 2);
    expect(bandMidpoint("vigorous")).toBe(3962 * 1.25);
  });

  it("partial counts always have exactly t_m entries", () => {
    let state = initialState();
    for (const tM of [30, 90, 720, 1440, 750]) {
      state = setSlider(state, tM);
      expect(partialCounts(state)).toHaveLength(state.tM);
    }
  });

  it("painting beyond the slider is rejected", () => {
    const state = setSlider(initialState(), 120); // blocks 0..3 editable
    const edited = paintBlock(state, 3, "light");
    expect(edited.blocks[3]).toBe("light");
    const rejected = paintBlock(state, 4, "light");
    expect(rejected).toBe(state); // unchanged, same object
  });

  it("painting is immutable and bounded", () => {
    const state = initialState();
    const painted = paintBlock(state, 0, "vigorous");
    expect(state.blocks[0]).toBe("sedentary");
    expect(painted.blocks[0]).toBe("vigorous");
    expect(paintBlock(state, -1, "light")).toBe(state);
    expect(paintBlock(state, N_BLOCKS, "light")).toBe(state);
  });

  it("slider snaps to blocks and clamps to the day", () => {
    const state = initialState();
    expect(setSlider(state, 44).tM).toBe(30);
    expect(setSlider(state, 46).tM).toBe(60);
    expect(setSlider(state, 0).tM).toBe(BLOCK_MINUTES);
    expect(setSlider(state, 9999).tM).toBe(1440);
  });

  it("level cycling walks all four levels", () => {
    expect(cycleLevel("sedentary")).toBe("light");
    expect(cycleLevel("vigorous")).toBe("sedentary");
  });

  it("builds the recommend request with counts from painted blocks", () => {
    let state = setSubject(initialState(), "S000");
    state = paintBlock(state, 0, "light");
    state = setSlider(state, 60);
    const body = recommendRequest(state);
    expect(body.subject_id).toBe("S000");
    expect(body.t_m).toBe(60);
    expect(body.partial_counts.slice(0, 30)).toEqual(Array(30).fill(bandMidpoint("light")));
    expect(body.partial_counts.slice(30)).toEqual(Array(30).fill(bandMidpoint("sedentary")));
    expect(body).not.toHaveProperty("metadata");
  });

  it("includes metadata overrides only when set", () => {
    let state = setSubject(initialState(), "S000");
    state = setMetadata(state, "resting_hr", 90);
    expect(recommendRequest(state).metadata).toEqual({ resting_hr: 90 });
    state = setMetadata(state, "resting_hr", null);
    expect(recommendRequest(state)).not.toHaveProperty("metadata");
  });

  it("requires a subject before submitting", () => {
    expect(() => recommendRequest(initialState())).toThrow(/no subject/);
  });

  it("keeps the previous response for comparison", () => {
    const a = { mode: 0, ordered_items: [] };
    const b = { mode: 1, ordered_items: [] };
    let state = acceptResponse(setSubject(initialState(), "S000"), a);
    expect(state.current).toBe(a);
    expect(state.previous).toBeNull();
    state = acceptResponse(state, b);
    expect(state.current).toBe(b);
    expect(state.previous).toBe(a);
  });

  it("uses custom cut-points when provided", () => {
    const cp = { light_min: 10, moderate_min: 20, vigorous_min: 40 };
    let state = setSlider(initialState(), 30);
    state = paintBlock(state, 0, "moderate");
    expect(partialCounts(state, cp)).toEqual(Array(30).fill(30));
    expect(DEFAULT_CUT_POINTS.light_min).toBe(100);
  });
});
