// What-if state: a day painted in 30-minute blocks, a time-of-day slider,
// and metadata overrides. The invariant partial_counts.length === t_m is
// enforced here; edits beyond the slider are rejected.

import type { RecommendationDoc, RecommendRequest } from "./api.js";

export const MINUTES_PER_DAY = 1440;
export const BLOCK_MINUTES = 30;
export const N_BLOCKS = MINUTES_PER_DAY / BLOCK_MINUTES;

export type Level = "sedentary" | "light" | "moderate" | "vigorous";
export const LEVELS: Level[] = ["sedentary", "light", "moderate", "vigorous"];

export interface CutPoints {
  light_min: number;
  moderate_min: number;
  vigorous_min: number;
}

// Must match the cut-points the bundle was fitted with.
export const DEFAULT_CUT_POINTS: CutPoints = {
  light_min: 100,
  moderate_min: 1535,
  vigorous_min: 3962,
};

/** Counts/minute planted for a painted block: the midpoint of the level's
 * cut-point band (vigorous has no upper bound; 1.25x the threshold). */
export function bandMidpoint(level: Level, cp: CutPoints = DEFAULT_CUT_POINTS): number {
  switch (level) {
    case "sedentary":
      return cp.light_min / 2;
    case "light":
      return (cp.light_min + cp.moderate_min) / 2;
    case "moderate":
      return (cp.moderate_min + cp.vigorous_min) / 2;
    case "vigorous":
      return cp.vigorous_min * 1.25;
  }
}

export type RequestStatus = "idle" | "loading" | "done" | "error";

export interface WhatIfState {
  subjectId: string | null;
  tM: number;
  blocks: Level[]; // always N_BLOCKS entries; only those before tM are sent
  metadata: Record<string, number>;
  current: RecommendationDoc | null;
  previous: RecommendationDoc | null;
  status: RequestStatus;
}

export function initialState(): WhatIfState {
  return {
    subjectId: null,
    tM: 720,
    blocks: Array(N_BLOCKS).fill("sedentary"),
    metadata: {},
    current: null,
    previous: null,
    status: "idle",
  };
}

export function cycleLevel(level: Level): Level {
  return LEVELS[(LEVELS.indexOf(level) + 1) % LEVELS.length];
}

/** Paint one block; edits at or beyond the slider are rejected unchanged. */
export function paintBlock(state: WhatIfState, index: number, level: Level): WhatIfState {
  if (index < 0 || index >= N_BLOCKS) return state;
  if (index * BLOCK_MINUTES >= state.tM) return state;
  const blocks = state.blocks.slice();
  blocks[index] = level;
  return { ...state, blocks };
}

/** Move the slider, snapped to whole blocks and clamped to one block .. 24h. */
export function setSlider(state: WhatIfState, tM: number): WhatIfState {
  const snapped = Math.round(tM / BLOCK_MINUTES) * BLOCK_MINUTES;
  const clamped = Math.min(MINUTES_PER_DAY, Math.max(BLOCK_MINUTES, snapped));
  return { ...state, tM: clamped };
}

export function setSubject(state: WhatIfState, subjectId: string): WhatIfState {
  return { ...state, subjectId, current: null, previous: null, status: "idle" };
}

export function setMetadata(
  state: WhatIfState,
  field: string,
  value: number | null,
): WhatIfState {
  const metadata = { ...state.metadata };
  if (value === null || Number.isNaN(value)) {
    delete metadata[field];
  } else {
    metadata[field] = value;
  }
  return { ...state, metadata };
}

/** Per-minute activity counts for the painted day, exactly tM values. */
export function partialCounts(
  state: WhatIfState,
  cp: CutPoints = DEFAULT_CUT_POINTS,
): number[] {
  const counts: number[] = [];
  for (let minute = 0; minute < state.tM; minute++) {
    const block = Math.floor(minute / BLOCK_MINUTES);
    counts.push(bandMidpoint(state.blocks[block], cp));
  }
  return counts;
}

export function recommendRequest(
  state: WhatIfState,
  cp: CutPoints = DEFAULT_CUT_POINTS,
): RecommendRequest {
  if (state.subjectId === null) {
    throw new Error("no subject selected");
  }
  const body: RecommendRequest = {
    subject_id: state.subjectId,
    t_m: state.tM,
    partial_counts: partialCounts(state, cp),
  };
  if (Object.keys(state.metadata).length > 0) {
    body.metadata = { ...state.metadata };
  }
  return body;
}

/** Keep the previous answer for side-by-side comparison. */
export function acceptResponse(state: WhatIfState, doc: RecommendationDoc): WhatIfState {
  return {
    ...state,
    previous: state.current,
    current: doc,
    status: "done",
  };
}
