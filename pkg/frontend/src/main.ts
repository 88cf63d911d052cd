// DOM wiring for the what-if explorer. All rendering goes through the pure
// builders in render.ts; this file only moves state and swaps innerHTML.

import {
  ApiFailure,
  fetchModes,
  fetchRecipes,
  fetchSubjects,
  postRecommend,
} from "./api.js";
import {
  LEVELS,
  N_BLOCKS,
  BLOCK_MINUTES,
  WhatIfState,
  acceptResponse,
  cycleLevel,
  initialState,
  paintBlock,
  recommendRequest,
  setMetadata,
  setSlider,
  setSubject,
} from "./state.js";
import {
  renderCentroidChart,
  renderComparison,
  renderError,
  renderRecipeBars,
  renderRecommendation,
  renderSubjectOptions,
} from "./render.js";

let state: WhatIfState = initialState();
let inFlight: AbortController | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showError(target: HTMLElement, err: unknown): void {
  if (err instanceof ApiFailure) {
    target.innerHTML = renderError(err);
  } else {
    target.innerHTML = renderError(
      new ApiFailure(0, { code: "network", message: String(err) }),
    );
  }
}

function renderBlocks(): void {
  const grid = el<HTMLDivElement>("blocks");
  const cells: string[] = [];
  for (let i = 0; i < N_BLOCKS; i++) {
    const beyond = i * BLOCK_MINUTES >= state.tM ? " beyond" : "";
    const hour = String(Math.floor((i * BLOCK_MINUTES) / 60)).padStart(2, "0");
    const minute = String((i * BLOCK_MINUTES) % 60).padStart(2, "0");
    cells.push(
      `<button type="button" class="block level-${state.blocks[i]}${beyond}" ` +
        `data-index="${i}" title="${hour}:${minute} ${state.blocks[i]}"></button>`,
    );
  }
  grid.innerHTML = cells.join("");
}

function renderClock(): void {
  const hours = String(Math.floor(state.tM / 60)).padStart(2, "0");
  const minutes = String(state.tM % 60).padStart(2, "0");
  el("tm-value").textContent = `${hours}:${minutes}`;
}

async function loadSubject(subjectId: string): Promise<void> {
  state = setSubject(state, subjectId);
  const panel = el("subject-panel");
  try {
    const [modes, recipes] = await Promise.all([
      fetchModes(subjectId),
      fetchRecipes(subjectId),
    ]);
    panel.innerHTML = renderCentroidChart(modes) + renderRecipeBars(recipes);
  } catch (err) {
    showError(panel, err);
  }
  el("results").innerHTML = renderComparison(null, null);
}

async function submitWhatIf(): Promise<void> {
  if (state.subjectId === null) return;
  const results = el("results");
  inFlight?.abort();
  const controller = new AbortController();
  inFlight = controller;
  state = { ...state, status: "loading" };
  el("submit").setAttribute("disabled", "disabled");
  try {
    const doc = await postRecommend(recommendRequest(state), controller.signal);
    if (controller !== inFlight) return; // superseded by a newer submission
    state = acceptResponse(state, doc);
    results.innerHTML = renderComparison(state.current, state.previous);
  } catch (err) {
    if (controller !== inFlight) return;
    state = { ...state, status: "error" };
    showError(results, err);
  } finally {
    if (controller === inFlight) {
      inFlight = null;
      el("submit").removeAttribute("disabled");
    }
  }
}

async function boot(): Promise<void> {
  renderBlocks();
  renderClock();
  const select = el<HTMLSelectElement>("subject");
  try {
    const subjects = await fetchSubjects();
    select.innerHTML = renderSubjectOptions(subjects);
    if (subjects.length > 0) {
      await loadSubject(subjects[0].subject_id);
    }
  } catch (err) {
    showError(el("subject-panel"), err);
  }
  select.addEventListener("change", () => void loadSubject(select.value));

  const slider = el<HTMLInputElement>("tm");
  slider.addEventListener("input", () => {
    state = setSlider(state, Number(slider.value));
    renderBlocks();
    renderClock();
  });

  el("blocks").addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const index = Number(target.dataset.index);
    if (Number.isNaN(index)) return;
    const level = cycleLevel(state.blocks[index]);
    const next = paintBlock(state, index, level);
    if (next !== state) {
      state = next;
      renderBlocks();
    }
  });

  for (const field of ["age", "bmi", "resting_hr"]) {
    const input = el<HTMLInputElement>(`meta-${field}`);
    input.addEventListener("change", () => {
      const value = input.value === "" ? null : Number(input.value);
      state = setMetadata(state, field, value);
    });
  }

  el("submit").addEventListener("click", () => void submitWhatIf());
}

document.addEventListener("DOMContentLoaded", () => void boot());

export { LEVELS };
