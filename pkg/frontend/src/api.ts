// Typed client for the /api/v1 recommendation service.

export interface SubjectSummary {
  subject_id: string;
  k: number;
  silhouette: number;
  recipe_counts: number[];
}

export interface ModeModel {
  subject_id: string;
  domain: string;
  metric: string;
  k: number;
  centroids: number[][];
  day_assignments: Record<string, number>;
  silhouette: number;
}

export interface RecipeEntry {
  center: number[]; // [light, moderate, vigorous] minutes
  good: number;
  poor: number;
  days: number[];
}

export interface RecipeBook {
  subject_id: string;
  modes: RecipeEntry[][];
}

export interface RecommendationItem {
  recipe_ref: number;
  membership_probability: number;
  deficit: number[];
  constraint_flags: string[];
}

export interface ExplainBlock {
  t_m: number;
  wake_onset: number;
  mode_distance: number;
  achieved: number[];
  recipe_distances: number[];
  membership_probabilities: number[];
  triggered_rules: string[];
}

export interface RecommendationDoc {
  mode: number;
  ordered_items: RecommendationItem[];
  explain?: ExplainBlock;
}

export interface RecommendRequest {
  subject_id: string;
  t_m: number;
  partial_counts: number[];
  wake_onset?: number;
  metadata?: Record<string, number>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

/** Any non-2xx response (or network failure, status 0 / code "network"). */
export class ApiFailure extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
    this.name = "ApiFailure";
  }
}

const BASE = "/api/v1";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(BASE + path, init);
  } catch (err) {
    throw new ApiFailure(0, { code: "network", message: String(err) });
  }
  if (!resp.ok) {
    let body: ApiErrorBody;
    try {
      body = (await resp.json()) as ApiErrorBody;
    } catch {
      body = { code: "unknown", message: `HTTP ${resp.status}` };
    }
    throw new ApiFailure(resp.status, body);
  }
  return (await resp.json()) as T;
}

export function fetchSubjects(): Promise<SubjectSummary[]> {
  return request<SubjectSummary[]>("/subjects");
}

export function fetchModes(subjectId: string, downsample = 10): Promise<ModeModel> {
  const id = encodeURIComponent(subjectId);
  return request<ModeModel>(`/subjects/${id}/modes?downsample=${downsample}`);
}

export function fetchRecipes(subjectId: string): Promise<RecipeBook> {
  const id = encodeURIComponent(subjectId);
  return request<RecipeBook>(`/subjects/${id}/recipes`);
}

export function postRecommend(
  body: RecommendRequest,
  signal?: AbortSignal,
): Promise<RecommendationDoc> {
  return request<RecommendationDoc>("/recommend", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
    signal,
  });
}
