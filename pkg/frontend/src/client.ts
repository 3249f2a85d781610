/** Typed client for the planning service HTTP API.
 *
 * The fetch implementation is injected so tests can replay recorded
 * responses; in a browser pass `window.fetch.bind(window)`.
 */

import type {
  CreateSessionResponse,
  EditRequest,
  EditResponse,
  LogisticsResponse,
  MatrixDoc,
  PlanDoc,
  RunResponse,
  ScenarioSummary,
  StepResponse,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; text(): Promise<string> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
    message?: string,
  ) {
    super(message ?? `request failed with status ${status}`);
    this.name = "ApiError";
  }
}

/** An edit carried a revision the server has moved past. */
export class StaleRevisionError extends ApiError {
  constructor(readonly current: number) {
    super(409, { error: "STALE_REVISION", current }, `stale revision; server is at ${current}`);
    this.name = "StaleRevisionError";
  }
}

/** A pin (or other edit) the engine rejected; carries the violated interval. */
export class InvalidEditError extends ApiError {
  constructor(
    detail: { error: string; interval?: [number, number | null] },
  ) {
    super(422, detail, detail.error);
    this.name = "InvalidEditError";
  }

  get interval(): [number, number | null] | undefined {
    return (this.detail as { interval?: [number, number | null] }).interval;
  }
}

export class SessionCompleteError extends ApiError {
  constructor() {
    super(409, "STEP_ON_COMPLETE", "the plan is complete; nothing to step");
    this.name = "SessionCompleteError";
  }
}

interface ErrorBody {
  detail?: unknown;
}

function editFailure(status: number, body: ErrorBody): ApiError {
  const detail = body.detail;
  if (status === 409 && detail === "STEP_ON_COMPLETE") {
    return new SessionCompleteError();
  }
  if (
    status === 409 &&
    typeof detail === "object" &&
    detail !== null &&
    (detail as { error?: string }).error === "STALE_REVISION"
  ) {
    return new StaleRevisionError((detail as { current: number }).current);
  }
  if (status === 422 && typeof detail === "object" && detail !== null) {
    return new InvalidEditError(detail as { error: string });
  }
  return new ApiError(status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    const parsed = text ? (JSON.parse(text) as unknown) : null;
    if (resp.status >= 400) {
      throw editFailure(resp.status, (parsed ?? {}) as ErrorBody);
    }
    return parsed as T;
  }

  createSession(payload: {
    scenario: unknown;
    kb?: unknown;
    maxCount?: number;
    period?: number;
    weighting?: string;
  }): Promise<CreateSessionResponse> {
    return this.request("POST", "/sessions", payload);
  }

  step(sessionId: string): Promise<StepResponse> {
    return this.request("POST", `/sessions/${sessionId}/step`);
  }

  run(sessionId: string): Promise<RunResponse> {
    return this.request("POST", `/sessions/${sessionId}/run`);
  }

  getPlan(sessionId: string): Promise<PlanDoc> {
    return this.request("GET", `/sessions/${sessionId}/plan`);
  }

  getMatrix(sessionId: string, period = 15): Promise<MatrixDoc> {
    return this.request("GET", `/sessions/${sessionId}/matrix?period=${period}`);
  }

  getLogistics(sessionId: string, unitId: string, period = 15): Promise<LogisticsResponse> {
    return this.request(
      "GET",
      `/sessions/${sessionId}/logistics/${unitId}?period=${period}`,
    );
  }

  getScenario(sessionId: string): Promise<ScenarioSummary> {
    return this.request("GET", `/sessions/${sessionId}/scenario`);
  }

  editActivity(
    sessionId: string,
    activityId: string,
    edit: EditRequest,
  ): Promise<EditResponse> {
    return this.request("PATCH", `/sessions/${sessionId}/activities/${activityId}`, edit);
  }
}
