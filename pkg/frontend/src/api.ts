// Typed client for the fairdiv session service. Every piece of UI state is
// traceable to one of these responses; the client never invents fields.

export interface PendingQuery {
  status: "pending";
  session: string;
  agent: number;
  x: number[];
  y: number[];
  x_labels: string[];
  y_labels: string[];
  answered: number;
}

export interface FinishedSession {
  status: "finished";
  session: string;
  allocation: { bundles: Record<string, number[]>; pool: number[] };
  total_queries: number;
}

export type SessionState = PendingQuery | FinishedSession;

export interface SessionReport {
  session: string;
  algorithm: string;
  allocation: { bundles: Record<string, number[]>; pool: number[] };
  allocation_labels: Record<string, string[]>;
  query_counts: Record<string, number>;
  total_queries: number;
  transcript: string[];
}

export interface CreateSessionRequest {
  algorithm: string;
  n: number;
  item_labels: string[];
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const detail =
      typeof body?.detail === "string" ? body.detail : JSON.stringify(body?.detail ?? response.statusText);
    throw new ApiError(response.status, detail);
  }
  return body as T;
}

export class SessionApi {
  constructor(private baseUrl: string = "", private fetchFn: typeof fetch = fetch) {}

  createSession(request: CreateSessionRequest): Promise<SessionState> {
    return this.fetchFn(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(request),
    }).then((r) => asJson<SessionState>(r));
  }

  getQuery(sessionId: string): Promise<SessionState> {
    return this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/query`).then((r) =>
      asJson<SessionState>(r),
    );
  }

  answer(sessionId: string, choice: "x" | "y"): Promise<SessionState> {
    return this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ choice }),
    }).then((r) => asJson<SessionState>(r));
  }

  getReport(sessionId: string): Promise<SessionReport> {
    return this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/report`).then((r) =>
      asJson<SessionReport>(r),
    );
  }
}
