// Typed client for the session API. The client never computes allocations;
// every number shown comes from, and goes back to, the server verbatim.

export type SessionKind = "cake" | "rent";

export interface Snapshot {
  id: string;
  kind: SessionKind;
  players: number;
  participants: string[];
  status: "active" | "completed" | "failed";
  error: string | null;
  resolution: number | null;
  pending_queries: number;
  answered: number;
}

export interface CakePiece {
  index: number;
  start: number;
  end: number;
}

export interface RoomCard {
  index: number;
  rent: number;
  free: boolean;
}

export interface PendingQuery {
  query_id: string;
  player: number;
  participant: string;
  rendering: { pieces?: CakePiece[]; cuts?: number[]; rooms?: RoomCard[] };
}

export interface SessionResult {
  kind: SessionKind;
  x: number[];
  permutation: number[];
  cell_diameter: number;
  resolution: number;
  cuts?: number[];
  pieces?: [number, number][];
  rents?: number[];
  total_rent?: number;
}

export interface AnswerAck {
  query_id: string;
  accepted: boolean;
  duplicate: boolean;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`${status}: ${detail}`);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(path, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      // keep statusText
    }
    throw new ApiError(res.status, detail);
  }
  return res.json() as Promise<T>;
}

export function createSession(
  kind: SessionKind,
  players: number,
  opts: { tolerance?: number; total_rent?: number; participants?: string[] } = {},
): Promise<Snapshot> {
  return request("/api/v1/sessions", {
    method: "POST",
    body: JSON.stringify({ kind, players, ...opts }),
  });
}

export function getSession(id: string): Promise<Snapshot> {
  return request(`/api/v1/sessions/${id}`);
}

export function getQueries(id: string): Promise<{ queries: PendingQuery[] }> {
  return request(`/api/v1/sessions/${id}/queries`);
}

export function postAnswer(id: string, queryId: string, labels: number[]): Promise<AnswerAck> {
  return request(`/api/v1/sessions/${id}/answers`, {
    method: "POST",
    body: JSON.stringify({ query_id: queryId, labels }),
  });
}

export function getResult(id: string): Promise<SessionResult> {
  return request(`/api/v1/sessions/${id}/result`);
}
