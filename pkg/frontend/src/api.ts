/**
 * Typed client for the hedges HTTP service.  The fetch implementation is
 * injected so tests can replay recorded traffic.
 */

export interface FetchResponse {
  status: number;
  json(): Promise<any>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string }
) => Promise<FetchResponse>;

export interface EdgeInfo {
  id: string;
  edge: string;
  text: string;
}

export interface MatchInfo extends EdgeInfo {
  status: "pending" | "accepted" | "rejected";
}

export interface SessionState {
  id: string;
  criterion: string;
  candidate: string;
  candidate_text: string;
  assignments: Record<string, string>;
  patterns: string[];
  pattern: string;
  positives: string[];
  negatives: string[];
  matches: MatchInfo[];
  history: unknown[];
}

export interface PatternState {
  patterns: string[];
  pattern: string;
}

export interface CorefSetInfo {
  members: string[];
  texts: string[];
  total_degree: number;
  p: number;
  label: string;
}

export interface CorefReport {
  seed: string;
  sets: CorefSetInfo[];
  assigned: string | null;
  p: number;
  ratio: number;
}

export interface MinedPattern {
  pattern: string;
  count: number;
}

export class ServiceError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

export class ServiceClient {
  constructor(private baseUrl: string, private fetchFn: FetchLike) {}

  private async request(method: string, path: string, body?: unknown) {
    const init: { method: string; headers?: Record<string, string>; body?: string } = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const payload = await resp.json();
    if (resp.status >= 400) {
      throw new ServiceError(resp.status, payload?.detail ?? `HTTP ${resp.status}`);
    }
    return payload;
  }

  createSession(criterion: string): Promise<SessionState> {
    return this.request("POST", "/sessions", { criterion, seed: null });
  }

  getSession(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  assign(id: string, variable: string, subedge: string): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/assign`, { variable, subedge });
  }

  feedback(id: string, edge: string, verdict: "accept" | "reject"): Promise<SessionState> {
    return this.request("POST", `/sessions/${id}/feedback`, { edge, verdict });
  }

  getPattern(id: string): Promise<PatternState> {
    return this.request("GET", `/sessions/${id}/pattern`);
  }

  minedPatterns(): Promise<{ patterns: MinedPattern[] }> {
    return this.request("GET", "/patterns/mined");
  }

  coref(seed: string): Promise<CorefReport> {
    return this.request("GET", `/coref/${seed}`);
  }

  edges(query?: string): Promise<{ edges: EdgeInfo[] }> {
    const suffix = query ? `?query=${encodeURIComponent(query)}` : "";
    return this.request("GET", `/edges${suffix}`);
  }
}
