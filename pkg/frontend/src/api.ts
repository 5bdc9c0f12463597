// Thin fetch client for the game service.  Every non-2xx response carries a
// {code, message, details} body; that shape is surfaced as ApiError so the
// UI can render it inline.  Transport failures become NetworkError, which the
// UI treats as retryable.

import type {
  ApiErrorBody,
  CreateGameParams,
  GameListPage,
  GameRecordView,
  HealthInfo,
  SessionView,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  code: string;
  details: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.code = body.code;
    this.details = body.details ?? {};
  }

  allowedResponses(): string[] {
    const allowed = this.details["allowed_responses"];
    return Array.isArray(allowed) ? allowed.map(String) : [];
  }
}

export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export type FetchFn = (url: string, init?: RequestInit) => Promise<Response>;

export interface GameApi {
  health(): Promise<HealthInfo>;
  createGame(params: CreateGameParams): Promise<SessionView>;
  getGame(gameId: string): Promise<SessionView>;
  listGames(offset?: number, limit?: number): Promise<GameListPage>;
  submitAnswer(gameId: string, response: string, turn: number): Promise<SessionView>;
  getRecord(gameId: string): Promise<GameRecordView>;
}

export class ApiClient implements GameApi {
  readonly baseUrl: string;
  private fetchFn: FetchFn;

  constructor(baseUrl: string, fetchFn?: FetchFn) {
    // normalize: no trailing slash so path joins stay predictable
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new NetworkError(`service unreachable at ${this.baseUrl}: ${String(err)}`);
    }
    let payload: unknown = null;
    try {
      payload = await resp.json();
    } catch {
      // non-JSON body on an error status still needs a usable error
      if (!resp.ok) {
        throw new ApiError(resp.status, {
          code: "internal_error",
          message: `service returned status ${resp.status}`,
          details: {},
        });
      }
      throw new NetworkError("service returned a non-JSON body");
    }
    if (!resp.ok) {
      throw new ApiError(resp.status, payload as ApiErrorBody);
    }
    return payload as T;
  }

  health(): Promise<HealthInfo> {
    return this.request<HealthInfo>("GET", "/api/health");
  }

  createGame(params: CreateGameParams): Promise<SessionView> {
    return this.request<SessionView>("POST", "/api/games", params);
  }

  getGame(gameId: string): Promise<SessionView> {
    return this.request<SessionView>("GET", `/api/games/${encodeURIComponent(gameId)}`);
  }

  listGames(offset = 0, limit = 50): Promise<GameListPage> {
    return this.request<GameListPage>("GET", `/api/games?offset=${offset}&limit=${limit}`);
  }

  submitAnswer(gameId: string, response: string, turn: number): Promise<SessionView> {
    return this.request<SessionView>(
      "POST",
      `/api/games/${encodeURIComponent(gameId)}/answers`,
      { response, turn },
    );
  }

  getRecord(gameId: string): Promise<GameRecordView> {
    return this.request<GameRecordView>("GET", `/api/games/${encodeURIComponent(gameId)}/record`);
  }
}
