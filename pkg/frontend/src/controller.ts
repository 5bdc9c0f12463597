// Controller: owns the latest service view and the two local flags, runs the
// network calls, and re-renders after every state change.  One request at a
// time per game: while a call is in flight the submit controls are disabled
// and a second click is a no-op, so double-clicks cannot double-answer a turn.

import { ApiClient, ApiError, NetworkError, type GameApi } from "./api.js";
import { apiUiError, deriveScreen, initialFlags, networkUiError, type Flags, type GameScreenState } from "./state.js";
import { NO_ANSWER, type CreateGameParams, type SessionView } from "./types.js";
import { buildShell, renderGame, type Handlers, type Shell } from "./view.js";

export interface MountOptions {
  baseUrl: string;
  api?: GameApi; // injectable for tests
  onBaseUrlSaved?: (url: string) => void;
}

export class AppController {
  api: GameApi;
  view: SessionView | null = null;
  flags: Flags = { ...initialFlags };
  private shell: Shell;
  private pending: Promise<void> | null = null;
  private lastOp: (() => Promise<void>) | null = null;
  private onBaseUrlSaved: ((url: string) => void) | undefined;

  constructor(root: HTMLElement, options: MountOptions) {
    this.api = options.api ?? new ApiClient(options.baseUrl);
    this.onBaseUrlSaved = options.onBaseUrlSaved;
    const handlers: Handlers = {
      onNewGame: (params) => void this.newGame(params),
      onSubmitToken: (token) => void this.submitToken(token),
      onNoAnswer: () => void this.submitToken(NO_ANSWER),
      onRetry: () => void this.retry(),
      onBaseUrlChange: (url) => this.setBaseUrl(url),
    };
    this.shell = buildShell(root, options.baseUrl, handlers);
    this.render();
  }

  screen(): GameScreenState {
    return deriveScreen(this.view, this.flags);
  }

  render() {
    renderGame(this.shell, this.screen(), {
      onNewGame: (params) => void this.newGame(params),
      onSubmitToken: (token) => void this.submitToken(token),
      onNoAnswer: () => void this.submitToken(NO_ANSWER),
      onRetry: () => void this.retry(),
      onBaseUrlChange: (url) => this.setBaseUrl(url),
    });
  }

  setBaseUrl(url: string) {
    if (!url) return;
    this.api = new ApiClient(url);
    this.flags = { ...this.flags, error: null };
    if (this.onBaseUrlSaved) this.onBaseUrlSaved(url);
    this.render();
  }

  // serialize: returns false when another call is already in flight
  private begin(): boolean {
    if (this.flags.inflight) return false;
    this.flags = { inflight: true, error: this.flags.error };
    this.render();
    return true;
  }

  private finish(view: SessionView | null, error: Flags["error"]) {
    if (view !== null) this.view = view;
    this.flags = { inflight: false, error };
    this.render();
  }

  private async run(op: () => Promise<SessionView>, retryable: () => Promise<void>) {
    const task: Promise<void> = (async () => {
      try {
        const view = await op();
        this.lastOp = null;
        this.finish(view, null);
      } catch (err) {
        if (err instanceof NetworkError) {
          this.lastOp = retryable;
          this.finish(null, networkUiError(err.message));
        } else if (err instanceof ApiError) {
          // the service refused the request; local state is untouched
          this.lastOp = null;
          this.finish(null, apiUiError(err.code, err.message, err.allowedResponses()));
          if (err.code === "duplicate_turn" || err.code === "turn_out_of_order") {
            await this.resync();
          }
        } else {
          this.lastOp = null;
          this.finish(null, networkUiError(String(err)));
          throw err;
        }
      }
    })().finally(() => {
      if (this.pending === task) this.pending = null;
    });
    this.pending = task;
    await task;
  }

  async newGame(params: CreateGameParams): Promise<void> {
    if (!this.begin()) return;
    await this.run(
      () => this.api.createGame(params),
      () => this.newGame(params),
    );
  }

  async submitToken(token: string): Promise<void> {
    const view = this.view;
    if (view === null || view.current_question === null) return;
    if (!this.begin()) return;
    const turn = view.current_question.turn;
    await this.run(
      () => this.api.submitAnswer(view.game_id, token, turn),
      () => this.submitToken(token),
    );
  }

  async retry(): Promise<void> {
    const op = this.lastOp;
    this.lastOp = null;
    if (op) await op();
  }

  // after a turn-sequencing conflict the server state is ahead of ours;
  // fetch the game once to catch up (still no polling)
  private async resync(): Promise<void> {
    if (this.view === null) return;
    try {
      const fresh = await this.api.getGame(this.view.game_id);
      this.view = fresh;
      this.render();
    } catch {
      // keep the conflict error on screen; the next action will retry
    }
  }

  async settle(): Promise<void> {
    while (this.pending !== null) {
      await this.pending;
    }
  }
}

export function mountApp(root: HTMLElement, options: MountOptions): AppController {
  return new AppController(root, options);
}
