// DOM rendering.  buildShell() creates the static chrome once (header with
// the base-url setting, the new-game form, empty containers); renderGame()
// re-renders the game area from a GameScreenState.  No game logic lives here:
// everything shown comes from the derived screen state.

import type { CardState, GameScreenState } from "./state.js";
import type { CreateGameParams } from "./types.js";

export interface Handlers {
  onNewGame(params: CreateGameParams): void;
  onSubmitToken(token: string): void;
  onNoAnswer(): void;
  onRetry(): void;
  onBaseUrlChange(url: string): void;
}

export interface Shell {
  root: HTMLElement;
  baseUrlInput: HTMLInputElement;
  form: HTMLFormElement;
  errorBanner: HTMLElement;
  game: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  if (text !== undefined) node.textContent = text;
  return node;
}

function option(value: string, label?: string): HTMLOptionElement {
  return el("option", { value }, label ?? value);
}

function labelled(text: string, control: HTMLElement): HTMLLabelElement {
  const wrap = el("label", { class: "field" });
  wrap.append(el("span", {}, text), control);
  return wrap;
}

export function buildShell(root: HTMLElement, baseUrl: string, handlers: Handlers): Shell {
  root.textContent = "";

  const header = el("header", { class: "topbar" });
  header.append(el("h1", {}, "pinpoint"));
  const baseUrlInput = el("input", { id: "base-url", type: "text", value: baseUrl });
  const applyBtn = el("button", { id: "apply-base-url", type: "button" }, "set service url");
  applyBtn.addEventListener("click", () => handlers.onBaseUrlChange(baseUrlInput.value.trim()));
  header.append(labelled("service", baseUrlInput), applyBtn);

  const form = el("form", { id: "setup-form" });
  const setting = el("select", { id: "setting", name: "setting" });
  setting.append(option("easy"), option("medium"), option("hard"));
  setting.value = "hard";
  const k = el("input", { id: "k", name: "k", type: "number", min: "1", value: "10" });
  const policy = el("select", { id: "policy", name: "policy" });
  policy.append(option("open"), option("polar"));
  const presupp = el("select", { id: "presupp", name: "presupp" });
  presupp.append(option("both"), option("selection"), option("update"), option("none"));
  const seed = el("input", { id: "seed", name: "seed", type: "number", value: "0" });
  const mode = el("select", { id: "mode", name: "mode" });
  mode.append(option("eval"), option("demo"));
  const newGameBtn = el("button", { id: "new-game", type: "submit" }, "new game");
  form.append(
    labelled("setting", setting),
    labelled("items", k),
    labelled("questions", policy),
    labelled("presupposition", presupp),
    labelled("seed", seed),
    labelled("view", mode),
    newGameBtn,
  );
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    handlers.onNewGame(readSetupForm(form));
  });

  const errorBanner = el("div", { id: "error-banner", hidden: "" });
  const game = el("main", { id: "game" });
  root.append(header, form, errorBanner, game);
  return { root, baseUrlInput, form, errorBanner, game };
}

export function readSetupForm(form: HTMLFormElement): CreateGameParams {
  const value = (id: string) => (form.querySelector(`#${id}`) as HTMLInputElement | HTMLSelectElement).value;
  return {
    setting: value("setting"),
    k: parseInt(value("k"), 10),
    policy: value("policy"),
    presupp: value("presupp"),
    seed: parseInt(value("seed"), 10),
    mode: value("mode"),
  };
}

function renderCard(card: CardState): HTMLElement {
  const classes = ["card"];
  if (card.isTarget) classes.push("target");
  const node = el("article", { class: classes.join(" "), "data-index": String(card.index) });
  node.append(el("h3", {}, `#${card.id} ${card.subject}`));
  if (card.imageRef !== null) {
    // image render path: the reference replaces the attribute chips
    node.append(el("img", { src: card.imageRef, alt: card.caption ?? card.subject }));
  } else {
    const chips = el("ul", { class: "chips" });
    for (const chip of card.chips) chips.append(el("li", {}, chip));
    node.append(chips);
  }
  if (card.caption !== null) node.append(el("p", { class: "caption" }, card.caption));
  if (card.belief !== null) {
    node.append(el("p", { class: "belief" }, `p=${card.belief.toFixed(3)}`));
  }
  if (card.isTarget) node.append(el("p", { class: "target-tag" }, "target"));
  return node;
}

function renderAnswerControls(state: GameScreenState, game: HTMLElement, handlers: Handlers, keepDraft: string | null) {
  const controls = el("div", { id: "answer-controls" });
  if (state.polar) {
    for (const token of ["yes", "no"]) {
      const btn = el("button", { id: `btn-${token}`, type: "button", "data-token": token }, token);
      btn.disabled = !state.canSubmit;
      btn.addEventListener("click", () => handlers.onSubmitToken(token));
      controls.append(btn);
    }
  } else {
    const input = el("input", { id: "answer-input", type: "text", placeholder: "answer" });
    if (keepDraft !== null) input.value = keepDraft;
    const submit = el("button", { id: "submit-answer", type: "button" }, "answer");
    submit.disabled = !state.canSubmit;
    submit.addEventListener("click", () => {
      const token = input.value.trim();
      if (token) handlers.onSubmitToken(token);
    });
    input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter" && state.canSubmit) {
        const token = input.value.trim();
        if (token) handlers.onSubmitToken(token);
      }
    });
    const suggestions = el("div", { id: "suggestions" });
    for (const token of state.suggestions) {
      const chip = el("button", { class: "suggestion", type: "button", "data-token": token }, token);
      chip.disabled = !state.canSubmit;
      chip.addEventListener("click", () => {
        input.value = token;
      });
      suggestions.append(chip);
    }
    controls.append(input, submit, suggestions);
    if (state.noAnswerVisible) {
      const decline = el("button", { id: "no-answer", type: "button" }, "no answer applies");
      decline.disabled = !state.canSubmit;
      decline.addEventListener("click", () => handlers.onNoAnswer());
      controls.append(decline);
    }
  }
  game.append(controls);
}

export function renderGame(shell: Shell, state: GameScreenState, handlers: Handlers) {
  // keep the typed draft across re-renders of the same pending question
  const previousInput = shell.game.querySelector("#answer-input") as HTMLInputElement | null;
  const previousTurn = shell.game.querySelector("#question-banner")?.getAttribute("data-turn");
  const sameTurn = state.question !== null && previousTurn === String(state.question.turn);
  const keepDraft = sameTurn && previousInput !== null ? previousInput.value : null;

  // retryable banner for transport failures; api errors render inline below
  if (state.error !== null && state.error.kind === "network") {
    shell.errorBanner.hidden = false;
    shell.errorBanner.textContent = "";
    shell.errorBanner.append(el("span", {}, state.error.message));
    const retry = el("button", { id: "retry", type: "button" }, "retry");
    retry.addEventListener("click", () => handlers.onRetry());
    shell.errorBanner.append(retry);
  } else {
    shell.errorBanner.hidden = true;
    shell.errorBanner.textContent = "";
  }

  shell.game.textContent = "";
  if (state.phase === "setup") {
    shell.game.append(el("p", { id: "idle-hint" }, "configure a game and press new game"));
    return;
  }

  const status = el("div", { id: "status-line" });
  status.append(
    el("span", { id: "turn-counter" }, state.turnCounter),
    el("span", { id: "game-meta" }, `${state.setting} / ${state.variant} / game ${state.gameId}`),
  );
  shell.game.append(status);

  if (state.endBanner !== null) {
    const banner = el("div", {
      id: "end-banner",
      class: state.endBanner.correct ? "correct" : "wrong",
      "data-item-id": String(state.endBanner.guessItemId),
      "data-item-index": String(state.endBanner.guessIndex),
      "data-correct": String(state.endBanner.correct),
      "data-termination": state.endBanner.termination,
    });
    banner.append(
      el(
        "strong",
        {},
        `guessed #${state.endBanner.guessItemId} ${state.endBanner.guessSubject}: ` +
          (state.endBanner.correct ? "correct" : "wrong"),
      ),
      el("span", {}, ` after ${state.endBanner.turns} turn${state.endBanner.turns === 1 ? "" : "s"} (${state.endBanner.termination})`),
    );
    shell.game.append(banner);
  }

  if (state.question !== null) {
    shell.game.append(
      el(
        "div",
        { id: "question-banner", "data-question-id": String(state.question.id), "data-turn": String(state.question.turn) },
        state.question.text,
      ),
    );
  }

  if (state.error !== null && state.error.kind === "api") {
    const inline = el("div", { id: "error-inline", "data-code": state.error.code ?? "" });
    inline.append(el("span", {}, state.error.message));
    if (state.error.allowed.length > 0) {
      inline.append(el("span", { class: "allowed" }, ` allowed: ${state.error.allowed.join(", ")}`));
    }
    shell.game.append(inline);
  }

  if (state.phase === "playing" && state.question !== null) {
    renderAnswerControls(state, shell.game, handlers, keepDraft);
  }

  const grid = el("section", { id: "item-grid" });
  for (const card of state.cards) grid.append(renderCard(card));
  shell.game.append(grid);

  const log = el("ol", { id: "turn-log" });
  for (const line of state.turnLog) {
    log.append(el("li", { "data-turn": String(line.turn) }, `${line.turn}. ${line.text} -> ${line.response}`));
  }
  shell.game.append(log);
}
