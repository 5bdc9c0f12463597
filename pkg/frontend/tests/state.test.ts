// The screen state must be a pure function of (view, flags): same inputs,
// same plain-object output, with the invariants the renderer relies on.

import { describe, expect, it } from "vitest";
import { apiUiError, deriveScreen, initialFlags, networkUiError } from "../src/state.js";
import { finishedView, openView, polarView } from "./fixtures.js";

describe("deriveScreen", () => {
  it("setup phase before any game exists", () => {
    const screen = deriveScreen(null, initialFlags);
    expect(screen.phase).toBe("setup");
    expect(screen.cards).toEqual([]);
    expect(screen.question).toBeNull();
    expect(screen.canSubmit).toBe(false);
    expect(screen.endBanner).toBeNull();
  });

  it("is deterministic for identical inputs", () => {
    const view = openView();
    const a = deriveScreen(view, initialFlags);
    const b = deriveScreen(view, initialFlags);
    expect(a).toEqual(b);
  });

  it("marks exactly one card as the target", () => {
    const screen = deriveScreen(openView(), initialFlags);
    const targets = screen.cards.filter((card) => card.isTarget);
    expect(targets.length).toBe(1);
    expect(targets[0].index).toBe(1);
  });

  it("builds attribute chips and keeps the image path empty without image_ref", () => {
    const screen = deriveScreen(openView(), initialFlags);
    expect(screen.cards[0].chips).toEqual(["color: pink", "size: small"]);
    expect(screen.cards[0].imageRef).toBeNull();
  });

  it("uses the image render path when image_ref is present", () => {
    const view = openView();
    view.items[2] = { ...view.items[2], image_ref: "img/scarf.png" };
    const screen = deriveScreen(view, initialFlags);
    expect(screen.cards[2].imageRef).toBe("img/scarf.png");
  });

  it("suggestions exclude the no-answer token, which has its own button", () => {
    const screen = deriveScreen(openView(), initialFlags);
    expect(screen.suggestions).toEqual(["blue", "pink", "red"]);
    expect(screen.noAnswerVisible).toBe(true);
  });

  it("polar games hide the no-answer button and expose yes/no only", () => {
    const screen = deriveScreen(polarView(), initialFlags);
    expect(screen.polar).toBe(true);
    expect(screen.noAnswerVisible).toBe(false);
    expect(screen.suggestions).toEqual(["yes", "no"]);
  });

  it("shows the pending turn in the counter while playing", () => {
    const screen = deriveScreen(openView(), initialFlags);
    expect(screen.turnCounter).toBe("turn 2 of 20");
  });

  it("in-flight flag disables submission without touching the rest", () => {
    const view = openView();
    const idle = deriveScreen(view, initialFlags);
    const busy = deriveScreen(view, { inflight: true, error: null });
    expect(idle.canSubmit).toBe(true);
    expect(busy.canSubmit).toBe(false);
    expect(busy.busy).toBe(true);
    expect(busy.cards).toEqual(idle.cards);
    expect(busy.question).toEqual(idle.question);
  });

  it("finished games produce an end banner matching the guess", () => {
    const screen = deriveScreen(finishedView(), initialFlags);
    expect(screen.phase).toBe("finished");
    expect(screen.endBanner).toEqual({
      guessIndex: 1,
      guessItemId: 9,
      guessSubject: "mug",
      correct: true,
      turns: 3,
      termination: "threshold",
    });
    expect(screen.canSubmit).toBe(false);
    expect(screen.turnCounter).toBe("3 turns played");
  });

  it("belief values land on the cards only when the service exposes them", () => {
    const hidden = deriveScreen(openView(), initialFlags);
    expect(hidden.cards.every((card) => card.belief === null)).toBe(true);
    const shown = deriveScreen(openView({ belief: [0.2, 0.5, 0.3], mode: "demo" }), initialFlags);
    expect(shown.cards.map((card) => card.belief)).toEqual([0.2, 0.5, 0.3]);
  });

  it("turn log lines mirror the service log", () => {
    const screen = deriveScreen(openView(), initialFlags);
    expect(screen.turnLog).toEqual([
      { turn: 1, text: "What is the subject of the image?", response: "mug" },
    ]);
  });

  it("errors pass through untouched and do not clear the game", () => {
    const err = apiUiError("invalid_response", "not in vocabulary", ["blue", "pink"]);
    const screen = deriveScreen(openView(), { inflight: false, error: err });
    expect(screen.error).toEqual(err);
    expect(screen.error!.retryable).toBe(false);
    expect(screen.cards.length).toBe(3);
    expect(screen.canSubmit).toBe(true);
  });

  it("network errors are marked retryable", () => {
    const err = networkUiError("service unreachable");
    const screen = deriveScreen(openView(), { inflight: false, error: err });
    expect(screen.error!.kind).toBe("network");
    expect(screen.error!.retryable).toBe(true);
  });
});
