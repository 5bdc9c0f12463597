// Hand-written SessionView fixtures matching the service wire format.

import type { SessionView } from "../src/types.js";

export function openView(overrides: Partial<SessionView> = {}): SessionView {
  return {
    game_id: "abc123def456",
    status: "active",
    setting: "easy",
    k: 3,
    policy: "open",
    variant: "open-presupp",
    mode: "eval",
    turn: 1,
    max_turns: 20,
    items: [
      { id: 4, subject: "cake", attributes: { color: "pink", size: "small" } },
      { id: 9, subject: "mug", attributes: { color: "blue", size: "small" } },
      { id: 2, subject: "scarf", attributes: { color: "red", size: "large" } },
    ],
    target_index: 1,
    turn_log: [
      { turn: 1, question_id: 0, question_text: "What is the subject of the image?", response: "mug" },
    ],
    belief: null,
    current_question: { id: 1, text: "What color is the subject?", turn: 2 },
    allowed_responses: ["blue", "pink", "red", "no_answer"],
    no_answer_allowed: true,
    guess: null,
    termination: null,
    ...overrides,
  };
}

export function polarView(overrides: Partial<SessionView> = {}): SessionView {
  return openView({
    policy: "polar",
    variant: "polar",
    turn: 0,
    turn_log: [],
    current_question: { id: 3, text: "Is the subject a mug?", turn: 1 },
    allowed_responses: ["yes", "no"],
    no_answer_allowed: false,
    ...overrides,
  });
}

export function finishedView(overrides: Partial<SessionView> = {}): SessionView {
  return openView({
    status: "finished",
    turn: 3,
    current_question: null,
    allowed_responses: [],
    no_answer_allowed: false,
    guess: { item_index: 1, item_id: 9, correct: true },
    termination: "threshold",
    ...overrides,
  });
}
