// Screen state is a pure function of the latest service view plus two local
// flags (request in flight, last error).  Rendering reads only this derived
// state, which keeps it snapshot-testable and keeps game logic on the server.

import { NO_ANSWER, type SessionView } from "./types.js";

export interface UiError {
  kind: "api" | "network";
  code: string | null;
  message: string;
  // tokens echoed back by an invalid_response rejection, shown inline
  allowed: string[];
  retryable: boolean;
}

export interface Flags {
  inflight: boolean;
  error: UiError | null;
}

export const initialFlags: Flags = { inflight: false, error: null };

export interface CardState {
  index: number;
  id: number;
  subject: string;
  chips: string[]; // "key: value" lines, used when there is no image
  imageRef: string | null;
  caption: string | null;
  isTarget: boolean;
  belief: number | null; // posterior mass when the service exposes it
}

export interface QuestionState {
  id: number;
  text: string;
  turn: number;
}

export interface EndBanner {
  guessIndex: number;
  guessItemId: number;
  guessSubject: string;
  correct: boolean;
  turns: number;
  termination: string;
}

export interface LogLine {
  turn: number;
  text: string;
  response: string;
}

export interface GameScreenState {
  phase: "setup" | "playing" | "finished";
  gameId: string | null;
  setting: string | null;
  variant: string | null;
  turnCounter: string;
  cards: CardState[];
  question: QuestionState | null;
  // vocabulary suggestions for the answer input; never contains the
  // no-answer token, which gets its own button
  suggestions: string[];
  polar: boolean;
  noAnswerVisible: boolean;
  canSubmit: boolean;
  turnLog: LogLine[];
  endBanner: EndBanner | null;
  busy: boolean;
  error: UiError | null;
}

export function apiUiError(code: string, message: string, allowed: string[] = []): UiError {
  return { kind: "api", code, message, allowed, retryable: false };
}

export function networkUiError(message: string): UiError {
  return { kind: "network", code: null, message, allowed: [], retryable: true };
}

function cardStates(view: SessionView): CardState[] {
  return view.items.map((item, index) => ({
    index,
    id: item.id,
    subject: item.subject,
    chips: Object.entries(item.attributes).map(([key, value]) => `${key}: ${value}`),
    imageRef: item.image_ref ?? null,
    caption: item.caption ?? null,
    isTarget: index === view.target_index,
    belief: view.belief === null ? null : view.belief[index],
  }));
}

export function deriveScreen(view: SessionView | null, flags: Flags): GameScreenState {
  if (view === null) {
    return {
      phase: "setup",
      gameId: null,
      setting: null,
      variant: null,
      turnCounter: "",
      cards: [],
      question: null,
      suggestions: [],
      polar: false,
      noAnswerVisible: false,
      canSubmit: false,
      turnLog: [],
      endBanner: null,
      busy: flags.inflight,
      error: flags.error,
    };
  }

  const finished = view.status === "finished";
  const polar = view.policy === "polar";
  const question = view.current_question;
  let endBanner: EndBanner | null = null;
  if (finished && view.guess !== null) {
    endBanner = {
      guessIndex: view.guess.item_index,
      guessItemId: view.guess.item_id,
      guessSubject: view.items[view.guess.item_index].subject,
      correct: view.guess.correct,
      turns: view.turn,
      termination: view.termination ?? "",
    };
  }
  return {
    phase: finished ? "finished" : "playing",
    gameId: view.game_id,
    setting: view.setting,
    variant: view.variant,
    turnCounter: finished
      ? `${view.turn} turn${view.turn === 1 ? "" : "s"} played`
      : `turn ${question ? question.turn : view.turn + 1} of ${view.max_turns}`,
    cards: cardStates(view),
    question: question ? { id: question.id, text: question.text, turn: question.turn } : null,
    suggestions: view.allowed_responses.filter((token) => token !== NO_ANSWER),
    polar,
    noAnswerVisible: !finished && !polar && view.no_answer_allowed,
    canSubmit: !finished && question !== null && !flags.inflight,
    turnLog: view.turn_log.map((entry) => ({
      turn: entry.turn,
      text: entry.question_text,
      response: entry.response,
    })),
    endBanner,
    busy: flags.inflight,
    error: flags.error,
  };
}
