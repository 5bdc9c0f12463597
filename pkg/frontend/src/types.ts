// Wire types for the game service.  These mirror the JSON the service emits
// verbatim; the client renders them and never re-derives game logic locally.

export const NO_ANSWER = "no_answer";

export interface ItemView {
  id: number;
  subject: string;
  attributes: Record<string, string>;
  caption?: string;
  image_ref?: string;
}

export interface TurnEntry {
  turn: number;
  question_id: number;
  question_text: string;
  response: string;
}

export interface CurrentQuestion {
  id: number;
  text: string;
  turn: number;
}

export interface GuessView {
  item_index: number;
  item_id: number;
  correct: boolean;
}

export interface SessionView {
  game_id: string;
  status: "active" | "finished";
  setting: string;
  k: number;
  policy: string;
  variant: string;
  mode: string;
  turn: number;
  max_turns: number;
  items: ItemView[];
  target_index: number;
  turn_log: TurnEntry[];
  belief: number[] | null;
  current_question: CurrentQuestion | null;
  allowed_responses: string[];
  no_answer_allowed: boolean;
  guess: GuessView | null;
  termination: string | null;
}

export interface GameSummary {
  game_id: string;
  status: string;
  setting: string;
  k: number;
  policy: string;
  variant: string;
  turn: number;
}

export interface GameListPage {
  games: GameSummary[];
  total: number;
  offset: number;
}

export interface HealthInfo {
  status: string;
  version: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: Record<string, unknown>;
}

// finished-game record; only the fields the UI compares against the banner
export interface GameRecordView {
  schema_version: number;
  guess: number;
  correct: boolean;
  turns: unknown[];
  [key: string]: unknown;
}

export interface CreateGameParams {
  setting?: string;
  k?: number;
  policy?: string;
  presupp?: string;
  double_update?: boolean;
  allow_no_answer?: boolean | null;
  gamma?: number;
  max_turns?: number;
  seed?: number;
  noise?: number;
  hallucination_confidence?: number;
  trap_fraction?: number;
  enforce_vocab?: boolean;
  mode?: string;
}
