"""Game engine: the select / ask / update / terminate loop.

One GameLoop core drives both self-play (responses from a simulator) and
human-played games (responses submitted through the service), so the two
paths produce identical records for identical response sequences.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .answers import NO, YES, AnswerDistribution, OracleConfig, SyntheticOracle
from .belief import BeliefState, init_belief, update_null, update_standard
from .errors import ConfigurationError, ContractError, PoolExhausted, ValidationError
from .presupposition import NO_ANSWER, adjusted_response_distribution, relevance
from .questions import OPEN, POLAR, PolarCheck, Question, QuestionPool, decompose_to_polar
from .selection import SelectionMode, score_question, select_question
from .world import Item, ItemSet, World

POLICY_OPEN = "open"
POLICY_POLAR = "polar"

TERMINATION_THRESHOLD = "threshold"
TERMINATION_TURN_CAP = "turn_cap"
TERMINATION_POOL_EXHAUSTED = "pool_exhausted"

RECORD_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class GameConfig:
    gamma: float = 0.8
    max_turns: int = 20
    policy: str = POLICY_OPEN
    presupp_in_selection: bool = False
    presupp_in_update: bool = False
    allow_no_answer: bool = False
    double_update: bool = False
    epsilon_floor: float = 1e-6
    top_m: int = 10
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigurationError("gamma must lie in (0, 1]")
        if self.max_turns < 1:
            raise ConfigurationError("max_turns must be >= 1")
        if self.policy not in (POLICY_OPEN, POLICY_POLAR):
            raise ConfigurationError(f"unknown policy '{self.policy}'")
        if self.allow_no_answer and self.policy != POLICY_OPEN:
            raise ConfigurationError("allow_no_answer requires the open policy")
        if self.epsilon_floor < 0.0:
            raise ConfigurationError("epsilon_floor must be >= 0")

    def selection_mode(self) -> SelectionMode:
        return SelectionMode(
            presupp_in_selection=self.presupp_in_selection,
            top_m=self.top_m,
        )


@dataclass(frozen=True)
class GuesserModels:
    """The guesser's internal simulators: response_model predicts answers,
    polar_model predicts yes/no existence checks for relevance.
    """

    response_model: object
    polar_model: object

    @classmethod
    def synthetic(cls, world: World, response_config: OracleConfig, polar_config: OracleConfig | None = None):
        oracle = SyntheticOracle(world, response_config)
        if polar_config is None or polar_config == response_config:
            return cls(response_model=oracle, polar_model=oracle)
        return cls(response_model=oracle, polar_model=SyntheticOracle(world, polar_config))


@dataclass(frozen=True)
class TurnRecord:
    turn: int
    question_id: int
    question_text: str
    response: str
    belief_after: tuple[float, ...]
    score_of_selected: float

    def to_dict(self) -> dict:
        return {
            "turn": self.turn,
            "question_id": self.question_id,
            "question_text": self.question_text,
            "response": self.response,
            "belief_after": list(self.belief_after),
            "score_of_selected": self.score_of_selected,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TurnRecord":
        return cls(
            turn=d["turn"],
            question_id=d["question_id"],
            question_text=d["question_text"],
            response=d["response"],
            belief_after=tuple(d["belief_after"]),
            score_of_selected=d["score_of_selected"],
        )


@dataclass(frozen=True)
class GameRecord:
    """Self-contained trace of one game: embeds the items, vocabulary, pool,
    and model descriptors so replay needs nothing external.
    """

    config: GameConfig
    setting: str | None
    vocab: dict[str, list[str]]
    subjects: list[str]
    items: tuple[Item, ...]
    target_index: int
    pool: tuple[Question, ...]
    models: dict
    turns: tuple[TurnRecord, ...]
    guess: int  # item id
    correct: bool
    termination: str

    def __post_init__(self):
        if len(self.turns) > self.config.max_turns:
            raise ContractError("turn count exceeds max_turns")
        if self.guess not in {item.id for item in self.items}:
            raise ContractError("guess must be one of the item ids")

    @property
    def item_ids(self) -> list[int]:
        return [item.id for item in self.items]

    @property
    def target_id(self) -> int:
        return self.items[self.target_index].id

    @property
    def n_turns(self) -> int:
        return len(self.turns)

    def to_dict(self) -> dict:
        return {
            "schema_version": RECORD_SCHEMA_VERSION,
            "config": asdict(self.config),
            "setting": self.setting,
            "vocab": self.vocab,
            "subjects": self.subjects,
            "items": [item.to_dict() for item in self.items],
            "target_index": self.target_index,
            "pool": [q.to_dict() for q in self.pool],
            "models": self.models,
            "turns": [t.to_dict() for t in self.turns],
            "guess": self.guess,
            "correct": self.correct,
            "termination": self.termination,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GameRecord":
        version = d.get("schema_version")
        if version != RECORD_SCHEMA_VERSION:
            raise ContractError(f"unsupported record schema version {version!r}")
        return cls(
            config=GameConfig(**d["config"]),
            setting=d.get("setting"),
            vocab={k: list(v) for k, v in d["vocab"].items()},
            subjects=list(d["subjects"]),
            items=tuple(Item.from_dict(x) for x in d["items"]),
            target_index=d["target_index"],
            pool=tuple(Question.from_dict(x) for x in d["pool"]),
            models=d["models"],
            turns=tuple(TurnRecord.from_dict(x) for x in d["turns"]),
            guess=d["guess"],
            correct=d["correct"],
            termination=d["termination"],
        )


def synthetic_model_descriptor(response_config: OracleConfig, polar_config: OracleConfig,
                               responder_config: OracleConfig | None) -> dict:
    d = {
        "guesser_response": {"kind": "synthetic", **asdict(response_config)},
        "guesser_polar": {"kind": "synthetic", **asdict(polar_config)},
    }
    if responder_config is not None:
        d["responder"] = {"kind": "synthetic", **asdict(responder_config)}
    return d


def should_terminate(belief: BeliefState, turn: int, config: GameConfig) -> int | None:
    """Item index to guess, or None to continue.  Guess when confidence
    strictly exceeds gamma or the turn cap is reached; argmax ties resolve
    to the lowest index.
    """
    if float(belief.probs.max()) > config.gamma or turn >= config.max_turns:
        return belief.argmax()
    return None


def _argmax_token(dist: AnswerDistribution) -> str:
    best = 0
    for i in range(1, len(dist.probs)):
        if dist.probs[i] > dist.probs[best]:
            best = i
    return dist.support[best]


def simulate_responder(q: Question, target: Item, sim_model, allow_no_answer: bool) -> str:
    """The responder sees only the target.  For open questions with
    no-answer allowed, it runs the existence checks first: when at least
    half come back "no", it declines to answer.
    """
    if q.kind == POLAR:
        return _argmax_token(sim_model.polar_distribution(PolarCheck(text=q.text, np=q.probe), target))
    if allow_no_answer:
        checks = decompose_to_polar(q)
        if checks:
            noes = sum(
                1 for c in checks
                if _argmax_token(sim_model.polar_distribution(c, target)) == NO
            )
            if noes >= math.ceil(len(checks) / 2):
                return NO_ANSWER
    return _argmax_token(sim_model.answer_distribution(q, target))


class _DistCache:
    """Per-game cache of answer distributions, keyed by question id.

    Raw and relevance-adjusted variants are cached separately so the
    selection and update paths can mix modes (the ablation axes).
    """

    def __init__(self, items: ItemSet, guesser: GuesserModels):
        self.items = items.items
        self.guesser = guesser
        self._raw: dict[int, list[AnswerDistribution]] = {}
        self._adjusted: dict[int, list[AnswerDistribution]] = {}
        self._irrelevance: dict[int, np.ndarray] = {}
        self._polar: dict[int, list[AnswerDistribution]] = {}

    def polar(self, q: Question) -> list[AnswerDistribution]:
        if q.id not in self._polar:
            check = PolarCheck(text=q.text, np=q.probe)
            self._polar[q.id] = [
                self.guesser.polar_model.polar_distribution(check, item) for item in self.items
            ]
        return self._polar[q.id]

    def raw(self, q: Question) -> list[AnswerDistribution]:
        if q.id not in self._raw:
            self._raw[q.id] = [
                self.guesser.response_model.answer_distribution(q, item) for item in self.items
            ]
        return self._raw[q.id]

    def adjusted(self, q: Question) -> list[AnswerDistribution]:
        if q.id not in self._adjusted:
            self._adjusted[q.id] = [
                adjusted_response_distribution(
                    q, item, self.guesser.response_model, self.guesser.polar_model, include_null=True
                )
                for item in self.items
            ]
        return self._adjusted[q.id]

    def irrelevance_vector(self, q: Question) -> np.ndarray:
        if q.id not in self._irrelevance:
            self._irrelevance[q.id] = np.array(
                [relevance(q, item, self.guesser.polar_model).irrelevance for item in self.items],
                dtype=np.float64,
            )
        return self._irrelevance[q.id]

    def for_scoring(self, q: Question, mode: SelectionMode) -> list[AnswerDistribution]:
        if q.kind == POLAR:
            return self.polar(q)
        return self.adjusted(q) if mode.presupp_in_selection else self.raw(q)

    def update_likelihoods(self, q: Question, r: str, presupp_in_update: bool) -> np.ndarray:
        if q.kind == POLAR:
            dists = self.polar(q)
        elif presupp_in_update:
            dists = self.adjusted(q)
        else:
            dists = self.raw(q)
        return np.array([d.prob(r) for d in dists], dtype=np.float64)


@dataclass
class PendingQuestion:
    question_id: int
    text: str
    score: float
    allowed_responses: list[str]
    no_answer_allowed: bool


class GameLoop:
    """Sequential game state.  Construct, then feed responses until finished."""

    def __init__(
        self,
        config: GameConfig,
        items: ItemSet,
        pool: QuestionPool,
        guesser: GuesserModels,
        models_descriptor: dict | None = None,
        setting: str | None = None,
        vocab: dict[str, list[str]] | None = None,
        subjects: list[str] | None = None,
        enforce_vocab: bool = True,
    ):
        if len(pool) == 0:
            raise ContractError("question pool must be non-empty")
        for q in pool:
            if (q.kind == POLAR) != (config.policy == POLICY_POLAR):
                raise ConfigurationError(
                    f"question {q.id} kind '{q.kind}' does not match policy '{config.policy}'"
                )
        self.config = config
        self.items = items
        self.pool = pool
        self.guesser = guesser
        self.setting = setting
        self.vocab = vocab or {}
        self.subjects = subjects or []
        self.enforce_vocab = enforce_vocab
        self.models_descriptor = models_descriptor or {}
        self.mode = config.selection_mode()
        self.cache = _DistCache(items, guesser)
        self.belief = init_belief(items.k)
        self.asked: set[int] = set()
        self.turns: list[TurnRecord] = []
        self.finished = False
        self.termination: str | None = None
        self.guess_index: int | None = None
        self.current: PendingQuestion | None = None
        self._advance()

    # -- selection / termination ------------------------------------------

    def _advance(self):
        guess = should_terminate(self.belief, len(self.turns), self.config)
        if guess is not None:
            self._finish(guess, self._termination_label())
            return
        dists_by_qid = {
            q.id: self.cache.for_scoring(q, self.mode)
            for q in self.pool
            if q.id not in self.asked
        }
        try:
            qid = select_question(
                self.pool, self.belief, self.items.items,
                self.guesser.response_model, self.guesser.polar_model,
                self.mode, self.asked, dists_by_qid=dists_by_qid,
            )
        except PoolExhausted:
            self._finish(self.belief.argmax(), TERMINATION_POOL_EXHAUSTED)
            return
        q = self.pool.by_id[qid]
        result = score_question(
            q, self.belief, self.items.items,
            self.guesser.response_model, self.guesser.polar_model,
            self.mode, dists=dists_by_qid[qid],
        )
        self.current = PendingQuestion(
            question_id=qid,
            text=q.text,
            score=result.score,
            allowed_responses=self._allowed_responses(q),
            no_answer_allowed=self.config.allow_no_answer and q.kind == OPEN,
        )

    def _termination_label(self) -> str:
        # at the turn cap, confidence may still exceed gamma; threshold wins
        if float(self.belief.probs.max()) > self.config.gamma:
            return TERMINATION_THRESHOLD
        return TERMINATION_TURN_CAP

    def _allowed_responses(self, q: Question) -> list[str]:
        if q.kind == POLAR:
            return [YES, NO]
        tokens = list(self.vocab.get(q.probe, []))
        if self.config.allow_no_answer:
            tokens.append(NO_ANSWER)
        return tokens

    def _finish(self, guess_index: int, termination: str):
        self.finished = True
        self.current = None
        self.guess_index = guess_index
        self.termination = termination

    # -- responses ---------------------------------------------------------

    def submit_response(self, r: str, validate: bool = False):
        if self.finished or self.current is None:
            raise ContractError("game already finished")
        q = self.pool.by_id[self.current.question_id]
        if validate:
            self._validate_response(q, r)
        if r == NO_ANSWER:
            if self.config.presupp_in_update:
                likelihood = self.cache.irrelevance_vector(q)
            else:
                # no null model in this mode: neutral update, history still grows
                likelihood = np.ones(self.items.k, dtype=np.float64)
            self.belief = update_null(self.belief, q, likelihood, epsilon_floor=self.config.epsilon_floor)
        else:
            likelihood = self.cache.update_likelihoods(q, r, self.config.presupp_in_update)
            self.belief = update_standard(
                self.belief, q, r, likelihood,
                epsilon_floor=self.config.epsilon_floor,
                double_update=self.config.double_update,
            )
        self.turns.append(
            TurnRecord(
                turn=len(self.turns) + 1,
                question_id=q.id,
                question_text=q.text,
                response=r,
                belief_after=tuple(float(p) for p in self.belief.probs),
                score_of_selected=self.current.score,
            )
        )
        self.asked.add(q.id)
        self.current = None
        self._advance()

    def _validate_response(self, q: Question, r: str):
        if r == NO_ANSWER:
            if not (self.config.allow_no_answer and q.kind == OPEN):
                raise ValidationError(
                    "no-answer is not allowed in this game",
                    allowed=self._allowed_responses(q),
                )
            return
        allowed = self._allowed_responses(q)
        if q.kind == POLAR:
            if r not in (YES, NO):
                raise ValidationError(f"response '{r}' is not yes/no", allowed=allowed)
            return
        if self.enforce_vocab:
            vocab = self.vocab.get(q.probe, [])
            if r not in vocab:
                raise ValidationError(
                    f"response '{r}' is not in the answer vocabulary", allowed=allowed
                )
        elif not r.strip():
            raise ValidationError("response must be non-empty", allowed=allowed)

    # -- results -----------------------------------------------------------

    def record(self) -> GameRecord:
        if not self.finished or self.guess_index is None or self.termination is None:
            raise ContractError("game still in progress")
        guess_id = self.items.items[self.guess_index].id
        return GameRecord(
            config=self.config,
            setting=self.setting,
            vocab=self.vocab,
            subjects=self.subjects,
            items=self.items.items,
            target_index=self.items.target_index,
            pool=tuple(self.pool.questions),
            models=self.models_descriptor,
            turns=tuple(self.turns),
            guess=guess_id,
            correct=self.guess_index == self.items.target_index,
            termination=self.termination,
        )


def run_selfplay_game(
    config: GameConfig,
    items: ItemSet,
    pool: QuestionPool,
    guesser_models: GuesserModels,
    responder_model,
    setting: str | None = None,
    vocab: dict[str, list[str]] | None = None,
    subjects: list[str] | None = None,
    models_descriptor: dict | None = None,
) -> GameRecord:
    loop = GameLoop(
        config, items, pool, guesser_models,
        models_descriptor=models_descriptor, setting=setting,
        vocab=vocab, subjects=subjects,
    )
    target = items.target
    while not loop.finished:
        q = loop.pool.by_id[loop.current.question_id]
        r = simulate_responder(q, target, responder_model, config.allow_no_answer)
        loop.submit_response(r)
    return loop.record()


def run_human_game_step(loop: GameLoop, response: str) -> PendingQuestion | int:
    """Feed a human response through the shared loop.  Returns the next
    question, or the guessed item index when the game ends.
    """
    loop.submit_response(response, validate=True)
    if loop.finished:
        assert loop.guess_index is not None
        return loop.guess_index
    assert loop.current is not None
    return loop.current


# -- replay ----------------------------------------------------------------


def _models_from_descriptor(record: GameRecord, world: World) -> GuesserModels:
    def build(entry: dict) -> SyntheticOracle:
        if entry.get("kind") != "synthetic":
            raise ContractError("replay requires synthetic model descriptors")
        return SyntheticOracle(
            world,
            OracleConfig(
                noise=entry["noise"],
                hallucination_confidence=entry["hallucination_confidence"],
                seed=entry["seed"],
            ),
        )

    try:
        response_entry = record.models["guesser_response"]
        polar_entry = record.models["guesser_polar"]
    except KeyError as exc:
        raise ContractError(f"record lacks model descriptor {exc}") from exc
    return GuesserModels(response_model=build(response_entry), polar_model=build(polar_entry))


def replay_beliefs(record: GameRecord) -> list[np.ndarray]:
    """Recompute the belief trajectory from the recorded responses.
    Returns one posterior per recorded turn, in order.
    """
    world = World(items=record.items, vocab=record.vocab, subjects=record.subjects)
    items = ItemSet(items=record.items, target_index=record.target_index, setting=record.setting)
    pool = QuestionPool(list(record.pool))
    guesser = _models_from_descriptor(record, world)
    cache = _DistCache(items, guesser)
    belief = init_belief(items.k)
    out: list[np.ndarray] = []
    for turn in record.turns:
        q = pool.by_id[turn.question_id]
        if turn.response == NO_ANSWER:
            if record.config.presupp_in_update:
                likelihood = cache.irrelevance_vector(q)
            else:
                likelihood = np.ones(items.k, dtype=np.float64)
            belief = update_null(belief, q, likelihood, epsilon_floor=record.config.epsilon_floor)
        else:
            likelihood = cache.update_likelihoods(q, turn.response, record.config.presupp_in_update)
            belief = update_standard(
                belief, q, turn.response, likelihood,
                epsilon_floor=record.config.epsilon_floor,
                double_update=record.config.double_update,
            )
        out.append(belief.probs)
    return out


def save_records(records: list[GameRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_dict(), ensure_ascii=False) + "\n")


def load_records(path: str | Path) -> list[GameRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(GameRecord.from_dict(json.loads(line)))
    return records
