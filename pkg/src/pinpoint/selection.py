"""Question scoring by expected information gain and argmin selection.

score(q) = E_{b(y)} E_{p(r|q,y)} [-ln P(y | q, r)] — the expected posterior
entropy after asking q, enumerated exactly over a finite response support.
Lower is better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernel
from .answers import AnswerDistribution
from .belief import BeliefState
from .errors import ContractError, PoolExhausted, ScoringError
from .presupposition import NO_ANSWER, adjusted_response_distribution
from .questions import POLAR, PolarCheck, Question, QuestionPool
from .world import Item

DEFAULT_TOP_M = 10


@dataclass(frozen=True)
class SelectionMode:
    presupp_in_selection: bool = False
    include_null_in_support: bool | None = None  # None: follow presupp_in_selection
    top_m: int = DEFAULT_TOP_M
    tie_break: str = "lowest_id"

    def __post_init__(self):
        if self.top_m < 1:
            raise ContractError("top_m must be >= 1")
        if self.tie_break != "lowest_id":
            raise ContractError("only lowest_id tie-breaking is supported")
        if self.include_null_in_support is None:
            object.__setattr__(self, "include_null_in_support", self.presupp_in_selection)


@dataclass(frozen=True)
class QuestionScore:
    question_id: int
    score: float
    support_size: int


def item_distributions(
    q: Question,
    items: tuple[Item, ...] | list[Item],
    response_model,
    polar_model,
    mode: SelectionMode,
) -> list[AnswerDistribution]:
    """Per-item response distribution used for scoring: relevance-adjusted in
    presupp mode, raw otherwise.  Polar questions are never adjusted.
    """
    if q.kind == POLAR:
        check = PolarCheck(text=q.text, np=q.probe)
        return [polar_model.polar_distribution(check, item) for item in items]
    if mode.presupp_in_selection:
        return [
            adjusted_response_distribution(q, item, response_model, polar_model, include_null=True)
            for item in items
        ]
    return [response_model.answer_distribution(q, item) for item in items]


def response_support(dists: list[AnswerDistribution], mode: SelectionMode) -> list[str]:
    """Union of each item's top_m most probable tokens, sorted; NO_ANSWER is
    admitted only when the mode says so.
    """
    tokens: set[str] = set()
    for dist in dists:
        tokens.update(dist.top_m(mode.top_m).support)
    if mode.include_null_in_support:
        tokens.add(NO_ANSWER)
    else:
        tokens.discard(NO_ANSWER)
    return sorted(tokens)


def likelihood_matrix(dists: list[AnswerDistribution], support: list[str]) -> np.ndarray:
    matrix = np.empty((len(dists), len(support)), dtype=np.float64)
    for i, dist in enumerate(dists):
        row = dist.as_map()
        for j, token in enumerate(support):
            matrix[i, j] = row.get(token, 0.0)
    return matrix


def score_question(
    q: Question,
    belief: BeliefState,
    items,
    response_model,
    polar_model,
    mode: SelectionMode,
    dists: list[AnswerDistribution] | None = None,
) -> QuestionScore:
    """Exact enumeration, no sampling.  dists may be passed in to reuse a
    per-game cache of answer distributions.
    """
    if len(items) != belief.k:
        raise ContractError("belief and item set sizes differ")
    if dists is None:
        dists = item_distributions(q, items, response_model, polar_model, mode)
    support = response_support(dists, mode)
    if not support:
        raise ScoringError(f"question {q.id} has an empty response support")
    matrix = np.ascontiguousarray(likelihood_matrix(dists, support))
    score = float(_kernel.eig_score(belief.probs, matrix))
    return QuestionScore(question_id=q.id, score=max(score, 0.0), support_size=len(support))


def select_question(
    pool: QuestionPool,
    belief: BeliefState,
    items,
    response_model,
    polar_model,
    mode: SelectionMode,
    asked: set[int],
    dists_by_qid: dict[int, list[AnswerDistribution]] | None = None,
) -> int:
    """Argmin of score over unasked questions; ties go to the lowest id."""
    best_id = None
    best_score = None
    for q in pool:
        if q.id in asked:
            continue
        cached = dists_by_qid.get(q.id) if dists_by_qid is not None else None
        result = score_question(q, belief, items, response_model, polar_model, mode, dists=cached)
        if best_score is None or result.score < best_score or (
            result.score == best_score and q.id < best_id
        ):
            best_id = q.id
            best_score = result.score
    if best_id is None:
        raise PoolExhausted("every question in the pool has been asked")
    return best_id
