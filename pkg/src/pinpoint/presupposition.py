"""Relevance of a question to an item, and the relevance-adjusted response
distribution with its null-response mass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .answers import NO, YES, AnswerDistribution
from .errors import ContractError
from .questions import OPEN, Question, decompose_to_polar
from .world import Item

# Reserved response token for "the question does not apply".
NO_ANSWER = "no_answer"


@dataclass(frozen=True)
class RelevanceScore:
    relevance: float
    irrelevance: float

    def __post_init__(self):
        for name, value in (("relevance", self.relevance), ("irrelevance", self.irrelevance)):
            if not -1e-9 <= value <= 1.0 + 1e-9:
                raise ContractError(f"{name} {value!r} outside [0, 1]")


def relevance(q: Question, item: Item, polar_model) -> RelevanceScore:
    """Mean yes-probability (and no-probability) over the question's
    existence checks.  No presuppositions means vacuously relevant.
    """
    if q.kind != OPEN:
        raise ContractError("relevance applies to open questions only")
    checks = decompose_to_polar(q)
    if not checks:
        return RelevanceScore(relevance=1.0, irrelevance=0.0)
    yes_total = 0.0
    no_total = 0.0
    for check in checks:
        dist = polar_model.polar_distribution(check, item)
        yes_total += dist.prob(YES)
        no_total += dist.prob(NO)
    j = len(checks)
    return RelevanceScore(relevance=yes_total / j, irrelevance=no_total / j)


def adjusted_response_distribution(
    q: Question,
    item: Item,
    response_model,
    polar_model,
    include_null: bool,
    renormalize: bool = True,
) -> AnswerDistribution:
    """Scale each standard answer by relevance and route the irrelevance mass
    to NO_ANSWER.  With a yes/no-complete polar model the result is already
    normalized, so renormalize=False changes nothing there.
    """
    raw = response_model.answer_distribution(q, item)
    if not include_null:
        return raw
    rel = relevance(q, item, polar_model)
    mass = {token: rel.relevance * p for token, p in zip(raw.support, raw.probs)}
    mass[NO_ANSWER] = rel.irrelevance
    total = sum(mass.values())
    if total <= 0.0:
        raise ContractError("adjusted distribution carries no mass")
    return AnswerDistribution.from_map(mass, renormalize=renormalize)
