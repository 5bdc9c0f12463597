"""Belief over candidate items and its Bayes updates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernel
from .errors import ContractError, DegenerateUpdateError
from .presupposition import NO_ANSWER
from .questions import Question

DEFAULT_EPSILON_FLOOR = 1e-6

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class BeliefState:
    """Immutable probability vector over item positions plus the dialogue
    history that produced it.  history entries are (question id, response).
    """

    probs: np.ndarray
    turn: int = 0
    history: tuple[tuple[int, str], ...] = ()

    def __post_init__(self):
        probs = np.ascontiguousarray(self.probs, dtype=np.float64)
        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size == 0:
            raise ContractError("belief must be a non-empty vector")
        if np.any(probs < 0.0):
            raise ContractError("belief probabilities must be non-negative")
        total = float(probs.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ContractError(f"belief sums to {total!r}, expected 1")
        if len(self.history) != self.turn:
            raise ContractError("history length must equal turn")

    @property
    def k(self) -> int:
        return int(self.probs.size)

    def argmax(self) -> int:
        # ties resolve to the lowest index
        return int(np.argmax(self.probs))


def init_belief(k: int) -> BeliefState:
    if k < 1:
        raise ContractError("belief needs at least one item")
    return BeliefState(probs=np.full(k, 1.0 / k))


def _question_id(q) -> int:
    return q.id if isinstance(q, Question) else int(q)


def _bayes(b: BeliefState, likelihoods, epsilon_floor: float, square: bool) -> np.ndarray:
    lik = np.ascontiguousarray(likelihoods, dtype=np.float64)
    if lik.shape != (b.k,):
        raise ContractError(f"likelihood vector must have length {b.k}")
    try:
        return _kernel.posterior(b.probs, lik, epsilon_floor, square)
    except ValueError as exc:
        raise DegenerateUpdateError(str(exc)) from exc


def update_standard(
    b: BeliefState,
    q,
    r: str,
    likelihoods,
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR,
    double_update: bool = False,
) -> BeliefState:
    """posterior ∝ prior * max(likelihood, floor); the question prior is
    shared by all items and cancels.  double_update squares the factor.
    """
    if r == NO_ANSWER:
        raise ContractError("null responses go through update_null")
    probs = _bayes(b, likelihoods, epsilon_floor, double_update)
    return BeliefState(
        probs=probs,
        turn=b.turn + 1,
        history=b.history + ((_question_id(q), r),),
    )


def update_null(
    b: BeliefState,
    q,
    irrelevance,
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR,
) -> BeliefState:
    """No-answer update: the irrelevance vector is the likelihood, upweighting
    items the question does not apply to.
    """
    probs = _bayes(b, irrelevance, epsilon_floor, square=False)
    return BeliefState(
        probs=probs,
        turn=b.turn + 1,
        history=b.history + ((_question_id(q), NO_ANSWER),),
    )


def entropy(b: BeliefState) -> float:
    """-sum p ln p in nats, with 0 ln 0 = 0."""
    positive = b.probs[b.probs > 0.0]
    return float(-(positive * np.log(positive)).sum()) if positive.size else 0.0


def uniform_entropy(k: int) -> float:
    return math.log(k)
