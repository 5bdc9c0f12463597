import math

import numpy as np
import pytest

from pinpoint.answers import NO, YES, AnswerDistribution, OracleConfig, SyntheticOracle
from pinpoint.belief import BeliefState, init_belief
from pinpoint.errors import PoolExhausted, ScoringError
from pinpoint.presupposition import NO_ANSWER
from pinpoint.questions import Question, QuestionPool
from pinpoint.selection import (
    SelectionMode,
    item_distributions,
    likelihood_matrix,
    response_support,
    score_question,
    select_question,
)

from _oracles import brute_eig
from conftest import make_item, make_world


class TableResponse:
    """Answers from an explicit (question id, item id) -> distribution table."""

    def __init__(self, table):
        self.table = {k: AnswerDistribution.from_map(v) for k, v in table.items()}

    def answer_distribution(self, q, item):
        return self.table[(q.id, item.id)]


class UniformPolar:
    def polar_distribution(self, check, item):
        return AnswerDistribution(support=(YES, NO), probs=(0.5, 0.5))


def q_open(qid, probe="color", subjects=()):
    return Question(id=qid, text=f"q{qid}", kind="open", probe=probe,
                    presupposed_subjects=tuple(subjects))


def _items(n, subject="cake"):
    return [make_item(i, subject, color="pink") for i in range(n)]


NAIVE = SelectionMode(presupp_in_selection=False)
PRESUPP = SelectionMode(presupp_in_selection=True)


def _delta(token):
    return {token: 1.0}


# --- analytic scores ---

def test_perfectly_identifying_question_scores_zero():
    items = _items(4)
    model = TableResponse({(1, i): _delta(f"v{i}") for i in range(4)})
    result = score_question(q_open(1), init_belief(4), items, model, UniformPolar(), NAIVE)
    assert result.score == pytest.approx(0.0, abs=1e-12)
    assert result.support_size == 4


def test_uninformative_question_scores_prior_entropy():
    items = _items(4)
    model = TableResponse({(1, i): {"a": 0.5, "b": 0.5} for i in range(4)})
    result = score_question(q_open(1), init_belief(4), items, model, UniformPolar(), NAIVE)
    assert result.score == pytest.approx(math.log(4), abs=1e-12)


def test_half_splitting_question_scores_ln2():
    items = _items(4)
    model = TableResponse({
        (1, 0): _delta("red"), (1, 1): _delta("red"),
        (1, 2): _delta("blue"), (1, 3): _delta("blue"),
    })
    result = score_question(q_open(1), init_belief(4), items, model, UniformPolar(), NAIVE)
    assert result.score == pytest.approx(math.log(2), abs=1e-12)


def test_score_is_never_negative():
    items = _items(3)
    model = TableResponse({(1, i): _delta(f"v{i}") for i in range(3)})
    result = score_question(q_open(1), init_belief(3), items, model, UniformPolar(), NAIVE)
    assert result.score >= 0.0


# --- response support ---

def test_support_union_plus_null():
    dists = [AnswerDistribution.from_map(_delta("red")),
             AnswerDistribution.from_map(_delta("blue"))]
    mode = SelectionMode(presupp_in_selection=True, top_m=1)
    assert response_support(dists, mode) == ["blue", NO_ANSWER, "red"]


def test_support_without_null():
    dists = [AnswerDistribution.from_map({"red": 0.5, NO_ANSWER: 0.5})]
    assert response_support(dists, SelectionMode(presupp_in_selection=False)) == ["red"]


def test_support_top_m_covers_full_vocab_when_large():
    dists = [AnswerDistribution.from_map({"a": 0.4, "b": 0.3, "c": 0.2, "d": 0.1})]
    mode = SelectionMode(top_m=10)
    assert response_support(dists, mode) == ["a", "b", "c", "d"]


def test_support_top_m_truncates():
    dists = [AnswerDistribution.from_map({"a": 0.7, "b": 0.2, "c": 0.1})]
    assert response_support(dists, SelectionMode(top_m=1)) == ["a"]


def test_empty_support_is_a_scoring_error():
    items = _items(1)
    model = TableResponse({(1, 0): {NO_ANSWER: 1.0}})
    with pytest.raises(ScoringError):
        score_question(q_open(1), init_belief(1), items, model, UniformPolar(), NAIVE)


def test_likelihood_matrix_fills_missing_tokens_with_zero():
    dists = [AnswerDistribution.from_map(_delta("red"))]
    m = likelihood_matrix(dists, ["blue", "red"])
    assert m.tolist() == [[0.0, 1.0]]


# --- brute-force equivalence ---

def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(31)
    for trial in range(40):
        k = int(rng.integers(2, 7))
        v = int(rng.integers(2, 6))
        support = [f"t{j}" for j in range(v)]
        table = {}
        per_item = []
        for i in range(k):
            raw = rng.dirichlet(np.ones(v))
            table[(1, i)] = {support[j]: float(raw[j]) for j in range(v)}
            per_item.append(table[(1, i)])
        prior = rng.dirichlet(np.ones(k))
        belief = BeliefState(probs=prior / prior.sum())
        model = TableResponse(table)
        mode = SelectionMode(top_m=v)
        result = score_question(q_open(1), belief, _items(k), model, UniformPolar(), mode)
        expected = brute_eig(belief.probs.tolist(), per_item, support)
        assert result.score == pytest.approx(expected, abs=1e-9)
        # exact Bayes with full support never beats the prior entropy
        assert result.score <= -sum(p * math.log(p) for p in belief.probs if p > 0) + 1e-9


# --- selection ---

def _two_question_setup():
    items = _items(3)
    model = TableResponse({
        (1, 0): _delta("a"), (1, 1): _delta("b"), (1, 2): _delta("c"),  # perfect
        (2, 0): _delta("z"), (2, 1): _delta("z"), (2, 2): _delta("z"),  # useless
    })
    pool = QuestionPool([q_open(1), q_open(2)])
    return items, model, pool


def test_select_prefers_informative_question():
    items, model, pool = _two_question_setup()
    chosen = select_question(pool, init_belief(3), items, model, UniformPolar(), NAIVE, set())
    assert chosen == 1


def test_select_skips_asked_questions():
    items, model, pool = _two_question_setup()
    chosen = select_question(pool, init_belief(3), items, model, UniformPolar(), NAIVE, {1})
    assert chosen == 2


def test_select_tie_takes_lowest_id():
    items = _items(2)
    model = TableResponse({
        (3, 0): _delta("a"), (3, 1): _delta("b"),
        (7, 0): _delta("c"), (7, 1): _delta("d"),
    })
    pool = QuestionPool([q_open(7), q_open(3)])
    chosen = select_question(pool, init_belief(2), items, model, UniformPolar(), NAIVE, set())
    assert chosen == 3


def test_exhausted_pool_raises():
    items, model, pool = _two_question_setup()
    with pytest.raises(PoolExhausted):
        select_question(pool, init_belief(3), items, model, UniformPolar(), NAIVE, {1, 2})


def test_argmin_invariant_to_prior_scaling():
    items, model, pool = _two_question_setup()
    weights = np.array([3.0, 1.0, 2.0])
    belief = BeliefState(probs=weights / weights.sum())
    scaled = BeliefState(probs=(10.0 * weights) / (10.0 * weights).sum())
    a = select_question(pool, belief, items, model, UniformPolar(), NAIVE, set())
    b = select_question(pool, scaled, items, model, UniformPolar(), NAIVE, set())
    assert a == b


# --- naive vs presupposition-aware divergence ---

def _trap_setup():
    # all items are cakes; question 5 presupposes a knife nobody has.
    # seed 0 hallucinates three distinct colors for question 5 (pink, white,
    # black), so the naive scorer reads the trap as highly discriminating.
    items = [
        make_item(0, "cake", color="pink"),
        make_item(1, "cake", color="pink"),
        make_item(2, "cake", color="white"),
    ]
    world = make_world(items, extra_vocab={"color": ["brown", "silver", "green", "black"]})
    oracle = SyntheticOracle(world, OracleConfig(noise=0.0, hallucination_confidence=0.9, seed=0))
    pool = QuestionPool([
        q_open(4, subjects=("cake",)),
        q_open(5, subjects=("knife",)),
    ])
    return items, oracle, pool


def test_naive_and_presupp_modes_disagree_on_trap():
    items, oracle, pool = _trap_setup()
    belief = init_belief(3)
    naive_pick = select_question(pool, belief, items, oracle, oracle, NAIVE, set())
    aware_pick = select_question(pool, belief, items, oracle, oracle, PRESUPP, set())
    assert naive_pick == 5
    assert aware_pick == 4


def test_presupp_mode_scores_trap_as_uninformative():
    items, oracle, pool = _trap_setup()
    belief = init_belief(3)
    trap = pool.by_id[5]
    dists = item_distributions(trap, items, oracle, oracle, PRESUPP)
    for d in dists:
        assert d.prob(NO_ANSWER) == pytest.approx(1.0)
    result = score_question(trap, belief, items, oracle, oracle, PRESUPP)
    assert result.score == pytest.approx(math.log(3), abs=1e-9)


def test_naive_mode_scores_trap_below_honest_question():
    items, oracle, pool = _trap_setup()
    belief = init_belief(3)
    trap = score_question(pool.by_id[5], belief, items, oracle, oracle, NAIVE)
    honest = score_question(pool.by_id[4], belief, items, oracle, oracle, NAIVE)
    assert trap.score < honest.score
    assert honest.score == pytest.approx((2 / 3) * math.log(2), abs=1e-9)
