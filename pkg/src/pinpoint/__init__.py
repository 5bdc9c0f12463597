"""pinpoint: an information-gain guessing-game engine.

A guesser identifies a hidden target among k items by asking the questions
with the highest expected information gain, handling questions whose
presuppositions may not hold, and updating a Bayesian belief each turn.
"""

from ._kernel import BACKEND as KERNEL_BACKEND
from .answers import AnswerDistribution, OracleConfig, SyntheticOracle
from .belief import BeliefState, entropy, init_belief, update_null, update_standard
from .engine import (
    GameConfig,
    GameLoop,
    GameRecord,
    GuesserModels,
    TurnRecord,
    replay_beliefs,
    run_selfplay_game,
    should_terminate,
    simulate_responder,
)
from .presupposition import NO_ANSWER, RelevanceScore, adjusted_response_distribution, relevance
from .questions import (
    PolarCheck,
    Question,
    QuestionPool,
    decompose_to_polar,
    extract_subjects,
    generate_open_pool,
    generate_polar_pool,
    ingest_pool,
)
from .selection import QuestionScore, SelectionMode, score_question, select_question
from .world import (
    Item,
    ItemSet,
    World,
    WorldGenConfig,
    generate_world,
    load_world,
    sample_game_items,
    save_world,
)

__version__ = "0.1.0"
