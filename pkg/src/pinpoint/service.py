"""HTTP game service: humans play the responder role against the engine.

In-memory sessions with per-session locking; finished games are appended to
a JSONL record log.  All errors use the {code, message, details} shape.
"""

from __future__ import annotations

import itertools
import json
import os
import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .answers import OracleConfig, SyntheticOracle
from .engine import GameConfig, GameLoop, GuesserModels, synthetic_model_descriptor
from .errors import ConfigurationError, PinpointError, SamplingError, ValidationError
from .experiments import (
    SweepSpec,
    VARIANTS,
    build_world,
    inject_trap_questions,
    variant_name_from_flags,
)
from .questions import generate_open_pool, generate_polar_pool
from .seeding import derive_seed
from .world import SETTINGS, sample_game_items

MODE_EVAL = "eval"  # belief hidden from the responder
MODE_DEMO = "demo"  # belief visible


class CreateGameRequest(BaseModel):
    setting: str = "hard"
    k: int = 10
    policy: str = "open"
    presupp: str = "both"
    double_update: bool = False
    allow_no_answer: bool | None = None
    gamma: float = 0.8
    max_turns: int = 20
    seed: int = 0
    noise: float = 0.15
    hallucination_confidence: float = 0.9
    trap_fraction: float = 0.0
    enforce_vocab: bool = True
    mode: str | None = None


class AnswerRequest(BaseModel):
    response: str
    turn: int


class _Session:
    def __init__(self, game_id: str, loop: GameLoop, meta: dict, order: int):
        self.game_id = game_id
        self.loop = loop
        self.meta = meta
        self.order = order
        self.lock = threading.Lock()
        self.record_dict: dict | None = None


def _error(status: int, code: str, message: str, details: dict | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or {}},
    )


def session_view(session: _Session) -> dict:
    loop = session.loop
    view: dict = {
        "game_id": session.game_id,
        "status": "finished" if loop.finished else "active",
        "setting": session.meta["setting"],
        "k": loop.items.k,
        "policy": loop.config.policy,
        "variant": session.meta["variant"],
        "mode": session.meta["mode"],
        "turn": len(loop.turns),
        "max_turns": loop.config.max_turns,
        "items": [item.to_dict() for item in loop.items.items],
        "target_index": loop.items.target_index,
        "turn_log": [
            {"turn": t.turn, "question_id": t.question_id, "question_text": t.question_text,
             "response": t.response}
            for t in loop.turns
        ],
        "belief": [float(p) for p in loop.belief.probs] if session.meta["mode"] == MODE_DEMO else None,
    }
    if loop.current is not None:
        view["current_question"] = {
            "id": loop.current.question_id,
            "text": loop.current.text,
            "turn": len(loop.turns) + 1,
        }
        view["allowed_responses"] = list(loop.current.allowed_responses)
        view["no_answer_allowed"] = loop.current.no_answer_allowed
    else:
        view["current_question"] = None
        view["allowed_responses"] = []
        view["no_answer_allowed"] = False
    if loop.finished:
        guess_index = loop.guess_index
        view["guess"] = {
            "item_index": guess_index,
            "item_id": loop.items.items[guess_index].id,
            "correct": guess_index == loop.items.target_index,
        }
        view["termination"] = loop.termination
    else:
        view["guess"] = None
        view["termination"] = None
    return view


def _session_summary(session: _Session) -> dict:
    loop = session.loop
    return {
        "game_id": session.game_id,
        "status": "finished" if loop.finished else "active",
        "setting": session.meta["setting"],
        "k": loop.items.k,
        "policy": loop.config.policy,
        "variant": session.meta["variant"],
        "turn": len(loop.turns),
    }


def _build_session(req: CreateGameRequest, game_id: str, order: int, default_mode: str) -> _Session:
    if req.setting not in SETTINGS:
        raise ConfigurationError(f"unknown setting '{req.setting}' (expected one of {list(SETTINGS)})")
    if req.mode is not None and req.mode not in (MODE_EVAL, MODE_DEMO):
        raise ConfigurationError(f"mode must be '{MODE_EVAL}' or '{MODE_DEMO}'")
    variant_name = variant_name_from_flags(req.policy, req.presupp, req.double_update)
    variant = VARIANTS[variant_name]
    allow_no_answer = variant.allow_no_answer if req.allow_no_answer is None else req.allow_no_answer

    spec = SweepSpec(
        settings=(req.setting,),
        k_values=(req.k,),
        base_seed=req.seed,
        noise=req.noise,
        hallucination_confidence=req.hallucination_confidence,
        trap_fraction=req.trap_fraction,
        n_items=max(240, 9 * req.k),
    )
    world = build_world(spec, req.setting)
    game_seed = derive_seed(req.seed, "service-game", game_id)
    items = sample_game_items(world, req.setting, req.k, seed=game_seed)
    if variant.policy == "polar":
        pool = generate_polar_pool(items)
    else:
        pool = generate_open_pool(items, world)
        pool = inject_trap_questions(
            pool, items, world, req.trap_fraction,
            seed=derive_seed(req.seed, "service-trap", game_id),
        )
    config = GameConfig(
        gamma=req.gamma,
        max_turns=req.max_turns,
        policy=variant.policy,
        presupp_in_selection=variant.presupp_in_selection,
        presupp_in_update=variant.presupp_in_update,
        allow_no_answer=allow_no_answer,
        double_update=variant.double_update,
        seed=game_seed,
    )
    guesser_config = OracleConfig(
        noise=req.noise,
        hallucination_confidence=req.hallucination_confidence,
        seed=derive_seed(req.seed, "guesser"),
    )
    guesser = GuesserModels.synthetic(world, guesser_config)
    loop = GameLoop(
        config, items, pool, guesser,
        models_descriptor=synthetic_model_descriptor(guesser_config, guesser_config, None),
        setting=req.setting,
        vocab=world.vocab,
        subjects=world.subjects,
        enforce_vocab=req.enforce_vocab,
    )
    meta = {
        "setting": req.setting,
        "variant": variant_name,
        "mode": req.mode or default_mode,
    }
    return _Session(game_id, loop, meta, order)


def create_app(records_path: str | None = None, mode: str | None = None,
               cors_origin: str | None = None) -> FastAPI:
    records_path = records_path if records_path is not None else os.environ.get("PINPOINT_RECORDS_PATH")
    mode = mode or os.environ.get("PINPOINT_MODE", MODE_EVAL)
    cors_origin = cors_origin or os.environ.get("PINPOINT_CORS_ORIGIN", "*")
    if mode not in (MODE_EVAL, MODE_DEMO):
        raise ConfigurationError(f"PINPOINT_MODE must be '{MODE_EVAL}' or '{MODE_DEMO}'")

    app = FastAPI(title="pinpoint game service", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin] if cors_origin != "*" else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, _Session] = {}
    store_lock = threading.Lock()
    counter = itertools.count()
    record_lock = threading.Lock()

    def persist_record(session: _Session):
        if session.record_dict is not None:
            return
        session.record_dict = session.loop.record().to_dict()
        if records_path:
            with record_lock:
                with open(records_path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(session.record_dict, ensure_ascii=False) + "\n")

    @app.exception_handler(RequestValidationError)
    async def handle_request_validation(request: Request, exc: RequestValidationError):
        return _error(422, "validation_error", "invalid request body",
                      {"errors": jsonable_encoder(exc.errors())})

    @app.exception_handler(PinpointError)
    async def handle_domain_error(request: Request, exc: PinpointError):
        return _error(500, "internal_error", str(exc))

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/games", status_code=201)
    async def create_game(req: CreateGameRequest):
        game_id = uuid.uuid4().hex[:12]
        try:
            session = _build_session(req, game_id, next(counter), mode)
        except (ConfigurationError, SamplingError) as exc:
            return _error(422, "invalid_config", str(exc))
        with store_lock:
            sessions[game_id] = session
        if session.loop.finished:  # k=1 degenerate games can end immediately
            persist_record(session)
        return session_view(session)

    @app.get("/api/games")
    async def list_games(offset: int = 0, limit: int = 50):
        with store_lock:
            ordered = sorted(sessions.values(), key=lambda s: s.order)
        page = ordered[offset:offset + limit]
        return {
            "games": [_session_summary(s) for s in page],
            "total": len(ordered),
            "offset": offset,
        }

    @app.get("/api/games/{game_id}")
    async def get_game(game_id: str):
        session = sessions.get(game_id)
        if session is None:
            return _error(404, "not_found", f"no game with id '{game_id}'")
        return session_view(session)

    @app.get("/api/games/{game_id}/record")
    async def get_record(game_id: str):
        session = sessions.get(game_id)
        if session is None:
            return _error(404, "not_found", f"no game with id '{game_id}'")
        if not session.loop.finished:
            return _error(409, "game_active", "record available once the game finishes")
        persist_record(session)
        return session.record_dict

    @app.post("/api/games/{game_id}/answers")
    async def post_answer(game_id: str, body: AnswerRequest):
        session = sessions.get(game_id)
        if session is None:
            return _error(404, "not_found", f"no game with id '{game_id}'")
        with session.lock:
            loop = session.loop
            if loop.finished:
                return _error(409, "game_finished", "the game has already finished")
            expected = len(loop.turns) + 1
            if body.turn != expected:
                code = "duplicate_turn" if body.turn <= len(loop.turns) else "turn_out_of_order"
                return _error(409, code, f"expected an answer for turn {expected}",
                              {"expected_turn": expected, "got": body.turn})
            try:
                loop.submit_response(body.response, validate=True)
            except ValidationError as exc:
                return _error(422, "invalid_response", str(exc),
                              {"allowed_responses": exc.allowed or []})
            if loop.finished:
                persist_record(session)
        return session_view(session)

    return app
