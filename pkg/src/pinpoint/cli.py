"""Command-line entry points: sweep, play, replay, serve."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from .answers import OracleConfig, SyntheticOracle
from .engine import (
    GameConfig,
    GuesserModels,
    load_records,
    replay_beliefs,
    run_selfplay_game,
    synthetic_model_descriptor,
)
from .errors import PinpointError
from .experiments import (
    VARIANTS,
    SweepSpec,
    build_world,
    inject_trap_questions,
    render_table,
    run_sweep,
    variant_name_from_flags,
)
from .questions import generate_open_pool, generate_polar_pool
from .seeding import derive_seed
from .world import sample_game_items


def _add_common_game_args(parser: argparse.ArgumentParser):
    parser.add_argument("--setting", choices=("easy", "medium", "hard"), default=None)
    parser.add_argument("--k", type=int, default=None)
    parser.add_argument("--policy", choices=("polar", "open"), default=None)
    parser.add_argument("--presupp", choices=("none", "selection", "update", "both"), default=None)
    parser.add_argument("--double-update", action="store_true")
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--max-turns", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--noise", type=float, default=None)
    parser.add_argument("--trap-fraction", type=float, default=None)


def _cmd_sweep(args) -> int:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        for key in ("settings", "k_values", "variants"):
            if key in raw and isinstance(raw[key], list):
                raw[key] = tuple(raw[key])
        spec = SweepSpec(**raw)
    else:
        spec = SweepSpec()
    overrides = {}
    if args.setting:
        overrides["settings"] = (args.setting,)
    if args.k:
        overrides["k_values"] = (args.k,)
    if args.policy or args.double_update or args.presupp is not None:
        policy = args.policy or "open"
        overrides["variants"] = (variant_name_from_flags(policy, args.presupp, args.double_update),)
    if args.games:
        overrides["games_per_cell"] = args.games
    if args.gamma is not None:
        overrides["gamma"] = args.gamma
    if args.max_turns is not None:
        overrides["max_turns"] = args.max_turns
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.noise is not None:
        overrides["noise"] = args.noise
    if args.trap_fraction is not None:
        overrides["trap_fraction"] = args.trap_fraction
    if args.out:
        overrides["out_path"] = args.out
    if args.format:
        overrides["out_format"] = args.format
    if args.records:
        overrides["records_path"] = args.records
    spec = replace(spec, **overrides)
    rows = run_sweep(spec)
    fmt = spec.out_format if spec.out_path else (args.format or "markdown")
    sys.stdout.write(render_table(rows, fmt))
    if spec.out_path:
        print(f"wrote {spec.out_path}", file=sys.stderr)
    return 0


def _cmd_play(args) -> int:
    setting = args.setting or "hard"
    k = args.k or 10
    policy = args.policy or "open"
    variant_name = variant_name_from_flags(policy, args.presupp, args.double_update)
    variant = VARIANTS[variant_name]
    spec = SweepSpec(
        settings=(setting,),
        k_values=(k,),
        variants=(variant_name,),
        games_per_cell=1,
        base_seed=args.seed if args.seed is not None else 0,
        noise=args.noise if args.noise is not None else 0.15,
        trap_fraction=args.trap_fraction if args.trap_fraction is not None else 0.0,
        n_items=max(240, 9 * k),
    )
    world = build_world(spec, setting)
    game_seed = derive_seed(spec.base_seed, "game", setting, k, 0)
    items = sample_game_items(world, setting, k, seed=game_seed)
    if variant.policy == "polar":
        pool = generate_polar_pool(items)
    else:
        pool = generate_open_pool(items, world)
        pool = inject_trap_questions(
            pool, items, world, spec.trap_fraction,
            seed=derive_seed(spec.base_seed, "trap", setting, k, 0),
        )
    guesser_config = OracleConfig(
        noise=spec.noise, hallucination_confidence=spec.hallucination_confidence,
        seed=derive_seed(spec.base_seed, "guesser"),
    )
    responder_config = OracleConfig(
        noise=spec.noise, hallucination_confidence=spec.hallucination_confidence,
        seed=derive_seed(spec.base_seed, "responder"),
    )
    config = GameConfig(
        gamma=args.gamma if args.gamma is not None else 0.8,
        max_turns=args.max_turns if args.max_turns is not None else 20,
        policy=variant.policy,
        presupp_in_selection=variant.presupp_in_selection,
        presupp_in_update=variant.presupp_in_update,
        allow_no_answer=variant.allow_no_answer,
        double_update=variant.double_update,
        seed=game_seed,
    )
    guesser = GuesserModels.synthetic(world, guesser_config)
    responder = SyntheticOracle(world, responder_config)
    record = run_selfplay_game(
        config, items, pool, guesser, responder,
        setting=setting, vocab=world.vocab, subjects=world.subjects,
        models_descriptor=synthetic_model_descriptor(guesser_config, guesser_config, responder_config),
    )
    print(f"setting={setting} k={k} variant={variant_name}")
    print("items:")
    for idx, item in enumerate(items.items):
        marker = " <- target" if idx == items.target_index else ""
        attrs = ", ".join(f"{a}={v}" for a, v in sorted(item.attributes.items()))
        print(f"  [{idx}] {attrs}{marker}")
    for t in record.turns:
        top = max(t.belief_after)
        print(f"turn {t.turn}: {t.question_text}  ->  {t.response}   (max belief {top:.3f})")
    verdict = "correct" if record.correct else "wrong"
    print(f"guess: item id {record.guess} ({verdict}), termination: {record.termination}, turns: {record.n_turns}")
    return 0


def _cmd_replay(args) -> int:
    records = load_records(args.record)
    worst = 0.0
    failed = 0
    for idx, record in enumerate(records):
        beliefs = replay_beliefs(record)
        for turn, replayed in zip(record.turns, beliefs):
            dev = float(np.max(np.abs(np.array(turn.belief_after) - replayed)))
            worst = max(worst, dev)
            if dev > args.tolerance:
                failed += 1
                print(f"record {idx} turn {turn.turn}: deviation {dev:.3e}")
                break
    status = "PASS" if failed == 0 else "FAIL"
    print(f"{status}: {len(records)} records, max deviation {worst:.3e} (tolerance {args.tolerance:g})")
    return 0 if failed == 0 else 1


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app()
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="pinpoint", description="Information-gain guessing games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a seeded experiment grid and emit a table")
    p_sweep.add_argument("--spec", default=None, help="JSON file with SweepSpec fields")
    _add_common_game_args(p_sweep)
    p_sweep.add_argument("--games", type=int, default=None)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--format", choices=("csv", "markdown"), default=None)
    p_sweep.add_argument("--records", default=None, help="also write GameRecords to this JSONL path")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_play = sub.add_parser("play", help="print one self-play game trace")
    _add_common_game_args(p_play)
    p_play.set_defaults(func=_cmd_play)

    p_replay = sub.add_parser("replay", help="verify recorded games replay to identical beliefs")
    p_replay.add_argument("record", help="JSONL file of GameRecords")
    p_replay.add_argument("--tolerance", type=float, default=1e-12)
    p_replay.set_defaults(func=_cmd_replay)

    p_serve = sub.add_parser("serve", help="run the HTTP game service")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    if args.command == "serve":
        import os

        if args.host is None:
            args.host = os.environ.get("PINPOINT_HOST", "127.0.0.1")
        if args.port is None:
            args.port = int(os.environ.get("PINPOINT_PORT", "8000"))
    try:
        return args.func(args)
    except PinpointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
