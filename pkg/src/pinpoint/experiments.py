"""Experiment harness: seeded sweeps over settings x policies x k, with
trap-question injection, paired game seeds, and deterministic table output.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from pathlib import Path

from .answers import OracleConfig, SyntheticOracle
from .engine import (
    GameConfig,
    GameRecord,
    GuesserModels,
    run_selfplay_game,
    save_records,
    synthetic_model_descriptor,
)
from .errors import ConfigurationError, ContractError, SamplingError
from .questions import OPEN, Question, QuestionPool, generate_open_pool, generate_polar_pool
from .seeding import derive_seed
from .world import SETTINGS, SUBJECT_KEY, ItemSet, World, WorldGenConfig, generate_world, load_world

# Harder settings shrink attribute diversity, mirroring reduced visual
# diversity.  hard's cap of 4 also keeps a single confidently hallucinated
# answer below the 0.8 guess threshold at k=10.
SETTING_DIVERSITY_CAP = {"easy": None, "medium": 5, "hard": 4}

DEFAULT_ATTRIBUTE_SCHEMA = {
    "color": 6,
    "size": 5,
    "count": 6,
    "material": 6,
    "pattern": 6,
    "shape": 6,
}


@dataclass(frozen=True)
class PolicyVariant:
    """One table row: a named bundle of GameConfig policy fields."""

    name: str
    policy: str
    presupp_in_selection: bool
    presupp_in_update: bool
    allow_no_answer: bool
    double_update: bool
    presupp_label: str  # none | selection | update | both


VARIANTS: dict[str, PolicyVariant] = {
    v.name: v
    for v in [
        PolicyVariant("polar", "polar", False, False, False, False, "none"),
        PolicyVariant("open", "open", False, False, False, False, "none"),
        PolicyVariant("open-presupp", "open", True, True, True, False, "both"),
        PolicyVariant("open-presupp-double", "open", True, True, True, True, "both"),
        PolicyVariant("open-presupp-sel", "open", True, False, True, False, "selection"),
        PolicyVariant("open-presupp-upd", "open", False, True, True, False, "update"),
    ]
}

DEFAULT_VARIANTS = ("polar", "open", "open-presupp")


def variant_name_from_flags(policy: str, presupp: str | None, double_update: bool) -> str:
    """Map the CLI/service flag triple onto a canonical variant name."""
    if policy == "polar":
        return "polar"
    if presupp is None:
        presupp = "both"
    if presupp == "none":
        return "open"
    if presupp == "selection":
        return "open-presupp-sel"
    if presupp == "update":
        return "open-presupp-upd"
    if presupp == "both":
        return "open-presupp-double" if double_update else "open-presupp"
    raise ConfigurationError(f"unknown presupp mode '{presupp}'")


def variant_game_config(variant: PolicyVariant, spec: "SweepSpec", seed: int) -> GameConfig:
    return GameConfig(
        gamma=spec.gamma,
        max_turns=spec.max_turns,
        policy=variant.policy,
        presupp_in_selection=variant.presupp_in_selection,
        presupp_in_update=variant.presupp_in_update,
        allow_no_answer=variant.allow_no_answer,
        double_update=variant.double_update,
        epsilon_floor=spec.epsilon_floor,
        top_m=spec.top_m,
        seed=seed,
    )


@dataclass(frozen=True)
class SweepSpec:
    settings: tuple[str, ...] = ("easy", "medium", "hard")
    k_values: tuple[int, ...] = (10,)
    variants: tuple[str, ...] = DEFAULT_VARIANTS
    games_per_cell: int = 200
    base_seed: int = 0
    # world generation (ignored when world_file is given)
    n_items: int = 240
    n_subjects: int = 6
    attribute_schema: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_ATTRIBUTE_SCHEMA))
    world_file: str | None = None
    # oracles
    noise: float = 0.15
    hallucination_confidence: float = 0.9
    # trap questions (open pools only)
    trap_fraction: float = 0.0
    # engine
    gamma: float = 0.8
    max_turns: int = 20
    top_m: int = 10
    epsilon_floor: float = 1e-6
    # output
    out_path: str | None = None
    out_format: str = "csv"
    records_path: str | None = None

    def __post_init__(self):
        if self.games_per_cell < 1:
            raise ConfigurationError("games_per_cell must be >= 1")
        for s in self.settings:
            if s not in SETTINGS:
                raise ConfigurationError(f"unknown setting '{s}'")
        for v in self.variants:
            if v not in VARIANTS:
                raise ConfigurationError(f"unknown variant '{v}' (known: {sorted(VARIANTS)})")
        if not 0.0 <= self.trap_fraction < 1.0:
            raise ConfigurationError("trap_fraction must lie in [0, 1)")
        if self.out_format not in ("csv", "markdown"):
            raise ConfigurationError("out_format must be csv or markdown")


@dataclass(frozen=True)
class MetricsCell:
    accuracy: float
    mean_turns: float
    std_turns: float
    n_games: int


@dataclass(frozen=True)
class SweepRow:
    setting: str
    k: int
    policy: str  # variant name
    presupp: str
    cell: MetricsCell


def aggregate(records: list[GameRecord]) -> MetricsCell:
    if not records:
        raise ContractError("cannot aggregate an empty record list")
    first = records[0].config
    for rec in records[1:]:
        if rec.config != first:
            raise ContractError("aggregate requires identical configs")
    n = len(records)
    turns = [rec.n_turns for rec in records]
    mean_turns = sum(turns) / n
    variance = sum((t - mean_turns) ** 2 for t in turns) / n
    return MetricsCell(
        accuracy=sum(1 for rec in records if rec.correct) / n,
        mean_turns=mean_turns,
        std_turns=variance**0.5,
        n_games=n,
    )


def inject_trap_questions(
    pool: QuestionPool,
    items: ItemSet,
    world: World,
    fraction: float,
    seed: int,
) -> QuestionPool:
    """Append open questions presupposing subjects absent from the item set,
    sized so traps make up `fraction` of the final pool.  Absent world
    subjects are preferred; phantom subjects fill any shortfall.
    """
    if fraction <= 0.0:
        return pool
    n_base = len(pool)
    n_trap = round(fraction / (1.0 - fraction) * n_base)
    if n_trap == 0:
        return pool
    present = {item.subject for item in items.items}
    absent = [s for s in world.subjects if s not in present]
    rng = random.Random(seed)
    rng.shuffle(absent)
    while len(absent) < n_trap:
        absent.append(f"phantom{len(absent)}")
    keys = [k for k in world.attribute_keys() if k != SUBJECT_KEY]
    next_id = max(q.id for q in pool) + 1
    traps = []
    for i in range(n_trap):
        subject = absent[i]
        key = keys[i % len(keys)]
        traps.append(
            Question(
                id=next_id + i,
                text=f"What {key} is the {subject}?",
                kind=OPEN,
                probe=key,
                presupposed_subjects=(subject,),
                source_item=None,
            )
        )
    return QuestionPool(pool.questions + traps)


def build_world(spec: SweepSpec, setting: str) -> World:
    if spec.world_file is not None:
        return load_world(spec.world_file)
    gen = WorldGenConfig(
        n_items=spec.n_items,
        n_subjects=spec.n_subjects,
        attribute_schema=dict(spec.attribute_schema),
    )
    gen = gen.shrunk(SETTING_DIVERSITY_CAP.get(setting))
    return generate_world(gen, seed=derive_seed(spec.base_seed, "world", setting))


def _sample_cell_game(world: World, setting: str, k: int, spec: SweepSpec, index: int):
    from .world import sample_game_items

    game_seed = derive_seed(spec.base_seed, "game", setting, k, index)
    items = sample_game_items(world, setting, k, seed=game_seed)
    return game_seed, items


def run_cell(
    spec: SweepSpec,
    world: World,
    setting: str,
    k: int,
    variant: PolicyVariant,
) -> list[GameRecord]:
    """Run the cell's games.  Game seeds depend only on (base_seed, setting,
    k, index), so every variant sees the same item sets and traps — paired
    comparisons across policies.
    """
    guesser_config = OracleConfig(
        noise=spec.noise,
        hallucination_confidence=spec.hallucination_confidence,
        seed=derive_seed(spec.base_seed, "guesser"),
    )
    responder_config = OracleConfig(
        noise=spec.noise,
        hallucination_confidence=spec.hallucination_confidence,
        seed=derive_seed(spec.base_seed, "responder"),
    )
    guesser = GuesserModels.synthetic(world, guesser_config)
    responder = SyntheticOracle(world, responder_config)
    descriptor = synthetic_model_descriptor(guesser_config, guesser_config, responder_config)

    cell_seed = derive_seed(spec.base_seed, "cell", setting, k, variant.name)
    config = variant_game_config(variant, spec, seed=cell_seed)
    records = []
    for i in range(spec.games_per_cell):
        try:
            game_seed, items = _sample_cell_game(world, setting, k, spec, i)
        except SamplingError as exc:
            raise SamplingError(f"cell ({setting}, k={k}, {variant.name}): {exc}") from exc
        if variant.policy == "polar":
            pool = generate_polar_pool(items)
        else:
            pool = generate_open_pool(items, world)
            pool = inject_trap_questions(
                pool, items, world, spec.trap_fraction,
                seed=derive_seed(spec.base_seed, "trap", setting, k, i),
            )
        records.append(
            run_selfplay_game(
                config, items, pool, guesser, responder,
                setting=setting, vocab=world.vocab, subjects=world.subjects,
                models_descriptor=descriptor,
            )
        )
    return records


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    rows = []
    all_records: list[GameRecord] = []
    for setting in spec.settings:
        world = build_world(spec, setting)
        for k in spec.k_values:
            for name in spec.variants:
                variant = VARIANTS[name]
                records = run_cell(spec, world, setting, k, variant)
                all_records.extend(records)
                rows.append(
                    SweepRow(
                        setting=setting,
                        k=k,
                        policy=variant.name,
                        presupp=variant.presupp_label,
                        cell=aggregate(records),
                    )
                )
    if spec.records_path is not None:
        save_records(all_records, spec.records_path)
    if spec.out_path is not None:
        emit_table(rows, spec.out_format, spec.out_path)
    return rows


TABLE_COLUMNS = ["setting", "k", "policy", "presupp", "accuracy", "turns", "n"]


def _row_values(row: SweepRow) -> list[str]:
    return [
        row.setting,
        str(row.k),
        row.policy,
        row.presupp,
        f"{row.cell.accuracy:.4f}",
        f"{row.cell.mean_turns:.4f}",
        str(row.cell.n_games),
    ]


def render_table(rows: list[SweepRow], fmt: str) -> str:
    if not rows:
        raise ContractError("no rows to render")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(TABLE_COLUMNS)
        for row in rows:
            writer.writerow(_row_values(row))
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(TABLE_COLUMNS) + " |",
            "| " + " | ".join("---" for _ in TABLE_COLUMNS) + " |",
        ]
        for row in rows:
            lines.append("| " + " | ".join(_row_values(row)) + " |")
        return "\n".join(lines) + "\n"
    raise ConfigurationError(f"unknown table format '{fmt}'")


def emit_table(rows: list[SweepRow], fmt: str, path: str | Path) -> None:
    text = render_table(rows, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
