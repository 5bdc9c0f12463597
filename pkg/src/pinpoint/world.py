"""Synthetic grounded worlds: items with attributes, and game-instance sampling.

Items stand in for images.  Each item is an attribute map with a distinguished
"subject" key, so every answer probability downstream has an exact ground
truth.  Worlds are immutable once built and safe to share across games.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError, FormatError, SamplingError

SUBJECT_KEY = "subject"

SETTINGS = ("easy", "medium", "hard")


@dataclass(frozen=True)
class Item:
    id: int
    subject: str
    attributes: dict[str, str]
    caption: str | None = None
    image_ref: str | None = None

    def to_dict(self) -> dict:
        d = {"id": self.id, "subject": self.subject, "attributes": dict(self.attributes)}
        if self.caption is not None:
            d["caption"] = self.caption
        if self.image_ref is not None:
            d["image_ref"] = self.image_ref
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Item":
        return cls(
            id=d["id"],
            subject=d["subject"],
            attributes=dict(d["attributes"]),
            caption=d.get("caption"),
            image_ref=d.get("image_ref"),
        )


@dataclass(frozen=True)
class World:
    """A universe of items plus the vocabulary their attributes draw from."""

    items: tuple[Item, ...]
    vocab: dict[str, list[str]]
    subjects: list[str]

    def __post_init__(self):
        if not self.vocab:
            raise FormatError("world vocab must be non-empty")
        seen = set()
        for item in self.items:
            if item.id in seen:
                raise FormatError(f"duplicate item id {item.id}")
            seen.add(item.id)
            _check_item(item, self.vocab)

    def item_by_id(self, item_id: int) -> Item:
        for item in self.items:
            if item.id == item_id:
                return item
        raise KeyError(item_id)

    def attribute_keys(self) -> list[str]:
        return list(self.vocab.keys())


def _check_item(item: Item, vocab: dict[str, list[str]]) -> None:
    if SUBJECT_KEY not in item.attributes:
        raise FormatError(f"item {item.id}: missing '{SUBJECT_KEY}' attribute")
    if item.attributes[SUBJECT_KEY] != item.subject:
        raise FormatError(f"item {item.id}: attributes['{SUBJECT_KEY}'] != subject")
    for key, value in item.attributes.items():
        if key not in vocab:
            raise FormatError(f"item {item.id}: attribute key '{key}' not in vocab")
        if value not in vocab[key]:
            raise FormatError(f"item {item.id}: value '{value}' not allowed for '{key}'")


@dataclass(frozen=True)
class ItemSet:
    """The k candidate items of one game, with the responder's target."""

    items: tuple[Item, ...]
    target_index: int
    setting: str | None

    def __post_init__(self):
        k = len(self.items)
        if not 0 <= self.target_index < k:
            raise ConfigurationError(f"target_index {self.target_index} out of range for k={k}")
        subjects = {item.subject for item in self.items}
        if self.setting == "hard" and len(subjects) != 1:
            raise ConfigurationError("hard setting requires a single shared subject")
        if self.setting == "medium":
            if len(subjects) != 2:
                raise ConfigurationError("medium setting requires exactly two subjects")
            counts = sorted(
                sum(1 for item in self.items if item.subject == s) for s in subjects
            )
            if counts != [k // 2, k - k // 2]:
                raise ConfigurationError("medium setting requires a half/half subject split")

    @property
    def k(self) -> int:
        return len(self.items)

    @property
    def target(self) -> Item:
        return self.items[self.target_index]


@dataclass(frozen=True)
class WorldGenConfig:
    n_items: int
    n_subjects: int
    attribute_schema: dict[str, int] = field(default_factory=dict)
    subject_names: tuple[str, ...] | None = None

    def shrunk(self, cap: int | None) -> "WorldGenConfig":
        """Reduce attribute diversity by capping every value cardinality."""
        if cap is None:
            return self
        return WorldGenConfig(
            n_items=self.n_items,
            n_subjects=self.n_subjects,
            attribute_schema={k: min(v, cap) for k, v in self.attribute_schema.items()},
            subject_names=self.subject_names,
        )


# Token pools for generated worlds.  Values beyond the named ones fall back to
# "<key>N" tokens so any cardinality is representable.
_SUBJECT_POOL = [
    "food", "animal", "vehicle", "furniture", "plant", "building",
    "tool", "clothing", "instrument", "appliance",
]
_VALUE_POOLS = {
    "color": ["red", "blue", "green", "yellow", "pink", "white", "black", "orange", "purple", "brown"],
    "size": ["tiny", "small", "medium", "large", "huge"],
    "count": ["one", "two", "three", "four", "five", "six", "seven", "eight"],
    "material": ["wooden", "metal", "plastic", "glass", "stone", "fabric", "paper", "ceramic"],
    "pattern": ["plain", "striped", "spotted", "checkered", "floral", "swirled"],
    "shape": ["round", "square", "oval", "angular", "twisted", "flat"],
}


def _values_for(key: str, cardinality: int) -> list[str]:
    pool = _VALUE_POOLS.get(key, [])
    values = list(pool[:cardinality])
    i = len(values)
    while len(values) < cardinality:
        values.append(f"{key}{i}")
        i += 1
    return values


def generate_world(gen_config: WorldGenConfig, seed: int) -> World:
    """Deterministically sample a world from (config, seed)."""
    if gen_config.n_items < 1:
        raise ConfigurationError("n_items must be >= 1")
    if gen_config.n_subjects < 1:
        raise ConfigurationError("n_subjects must be >= 1")
    if not gen_config.attribute_schema:
        raise ConfigurationError("attribute schema must be non-empty")
    for key, cardinality in gen_config.attribute_schema.items():
        if not key:
            raise ConfigurationError("attribute key must be non-empty")
        if key == SUBJECT_KEY:
            raise ConfigurationError(f"'{SUBJECT_KEY}' is implicit and cannot appear in the schema")
        if cardinality < 1:
            raise ConfigurationError(f"cardinality for '{key}' must be >= 1")

    if gen_config.subject_names is not None:
        subjects = list(gen_config.subject_names[: gen_config.n_subjects])
    else:
        subjects = list(_SUBJECT_POOL[: gen_config.n_subjects])
    i = len(subjects)
    while len(subjects) < gen_config.n_subjects:
        subjects.append(f"subject{i}")
        i += 1

    vocab: dict[str, list[str]] = {SUBJECT_KEY: list(subjects)}
    for key, cardinality in gen_config.attribute_schema.items():
        vocab[key] = _values_for(key, cardinality)

    rng = random.Random(seed)
    items = []
    for item_id in range(gen_config.n_items):
        subject = rng.choice(subjects)
        attributes = {SUBJECT_KEY: subject}
        for key in gen_config.attribute_schema:
            attributes[key] = rng.choice(vocab[key])
        items.append(Item(id=item_id, subject=subject, attributes=attributes))
    return World(items=tuple(items), vocab=vocab, subjects=subjects)


def sample_game_items(world: World, setting: str, k: int, seed: int) -> ItemSet:
    """Sample one game instance at the given difficulty.

    easy: any k items; medium: two subjects splitting the set in half;
    hard: all k items share one subject.  Deterministic in (inputs, seed).
    """
    if setting not in SETTINGS:
        raise ConfigurationError(f"unknown setting '{setting}'")
    if k < 1:
        raise ConfigurationError("k must be >= 1")
    if len(world.items) < k:
        raise SamplingError(f"world has {len(world.items)} items; {k} requested")

    rng = random.Random(seed)
    by_subject: dict[str, list[Item]] = {}
    for item in world.items:
        by_subject.setdefault(item.subject, []).append(item)

    if setting == "easy":
        chosen = rng.sample(list(world.items), k)
    elif setting == "hard":
        eligible = sorted(s for s, members in by_subject.items() if len(members) >= k)
        if not eligible:
            richest = max(by_subject, key=lambda s: len(by_subject[s]))
            raise SamplingError(
                f"hard setting needs one subject with >= {k} items; "
                f"best is '{richest}' with {len(by_subject[richest])}"
            )
        subject = rng.choice(eligible)
        chosen = rng.sample(by_subject[subject], k)
    else:  # medium
        first_half = (k + 1) // 2
        second_half = k // 2
        eligible = sorted(s for s, members in by_subject.items() if len(members) >= first_half)
        if len(eligible) < 2:
            raise SamplingError(
                f"medium setting needs two subjects with >= {first_half} items each; "
                f"eligible: {eligible}"
            )
        a, b = rng.sample(eligible, 2)
        if len(by_subject[b]) < second_half:
            raise SamplingError(f"medium setting: subject '{b}' has too few items")
        chosen = rng.sample(by_subject[a], first_half) + rng.sample(by_subject[b], second_half)

    target_index = rng.randrange(k)
    return ItemSet(items=tuple(chosen), target_index=target_index, setting=setting)


def save_world(world: World, path: str | Path) -> None:
    """Write a world as JSON with stable key order."""
    doc = {
        "vocab": {key: list(values) for key, values in world.vocab.items()},
        "subjects": list(world.subjects),
        "items": [item.to_dict() for item in world.items],
    }
    Path(path).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def load_world(path: str | Path) -> World:
    """Load a world file, validating every item against the vocab."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    for field_name in ("vocab", "subjects", "items"):
        if field_name not in doc:
            raise FormatError(f"{path}: missing top-level key '{field_name}'")
    if not doc["items"]:
        raise FormatError(f"{path}: items list is empty")
    try:
        items = tuple(Item.from_dict(d) for d in doc["items"])
    except KeyError as exc:
        raise FormatError(f"{path}: item entry missing field {exc}") from exc
    return World(items=items, vocab=dict(doc["vocab"]), subjects=list(doc["subjects"]))
