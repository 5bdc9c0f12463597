"""Candidate question pools: open wh- templates, polar yes/no templates,
decomposition of open questions into existence checks, and pool ingestion.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ContractError, FormatError
from .world import SUBJECT_KEY, Item, ItemSet, World

OPEN = "open"
POLAR = "polar"

SUBJECT_QUESTION_TEXT = "What is the subject of the image?"

# Words that end the noun span when pulling subjects out of free text.
_PREPOSITIONS = {
    "in", "on", "at", "of", "to", "with", "under", "over", "near", "by",
    "behind", "above", "below", "beside", "between", "from", "for", "inside",
    "outside", "around", "next",
}
_DETERMINERS = {"the", "a", "an"}

_IRREGULAR_PLURALS = {"people", "men", "women", "children"}

POLAR_TEXT_RE = re.compile(r"^(Is there an? |Are there ).+\?$")


@dataclass(frozen=True)
class Question:
    id: int
    text: str
    kind: str  # open | polar
    probe: str  # attribute key (open) or noun phrase (polar)
    presupposed_subjects: tuple[str, ...] = ()
    source_item: int | None = None

    def __post_init__(self):
        if self.kind not in (OPEN, POLAR):
            raise ContractError(f"unknown question kind '{self.kind}'")
        if self.kind == POLAR and self.presupposed_subjects:
            raise ContractError("polar questions carry no presupposed subjects")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "kind": self.kind,
            "probe": self.probe,
            "presupposed_subjects": list(self.presupposed_subjects),
            "source_item": self.source_item,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Question":
        return cls(
            id=d["id"],
            text=d["text"],
            kind=d["kind"],
            probe=d["probe"],
            presupposed_subjects=tuple(d.get("presupposed_subjects") or ()),
            source_item=d.get("source_item"),
        )


@dataclass(frozen=True)
class PolarCheck:
    """An existence probe of the form "Is there a/an <NP>?" / "Are there <NP>?"."""

    text: str
    np: str


@dataclass
class QuestionPool:
    questions: list[Question]
    by_id: dict[int, Question] = field(init=False)

    def __post_init__(self):
        self.by_id = {}
        for q in self.questions:
            if q.id in self.by_id:
                raise FormatError(f"duplicate question id {q.id}")
            self.by_id[q.id] = q

    def __len__(self):
        return len(self.questions)

    def __iter__(self):
        return iter(self.questions)


def is_plural(np: str) -> bool:
    head = np.split()[-1] if np.split() else np
    if head in _IRREGULAR_PLURALS:
        return True
    return head.endswith("s") and not head.endswith("ss")


def polar_text(np: str) -> str:
    if is_plural(np):
        return f"Are there {np}?"
    article = "an" if np[:1].lower() in "aeiou" else "a"
    return f"Is there {article} {np}?"


def make_polar_check(np: str) -> PolarCheck:
    return PolarCheck(text=polar_text(np), np=np)


def generate_open_pool(items: ItemSet, world: World) -> QuestionPool:
    """Template open questions: one per (item, non-subject attribute key),
    presupposing the item's subject, plus the always-relevant subject question.
    Duplicates (same probe and presuppositions) keep the lowest id.
    """
    questions: list[Question] = []
    seen: set[tuple] = set()
    next_id = 0

    def emit(text, probe, presupposed, source_item):
        nonlocal next_id
        key = (probe, presupposed)
        if key in seen:
            return
        seen.add(key)
        questions.append(
            Question(
                id=next_id,
                text=text,
                kind=OPEN,
                probe=probe,
                presupposed_subjects=presupposed,
                source_item=source_item,
            )
        )
        next_id += 1

    emit(SUBJECT_QUESTION_TEXT, SUBJECT_KEY, (), None)
    for item in items.items:
        for key in world.attribute_keys():
            if key == SUBJECT_KEY or key not in item.attributes:
                continue
            emit(
                f"What {key} is the {item.subject}?",
                key,
                (item.subject,),
                item.id,
            )
    return QuestionPool(questions)


def generate_polar_pool(items: ItemSet) -> QuestionPool:
    """Polar existence questions: the subject NP of each item plus every
    (attribute value + subject) compound NP, de-duplicated.
    """
    questions: list[Question] = []
    seen: set[str] = set()
    next_id = 0

    def emit(np, source_item):
        nonlocal next_id
        if np in seen:
            return
        seen.add(np)
        questions.append(
            Question(
                id=next_id,
                text=polar_text(np),
                kind=POLAR,
                probe=np,
                source_item=source_item,
            )
        )
        next_id += 1

    for item in items.items:
        emit(item.subject, item.id)
        for key, value in item.attributes.items():
            if key == SUBJECT_KEY:
                continue
            emit(f"{value} {item.subject}", item.id)
    return QuestionPool(questions)


def decompose_to_polar(q: Question) -> list[PolarCheck]:
    """One existence check per presupposed subject, in order."""
    if q.kind != OPEN:
        raise ContractError("only open questions decompose into polar checks")
    return [make_polar_check(s) for s in q.presupposed_subjects]


def extract_subjects(text: str) -> list[str]:
    """Pull candidate subject nouns out of free question text.

    Takes the last token of each determiner-started span, cut at a preposition
    or sentence end; lowercased and de-duplicated in order.  Used only for
    ingested questions that omit explicit presupposed subjects.
    """
    tokens = re.findall(r"[A-Za-z']+", text.lower())
    found: list[str] = []
    i = 0
    while i < len(tokens):
        if tokens[i] in _DETERMINERS:
            span = []
            j = i + 1
            while j < len(tokens) and tokens[j] not in _PREPOSITIONS and tokens[j] not in _DETERMINERS:
                span.append(tokens[j])
                j += 1
            if span and span[-1] not in found:
                found.append(span[-1])
            i = j
        else:
            i += 1
    return found


def ingest_pool(path: str | Path, world: World) -> QuestionPool:
    """Load an externally generated question pool.

    Entries without presupposed_subjects get them filled by extract_subjects.
    Open probes must name a vocab attribute key.
    """
    try:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    if not isinstance(entries, list):
        raise FormatError(f"{path}: expected a JSON list of questions")

    questions = []
    for entry in entries:
        try:
            qid, text, kind, probe = entry["id"], entry["text"], entry["kind"], entry["probe"]
        except KeyError as exc:
            raise FormatError(f"{path}: question entry missing field {exc}") from exc
        if kind == OPEN and probe not in world.vocab:
            raise FormatError(f"{path}: question {qid} probes unknown attribute key '{probe}'")
        if kind == POLAR:
            presupposed: tuple[str, ...] = ()
        elif "presupposed_subjects" in entry and entry["presupposed_subjects"] is not None:
            presupposed = tuple(entry["presupposed_subjects"])
        else:
            presupposed = tuple(extract_subjects(text))
        questions.append(
            Question(
                id=qid,
                text=text,
                kind=kind,
                probe=probe,
                presupposed_subjects=presupposed,
                source_item=entry.get("source_item"),
            )
        )
    return QuestionPool(questions)


def compound_nps(item: Item) -> set[str]:
    """All noun phrases the item satisfies: its subject and value+subject compounds."""
    nps = {item.subject}
    for key, value in item.attributes.items():
        if key != SUBJECT_KEY:
            nps.add(f"{value} {item.subject}")
    return nps
