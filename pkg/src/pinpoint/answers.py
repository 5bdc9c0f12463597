"""Answer models: P(response | question, item).

Ships an exact synthetic oracle plus HTTP and stdio adapters for external
models speaking a one-request-per-pair JSON protocol.
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass

import httpx

from .errors import (
    ConfigurationError,
    ContractError,
    ModelUnavailableError,
    ProtocolError,
)
from .questions import OPEN, PolarCheck, Question, compound_nps
from .seeding import stable_int
from .world import Item, World

YES = "yes"
NO = "no"

_SUM_TOL = 1e-9


@dataclass(frozen=True)
class AnswerDistribution:
    """Normalized probability map over response tokens."""

    support: tuple[str, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.support) != len(self.probs):
            raise ContractError("support and probs must be parallel")
        if len(set(self.support)) != len(self.support):
            raise ContractError("support tokens must be unique")
        if any(p < 0.0 for p in self.probs):
            raise ContractError("probabilities must be non-negative")
        total = sum(self.probs)
        if abs(total - 1.0) > _SUM_TOL:
            raise ContractError(f"probabilities sum to {total!r}, expected 1")

    @classmethod
    def from_map(cls, mapping: dict[str, float], renormalize: bool = False) -> "AnswerDistribution":
        support = tuple(mapping.keys())
        probs = tuple(float(mapping[t]) for t in support)
        if renormalize:
            total = sum(probs)
            if total <= 0.0:
                raise ContractError("cannot normalize a zero-mass distribution")
            probs = tuple(p / total for p in probs)
        return cls(support=support, probs=probs)

    def prob(self, token: str) -> float:
        for t, p in zip(self.support, self.probs):
            if t == token:
                return p
        return 0.0

    def as_map(self) -> dict[str, float]:
        return dict(zip(self.support, self.probs))

    def top_m(self, m: int) -> "AnswerDistribution":
        """Keep the m most probable tokens (stable order on ties), renormalized."""
        if m <= 0:
            raise ContractError("top_m requires m >= 1")
        if m >= len(self.support):
            return self
        order = sorted(range(len(self.support)), key=lambda i: -self.probs[i])
        keep = sorted(order[:m])
        total = sum(self.probs[i] for i in keep)
        if total <= 0.0:
            raise ContractError("top_m support carries no mass")
        return AnswerDistribution(
            support=tuple(self.support[i] for i in keep),
            probs=tuple(self.probs[i] / total for i in keep),
        )


@dataclass(frozen=True)
class OracleConfig:
    noise: float = 0.0
    hallucination_confidence: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.noise < 1.0:
            raise ConfigurationError("noise must lie in [0, 1)")
        if not 0.0 <= self.hallucination_confidence <= 1.0:
            raise ConfigurationError("hallucination_confidence must lie in [0, 1]")


def _spread(support: list[str], peak: str, peak_mass: float) -> AnswerDistribution:
    """peak_mass on peak, remainder uniform over the other tokens."""
    if len(support) == 1:
        return AnswerDistribution(support=(support[0],), probs=(1.0,))
    rest = (1.0 - peak_mass) / (len(support) - 1)
    probs = tuple(peak_mass if t == peak else rest for t in support)
    return AnswerDistribution(support=tuple(support), probs=probs)


class SyntheticOracle:
    """Exact, deterministic answer model over the world vocabulary.

    Relevant open questions answer truthfully up to uniform noise.  Questions
    whose presupposition fails on the item are answered confidently anyway:
    mass hallucination_confidence lands on a seeded spurious value.
    """

    def __init__(self, world: World, config: OracleConfig):
        self.world = world
        self.config = config

    def answer_distribution(self, q: Question, item: Item) -> AnswerDistribution:
        if q.kind != OPEN:
            raise ContractError("answer_distribution handles open questions only")
        vocab = self.world.vocab.get(q.probe)
        if vocab is None:
            raise ContractError(f"question {q.id} probes unknown attribute key '{q.probe}'")
        holds = all(s == item.subject for s in q.presupposed_subjects)
        truth = item.attributes.get(q.probe)
        if holds and truth is not None:
            return _spread(vocab, truth, 1.0 - self.config.noise)
        spurious = vocab[stable_int(self.config.seed, "spurious", q.id, item.id) % len(vocab)]
        return _spread(vocab, spurious, self.config.hallucination_confidence)

    def polar_distribution(self, check: PolarCheck, item: Item) -> AnswerDistribution:
        matches = check.np == item.subject or check.np in compound_nps(item)
        p_yes = 1.0 - self.config.noise if matches else self.config.noise
        return AnswerDistribution(support=(YES, NO), probs=(p_yes, 1.0 - p_yes))


def _validated_probs(payload) -> AnswerDistribution:
    if not isinstance(payload, dict) or "probs" not in payload:
        raise ProtocolError("reply missing 'probs' field")
    probs = payload["probs"]
    if not isinstance(probs, dict) or not probs:
        raise ProtocolError("'probs' must be a non-empty object")
    for token, p in probs.items():
        if not isinstance(token, str) or not isinstance(p, (int, float)):
            raise ProtocolError("'probs' must map tokens to numbers")
        if p < 0:
            raise ProtocolError(f"negative probability for token '{token}'")
    if sum(probs.values()) <= 0:
        raise ProtocolError("reply distribution carries no mass")
    return AnswerDistribution.from_map(probs, renormalize=True)


class HttpAnswerModel:
    """Adapter for an HTTP answer model.

    Request: {"question": str, "item": {...}, "candidates": [str]?}
    Reply:   {"probs": {token: float, ...}} — renormalized at this boundary.
    """

    def __init__(self, endpoint: str, timeout: float = 10.0):
        self.endpoint = endpoint
        self.timeout = timeout
        self._client = httpx.Client(timeout=timeout)

    def _query(self, question_text: str, item: Item, candidates: list[str] | None) -> AnswerDistribution:
        body = {"question": question_text, "item": item.to_dict()}
        if candidates is not None:
            body["candidates"] = candidates
        try:
            reply = self._client.post(self.endpoint, json=body)
        except httpx.HTTPError as exc:
            raise ModelUnavailableError(f"answer model at {self.endpoint} unreachable: {exc}") from exc
        if reply.status_code != 200:
            raise ModelUnavailableError(
                f"answer model at {self.endpoint} returned status {reply.status_code}"
            )
        try:
            payload = reply.json()
        except ValueError as exc:
            raise ProtocolError("reply body is not valid JSON") from exc
        return _validated_probs(payload)

    def answer_distribution(self, q: Question, item: Item) -> AnswerDistribution:
        return self._query(q.text, item, None)

    def polar_distribution(self, check: PolarCheck, item: Item) -> AnswerDistribution:
        dist = self._query(check.text, item, [YES, NO])
        mass = {YES: dist.prob(YES), NO: dist.prob(NO)}
        if mass[YES] + mass[NO] <= 0:
            raise ProtocolError("polar reply carries no yes/no mass")
        return AnswerDistribution.from_map(mass, renormalize=True)

    def close(self):
        self._client.close()


class StdioAnswerModel:
    """Adapter for a line-delimited JSON subprocess: one request line in, one
    reply line out.  Serial contract — callers must not interleave requests.
    """

    def __init__(self, command: list[str]):
        self.command = list(command)
        self._proc: subprocess.Popen | None = None

    def _ensure_started(self):
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.command,
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    text=True,
                )
            except OSError as exc:
                raise ModelUnavailableError(f"cannot launch {self.command[0]}: {exc}") from exc

    def _query(self, question_text: str, item: Item, candidates: list[str] | None) -> AnswerDistribution:
        self._ensure_started()
        assert self._proc is not None and self._proc.stdin and self._proc.stdout
        body = {"question": question_text, "item": item.to_dict()}
        if candidates is not None:
            body["candidates"] = candidates
        try:
            self._proc.stdin.write(json.dumps(body) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise ModelUnavailableError(f"answer model process died: {exc}") from exc
        if not line:
            raise ModelUnavailableError("answer model process closed its output")
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"reply line is not valid JSON: {line!r}") from exc
        return _validated_probs(payload)

    def answer_distribution(self, q: Question, item: Item) -> AnswerDistribution:
        return self._query(q.text, item, None)

    def polar_distribution(self, check: PolarCheck, item: Item) -> AnswerDistribution:
        dist = self._query(check.text, item, [YES, NO])
        mass = {YES: dist.prob(YES), NO: dist.prob(NO)}
        if mass[YES] + mass[NO] <= 0:
            raise ProtocolError("polar reply carries no yes/no mass")
        return AnswerDistribution.from_map(mass, renormalize=True)

    def close(self):
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.terminate()
            self._proc.wait(timeout=5)
            self._proc = None
