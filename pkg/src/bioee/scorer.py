"""Scoring backends for the three classification stages.

A scorer answers three kinds of queries, always with probability
distributions (values summing to 1 within 1e-6):

  * ``tag``: per token, a distribution over BIO trigger labels;
  * ``classify_role``: per (trigger, filler) instance, over Theme/Cause/None;
  * ``classify_candidate``: per Theme-subset instance, over valid/invalid.

Three implementations: :class:`OracleScorer` replays gold annotations,
:class:`NoisyScorer` corrupts oracle decisions at configurable rates with
fully deterministic per-decision randomness, and :class:`RemoteScorer`
talks to a model service over HTTP.
"""

from __future__ import annotations

import hashlib
import logging
import random
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import requests

from bioee.corpus import split_sentences
from bioee.errors import ProtocolViolation, ScorerUnavailable
from bioee.instances import (
    CANDIDATE_LABELS,
    ROLE_LABELS,
    CandidateInstance,
    RoleInstance,
    TaggingInstance,
    make_tagging_instances,
    tag_label_vocab,
)
from bioee.standoff import Document, EventType, Role, Span

log = logging.getLogger(__name__)

DISTRIBUTION_TOLERANCE = 1e-6
# margin separating the preferred label in a no-information distribution
_EPSILON = 1e-4


class Scorer(ABC):
    @abstractmethod
    def tag(self, instances: Sequence[TaggingInstance]) -> list[list[dict[str, float]]]:
        """Per instance, per token: distribution over the BIO vocabulary."""

    @abstractmethod
    def classify_role(self, instances: Sequence[RoleInstance]) -> list[dict[str, float]]:
        """Per instance: distribution over Theme / Cause / None."""

    @abstractmethod
    def classify_candidate(
        self, instances: Sequence[CandidateInstance]
    ) -> list[dict[str, float]]:
        """Per instance: distribution over valid / invalid."""


def one_hot(vocab: Sequence[str], label: str) -> dict[str, float]:
    return {v: (1.0 if v == label else 0.0) for v in vocab}


def near_uniform(vocab: Sequence[str], preferred: str) -> dict[str, float]:
    """Approximately uniform, with a deterministic argmax on ``preferred``."""
    n = len(vocab)
    bump = _EPSILON * (n - 1) / n
    return {v: (1.0 / n + bump if v == preferred else 1.0 / n - _EPSILON / n) for v in vocab}


def check_distribution(dist: dict[str, float], where: str) -> None:
    total = sum(dist.values())
    if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
        raise ProtocolViolation(f"{where}: distribution sums to {total!r}")


class OracleScorer(Scorer):
    """Replays gold annotations for a fixed set of documents.

    Keys are character spans, not annotation ids, so queries generated
    from predicted triggers find the right gold answer whenever the
    prediction lands on a gold span.  Instances for unknown documents or
    with unexpected token counts get a near-uniform distribution whose
    argmax is the null label, and a warning.
    """

    def __init__(self, docs: Sequence[Document]):
        self._tag_labels: dict[tuple[str, int], tuple[str, ...]] = {}
        self._roles: dict[tuple[str, Span, Span], Role] = {}
        self._candidates: dict[tuple[str, Span], set[frozenset[str]]] = {}
        self._doc_ids: set[str] = set()
        for doc in docs:
            self._doc_ids.add(doc.doc_id)
            for inst in make_tagging_instances(doc, split_sentences(doc)):
                self._tag_labels[(doc.doc_id, inst.sentence_index)] = inst.labels
            for event in doc.events.values():
                trig_span = doc.triggers[event.trigger].span
                for arg in event.arguments:
                    if arg.is_event:
                        filler_span = doc.triggers[doc.events[arg.filler].trigger].span
                    else:
                        filler_span = doc.entities[arg.filler].span
                    key = (doc.doc_id, trig_span, filler_span)
                    if key in self._roles and self._roles[key] is not arg.role:
                        log.warning("pair %s carries both roles; keeping Theme", key)
                        self._roles[key] = Role.THEME
                    else:
                        self._roles[key] = arg.role
                if event.event_type is EventType.BINDING:
                    entity_themes = frozenset(
                        f for f in event.themes() if f in doc.entities
                    )
                    self._candidates.setdefault((doc.doc_id, trig_span), set()).add(
                        entity_themes
                    )

    # gold accessors return None when the query is outside the corpus

    def gold_tag_labels(self, instance: TaggingInstance) -> tuple[str, ...] | None:
        labels = self._tag_labels.get((instance.doc_id, instance.sentence_index))
        if labels is None or len(labels) != len(instance.tokens):
            return None
        return labels

    def gold_role_label(self, instance: RoleInstance) -> str | None:
        if instance.doc_id not in self._doc_ids:
            return None
        role = self._roles.get(
            (instance.doc_id, instance.trigger_span, instance.filler_span)
        )
        return role.value if role else "None"

    def gold_candidate_label(self, instance: CandidateInstance) -> str | None:
        if instance.doc_id not in self._doc_ids:
            return None
        valid_sets = self._candidates.get((instance.doc_id, instance.trigger_span), set())
        return "valid" if frozenset(instance.participants) in valid_sets else "invalid"

    def tag(self, instances):
        vocab = tag_label_vocab()
        out = []
        for inst in instances:
            labels = self.gold_tag_labels(inst)
            if labels is None:
                log.warning("unknown tagging instance %s; answering near-uniform", inst.id)
                out.append([near_uniform(vocab, "O") for _ in inst.tokens])
            else:
                out.append([one_hot(vocab, label) for label in labels])
        return out

    def classify_role(self, instances):
        out = []
        for inst in instances:
            label = self.gold_role_label(inst)
            if label is None:
                log.warning("unknown role instance %s; answering near-uniform", inst.id)
                out.append(near_uniform(ROLE_LABELS, "None"))
            else:
                out.append(one_hot(ROLE_LABELS, label))
        return out

    def classify_candidate(self, instances):
        out = []
        for inst in instances:
            label = self.gold_candidate_label(inst)
            if label is None:
                log.warning("unknown candidate instance %s; answering near-uniform", inst.id)
                out.append(near_uniform(CANDIDATE_LABELS, "invalid"))
            else:
                out.append(one_hot(CANDIDATE_LABELS, label))
        return out


@dataclass(frozen=True)
class NoiseConfig:
    """Per-stage corruption rates; 0 leaves a stage untouched."""

    seed: int = 0
    tag_flip: float = 0.0
    role_flip: float = 0.0
    candidate_flip: float = 0.0


def _rng(*parts) -> random.Random:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class NoisyScorer(Scorer):
    """Oracle answers with deterministic, provenance-keyed corruption.

    Each decision (a trigger run, a role pair, a candidate subset) draws
    its own generator from the seed and the instance identity, so results
    do not depend on batching, ordering, or prior queries.  Tag noise
    flips the type of a whole gold trigger run, never its extent: the
    failure mode under study is a wrong trigger class, not a wrong span.
    """

    def __init__(self, oracle: OracleScorer, config: NoiseConfig):
        self.oracle = oracle
        self.config = config

    def tag(self, instances):
        vocab = tag_label_vocab()
        out = []
        for inst in instances:
            labels = self.oracle.gold_tag_labels(inst)
            if labels is None:
                log.warning("unknown tagging instance %s; answering near-uniform", inst.id)
                out.append([near_uniform(vocab, "O") for _ in inst.tokens])
                continue
            corrupted = list(labels)
            for start, end, type_name in _runs(labels):
                rng = _rng(self.config.seed, "tag", inst.id, start)
                if rng.random() < self.config.tag_flip:
                    others = [t.value for t in EventType if t.value != type_name]
                    new_type = others[rng.randrange(len(others))]
                    corrupted[start] = f"B-{new_type}"
                    for i in range(start + 1, end):
                        corrupted[i] = f"I-{new_type}"
            out.append([one_hot(vocab, label) for label in corrupted])
        return out

    def classify_role(self, instances):
        out = []
        for inst in instances:
            label = self.oracle.gold_role_label(inst)
            if label is None:
                log.warning("unknown role instance %s; answering near-uniform", inst.id)
                out.append(near_uniform(ROLE_LABELS, "None"))
                continue
            rng = _rng(self.config.seed, "role", inst.id)
            if rng.random() < self.config.role_flip:
                others = [l for l in ROLE_LABELS if l != label]
                label = others[rng.randrange(len(others))]
            out.append(one_hot(ROLE_LABELS, label))
        return out

    def classify_candidate(self, instances):
        out = []
        for inst in instances:
            label = self.oracle.gold_candidate_label(inst)
            if label is None:
                log.warning("unknown candidate instance %s; answering near-uniform", inst.id)
                out.append(near_uniform(CANDIDATE_LABELS, "invalid"))
                continue
            rng = _rng(self.config.seed, "candidate", inst.id)
            if rng.random() < self.config.candidate_flip:
                label = "invalid" if label == "valid" else "valid"
            out.append(one_hot(CANDIDATE_LABELS, label))
        return out


def _runs(labels: Sequence[str]) -> list[tuple[int, int, str]]:
    """(start, end, type) for each contiguous B/I run."""
    runs = []
    open_start = None
    open_type = None
    for i, label in enumerate(labels):
        if label == "O":
            if open_type:
                runs.append((open_start, i, open_type))
            open_type = None
            continue
        prefix, _, type_name = label.partition("-")
        if prefix == "I" and type_name == open_type:
            continue
        if open_type:
            runs.append((open_start, i, open_type))
        open_start, open_type = i, type_name
    if open_type:
        runs.append((open_start, len(labels), open_type))
    return runs


class RemoteScorer(Scorer):
    """HTTP client for a model service implementing the scoring protocol.

    Requests are batched; transient failures (connection errors, 5xx) are
    retried with exponential backoff before :class:`ScorerUnavailable` is
    raised.  A 400 response or a malformed payload is a protocol bug, not
    an availability problem, and raises :class:`ProtocolViolation`.
    """

    def __init__(
        self,
        endpoint: str,
        batch_size: int = 32,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.5,
        session: requests.Session | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        # sessions are not guaranteed thread-safe, so unless the caller
        # supplies one, each worker thread gets its own
        self._shared_session = session
        self._local = threading.local()

    def _session(self) -> requests.Session:
        if self._shared_session is not None:
            return self._shared_session
        if not hasattr(self._local, "session"):
            self._local.session = requests.Session()
        return self._local.session

    def _post(self, path: str, payload: dict) -> dict:
        url = f"{self.endpoint}{path}"
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._session().post(url, json=payload, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                log.warning("POST %s failed (%s); attempt %d", url, exc, attempt + 1)
                continue
            if resp.status_code >= 500:
                last_error = ScorerUnavailable(f"{url} -> {resp.status_code}")
                log.warning("POST %s -> %d; attempt %d", url, resp.status_code, attempt + 1)
                continue
            if resp.status_code == 400:
                try:
                    message = resp.json().get("error", resp.text)
                except ValueError:
                    message = resp.text
                raise ProtocolViolation(f"{url} rejected request: {message}")
            if resp.status_code != 200:
                raise ProtocolViolation(f"{url} -> unexpected status {resp.status_code}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ProtocolViolation(f"{url} returned non-JSON body") from exc
        raise ScorerUnavailable(f"{url} unreachable after {self.retries + 1} attempts: {last_error}")

    def _results_by_id(self, body: dict, sent_ids: list[str], path: str) -> dict[str, dict]:
        results = body.get("results")
        if not isinstance(results, list):
            raise ProtocolViolation(f"{path}: body lacks a results list")
        by_id = {}
        for item in results:
            if not isinstance(item, dict) or "id" not in item:
                raise ProtocolViolation(f"{path}: result item without id")
            if item["id"] in by_id:
                raise ProtocolViolation(f"{path}: duplicate result id {item['id']!r}")
            by_id[item["id"]] = item
        missing = [i for i in sent_ids if i not in by_id]
        extra = [i for i in by_id if i not in set(sent_ids)]
        if missing or extra:
            raise ProtocolViolation(
                f"{path}: response ids do not match request (missing {missing[:3]}, extra {extra[:3]})"
            )
        return by_id

    def _batches(self, instances):
        for i in range(0, len(instances), self.batch_size):
            yield instances[i : i + self.batch_size]

    def tag(self, instances):
        vocab = tag_label_vocab()
        known = set(vocab)
        out = []
        for batch in self._batches(list(instances)):
            payload = {
                "instances": [{"id": i.id, "tokens": list(i.tokens)} for i in batch]
            }
            body = self._post("/v1/tag", payload)
            by_id = self._results_by_id(body, [i.id for i in batch], "/v1/tag")
            for inst in batch:
                labels = by_id[inst.id].get("labels")
                if not isinstance(labels, list) or len(labels) != len(inst.tokens):
                    raise ProtocolViolation(
                        f"/v1/tag: instance {inst.id} expected {len(inst.tokens)} labels"
                    )
                for label in labels:
                    if label not in known:
                        raise ProtocolViolation(f"/v1/tag: unknown label {label!r}")
                out.append([one_hot(vocab, label) for label in labels])
        return out

    def _classify(self, path: str, instances, vocab: tuple[str, ...]):
        out = []
        for batch in self._batches(list(instances)):
            payload = {
                "instances": [{"id": i.id, "tokens": list(i.tokens)} for i in batch]
            }
            body = self._post(path, payload)
            by_id = self._results_by_id(body, [i.id for i in batch], path)
            for inst in batch:
                probs = by_id[inst.id].get("probs")
                if not isinstance(probs, list) or len(probs) != len(vocab):
                    raise ProtocolViolation(
                        f"{path}: instance {inst.id} expected {len(vocab)} probabilities"
                    )
                dist = {label: float(p) for label, p in zip(vocab, probs)}
                check_distribution(dist, f"{path}:{inst.id}")
                out.append(dist)
        return out

    def classify_role(self, instances):
        return self._classify("/v1/role", instances, ROLE_LABELS)

    def classify_candidate(self, instances):
        return self._classify("/v1/candidate", instances, CANDIDATE_LABELS)
