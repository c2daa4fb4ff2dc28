"""Classifier instances for the three pipeline stages.

All stages share one text encoding: protein entities are masked to the
single token ``gene`` (one token per entity, however many words it spans),
trigger words stay as they appear.  On top of that, role and candidate
instances mark spans with reserved tokens:

    #  around the trigger under consideration
    @  around the argument / participating entities
    $  around assigned theme entities left out of a binding candidate

Tagging instances carry per-token BIO labels over trigger runs; decoding
repairs orphan I- tags and treats a type change as a run boundary.
"""

from __future__ import annotations

import json
import logging
import pathlib
from dataclasses import dataclass

from bioee.corpus import Sentence
from bioee.standoff import (
    COMPOSITION,
    Document,
    Entity,
    EventType,
    Role,
    Span,
    Trigger,
    id_number,
)

log = logging.getLogger(__name__)

TRIGGER_MARK = "#"
ARG_MARK = "@"
OTHER_MARK = "$"
ENTITY_MASK = "gene"

ROLE_LABELS = ("Theme", "Cause", "None")
CANDIDATE_LABELS = ("valid", "invalid")


def tag_label_vocab() -> tuple[str, ...]:
    """BIO label set in fixed order; O first so argmax ties fall to it."""
    labels = ["O"]
    for etype in EventType:
        labels.append(f"B-{etype.value}")
        labels.append(f"I-{etype.value}")
    return tuple(labels)


@dataclass(frozen=True)
class MaskedToken:
    text: str
    span: Span
    entity_id: str | None = None
    trigger_id: str | None = None


@dataclass(frozen=True)
class TaggingInstance:
    id: str
    doc_id: str
    sentence_index: int
    tokens: tuple[str, ...]
    spans: tuple[Span, ...]
    labels: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        d = {
            "kind": "tag",
            "id": self.id,
            "doc_id": self.doc_id,
            "sentence_index": self.sentence_index,
            "tokens": list(self.tokens),
            "spans": [[s.start, s.end] for s in self.spans],
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d


@dataclass(frozen=True)
class RoleInstance:
    id: str
    doc_id: str
    sentence_index: int
    trigger_id: str
    filler_id: str
    trigger_span: Span
    filler_span: Span
    tokens: tuple[str, ...]
    label: str | None = None

    def to_dict(self) -> dict:
        d = {
            "kind": "role",
            "id": self.id,
            "doc_id": self.doc_id,
            "sentence_index": self.sentence_index,
            "trigger_id": self.trigger_id,
            "filler_id": self.filler_id,
            "trigger_span": [self.trigger_span.start, self.trigger_span.end],
            "filler_span": [self.filler_span.start, self.filler_span.end],
            "tokens": list(self.tokens),
        }
        if self.label is not None:
            d["label"] = self.label
        return d


@dataclass(frozen=True)
class CandidateInstance:
    id: str
    doc_id: str
    trigger_id: str
    trigger_span: Span
    participants: tuple[str, ...]  # entity ids, numeric order
    tokens: tuple[str, ...]
    label: str | None = None

    def to_dict(self) -> dict:
        d = {
            "kind": "candidate",
            "id": self.id,
            "doc_id": self.doc_id,
            "trigger_id": self.trigger_id,
            "trigger_span": [self.trigger_span.start, self.trigger_span.end],
            "participants": list(self.participants),
            "tokens": list(self.tokens),
        }
        if self.label is not None:
            d["label"] = self.label
        return d


def write_jsonl(path: str | pathlib.Path, items) -> int:
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with path.open("w") as fh:
        for item in items:
            row = item if isinstance(item, dict) else item.to_dict()
            fh.write(json.dumps(row, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path: str | pathlib.Path) -> list[dict]:
    with pathlib.Path(path).open() as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _covering(span: Span, table: dict) -> str | None:
    """Id of the annotation covering the token; the longest wins on overlap."""
    best = None
    for ann_id, ann in table.items():
        if ann.span.contains(span):
            if best is None or ann.span.length > table[best].span.length:
                best = ann_id
    return best


def mask_tokens(
    entities: dict[str, Entity],
    triggers: dict[str, Trigger],
    sentence: Sentence,
) -> tuple[MaskedToken, ...]:
    """Sentence tokens with each entity collapsed to one masked token.

    A token inside both a trigger and an entity stays a trigger token:
    hiding trigger words would starve the very classifier this feeds.
    """
    out: list[MaskedToken] = []
    i = 0
    tokens = sentence.tokens
    while i < len(tokens):
        tok = tokens[i]
        trig = _covering(tok.span, triggers)
        if trig is not None:
            out.append(MaskedToken(tok.text, tok.span, None, trig))
            i += 1
            continue
        ent = _covering(tok.span, entities)
        if ent is None:
            out.append(MaskedToken(tok.text, tok.span))
            i += 1
            continue
        j = i
        while (
            j + 1 < len(tokens)
            and _covering(tokens[j + 1].span, entities) == ent
            and _covering(tokens[j + 1].span, triggers) is None
        ):
            j += 1
        out.append(MaskedToken(ENTITY_MASK, Span(tok.span.start, tokens[j].span.end), ent, None))
        i = j + 1
    return tuple(out)


def resolve_trigger_overlaps(
    triggers: dict[str, Trigger],
) -> tuple[dict[str, Trigger], list[Trigger]]:
    """Pick a non-overlapping subset of triggers for BIO labeling.

    Longer spans win, then earlier start, then smaller id.  The dropped
    ones are returned so callers can log them; they are unrepresentable
    in a flat tag sequence, not wrong.
    """
    order = sorted(
        triggers.values(), key=lambda t: (-t.span.length, t.span.start, id_number(t.id))
    )
    kept: dict[str, Trigger] = {}
    dropped: list[Trigger] = []
    for trig in order:
        if any(trig.span.overlaps(k.span) for k in kept.values()):
            dropped.append(trig)
        else:
            kept[trig.id] = trig
    return kept, dropped


def make_tagging_instances(
    doc: Document, sentences: tuple[Sentence, ...], with_labels: bool = True
) -> list[TaggingInstance]:
    """One instance per sentence: entity-masked tokens plus BIO labels.

    Tokens are produced without looking at the triggers (they are what the
    tagger predicts); the labels come from gold triggers after resolving
    overlaps in favor of the longer span.
    """
    kept, dropped = resolve_trigger_overlaps(doc.triggers)
    for trig in dropped:
        log.warning(
            "doc=%s trigger %s %s overlaps a longer one; excluded from tagging labels",
            doc.doc_id,
            trig.id,
            trig.event_type.value,
        )
    out = []
    labeled: set[str] = set()
    for sent in sentences:
        masked = mask_tokens(doc.entities, {}, sent)
        labels: list[str] | None = None
        if with_labels:
            labels = []
            prev_trig = None
            for tok in masked:
                trig_id = _covering(tok.span, kept)
                if trig_id is None:
                    labels.append("O")
                else:
                    labeled.add(trig_id)
                    prefix = "I" if trig_id == prev_trig else "B"
                    labels.append(f"{prefix}-{kept[trig_id].event_type.value}")
                prev_trig = trig_id
        out.append(
            TaggingInstance(
                id=f"{doc.doc_id}|s{sent.index}",
                doc_id=doc.doc_id,
                sentence_index=sent.index,
                tokens=tuple(t.text for t in masked),
                spans=tuple(t.span for t in masked),
                labels=tuple(labels) if labels is not None else None,
            )
        )
    if with_labels:
        for trig_id in set(kept) - labeled:
            log.warning(
                "doc=%s trigger %s covers no maskable token; unrepresentable in BIO",
                doc.doc_id,
                trig_id,
            )
    return out


def decode_bio(labels, spans) -> list[tuple[EventType, Span]]:
    """Recover typed trigger spans from a BIO sequence.

    An I- tag opening a run (no matching B-) is repaired to a B-; an I-
    whose type differs from the open run closes it and starts a new one.
    """
    if len(labels) != len(spans):
        raise ValueError(f"{len(labels)} labels vs {len(spans)} spans")
    runs: list[tuple[EventType, Span]] = []
    open_type: str | None = None
    start = end = 0
    for label, span in zip(labels, spans):
        if label == "O":
            if open_type:
                runs.append((EventType(open_type), Span(start, end)))
            open_type = None
            continue
        prefix, _, type_name = label.partition("-")
        if prefix not in ("B", "I") or not type_name:
            raise ValueError(f"bad BIO label: {label!r}")
        if prefix == "I" and open_type == type_name:
            end = span.end
            continue
        if open_type:
            runs.append((EventType(open_type), Span(start, end)))
        open_type = type_name
        start, end = span.start, span.end
    if open_type:
        runs.append((EventType(open_type), Span(start, end)))
    return runs


@dataclass(frozen=True)
class RolePair:
    sentence_index: int
    trigger_id: str
    filler_id: str


def enumerate_role_pairs(
    entities: dict[str, Entity],
    triggers: dict[str, Trigger],
    sentences: tuple[Sentence, ...],
) -> list[RolePair]:
    """All sentence-local (trigger, candidate filler) pairs, in fixed order.

    Entities are candidates for every trigger; other triggers only for
    types whose composition admits event-valued arguments.  Pairs never
    cross a sentence boundary, mirroring how arguments are annotated.
    """
    pairs = []
    for sent in sentences:
        local_triggers = [
            t for t in triggers.values() if sent.span.contains(t.span)
        ]
        local_entities = [e for e in entities.values() if sent.span.contains(e.span)]
        local_triggers.sort(key=lambda t: (t.span, id_number(t.id)))
        local_entities.sort(key=lambda e: (e.span, id_number(e.id)))
        for trig in local_triggers:
            for ent in local_entities:
                pairs.append(RolePair(sent.index, trig.id, ent.id))
            if COMPOSITION[trig.event_type].admits_event_arguments:
                for other in local_triggers:
                    if other.id != trig.id:
                        pairs.append(RolePair(sent.index, trig.id, other.id))
    return pairs


def _wrap(tokens: list[str], lo: int, hi: int, mark: str) -> None:
    """Insert mark tokens around positions [lo, hi)."""
    tokens.insert(hi, mark)
    tokens.insert(lo, mark)


def _token_range(masked: tuple[MaskedToken, ...], span: Span) -> tuple[int, int] | None:
    idx = [i for i, t in enumerate(masked) if span.contains(t.span)]
    if not idx:
        return None
    return idx[0], idx[-1] + 1


def mark_sentence(
    masked: tuple[MaskedToken, ...],
    marks: list[tuple[Span, str]],
) -> tuple[str, ...]:
    """Apply (span, mark) wrappings to a masked sentence.

    Ranges are wrapped right-to-left so earlier insertions do not shift
    later ones; spans that cover no token are skipped with a warning.
    """
    tokens = [t.text for t in masked]
    ranges = []
    for span, mark in marks:
        rng = _token_range(masked, span)
        if rng is None:
            log.warning("mark span %s covers no token; skipped", span)
            continue
        ranges.append((rng[0], rng[1], mark))
    for lo, hi, mark in sorted(ranges, key=lambda r: (-r[0], -r[1])):
        _wrap(tokens, lo, hi, mark)
    return tuple(tokens)


def gold_role_labels(doc: Document) -> dict[tuple[str, str], Role]:
    """Gold label for each (trigger id, filler id) pair used by any event.

    Event-valued arguments are keyed by the sub-event's trigger, which is
    how the role stage sees them.  If one pair carries both roles across
    events, Theme wins; the conflict is logged.
    """
    labels: dict[tuple[str, str], Role] = {}
    for event in doc.events.values():
        for arg in event.arguments:
            filler = arg.filler
            if arg.is_event:
                filler = doc.events[filler].trigger
            key = (event.trigger, filler)
            if key in labels and labels[key] is not arg.role:
                log.warning(
                    "doc=%s pair %s carries both roles; keeping Theme", doc.doc_id, key
                )
                labels[key] = Role.THEME
            else:
                labels[key] = arg.role
    return labels


def make_role_instance(
    entities: dict[str, Entity],
    triggers: dict[str, Trigger],
    masked: tuple[MaskedToken, ...],
    doc_id: str,
    sentence_index: int,
    pair: RolePair,
    label: str | None = None,
) -> RoleInstance:
    trig = triggers[pair.trigger_id]
    filler_span = (
        entities[pair.filler_id].span
        if pair.filler_id in entities
        else triggers[pair.filler_id].span
    )
    tokens = mark_sentence(masked, [(trig.span, TRIGGER_MARK), (filler_span, ARG_MARK)])
    return RoleInstance(
        id=f"{doc_id}|s{sentence_index}|{pair.trigger_id}|{pair.filler_id}",
        doc_id=doc_id,
        sentence_index=sentence_index,
        trigger_id=pair.trigger_id,
        filler_id=pair.filler_id,
        trigger_span=trig.span,
        filler_span=filler_span,
        tokens=tokens,
        label=label,
    )


def make_role_dataset(doc: Document, sentences: tuple[Sentence, ...]) -> list[RoleInstance]:
    """Labeled role instances for one gold-annotated document."""
    gold = gold_role_labels(doc)
    pairs = enumerate_role_pairs(doc.entities, doc.triggers, sentences)
    enumerated = {(p.trigger_id, p.filler_id) for p in pairs}
    for key in gold:
        if key not in enumerated:
            log.warning(
                "doc=%s gold argument %s not sentence-local; unreachable by the role stage",
                doc.doc_id,
                key,
            )
    masked_by_sentence = {
        s.index: mask_tokens(doc.entities, doc.triggers, s) for s in sentences
    }
    out = []
    for pair in pairs:
        role = gold.get((pair.trigger_id, pair.filler_id))
        out.append(
            make_role_instance(
                doc.entities,
                doc.triggers,
                masked_by_sentence[pair.sentence_index],
                doc.doc_id,
                pair.sentence_index,
                pair,
                label=role.value if role else "None",
            )
        )
    return out
