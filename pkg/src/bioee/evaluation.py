"""Event-level scoring of predictions against gold annotations.

Two matching modes:

  * strict: trigger spans must be identical and the full argument
    structure, recursively, must be identical;
  * approximate: a trigger span may extend up to one word beyond the gold
    span on either side (it must still overlap the gold span), and
    event-valued arguments are matched by type, trigger span, and Theme
    set only, with their Cause arguments ignored.

Matching is one-to-one and greedy in id order on both sides, which makes
the matched-pair count independent of which side is called "predicted".
The cascade analysis partitions Binding false positives by the earliest
pipeline stage that could have prevented each one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from bioee.errors import DocIdMismatch
from bioee.standoff import (
    Document,
    Entity,
    Event,
    EventType,
    Role,
    Span,
    Trigger,
    id_number,
)

log = logging.getLogger(__name__)

MODES = ("strict", "approximate")


@dataclass(frozen=True)
class DocumentPrediction:
    """One document's predicted triggers and events.

    Entity ids refer to the gold .a1 entities; trigger ids are the
    prediction's own table (they may or may not coincide with gold ids).
    """

    doc_id: str
    triggers: dict[str, Trigger]
    events: dict[str, Event]


def prediction_from_document(doc: Document) -> DocumentPrediction:
    return DocumentPrediction(doc.doc_id, dict(doc.triggers), dict(doc.events))


@dataclass
class Counts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": round(100 * self.precision, 2),
            "recall": round(100 * self.recall, 2),
            "f1": round(100 * self.f1, 2),
        }


@dataclass
class EvalReport:
    mode: str
    documents: int
    overall: Counts = field(default_factory=Counts)
    per_type: dict[EventType, Counts] = field(default_factory=dict)

    def counts(self, etype: EventType) -> Counts:
        return self.per_type.setdefault(etype, Counts())

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "documents": self.documents,
            "overall": self.overall.as_dict(),
            "by_type": {
                t.value: self.per_type[t].as_dict()
                for t in EventType
                if t in self.per_type
            },
        }


def extend_one_word(text: str, span: Span) -> Span:
    """The span widened by one whitespace-delimited word on each side."""
    i = span.start
    while i > 0 and text[i - 1].isspace():
        i -= 1
    while i > 0 and not text[i - 1].isspace():
        i -= 1
    j = span.end
    while j < len(text) and text[j].isspace():
        j += 1
    while j < len(text) and not text[j].isspace():
        j += 1
    return Span(min(i, span.start), max(j, span.end))


def span_matches(pred: Span, gold: Span, text: str, approximate: bool) -> bool:
    if not approximate:
        return pred == gold
    ext = extend_one_word(text, gold)
    return ext.start <= pred.start and pred.end <= ext.end and pred.overlaps(gold)


@dataclass(frozen=True)
class _View:
    entities: dict[str, Entity]
    triggers: dict[str, Trigger]
    events: dict[str, Event]


def _event_matches(
    pred_id: str,
    gold_id: str,
    pred: _View,
    gold: _View,
    text: str,
    approximate: bool,
    depth: int = 0,
) -> bool:
    pe, ge = pred.events[pred_id], gold.events[gold_id]
    if pe.event_type is not ge.event_type:
        return False
    if not span_matches(
        pred.triggers[pe.trigger].span, gold.triggers[ge.trigger].span, text, approximate
    ):
        return False
    roles = [Role.THEME] if approximate and depth > 0 else [Role.THEME, Role.CAUSE]
    for role in roles:
        pred_fillers = [a.filler for a in pe.arguments if a.role is role]
        gold_fillers = [a.filler for a in ge.arguments if a.role is role]
        if not _fillers_match(
            pred_fillers, gold_fillers, pred, gold, text, approximate, depth
        ):
            return False
    return True


def _fillers_match(
    pred_fillers, gold_fillers, pred, gold, text, approximate, depth
) -> bool:
    pred_ents = sorted(f for f in pred_fillers if not f.startswith("E"))
    gold_ents = sorted(f for f in gold_fillers if not f.startswith("E"))
    if pred_ents != gold_ents:
        return False
    pred_events = sorted((f for f in pred_fillers if f.startswith("E")), key=id_number)
    gold_events = sorted((f for f in gold_fillers if f.startswith("E")), key=id_number)
    if len(pred_events) != len(gold_events):
        return False
    remaining = list(gold_events)
    for p in pred_events:
        for g in remaining:
            if _event_matches(p, g, pred, gold, text, approximate, depth + 1):
                remaining.remove(g)
                break
        else:
            return False
    return True


def match_events(
    gold_doc: Document, prediction: DocumentPrediction, approximate: bool
) -> list[tuple[str, str]]:
    """Greedy one-to-one (pred id, gold id) pairs, both sides in id order."""
    pred = _View(gold_doc.entities, prediction.triggers, prediction.events)
    gold = _View(gold_doc.entities, gold_doc.triggers, gold_doc.events)
    pairs = []
    unmatched_gold = sorted(gold_doc.events, key=id_number)
    for pred_id in sorted(prediction.events, key=id_number):
        for gold_id in unmatched_gold:
            if _event_matches(pred_id, gold_id, pred, gold, gold_doc.text, approximate):
                pairs.append((pred_id, gold_id))
                unmatched_gold.remove(gold_id)
                break
    return pairs


def evaluate(
    gold_docs: list[Document],
    predictions: list[DocumentPrediction],
    mode: str = "strict",
) -> EvalReport:
    """Micro-averaged precision / recall / F1, overall and per event type."""
    if mode not in MODES:
        raise ValueError(f"unknown evaluation mode: {mode!r}")
    approximate = mode == "approximate"
    golds_by_id = {d.doc_id: d for d in gold_docs}
    preds_by_id: dict[str, DocumentPrediction] = {}
    for p in predictions:
        if p.doc_id not in golds_by_id:
            raise DocIdMismatch(f"prediction for unknown document {p.doc_id!r}")
        if p.doc_id in preds_by_id:
            raise DocIdMismatch(f"duplicate prediction for document {p.doc_id!r}")
        preds_by_id[p.doc_id] = p

    report = EvalReport(mode=mode, documents=len(gold_docs))
    for doc_id, gold_doc in sorted(golds_by_id.items()):
        pred = preds_by_id.get(doc_id)
        if pred is None:
            log.warning("no prediction for document %s; counting misses", doc_id)
            pred = DocumentPrediction(doc_id, {}, {})
        pairs = match_events(gold_doc, pred, approximate)
        matched_pred = {p for p, _ in pairs}
        matched_gold = {g for _, g in pairs}
        for pred_id, event in pred.events.items():
            bucket = report.counts(event.event_type)
            if pred_id in matched_pred:
                bucket.tp += 1
                report.overall.tp += 1
            else:
                bucket.fp += 1
                report.overall.fp += 1
        for gold_id, event in gold_doc.events.items():
            if gold_id not in matched_gold:
                report.counts(event.event_type).fn += 1
                report.overall.fn += 1
    return report


@dataclass
class CascadeReport:
    """Binding false positives attributed to the stage that caused them.

    trigger_induced: the trigger span is not a gold Binding trigger at
    all, so the event was doomed before roles were considered.
    role_induced: the trigger is right but the event uses a Theme the
    gold assignment for that trigger does not contain.
    construction_induced: trigger and all Themes are individually right;
    only the grouping into events is wrong.  The three classes are
    disjoint and cover every Binding false positive.
    """

    binding_fp: int = 0
    trigger_induced: int = 0
    role_induced: int = 0
    construction_induced: int = 0

    def as_dict(self) -> dict:
        def share(n):
            return round(100 * n / self.binding_fp, 2) if self.binding_fp else 0.0

        return {
            "binding_fp": self.binding_fp,
            "trigger_induced": {"count": self.trigger_induced, "share": share(self.trigger_induced)},
            "role_induced": {"count": self.role_induced, "share": share(self.role_induced)},
            "construction_induced": {
                "count": self.construction_induced,
                "share": share(self.construction_induced),
            },
        }


def analyze_cascade(
    gold_docs: list[Document],
    predictions: list[DocumentPrediction],
    mode: str = "strict",
) -> CascadeReport:
    """Partition Binding false positives by earliest faulty stage."""
    if mode not in MODES:
        raise ValueError(f"unknown evaluation mode: {mode!r}")
    approximate = mode == "approximate"
    golds_by_id = {d.doc_id: d for d in gold_docs}
    report = CascadeReport()
    for pred in predictions:
        gold_doc = golds_by_id.get(pred.doc_id)
        if gold_doc is None:
            raise DocIdMismatch(f"prediction for unknown document {pred.doc_id!r}")
        gold_bind_spans = {
            t.span for t in gold_doc.triggers.values() if t.event_type is EventType.BINDING
        }
        gold_themes: dict[Span, set[str]] = {}
        for event in gold_doc.events.values():
            if event.event_type is EventType.BINDING:
                span = gold_doc.triggers[event.trigger].span
                gold_themes.setdefault(span, set()).update(
                    f for f in event.themes() if f in gold_doc.entities
                )
        matched = {p for p, _ in match_events(gold_doc, pred, approximate)}
        for pred_id, event in pred.events.items():
            if event.event_type is not EventType.BINDING or pred_id in matched:
                continue
            report.binding_fp += 1
            trig_span = pred.triggers[event.trigger].span
            if trig_span not in gold_bind_spans:
                report.trigger_induced += 1
            elif not set(event.themes()) <= gold_themes.get(trig_span, set()):
                report.role_induced += 1
            else:
                report.construction_induced += 1
    return report
