"""Corpus loading, sentence splitting, tokenization, dedupe, statistics.

A corpus directory holds one .txt/.a1 pair per document plus an optional
.a2 (test splits ship without gold events).  Documents are returned in
doc_id order so every downstream artifact is reproducible.
"""

from __future__ import annotations

import logging
import pathlib
import re
import string
from dataclasses import dataclass
from importlib import resources

from bioee.errors import MissingFile
from bioee.standoff import Document, Event, EventType, Span, parse_document

log = logging.getLogger(__name__)

MINICORPUS = "minicorpus"


@dataclass(frozen=True)
class Token:
    text: str
    span: Span


@dataclass(frozen=True)
class Sentence:
    index: int
    span: Span
    tokens: tuple[Token, ...]


def corpus_path(name: str) -> pathlib.Path:
    """Directory of a corpus bundled with the package."""
    return pathlib.Path(str(resources.files("bioee") / "data" / name))


def load_corpus(
    path: str | pathlib.Path, strict: bool = False, dedupe: bool = True
) -> list[Document]:
    """Load every document triple under ``path``, sorted by doc id.

    The .a1 file is mandatory; a missing .a2 yields a document with no
    events (the convention for unannotated splits).
    """
    root = pathlib.Path(path)
    if not root.is_dir():
        raise MissingFile(f"corpus directory not found: {root}")
    txt_files = sorted(root.glob("*.txt"))
    if not txt_files:
        raise MissingFile(f"no .txt documents under {root}")
    docs = []
    for txt in txt_files:
        a1 = txt.with_suffix(".a1")
        if not a1.exists():
            raise MissingFile(f"missing annotation file: {a1}")
        a2 = txt.with_suffix(".a2")
        doc = parse_document(
            txt.read_text(),
            a1.read_text(),
            a2.read_text() if a2.exists() else None,
            doc_id=txt.stem,
            strict=strict,
        )
        docs.append(dedupe_events(doc) if dedupe else doc)
    return docs


def dedupe_events(doc: Document) -> Document:
    """Collapse events identical up to argument order.

    Merging two duplicates can make their parents identical in turn, so
    merging repeats until no group shrinks.  The surviving id is the
    numerically smallest of each group; references are repointed.
    """
    events = dict(doc.events)
    merged_any = False
    while True:
        groups: dict[tuple, list[str]] = {}
        for eid, e in events.items():
            key = (e.event_type, e.trigger, tuple(sorted((a.role.value, a.filler) for a in e.arguments)))
            groups.setdefault(key, []).append(eid)
        remap = {}
        for ids in groups.values():
            if len(ids) > 1:
                ids.sort(key=lambda i: int(i[1:]))
                for dup in ids[1:]:
                    remap[dup] = ids[0]
        if not remap:
            break
        merged_any = True
        log.info("doc=%s merging duplicate events: %s", doc.doc_id, remap)
        events = {
            eid: Event(
                eid,
                e.event_type,
                e.trigger,
                tuple(a.__class__(a.role, remap.get(a.filler, a.filler)) for a in e.arguments),
            )
            for eid, e in events.items()
            if eid not in remap
        }
    return doc.replace_events(events) if merged_any else doc


_BOUNDARY = re.compile(r"[.?!]+(?=\s+[A-Z0-9])")
_PUNCT = set(string.punctuation)


def split_sentences(doc: Document) -> tuple[Sentence, ...]:
    """Sentence spans plus tokens for one document.

    Splits after sentence punctuation followed by whitespace and an
    upper-case letter or digit; any split that would cut through an
    annotation is repaired by merging the two sides.
    """
    text = doc.text
    cuts = [m.end() for m in _BOUNDARY.finditer(text)]
    spans = []
    prev = 0
    for cut in cuts + [len(text)]:
        seg = text[prev:cut]
        lead = len(seg) - len(seg.lstrip())
        trail = len(seg) - len(seg.rstrip())
        if prev + lead < cut - trail:
            spans.append(Span(prev + lead, cut - trail))
        prev = cut

    ann_spans = [e.span for e in doc.entities.values()] + [
        t.span for t in doc.triggers.values()
    ]
    merged = True
    while merged and len(spans) > 1:
        merged = False
        for i in range(len(spans) - 1):
            boundary = spans[i].end
            if any(s.start < boundary < s.end for s in ann_spans):
                log.warning("doc=%s merging sentences around offset %d", doc.doc_id, boundary)
                spans[i : i + 2] = [Span(spans[i].start, spans[i + 1].end)]
                merged = True
                break

    return tuple(
        Sentence(i, s, _tokenize(text, s, ann_spans)) for i, s in enumerate(spans)
    )


def _tokenize(text: str, sentence: Span, ann_spans: list[Span]) -> tuple[Token, ...]:
    """Whitespace tokens, split at annotation edges, punctuation peeled off.

    Annotation boundaries always coincide with token boundaries afterwards,
    which is what label alignment downstream relies on.  Punctuation is
    only peeled from pieces not covered by an annotation, so names like
    BOB.1 or IL-2 survive intact.
    """
    tokens: list[Token] = []
    for m in re.finditer(r"\S+", text[sentence.start : sentence.end]):
        start = sentence.start + m.start()
        end = sentence.start + m.end()
        edges = {start, end}
        for s in ann_spans:
            for edge in (s.start, s.end):
                if start < edge < end:
                    edges.add(edge)
        points = sorted(edges)
        for a, b in zip(points, points[1:]):
            tokens.extend(_peel(text, a, b, ann_spans))
    return tuple(tokens)


def _peel(text: str, start: int, end: int, ann_spans: list[Span]) -> list[Token]:
    covered = any(s.start <= start and end <= s.end for s in ann_spans)
    if covered:
        return [Token(text[start:end], Span(start, end))]
    head: list[Token] = []
    tail: list[Token] = []
    while start < end and text[start] in _PUNCT:
        head.append(Token(text[start], Span(start, start + 1)))
        start += 1
    while start < end and text[end - 1] in _PUNCT:
        tail.append(Token(text[end - 1], Span(end - 1, end)))
        end -= 1
    middle = [Token(text[start:end], Span(start, end))] if start < end else []
    return head + middle + list(reversed(tail))


@dataclass(frozen=True)
class CorpusStats:
    documents: int
    entities: int
    triggers: int
    events: int
    by_type: dict[EventType, int]

    def share(self, etype: EventType) -> float:
        """Percentage of all events carrying this type."""
        return 100.0 * self.by_type.get(etype, 0) / self.events if self.events else 0.0

    def as_dict(self) -> dict:
        return {
            "documents": self.documents,
            "entities": self.entities,
            "triggers": self.triggers,
            "events": self.events,
            "by_type": {
                t.value: {"count": self.by_type.get(t, 0), "share": round(self.share(t), 1)}
                for t in EventType
            },
        }


def compute_stats(docs: list[Document]) -> CorpusStats:
    by_type: dict[EventType, int] = {}
    entities = triggers = events = 0
    for doc in docs:
        entities += len(doc.entities)
        triggers += len(doc.triggers)
        events += len(doc.events)
        for e in doc.events.values():
            by_type[e.event_type] = by_type.get(e.event_type, 0) + 1
    return CorpusStats(len(docs), entities, triggers, events, by_type)
