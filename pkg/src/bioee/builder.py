"""Programmatic construction of standoff documents.

Offsets in hand-written fixtures rot whenever the text changes, so test
corpora are built through :class:`DocumentBuilder`, which locates surface
strings in the text and assigns ids in creation order (entities first,
then triggers, matching the .a1 / .a2 split).
"""

from __future__ import annotations

import pathlib
from dataclasses import dataclass

from bioee.standoff import (
    Argument,
    Document,
    Entity,
    EventType,
    Role,
    Span,
    parse_document,
    serialize_a1,
    serialize_a2,
)


@dataclass(frozen=True)
class _Ref:
    kind: str  # "entity" | "trigger" | "event"
    index: int


class DocumentBuilder:
    """Accumulates annotations over a fixed text, then emits a file triple.

    ``entity``/``trigger`` locate the nth occurrence of a surface string;
    ``event`` wires refs together.  ``build`` routes the serialized triple
    back through the parser so every emitted document is well formed by
    construction.
    """

    def __init__(self, doc_id: str, text: str):
        self.doc_id = doc_id
        self.text = text
        self._entities: list[tuple[str, Span, str]] = []  # type, span, surface
        self._triggers: list[tuple[EventType, Span, str]] = []
        self._events: list[tuple[EventType, _Ref, list[tuple[Role, _Ref]]]] = []

    def _locate(self, surface: str, nth: int) -> Span:
        start = -1
        for _ in range(nth + 1):
            start = self.text.find(surface, start + 1)
            if start < 0:
                raise ValueError(
                    f"{self.doc_id}: occurrence {nth} of {surface!r} not found"
                )
        return Span(start, start + len(surface))

    def entity(self, surface: str, nth: int = 0, entity_type: str = "Protein") -> _Ref:
        self._entities.append((entity_type, self._locate(surface, nth), surface))
        return _Ref("entity", len(self._entities) - 1)

    def trigger(self, surface: str, event_type: str, nth: int = 0) -> _Ref:
        etype = EventType.from_string(event_type)
        self._triggers.append((etype, self._locate(surface, nth), surface))
        return _Ref("trigger", len(self._triggers) - 1)

    def event(
        self,
        event_type: str,
        trigger: _Ref,
        themes: list[_Ref] | tuple[_Ref, ...] = (),
        causes: list[_Ref] | tuple[_Ref, ...] = (),
    ) -> _Ref:
        assert trigger.kind == "trigger"
        args = [(Role.THEME, ref) for ref in themes] + [(Role.CAUSE, ref) for ref in causes]
        self._events.append((EventType.from_string(event_type), trigger, args))
        return _Ref("event", len(self._events) - 1)

    def _resolve(self, ref: _Ref) -> str:
        if ref.kind == "entity":
            return f"T{ref.index + 1}"
        if ref.kind == "trigger":
            return f"T{len(self._entities) + ref.index + 1}"
        return f"E{ref.index + 1}"

    def build(self) -> Document:
        entities = {
            f"T{i + 1}": Entity(f"T{i + 1}", etype, span, surface)
            for i, (etype, span, surface) in enumerate(self._entities)
        }
        a1 = serialize_a1(Document(self.doc_id, self.text, entities, {}, {}))
        a2_lines = []
        base = len(self._entities)
        for i, (etype, span, surface) in enumerate(self._triggers):
            a2_lines.append(f"T{base + i + 1}\t{etype.value} {span.start} {span.end}\t{surface}")
        for i, (etype, trig, args) in enumerate(self._events):
            doc_args = [Argument(role, self._resolve(ref)) for role, ref in args]
            themes = [a.filler for a in doc_args if a.role is Role.THEME]
            causes = [a.filler for a in doc_args if a.role is Role.CAUSE]
            parts = [f"E{i + 1}\t{etype.value}:{self._resolve(trig)}"]
            for j, filler in enumerate(themes):
                parts.append(f"{'Theme' if j == 0 else f'Theme{j + 1}'}:{filler}")
            for filler in causes:
                parts.append(f"Cause:{filler}")
            a2_lines.append(" ".join(parts))
        a2 = "".join(line + "\n" for line in a2_lines)
        parsed = parse_document(self.text, a1, a2, doc_id=self.doc_id, strict=True)
        return parsed

    def write(self, out_dir: str | pathlib.Path) -> Document:
        doc = self.build()
        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{self.doc_id}.txt").write_text(doc.text)
        (out / f"{self.doc_id}.a1").write_text(serialize_a1(doc))
        (out / f"{self.doc_id}.a2").write_text(serialize_a2(doc))
        return doc
