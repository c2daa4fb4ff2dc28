"""BioNLP shared-task standoff annotations: domain types, parsing, serialization.

A document is a file triple <id>.txt / <id>.a1 / <id>.a2.  The .a1 file
declares the given protein entities (T-lines), the .a2 file declares event
triggers (T-lines) and events (E-lines).  Offsets are character offsets into
the decoded .txt content.

Parsing is lenient by default: records that break the argument composition
registry are repaired (extra roles stripped) or dropped, and every repair or
drop is kept as a :class:`Violation` on the returned document.  With
``strict=True`` the first problem raises instead.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field

from bioee.errors import (
    CompositionViolation,
    CyclicEvent,
    DanglingReference,
    MalformedLine,
    SpanMismatch,
)

log = logging.getLogger(__name__)


class EventType(enum.Enum):
    """The 13 event types of the GE11/GE13 corpora."""

    GENE_EXPRESSION = "Gene_expression"
    TRANSCRIPTION = "Transcription"
    PROTEIN_CATABOLISM = "Protein_catabolism"
    PHOSPHORYLATION = "Phosphorylation"
    LOCALIZATION = "Localization"
    BINDING = "Binding"
    PROTEIN_MODIFICATION = "Protein_modification"
    UBIQUITINATION = "Ubiquitination"
    ACETYLATION = "Acetylation"
    DEACETYLATION = "Deacetylation"
    REGULATION = "Regulation"
    POSITIVE_REGULATION = "Positive_regulation"
    NEGATIVE_REGULATION = "Negative_regulation"

    @property
    def abbr(self) -> str:
        return _ABBR[self]

    @classmethod
    def from_string(cls, name: str) -> "EventType":
        """Accept either the corpus name (Gene_expression) or the abbreviation (GeEx)."""
        try:
            return cls(name)
        except ValueError:
            pass
        for etype, abbr in _ABBR.items():
            if abbr == name:
                return etype
        raise ValueError(f"unknown event type: {name!r}")


_ABBR = {
    EventType.GENE_EXPRESSION: "GeEx",
    EventType.TRANSCRIPTION: "Tran",
    EventType.PROTEIN_CATABOLISM: "PrCa",
    EventType.PHOSPHORYLATION: "Phos",
    EventType.LOCALIZATION: "Loca",
    EventType.BINDING: "Bind",
    EventType.PROTEIN_MODIFICATION: "PrMo",
    EventType.UBIQUITINATION: "Ubiq",
    EventType.ACETYLATION: "Acet",
    EventType.DEACETYLATION: "Deac",
    EventType.REGULATION: "Regu",
    EventType.POSITIVE_REGULATION: "PoRe",
    EventType.NEGATIVE_REGULATION: "NeRe",
}

EVENT_TYPES: tuple[EventType, ...] = tuple(_ABBR)


class Role(enum.Enum):
    THEME = "Theme"
    CAUSE = "Cause"


class Category(enum.Enum):
    SIMPLE = "simple"
    MULTIPLE = "multiple"
    NESTED = "nested"


@dataclass(frozen=True)
class Composition:
    """Argument composition for one event type.

    ``themes_per_event`` is the Theme arity of a single event ("one" or
    "one_or_more"); ``theme_filler``/``cause_filler`` say whether the role
    may be filled by an entity only or by an entity or another event.
    ``max_causes`` is 0 or 1.
    """

    category: Category
    themes_per_event: str  # "one" | "one_or_more"
    theme_filler: str  # "entity" | "entity_or_event"
    max_causes: int
    cause_filler: str | None = None

    @property
    def admits_event_arguments(self) -> bool:
        return self.theme_filler == "entity_or_event" or self.cause_filler == "entity_or_event"


_SIMPLE = Composition(Category.SIMPLE, "one", "entity", 0)
_REGULATION = Composition(Category.NESTED, "one", "entity_or_event", 1, "entity_or_event")
_MODIFICATION = Composition(Category.NESTED, "one", "entity", 1, "entity_or_event")

COMPOSITION: dict[EventType, Composition] = {
    EventType.GENE_EXPRESSION: _SIMPLE,
    EventType.TRANSCRIPTION: _SIMPLE,
    EventType.PROTEIN_CATABOLISM: _SIMPLE,
    EventType.PHOSPHORYLATION: _SIMPLE,
    EventType.LOCALIZATION: _SIMPLE,
    EventType.BINDING: Composition(Category.MULTIPLE, "one_or_more", "entity", 0),
    EventType.PROTEIN_MODIFICATION: _MODIFICATION,
    EventType.UBIQUITINATION: _MODIFICATION,
    EventType.ACETYLATION: _MODIFICATION,
    EventType.DEACETYLATION: _MODIFICATION,
    EventType.REGULATION: _REGULATION,
    EventType.POSITIVE_REGULATION: _REGULATION,
    EventType.NEGATIVE_REGULATION: _REGULATION,
}


@dataclass(frozen=True, order=True)
class Span:
    """Character span [start, end) over the document text."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.start >= self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end})")

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def contains(self, other: "Span") -> bool:
        return self.start <= other.start and other.end <= self.end

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Entity:
    id: str
    entity_type: str
    span: Span
    surface: str


@dataclass(frozen=True)
class Trigger:
    id: str
    event_type: EventType
    span: Span
    surface: str


@dataclass(frozen=True)
class Argument:
    role: Role
    filler: str  # entity id (T...) or event id (E...)

    @property
    def is_event(self) -> bool:
        return self.filler.startswith("E")


@dataclass(frozen=True)
class Event:
    id: str
    event_type: EventType
    trigger: str  # trigger id
    arguments: tuple[Argument, ...]

    def themes(self) -> tuple[str, ...]:
        return tuple(a.filler for a in self.arguments if a.role is Role.THEME)

    def causes(self) -> tuple[str, ...]:
        return tuple(a.filler for a in self.arguments if a.role is Role.CAUSE)


@dataclass(frozen=True)
class Violation:
    """One broken invariant: which annotation, which rule, and a message."""

    id: str
    rule: str
    message: str


@dataclass(frozen=True)
class Document:
    doc_id: str
    text: str
    entities: dict[str, Entity]
    triggers: dict[str, Trigger]
    events: dict[str, Event]
    # repairs/drops performed by lenient parsing; not part of document identity
    dropped: tuple[Violation, ...] = field(default=(), compare=False)

    def replace_events(self, events: dict[str, Event]) -> "Document":
        return Document(self.doc_id, self.text, self.entities, self.triggers, events, self.dropped)


def id_number(annotation_id: str) -> int:
    """Numeric suffix of a standoff id ('T12' -> 12)."""
    return int(annotation_id[1:])


_T_LINE = re.compile(r"^(T\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_E_LINE = re.compile(r"^(E\d+)\t(\S+):(T\d+)((?: [A-Za-z0-9]+:[TE]\d+)*)\s*$")
_CORE_ROLE = re.compile(r"^(Theme|Cause)\d*$")

# record prefixes that are parsed and deliberately ignored: modifications,
# attributes, equivalence classes, normalizations, notes
_IGNORED_PREFIX = ("M", "A", "*", "N", "#")


def _parse_t_line(line: str, text: str) -> tuple[str, str, Span, str]:
    m = _T_LINE.match(line)
    if not m:
        raise MalformedLine(f"unparseable T-line: {line!r}")
    tid, ann_type, start, end = m.group(1), m.group(2), int(m.group(3)), int(m.group(4))
    if not (0 <= start < end <= len(text)):
        raise SpanMismatch(f"{tid}: offsets [{start}, {end}) outside document of length {len(text)}")
    surface = m.group(5)
    if text[start:end] != surface:
        raise SpanMismatch(
            f"{tid}: surface {surface!r} != text at [{start}, {end}) {text[start:end]!r}"
        )
    return tid, ann_type, Span(start, end), surface


def _parse_entities(a1_content: str, text: str) -> dict[str, Entity]:
    entities: dict[str, Entity] = {}
    for line in a1_content.splitlines():
        if not line.strip():
            continue
        if line.startswith(_IGNORED_PREFIX):
            continue
        tid, etype, span, surface = _parse_t_line(line, text)
        if tid in entities:
            raise MalformedLine(f"duplicate entity id {tid}")
        entities[tid] = Entity(tid, etype, span, surface)
    return entities


class _RawEvent:
    __slots__ = ("id", "type_name", "trigger", "args")

    def __init__(self, eid: str, type_name: str, trigger: str, args: list[tuple[str, str]]):
        self.id = eid
        self.type_name = type_name
        self.trigger = trigger
        self.args = args  # (raw role, filler id)


def parse_document(
    txt_content: str,
    a1_content: str,
    a2_content: str | None = None,
    doc_id: str = "doc",
    strict: bool = False,
) -> Document:
    """Parse a standoff file triple into a Document.

    Lenient mode (default) strips roles outside Theme/Cause, drops events
    that still violate the composition registry, reference unknown ids, or
    sit on a reference cycle, and records each repair as a Violation in
    ``Document.dropped``.  Strict mode raises on the first problem.

    Malformed lines and span mismatches always raise: they indicate a
    corrupt file rather than an annotation judgment call.
    """
    entities = _parse_entities(a1_content, txt_content)

    triggers: dict[str, Trigger] = {}
    raw_events: dict[str, _RawEvent] = {}
    violations: list[Violation] = []

    for line in (a2_content or "").splitlines():
        if not line.strip():
            continue
        if line.startswith("T"):
            tid, type_name, span, surface = _parse_t_line(line, txt_content)
            if tid in triggers or tid in entities:
                raise MalformedLine(f"duplicate annotation id {tid}")
            try:
                etype = EventType(type_name)
            except ValueError:
                if strict:
                    raise CompositionViolation(f"{tid}: unknown trigger type {type_name!r}")
                violations.append(Violation(tid, "unknown_trigger_type", type_name))
                continue
            triggers[tid] = Trigger(tid, etype, span, surface)
        elif line.startswith("E"):
            m = _E_LINE.match(line)
            if not m:
                raise MalformedLine(f"unparseable E-line: {line!r}")
            eid, type_name, trig = m.group(1), m.group(2), m.group(3)
            if eid in raw_events:
                raise MalformedLine(f"duplicate event id {eid}")
            args = []
            for part in m.group(4).split():
                role, filler = part.split(":", 1)
                args.append((role, filler))
            raw_events[eid] = _RawEvent(eid, type_name, trig, args)
        elif line.startswith(_IGNORED_PREFIX):
            continue
        else:
            raise MalformedLine(f"unrecognized record: {line!r}")

    events = _resolve_events(raw_events, entities, triggers, violations, strict)
    doc = Document(doc_id, txt_content, entities, triggers, events, tuple(violations))
    for v in violations:
        log.warning("dropped doc=%s id=%s rule=%s detail=%s", doc_id, v.id, v.rule, v.message)
    return doc


def _normalize_args(
    raw: _RawEvent, violations: list[Violation], strict: bool
) -> list[Argument] | None:
    """Normalize Theme2/Theme3 to Theme and strip non-core roles.

    Returns the argument list in canonical Theme-then-Cause order, or None
    in strict mode when a non-core role is present (caller raises).
    """
    themes: list[Argument] = []
    causes: list[Argument] = []
    for role, filler in raw.args:
        m = _CORE_ROLE.match(role)
        if not m:
            if strict:
                return None
            violations.append(Violation(raw.id, "unsupported_role", f"{role}:{filler}"))
            continue
        base = Role(m.group(1))
        (themes if base is Role.THEME else causes).append(Argument(base, filler))
    return themes + causes


def _composition_errors(
    event_type: EventType,
    trigger: Trigger,
    args: list[Argument],
    entities: dict[str, Entity],
) -> list[str]:
    """All composition-registry problems for one event, empty when valid."""
    problems = []
    comp = COMPOSITION[event_type]
    if event_type is not trigger.event_type:
        problems.append(f"event type {event_type.value} != trigger type {trigger.event_type.value}")
    themes = [a for a in args if a.role is Role.THEME]
    causes = [a for a in args if a.role is Role.CAUSE]
    if not themes:
        problems.append("event has no Theme")
    if comp.themes_per_event == "one" and len(themes) > 1:
        problems.append(f"{event_type.abbr} allows exactly one Theme, got {len(themes)}")
    if len(causes) > comp.max_causes:
        problems.append(f"{event_type.abbr} allows {comp.max_causes} Cause arguments, got {len(causes)}")
    for arg in themes:
        if arg.is_event and comp.theme_filler == "entity":
            problems.append(f"{event_type.abbr} Theme must be an entity, got event {arg.filler}")
        if not arg.is_event and arg.filler not in entities:
            problems.append(f"Theme filler {arg.filler} is a trigger, not an entity")
    for arg in causes:
        if arg.is_event and comp.cause_filler == "entity":
            problems.append(f"{event_type.abbr} Cause must be an entity, got event {arg.filler}")
        if not arg.is_event and arg.filler not in entities:
            problems.append(f"Cause filler {arg.filler} is a trigger, not an entity")
    return problems


def _find_cycle(events: dict[str, "_Resolved"]) -> list[str] | None:
    """Return the event ids of one reference cycle, or None if acyclic."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {eid: WHITE for eid in events}
    for root in sorted(events, key=id_number):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(events[root].event_refs))]
        color[root] = GRAY
        path = [root]
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                if child not in events:
                    continue
                if color[child] == GRAY:
                    return path[path.index(child):]
                if color[child] == WHITE:
                    color[child] = GRAY
                    path.append(child)
                    stack.append((child, iter(events[child].event_refs)))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return None


class _Resolved:
    __slots__ = ("raw", "args", "event_refs")

    def __init__(self, raw: _RawEvent, args: list[Argument]):
        self.raw = raw
        self.args = args
        self.event_refs = sorted(
            {a.filler for a in args if a.is_event}, key=id_number
        )


def _resolve_events(
    raw_events: dict[str, _RawEvent],
    entities: dict[str, Entity],
    triggers: dict[str, Trigger],
    violations: list[Violation],
    strict: bool,
) -> dict[str, Event]:
    resolved: dict[str, _Resolved] = {}
    for eid in sorted(raw_events, key=id_number):
        raw = raw_events[eid]
        args = _normalize_args(raw, violations, strict)
        if args is None:
            raise CompositionViolation(f"{eid}: role outside Theme/Cause")
        resolved[eid] = _Resolved(raw, args)

    def drop(eid: str, rule: str, message: str):
        violations.append(Violation(eid, rule, message))
        del resolved[eid]

    # iterate to a fixed point: dropping one event can strand others
    changed = True
    while changed:
        changed = False
        for eid in sorted(resolved, key=id_number):
            res = resolved[eid]
            raw = res.raw
            try:
                etype = EventType(raw.type_name)
            except ValueError:
                if strict:
                    raise CompositionViolation(f"{eid}: unknown event type {raw.type_name!r}")
                drop(eid, "unknown_event_type", raw.type_name)
                changed = True
                continue
            if raw.trigger not in triggers:
                if strict:
                    raise DanglingReference(f"{eid}: unknown trigger {raw.trigger}")
                drop(eid, "dangling_trigger", raw.trigger)
                changed = True
                continue
            missing = [
                a.filler
                for a in res.args
                if (a.is_event and a.filler not in resolved)
                or (not a.is_event and a.filler not in entities and a.filler not in triggers)
            ]
            if missing:
                if strict:
                    raise DanglingReference(f"{eid}: unknown filler {missing[0]}")
                drop(eid, "dangling_filler", ", ".join(missing))
                changed = True
                continue
            problems = _composition_errors(etype, triggers[raw.trigger], res.args, entities)
            if problems:
                if strict:
                    raise CompositionViolation(f"{eid}: {problems[0]}")
                drop(eid, "composition", "; ".join(problems))
                changed = True
        cycle = _find_cycle(resolved)
        if cycle:
            if strict:
                raise CyclicEvent(f"event reference cycle: {' -> '.join(cycle)}")
            for eid in cycle:
                drop(eid, "cyclic_event", " -> ".join(cycle))
            changed = True

    return {
        eid: Event(eid, EventType(res.raw.type_name), res.raw.trigger, tuple(res.args))
        for eid, res in sorted(resolved.items(), key=lambda kv: id_number(kv[0]))
    }


def _numbered_role(role: Role, index: int) -> str:
    return role.value if index == 0 else f"{role.value}{index + 1}"


def serialize_a2(doc: Document) -> str:
    """Canonical .a2 text: triggers then events, each in numeric id order.

    Theme arguments come before Cause and multiple Themes are numbered
    (Theme, Theme2, ...) per the corpus convention, so the output of
    :func:`parse_document` round-trips byte-stably.
    """
    lines = []
    for tid in sorted(doc.triggers, key=id_number):
        t = doc.triggers[tid]
        lines.append(f"{tid}\t{t.event_type.value} {t.span.start} {t.span.end}\t{t.surface}")
    for eid in sorted(doc.events, key=id_number):
        e = doc.events[eid]
        parts = [f"{eid}\t{e.event_type.value}:{e.trigger}"]
        themes = [a for a in e.arguments if a.role is Role.THEME]
        causes = [a for a in e.arguments if a.role is Role.CAUSE]
        for i, arg in enumerate(themes):
            parts.append(f"{_numbered_role(Role.THEME, i)}:{arg.filler}")
        for i, arg in enumerate(causes):
            parts.append(f"{_numbered_role(Role.CAUSE, i)}:{arg.filler}")
        lines.append(" ".join(parts))
    return "".join(line + "\n" for line in lines)


def serialize_a1(doc: Document) -> str:
    """Entity lines in numeric id order."""
    lines = []
    for tid in sorted(doc.entities, key=id_number):
        e = doc.entities[tid]
        lines.append(f"{tid}\t{e.entity_type} {e.span.start} {e.span.end}\t{e.surface}")
    return "".join(line + "\n" for line in lines)


def validate(doc: Document) -> list[Violation]:
    """Check every document invariant; empty list means the document is clean."""
    violations: list[Violation] = []
    for ann_id, ann_type, span, surface in [
        (e.id, "entity", e.span, e.surface) for e in doc.entities.values()
    ] + [(t.id, "trigger", t.span, t.surface) for t in doc.triggers.values()]:
        if span.end > len(doc.text):
            violations.append(Violation(ann_id, "span_bounds", f"{ann_type} span exceeds text"))
        elif doc.text[span.start:span.end] != surface:
            violations.append(
                Violation(ann_id, "span_mismatch", f"{ann_type} surface != text at offsets")
            )
    for eid, event in doc.events.items():
        if event.trigger not in doc.triggers:
            violations.append(Violation(eid, "dangling_trigger", event.trigger))
            continue
        for arg in event.arguments:
            known = arg.filler in doc.events if arg.is_event else arg.filler in doc.entities
            if not known:
                violations.append(Violation(eid, "dangling_filler", arg.filler))
        problems = _composition_errors(
            event.event_type, doc.triggers[event.trigger], list(event.arguments), doc.entities
        )
        for p in problems:
            violations.append(Violation(eid, "composition", p))

    resolvable = {
        eid: _Resolved(_RawEvent(eid, e.event_type.value, e.trigger, []), list(e.arguments))
        for eid, e in doc.events.items()
    }
    cycle = _find_cycle(resolvable)
    if cycle:
        for eid in cycle:
            violations.append(Violation(eid, "cyclic_event", " -> ".join(cycle)))
    return violations
