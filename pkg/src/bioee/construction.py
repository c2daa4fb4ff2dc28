"""Assembly of events from triggers and per-trigger role assignments.

Construction is bottom-up over the trigger dependency graph:

  * a trigger with no Theme assignment yields nothing;
  * simple types yield one event per entity Theme;
  * Binding in rule mode yields the lone singleton for one Theme and every
    unordered pair for two or more: pairing is the strongest assumption a
    rule can make without a classifier, and it cannot represent singleton
    sets of size > 1 or ternary complexes;
  * Binding in auto mode enumerates every nonempty subset of the assigned
    Themes as a candidate, asks a scorer for p(valid), and keeps subsets
    with p > 0.5 (ties lose); above ``max_binding_args`` Themes the subset
    space is abandoned for rule pairing;
  * nested types yield the cross product of Theme and Cause fillers, where
    a trigger-valued filler expands to every event already built on that
    trigger.

Cycles in the trigger graph (possible with predicted roles) are broken by
discarding the closing edges before construction starts.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from bioee.corpus import Sentence
from bioee.errors import TooManyArguments
from bioee.instances import (
    ARG_MARK,
    OTHER_MARK,
    TRIGGER_MARK,
    CandidateInstance,
    mark_sentence,
    mask_tokens,
)
from bioee.standoff import (
    COMPOSITION,
    Argument,
    Category,
    Document,
    Entity,
    Event,
    EventType,
    Role,
    Trigger,
    id_number,
)

log = logging.getLogger(__name__)

MAX_BINDING_ARGS = 12


@dataclass(frozen=True)
class Assignment:
    """Unique role fillers assigned to one trigger (entity or trigger ids)."""

    themes: tuple[str, ...] = ()
    causes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ConstructionContext:
    doc_id: str
    entities: dict[str, Entity]
    triggers: dict[str, Trigger]
    sentences: tuple[Sentence, ...] = ()


def assignments_from_gold(doc: Document) -> dict[str, Assignment]:
    """Per-trigger role sets implied by gold events.

    Event-valued fillers are recorded as the sub-event's trigger id: this
    is the view the role classification stage produces, and rebuilding
    events from it is exactly what construction is for.
    """
    themes: dict[str, list[str]] = {}
    causes: dict[str, list[str]] = {}
    for event in doc.events.values():
        for arg in event.arguments:
            filler = arg.filler
            if arg.is_event:
                filler = doc.events[filler].trigger
            bucket = themes if arg.role is Role.THEME else causes
            fillers = bucket.setdefault(event.trigger, [])
            if filler not in fillers:
                fillers.append(filler)
    out = {}
    for trig_id in doc.triggers:
        if trig_id in themes or trig_id in causes:
            out[trig_id] = Assignment(
                themes=tuple(sorted(themes.get(trig_id, []), key=id_number)),
                causes=tuple(sorted(causes.get(trig_id, []), key=id_number)),
            )
    return out


def enumerate_binding_candidates(
    theme_ids: list[str] | tuple[str, ...], cap: int = MAX_BINDING_ARGS
) -> list[tuple[str, ...]]:
    """Every nonempty subset of the assigned Themes, smallest first.

    Subset count is exponential, so ``cap`` bounds the Theme count;
    callers catch :class:`TooManyArguments` and fall back to pairing.
    """
    ids = sorted(set(theme_ids), key=id_number)
    if len(ids) > cap:
        raise TooManyArguments(f"{len(ids)} binding themes exceed cap {cap}")
    out = []
    for size in range(1, len(ids) + 1):
        out.extend(itertools.combinations(ids, size))
    return out


def label_candidates(
    doc: Document, trigger_id: str, subsets: list[tuple[str, ...]]
) -> list[str]:
    """valid/invalid per subset: valid iff a gold event has that Theme set."""
    gold_sets = {
        frozenset(e.themes())
        for e in doc.events.values()
        if e.trigger == trigger_id and e.event_type is EventType.BINDING
    }
    return ["valid" if frozenset(s) in gold_sets else "invalid" for s in subsets]


def make_binding_instance(
    ctx: ConstructionContext,
    trigger_id: str,
    subset: tuple[str, ...],
    assigned_themes: tuple[str, ...],
    label: str | None = None,
) -> CandidateInstance:
    """Mark one Theme subset on the trigger's sentence.

    Subset members are argument-marked, the remaining assigned Themes are
    marked as present-but-nonparticipating; that contrast is the signal a
    candidate classifier learns from.
    """
    trig = ctx.triggers[trigger_id]
    sent = next(
        (s for s in ctx.sentences if s.span.contains(trig.span)), None
    )
    if sent is None:
        raise ValueError(f"trigger {trigger_id} is outside every sentence")
    masked = mask_tokens(ctx.entities, ctx.triggers, sent)
    marks = [(trig.span, TRIGGER_MARK)]
    for ent_id in subset:
        marks.append((ctx.entities[ent_id].span, ARG_MARK))
    for ent_id in assigned_themes:
        if ent_id not in subset and ent_id in ctx.entities:
            marks.append((ctx.entities[ent_id].span, OTHER_MARK))
    participants = tuple(sorted(subset, key=id_number))
    return CandidateInstance(
        id=f"{ctx.doc_id}|{trigger_id}|{'+'.join(participants)}",
        doc_id=ctx.doc_id,
        trigger_id=trigger_id,
        trigger_span=trig.span,
        participants=participants,
        tokens=mark_sentence(masked, marks),
        label=label,
    )


def make_candidate_dataset(
    doc: Document, sentences: tuple[Sentence, ...], cap: int = MAX_BINDING_ARGS
) -> list[CandidateInstance]:
    """Labeled Theme-subset instances for every gold Binding trigger."""
    ctx = ConstructionContext(doc.doc_id, doc.entities, doc.triggers, sentences)
    assignments = assignments_from_gold(doc)
    out = []
    for trig_id in sorted(assignments, key=id_number):
        if doc.triggers[trig_id].event_type is not EventType.BINDING:
            continue
        themes = tuple(f for f in assignments[trig_id].themes if f in doc.entities)
        if not themes:
            continue
        try:
            subsets = enumerate_binding_candidates(themes, cap)
        except TooManyArguments as exc:
            log.warning("doc=%s trigger %s: %s; no candidates emitted", doc.doc_id, trig_id, exc)
            continue
        labels = label_candidates(doc, trig_id, subsets)
        for subset, lab in zip(subsets, labels):
            out.append(make_binding_instance(ctx, trig_id, subset, themes, label=lab))
    return out


def break_cycles(
    triggers: dict[str, Trigger], assignments: dict[str, Assignment]
) -> tuple[list[str], set[tuple[str, str]]]:
    """Construction order for triggers plus the edges discarded to get it.

    An edge (user, filler) means ``user``'s assignment references trigger
    ``filler``; construction needs fillers built first.  Depth-first
    search drops any edge that would close a cycle.
    """
    deps = {
        trig_id: sorted(
            {
                f
                for a in (assignments.get(trig_id),)
                if a
                for f in a.themes + a.causes
                if f in triggers
            },
            key=id_number,
        )
        for trig_id in triggers
    }
    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(triggers, WHITE)
    order: list[str] = []
    broken: set[tuple[str, str]] = set()

    def visit(root: str):
        stack = [(root, iter(deps[root]))]
        color[root] = GRAY
        while stack:
            node, children = stack[-1]
            for child in children:
                if color[child] == GRAY:
                    broken.add((node, child))
                    log.warning("dropping cyclic role edge %s -> %s", node, child)
                elif color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, iter(deps[child])))
                    break
            else:
                color[node] = BLACK
                order.append(node)
                stack.pop()

    for trig_id in sorted(triggers, key=id_number):
        if color[trig_id] == WHITE:
            visit(trig_id)
    return order, broken


@dataclass
class _Builder:
    events: list[Event] = field(default_factory=list)

    def add(self, etype: EventType, trigger_id: str, args: list[Argument]) -> str:
        eid = f"E{len(self.events) + 1}"
        self.events.append(Event(eid, etype, trigger_id, tuple(args)))
        return eid


def _binding_subsets_rule(themes: tuple[str, ...]) -> list[tuple[str, ...]]:
    ids = sorted(themes, key=id_number)
    if len(ids) == 1:
        return [tuple(ids)]
    return list(itertools.combinations(ids, 2))


def _binding_subsets_auto(
    ctx: ConstructionContext,
    trig_id: str,
    themes: tuple[str, ...],
    scorer,
    cap: int,
) -> list[tuple[str, ...]]:
    try:
        subsets = enumerate_binding_candidates(themes, cap)
    except TooManyArguments as exc:
        log.warning(
            "doc=%s trigger %s: %s; falling back to pairing", ctx.doc_id, trig_id, exc
        )
        return _binding_subsets_rule(themes)
    instances = [
        make_binding_instance(ctx, trig_id, subset, themes) for subset in subsets
    ]
    dists = scorer.classify_candidate(instances)
    return [s for s, d in zip(subsets, dists) if d.get("valid", 0.0) > 0.5]


def construct_document(
    ctx: ConstructionContext,
    assignments: dict[str, Assignment],
    mode: str = "rule",
    scorer=None,
    max_binding_args: int = MAX_BINDING_ARGS,
) -> list[Event]:
    """Build all events for one document from per-trigger assignments.

    ``mode`` is "rule" or "auto"; auto requires a scorer and differs only
    on Binding triggers.  Returned events are numbered E1.. in creation
    order and reference entity ids and each other's event ids.
    """
    if mode not in ("rule", "auto"):
        raise ValueError(f"unknown construction mode: {mode!r}")
    if mode == "auto" and scorer is None:
        raise ValueError("auto construction needs a scorer")

    order, broken = break_cycles(ctx.triggers, assignments)
    builder = _Builder()
    built: dict[str, list[str]] = {}  # trigger id -> event ids on it

    for trig_id in order:
        assignment = assignments.get(trig_id)
        built[trig_id] = []
        if assignment is None or not assignment.themes:
            continue  # an isolated trigger yields no event
        trig = ctx.triggers[trig_id]
        comp = COMPOSITION[trig.event_type]

        themes = tuple(
            f for f in assignment.themes if (trig_id, f) not in broken
        )
        causes = tuple(
            f for f in assignment.causes if (trig_id, f) not in broken
        )

        if comp.category in (Category.SIMPLE, Category.MULTIPLE) or (
            comp.theme_filler == "entity"
        ):
            dropped = [f for f in themes if f not in ctx.entities]
            for f in dropped:
                log.warning(
                    "doc=%s trigger %s (%s): Theme %s is not an entity; skipped",
                    ctx.doc_id, trig_id, trig.event_type.abbr, f,
                )
            themes = tuple(f for f in themes if f in ctx.entities)
        if comp.max_causes == 0 and causes:
            log.warning(
                "doc=%s trigger %s (%s): %d Cause fillers not allowed; skipped",
                ctx.doc_id, trig_id, trig.event_type.abbr, len(causes),
            )
            causes = ()
        if not themes:
            continue

        if comp.category is Category.SIMPLE:
            for f in themes:
                eid = builder.add(trig.event_type, trig_id, [Argument(Role.THEME, f)])
                built[trig_id].append(eid)
        elif comp.category is Category.MULTIPLE:
            if mode == "auto":
                subsets = _binding_subsets_auto(ctx, trig_id, themes, scorer, max_binding_args)
            else:
                subsets = _binding_subsets_rule(themes)
            for subset in subsets:
                args = [Argument(Role.THEME, f) for f in subset]
                eid = builder.add(trig.event_type, trig_id, args)
                built[trig_id].append(eid)
        else:
            theme_fillers = _expand(themes, ctx, built)
            cause_fillers = _expand(causes, ctx, built) if causes else [None]
            for theme in theme_fillers:
                for cause in cause_fillers:
                    args = [Argument(Role.THEME, theme)]
                    if cause is not None:
                        args.append(Argument(Role.CAUSE, cause))
                    eid = builder.add(trig.event_type, trig_id, args)
                    built[trig_id].append(eid)
    return builder.events


def _expand(fillers: tuple[str, ...], ctx: ConstructionContext, built: dict[str, list[str]]) -> list[str]:
    """Entity fillers pass through; trigger fillers become their events."""
    out: list[str] = []
    for f in fillers:
        if f in ctx.entities:
            out.append(f)
        else:
            expanded = built.get(f, [])
            if not expanded:
                log.warning("trigger filler %s produced no events; argument dropped", f)
            out.extend(expanded)
    return out


def construct_rule(doc: Document) -> list[Event]:
    """Rule construction from gold triggers and gold role assignments."""
    ctx = ConstructionContext(doc.doc_id, doc.entities, doc.triggers)
    return construct_document(ctx, assignments_from_gold(doc), mode="rule")
