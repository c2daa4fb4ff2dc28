"""Pipelined biomedical event extraction toolkit.

Standoff-format parsing, classifier instance generation, rule-based and
n-ary-classification-based event construction, and strict/approximate
evaluation.  All neural scoring sits behind the scorer contract in
:mod:`bioee.scorer`, so the pipeline runs against deterministic oracles.
"""

__version__ = "0.1.0"

from bioee.standoff import (
    Argument,
    Document,
    Entity,
    Event,
    EventType,
    Role,
    Span,
    Trigger,
    parse_document,
    serialize_a2,
    validate,
)

__all__ = [
    "Argument",
    "Document",
    "Entity",
    "Event",
    "EventType",
    "Role",
    "Span",
    "Trigger",
    "parse_document",
    "serialize_a2",
    "validate",
]
