"""Label vocabularies for the three scoring tasks.

The tuple orders below are part of the wire protocol: ``/v1/role`` and
``/v1/candidate`` return probability lists aligned to ``ROLE_LABELS`` and
``CANDIDATE_LABELS``, and ``/v1/tag`` may only emit labels from
``TAG_LABELS``.  Clients decode by position, so reordering anything here
is a breaking change.
"""

EVENT_TYPES = (
    "Gene_expression",
    "Transcription",
    "Protein_catabolism",
    "Phosphorylation",
    "Localization",
    "Binding",
    "Protein_modification",
    "Ubiquitination",
    "Acetylation",
    "Deacetylation",
    "Regulation",
    "Positive_regulation",
    "Negative_regulation",
)

# outside label first, then a B/I pair per event type in declaration order
TAG_LABELS = ("O",) + tuple(
    f"{prefix}-{name}" for name in EVENT_TYPES for prefix in ("B", "I")
)

ROLE_LABELS = ("Theme", "Cause", "None")

CANDIDATE_LABELS = ("valid", "invalid")

TASK_LABELS = {
    "tag": TAG_LABELS,
    "role": ROLE_LABELS,
    "candidate": CANDIDATE_LABELS,
}

TASKS = tuple(TASK_LABELS)
