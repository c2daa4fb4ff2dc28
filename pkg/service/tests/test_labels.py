"""The label orders are a wire contract; freeze them."""

from bioee_service.labels import (
    CANDIDATE_LABELS,
    EVENT_TYPES,
    ROLE_LABELS,
    TAG_LABELS,
    TASK_LABELS,
    TASKS,
)


def test_tag_label_order_frozen():
    assert TAG_LABELS == (
        "O",
        "B-Gene_expression", "I-Gene_expression",
        "B-Transcription", "I-Transcription",
        "B-Protein_catabolism", "I-Protein_catabolism",
        "B-Phosphorylation", "I-Phosphorylation",
        "B-Localization", "I-Localization",
        "B-Binding", "I-Binding",
        "B-Protein_modification", "I-Protein_modification",
        "B-Ubiquitination", "I-Ubiquitination",
        "B-Acetylation", "I-Acetylation",
        "B-Deacetylation", "I-Deacetylation",
        "B-Regulation", "I-Regulation",
        "B-Positive_regulation", "I-Positive_regulation",
        "B-Negative_regulation", "I-Negative_regulation",
    )
    assert len(TAG_LABELS) == 2 * len(EVENT_TYPES) + 1


def test_classification_orders_frozen():
    assert ROLE_LABELS == ("Theme", "Cause", "None")
    assert CANDIDATE_LABELS == ("valid", "invalid")


def test_task_table():
    assert TASKS == ("tag", "role", "candidate")
    assert TASK_LABELS["tag"] is TAG_LABELS
    assert TASK_LABELS["role"] is ROLE_LABELS
    assert TASK_LABELS["candidate"] is CANDIDATE_LABELS
