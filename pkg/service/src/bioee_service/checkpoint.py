"""Checkpoint directory handling.

A servable checkpoint is a standard ``save_pretrained`` tree plus a
``task.json`` manifest::

    config.json             model configuration
    model.safetensors       weights
    tokenizer.json          wordpiece tokenizer
    tokenizer_config.json
    task.json               {"task": ..., "labels": [...], "max_seq_len": ...}

``task.json`` pins the label order the classifier head was trained with.
Loading refuses a checkpoint whose label order differs from the served
vocabulary, because clients decode probabilities by position.
"""

from __future__ import annotations

import json
import pathlib
from dataclasses import dataclass

from .labels import TASK_LABELS

TASK_FILE = "task.json"


@dataclass(frozen=True)
class LoadedModel:
    task: str
    labels: tuple[str, ...]
    max_seq_len: int
    tokenizer: object
    model: object


def write_task_file(directory: str | pathlib.Path, task: str, max_seq_len: int) -> None:
    if task not in TASK_LABELS:
        raise ValueError(f"unknown task {task!r}")
    meta = {
        "task": task,
        "labels": list(TASK_LABELS[task]),
        "max_seq_len": int(max_seq_len),
    }
    path = pathlib.Path(directory) / TASK_FILE
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_checkpoint(directory: str | pathlib.Path) -> LoadedModel:
    """Load a checkpoint directory and return the model ready for inference."""
    from transformers import (
        AutoModelForSequenceClassification,
        AutoModelForTokenClassification,
        AutoTokenizer,
    )

    path = pathlib.Path(directory)
    task_file = path / TASK_FILE
    if not task_file.is_file():
        raise ValueError(f"{path} is not a checkpoint: missing {TASK_FILE}")
    try:
        meta = json.loads(task_file.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{task_file}: invalid JSON: {exc}") from exc
    if not isinstance(meta, dict):
        raise ValueError(f"{task_file}: expected an object")

    task = meta.get("task")
    if task not in TASK_LABELS:
        raise ValueError(f"{task_file}: unknown task {task!r}")
    labels = tuple(meta.get("labels") or ())
    if labels != TASK_LABELS[task]:
        raise ValueError(
            f"{task_file}: label order does not match the {task!r} vocabulary"
        )
    try:
        max_seq_len = int(meta["max_seq_len"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{task_file}: missing or invalid max_seq_len") from exc

    tokenizer = AutoTokenizer.from_pretrained(path)
    model_cls = (
        AutoModelForTokenClassification
        if task == "tag"
        else AutoModelForSequenceClassification
    )
    model = model_cls.from_pretrained(path)
    if model.config.num_labels != len(labels):
        raise ValueError(
            f"{path}: model has {model.config.num_labels} outputs, "
            f"expected {len(labels)} for task {task!r}"
        )
    model.eval()
    return LoadedModel(task, labels, max_seq_len, tokenizer, model)
