"""Fine-tune a classifier head and save a servable checkpoint.

Training data is the JSONL instance format produced by the extraction
pipeline's ``gen-triggers``, ``gen-roles`` and ``gen-candidates``
subcommands; only the ``tokens`` and ``label``/``labels`` fields are used.
Defaults: Adam, learning rate 1e-5, batch size 8, 20 epochs (5 is the
usual short schedule), max sequence length 256, cross-entropy loss.

When a dev file is given, the checkpoint holds the weights from the epoch
with the lowest dev loss; otherwise the final epoch is saved.
"""

from __future__ import annotations

import argparse
import json
import math
import pathlib
import random
import sys
from dataclasses import dataclass, field

from .checkpoint import write_task_file
from .labels import TASK_LABELS, TASKS


class TrainingDataError(ValueError):
    """A training file line that cannot be used, reported with its line number."""


@dataclass
class TrainingConfig:
    task: str
    train_file: pathlib.Path
    out_dir: pathlib.Path
    base_model: str
    dev_file: pathlib.Path | None = None
    learning_rate: float = 1e-5
    batch_size: int = 8
    epochs: int = 20
    max_seq_len: int = 256
    seed: int = 13

    def validate(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.batch_size < 1 or self.epochs < 1 or self.max_seq_len < 8:
            raise ValueError("batch_size, epochs and max_seq_len must be positive")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class TrainResult:
    out_dir: pathlib.Path
    step_losses: list[float] = field(default_factory=list)
    epoch_losses: list[float] = field(default_factory=list)
    dev_losses: list[float] = field(default_factory=list)
    best_epoch: int = 0


Example = tuple[list[str], object]  # (tokens, label or label list)


def read_instances(path: str | pathlib.Path, task: str) -> list[Example]:
    """Parse one JSONL instance file, failing loudly with line numbers."""
    vocab = set(TASK_LABELS[task])
    examples: list[Example] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise TrainingDataError(f"{where}: invalid JSON: {exc}") from exc
            if not isinstance(row, dict):
                raise TrainingDataError(f"{where}: expected an object")
            kind = row.get("kind")
            if kind is not None and kind != task:
                raise TrainingDataError(
                    f"{where}: instance kind {kind!r} does not match task {task!r}"
                )
            tokens = row.get("tokens")
            if (
                not isinstance(tokens, list)
                or not tokens
                or not all(isinstance(t, str) for t in tokens)
            ):
                raise TrainingDataError(f"{where}: tokens must be a non-empty string list")
            if task == "tag":
                labels = row.get("labels")
                if not isinstance(labels, list) or len(labels) != len(tokens):
                    raise TrainingDataError(
                        f"{where}: labels must be a list matching {len(tokens)} tokens"
                    )
                bad = next((l for l in labels if l not in vocab), None)
                if bad is not None:
                    raise TrainingDataError(f"{where}: unknown label {bad!r}")
                examples.append((tokens, labels))
            else:
                label = row.get("label")
                if label not in vocab:
                    raise TrainingDataError(f"{where}: unknown label {label!r}")
                examples.append((tokens, label))
    if not examples:
        raise TrainingDataError(f"{path}: no training instances")
    return examples


def _encode(tokenizer, batch: list[Example], cfg: TrainingConfig, label_ids: dict):
    import torch

    enc = tokenizer(
        [tokens for tokens, _ in batch],
        is_split_into_words=True,
        padding=True,
        truncation=True,
        max_length=cfg.max_seq_len,
        return_tensors="pt",
    )
    if cfg.task == "tag":
        # label the first subword of each token; the rest are ignored by the loss
        targets = torch.full(enc["input_ids"].shape, -100, dtype=torch.long)
        for i, (_, labels) in enumerate(batch):
            seen: set[int] = set()
            for pos, word in enumerate(enc.word_ids(i)):
                if word is None or word in seen:
                    continue
                seen.add(word)
                targets[i, pos] = label_ids[labels[word]]
    else:
        targets = torch.tensor([label_ids[label] for _, label in batch], dtype=torch.long)
    return enc, targets


def _mean_loss(model, tokenizer, examples, cfg, label_ids) -> float:
    import torch

    model.eval()
    total = 0.0
    batches = 0
    with torch.no_grad():
        for start in range(0, len(examples), cfg.batch_size):
            enc, targets = _encode(
                tokenizer, examples[start : start + cfg.batch_size], cfg, label_ids
            )
            total += float(model(**enc, labels=targets).loss)
            batches += 1
    model.train()
    return total / batches


def train(cfg: TrainingConfig) -> TrainResult:
    import torch
    from transformers import (
        AutoModelForSequenceClassification,
        AutoModelForTokenClassification,
        AutoTokenizer,
    )

    cfg.validate()
    labels = TASK_LABELS[cfg.task]
    label_ids = {label: i for i, label in enumerate(labels)}
    train_set = read_instances(cfg.train_file, cfg.task)
    dev_set = read_instances(cfg.dev_file, cfg.task) if cfg.dev_file else None

    torch.manual_seed(cfg.seed)
    tokenizer = AutoTokenizer.from_pretrained(cfg.base_model)
    model_cls = (
        AutoModelForTokenClassification
        if cfg.task == "tag"
        else AutoModelForSequenceClassification
    )
    model = model_cls.from_pretrained(
        cfg.base_model,
        num_labels=len(labels),
        id2label={i: label for i, label in enumerate(labels)},
        label2id=label_ids,
    )
    positions = getattr(model.config, "max_position_embeddings", cfg.max_seq_len)
    if cfg.max_seq_len > positions:
        raise ValueError(
            f"max_seq_len {cfg.max_seq_len} exceeds the encoder's {positions} positions"
        )

    out_dir = pathlib.Path(cfg.out_dir)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    rng = random.Random(cfg.seed)
    result = TrainResult(out_dir=out_dir)
    best_dev = math.inf

    def save() -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        model.save_pretrained(out_dir)
        tokenizer.save_pretrained(out_dir)
        write_task_file(out_dir, cfg.task, cfg.max_seq_len)

    model.train()
    for epoch in range(1, cfg.epochs + 1):
        order = list(range(len(train_set)))
        rng.shuffle(order)
        epoch_total = 0.0
        steps = 0
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start : start + cfg.batch_size]]
            enc, targets = _encode(tokenizer, batch, cfg, label_ids)
            loss = model(**enc, labels=targets).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            value = float(loss.detach())
            result.step_losses.append(value)
            epoch_total += value
            steps += 1
        epoch_loss = epoch_total / steps
        result.epoch_losses.append(epoch_loss)
        line = f"epoch {epoch}/{cfg.epochs} train_loss={epoch_loss:.4f}"
        if dev_set is not None:
            dev_loss = _mean_loss(model, tokenizer, dev_set, cfg, label_ids)
            result.dev_losses.append(dev_loss)
            line += f" dev_loss={dev_loss:.4f}"
            if dev_loss < best_dev:
                best_dev = dev_loss
                result.best_epoch = epoch
                save()
                line += " *"
        print(line)
    if dev_set is None:
        result.best_epoch = cfg.epochs
        save()
    return result


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bioee-service-train",
        description="Fine-tune a scoring head on pipeline-generated instances.",
    )
    parser.add_argument("--task", required=True, choices=TASKS)
    parser.add_argument("--train", required=True, metavar="FILE", help="training JSONL")
    parser.add_argument("--out", required=True, metavar="DIR", help="checkpoint directory")
    parser.add_argument(
        "--base",
        required=True,
        metavar="MODEL",
        help="base encoder: a pretrained model name or checkpoint directory",
    )
    parser.add_argument("--dev", metavar="FILE", help="dev JSONL for best-epoch selection")
    parser.add_argument("--lr", type=float, default=1e-5)
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument(
        "--epochs", type=int, default=20, help="default 20; 5 is the usual short schedule"
    )
    parser.add_argument("--max-seq-len", type=int, default=256)
    parser.add_argument("--seed", type=int, default=13)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if not exc.code else 1
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()
    cfg = TrainingConfig(
        task=args.task,
        train_file=pathlib.Path(args.train),
        out_dir=pathlib.Path(args.out),
        base_model=args.base,
        dev_file=pathlib.Path(args.dev) if args.dev else None,
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        max_seq_len=args.max_seq_len,
        seed=args.seed,
    )
    try:
        result = train(cfg)
    except (TrainingDataError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"saved checkpoint to {result.out_dir} (epoch {result.best_epoch})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
