"""Shared fixtures: a tiny random encoder and one checkpoint per task.

The encoder is small enough (hidden size 32, two layers) to keep every
test fast on a CPU while still exercising the real model classes, the
real tokenizer and the full checkpoint layout.
"""

import pytest
import torch
from transformers import (
    AutoModelForSequenceClassification,
    AutoModelForTokenClassification,
    AutoTokenizer,
    BertConfig,
    BertModel,
    BertTokenizerFast,
)
from transformers.utils import logging as hf_logging

from bioee_service.checkpoint import write_task_file
from bioee_service.labels import TASK_LABELS, TASKS

hf_logging.set_verbosity_error()
hf_logging.disable_progress_bar()

# wordpiece vocabulary covering the marked-sentence alphabet plus a few
# continuation pieces so subword splitting actually happens in tests
VOCAB = (
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "#", "@", "$", "gene",
    "the", "a", "of", "and", "to", "in", "with", ",", ".",
    "binds", "bind", "interacts", "complex", "expression",
    "phosphorylation", "transcription", "regulates", "induces",
    "protein", "promoter", "activity", "form",
    "##s", "##ed", "##ing", "##ation",
)

HEAD_SEEDS = {"tag": 11, "role": 12, "candidate": 13}


def write_base_encoder(path) -> None:
    tokenizer = BertTokenizerFast(
        vocab={word: i for i, word in enumerate(VOCAB)}, do_lower_case=True
    )
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=128,
    )
    torch.manual_seed(202608)
    BertModel(config).save_pretrained(path)
    tokenizer.save_pretrained(path)


def write_head_checkpoint(base_dir, out_dir, task: str, max_seq_len: int = 64):
    torch.manual_seed(HEAD_SEEDS[task])
    model_cls = (
        AutoModelForTokenClassification
        if task == "tag"
        else AutoModelForSequenceClassification
    )
    model = model_cls.from_pretrained(base_dir, num_labels=len(TASK_LABELS[task]))
    model.save_pretrained(out_dir)
    AutoTokenizer.from_pretrained(base_dir).save_pretrained(out_dir)
    write_task_file(out_dir, task, max_seq_len)
    return out_dir


@pytest.fixture(scope="session")
def base_encoder(tmp_path_factory):
    path = tmp_path_factory.mktemp("base-encoder")
    write_base_encoder(path)
    return path


@pytest.fixture(scope="session")
def checkpoints(base_encoder, tmp_path_factory):
    root = tmp_path_factory.mktemp("checkpoints")
    return {
        task: write_head_checkpoint(base_encoder, root / task, task) for task in TASKS
    }


@pytest.fixture(scope="session")
def client(checkpoints):
    from fastapi.testclient import TestClient

    from bioee_service.app import create_app

    return TestClient(create_app(checkpoints))
