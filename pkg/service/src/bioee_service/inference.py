"""Batched inference over loaded checkpoints.

Tagging labels the first subword of each input token and propagates that
label to the whole token at decode time.  Sequence classification returns
the softmax over the pooled encoder output.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import torch

from .checkpoint import LoadedModel


def _chunks(items: Sequence, size: int) -> Iterable[Sequence]:
    for i in range(0, len(items), size):
        yield items[i : i + size]


def _encode(lm: LoadedModel, token_lists: Sequence[Sequence[str]]):
    return lm.tokenizer(
        [list(tokens) for tokens in token_lists],
        is_split_into_words=True,
        padding=True,
        truncation=True,
        max_length=lm.max_seq_len,
        return_tensors="pt",
    )


@torch.no_grad()
def tag_batch(
    lm: LoadedModel, token_lists: Sequence[Sequence[str]], batch_size: int = 32
) -> list[list[str]]:
    """One label per input token, for each instance.

    Tokens whose subwords were all truncated away still need a label; they
    get the outside label.
    """
    outside = lm.labels[0]
    out: list[list[str]] = []
    for chunk in _chunks(token_lists, batch_size):
        enc = _encode(lm, chunk)
        pred = lm.model(**enc).logits.argmax(dim=-1)
        for i, tokens in enumerate(chunk):
            first: dict[int, int] = {}
            for pos, word in enumerate(enc.word_ids(i)):
                if word is not None and word not in first:
                    first[word] = int(pred[i, pos])
            out.append(
                [
                    lm.labels[first[w]] if w in first else outside
                    for w in range(len(tokens))
                ]
            )
    return out


@torch.no_grad()
def prob_batch(
    lm: LoadedModel, token_lists: Sequence[Sequence[str]], batch_size: int = 32
) -> list[list[float]]:
    """One probability per label, for each instance.

    Rows are renormalized in float64 after serialization to plain floats so
    each distribution sums to 1 well within the protocol tolerance.
    """
    out: list[list[float]] = []
    for chunk in _chunks(token_lists, batch_size):
        enc = _encode(lm, chunk)
        probs = torch.softmax(lm.model(**enc).logits.double(), dim=-1)
        for row in probs:
            vals = [float(x) for x in row]
            total = sum(vals)
            out.append([v / total for v in vals])
    return out
