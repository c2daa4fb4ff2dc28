import pytest

from bioee.corpus import corpus_path, load_corpus, split_sentences
from bioee.instances import (
    decode_bio,
    enumerate_role_pairs,
    gold_role_labels,
    make_role_dataset,
    make_tagging_instances,
    mask_tokens,
    resolve_trigger_overlaps,
    tag_label_vocab,
    write_jsonl,
    read_jsonl,
)
from bioee.standoff import EventType, Role, Span, parse_document


@pytest.fixture(scope="module")
def mini():
    return {d.doc_id: d for d in load_corpus(corpus_path("minicorpus"))}


def doc_and_sentences(mini, doc_id):
    doc = mini[doc_id]
    return doc, split_sentences(doc)


def test_tag_label_vocab_shape():
    vocab = tag_label_vocab()
    assert vocab[0] == "O"
    assert len(vocab) == 1 + 2 * 13
    assert "B-Binding" in vocab and "I-Negative_regulation" in vocab


def test_mask_collapses_each_entity_to_one_token(mini):
    doc, sentences = doc_and_sentences(mini, "regu_entity_theme")
    masked = mask_tokens(doc.entities, doc.triggers, sentences[0])
    texts = [t.text for t in masked]
    assert texts == ["gene", "regulates", "gene", "on", "monocytes", "."]
    # the collapsed token keeps the whole entity span
    mhc = next(t for t in masked if t.entity_id == "T2")
    assert doc.text[mhc.span.start : mhc.span.end] == "MHC class II"


def test_tagging_instance_tokens_and_labels(mini):
    doc, sentences = doc_and_sentences(mini, "promo_basic")
    (inst,) = make_tagging_instances(doc, sentences)
    assert inst.id == "promo_basic|s0"
    assert inst.tokens == (
        "gene", "promotes", "gene", "expression", "in", "regulatory", "T", "cells", ".",
    )
    assert inst.labels == (
        "O", "B-Positive_regulation", "O", "B-Gene_expression", "O", "O", "O", "O", "O",
    )
    assert all(label in tag_label_vocab() for label in inst.labels)


def test_tagging_without_labels(mini):
    doc, sentences = doc_and_sentences(mini, "promo_basic")
    (inst,) = make_tagging_instances(doc, sentences, with_labels=False)
    assert inst.labels is None


def test_trigger_inside_hyphenated_word(mini):
    doc, sentences = doc_and_sentences(mini, "family_singletons")
    (inst,) = make_tagging_instances(doc, sentences)
    i = inst.tokens.index("binding")
    assert inst.labels[i] == "B-Binding"
    assert inst.tokens[i - 2 : i + 1] == ("DNA", "-", "binding")


def test_overlapping_triggers_longer_wins():
    text = "IL-2 binding activity was assayed.\n"
    a1 = "T1\tProtein 0 4\tIL-2\n"
    a2 = (
        "T2\tBinding 5 12\tbinding\n"
        "T3\tGene_expression 5 21\tbinding activity\n"
        "E1\tBinding:T2 Theme:T1\n"
        "E2\tGene_expression:T3 Theme:T1\n"
    )
    doc = parse_document(text, a1, a2)
    kept, dropped = resolve_trigger_overlaps(doc.triggers)
    assert set(kept) == {"T3"}
    assert [t.id for t in dropped] == ["T2"]
    sentences = split_sentences(doc)
    (inst,) = make_tagging_instances(doc, sentences)
    assert "B-Gene_expression" in inst.labels
    assert "B-Binding" not in inst.labels
    assert "I-Gene_expression" in inst.labels


def test_decode_bio_round_trip(mini):
    for doc_id in ("promo_basic", "pore_shared_bind", "multi_sentence"):
        doc, sentences = doc_and_sentences(mini, doc_id)
        recovered = []
        for inst in make_tagging_instances(doc, sentences):
            recovered.extend(decode_bio(inst.labels, inst.spans))
        expected = [(t.event_type, t.span) for t in doc.triggers.values()]
        assert sorted(recovered, key=lambda r: r[1]) == sorted(expected, key=lambda r: r[1])


def test_decode_bio_orphan_i_repair():
    spans = (Span(0, 3), Span(4, 9), Span(10, 12))
    runs = decode_bio(("I-Binding", "O", "I-Binding"), spans)
    assert runs == [
        (EventType.BINDING, Span(0, 3)),
        (EventType.BINDING, Span(10, 12)),
    ]


def test_decode_bio_type_change_breaks_run():
    spans = (Span(0, 3), Span(4, 9))
    runs = decode_bio(("B-Binding", "I-Gene_expression"), spans)
    assert runs == [
        (EventType.BINDING, Span(0, 3)),
        (EventType.GENE_EXPRESSION, Span(4, 9)),
    ]
    runs = decode_bio(("B-Binding", "B-Binding"), spans)
    assert len(runs) == 2


def test_decode_bio_multi_token_run():
    spans = (Span(0, 3), Span(4, 9), Span(10, 12))
    runs = decode_bio(("B-Binding", "I-Binding", "I-Binding"), spans)
    assert runs == [(EventType.BINDING, Span(0, 12))]


def test_decode_bio_rejects_junk():
    with pytest.raises(ValueError):
        decode_bio(("B-Binding",), (Span(0, 1), Span(2, 3)))
    with pytest.raises(ValueError):
        decode_bio(("X-Binding",), (Span(0, 1),))


def test_enumerate_role_pairs_composition_aware(mini):
    doc, sentences = doc_and_sentences(mini, "promo_basic")
    pairs = enumerate_role_pairs(doc.entities, doc.triggers, sentences)
    as_tuples = [(p.trigger_id, p.filler_id) for p in pairs]
    # T4 promotes (nested type) pairs with both entities and the other
    # trigger; T3 expression (simple type) pairs with entities only
    assert as_tuples == [
        ("T4", "T1"), ("T4", "T2"), ("T4", "T3"),
        ("T3", "T1"), ("T3", "T2"),
    ]


def test_role_pairs_stay_within_sentence(mini):
    doc, sentences = doc_and_sentences(mini, "multi_sentence")
    pairs = enumerate_role_pairs(doc.entities, doc.triggers, sentences)
    spans_by_sentence = {s.index: s.span for s in sentences}
    for p in pairs:
        sent_span = spans_by_sentence[p.sentence_index]
        trig = doc.triggers[p.trigger_id]
        filler = doc.entities.get(p.filler_id) or doc.triggers[p.filler_id]
        assert sent_span.contains(trig.span)
        assert sent_span.contains(filler.span)


def test_gold_role_labels_use_subevent_trigger(mini):
    doc = mini["promo_basic"]
    labels = gold_role_labels(doc)
    assert labels[("T3", "T2")] is Role.THEME
    assert labels[("T4", "T3")] is Role.THEME  # event argument, keyed by its trigger
    assert labels[("T4", "T1")] is Role.CAUSE
    assert len(labels) == 3


def test_role_dataset_markers_and_labels(mini):
    doc, sentences = doc_and_sentences(mini, "promo_basic")
    insts = {(i.trigger_id, i.filler_id): i for i in make_role_dataset(doc, sentences)}
    assert len(insts) == 5
    cause = insts[("T4", "T1")]
    assert cause.label == "Cause"
    assert cause.tokens == (
        "@", "gene", "@", "#", "promotes", "#", "gene", "expression",
        "in", "regulatory", "T", "cells", ".",
    )
    nested = insts[("T4", "T3")]
    assert nested.label == "Theme"
    assert nested.tokens == (
        "gene", "#", "promotes", "#", "gene", "@", "expression", "@",
        "in", "regulatory", "T", "cells", ".",
    )
    unrelated = insts[("T3", "T1")]
    assert unrelated.label == "None"


def test_role_instance_ids_unique(mini):
    seen = set()
    for doc in mini.values():
        for inst in make_role_dataset(doc, split_sentences(doc)):
            assert inst.id not in seen
            seen.add(inst.id)


def test_jsonl_round_trip(tmp_path, mini):
    doc, sentences = doc_and_sentences(mini, "promo_basic")
    insts = make_tagging_instances(doc, sentences)
    path = tmp_path / "tags.jsonl"
    assert write_jsonl(path, insts) == 1
    rows = read_jsonl(path)
    assert rows[0]["tokens"] == list(insts[0].tokens)
    assert rows[0]["labels"] == list(insts[0].labels)
    assert rows[0]["spans"] == [[s.start, s.end] for s in insts[0].spans]
