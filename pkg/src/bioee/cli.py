"""Command line interface and end-to-end pipeline orchestration.

Every pipeline stage is exposed as a subcommand so intermediate artifacts
can be produced, inspected, and re-consumed independently:

    parse-check      validate a corpus directory, list repairs
    stats            corpus-level annotation counts
    gen-triggers     labeled trigger-tagging instances (JSONL)
    gen-roles        labeled role-pair instances (JSONL)
    gen-candidates   labeled Theme-subset instances (JSONL)
    construct        build events from trigger/assignment tables
    evaluate         score predicted .a2 files against gold
    analyze-errors   attribute Binding false positives to a stage
    pipeline         run all stages end to end

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 scorer unavailable.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import logging
import os
import pathlib
import sys
from dataclasses import dataclass, fields

from bioee.construction import (
    MAX_BINDING_ARGS,
    Assignment,
    ConstructionContext,
    assignments_from_gold,
    construct_document,
    make_candidate_dataset,
)
from bioee.corpus import compute_stats, load_corpus, split_sentences
from bioee.errors import BioeeError, DocIdMismatch, MissingFile, ScorerUnavailable
from bioee.evaluation import (
    DocumentPrediction,
    analyze_cascade,
    evaluate,
    prediction_from_document,
)
from bioee.instances import (
    decode_bio,
    enumerate_role_pairs,
    make_role_dataset,
    make_role_instance,
    make_tagging_instances,
    mask_tokens,
    read_jsonl,
    tag_label_vocab,
    write_jsonl,
)
from bioee.scorer import NoiseConfig, NoisyScorer, OracleScorer, RemoteScorer, Scorer
from bioee.standoff import (
    Document,
    EventType,
    Span,
    Trigger,
    id_number,
    parse_document,
    serialize_a1,
    serialize_a2,
)

log = logging.getLogger(__name__)

ENDPOINT_ENV = "BIOEE_SCORER_ENDPOINT"
SCORER_KINDS = ("oracle", "noisy", "remote")
# CLI spelling -> evaluation mode
REGIMES = {"strict": "strict", "approx": "approximate", "approximate": "approximate"}

# scan orders for decisions; max() keeps the first maximum, so exact ties
# fall to the null label
_ROLE_ORDER = ("None", "Theme", "Cause")


@dataclass
class PipelineConfig:
    """One reproducible run: corpus in, per-stage artifacts out."""

    corpus: str
    out_dir: str
    mode: str = "rule"  # event construction: rule | auto
    scorer: str = "oracle"  # oracle | noisy | remote
    endpoint: str | None = None
    seed: int = 0
    tag_flip: float = 0.0
    role_flip: float = 0.0
    candidate_flip: float = 0.0
    gold_triggers: bool = False
    gold_args: bool = False
    regime: str = "strict"
    max_binding_args: int = MAX_BINDING_ARGS
    jobs: int = 1

    def validate(self) -> None:
        if self.mode not in ("rule", "auto"):
            raise ValueError(f"unknown construction mode: {self.mode!r}")
        if self.scorer not in SCORER_KINDS:
            raise ValueError(f"unknown scorer kind: {self.scorer!r}")
        if self.regime not in REGIMES:
            raise ValueError(f"unknown evaluation regime: {self.regime!r}")
        for name in ("tag_flip", "role_flip", "candidate_flip"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {rate!r}")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.max_binding_args < 1:
            raise ValueError("max_binding_args must be at least 1")
        if self.gold_args and not self.gold_triggers:
            # gold assignments name gold trigger ids, which do not exist
            # in a predicted trigger table
            raise ValueError("gold_args requires gold_triggers")


def make_scorer(cfg: PipelineConfig, docs) -> Scorer:
    if cfg.scorer == "remote":
        endpoint = cfg.endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise ValueError(
                f"remote scorer needs --endpoint or the {ENDPOINT_ENV} environment variable"
            )
        return RemoteScorer(endpoint)
    oracle = OracleScorer(docs)
    if cfg.scorer == "oracle":
        return oracle
    noise = NoiseConfig(
        seed=cfg.seed,
        tag_flip=cfg.tag_flip,
        role_flip=cfg.role_flip,
        candidate_flip=cfg.candidate_flip,
    )
    return NoisyScorer(oracle, noise)


def _decide(dist: dict[str, float], order) -> str:
    return max(order, key=lambda label: dist.get(label, 0.0))


def predict_triggers(doc: Document, sentences, scorer: Scorer) -> dict[str, Trigger]:
    """Tag every sentence and decode the BIO runs into a trigger table.

    Predicted ids continue after the .a1 entity ids so the two tables can
    be serialized into one annotation namespace without collisions.
    """
    instances = make_tagging_instances(doc, sentences, with_labels=False)
    distributions = scorer.tag(instances)
    vocab = tag_label_vocab()
    base = max((id_number(eid) for eid in doc.entities), default=0)
    triggers: dict[str, Trigger] = {}
    for inst, dists in zip(instances, distributions):
        labels = [_decide(d, vocab) for d in dists]
        for etype, span in decode_bio(labels, inst.spans):
            tid = f"T{base + len(triggers) + 1}"
            triggers[tid] = Trigger(tid, etype, span, doc.text[span.start : span.end])
    return triggers


def predict_assignments(
    doc: Document, triggers: dict[str, Trigger], sentences, scorer: Scorer
) -> dict[str, Assignment]:
    """Classify every sentence-local (trigger, filler) pair into role sets."""
    pairs = enumerate_role_pairs(doc.entities, triggers, sentences)
    masked = {s.index: mask_tokens(doc.entities, triggers, s) for s in sentences}
    instances = [
        make_role_instance(
            doc.entities, triggers, masked[p.sentence_index], doc.doc_id, p.sentence_index, p
        )
        for p in pairs
    ]
    distributions = scorer.classify_role(instances)
    themes: dict[str, list[str]] = {}
    causes: dict[str, list[str]] = {}
    for pair, dist in zip(pairs, distributions):
        decision = _decide(dist, _ROLE_ORDER)
        if decision == "Theme":
            themes.setdefault(pair.trigger_id, []).append(pair.filler_id)
        elif decision == "Cause":
            causes.setdefault(pair.trigger_id, []).append(pair.filler_id)
    out = {}
    for trig_id in triggers:
        if trig_id in themes or trig_id in causes:
            out[trig_id] = Assignment(
                themes=tuple(sorted(themes.get(trig_id, []), key=id_number)),
                causes=tuple(sorted(causes.get(trig_id, []), key=id_number)),
            )
    return out


def process_document(
    doc: Document, cfg: PipelineConfig, scorer: Scorer
) -> tuple[DocumentPrediction, list[dict], list[dict]]:
    """Run the three stages on one document.

    Returns the prediction plus the trigger and assignment artifact rows;
    a failing stage is reported with its name and the document id before
    the error propagates.
    """
    stage = "trigger identification"
    try:
        sentences = split_sentences(doc)
        triggers = dict(doc.triggers) if cfg.gold_triggers else predict_triggers(doc, sentences, scorer)
        stage = "argument role recognition"
        if cfg.gold_args:
            assignments = assignments_from_gold(doc)
        else:
            assignments = predict_assignments(doc, triggers, sentences, scorer)
        stage = "event construction"
        ctx = ConstructionContext(doc.doc_id, doc.entities, triggers, sentences)
        events = construct_document(
            ctx,
            assignments,
            mode=cfg.mode,
            scorer=scorer if cfg.mode == "auto" else None,
            max_binding_args=cfg.max_binding_args,
        )
    except Exception as exc:
        log.error("stage %r failed on document %s: %s", stage, doc.doc_id, exc)
        raise
    prediction = DocumentPrediction(doc.doc_id, triggers, {e.id: e for e in events})
    trigger_rows = [
        {
            "doc_id": doc.doc_id,
            "id": t.id,
            "type": t.event_type.value,
            "start": t.span.start,
            "end": t.span.end,
            "surface": t.surface,
        }
        for t in sorted(triggers.values(), key=lambda t: id_number(t.id))
    ]
    assignment_rows = [
        {
            "doc_id": doc.doc_id,
            "trigger_id": trig_id,
            "themes": list(assignments[trig_id].themes),
            "causes": list(assignments[trig_id].causes),
        }
        for trig_id in sorted(assignments, key=id_number)
    ]
    return prediction, trigger_rows, assignment_rows


def _write_predictions(out_dir: pathlib.Path, docs, predictions) -> list[pathlib.Path]:
    paths = []
    for doc, pred in zip(docs, predictions):
        packed = Document(doc.doc_id, doc.text, doc.entities, pred.triggers, pred.events)
        path = out_dir / f"{doc.doc_id}.a2"
        path.write_text(serialize_a2(packed))
        paths.append(path)
    return paths


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute all stages and persist one artifact per stage.

    Documents are processed by a worker pool and merged back in doc_id
    order, so artifacts are byte-identical regardless of scheduling.
    Returns a summary with artifact paths and, when the corpus carries
    gold events, the evaluation report.
    """
    cfg.validate()
    docs = load_corpus(cfg.corpus)
    has_gold = any(doc.events for doc in docs)
    if (cfg.gold_triggers or cfg.gold_args) and not any(doc.triggers for doc in docs):
        raise MissingFile(f"gold injection requested but {cfg.corpus} has no gold annotations")
    scorer = make_scorer(cfg, docs)

    def work(doc):
        return process_document(doc, cfg, scorer)

    if cfg.jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(work, docs))  # map preserves input order
    else:
        results = [work(doc) for doc in docs]

    out_dir = pathlib.Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    predictions = [pred for pred, _, _ in results]
    triggers_path = out_dir / "triggers.jsonl"
    assignments_path = out_dir / "assignments.jsonl"
    write_jsonl(triggers_path, [row for _, rows, _ in results for row in rows])
    write_jsonl(assignments_path, [row for _, _, rows in results for row in rows])
    a2_paths = _write_predictions(out_dir, docs, predictions)

    summary = {
        "documents": len(docs),
        "artifacts": {
            "triggers": str(triggers_path),
            "assignments": str(assignments_path),
            "a2_dir": str(out_dir),
            "a2_files": len(a2_paths),
        },
    }
    if has_gold:
        mode = REGIMES[cfg.regime]
        report = evaluate(docs, predictions, mode)
        cascade = analyze_cascade(docs, predictions, mode)
        report_path = out_dir / "report.json"
        _write_json(report_path, {"evaluation": report.as_dict(), "cascade": cascade.as_dict()})
        summary["artifacts"]["report"] = str(report_path)
        summary["evaluation"] = report.as_dict()
        summary["cascade"] = cascade.as_dict()
    else:
        log.info("corpus has no gold events; skipping evaluation")
    return summary


def _write_json(path: pathlib.Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def load_trigger_table(path, docs) -> dict[str, dict[str, Trigger]]:
    """Read a triggers.jsonl artifact back into per-document tables."""
    known = {doc.doc_id: doc for doc in docs}
    tables: dict[str, dict[str, Trigger]] = {doc.doc_id: {} for doc in docs}
    for row in read_jsonl(path):
        doc_id = row["doc_id"]
        if doc_id not in known:
            raise DocIdMismatch(f"{path}: triggers for unknown document {doc_id!r}")
        trig = Trigger(
            row["id"],
            EventType.from_string(row["type"]),
            Span(row["start"], row["end"]),
            row["surface"],
        )
        tables[doc_id][trig.id] = trig
    return tables


def load_assignment_table(path, docs) -> dict[str, dict[str, Assignment]]:
    """Read an assignments.jsonl artifact back into per-document maps."""
    known = {doc.doc_id for doc in docs}
    tables: dict[str, dict[str, Assignment]] = {doc.doc_id: {} for doc in docs}
    for row in read_jsonl(path):
        doc_id = row["doc_id"]
        if doc_id not in known:
            raise DocIdMismatch(f"{path}: assignments for unknown document {doc_id!r}")
        tables[doc_id][row["trigger_id"]] = Assignment(
            themes=tuple(row.get("themes", ())),
            causes=tuple(row.get("causes", ())),
        )
    return tables


def load_predictions(gold_docs, pred_dir) -> list[DocumentPrediction]:
    """Parse one predicted .a2 per document; absent files count as misses.

    Predicted annotations that fail validation are dropped by the lenient
    parser and reported, since they could never match a gold event anyway.
    """
    pred_dir = pathlib.Path(pred_dir)
    if not pred_dir.is_dir():
        raise MissingFile(f"prediction directory not found: {pred_dir}")
    known = {doc.doc_id for doc in gold_docs}
    for path in sorted(pred_dir.glob("*.a2")):
        if path.stem not in known:
            raise DocIdMismatch(f"prediction file {path.name} matches no gold document")
    predictions = []
    for doc in gold_docs:
        path = pred_dir / f"{doc.doc_id}.a2"
        if not path.exists():
            continue  # evaluate() warns and counts the misses
        parsed = parse_document(
            doc.text, serialize_a1(doc), path.read_text(), doc_id=doc.doc_id
        )
        if parsed.dropped:
            log.warning(
                "doc=%s: %d predicted annotations dropped as invalid",
                doc.doc_id,
                len(parsed.dropped),
            )
        predictions.append(prediction_from_document(parsed))
    return predictions


# ---------------------------------------------------------------- commands


def cmd_parse_check(args) -> int:
    docs = load_corpus(args.corpus, strict=args.strict, dedupe=False)
    repairs = 0
    for doc in docs:
        for violation in doc.dropped:
            repairs += 1
            print(f"{doc.doc_id}\t{violation.id}\t{violation.rule}\t{violation.message}")
    print(f"{len(docs)} documents checked, {repairs} annotations dropped or repaired")
    return 0


def cmd_stats(args) -> int:
    stats = compute_stats(load_corpus(args.corpus))
    if args.json:
        print(json.dumps(stats.as_dict(), sort_keys=True, indent=2))
        return 0
    print(f"documents  {stats.documents:6d}")
    print(f"entities   {stats.entities:6d}")
    print(f"triggers   {stats.triggers:6d}")
    print(f"events     {stats.events:6d}")
    print()
    print(f"{'event type':24s} {'count':>6s} {'share%':>7s}")
    for etype in EventType:
        print(f"{etype.value:24s} {stats.by_type.get(etype, 0):6d} {stats.share(etype):7.1f}")
    return 0


def cmd_gen_triggers(args) -> int:
    rows = []
    for doc in load_corpus(args.corpus):
        rows.extend(make_tagging_instances(doc, split_sentences(doc)))
    count = write_jsonl(args.out, rows)
    print(f"wrote {count} tagging instances to {args.out}")
    return 0


def cmd_gen_roles(args) -> int:
    rows = []
    for doc in load_corpus(args.corpus):
        rows.extend(make_role_dataset(doc, split_sentences(doc)))
    count = write_jsonl(args.out, rows)
    print(f"wrote {count} role instances to {args.out}")
    return 0


def cmd_gen_candidates(args) -> int:
    rows = []
    for doc in load_corpus(args.corpus):
        rows.extend(make_candidate_dataset(doc, split_sentences(doc)))
    count = write_jsonl(args.out, rows)
    print(f"wrote {count} candidate instances to {args.out}")
    return 0


def cmd_construct(args) -> int:
    cfg = _pipeline_config(args, require_out=True)
    cfg.validate()
    docs = load_corpus(cfg.corpus)
    triggers_by_doc = (
        load_trigger_table(args.triggers, docs)
        if args.triggers
        else {doc.doc_id: dict(doc.triggers) for doc in docs}
    )
    assignments_by_doc = (
        load_assignment_table(args.assignments, docs)
        if args.assignments
        else {doc.doc_id: assignments_from_gold(doc) for doc in docs}
    )
    scorer = make_scorer(cfg, docs) if cfg.mode == "auto" else None
    out_dir = pathlib.Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    built = 0
    for doc in docs:
        ctx = ConstructionContext(
            doc.doc_id, doc.entities, triggers_by_doc[doc.doc_id], split_sentences(doc)
        )
        events = construct_document(
            ctx,
            assignments_by_doc[doc.doc_id],
            mode=cfg.mode,
            scorer=scorer,
            max_binding_args=cfg.max_binding_args,
        )
        built += len(events)
        packed = Document(
            doc.doc_id, doc.text, doc.entities, ctx.triggers, {e.id: e for e in events}
        )
        (out_dir / f"{doc.doc_id}.a2").write_text(serialize_a2(packed))
    print(f"constructed {built} events across {len(docs)} documents into {out_dir}")
    return 0


def cmd_evaluate(args) -> int:
    gold = load_corpus(args.gold)
    predictions = load_predictions(gold, args.pred)
    report = evaluate(gold, predictions, REGIMES[args.regime])
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True, indent=2))
        return 0
    overall = report.overall
    print(f"mode: {report.mode}   documents: {report.documents}")
    print(f"{'event type':24s} {'tp':>4s} {'fp':>4s} {'fn':>4s} {'P%':>7s} {'R%':>7s} {'F1%':>7s}")
    for etype in EventType:
        if etype not in report.per_type:
            continue
        c = report.per_type[etype]
        print(
            f"{etype.value:24s} {c.tp:4d} {c.fp:4d} {c.fn:4d}"
            f" {100 * c.precision:7.2f} {100 * c.recall:7.2f} {100 * c.f1:7.2f}"
        )
    print(
        f"{'overall':24s} {overall.tp:4d} {overall.fp:4d} {overall.fn:4d}"
        f" {100 * overall.precision:7.2f} {100 * overall.recall:7.2f} {100 * overall.f1:7.2f}"
    )
    return 0


def cmd_analyze_errors(args) -> int:
    gold = load_corpus(args.gold)
    predictions = load_predictions(gold, args.pred)
    cascade = analyze_cascade(gold, predictions, REGIMES[args.regime])
    if args.json:
        print(json.dumps(cascade.as_dict(), sort_keys=True, indent=2))
        return 0
    d = cascade.as_dict()
    print(f"Binding false positives: {cascade.binding_fp}")
    for key in ("trigger_induced", "role_induced", "construction_induced"):
        print(f"  {key.replace('_', '-'):24s} {d[key]['count']:4d} ({d[key]['share']:.1f}%)")
    return 0


def cmd_pipeline(args) -> int:
    cfg = _pipeline_config(args, require_out=True)
    summary = run_pipeline(cfg)
    for name, path in summary["artifacts"].items():
        print(f"{name}: {path}")
    if "evaluation" in summary:
        overall = summary["evaluation"]["overall"]
        print(
            f"overall {summary['evaluation']['mode']}:"
            f" P={overall['precision']:.2f} R={overall['recall']:.2f} F1={overall['f1']:.2f}"
        )
        print(f"binding false positives: {summary['cascade']['binding_fp']}")
    return 0


# ------------------------------------------------------------ configuration


def _pipeline_config(args, require_out: bool) -> PipelineConfig:
    """Merge defaults, the JSON config file, and flags; flags win."""
    values = {f.name: f.default for f in fields(PipelineConfig)}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(pathlib.Path(config_path).read_text())
        except FileNotFoundError:
            raise MissingFile(f"config file not found: {config_path}")
        except json.JSONDecodeError as exc:
            raise ValueError(f"config file {config_path} is not valid JSON: {exc}")
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {config_path} must hold a JSON object")
        unknown = set(loaded) - set(values)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for name in values:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    if not isinstance(values["corpus"], str):
        raise ValueError("no corpus given (positional argument or config key 'corpus')")
    if require_out and not isinstance(values["out_dir"], str):
        raise ValueError("no output directory given (--out or config key 'out_dir')")
    return PipelineConfig(**values)


def _add_config_flags(sub, construction_only: bool = False) -> None:
    sub.add_argument("corpus", nargs="?", default=None, help="corpus directory (.txt/.a1/.a2)")
    sub.add_argument("--config", help="JSON config file; flags override its keys")
    sub.add_argument("--out", dest="out_dir", help="output directory for artifacts")
    sub.add_argument("--mode", choices=("rule", "auto"), default=None, help="event construction mode")
    sub.add_argument("--scorer", choices=SCORER_KINDS, default=None, help="scorer backend")
    sub.add_argument("--endpoint", default=None, help=f"remote scorer URL (default ${ENDPOINT_ENV})")
    sub.add_argument("--seed", type=int, default=None, help="noisy scorer seed")
    sub.add_argument("--tag-flip", type=float, default=None, dest="tag_flip")
    sub.add_argument("--role-flip", type=float, default=None, dest="role_flip")
    sub.add_argument("--candidate-flip", type=float, default=None, dest="candidate_flip")
    sub.add_argument(
        "--max-binding-args", type=int, default=None, dest="max_binding_args",
        help="Theme cap before Binding enumeration falls back to pairing",
    )
    if construction_only:
        return
    sub.add_argument(
        "--gold-triggers", action=argparse.BooleanOptionalAction, default=None,
        dest="gold_triggers", help="use gold triggers instead of the tagging stage",
    )
    sub.add_argument(
        "--gold-args", action=argparse.BooleanOptionalAction, default=None,
        dest="gold_args", help="use gold role assignments instead of the role stage",
    )
    sub.add_argument("--regime", choices=tuple(REGIMES), default=None, help="evaluation regime")
    sub.add_argument("--jobs", type=int, default=None, help="worker threads across documents")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bioee",
        description="Pipelined biomedical event extraction: parse, classify, construct, evaluate.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("parse-check", help="validate a corpus and list repairs")
    sub.add_argument("corpus")
    sub.add_argument("--strict", action="store_true", help="fail on the first violation")
    sub.set_defaults(func=cmd_parse_check)

    sub = commands.add_parser("stats", help="annotation counts per event type")
    sub.add_argument("corpus")
    sub.add_argument("--json", action="store_true", help="machine-readable output")
    sub.set_defaults(func=cmd_stats)

    for name, func, what in (
        ("gen-triggers", cmd_gen_triggers, "trigger-tagging"),
        ("gen-roles", cmd_gen_roles, "role-pair"),
        ("gen-candidates", cmd_gen_candidates, "Theme-subset"),
    ):
        sub = commands.add_parser(name, help=f"write labeled {what} instances as JSONL")
        sub.add_argument("corpus")
        sub.add_argument("--out", required=True, help="output .jsonl path")
        sub.set_defaults(func=func)

    sub = commands.add_parser("construct", help="build events from trigger/assignment tables")
    _add_config_flags(sub, construction_only=True)
    sub.add_argument("--triggers", help="triggers.jsonl (default: gold triggers)")
    sub.add_argument("--assignments", help="assignments.jsonl (default: gold assignments)")
    sub.set_defaults(func=cmd_construct)

    sub = commands.add_parser("evaluate", help="score predicted .a2 files against gold")
    sub.add_argument("--gold", required=True, help="gold corpus directory")
    sub.add_argument("--pred", required=True, help="directory of predicted .a2 files")
    sub.add_argument("--regime", choices=tuple(REGIMES), default="strict")
    sub.add_argument("--json", action="store_true", help="machine-readable output")
    sub.set_defaults(func=cmd_evaluate)

    sub = commands.add_parser("analyze-errors", help="attribute Binding false positives")
    sub.add_argument("--gold", required=True, help="gold corpus directory")
    sub.add_argument("--pred", required=True, help="directory of predicted .a2 files")
    sub.add_argument("--regime", choices=tuple(REGIMES), default="strict")
    sub.add_argument("--json", action="store_true", help="machine-readable output")
    sub.set_defaults(func=cmd_analyze_errors)

    sub = commands.add_parser("pipeline", help="run all stages end to end")
    _add_config_flags(sub)
    sub.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 on --help
        return 0 if not exc.code else 1
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ScorerUnavailable as exc:
        log.error("scorer unavailable: %s", exc)
        return 3
    except BioeeError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return 2
    except ValueError as exc:
        log.error("invalid configuration: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
