"""Pipeline driver: extract -> select -> serve -> dataset -> train -> evaluate -> report.

Stages communicate only through files, so each run is reproducible from
its inputs. Relative defaults for the common files can be supplied once
via the NCREL_DATA_DIR environment variable instead of repeating flags.

Exit codes: 0 success, 1 stage error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .conllu import corpus_stats, parse_conllu_file
from .estimator import validate_features
from .evaluation import (
    CategoryStats,
    annotator_confusion,
    category_frequency_profile,
    evaluate,
    export_frequency_profile,
    export_selection_agreement,
    model_confusion,
    none_pattern_breakdown,
    resolve_features,
    selection_agreement_stats,
    write_category_stats,
    write_confusion,
    write_eval_report,
)
from .extraction import (
    apply_exclusions,
    extract_candidates,
    participation_stats,
    pattern_breakdown,
    read_candidates,
    read_exclusions,
    select_by_head_frequency,
    word_compound_stats,
    write_candidates,
)
from .network import TrainConfig, init_model, load_checkpoint, save_checkpoint, train
from .embeddings import load_embeddings_file
from .service import AnnotationService, AnnotationStore, create_app
from .taxonomy import (
    build_labeled_dataset,
    filter_annotators,
    read_annotation_records,
    read_dataset,
    split_dataset,
    write_dataset,
)

__all__ = ["main"]

ENV_DATA_DIR = "NCREL_DATA_DIR"

DEFAULT_FILES = {
    "treebank": "treebank.conllu",
    "candidates": "candidates.tsv",
    "out": None,
    "annotations": "annotations.tsv",
    "dataset": "dataset.tsv",
    "embeddings": "embeddings.txt",
    "checkpoint": "model.bin",
    "report_dir": "reports",
}


class CliError(Exception):
    pass


def _resolve(value: str | None, key: str, flag: str) -> Path:
    if value is not None:
        return Path(value)
    base = os.environ.get(ENV_DATA_DIR)
    default_name = DEFAULT_FILES.get(key)
    if base and default_name:
        return Path(base) / default_name
    raise CliError(f"{flag} is required (or set {ENV_DATA_DIR})")


def cmd_extract(args) -> int:
    treebank = _resolve(args.treebank, "treebank", "--treebank")
    out = _resolve(args.out, "candidates", "--out")
    corpus = parse_conllu_file(treebank)
    candidates = extract_candidates(corpus)
    write_candidates(out, candidates)
    print(f"extracted {len(candidates)} candidates from {len(corpus.sentences)} sentences -> {out}")
    return 0


def cmd_stats(args) -> int:
    treebank = _resolve(args.treebank, "treebank", "--treebank")
    corpus = parse_conllu_file(treebank)
    counts = corpus_stats(corpus)
    candidates = extract_candidates(corpus)
    breakdown = pattern_breakdown(candidates)
    payload = {
        "token_count": counts.token_count,
        "noun_count": counts.noun_count,
        "candidate_count": len(candidates),
        "npn_count": breakdown.npn_count,
        "npn_de_count": breakdown.npn_de_count,
        "nn_gen_count": breakdown.nn_gen_count,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote stats -> {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_select(args) -> int:
    treebank = _resolve(args.treebank, "treebank", "--treebank")
    candidates_path = _resolve(args.candidates, "candidates", "--candidates")
    out = _resolve(args.out, "out", "--out")
    corpus = parse_conllu_file(treebank)
    candidates = read_candidates(candidates_path)
    stats = word_compound_stats(corpus, candidates)
    selected = select_by_head_frequency(candidates, stats, args.n)
    if args.exclusions:
        selected = apply_exclusions(selected, read_exclusions(args.exclusions))
    write_candidates(out, selected)
    print(f"selected {len(selected)} compounds -> {out}")
    return 0


def cmd_serve(args) -> int:
    candidates_path = _resolve(args.candidates, "candidates", "--candidates")
    annotations = _resolve(args.annotations, "annotations", "--annotations")
    candidates = read_candidates(candidates_path)
    store = AnnotationStore(annotations)
    roster = args.annotators.split(",") if args.annotators else None
    service = AnnotationService(candidates, store, annotators=roster)
    app = create_app(service, ui_dir=args.ui_dir)
    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_dataset(args) -> int:
    candidates_path = _resolve(args.candidates, "candidates", "--candidates")
    annotations = _resolve(args.annotations, "annotations", "--annotations")
    out = _resolve(args.out, "dataset", "--out")
    candidates = read_candidates(candidates_path)
    records = read_annotation_records(annotations)
    kept_records = filter_annotators(records, args.min_labels)
    labeled, excluded = build_labeled_dataset(candidates, kept_records)
    write_dataset(out, labeled)
    if args.excluded_out:
        Path(args.excluded_out).write_text(
            "".join(cid + "\n" for cid in excluded), encoding="utf-8"
        )
    dropped = len(records) - len(kept_records)
    print(
        f"dataset: {len(labeled)} labeled compounds -> {out} "
        f"({len(excluded)} without two annotations, {dropped} records from "
        f"annotators under {args.min_labels} labels)"
    )
    return 0


def _load_split(args):
    labeled = read_dataset(_resolve(args.dataset, "dataset", "--dataset"))
    table = load_embeddings_file(_resolve(args.embeddings, "embeddings", "--embeddings"))
    train_part, test_part = split_dataset(labeled, args.train_size, args.seed)
    return labeled, table, train_part, test_part


def cmd_train(args) -> int:
    _, table, train_part, _ = _load_split(args)
    checkpoint = _resolve(args.checkpoint, "checkpoint", "--checkpoint")
    features = resolve_features(table, train_part, zero_fallback=args.zero_fallback)
    validate_features(features)
    data = [(features[i], train_part[i].target) for i in range(len(train_part))]
    model = init_model(2 * table.dimension, args.hidden, args.seed)
    config = TrainConfig(
        learning_rate=args.lr, epochs=args.epochs, batch_size=args.batch, seed=args.seed
    )
    trained, history = train(model, data, config)
    save_checkpoint(checkpoint, trained)
    print(
        f"trained on {len(train_part)} compounds, {args.epochs} epochs, "
        f"loss {history[0]:.4f} -> {history[-1]:.4f}, checkpoint -> {checkpoint}"
    )
    return 0


def cmd_evaluate(args) -> int:
    _, table, _, test_part = _load_split(args)
    model = load_checkpoint(_resolve(args.checkpoint, "checkpoint", "--checkpoint"))
    report = evaluate(model, test_part, table, zero_fallback=args.zero_fallback)
    if args.out:
        write_eval_report(args.out, report)
    print(
        f"matches {report.n_match}/{report.n_test} "
        f"({100 * report.match_rate:.1f}%), exact triples {report.n_exact_triple}"
    )
    return 0


def _merge_category_stats(
    selection: list[CategoryStats], frequency: list[CategoryStats]
) -> list[CategoryStats]:
    merged = []
    for sel, freq in zip(selection, frequency):
        merged.append(
            CategoryStats(
                category_id=sel.category_id,
                selection_count=sel.selection_count,
                agreement_count=sel.agreement_count,
                avg_head_corpus_freq=freq.avg_head_corpus_freq,
                avg_modifier_corpus_freq=freq.avg_modifier_corpus_freq,
            )
        )
    return merged


def cmd_report(args) -> int:
    labeled, table, _, test_part = _load_split(args)
    model = load_checkpoint(_resolve(args.checkpoint, "checkpoint", "--checkpoint"))
    candidates = read_candidates(_resolve(args.candidates, "candidates", "--candidates"))
    report_dir = _resolve(args.report_dir, "report_dir", "--report-dir")
    report_dir.mkdir(parents=True, exist_ok=True)

    write_eval_report(
        report_dir / "eval_report.json",
        evaluate(model, test_part, table, zero_fallback=args.zero_fallback),
    )
    write_confusion(report_dir / "annotator_confusion.tsv", annotator_confusion(test_part))
    write_confusion(
        report_dir / "model_confusion.tsv",
        model_confusion(
            model,
            test_part,
            table,
            agreed_diagonal=args.agreed_diagonal,
            zero_fallback=args.zero_fallback,
        ),
    )
    selection = selection_agreement_stats(labeled)
    frequency = category_frequency_profile(labeled, participation_stats(candidates))
    write_category_stats(
        report_dir / "category_stats.tsv", _merge_category_stats(selection, frequency)
    )
    export_selection_agreement(report_dir / "fig1_selection_agreement.tsv", selection)
    export_frequency_profile(report_dir / "fig2_frequency_profile.tsv", frequency)
    npn, nn = none_pattern_breakdown(labeled)
    (report_dir / "none_breakdown.json").write_text(
        json.dumps({"npn": npn, "nn_gen": nn}, indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote 7 report files -> {report_dir}")
    return 0


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="labeled dataset file")
    p.add_argument("--embeddings", help="word vector file")
    p.add_argument("--train-size", type=int, default=750)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zero-fallback", action="store_true",
                   help="use zero vectors for words missing from the table")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncrel",
        description="noun-compound semantic relation workbench",
    )
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("extract", help="mine compound candidates from a treebank")
    p.add_argument("--treebank")
    p.add_argument("--out")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("stats", help="corpus token/noun counts and pattern breakdown")
    p.add_argument("--treebank")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("select", help="pick annotation compounds by head frequency")
    p.add_argument("--treebank")
    p.add_argument("--candidates")
    p.add_argument("--out")
    p.add_argument("--n", type=int, default=1100)
    p.add_argument("--exclusions", help="two-column TSV of head/modifier pairs to drop")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--candidates")
    p.add_argument("--annotations")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--annotators", help="comma-separated roster; omit to accept any token")
    p.add_argument("--ui-dir", help="static annotation UI bundle to host at /")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("dataset", help="pair annotations into a labeled dataset")
    p.add_argument("--candidates")
    p.add_argument("--annotations")
    p.add_argument("--out")
    p.add_argument("--min-labels", type=int, default=20)
    p.add_argument("--excluded-out", help="write ids of compounds lacking two annotations")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("train", help="train the classifier on the train split")
    _add_train_flags(p)
    p.add_argument("--checkpoint")
    p.add_argument("--hidden", type=int, default=256)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch", type=int, default=32)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="agreement-aware scoring on the test split")
    _add_train_flags(p)
    p.add_argument("--checkpoint")
    p.add_argument("--out", help="write the report as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="write evaluation, confusion, and analytics files")
    _add_train_flags(p)
    p.add_argument("--checkpoint")
    p.add_argument("--candidates", help="full extraction output, for word participation")
    p.add_argument("--report-dir")
    p.add_argument("--agreed-diagonal", action="store_true",
                   help="model confusion: agreed items count as (argmax, argmax)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "func", None) is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
