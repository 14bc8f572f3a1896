"""Agreement-aware scoring, confusion matrices, and annotation analytics.

Scoring follows the two-annotator protocol: when the annotators agreed,
the model must rank that category first; when they disagreed, any
overlap between the model's top two and the two human choices counts as
a match. Exact triples are the agreed items the model also got right.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingTable, MissingWordError, compound_vector
from .extraction import Pattern, WordStats
from .network import MlpModel, predict_topk
from .taxonomy import CATEGORY_COUNT, LabeledCompound, load_taxonomy

__all__ = [
    "MatrixKind",
    "ConfusionMatrix",
    "EvalReport",
    "CategoryStats",
    "FeatureResolutionError",
    "resolve_features",
    "evaluate",
    "annotator_confusion",
    "model_confusion",
    "selection_agreement_stats",
    "category_frequency_profile",
    "none_pattern_breakdown",
    "write_eval_report",
    "write_confusion",
    "write_category_stats",
    "export_selection_agreement",
    "export_frequency_profile",
]


class MatrixKind(Enum):
    ANNOTATOR = "annotator"
    MODEL_TOP2 = "model_top2"


class FeatureResolutionError(ValueError):
    """One or more test compounds had no resolvable feature vector."""

    def __init__(self, compound_ids: list[str]):
        self.compound_ids = compound_ids
        super().__init__(
            f"no feature vector for {len(compound_ids)} compound(s): "
            + ", ".join(compound_ids)
        )


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray
    kind: MatrixKind

    def __post_init__(self):
        if self.counts.shape != (CATEGORY_COUNT, CATEGORY_COUNT):
            raise ValueError(f"counts must be 17x17, got {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if self.kind is MatrixKind.ANNOTATOR and not np.array_equal(
            self.counts, self.counts.T
        ):
            raise ValueError("annotator matrix must be symmetric")

    def cell(self, row_category: int, col_category: int) -> int:
        return int(self.counts[row_category - 1, col_category - 1])

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class EvalReport:
    n_test: int
    n_match: int
    n_exact_triple: int
    match_rate: float

    def __post_init__(self):
        if not 0 <= self.n_exact_triple <= self.n_match <= self.n_test:
            raise ValueError(
                f"need n_exact_triple <= n_match <= n_test, got "
                f"{self.n_exact_triple}/{self.n_match}/{self.n_test}"
            )
        expected = self.n_match / self.n_test if self.n_test else 0.0
        if abs(self.match_rate - expected) > 1e-12:
            raise ValueError(f"match_rate {self.match_rate} inconsistent with counts")


@dataclass(frozen=True)
class CategoryStats:
    category_id: int
    selection_count: int | None = None
    agreement_count: int | None = None
    avg_head_corpus_freq: float | None = None
    avg_modifier_corpus_freq: float | None = None


def resolve_features(
    table: EmbeddingTable,
    test: list[LabeledCompound],
    zero_fallback: bool = False,
) -> np.ndarray:
    """Feature row per test item; unresolvable items are reported together."""
    rows = []
    failed: list[str] = []
    for item in test:
        try:
            rows.append(compound_vector(table, item.candidate, zero_fallback))
        except MissingWordError:
            failed.append(item.compound_id)
    if failed:
        raise FeatureResolutionError(failed)
    return np.stack(rows) if rows else np.zeros((0, 2 * table.dimension))


def evaluate(
    model: MlpModel,
    test: list[LabeledCompound],
    table: EmbeddingTable,
    zero_fallback: bool = False,
) -> EvalReport:
    features = resolve_features(table, test, zero_fallback)
    n_match = 0
    n_exact = 0
    for item, x in zip(test, features):
        if item.agreed:
            if predict_topk(model, x, 1)[0] == item.labels[0]:
                n_match += 1
                n_exact += 1
        else:
            if set(predict_topk(model, x, 2)) & set(item.labels):
                n_match += 1
    n_test = len(test)
    return EvalReport(
        n_test=n_test,
        n_match=n_match,
        n_exact_triple=n_exact,
        match_rate=n_match / n_test if n_test else 0.0,
    )


def annotator_confusion(labeled: list[LabeledCompound]) -> ConfusionMatrix:
    """Symmetric matrix: (a,b) and (b,a) per disagreement, (a,a) per agreement."""
    counts = np.zeros((CATEGORY_COUNT, CATEGORY_COUNT), dtype=np.int64)
    for item in labeled:
        a, b = item.labels
        if a == b:
            counts[a - 1, a - 1] += 1
        else:
            counts[a - 1, b - 1] += 1
            counts[b - 1, a - 1] += 1
    return ConfusionMatrix(counts=counts, kind=MatrixKind.ANNOTATOR)


def model_confusion(
    model: MlpModel,
    test: list[LabeledCompound],
    table: EmbeddingTable,
    agreed_diagonal: bool = False,
    zero_fallback: bool = False,
) -> ConfusionMatrix:
    """Top-2 matrix: each item increments (p,q) and (q,p).

    Default convention uses the model's two distinct best categories, so
    the diagonal is structurally zero and the total is 2 x n_test. With
    agreed_diagonal, items whose annotators agreed contribute
    (argmax, argmax) instead, putting weight on the diagonal while
    keeping the total.
    """
    features = resolve_features(table, test, zero_fallback)
    counts = np.zeros((CATEGORY_COUNT, CATEGORY_COUNT), dtype=np.int64)
    for item, x in zip(test, features):
        if agreed_diagonal and item.agreed:
            p = predict_topk(model, x, 1)[0]
            q = p
        else:
            p, q = predict_topk(model, x, 2)
        counts[p - 1, q - 1] += 1
        counts[q - 1, p - 1] += 1
    return ConfusionMatrix(counts=counts, kind=MatrixKind.MODEL_TOP2)


def selection_agreement_stats(labeled: list[LabeledCompound]) -> list[CategoryStats]:
    selection = [0] * (CATEGORY_COUNT + 1)
    agreement = [0] * (CATEGORY_COUNT + 1)
    for item in labeled:
        a, b = item.labels
        selection[a] += 1
        selection[b] += 1
        if a == b:
            agreement[a] += 1
    return [
        CategoryStats(
            category_id=c, selection_count=selection[c], agreement_count=agreement[c]
        )
        for c in range(1, CATEGORY_COUNT + 1)
    ]


def _participation(stats: dict[str, WordStats], lemma: str) -> int:
    entry = stats.get(lemma)
    if entry is None:
        raise ValueError(f"no compound stats for word {lemma!r}")
    return entry.head_count + entry.modifier_count


def category_frequency_profile(
    labeled: list[LabeledCompound], stats: dict[str, WordStats]
) -> list[CategoryStats]:
    """Mean compound-participation of heads and modifiers per chosen category.

    Every annotation counts separately: a compound labeled (c, c) puts
    its head and modifier into category c's pools twice. Participation
    is how many extracted compounds a word appears in, in any role.
    """
    heads: dict[int, list[int]] = {c: [] for c in range(1, CATEGORY_COUNT + 1)}
    modifiers: dict[int, list[int]] = {c: [] for c in range(1, CATEGORY_COUNT + 1)}
    for item in labeled:
        head_part = _participation(stats, item.candidate.head_lemma)
        mod_part = _participation(stats, item.candidate.modifier_lemma)
        for label in item.labels:
            heads[label].append(head_part)
            modifiers[label].append(mod_part)
    out = []
    for c in range(1, CATEGORY_COUNT + 1):
        out.append(
            CategoryStats(
                category_id=c,
                avg_head_corpus_freq=float(np.mean(heads[c])) if heads[c] else 0.0,
                avg_modifier_corpus_freq=(
                    float(np.mean(modifiers[c])) if modifiers[c] else 0.0
                ),
            )
        )
    return out


def none_pattern_breakdown(labeled: list[LabeledCompound]) -> tuple[int, int]:
    """(NPN, NN_GEN) counts of "none of the categories" annotations.

    Counted per annotation: a compound labeled none by both annotators
    contributes 2 to its pattern's counter.
    """
    npn = 0
    nn = 0
    for item in labeled:
        none_votes = sum(1 for label in item.labels if label == 1)
        if item.candidate.pattern is Pattern.NPN:
            npn += none_votes
        else:
            nn += none_votes
    return npn, nn


def write_eval_report(path: str | Path, report: EvalReport) -> None:
    payload = {
        "n_test": report.n_test,
        "n_match": report.n_match,
        "n_exact_triple": report.n_exact_triple,
        "match_rate": report.match_rate,
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_confusion(path: str | Path, matrix: ConfusionMatrix) -> None:
    ids = list(range(1, CATEGORY_COUNT + 1))
    lines = [f"# kind: {matrix.kind.value}"]
    lines.append("\t".join(["id"] + [str(c) for c in ids]))
    for row in ids:
        cells = [str(matrix.cell(row, col)) for col in ids]
        lines.append("\t".join([str(row)] + cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_category_stats(path: str | Path, stats: list[CategoryStats]) -> None:
    names = {c.id: c.name for c in load_taxonomy()}
    lines = [
        "category_id\tname\tselection_count\tagreement_count"
        "\tavg_head_corpus_freq\tavg_modifier_corpus_freq"
    ]
    for entry in stats:
        lines.append(
            "\t".join(
                [
                    str(entry.category_id),
                    names[entry.category_id],
                    _fmt(entry.selection_count),
                    _fmt(entry.agreement_count),
                    _fmt(entry.avg_head_corpus_freq),
                    _fmt(entry.avg_modifier_corpus_freq),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def export_selection_agreement(path: str | Path, stats: list[CategoryStats]) -> None:
    """Plot-ready rows: category name, selection count, agreement count."""
    names = {c.id: c.name for c in load_taxonomy()}
    lines = ["category\tselection_count\tagreement_count"]
    for entry in stats:
        lines.append(
            f"{names[entry.category_id]}\t{_fmt(entry.selection_count)}"
            f"\t{_fmt(entry.agreement_count)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def export_frequency_profile(path: str | Path, stats: list[CategoryStats]) -> None:
    """Plot-ready rows: category name, mean head and modifier participation."""
    names = {c.id: c.name for c in load_taxonomy()}
    lines = ["category\tavg_head_corpus_freq\tavg_modifier_corpus_freq"]
    for entry in stats:
        lines.append(
            f"{names[entry.category_id]}\t{_fmt(entry.avg_head_corpus_freq)}"
            f"\t{_fmt(entry.avg_modifier_corpus_freq)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
