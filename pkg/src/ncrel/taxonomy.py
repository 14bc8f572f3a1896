"""The 17-category semantic relation inventory and soft-label datasets.

Category 1 is the catch-all "None of the categories". Each compound is
judged by exactly two annotators; agreement yields a one-hot target,
disagreement a 0.5/0.5 split over the two chosen categories.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np

from .extraction import CompoundCandidate, Pattern

__all__ = [
    "CATEGORY_COUNT",
    "Category",
    "AnnotationRecord",
    "LabeledCompound",
    "load_taxonomy",
    "filter_annotators",
    "soft_target",
    "build_labeled_dataset",
    "split_dataset",
    "write_dataset",
    "read_dataset",
    "write_taxonomy",
    "read_annotation_records",
    "write_annotation_records",
    "format_annotation_record",
    "parse_annotation_line",
]

CATEGORY_COUNT = 17

DEFAULT_MIN_LABELS = 20


@dataclass(frozen=True)
class Category:
    id: int
    name: str
    examples: tuple[str, ...]


_CATEGORY_ROWS = (
    (1, "None of the categories",
     ("lentile de contact (contact lens)", "efectul fluturelui (butterfly effect)")),
    (2, "Process + undergoer",
     ("operatie la ochi (eye surgery)", "modificarea legii (law change)")),
    (3, "Entity + scope",
     ("tren de marfa (cargo train)", "sac de dormit (sleeping bag)")),
    (4, "Entity + attribute",
     ("culoarea pamantului (earth color)", "poveste de dragoste (love story)")),
    (5, "Result + cause",
     ("castigurile din reclame (ads revenue)", "daunele inundatiei (flood damage)")),
    (6, "Event + agent",
     ("abuzul politiei (police abuse)", "plansul copilului (child's cry)")),
    (7, "Possession + possessor",
     ("averea familiei (family fortune)", "bratara fetei (girl's bracelet)")),
    (8, "Entity/process/result + cause/source",
     ("deficienta de vitamine (vitamin deficit)", "declaratie de razboi (war declaration)")),
    (9, "Detachable part + whole",
     ("bratul robotului (robot arm)", "piciorul scaunului (chair leg)")),
    (10, "Tool + operation/undergoer",
     ("deschizator de conserve (can opener)", "perie de lustruit (polishing brush)")),
    (11, "Location + locatum",
     ("aragazul din bucatarie (kitchen stove)", "magazin de pantofi (shoe store)")),
    (12, "Time + event",
     ("data nasterii (birth date)", "perioada examenului (exam period)")),
    (13, "Experience/emotion + experiencer",
     ("anxietatea studentului (student anxiety)", "admiratia fanilor (fan admiration)")),
    (14, "Substance/material part + whole",
     ("supa de mazare (pea soup)", "punga de plastic (plastic bag)")),
    (15, "Event + time of event",
     ("tura de noapte (night shift)", "alergat de dimineata (morning run)")),
    (16, "Benefit + beneficiary",
     ("mancare de pisica (cat food)", "beneficii de somer (unemployment benefits)")),
    (17, "Duration + event",
     ("intalnire de o ora (hour meeting)", "excursie de o zi (day trip)")),
)

_CATEGORIES = tuple(Category(i, name, examples) for i, name, examples in _CATEGORY_ROWS)


def load_taxonomy() -> list[Category]:
    """The full inventory, ids 1..17 in order."""
    return list(_CATEGORIES)


def write_taxonomy(path: str | Path) -> None:
    lines = ["id\tname\texamples"]
    for cat in _CATEGORIES:
        lines.append(f"{cat.id}\t{cat.name}\t{'; '.join(cat.examples)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class AnnotationRecord:
    compound_id: str
    annotator_id: str
    category_id: int
    timestamp: datetime

    def __post_init__(self):
        if not 1 <= self.category_id <= CATEGORY_COUNT:
            raise ValueError(f"category_id {self.category_id} outside 1..{CATEGORY_COUNT}")


def format_annotation_record(record: AnnotationRecord) -> str:
    return "\t".join(
        [
            record.compound_id,
            record.annotator_id,
            str(record.category_id),
            record.timestamp.isoformat(),
        ]
    )


def parse_annotation_line(line: str) -> AnnotationRecord:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 4:
        raise ValueError(f"expected 4 fields in annotation record, got {len(fields)}")
    return AnnotationRecord(
        compound_id=fields[0],
        annotator_id=fields[1],
        category_id=int(fields[2]),
        timestamp=datetime.fromisoformat(fields[3]),
    )


def read_annotation_records(path: str | Path) -> list[AnnotationRecord]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(parse_annotation_line(line))
    return records


def write_annotation_records(path: str | Path, records: list[AnnotationRecord]) -> None:
    text = "".join(format_annotation_record(r) + "\n" for r in records)
    Path(path).write_text(text, encoding="utf-8")


def filter_annotators(
    records: list[AnnotationRecord], min_labels: int = DEFAULT_MIN_LABELS
) -> list[AnnotationRecord]:
    """Drop every record of annotators who labeled fewer than min_labels."""
    counts: dict[str, int] = {}
    for record in records:
        counts[record.annotator_id] = counts.get(record.annotator_id, 0) + 1
    return [r for r in records if counts[r.annotator_id] >= min_labels]


def soft_target(label_a: int, label_b: int) -> np.ndarray:
    """Probability target for a pair of judgments (one-hot or 0.5/0.5)."""
    target = np.zeros(CATEGORY_COUNT)
    if label_a == label_b:
        target[label_a - 1] = 1.0
    else:
        target[label_a - 1] = 0.5
        target[label_b - 1] = 0.5
    return target


@dataclass(frozen=True)
class LabeledCompound:
    compound_id: str
    candidate: CompoundCandidate
    labels: tuple[int, int]
    target: np.ndarray = field(compare=False)

    @property
    def agreed(self) -> bool:
        return self.labels[0] == self.labels[1]


def build_labeled_dataset(
    candidates: list[CompoundCandidate],
    records: list[AnnotationRecord],
) -> tuple[list[LabeledCompound], list[str]]:
    """Pair each compound with its two judgments and build soft targets.

    Returns (labeled, excluded_compound_ids). Compounds with fewer than
    two records are excluded; with more than two, the two earliest by
    timestamp are kept. Duplicate (compound, annotator) pairs and
    records for unknown compounds are errors.
    """
    by_id: dict[str, CompoundCandidate] = {}
    for candidate in candidates:
        if candidate.compound_id in by_id:
            raise ValueError(f"duplicate compound id {candidate.compound_id}")
        by_id[candidate.compound_id] = candidate

    grouped: dict[str, list[AnnotationRecord]] = {}
    seen_pairs: set[tuple[str, str]] = set()
    for record in records:
        if record.compound_id not in by_id:
            raise ValueError(f"annotation for unknown compound {record.compound_id}")
        pair = (record.compound_id, record.annotator_id)
        if pair in seen_pairs:
            raise ValueError(f"duplicate annotation {pair[1]} on {pair[0]}")
        seen_pairs.add(pair)
        grouped.setdefault(record.compound_id, []).append(record)

    labeled: list[LabeledCompound] = []
    excluded: list[str] = []
    for candidate in candidates:
        compound_records = sorted(
            grouped.get(candidate.compound_id, []), key=lambda r: r.timestamp
        )
        if len(compound_records) < 2:
            excluded.append(candidate.compound_id)
            continue
        first, second = compound_records[:2]
        labels = (first.category_id, second.category_id)
        labeled.append(
            LabeledCompound(
                compound_id=candidate.compound_id,
                candidate=candidate,
                labels=labels,
                target=soft_target(*labels),
            )
        )
    return labeled, excluded


DATASET_HEADER = (
    "compound_id",
    "head_lemma",
    "head_form",
    "preposition_lemma",
    "modifier_lemma",
    "modifier_form",
    "pattern",
    "label_a",
    "label_b",
)


def write_dataset(path: str | Path, labeled: list[LabeledCompound]) -> None:
    lines = ["\t".join(DATASET_HEADER)]
    for item in labeled:
        c = item.candidate
        lines.append(
            "\t".join(
                [
                    item.compound_id,
                    c.head_lemma,
                    c.head_form,
                    c.preposition_lemma or "",
                    c.modifier_lemma,
                    c.modifier_form,
                    c.pattern.value,
                    str(item.labels[0]),
                    str(item.labels[1]),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_dataset(path: str | Path) -> list[LabeledCompound]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != DATASET_HEADER:
        raise ValueError(f"{path}: missing or wrong dataset header")
    labeled = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(DATASET_HEADER):
            raise ValueError(
                f"{path}: line {line_no}: expected {len(DATASET_HEADER)} fields, "
                f"got {len(fields)}"
            )
        compound_id = fields[0]
        sentence_id, _, token_index = compound_id.rpartition(":")
        candidate = CompoundCandidate(
            head_lemma=fields[1],
            head_form=fields[2],
            preposition_lemma=fields[3] or None,
            modifier_lemma=fields[4],
            modifier_form=fields[5],
            pattern=Pattern(fields[6]),
            sentence_id=sentence_id,
            token_index=int(token_index),
        )
        labels = (int(fields[7]), int(fields[8]))
        labeled.append(
            LabeledCompound(
                compound_id=compound_id,
                candidate=candidate,
                labels=labels,
                target=soft_target(*labels),
            )
        )
    return labeled


def split_dataset(
    labeled: list[LabeledCompound], train_size: int, seed: int
) -> tuple[list[LabeledCompound], list[LabeledCompound]]:
    """Seeded shuffle, then first train_size items to train, rest to test."""
    if train_size > len(labeled):
        raise ValueError(
            f"train_size {train_size} exceeds dataset size {len(labeled)}"
        )
    shuffled = list(labeled)
    random.Random(seed).shuffle(shuffled)
    return shuffled[:train_size], shuffled[train_size:]
