import random
from datetime import datetime, timedelta

import numpy as np
import pytest

from ncrel.extraction import CompoundCandidate, Pattern
from ncrel.taxonomy import (
    CATEGORY_COUNT,
    AnnotationRecord,
    build_labeled_dataset,
    filter_annotators,
    format_annotation_record,
    load_taxonomy,
    parse_annotation_line,
    read_annotation_records,
    read_dataset,
    soft_target,
    split_dataset,
    write_annotation_records,
    write_dataset,
    write_taxonomy,
)

T0 = datetime(2024, 3, 1, 9, 0, 0)


def make_candidate(i: int) -> CompoundCandidate:
    return CompoundCandidate(
        head_lemma=f"cap{i}",
        head_form=f"capul{i}",
        modifier_lemma=f"mod{i}",
        modifier_form=f"modului{i}",
        pattern=Pattern.NN_GEN,
        sentence_id=f"s{i}",
        token_index=1,
    )


def make_record(compound_id, annotator, category, minutes=0):
    return AnnotationRecord(
        compound_id=compound_id,
        annotator_id=annotator,
        category_id=category,
        timestamp=T0 + timedelta(minutes=minutes),
    )


def test_taxonomy_has_seventeen_categories():
    cats = load_taxonomy()
    assert len(cats) == CATEGORY_COUNT
    assert [c.id for c in cats] == list(range(1, 18))


def test_taxonomy_key_names():
    cats = {c.id: c.name for c in load_taxonomy()}
    assert cats[1] == "None of the categories"
    assert cats[14] == "Substance/material part + whole"
    assert cats[16] == "Benefit + beneficiary"
    assert cats[17] == "Duration + event"


def test_every_category_has_two_examples():
    for cat in load_taxonomy():
        assert len(cat.examples) == 2


def test_write_taxonomy(tmp_path):
    path = tmp_path / "taxonomy.tsv"
    write_taxonomy(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "id\tname\texamples"
    assert len(lines) == 18
    assert lines[1].startswith("1\tNone of the categories\t")


def test_record_rejects_out_of_range_category():
    with pytest.raises(ValueError):
        make_record("s1:1", "a1", 0)
    with pytest.raises(ValueError):
        make_record("s1:1", "a1", 18)


def test_record_line_round_trip():
    record = make_record("s3:2", "ann-7", 14, minutes=42)
    line = format_annotation_record(record)
    assert line == "s3:2\tann-7\t14\t2024-03-01T09:42:00"
    assert parse_annotation_line(line) == record


def test_record_line_field_count_error():
    with pytest.raises(ValueError, match="4 fields"):
        parse_annotation_line("s1:1\ta1\t3")


def test_record_file_round_trip(tmp_path):
    records = [make_record(f"s{i}:1", "a1", (i % 17) + 1, minutes=i) for i in range(5)]
    path = tmp_path / "annotations.tsv"
    write_annotation_records(path, records)
    assert read_annotation_records(path) == records


def test_filter_annotators_drops_below_threshold():
    records = []
    for i in range(19):
        records.append(make_record(f"s{i}:1", "small", 1, minutes=i))
    for i in range(25):
        records.append(make_record(f"s{i}:2", "big", 2, minutes=i))
    kept = filter_annotators(records, min_labels=20)
    assert len(kept) == 25
    assert all(r.annotator_id == "big" for r in kept)


def test_filter_annotators_mixed_counts():
    records = []
    for annotator, count in [("a", 25), ("b", 10), ("c", 30)]:
        for i in range(count):
            records.append(make_record(f"{annotator}{i}:1", annotator, 1, minutes=i))
    kept = filter_annotators(records, min_labels=20)
    assert len(kept) == 55
    assert {r.annotator_id for r in kept} == {"a", "c"}


def test_filter_annotators_keeps_order():
    records = [
        make_record("s0:1", "a", 1),
        make_record("s1:1", "b", 2),
        make_record("s2:1", "a", 3),
    ]
    kept = filter_annotators(records, min_labels=2)
    assert kept == [records[0], records[2]]


def test_soft_target_agreement():
    target = soft_target(5, 5)
    assert target.shape == (17,)
    assert target[4] == 1.0
    assert target.sum() == 1.0
    assert np.count_nonzero(target) == 1


def test_soft_target_disagreement():
    target = soft_target(3, 11)
    assert target[2] == 0.5
    assert target[10] == 0.5
    assert target.sum() == 1.0
    assert np.count_nonzero(target) == 2


def test_build_labeled_dataset_basic():
    candidates = [make_candidate(i) for i in range(3)]
    records = [
        make_record("s0:1", "a", 4, minutes=0),
        make_record("s0:1", "b", 4, minutes=1),
        make_record("s1:1", "a", 2, minutes=2),
        make_record("s1:1", "b", 9, minutes=3),
    ]
    labeled, excluded = build_labeled_dataset(candidates, records)
    assert [lc.compound_id for lc in labeled] == ["s0:1", "s1:1"]
    assert excluded == ["s2:1"]
    assert labeled[0].agreed
    assert labeled[0].labels == (4, 4)
    assert labeled[0].target[3] == 1.0
    assert not labeled[1].agreed
    assert labeled[1].target[1] == 0.5
    assert labeled[1].target[8] == 0.5


def test_build_labeled_dataset_keeps_two_earliest():
    candidates = [make_candidate(0)]
    records = [
        make_record("s0:1", "late", 7, minutes=30),
        make_record("s0:1", "first", 2, minutes=1),
        make_record("s0:1", "second", 5, minutes=2),
    ]
    labeled, excluded = build_labeled_dataset(candidates, records)
    assert excluded == []
    assert labeled[0].labels == (2, 5)


def test_build_labeled_dataset_duplicate_pair_error():
    candidates = [make_candidate(0)]
    records = [
        make_record("s0:1", "a", 1, minutes=0),
        make_record("s0:1", "a", 2, minutes=1),
    ]
    with pytest.raises(ValueError, match="duplicate annotation"):
        build_labeled_dataset(candidates, records)


def test_build_labeled_dataset_unknown_compound_error():
    candidates = [make_candidate(0)]
    records = [make_record("s9:9", "a", 1)]
    with pytest.raises(ValueError, match="unknown compound"):
        build_labeled_dataset(candidates, records)


def test_build_labeled_dataset_preserves_candidate_order():
    candidates = [make_candidate(i) for i in range(5)]
    records = []
    for i in reversed(range(5)):
        records.append(make_record(f"s{i}:1", "a", 1, minutes=i))
        records.append(make_record(f"s{i}:1", "b", 1, minutes=i + 100))
    labeled, _ = build_labeled_dataset(candidates, records)
    assert [lc.compound_id for lc in labeled] == [f"s{i}:1" for i in range(5)]


def make_labeled(n):
    candidates = [make_candidate(i) for i in range(n)]
    records = []
    for i in range(n):
        records.append(make_record(f"s{i}:1", "a", (i % 17) + 1, minutes=i))
        records.append(make_record(f"s{i}:1", "b", (i % 17) + 1, minutes=i + n))
    labeled, _ = build_labeled_dataset(candidates, records)
    return labeled


def test_split_dataset_sizes_and_partition():
    labeled = make_labeled(1000)
    train, test = split_dataset(labeled, train_size=750, seed=13)
    assert len(train) == 750
    assert len(test) == 250
    train_ids = {lc.compound_id for lc in train}
    test_ids = {lc.compound_id for lc in test}
    assert not train_ids & test_ids
    assert train_ids | test_ids == {lc.compound_id for lc in labeled}


def test_split_dataset_deterministic():
    labeled = make_labeled(100)
    train1, test1 = split_dataset(labeled, train_size=75, seed=42)
    train2, test2 = split_dataset(labeled, train_size=75, seed=42)
    assert [lc.compound_id for lc in train1] == [lc.compound_id for lc in train2]
    assert [lc.compound_id for lc in test1] == [lc.compound_id for lc in test2]


def test_split_dataset_seed_changes_order():
    labeled = make_labeled(100)
    train1, _ = split_dataset(labeled, train_size=75, seed=1)
    train2, _ = split_dataset(labeled, train_size=75, seed=2)
    assert [lc.compound_id for lc in train1] != [lc.compound_id for lc in train2]


def test_split_dataset_matches_seeded_shuffle_oracle():
    labeled = make_labeled(20)
    expected = list(labeled)
    random.Random(7).shuffle(expected)
    train, test = split_dataset(labeled, train_size=15, seed=7)
    assert [lc.compound_id for lc in train + test] == [
        lc.compound_id for lc in expected
    ]


def test_split_dataset_train_size_too_large():
    labeled = make_labeled(10)
    with pytest.raises(ValueError):
        split_dataset(labeled, train_size=11, seed=0)


def test_dataset_file_round_trip(tmp_path):
    labeled = make_labeled(6)
    path = tmp_path / "dataset.tsv"
    write_dataset(path, labeled)
    loaded = read_dataset(path)
    assert [lc.compound_id for lc in loaded] == [lc.compound_id for lc in labeled]
    assert [lc.labels for lc in loaded] == [lc.labels for lc in labeled]
    assert [lc.candidate for lc in loaded] == [lc.candidate for lc in labeled]
    for a, b in zip(loaded, labeled):
        assert np.array_equal(a.target, b.target)


def test_dataset_file_rejects_wrong_header(tmp_path):
    path = tmp_path / "dataset.tsv"
    path.write_text("nope\n")
    with pytest.raises(ValueError, match="header"):
        read_dataset(path)


def test_dataset_file_rejects_short_row(tmp_path):
    labeled = make_labeled(1)
    path = tmp_path / "dataset.tsv"
    write_dataset(path, labeled)
    path.write_text(path.read_text() + "s9:1\tonly\tthree\n")
    with pytest.raises(ValueError, match="line 3"):
        read_dataset(path)
