"""Annotation collection service: assignment routing and durable storage.

Every compound is to be labeled by exactly two different annotators.
Records go to an append-only line file that is fsynced before a
submission is acknowledged, so an acknowledged label survives a crash;
the index is rebuilt from the file on startup. All mutations take a
single writer lock. Two annotators may be handed the same compound
concurrently; the loser's submit is rejected and the client just asks
for the next one.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .extraction import CompoundCandidate
from .taxonomy import (
    CATEGORY_COUNT,
    AnnotationRecord,
    Category,
    format_annotation_record,
    load_taxonomy,
    parse_annotation_line,
)

__all__ = [
    "ServiceError",
    "UnknownAnnotatorError",
    "UnknownCompoundError",
    "InvalidCategoryError",
    "DuplicateAnnotationError",
    "CompoundSaturatedError",
    "Assignment",
    "ProgressSummary",
    "AnnotationStore",
    "AnnotationService",
    "create_app",
]

ANNOTATIONS_PER_COMPOUND = 2


class ServiceError(Exception):
    status_code = 400


class UnknownAnnotatorError(ServiceError):
    status_code = 404


class UnknownCompoundError(ServiceError):
    status_code = 404


class InvalidCategoryError(ServiceError):
    status_code = 400


class DuplicateAnnotationError(ServiceError):
    status_code = 409


class CompoundSaturatedError(ServiceError):
    status_code = 409


@dataclass(frozen=True)
class Assignment:
    compound_id: str
    head: str
    preposition: str | None
    modifier: str
    categories: tuple[Category, ...]

    def __post_init__(self):
        if len(self.categories) != CATEGORY_COUNT:
            raise ValueError(f"expected {CATEGORY_COUNT} categories")


@dataclass(frozen=True)
class ProgressSummary:
    total_compounds: int
    fully_annotated: int
    per_annotator: dict[str, int]


class AnnotationStore:
    """Append-only record file with an in-memory index.

    Not thread-safe by itself; AnnotationService serializes access.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.records: list[AnnotationRecord] = []
        self.by_compound: dict[str, list[AnnotationRecord]] = {}
        self.pairs: set[tuple[str, str]] = set()
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._index(parse_annotation_line(line))
        self._fh = open(self.path, "a", encoding="utf-8")

    def _index(self, record: AnnotationRecord) -> None:
        self.records.append(record)
        self.by_compound.setdefault(record.compound_id, []).append(record)
        self.pairs.add((record.compound_id, record.annotator_id))

    def append(self, record: AnnotationRecord) -> None:
        """Write, flush, and fsync before returning."""
        self._fh.write(format_annotation_record(record) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self._index(record)

    def count(self, compound_id: str) -> int:
        return len(self.by_compound.get(compound_id, []))

    def has_pair(self, compound_id: str, annotator_id: str) -> bool:
        return (compound_id, annotator_id) in self.pairs

    def close(self) -> None:
        self._fh.close()


class AnnotationService:
    """Routes assignments and enforces the two-annotations invariant.

    With an annotator roster, unknown annotators are rejected; without
    one, any non-empty self-declared token is accepted (the trusted
    small-pool setting).
    """

    def __init__(
        self,
        candidates: list[CompoundCandidate],
        store: AnnotationStore,
        annotators: list[str] | None = None,
    ):
        self.candidates = {c.compound_id: c for c in candidates}
        if len(self.candidates) != len(candidates):
            raise ValueError("duplicate compound ids among candidates")
        self.store = store
        self.roster = set(annotators) if annotators is not None else None
        self.categories = tuple(load_taxonomy())
        self._lock = threading.Lock()

    def _check_annotator(self, annotator_id: str) -> None:
        if not annotator_id:
            raise UnknownAnnotatorError("annotator id is empty")
        if self.roster is not None and annotator_id not in self.roster:
            raise UnknownAnnotatorError(f"unknown annotator {annotator_id!r}")

    def next_compound(self, annotator_id: str) -> Assignment | None:
        """Next eligible compound: pair-completion first, then id order."""
        self._check_annotator(annotator_id)
        with self._lock:
            best: tuple[int, str] | None = None
            for compound_id in self.candidates:
                count = self.store.count(compound_id)
                if count >= ANNOTATIONS_PER_COMPOUND:
                    continue
                if self.store.has_pair(compound_id, annotator_id):
                    continue
                key = (-count, compound_id)
                if best is None or key < best:
                    best = key
            if best is None:
                return None
            candidate = self.candidates[best[1]]
            return Assignment(
                compound_id=candidate.compound_id,
                head=candidate.head_form,
                preposition=candidate.preposition_lemma,
                modifier=candidate.modifier_form,
                categories=self.categories,
            )

    def submit(self, annotator_id: str, compound_id: str, category_id: int) -> AnnotationRecord:
        self._check_annotator(annotator_id)
        with self._lock:
            if compound_id not in self.candidates:
                raise UnknownCompoundError(f"unknown compound {compound_id!r}")
            if (
                isinstance(category_id, bool)
                or not isinstance(category_id, int)
                or not 1 <= category_id <= CATEGORY_COUNT
            ):
                raise InvalidCategoryError(
                    f"category_id must be in 1..{CATEGORY_COUNT}, got {category_id!r}"
                )
            if self.store.has_pair(compound_id, annotator_id):
                raise DuplicateAnnotationError(
                    f"{annotator_id!r} already annotated {compound_id!r}"
                )
            if self.store.count(compound_id) >= ANNOTATIONS_PER_COMPOUND:
                raise CompoundSaturatedError(
                    f"{compound_id!r} already has {ANNOTATIONS_PER_COMPOUND} annotations"
                )
            record = AnnotationRecord(
                compound_id=compound_id,
                annotator_id=annotator_id,
                category_id=category_id,
                timestamp=datetime.now(timezone.utc),
            )
            self.store.append(record)
            return record

    def progress(self) -> ProgressSummary:
        with self._lock:
            per_annotator: dict[str, int] = {}
            for record in self.store.records:
                per_annotator[record.annotator_id] = per_annotator.get(record.annotator_id, 0) + 1
            fully = sum(
                1
                for compound_id in self.candidates
                if self.store.count(compound_id) >= ANNOTATIONS_PER_COMPOUND
            )
            return ProgressSummary(
                total_compounds=len(self.candidates),
                fully_annotated=fully,
                per_annotator=per_annotator,
            )


def _category_payload(category: Category) -> dict:
    return {"id": category.id, "name": category.name, "examples": list(category.examples)}


def _assignment_payload(assignment: Assignment) -> dict:
    return {
        "compound_id": assignment.compound_id,
        "head": assignment.head,
        "preposition": assignment.preposition,
        "modifier": assignment.modifier,
        "categories": [_category_payload(c) for c in assignment.categories],
    }


def create_app(service: AnnotationService, ui_dir: str | Path | None = None):
    from fastapi import Body, FastAPI, Request
    from fastapi.exceptions import RequestValidationError
    from fastapi.responses import JSONResponse
    from fastapi.staticfiles import StaticFiles

    app = FastAPI(title="compound annotation service")

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status_code, content={"detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        # malformed payloads are client errors, not unprocessable entities
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/api/categories")
    def categories():
        return {"categories": [_category_payload(c) for c in service.categories]}

    @app.get("/api/next")
    def next_compound(annotator: str):
        assignment = service.next_compound(annotator)
        if assignment is None:
            return {"assignment": None}
        return {"assignment": _assignment_payload(assignment)}

    @app.post("/api/annotations")
    async def submit(body: dict = Body(...)):
        missing = [k for k in ("annotator", "compound_id", "category_id") if k not in body]
        if missing:
            raise InvalidCategoryError(f"missing fields: {', '.join(missing)}")
        annotator = body["annotator"]
        compound_id = body["compound_id"]
        category_id = body["category_id"]
        if not isinstance(annotator, str) or not isinstance(compound_id, str):
            raise InvalidCategoryError("annotator and compound_id must be strings")
        record = service.submit(annotator, compound_id, category_id)
        return {
            "status": "recorded",
            "compound_id": record.compound_id,
            "annotator": record.annotator_id,
            "category_id": record.category_id,
            "timestamp": record.timestamp.isoformat(),
        }

    @app.get("/api/progress")
    def progress():
        summary = service.progress()
        return {
            "total_compounds": summary.total_compounds,
            "fully_annotated": summary.fully_annotated,
            "per_annotator": summary.per_annotator,
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
