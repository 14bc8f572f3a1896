"""Per-word embedding tables and compound feature vectors.

A compound's feature vector is the head vector concatenated with the
modifier vector (2d reals for a d-dimensional table). Prepositions in
NPN compounds contribute nothing. Tables are loaded from a plain text
format: a "count dimension" header, then one word per line followed by
its components.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .extraction import CompoundCandidate

__all__ = [
    "EmbeddingTable",
    "MissingWordError",
    "load_embeddings",
    "load_embeddings_file",
    "save_embeddings",
    "compound_vector",
    "compound_matrix",
    "generate_random_table",
    "CompoundVectorizer",
]

logger = logging.getLogger(__name__)


class MissingWordError(KeyError):
    """A compound word resolved to no table entry."""

    def __init__(self, keys_tried: tuple[str, ...]):
        self.keys_tried = keys_tried
        super().__init__(f"no embedding for any of: {', '.join(keys_tried)}")

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be positive, got {self.dimension}")
        for key, vec in self.vectors.items():
            if vec.shape != (self.dimension,):
                raise ValueError(
                    f"vector for {key!r} has shape {vec.shape}, expected ({self.dimension},)"
                )

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, key: str) -> bool:
        return key in self.vectors

    def lookup(self, *keys: str) -> np.ndarray:
        """First hit among keys, in order. Raises MissingWordError if none hit."""
        for key in keys:
            vec = self.vectors.get(key)
            if vec is not None:
                return vec
        raise MissingWordError(keys)


def load_embeddings(text: str, source: str = "<string>") -> EmbeddingTable:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"{source}: empty embedding file")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"{source}: header must be 'count dimension', got {lines[0]!r}")
    try:
        count, dimension = int(header[0]), int(header[1])
    except ValueError:
        raise ValueError(f"{source}: non-integer header fields in {lines[0]!r}") from None
    if dimension < 1:
        raise ValueError(f"{source}: dimension must be positive, got {dimension}")
    data_lines = lines[1:]
    if len(data_lines) != count:
        raise ValueError(
            f"{source}: header declares {count} entries, found {len(data_lines)} data lines"
        )

    vectors: dict[str, np.ndarray] = {}
    for offset, line in enumerate(data_lines, start=2):
        fields = line.split()
        word, components = fields[0], fields[1:]
        if len(components) != dimension:
            raise ValueError(
                f"{source}: line {offset}: expected {dimension} components for "
                f"{word!r}, got {len(components)}"
            )
        try:
            vec = np.array([float(c) for c in components], dtype=np.float64)
        except ValueError:
            raise ValueError(
                f"{source}: line {offset}: non-numeric component for {word!r}"
            ) from None
        if word in vectors:
            logger.warning("%s: line %d: duplicate key %r, keeping last", source, offset, word)
        vectors[word] = vec
    return EmbeddingTable(dimension=dimension, vectors=vectors)


def load_embeddings_file(path: str | Path) -> EmbeddingTable:
    path = Path(path)
    return load_embeddings(path.read_text(encoding="utf-8"), source=str(path))


def save_embeddings(path: str | Path, table: EmbeddingTable) -> None:
    lines = [f"{len(table.vectors)} {table.dimension}"]
    for word, vec in table.vectors.items():
        lines.append(word + " " + " ".join(repr(float(v)) for v in vec))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _resolve(table: EmbeddingTable, lemma: str, form: str, zero_fallback: bool) -> np.ndarray:
    try:
        return table.lookup(lemma, form)
    except MissingWordError:
        if zero_fallback:
            return np.zeros(table.dimension)
        raise


def compound_vector(
    table: EmbeddingTable,
    candidate: CompoundCandidate,
    zero_fallback: bool = False,
) -> np.ndarray:
    """Head vector ++ modifier vector; lookup by lemma, then surface form.

    A word found under neither key raises MissingWordError unless
    zero_fallback is set, which substitutes a zero vector. Missing words
    default to an error because silent zeros corrupt training.
    """
    head = _resolve(table, candidate.head_lemma, candidate.head_form, zero_fallback)
    modifier = _resolve(
        table, candidate.modifier_lemma, candidate.modifier_form, zero_fallback
    )
    return np.concatenate([head, modifier])


def compound_matrix(
    table: EmbeddingTable,
    candidates: list[CompoundCandidate],
    zero_fallback: bool = False,
) -> np.ndarray:
    out = np.zeros((len(candidates), 2 * table.dimension))
    for i, candidate in enumerate(candidates):
        out[i] = compound_vector(table, candidate, zero_fallback)
    return out


def _key_seed(seed: int, key: str) -> int:
    digest = hashlib.sha256(f"{seed}\x00{key}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def generate_random_table(keys: list[str], dimension: int, seed: int) -> EmbeddingTable:
    """Deterministic uniform [-1, 1] vectors, drawn independently per (seed, key).

    Each key gets its own generator seeded from a hash of (seed, key),
    so a key's vector does not depend on which other keys are present.
    """
    if dimension < 1:
        raise ValueError(f"dimension must be positive, got {dimension}")
    vectors = {}
    for key in keys:
        rng = np.random.default_rng(_key_seed(seed, key))
        vectors[key] = rng.uniform(-1.0, 1.0, size=dimension)
    return EmbeddingTable(dimension=dimension, vectors=vectors)


class CompoundVectorizer(BaseEstimator, TransformerMixin):
    """Turns compound candidates into concatenated feature rows."""

    def __init__(self, table: EmbeddingTable | None = None, zero_fallback: bool = False):
        self.table = table
        self.zero_fallback = zero_fallback

    def fit(self, X: list[CompoundCandidate], y=None) -> "CompoundVectorizer":
        if self.table is None:
            raise ValueError("CompoundVectorizer requires a table")
        return self

    def transform(self, X: list[CompoundCandidate]) -> np.ndarray:
        if self.table is None:
            raise ValueError("CompoundVectorizer requires a table")
        return compound_matrix(self.table, X, self.zero_fallback)
