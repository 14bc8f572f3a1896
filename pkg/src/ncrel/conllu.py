"""CoNLL-U treebank parsing and corpus-level statistics.

Only word lines (integer IDs) become tokens. Multiword-token ranges
("4-5") and empty nodes ("4.1") are kept as raw text on the sentence so
nothing is silently lost, but they never enter the token list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "ConlluParseError",
    "Token",
    "Sentence",
    "Corpus",
    "CorpusStats",
    "parse_feats",
    "feats_to_string",
    "parse_conllu",
    "parse_conllu_file",
    "to_conllu",
    "corpus_stats",
]

_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_NODE_ID = re.compile(r"^\d+\.\d+$")
_WORD_ID = re.compile(r"^\d+$")

N_COLUMNS = 10


class ConlluParseError(ValueError):
    """Malformed CoNLL-U input; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_feats(raw: str) -> dict[str, frozenset[str]]:
    """Parse a FEATS column into {name: value set}; "_" yields {}.

    Multi-valued features ("Case=Dat,Gen") become sets, so case
    syncretism can be tested by membership.
    """
    if raw == "_" or raw == "":
        return {}
    feats: dict[str, frozenset[str]] = {}
    for pair in raw.split("|"):
        name, sep, values = pair.partition("=")
        if not sep or not name or not values:
            raise ValueError(f"malformed feature {pair!r}")
        feats[name] = frozenset(values.split(","))
    return feats


def feats_to_string(feats: dict[str, frozenset[str]]) -> str:
    """Canonical FEATS text: names sorted, values sorted, "_" if empty."""
    if not feats:
        return "_"
    return "|".join(
        f"{name}={','.join(sorted(values))}" for name, values in sorted(feats.items())
    )


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str
    upos: str
    feats: dict[str, frozenset[str]] = field(default_factory=dict)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    sent_id: str | None = None
    # Raw metadata: comment lines and skipped range/empty-node lines.
    # Excluded from equality so round-tripping word lines is an identity.
    comments: tuple[str, ...] = field(default=(), compare=False)
    skipped: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    source: str = field(default="<string>", compare=False)

    def iter_tokens(self):
        for sentence in self.sentences:
            yield from sentence.tokens

    @property
    def token_count(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


@dataclass(frozen=True)
class CorpusStats:
    token_count: int
    noun_count: int


def parse_conllu(text: str, source: str = "<string>") -> Corpus:
    """Parse a CoNLL-U document into a Corpus.

    One Sentence per blank-line-delimited block that contains at least
    one word line. Raises ConlluParseError (with line number) for word
    lines that do not have exactly 10 tab-separated columns, for IDs
    that are neither integers nor range/empty-node IDs, and for
    non-increasing word IDs within a sentence.
    """
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    comments: list[str] = []
    skipped: list[str] = []
    sent_id: str | None = None
    prev_id = 0

    def flush():
        nonlocal tokens, comments, skipped, sent_id, prev_id
        if tokens:
            sentences.append(
                Sentence(tuple(tokens), sent_id, tuple(comments), tuple(skipped))
            )
        tokens, comments, skipped = [], [], []
        sent_id = None
        prev_id = 0

    for line_no, line in enumerate(text.split("\n"), start=1):
        if line.strip() == "":
            flush()
            continue
        if line.startswith("#"):
            comments.append(line)
            name, sep, value = line[1:].partition("=")
            if sep and name.strip() == "sent_id":
                sent_id = value.strip()
            continue
        columns = line.split("\t")
        if len(columns) != N_COLUMNS:
            raise ConlluParseError(
                line_no, f"expected {N_COLUMNS} columns, got {len(columns)}"
            )
        token_id = columns[0]
        if _RANGE_ID.match(token_id) or _EMPTY_NODE_ID.match(token_id):
            skipped.append(line)
            continue
        if not _WORD_ID.match(token_id):
            raise ConlluParseError(line_no, f"invalid token ID {token_id!r}")
        idx = int(token_id)
        if idx < 1:
            raise ConlluParseError(line_no, "word ID must be >= 1")
        if idx <= prev_id:
            raise ConlluParseError(
                line_no, f"word ID {idx} does not increase (previous {prev_id})"
            )
        prev_id = idx
        try:
            feats = parse_feats(columns[5])
        except ValueError as exc:
            raise ConlluParseError(line_no, str(exc)) from exc
        tokens.append(Token(idx, columns[1], columns[2], columns[3], feats))
    flush()
    return Corpus(tuple(sentences), source)


def parse_conllu_file(path: str | Path) -> Corpus:
    text = Path(path).read_text(encoding="utf-8")
    return parse_conllu(text, source=str(path))


def to_conllu(corpus: Corpus) -> str:
    """Serialize word lines (and comments) back to CoNLL-U text.

    Columns outside the parsed model are written as "_"; FEATS are in
    canonical sorted form, so parse(to_conllu(parse(x))) == parse(x).
    """
    blocks = []
    for sentence in corpus.sentences:
        lines = list(sentence.comments)
        for tok in sentence.tokens:
            lines.append(
                "\t".join(
                    [
                        str(tok.id),
                        tok.form,
                        tok.lemma,
                        tok.upos,
                        "_",
                        feats_to_string(tok.feats),
                        "_",
                        "_",
                        "_",
                        "_",
                    ]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n" if blocks else ""


def corpus_stats(corpus: Corpus, include_propn: bool = False) -> CorpusStats:
    """Count tokens and nouns. PROPN counts only when include_propn."""
    noun_tags = {"NOUN", "PROPN"} if include_propn else {"NOUN"}
    total = 0
    nouns = 0
    for tok in corpus.iter_tokens():
        total += 1
        if tok.upos in noun_tags:
            nouns += 1
    return CorpusStats(total, nouns)
