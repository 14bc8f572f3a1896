"""Mine two-noun compound candidates from a parsed corpus.

Two surface patterns are recognized, both head-initial:

* NN_GEN: two adjacent nouns where the second carries genitive case
  ("frigul iernii"). Adjacent nouns without genitive marking are not
  candidates.
* NPN: noun, adposition, noun ("geaca de piele").

Matches may overlap; a noun can participate in several candidates.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .conllu import Corpus

__all__ = [
    "Pattern",
    "CompoundCandidate",
    "WordStats",
    "PatternBreakdown",
    "extract_candidates",
    "word_compound_stats",
    "participation_stats",
    "pattern_breakdown",
    "select_by_head_frequency",
    "apply_exclusions",
    "write_candidates",
    "read_candidates",
    "read_exclusions",
]

logger = logging.getLogger(__name__)

CANDIDATE_HEADER = (
    "head_lemma",
    "head_form",
    "preposition_lemma",
    "modifier_lemma",
    "modifier_form",
    "pattern",
    "sentence_id",
    "token_index",
)


class Pattern(str, Enum):
    NPN = "NPN"
    NN_GEN = "NN_GEN"


@dataclass(frozen=True)
class CompoundCandidate:
    head_lemma: str
    head_form: str
    modifier_lemma: str
    modifier_form: str
    pattern: Pattern
    sentence_id: str
    token_index: int
    preposition_lemma: str | None = None

    def __post_init__(self):
        if self.pattern is Pattern.NPN and self.preposition_lemma is None:
            raise ValueError("NPN candidate requires a preposition lemma")
        if self.pattern is Pattern.NN_GEN and self.preposition_lemma is not None:
            raise ValueError("NN_GEN candidate must not carry a preposition")

    @property
    def compound_id(self) -> str:
        return f"{self.sentence_id}:{self.token_index}"

    @property
    def display(self) -> str:
        if self.preposition_lemma is not None:
            return f"{self.head_form} {self.preposition_lemma} {self.modifier_form}"
        return f"{self.head_form} {self.modifier_form}"


@dataclass(frozen=True)
class WordStats:
    corpus_frequency: int
    head_count: int
    modifier_count: int


@dataclass(frozen=True)
class PatternBreakdown:
    npn_count: int
    npn_de_count: int
    nn_gen_count: int


def _is_genitive(token) -> bool:
    # Romanian genitive is syncretic with dative, so membership is the
    # right test ("Case=Dat,Gen" counts).
    return "Gen" in token.feats.get("Case", frozenset())


def extract_candidates(corpus: Corpus) -> list[CompoundCandidate]:
    """Scan each sentence for NN_GEN pairs and NPN triples, in order."""
    candidates: list[CompoundCandidate] = []
    for position, sentence in enumerate(corpus.sentences, start=1):
        sent_id = sentence.sent_id or f"s{position}"
        tokens = sentence.tokens
        for i, head in enumerate(tokens):
            if head.upos != "NOUN":
                continue
            if i + 1 < len(tokens):
                nxt = tokens[i + 1]
                if nxt.upos == "NOUN" and _is_genitive(nxt):
                    candidates.append(
                        CompoundCandidate(
                            head_lemma=head.lemma,
                            head_form=head.form,
                            modifier_lemma=nxt.lemma,
                            modifier_form=nxt.form,
                            pattern=Pattern.NN_GEN,
                            sentence_id=sent_id,
                            token_index=head.id,
                        )
                    )
                elif nxt.upos == "ADP" and i + 2 < len(tokens):
                    third = tokens[i + 2]
                    if third.upos == "NOUN":
                        candidates.append(
                            CompoundCandidate(
                                head_lemma=head.lemma,
                                head_form=head.form,
                                modifier_lemma=third.lemma,
                                modifier_form=third.form,
                                pattern=Pattern.NPN,
                                sentence_id=sent_id,
                                token_index=head.id,
                                preposition_lemma=nxt.lemma,
                            )
                        )
    return candidates


def word_compound_stats(
    corpus: Corpus, candidates: list[CompoundCandidate]
) -> dict[str, WordStats]:
    """Per-lemma corpus frequency and head/modifier tallies.

    Keys are the lemmas occurring in at least one candidate; counting is
    lemma-based throughout.
    """
    heads = Counter(c.head_lemma for c in candidates)
    modifiers = Counter(c.modifier_lemma for c in candidates)
    vocabulary = set(heads) | set(modifiers)
    frequency: Counter[str] = Counter()
    for token in corpus.iter_tokens():
        if token.lemma in vocabulary:
            frequency[token.lemma] += 1
    return {
        lemma: WordStats(frequency[lemma], heads[lemma], modifiers[lemma])
        for lemma in vocabulary
    }


def participation_stats(candidates: list[CompoundCandidate]) -> dict[str, WordStats]:
    """Head/modifier tallies computable from candidates alone.

    corpus_frequency is 0 in every entry since no corpus is consulted;
    use word_compound_stats when raw token frequency matters.
    """
    heads = Counter(c.head_lemma for c in candidates)
    modifiers = Counter(c.modifier_lemma for c in candidates)
    return {
        lemma: WordStats(0, heads[lemma], modifiers[lemma])
        for lemma in set(heads) | set(modifiers)
    }


def pattern_breakdown(candidates: list[CompoundCandidate]) -> PatternBreakdown:
    npn = sum(1 for c in candidates if c.pattern is Pattern.NPN)
    npn_de = sum(
        1
        for c in candidates
        if c.pattern is Pattern.NPN and c.preposition_lemma == "de"
    )
    nn_gen = sum(1 for c in candidates if c.pattern is Pattern.NN_GEN)
    return PatternBreakdown(npn, npn_de, nn_gen)


def select_by_head_frequency(
    candidates: list[CompoundCandidate],
    stats: dict[str, WordStats],
    n: int,
) -> list[CompoundCandidate]:
    """Pick at most n candidates, one per distinct head lemma.

    Head types are taken in decreasing corpus frequency (ties by first
    occurrence). Within a head type the representative is the candidate
    whose modifier is most frequent in the corpus, ties by earliest
    position.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return []
    by_head: dict[str, list[tuple[int, CompoundCandidate]]] = {}
    for position, candidate in enumerate(candidates):
        by_head.setdefault(candidate.head_lemma, []).append((position, candidate))

    def head_frequency(lemma: str) -> int:
        try:
            return stats[lemma].corpus_frequency
        except KeyError:
            raise ValueError(f"no stats entry for head lemma {lemma!r}") from None

    ordered_heads = sorted(
        by_head, key=lambda lemma: (-head_frequency(lemma), by_head[lemma][0][0])
    )

    selected: list[CompoundCandidate] = []
    for lemma in ordered_heads[:n]:
        best = min(
            by_head[lemma],
            key=lambda item: (-stats[item[1].modifier_lemma].corpus_frequency, item[0]),
        )
        selected.append(best[1])
    return selected


def apply_exclusions(
    candidates: list[CompoundCandidate],
    exclusions: list[tuple[str, str]],
) -> list[CompoundCandidate]:
    """Drop candidates whose (head_lemma, modifier_lemma) is excluded."""
    exclusion_set = set(exclusions)
    matched = {
        (c.head_lemma, c.modifier_lemma)
        for c in candidates
        if (c.head_lemma, c.modifier_lemma) in exclusion_set
    }
    for pair in exclusion_set - matched:
        logger.warning("exclusion %s/%s matched no candidate", pair[0], pair[1])
    return [
        c for c in candidates if (c.head_lemma, c.modifier_lemma) not in exclusion_set
    ]


def write_candidates(path: str | Path, candidates: list[CompoundCandidate]) -> None:
    lines = ["\t".join(CANDIDATE_HEADER)]
    for c in candidates:
        lines.append(
            "\t".join(
                [
                    c.head_lemma,
                    c.head_form,
                    c.preposition_lemma or "",
                    c.modifier_lemma,
                    c.modifier_form,
                    c.pattern.value,
                    c.sentence_id,
                    str(c.token_index),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_candidates(path: str | Path) -> list[CompoundCandidate]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != CANDIDATE_HEADER:
        raise ValueError(f"{path}: missing candidate header row")
    candidates = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != len(CANDIDATE_HEADER):
            raise ValueError(f"{path}: line {line_no}: expected "
                             f"{len(CANDIDATE_HEADER)} fields, got {len(fields)}")
        head_lemma, head_form, prep, mod_lemma, mod_form, pattern, sent, idx = fields
        candidates.append(
            CompoundCandidate(
                head_lemma=head_lemma,
                head_form=head_form,
                modifier_lemma=mod_lemma,
                modifier_form=mod_form,
                pattern=Pattern(pattern),
                sentence_id=sent,
                token_index=int(idx),
                preposition_lemma=prep or None,
            )
        )
    return candidates


def read_exclusions(path: str | Path) -> list[tuple[str, str]]:
    """Two-column exclusion list: head_lemma <tab> modifier_lemma."""
    pairs = []
    for line_no, line in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"{path}: line {line_no}: expected 2 fields")
        pairs.append((fields[0], fields[1]))
    return pairs
