"""Document-aligned corpus ingestion, vocabularies, and token filtering.

The on-disk corpus format is ``dapc-tsv``: one record per line, UTF-8,
LF line endings::

    doc_id<TAB>lang_code<TAB>space-separated tokens

A document pair is the two records that share a ``doc_id``, one per
language.  Records for the same id need not be adjacent, but each
(id, lang) combination may appear at most once.  Lines beginning with
``#`` are comments and blank lines are ignored.  An empty token field is
allowed and yields an empty document side.  Exactly two distinct language
codes may appear in one corpus; the language of the first record in the
file is designated the source language, the other one the target.

Tokens are taken as-is: no case folding, no lemmatization, no POS
filtering.  Any such preprocessing belongs upstream of this format.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import (
    AlignmentError,
    ConfigurationError,
    FormatError,
    ParseError,
    UnknownWordError,
)

CORPUS_FORMAT_DAPC_TSV = "dapc-tsv"


class Token(NamedTuple):
    """A language-tagged word type, written ``lang:surface``."""

    lang: str
    surface: str

    def __str__(self) -> str:
        return f"{self.lang}:{self.surface}"

    @classmethod
    def parse(cls, text: str) -> "Token":
        """Parse a ``lang:surface`` string; raises ParseError when malformed."""
        lang, sep, surface = text.partition(":")
        if not sep or not lang or not surface:
            raise ParseError(f"expected lang:surface token, got {text!r}")
        if any(ch.isspace() for ch in surface) or any(ch.isspace() for ch in lang):
            raise ParseError(f"token contains whitespace: {text!r}")
        return cls(lang, surface)


@dataclass(frozen=True)
class DocumentPair:
    """One aligned source/target document pair (ordered token sequences)."""

    id: str
    source_tokens: tuple[Token, ...]
    target_tokens: tuple[Token, ...]

    @property
    def source_len(self) -> int:
        return len(self.source_tokens)

    @property
    def target_len(self) -> int:
        return len(self.target_tokens)


@dataclass(frozen=True)
class AlignedCorpus:
    """An ordered collection of document pairs over exactly two languages."""

    pairs: tuple[DocumentPair, ...]
    source_lang: str
    target_lang: str

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def load_corpus(path: str | Path, format: str = CORPUS_FORMAT_DAPC_TSV) -> AlignedCorpus:
    """Read an aligned corpus file.

    Pairs are returned in order of first appearance of their doc id.
    Raises ParseError for malformed lines (with the line number),
    AlignmentError when a doc id has only one language, and FormatError
    when more than two language codes occur, a (id, lang) record is
    duplicated, or the format id is unknown.
    """
    if format != CORPUS_FORMAT_DAPC_TSV:
        raise FormatError(f"unknown corpus format: {format!r}")

    records: dict[str, dict[str, tuple[Token, ...]]] = {}
    id_order: list[str] = []
    langs: list[str] = []

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(
                    f"expected 3 tab-separated fields, got {len(fields)}", line=lineno
                )
            doc_id, lang, token_field = fields
            if not doc_id:
                raise ParseError("empty doc id", line=lineno)
            if not lang:
                raise ParseError("empty language code", line=lineno)
            if lang not in langs:
                langs.append(lang)
                if len(langs) > 2:
                    raise FormatError(
                        f"line {lineno}: third language {lang!r} in corpus "
                        f"(already have {langs[0]!r} and {langs[1]!r})"
                    )
            tokens = tuple(Token(lang, s) for s in token_field.split())
            per_id = records.get(doc_id)
            if per_id is None:
                per_id = records[doc_id] = {}
                id_order.append(doc_id)
            if lang in per_id:
                raise FormatError(f"line {lineno}: duplicate record for ({doc_id!r}, {lang!r})")
            per_id[lang] = tokens

    if not id_order:
        raise ConfigurationError(f"corpus file {path} contains no document pairs")

    source_lang = langs[0]
    target_lang = langs[1] if len(langs) > 1 else None
    pairs = []
    for doc_id in id_order:
        per_id = records[doc_id]
        missing = target_lang is None or source_lang not in per_id or target_lang not in per_id
        if missing:
            raise AlignmentError(f"doc id {doc_id!r} is present in only one language")
        pairs.append(
            DocumentPair(
                id=doc_id,
                source_tokens=per_id[source_lang],
                target_tokens=per_id[target_lang],
            )
        )
    return AlignedCorpus(pairs=tuple(pairs), source_lang=source_lang, target_lang=target_lang)


class Vocabulary:
    """Frequency-filtered token inventory with dense indices.

    Indices run 0..|V|-1 over the union of both languages, assigned in
    descending count order with ties broken lexicographically by
    (lang, surface).  Immutable after construction and safe to share
    across threads.
    """

    def __init__(self, tokens: Iterable[Token], counts: Iterable[int], min_count: int):
        self.tokens: tuple[Token, ...] = tuple(tokens)
        self.counts: np.ndarray = np.asarray(list(counts), dtype=np.int64)
        self.min_count = min_count
        if len(self.tokens) != len(self.counts):
            raise ValueError("tokens and counts must have equal length")
        self._index: dict[Token, int] = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self._index) != len(self.tokens):
            raise ValueError("duplicate token in vocabulary")
        self.total_tokens: dict[str, int] = {}
        for tok, n in zip(self.tokens, self.counts):
            self.total_tokens[tok.lang] = self.total_tokens.get(tok.lang, 0) + int(n)
        # Pooled total across both languages; the training stream is one
        # mixed sequence, so frequencies are relative to this.
        self.total: int = int(self.counts.sum()) if len(self.counts) else 0

    @classmethod
    def from_counts(cls, counts: Mapping[Token, int], min_count: int) -> "Vocabulary":
        if min_count < 1:
            raise ConfigurationError(f"min_count must be >= 1, got {min_count}")
        kept = [(tok, n) for tok, n in counts.items() if n >= min_count]
        if not kept:
            raise ConfigurationError(
                f"no token occurs at least {min_count} times; vocabulary would be empty"
            )
        kept.sort(key=lambda item: (-item[1], item[0]))
        return cls((tok for tok, _ in kept), (n for _, n in kept), min_count)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: Token) -> bool:
        return token in self._index

    def index(self, token: Token) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise UnknownWordError(f"not in vocabulary: {token}") from None

    def get_index(self, token: Token) -> int | None:
        return self._index.get(token)

    def count(self, token: Token) -> int:
        return int(self.counts[self.index(token)])


def tally_tokens(pairs: Iterable[DocumentPair]) -> Counter:
    """Raw (lang, surface) occurrence counts over a corpus."""
    counts: Counter = Counter()
    for pair in pairs:
        counts.update(pair.source_tokens)
        counts.update(pair.target_tokens)
    return counts


def build_vocabulary(corpus: AlignedCorpus, min_count: int = 5) -> Vocabulary:
    """Keep exactly the (lang, surface) types occurring >= min_count times.

    The threshold applies per language-tagged type.  Raises
    ConfigurationError when the result would be empty.
    """
    return Vocabulary.from_counts(tally_tokens(corpus.pairs), min_count)


def filter_pair(pair: DocumentPair, vocab: Vocabulary) -> DocumentPair:
    """Drop out-of-vocabulary tokens from both sides, preserving order."""
    return DocumentPair(
        id=pair.id,
        source_tokens=tuple(t for t in pair.source_tokens if t in vocab),
        target_tokens=tuple(t for t in pair.target_tokens if t in vocab),
    )
