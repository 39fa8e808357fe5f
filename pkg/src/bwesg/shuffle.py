"""Pseudo-bilingual document construction.

Each aligned document pair is turned into a single mixed-language token
sequence that the trainer consumes.  Three strategies:

* ``merge``  - concatenate both sides and apply a uniformly random
  permutation (Fisher-Yates via a seeded PCG64 generator, so results are
  reproducible across platforms for a fixed seed).
* ``ratio``  - deterministic interleaving: with the longer side L and the
  shorter side T, insert one T token after every floor(|L|/|T|) L tokens,
  preserving word order within each language.
* ``concat`` - target appended to source unchanged (the no-shuffle
  baseline, which leaves contexts mostly monolingual).

Serialized form: one pseudo-document per line, tokens written as
``lang:surface`` separated by single spaces.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .corpus import AlignedCorpus, DocumentPair, Token
from .errors import EmptyDocumentError, EmptySideError

logger = logging.getLogger(__name__)

_SEED_MASK = (1 << 64) - 1


class Strategy(str, Enum):
    """How a document pair becomes one pseudo-bilingual document."""

    MERGE = "merge"
    RATIO = "ratio"
    CONCAT = "concat"


@dataclass(frozen=True)
class PseudoBilingualDocument:
    """A single interleaved sequence of language-tagged tokens.

    The token multiset always equals the union of the originating pair's
    two sides.  ``strategy`` is None for documents read back from disk.
    """

    tokens: tuple[Token, ...]
    origin_id: str
    strategy: Strategy | None

    def __len__(self) -> int:
        return len(self.tokens)


class ShuffledCorpus(NamedTuple):
    docs: list[PseudoBilingualDocument]
    skipped: int


def merge_and_shuffle(pair: DocumentPair, seed: int) -> PseudoBilingualDocument:
    """Uniformly random permutation of source ++ target under the seed.

    Deterministic for a fixed (pair, seed); raises EmptyDocumentError when
    both sides are empty.
    """
    merged = pair.source_tokens + pair.target_tokens
    if not merged:
        raise EmptyDocumentError(f"pair {pair.id!r} has no tokens on either side")
    order = np.arange(len(merged))
    np.random.default_rng(seed & _SEED_MASK).shuffle(order)
    return PseudoBilingualDocument(
        tokens=tuple(merged[i] for i in order),
        origin_id=pair.id,
        strategy=Strategy.MERGE,
    )


def length_ratio_shuffle(pair: DocumentPair) -> PseudoBilingualDocument:
    """Deterministic length-ratio interleaving of the two sides.

    With the longer side L (|L| = m_max) and the shorter side T
    (|T| = m_min), compute R = floor(m_max / m_min), then repeatedly
    append R tokens of L followed by 1 token of T until T is exhausted,
    and finally append the remaining m_max mod m_min tokens of L.  Word
    order within each language is preserved.  When the sides are equally
    long the source side is treated as the longer one, giving strict
    alternation starting with source.  Raises EmptySideError when either
    side is empty (the ratio is undefined at m_min = 0).
    """
    m_s, m_t = pair.source_len, pair.target_len
    if m_s == 0 or m_t == 0:
        raise EmptySideError(f"pair {pair.id!r} has an empty side (source={m_s}, target={m_t})")
    if m_s >= m_t:
        longer, shorter = pair.source_tokens, pair.target_tokens
    else:
        longer, shorter = pair.target_tokens, pair.source_tokens
    ratio = len(longer) // len(shorter)
    out: list[Token] = []
    pos = 0
    for short_tok in shorter:
        out.extend(longer[pos : pos + ratio])
        pos += ratio
        out.append(short_tok)
    out.extend(longer[pos:])
    return PseudoBilingualDocument(
        tokens=tuple(out), origin_id=pair.id, strategy=Strategy.RATIO
    )


def concat(pair: DocumentPair) -> PseudoBilingualDocument:
    """Target appended to source, order preserved (no-shuffle baseline)."""
    merged = pair.source_tokens + pair.target_tokens
    if not merged:
        raise EmptyDocumentError(f"pair {pair.id!r} has no tokens on either side")
    return PseudoBilingualDocument(tokens=merged, origin_id=pair.id, strategy=Strategy.CONCAT)


def shuffle_corpus(
    corpus: AlignedCorpus | Sequence[DocumentPair],
    strategy: Strategy,
    seed: int = 0,
) -> ShuffledCorpus:
    """Build one pseudo-document per eligible pair, in corpus order.

    Pairs that violate the strategy's precondition (an empty side for
    ``ratio``, both sides empty otherwise) are skipped and counted.  The
    per-pair seed for ``merge`` is ``seed XOR pair-ordinal``, so a pair's
    shuffle does not depend on how the corpus around it is sliced.
    """
    pairs = corpus.pairs if isinstance(corpus, AlignedCorpus) else corpus
    docs: list[PseudoBilingualDocument] = []
    skipped = 0
    for ordinal, pair in enumerate(pairs):
        if strategy is Strategy.RATIO:
            if pair.source_len == 0 or pair.target_len == 0:
                skipped += 1
                continue
            docs.append(length_ratio_shuffle(pair))
        elif strategy is Strategy.MERGE:
            if pair.source_len + pair.target_len == 0:
                skipped += 1
                continue
            docs.append(merge_and_shuffle(pair, (seed ^ ordinal) & _SEED_MASK))
        elif strategy is Strategy.CONCAT:
            if pair.source_len + pair.target_len == 0:
                skipped += 1
                continue
            docs.append(concat(pair))
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown strategy: {strategy}")
    if skipped:
        logger.warning("skipped %d pair(s) ineligible for strategy %s", skipped, strategy.value)
    return ShuffledCorpus(docs=docs, skipped=skipped)


def write_pseudo_documents(docs: Iterable[PseudoBilingualDocument], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in docs:
            fh.write(" ".join(str(tok) for tok in doc.tokens))
            fh.write("\n")


def read_pseudo_documents(path: str | Path) -> list[PseudoBilingualDocument]:
    """Read serialized pseudo-documents; origin ids become line numbers."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            tokens = tuple(Token.parse(part) for part in line.split(" "))
            docs.append(
                PseudoBilingualDocument(tokens=tokens, origin_id=str(lineno), strategy=None)
            )
    return docs
