"""Shared bilingual embedding space and similarity queries.

A trained space maps language-tagged tokens to d-dimensional vectors.
Because both languages live in one space, ranked similarity queries come
in three modes: monolingual (candidates share the query's language),
cross-lingual (candidates from the other language), and multilingual
(both).  The top cross-lingual item is the query's cross-lingual nearest
neighbor, which is what bilingual lexicon extraction harvests.

Model file format (text): first line ``|V| d``; each following line
``lang:surface f_1 ... f_d`` with space-separated decimal floats and LF
line endings.  Floats are written with shortest round-tripping decimals,
so saving is deterministic and loading is lossless.

The space is immutable after construction; all query operations are safe
under unrestricted concurrent reads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Token
from .errors import (
    ConfigurationError,
    DomainError,
    FormatError,
    UndefinedSimilarityError,
    UnknownWordError,
)


class SimilarityMode(str, Enum):
    MONOLINGUAL = "mono"
    CROSS_LINGUAL = "cross"
    MULTILINGUAL = "multi"


@dataclass(frozen=True)
class RankedList:
    """Scored neighbors of a query, descending, pruned at ``m``.

    Ties are broken lexicographically by (lang, surface); the query token
    itself is never a member.
    """

    query: Token
    mode: SimilarityMode
    items: tuple[tuple[Token, float], ...]
    m: int


class EmbeddingSpace:
    """Token -> d-dimensional vector map with language tags retained."""

    def __init__(self, tokens: Sequence[Token], vectors: np.ndarray):
        matrix = np.asarray(vectors)
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise ValueError("vectors must be a (len(tokens), d) matrix")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("vectors must be finite")
        self._tokens: tuple[Token, ...] = tuple(tokens)
        self._matrix = matrix
        self._index = {tok: i for i, tok in enumerate(self._tokens)}
        if len(self._index) != len(self._tokens):
            raise ValueError("duplicate token in embedding space")
        self._langs = np.asarray([tok.lang for tok in self._tokens])
        self._norms = np.linalg.norm(matrix.astype(np.float64, copy=False), axis=1)

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def tokens(self) -> tuple[Token, ...]:
        return self._tokens

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def languages(self) -> tuple[str, ...]:
        return tuple(sorted(set(tok.lang for tok in self._tokens)))

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: Token) -> bool:
        return token in self._index

    def vector(self, token: Token) -> np.ndarray:
        try:
            return self._matrix[self._index[token]]
        except KeyError:
            raise UnknownWordError(f"not in embedding space: {token}") from None

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{len(self._tokens)} {self.dim}\n")
            for tok, row in zip(self._tokens, self._matrix):
                fh.write(str(tok))
                for value in row:
                    fh.write(" ")
                    fh.write(repr(float(value)))
                fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "EmbeddingSpace":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise FormatError(f"{path}: expected '|V| d' header")
            try:
                n, dim = int(header[0]), int(header[1])
            except ValueError:
                raise FormatError(f"{path}: non-integer header fields") from None
            tokens: list[Token] = []
            rows = np.empty((n, dim), dtype=np.float64)
            for i in range(n):
                line = fh.readline()
                if not line:
                    raise FormatError(f"{path}: expected {n} vectors, found {i}")
                fields = line.split()
                if len(fields) != dim + 1:
                    raise FormatError(
                        f"{path}: line {i + 2}: expected {dim + 1} fields, got {len(fields)}"
                    )
                tokens.append(Token.parse(fields[0]))
                try:
                    rows[i] = [float(v) for v in fields[1:]]
                except ValueError:
                    raise FormatError(f"{path}: line {i + 2}: bad float") from None
        if not np.all(np.isfinite(rows)):
            raise FormatError(f"{path}: non-finite vector component")
        return cls(tokens, rows)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity (a.b)/(|a||b|) in [-1, 1].

    Raises UndefinedSimilarityError for a zero-norm input.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        raise UndefinedSimilarityError("cosine is undefined for a zero-norm vector")
    return float(a @ b) / (na * nb)


def hellinger(p: np.ndarray, q: np.ndarray) -> float:
    """Hellinger distance between two probability vectors, in [0, 1].

    (1/sqrt(2)) * sqrt(sum_k (sqrt(p_k) - sqrt(q_k))^2).  This is a
    distance: identical distributions give 0, disjoint-support one-hots
    give 1, and ranked lists built on it must sort ascending.  Applicable
    only to non-negative vectors summing to 1 (checked to 1e-9).
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DomainError(f"dimension mismatch: {p.shape} vs {q.shape}")
    for name, vec in (("p", p), ("q", q)):
        if np.any(vec < 0):
            raise DomainError(f"{name} has a negative component")
        if abs(float(vec.sum()) - 1.0) > 1e-9:
            raise DomainError(f"{name} does not sum to 1 (sum={float(vec.sum())!r})")
    return float(np.sqrt(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)) / math.sqrt(2.0))


def _mode_mask(space: EmbeddingSpace, query: Token, mode: SimilarityMode) -> np.ndarray:
    if mode is SimilarityMode.MONOLINGUAL:
        return space._langs == query.lang
    if mode is SimilarityMode.CROSS_LINGUAL:
        return space._langs != query.lang
    return np.ones(len(space), dtype=bool)


def ranked_list(
    space: EmbeddingSpace, query: Token, mode: SimilarityMode, m: int
) -> RankedList:
    """Rank mode-filtered candidates by cosine to the query, prune at m.

    The query itself is excluded.  Candidates with zero-norm vectors
    cannot be scored and are skipped.  Raises UnknownWordError when the
    query is absent and UndefinedSimilarityError when its vector has zero
    norm.
    """
    if query not in space:
        raise UnknownWordError(f"not in embedding space: {query}")
    if m < 0:
        raise ConfigurationError(f"prune length must be >= 0, got {m}")
    qi = space._index[query]
    qnorm = space._norms[qi]
    if qnorm == 0.0:
        raise UndefinedSimilarityError(f"query {query} has a zero-norm vector")
    mask = _mode_mask(space, query, mode)
    mask[qi] = False
    mask &= space._norms > 0.0
    if m == 0 or not mask.any():
        return RankedList(query=query, mode=mode, items=(), m=m)
    idx = np.nonzero(mask)[0]
    qvec = space._matrix[qi].astype(np.float64, copy=False)
    sims = (space._matrix[idx].astype(np.float64, copy=False) @ qvec) / (
        space._norms[idx] * qnorm
    )
    scored = sorted(
        ((float(s), space._tokens[i]) for s, i in zip(sims, idx)),
        key=lambda item: (-item[0], item[1]),
    )
    items = tuple((tok, s) for s, tok in scored[:m])
    return RankedList(query=query, mode=mode, items=items, m=m)


def nearest_cross(space: EmbeddingSpace, query: Token) -> Token:
    """The query's cross-lingual nearest neighbor (head of the cross list)."""
    head = ranked_list(space, query, SimilarityMode.CROSS_LINGUAL, 1)
    if not head.items:
        raise ConfigurationError(f"no cross-lingual candidates for {query}")
    return head.items[0][0]


def build_space(tokens: Iterable[Token], matrix: np.ndarray) -> EmbeddingSpace:
    return EmbeddingSpace(tuple(tokens), matrix)
