"""Context-sensitive cross-lingual similarity scoring.

A word occurrence is disambiguated by its context bag: the multiset of
surrounding words (here typically the sentence minus one occurrence of
the word itself).  Three scoring methods rank translation candidates
against (word, bag):

* interpolated-add: the word vector is blended with the summed context
  vector, w' = (1 - lambda) * w + lambda * sum(context), and candidates
  are scored by cosine(w', candidate).  lambda = 1 means the context
  alone disambiguates; lambda = 0 ignores the context entirely.
* add-melamud: the arithmetic mean of cosine(word, candidate) and
  cosine(cw, candidate) over all context words cw.
* mult-melamud: the geometric mean of the same similarities after the
  shift (cos + 1) / 2 that maps them into the all-positive interval.

Out-of-vocabulary context words are dropped; they simply leave the bag.
All functions are pure over an immutable space and safe to call
concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .corpus import Token
from .errors import ConfigurationError, EmptyContextError, UnknownWordError
from .space import EmbeddingSpace, cosine


class ScoreMethod(str, Enum):
    INTERPOLATED_ADD = "interp"
    ADD_MELAMUD = "add-mel"
    MULT_MELAMUD = "mult-mel"


@dataclass(frozen=True)
class ContextBag:
    """Unordered multiset of context words around one pivot occurrence."""

    words: tuple[Token, ...]
    pivot: Token

    @property
    def size(self) -> int:
        return len(self.words)


@dataclass(frozen=True)
class ContextScorerConfig:
    method: ScoreMethod = ScoreMethod.INTERPOLATED_ADD
    lam: float = 1.0  # interpolation weight, used by interpolated-add only

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigurationError(f"lambda must be in [0, 1], got {self.lam}")


def compose(space: EmbeddingSpace, bag: ContextBag) -> np.ndarray:
    """Sum of the vectors of in-vocabulary bag words (multiset semantics).

    Raises EmptyContextError when no bag word is in the space.
    """
    total = None
    for word in bag.words:
        if word not in space:
            continue
        vec = space.vector(word)
        total = vec.astype(np.float64) if total is None else total + vec
    if total is None:
        raise EmptyContextError(f"no in-vocabulary context words around {bag.pivot}")
    return total


def contextualize(space: EmbeddingSpace, w: Token, bag: ContextBag, lam: float) -> np.ndarray:
    """(1 - lambda) * vec(w) + lambda * compose(bag).

    lambda = 0 returns vec(w) exactly without touching the bag.
    """
    if not 0.0 <= lam <= 1.0:
        raise ConfigurationError(f"lambda must be in [0, 1], got {lam}")
    if w not in space:
        raise UnknownWordError(f"not in embedding space: {w}")
    if lam == 0.0:
        return np.array(space.vector(w))
    return (1.0 - lam) * space.vector(w).astype(np.float64) + lam * compose(space, bag)


def score_in_context(
    space: EmbeddingSpace,
    w: Token,
    t: Token,
    bag: ContextBag,
    cfg: ContextScorerConfig,
) -> float:
    """Similarity of candidate t to the occurrence of w described by bag.

    With an empty effective bag, the melamud methods reduce to the
    pivot-only cosine term, while interpolated-add with lambda > 0 raises
    EmptyContextError (there is nothing to interpolate with).
    """
    if w not in space:
        raise UnknownWordError(f"not in embedding space: {w}")
    if t not in space:
        raise UnknownWordError(f"not in embedding space: {t}")
    if cfg.method is ScoreMethod.INTERPOLATED_ADD:
        return cosine(contextualize(space, w, bag, cfg.lam), space.vector(t))
    tvec = space.vector(t)
    sims = [cosine(space.vector(w), tvec)]
    sims.extend(cosine(space.vector(cw), tvec) for cw in bag.words if cw in space)
    if cfg.method is ScoreMethod.ADD_MELAMUD:
        # fsum: exactly rounded, so the result is independent of bag order
        return math.fsum(sims) / len(sims)
    # mult-melamud: geometric mean of shifted similarities, computed in
    # log space; a single zero factor (cos = -1) makes the mean zero.
    shifted = [(s + 1.0) / 2.0 for s in sims]
    if any(s == 0.0 for s in shifted):
        return 0.0
    return math.exp(math.fsum(math.log(s) for s in shifted) / len(shifted))


def rank_candidates(
    space: EmbeddingSpace,
    w: Token,
    bag: ContextBag,
    candidates: Sequence[Token],
    cfg: ContextScorerConfig,
) -> list[tuple[Token, float]]:
    """Score every candidate in context and sort descending.

    Ties break lexicographically by (lang, surface); the head of the list
    is the suggested translation.  Raises UnknownWordError naming the
    first unknown candidate.
    """
    if not candidates:
        raise ConfigurationError("candidate list is empty")
    for cand in candidates:
        if cand not in space:
            raise UnknownWordError(f"not in embedding space: {cand}")
    scored = [(cand, score_in_context(space, w, cand, bag, cfg)) for cand in candidates]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored
