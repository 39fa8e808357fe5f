"""Skip-gram with negative sampling over pseudo-bilingual documents.

The trainer scans each document word by word.  Every position is a pivot;
a window budget drawn uniformly from {1..max_window} selects its
neighbors, and each (pivot, neighbor) pair is a positive example.  For
each positive example, ``negatives`` context words are drawn from the
unigram^power distribution and pushed away while the observed neighbor is
pulled closer, one stochastic ascent step per pair on

    log sigmoid(w.c) + sum_neg log sigmoid(-w.c')

Documents are treated as flat bags: no sentence boundaries exist in a
pseudo-bilingual document, so windows run across the whole line.
Frequent words are down-sampled per pass with keep probability
min(1, (sqrt(f/t) + 1) * (t/f)) where f is the token's frequency relative
to the pooled bilingual stream.  The learning rate decays linearly with
processed-token count from lr0 to the lr_min floor.

Sigmoids in the hot path use a 1000-bin lookup table over [-6, 6] with
saturation outside; ``sgd_step`` has an exact-evaluation mode for
gradient checking.  All randomness comes from seeded PCG64 streams and
the inner loop is deterministic, so single-worker training is
bit-reproducible; with ``workers > 1`` document slices are trained on
shared matrices without locking and only convergence (not bit equality)
is guaranteed.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .corpus import Vocabulary
from .errors import ConfigurationError, DomainError
from .shuffle import PseudoBilingualDocument
from .space import EmbeddingSpace

logger = logging.getLogger(__name__)

REAL = np.float32

MAX_EXP = 6.0
SIGMOID_BINS = 1000
# Sigmoid sampled at the 1001 bin edges of [-6, 6]; lookup floors to the
# left edge and saturates to the table ends outside the range.
_EDGES = np.linspace(-MAX_EXP, MAX_EXP, SIGMOID_BINS + 1)
SIGMOID_TABLE = 1.0 / (1.0 + np.exp(-_EDGES))

DEFAULT_TABLE_SLOTS = 10_000_000


def sigmoid(x, exact: bool = False):
    """Logistic function; table-quantized unless ``exact``."""
    x = np.asarray(x, dtype=np.float64)
    if exact:
        out = np.empty_like(x)
        pos = x >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        out[~pos] = ex / (1.0 + ex)
    else:
        scaled = (np.maximum(x, -MAX_EXP) + MAX_EXP) * (SIGMOID_BINS / (2.0 * MAX_EXP))
        idx = np.minimum(scaled, SIGMOID_BINS).astype(np.int64)
        out = SIGMOID_TABLE[idx]
    return out if out.ndim else float(out)


def log_sigmoid(x) -> np.ndarray:
    """Numerically stable log(sigmoid(x))."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = -np.log1p(np.exp(-x[pos]))
    out[~pos] = x[~pos] - np.log1p(np.exp(x[~pos]))
    return out


@dataclass
class TrainingConfig:
    dim: int = 300
    max_window: int = 48
    negatives: int = 25
    subsample_rate: float = 1e-4
    epochs: int = 15
    lr0: float = 0.025
    lr_min: float | None = None  # defaults to 1e-4 * lr0
    unigram_power: float = 0.75
    seed: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.lr_min is None:
            self.lr_min = 1e-4 * self.lr0

    def validate(self) -> None:
        if self.dim < 1:
            raise ConfigurationError(f"dim must be >= 1, got {self.dim}")
        if self.max_window < 1:
            raise ConfigurationError(f"max_window must be >= 1, got {self.max_window}")
        if self.negatives < 0:
            raise ConfigurationError(f"negatives must be >= 0, got {self.negatives}")
        if self.subsample_rate < 0:
            raise ConfigurationError(
                f"subsample_rate must be >= 0, got {self.subsample_rate}"
            )
        if self.epochs < 0:
            raise ConfigurationError(f"epochs must be >= 0, got {self.epochs}")
        if self.lr0 <= 0:
            raise ConfigurationError(f"lr0 must be > 0, got {self.lr0}")
        if not 0 < self.lr_min < self.lr0:
            raise ConfigurationError(
                f"lr_min must be in (0, lr0), got {self.lr_min} with lr0={self.lr0}"
            )
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")


@dataclass
class ModelParams:
    """Pivot and context embedding matrices, one row per vocabulary index."""

    pivot: np.ndarray
    context: np.ndarray


class TrainingPair(NamedTuple):
    pivot_index: int
    context_index: int
    label: bool


def init_params(vocab: Vocabulary, cfg: TrainingConfig) -> ModelParams:
    """Pivot rows i.i.d. uniform in [-0.5/d, 0.5/d], context rows zero."""
    if len(vocab) < 1:
        raise ConfigurationError("cannot initialize parameters for an empty vocabulary")
    rng = np.random.default_rng([cfg.seed, 0])
    pivot = ((rng.random((len(vocab), cfg.dim)) - 0.5) / cfg.dim).astype(REAL)
    context = np.zeros((len(vocab), cfg.dim), dtype=REAL)
    return ModelParams(pivot=pivot, context=context)


def pair_probability(w: np.ndarray, v_c: np.ndarray) -> float:
    """Probability that (w, v_c) is an observed pair: sigmoid(w . v_c).

    The dot product saturates at +/-6 before the exact sigmoid is
    evaluated, matching the lookup table's clamp bound.
    """
    w = np.asarray(w, dtype=np.float64)
    v_c = np.asarray(v_c, dtype=np.float64)
    if w.shape != v_c.shape:
        raise DomainError(f"dimension mismatch: {w.shape} vs {v_c.shape}")
    dot = float(w @ v_c)
    dot = max(-MAX_EXP, min(MAX_EXP, dot))
    return float(sigmoid(dot, exact=True))


@dataclass
class NegativeTable:
    """The unigram^power sampling distribution realized as a slot table.

    ``slots[i]`` holds a vocabulary index; drawing slots uniformly draws
    indices with probability proportional to count^power.
    """

    slots: np.ndarray
    probabilities: np.ndarray = field(repr=False)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.slots[rng.integers(0, len(self.slots), size)]


def negative_table(
    vocab: Vocabulary, power: float, table_slots: int = DEFAULT_TABLE_SLOTS
) -> NegativeTable:
    """Precompute the noise distribution table (>= 10^7 slots by default)."""
    if len(vocab) < 1:
        raise ConfigurationError("cannot build a negative table for an empty vocabulary")
    if table_slots < len(vocab):
        raise ConfigurationError("table_slots must be at least the vocabulary size")
    weights = vocab.counts.astype(np.float64) ** power
    cum = np.cumsum(weights)
    cum /= cum[-1]
    midpoints = (np.arange(table_slots, dtype=np.float64) + 0.5) / table_slots
    slots = np.searchsorted(cum, midpoints, side="right").astype(np.int32)
    return NegativeTable(slots=slots, probabilities=weights / weights.sum())


def keep_probabilities(vocab: Vocabulary, t: float) -> np.ndarray:
    """Per-index keep probability min(1, (sqrt(f/t) + 1) * (t/f)).

    f is the count relative to the pooled bilingual token total.  t <= 0
    disables down-sampling (all ones).
    """
    if t <= 0:
        return np.ones(len(vocab), dtype=np.float64)
    freq = vocab.counts.astype(np.float64) / vocab.total
    ratio = freq / t
    return np.minimum((np.sqrt(ratio) + 1.0) / ratio, 1.0)


def subsample(
    doc: PseudoBilingualDocument,
    vocab: Vocabulary,
    t: float,
    rng: np.random.Generator,
) -> PseudoBilingualDocument:
    """Randomly drop frequent tokens, preserving order.

    Each token is kept with the ``keep_probabilities`` value for its
    vocabulary entry; tokens missing from the vocabulary are always kept
    (their frequency is treated as vanishing).  With t <= 0 the document
    is returned unchanged and no randomness is consumed.
    """
    if t <= 0 or not doc.tokens:
        return doc
    table = keep_probabilities(vocab, t)
    p = np.array(
        [table[idx] if (idx := vocab.get_index(tok)) is not None else 1.0 for tok in doc.tokens]
    )
    keep = rng.random(len(doc.tokens)) < p
    return PseudoBilingualDocument(
        tokens=tuple(tok for tok, k in zip(doc.tokens, keep) if k),
        origin_id=doc.origin_id,
        strategy=doc.strategy,
    )


def generate_pairs(
    doc: PseudoBilingualDocument,
    vocab: Vocabulary,
    cs: int,
    rng: np.random.Generator,
) -> Iterator[TrainingPair]:
    """Stream the positive pairs of one document.

    For each position a window budget is drawn uniformly from {1..cs};
    the pivot pairs with every neighbor within that many positions,
    truncated at the document boundaries.  The whole document is one
    context unit: no sentence boundaries are respected.
    """
    if cs < 1:
        raise ConfigurationError(f"window size must be >= 1, got {cs}")
    indices = [vocab.index(tok) for tok in doc.tokens]
    length = len(indices)
    for n in range(length):
        t = int(rng.integers(1, cs + 1))
        lo = max(0, n - t)
        hi = min(length - 1, n + t)
        for m in range(lo, hi + 1):
            if m == n:
                continue
            yield TrainingPair(pivot_index=indices[n], context_index=indices[m], label=True)


def local_objective(
    params: ModelParams, pivot_idx: int, context_idx: int, negatives: Sequence[int]
) -> float:
    """log sigmoid(w.c) + sum over negatives of log sigmoid(-w.c')."""
    w = params.pivot[pivot_idx].astype(np.float64)
    total = float(log_sigmoid(float(w @ params.context[context_idx].astype(np.float64))))
    for neg in negatives:
        total += float(log_sigmoid(-float(w @ params.context[neg].astype(np.float64))))
    return total


def sgd_step(
    params: ModelParams,
    pivot_idx: int,
    context_idx: int,
    negatives: Sequence[int],
    lr: float,
    exact_sigmoid: bool = False,
) -> None:
    """One ascent step on the local objective of a positive pair, in place.

    Gradients are evaluated at the pre-update parameters: the pivot delta
    sums g*c over pre-update context rows, and every sigmoid sees the
    pre-update dot products, so for duplicate rows (a negative colliding
    with the true context or with another negative) the contributions
    accumulate.  Negative draws are used as given; collisions are
    permitted.
    """
    if lr == 0.0:
        return
    rows = np.empty(len(negatives) + 1, dtype=np.int64)
    rows[0] = context_idx
    rows[1:] = negatives
    w = params.pivot[pivot_idx]
    ctx_rows = params.context[rows]
    dots = ctx_rows @ w
    labels = np.zeros(len(rows))
    labels[0] = 1.0
    g = (labels - sigmoid(dots, exact=exact_sigmoid)) * lr
    dw = g @ ctx_rows
    unique_rows, inverse = np.unique(rows, return_inverse=True)
    g_summed = np.bincount(inverse, weights=g)
    params.context[unique_rows] += g_summed[:, None] * w[None, :].astype(np.float64)
    params.pivot[pivot_idx] += dw


def _lr_at(cfg: TrainingConfig, processed: int, planned: int) -> float:
    return max(cfg.lr_min, cfg.lr0 * (1.0 - processed / planned))


def train(
    docs: Iterable[PseudoBilingualDocument],
    vocab: Vocabulary,
    cfg: TrainingConfig,
    epoch_callback: Callable[[int, ModelParams], None] | None = None,
) -> EmbeddingSpace:
    """Run cfg.epochs passes of SGNS and return the pivot vectors.

    Every document token must be in the vocabulary.  Down-sampling is
    re-drawn per pass.  With workers=1 the result is bit-reproducible for
    a fixed config; with more workers, document slices race on the shared
    matrices (convergence contract only).
    """
    cfg.validate()
    doc_list = list(docs)
    if not doc_list:
        raise ConfigurationError("no documents to train on")
    doc_arrays = [
        np.fromiter((vocab.index(tok) for tok in doc.tokens), np.int32, len(doc.tokens))
        for doc in doc_list
    ]
    total_tokens = int(sum(len(arr) for arr in doc_arrays))
    if total_tokens == 0:
        raise ConfigurationError("documents contain no tokens")
    params = init_params(vocab, cfg)
    if cfg.epochs == 0:
        return EmbeddingSpace(vocab.tokens, params.pivot.copy())

    from . import _sgns  # deferred: importing numba is slow

    slots = (
        negative_table(vocab, cfg.unigram_power).slots
        if cfg.negatives > 0
        else np.empty(0, dtype=np.int32)
    )
    keep_p = keep_probabilities(vocab, cfg.subsample_rate)
    planned = cfg.epochs * total_tokens
    progress = [0]
    progress_lock = threading.Lock()
    logger.info(
        "training: %d docs, %d tokens, |V|=%d, d=%d, cs=%d, k=%d, epochs=%d, workers=%d",
        len(doc_arrays), total_tokens, len(vocab), cfg.dim, cfg.max_window,
        cfg.negatives, cfg.epochs, cfg.workers,
    )

    def run_slice(worker: int, epoch: int) -> None:
        rng = np.random.default_rng([cfg.seed, 1, worker, epoch])
        for arr in doc_arrays[worker :: cfg.workers]:
            with progress_lock:
                done = progress[0]
            lr = _lr_at(cfg, done, planned)
            if cfg.subsample_rate > 0:
                kept = arr[rng.random(len(arr)) < keep_p[arr]]
            else:
                kept = arr
            n = len(kept)
            if n >= 2:
                tcs = rng.integers(1, cfg.max_window + 1, size=n, dtype=np.int32)
                pos = np.arange(n)
                n_pairs = int(
                    (np.minimum(tcs, pos) + np.minimum(tcs, n - 1 - pos)).sum()
                )
                if cfg.negatives > 0:
                    negs = slots[rng.integers(0, len(slots), n_pairs * cfg.negatives)]
                else:
                    negs = np.empty(0, dtype=np.int32)
                _sgns.train_document(
                    params.pivot, params.context, kept, tcs, negs,
                    cfg.negatives, lr, SIGMOID_TABLE, MAX_EXP,
                )
            with progress_lock:
                progress[0] += len(arr)

    for epoch in range(cfg.epochs):
        if cfg.workers == 1:
            run_slice(0, epoch)
        else:
            threads = [
                threading.Thread(target=run_slice, args=(w, epoch), daemon=True)
                for w in range(cfg.workers)
            ]
            for th in threads:
                th.start()
            for th in threads:
                th.join()
        if epoch_callback is not None:
            epoch_callback(epoch, params)
    return EmbeddingSpace(vocab.tokens, params.pivot.copy())
