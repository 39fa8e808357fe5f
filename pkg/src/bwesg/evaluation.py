"""Evaluation harnesses: bilingual lexicon extraction (BLE), word
translation in context (SWTC), and McNemar significance testing.

Both tasks report Acc1, the fraction of items whose top-ranked answer is
the gold one.  The denominator is always the full test-set size: items
that cannot be scored because a required word is out of vocabulary count
as incorrect, and the separately reported coverage is the fraction of
items that could be scored.  That keeps Acc1 comparable across models
trained with different vocabularies.

File formats:

* BLE gold pairs: ``source_lang:source<TAB>target_lang:gold`` per line.
* SWTC instances: ``pivot<TAB>gold<TAB>cand1,cand2,...<TAB>sentence``
  per line; the sentence field holds space-separated tokens and every
  token everywhere is lang-prefixed.
* Correctness bits: one ``0``/``1`` per line, aligned with the test file.

Instances are scored independently over a read-only space, so evaluation
may run concurrently with deterministic aggregation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

from .context import ContextBag, ContextScorerConfig, rank_candidates
from .corpus import Token
from .errors import (
    ConfigurationError,
    EmptyContextError,
    FormatError,
    PairingError,
    ParseError,
    UndefinedSimilarityError,
)
from .space import EmbeddingSpace, SimilarityMode, cosine, ranked_list

# Chi-square critical value at alpha = 0.05, df = 1.
CHI2_CRITICAL_P05 = 3.841


@dataclass(frozen=True)
class BleTestSet:
    """Gold one-to-one translation pairs, source -> target direction."""

    pairs: tuple[tuple[Token, Token], ...]
    source_lang: str
    target_lang: str


@dataclass(frozen=True)
class SwtcInstance:
    """One occurrence of a polysemous word with its candidate inventory."""

    pivot: Token
    sentence_tokens: tuple[Token, ...]
    candidates: tuple[Token, ...]
    gold: Token

    @property
    def tq(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class EvalResult:
    correct: tuple[bool, ...]
    acc1: float
    coverage: float

    @property
    def total(self) -> int:
        return len(self.correct)


class McNemarResult(NamedTuple):
    chi2: float
    significant: bool


class SenseBucket(NamedTuple):
    acc1: float
    total: int


def load_ble_test(path: str | Path) -> BleTestSet:
    pairs: list[tuple[Token, Token]] = []
    seen_sources: set[Token] = set()
    source_lang = target_lang = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise ParseError(
                    f"expected 2 tab-separated fields, got {len(fields)}", line=lineno
                )
            source, gold = Token.parse(fields[0]), Token.parse(fields[1])
            if source in seen_sources:
                raise FormatError(f"line {lineno}: duplicate source {source}")
            seen_sources.add(source)
            if source_lang is None:
                source_lang, target_lang = source.lang, gold.lang
            elif source.lang != source_lang or gold.lang != target_lang:
                raise FormatError(
                    f"line {lineno}: inconsistent language direction "
                    f"({source.lang}->{gold.lang}, expected {source_lang}->{target_lang})"
                )
            pairs.append((source, gold))
    if not pairs:
        raise ConfigurationError(f"test set {path} is empty")
    return BleTestSet(pairs=tuple(pairs), source_lang=source_lang, target_lang=target_lang)


def load_swtc_instances(path: str | Path) -> list[SwtcInstance]:
    instances: list[SwtcInstance] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ParseError(
                    f"expected 4 tab-separated fields, got {len(fields)}", line=lineno
                )
            pivot = Token.parse(fields[0])
            gold = Token.parse(fields[1])
            candidates = tuple(Token.parse(part) for part in fields[2].split(","))
            sentence = tuple(Token.parse(part) for part in fields[3].split())
            if len(candidates) < 2:
                raise FormatError(f"line {lineno}: need at least 2 candidates")
            if gold not in candidates:
                raise FormatError(f"line {lineno}: gold {gold} not among candidates")
            instances.append(
                SwtcInstance(
                    pivot=pivot, sentence_tokens=sentence, candidates=candidates, gold=gold
                )
            )
    return instances


def context_bag(instance: SwtcInstance) -> ContextBag:
    """Sentence tokens minus the first occurrence of the pivot."""
    words = list(instance.sentence_tokens)
    try:
        words.remove(instance.pivot)
    except ValueError:
        pass
    return ContextBag(words=tuple(words), pivot=instance.pivot)


def ble_evaluate(space: EmbeddingSpace, test: BleTestSet) -> EvalResult:
    """Acc1 of cross-lingual nearest neighbors against the gold pairs.

    A source word is correct iff its cross-lingual nearest neighbor is
    its gold translation.  Out-of-vocabulary sources count as incorrect
    and lower the coverage.
    """
    if not test.pairs:
        raise ConfigurationError("BLE test set is empty")
    bits: list[bool] = []
    covered = 0
    for source, gold in test.pairs:
        if source not in space:
            bits.append(False)
            continue
        try:
            head = ranked_list(space, source, SimilarityMode.CROSS_LINGUAL, 1).items
        except UndefinedSimilarityError:
            bits.append(False)
            continue
        if not head:
            bits.append(False)
            continue
        covered += 1
        bits.append(head[0][0] == gold)
    return EvalResult(
        correct=tuple(bits),
        acc1=sum(bits) / len(bits),
        coverage=covered / len(bits),
    )


def _evaluate_instances(space, instances, ranker) -> EvalResult:
    if not instances:
        raise ConfigurationError("SWTC instance list is empty")
    bits: list[bool] = []
    covered = 0
    for inst in instances:
        if inst.pivot not in space or any(c not in space for c in inst.candidates):
            bits.append(False)
            continue
        try:
            best = ranker(inst)
        except (EmptyContextError, UndefinedSimilarityError):
            bits.append(False)
            continue
        covered += 1
        bits.append(best == inst.gold)
    return EvalResult(
        correct=tuple(bits),
        acc1=sum(bits) / len(bits),
        coverage=covered / len(bits),
    )


def swtc_evaluate(
    space: EmbeddingSpace,
    instances: Sequence[SwtcInstance],
    cfg: ContextScorerConfig,
) -> EvalResult:
    """Acc1 of context-sensitive candidate ranking.

    Per instance the context bag is the sentence minus one pivot
    occurrence; correct iff the top-ranked candidate is the gold one.
    Instances with an out-of-vocabulary pivot or candidate, or whose
    context cannot be composed when the method requires it, count as
    incorrect and lower coverage.
    """

    def ranker(inst: SwtcInstance) -> Token:
        ranking = rank_candidates(space, inst.pivot, context_bag(inst), inst.candidates, cfg)
        return ranking[0][0]

    return _evaluate_instances(space, instances, ranker)


def no_context_baseline(
    space: EmbeddingSpace, instances: Sequence[SwtcInstance]
) -> EvalResult:
    """Context-insensitive baseline: argmax of cosine(pivot, candidate).

    Deliberately does not share the context-scoring code path, so it also
    serves as an independent check of the lambda = 0 degenerate case.
    """

    def ranker(inst: SwtcInstance) -> Token:
        scored = [
            (cand, cosine(space.vector(inst.pivot), space.vector(cand)))
            for cand in inst.candidates
        ]
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored[0][0]

    return _evaluate_instances(space, instances, ranker)


def mcnemar(a: Sequence[bool], b: Sequence[bool]) -> McNemarResult:
    """Continuity-corrected McNemar test on paired correctness bits.

    chi2 = (|b10 - b01| - 1)^2 / (b10 + b01) over the discordant counts;
    significant at alpha = 0.05 iff chi2 > 3.841.  With no discordant
    pairs the statistic is 0 and not significant.
    """
    if len(a) != len(b):
        raise PairingError(f"paired results differ in length: {len(a)} vs {len(b)}")
    b10 = sum(1 for x, y in zip(a, b) if x and not y)
    b01 = sum(1 for x, y in zip(a, b) if y and not x)
    if b10 + b01 == 0:
        return McNemarResult(chi2=0.0, significant=False)
    chi2 = (abs(b10 - b01) - 1) ** 2 / (b10 + b01)
    return McNemarResult(chi2=chi2, significant=chi2 > CHI2_CRITICAL_P05)


def acc_by_sense_count(
    results: EvalResult, instances: Sequence[SwtcInstance]
) -> dict[int, SenseBucket]:
    """Acc1 split by candidate-inventory size (2, 3 or 4 senses)."""
    if len(results.correct) != len(instances):
        raise PairingError(
            f"results and instances differ in length: "
            f"{len(results.correct)} vs {len(instances)}"
        )
    buckets: dict[int, list[bool]] = {}
    for bit, inst in zip(results.correct, instances):
        buckets.setdefault(inst.tq, []).append(bit)
    return {
        tq: SenseBucket(acc1=sum(bits) / len(bits), total=len(bits))
        for tq, bits in sorted(buckets.items())
    }


def write_bits(bits: Sequence[bool], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for bit in bits:
            fh.write("1\n" if bit else "0\n")


def read_bits(path: str | Path) -> tuple[bool, ...]:
    bits: list[bool] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            value = raw.strip()
            if not value:
                continue
            if value not in ("0", "1"):
                raise ParseError(f"expected 0 or 1, got {value!r}", line=lineno)
            bits.append(value == "1")
    return tuple(bits)
