"""Command-line entry point wiring corpus -> shuffle -> train -> evaluate.

Subcommands: ``shuffle``, ``train``, ``nn``, ``ble``, ``swtc``,
``swtc-score``, ``sweep``, ``export``, and ``run`` (the full pipeline
driven by a config file).

Config files are flat ``key=value`` text; every key mirrors a CLI flag
(``corpus``, ``strategy``, ``out``, ``seed``, ``dim``, ``window``,
``negatives``, ``epochs``, ``lr``, ``subsample``, ``min-count``,
``workers``).  A run manifest (JSON: config snapshot, input digests, tool
version, per-phase wall-clock timings) is written next to every model
file, and model files are written atomically (temp file + rename), so a
failed run never leaves a partial model behind.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .context import ContextScorerConfig, ScoreMethod, rank_candidates
from .corpus import Token, Vocabulary, build_vocabulary, filter_pair, load_corpus
from .errors import BwesgError, ConfigurationError
from .evaluation import (
    EvalResult,
    acc_by_sense_count,
    ble_evaluate,
    context_bag,
    load_ble_test,
    load_swtc_instances,
    mcnemar,
    no_context_baseline,
    read_bits,
    swtc_evaluate,
    write_bits,
)
from .shuffle import (
    PseudoBilingualDocument,
    Strategy,
    read_pseudo_documents,
    shuffle_corpus,
    write_pseudo_documents,
)
from .space import EmbeddingSpace, SimilarityMode, ranked_list
from .trainer import TrainingConfig, train

logger = logging.getLogger(__name__)

_CONFIG_KEYS = {
    "corpus", "strategy", "out", "seed", "dim", "window", "negatives",
    "epochs", "lr", "subsample", "min-count", "workers",
}


@dataclass
class PipelineSettings:
    """One pipeline run: where the corpus is, how to shuffle, how to train."""

    corpus: str
    strategy: Strategy
    out: str
    seed: int = 1
    dim: int = 300
    window: int = 48
    negatives: int = 25
    epochs: int = 15
    lr: float = 0.025
    subsample: float = 1e-4
    min_count: int = 5
    workers: int = 1

    def training_config(self) -> TrainingConfig:
        return TrainingConfig(
            dim=self.dim,
            max_window=self.window,
            negatives=self.negatives,
            subsample_rate=self.subsample,
            epochs=self.epochs,
            lr0=self.lr,
            seed=self.seed,
            workers=self.workers,
        )

    def snapshot(self) -> dict:
        data = asdict(self)
        data["strategy"] = self.strategy.value
        cfg = self.training_config()
        data["lr_min"] = cfg.lr_min
        data["unigram_power"] = cfg.unigram_power
        return data


def parse_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ConfigurationError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def settings_from_mapping(values: dict[str, str]) -> PipelineSettings:
    for required in ("corpus", "strategy", "out"):
        if required not in values:
            raise ConfigurationError(f"config is missing required key {required!r}")
    try:
        strategy = Strategy(values["strategy"])
    except ValueError:
        raise ConfigurationError(
            f"unknown strategy {values['strategy']!r} (expected merge, ratio or concat)"
        ) from None

    def _int(key: str, default: int) -> int:
        try:
            return int(values.get(key, default))
        except ValueError:
            raise ConfigurationError(f"config key {key!r} must be an integer") from None

    def _float(key: str, default: float) -> float:
        try:
            return float(values.get(key, default))
        except ValueError:
            raise ConfigurationError(f"config key {key!r} must be a number") from None

    return PipelineSettings(
        corpus=values["corpus"],
        strategy=strategy,
        out=values["out"],
        seed=_int("seed", 1),
        dim=_int("dim", 300),
        window=_int("window", 48),
        negatives=_int("negatives", 25),
        epochs=_int("epochs", 15),
        lr=_float("lr", 0.025),
        subsample=_float("subsample", 1e-4),
        min_count=_int("min-count", 5),
        workers=_int("workers", 1),
    )


def load_settings(config_path: str | Path) -> PipelineSettings:
    return settings_from_mapping(parse_config_file(config_path))


def _sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _atomic_save(space: EmbeddingSpace, out: str | Path) -> None:
    out = Path(out)
    tmp = out.with_name(out.name + ".tmp")
    try:
        space.save(tmp)
        os.replace(tmp, out)
    finally:
        tmp.unlink(missing_ok=True)


def manifest_path_for(model_path: str | Path) -> Path:
    model_path = Path(model_path)
    return model_path.with_name(model_path.name + ".manifest.json")


@dataclass
class PipelineResult:
    model_path: Path
    manifest_path: Path
    space: EmbeddingSpace
    vocab: Vocabulary
    skipped_pairs: int


def run_pipeline(
    settings: PipelineSettings | str | Path,
    seed_override: int | None = None,
    out_override: str | Path | None = None,
) -> PipelineResult:
    """Shuffle + train per the settings, then write model and manifest.

    Training parameters are validated before any file is read.  The run
    seed drives both the corpus shuffle and the trainer.
    """
    if not isinstance(settings, PipelineSettings):
        settings = load_settings(settings)
    if seed_override is not None:
        settings = PipelineSettings(**{**asdict(settings), "seed": seed_override})
    if out_override is not None:
        settings = PipelineSettings(**{**asdict(settings), "out": str(out_override)})
    cfg = settings.training_config()
    cfg.validate()
    if settings.min_count < 1:
        raise ConfigurationError(f"min-count must be >= 1, got {settings.min_count}")

    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    corpus = load_corpus(settings.corpus)
    vocab = build_vocabulary(corpus, settings.min_count)
    filtered = [filter_pair(pair, vocab) for pair in corpus.pairs]
    timings["load_s"] = round(time.perf_counter() - t0, 6)

    t0 = time.perf_counter()
    docs, skipped = shuffle_corpus(filtered, settings.strategy, settings.seed)
    timings["shuffle_s"] = round(time.perf_counter() - t0, 6)
    if not docs:
        raise ConfigurationError("no document pair is eligible for the chosen strategy")

    t0 = time.perf_counter()
    space = train(docs, vocab, cfg)
    timings["train_s"] = round(time.perf_counter() - t0, 6)

    t0 = time.perf_counter()
    out = Path(settings.out)
    _atomic_save(space, out)
    timings["save_s"] = round(time.perf_counter() - t0, 6)
    manifest = {
        "tool": "bwesg",
        "version": __version__,
        "config": settings.snapshot(),
        "inputs": {settings.corpus: _sha256(settings.corpus)},
        "skipped_pairs": skipped,
        "timings": timings,
    }
    mpath = manifest_path_for(out)
    tmp = mpath.with_name(mpath.name + ".tmp")
    try:
        tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        os.replace(tmp, mpath)
    finally:
        tmp.unlink(missing_ok=True)
    return PipelineResult(
        model_path=out, manifest_path=mpath, space=space, vocab=vocab, skipped_pairs=skipped
    )


def settings_from_manifest(manifest_path: str | Path) -> PipelineSettings:
    """Rebuild pipeline settings from a saved manifest's config snapshot."""
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    snap = manifest["config"]
    return PipelineSettings(
        corpus=snap["corpus"],
        strategy=Strategy(snap["strategy"]),
        out=snap["out"],
        seed=snap["seed"],
        dim=snap["dim"],
        window=snap["window"],
        negatives=snap["negatives"],
        epochs=snap["epochs"],
        lr=snap["lr"],
        subsample=snap["subsample"],
        min_count=snap["min_count"],
        workers=snap["workers"],
    )


@dataclass
class SweepRow:
    seed: int
    acc1: float


@dataclass
class SweepSummary:
    rows: list[SweepRow]
    minimum: float
    average: float
    maximum: float


def sweep(
    settings: PipelineSettings | str | Path,
    seeds: Sequence[int],
    evaluate,
) -> SweepSummary:
    """One pipeline + evaluation per seed, with MIN/AVG/MAX summary.

    Only the merge strategy is seed-sensitive, so anything else is a
    configuration error.  ``evaluate`` maps an EmbeddingSpace to an
    EvalResult.  Per-seed models are written as ``<out>.s<seed>``.
    """
    if not isinstance(settings, PipelineSettings):
        settings = load_settings(settings)
    if settings.strategy is not Strategy.MERGE:
        raise ConfigurationError(
            f"sweep requires the merge strategy, config uses {settings.strategy.value!r}"
        )
    if not seeds:
        raise ConfigurationError("no seeds given")
    rows: list[SweepRow] = []
    for seed in seeds:
        result = run_pipeline(
            settings, seed_override=seed, out_override=f"{settings.out}.s{seed}"
        )
        rows.append(SweepRow(seed=seed, acc1=evaluate(result.space).acc1))
    values = [row.acc1 for row in rows]
    return SweepSummary(
        rows=rows,
        minimum=min(values),
        average=sum(values) / len(values),
        maximum=max(values),
    )


# ---------------------------------------------------------------------------
# subcommands


def _cmd_shuffle(args) -> int:
    corpus = load_corpus(args.infile)
    docs, skipped = shuffle_corpus(corpus, Strategy(args.strategy), args.seed)
    write_pseudo_documents(docs, args.out)
    print(f"wrote {len(docs)} pseudo-documents to {args.out} ({skipped} pair(s) skipped)")
    return 0


def _cmd_train(args) -> int:
    docs = read_pseudo_documents(args.infile)
    if not docs:
        raise ConfigurationError(f"{args.infile} contains no documents")
    counts = Counter(tok for doc in docs for tok in doc.tokens)
    vocab = Vocabulary.from_counts(counts, args.min_count)
    kept_docs = []
    for doc in docs:
        tokens = tuple(tok for tok in doc.tokens if tok in vocab)
        if tokens:
            kept_docs.append(
                PseudoBilingualDocument(
                    tokens=tokens, origin_id=doc.origin_id, strategy=doc.strategy
                )
            )
    cfg = TrainingConfig(
        dim=args.dim,
        max_window=args.window,
        negatives=args.negatives,
        subsample_rate=args.subsample,
        epochs=args.epochs,
        lr0=args.lr,
        seed=args.seed,
        workers=args.workers,
    )
    cfg.validate()
    space = train(kept_docs, vocab, cfg)
    _atomic_save(space, args.out)
    print(f"trained {len(space)} vectors (d={space.dim}), wrote {args.out}")
    return 0


def _cmd_nn(args) -> int:
    space = EmbeddingSpace.load(args.model)
    query = Token.parse(args.query)
    result = ranked_list(space, query, SimilarityMode(args.mode), args.top)
    print(f"{query}  [{result.mode.value}]")
    for rank, (tok, score) in enumerate(result.items, start=1):
        print(f"{rank}\t{tok}\t{score:.6f}")
    return 0


def _print_eval(name: str, result: EvalResult) -> None:
    print(f"{name}\tacc1={result.acc1:.4f}\tcoverage={result.coverage:.4f}\tn={result.total}")


def _compare_bits(result: EvalResult, bits_path: str) -> None:
    other = read_bits(bits_path)
    stat = mcnemar(result.correct, other)
    verdict = "significant" if stat.significant else "not significant"
    print(f"mcnemar\tchi2={stat.chi2:.6f}\t{verdict} (p<0.05)")


def _cmd_ble(args) -> int:
    space = EmbeddingSpace.load(args.model)
    test = load_ble_test(args.test)
    result = ble_evaluate(space, test)
    _print_eval("ble", result)
    if args.save_bits:
        write_bits(result.correct, args.save_bits)
    if args.compare:
        _compare_bits(result, args.compare)
    return 0


def _scorer_config(args) -> ContextScorerConfig:
    return ContextScorerConfig(method=ScoreMethod(args.method), lam=args.lam)


def _cmd_swtc(args) -> int:
    space = EmbeddingSpace.load(args.model)
    instances = load_swtc_instances(args.test)
    if args.baseline == "no-context":
        result = no_context_baseline(space, instances)
        _print_eval("swtc[no-context]", result)
    else:
        result = swtc_evaluate(space, instances, _scorer_config(args))
        _print_eval(f"swtc[{args.method}]", result)
    for tq, bucket in acc_by_sense_count(result, instances).items():
        print(f"senses={tq}\tacc1={bucket.acc1:.4f}\tn={bucket.total}")
    if args.save_bits:
        write_bits(result.correct, args.save_bits)
    if args.compare:
        _compare_bits(result, args.compare)
    return 0


def _cmd_swtc_score(args) -> int:
    space = EmbeddingSpace.load(args.model)
    instances = load_swtc_instances(args.infile)
    cfg = _scorer_config(args)
    for i, inst in enumerate(instances, start=1):
        try:
            ranking = rank_candidates(
                space, inst.pivot, context_bag(inst), inst.candidates, cfg
            )
        except BwesgError as exc:
            print(f"{i}\t{inst.pivot}\tunscorable: {exc}")
            continue
        ranked = " ".join(f"{tok}={score:.6f}" for tok, score in ranking)
        print(f"{i}\t{inst.pivot}\t{ranked}")
    return 0


def _cmd_sweep(args) -> int:
    seeds = [int(part) for part in args.seeds.split(",") if part.strip()]
    if args.ble:
        test = load_ble_test(args.ble)
        evaluate = lambda space: ble_evaluate(space, test)  # noqa: E731
    else:
        instances = load_swtc_instances(args.swtc)
        cfg = _scorer_config(args)
        evaluate = lambda space: swtc_evaluate(space, instances, cfg)  # noqa: E731
    summary = sweep(args.config, seeds, evaluate)
    lines = [f"{row.seed}\t{row.acc1:.6f}" for row in summary.rows]
    lines.append(f"MIN\t{summary.minimum:.6f}")
    lines.append(f"AVG\t{summary.average:.6f}")
    lines.append(f"MAX\t{summary.maximum:.6f}")
    output = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    sys.stdout.write(output)
    return 0


def _cmd_export(args) -> int:
    space = EmbeddingSpace.load(args.model)
    out = Path(args.out)
    tmp = out.with_name(out.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            for tok in space.tokens:
                values = " ".join(repr(float(v)) for v in space.vector(tok))
                fh.write(f"{tok.surface}\t{tok.lang}\t{values}\n")
        os.replace(tmp, out)
    finally:
        tmp.unlink(missing_ok=True)
    print(f"exported {len(space)} vectors to {out}")
    return 0


def _cmd_run(args) -> int:
    result = run_pipeline(args.config, seed_override=args.seed, out_override=args.out)
    print(
        f"wrote {result.model_path} (|V|={len(result.space)}, d={result.space.dim}) "
        f"and {result.manifest_path}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bwesg",
        description="Bilingual word embeddings from document-aligned comparable corpora.",
    )
    parser.add_argument("--version", action="version", version=f"bwesg {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shuffle", help="build pseudo-bilingual documents from a corpus")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="infile", required=True, metavar="CORPUS_TSV")
    p.add_argument("--out", required=True, metavar="PSEUDO_TXT")
    p.set_defaults(func=_cmd_shuffle)

    p = sub.add_parser("train", help="train SGNS on pseudo-bilingual documents")
    p.add_argument("--in", dest="infile", required=True, metavar="PSEUDO_TXT")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=48)
    p.add_argument("--negatives", type=int, default=25)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--subsample", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--min-count", type=int, default=5, dest="min_count")
    p.add_argument("--out", required=True, metavar="MODEL_VEC")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("nn", help="ranked similar-word query")
    p.add_argument("--model", required=True)
    p.add_argument("--query", required=True, metavar="LANG:SURFACE")
    p.add_argument("--mode", choices=[m.value for m in SimilarityMode], default="cross")
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=_cmd_nn)

    p = sub.add_parser("ble", help="bilingual lexicon extraction accuracy")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, metavar="BLE_TSV")
    p.add_argument("--save-bits", dest="save_bits", metavar="BITS_FILE")
    p.add_argument("--compare", metavar="BITS_FILE")
    p.set_defaults(func=_cmd_ble)

    p = sub.add_parser("swtc", help="word translation in context accuracy")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True, metavar="SWTC_TSV")
    p.add_argument("--method", choices=[m.value for m in ScoreMethod], default="interp")
    p.add_argument("--lambda", type=float, default=1.0, dest="lam")
    p.add_argument("--baseline", choices=["no-context"])
    p.add_argument("--save-bits", dest="save_bits", metavar="BITS_FILE")
    p.add_argument("--compare", metavar="BITS_FILE")
    p.set_defaults(func=_cmd_swtc)

    p = sub.add_parser("swtc-score", help="print per-instance candidate rankings")
    p.add_argument("--model", required=True)
    p.add_argument("--method", choices=[m.value for m in ScoreMethod], default="interp")
    p.add_argument("--lambda", type=float, default=1.0, dest="lam")
    p.add_argument("--in", dest="infile", required=True, metavar="SWTC_TSV")
    p.set_defaults(func=_cmd_swtc_score)

    p = sub.add_parser("sweep", help="pipeline + evaluation over several shuffle seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--seeds", required=True, help="comma-separated seed list")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--ble", metavar="BLE_TSV")
    group.add_argument("--swtc", metavar="SWTC_TSV")
    p.add_argument("--method", choices=[m.value for m in ScoreMethod], default="interp")
    p.add_argument("--lambda", type=float, default=1.0, dest="lam")
    p.add_argument("--out", metavar="SUMMARY_TSV")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("export", help="convert a model to surface-keyed columns")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("run", help="full pipeline from a key=value config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", help="override the config output path")
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except BwesgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
