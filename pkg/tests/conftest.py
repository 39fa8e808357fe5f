import numpy as np
import pytest

from bwesg.corpus import DocumentPair, Token


def tok(lang: str, surface: str) -> Token:
    return Token(lang, surface)


def make_pair(pair_id, src_surfaces, tgt_surfaces, src_lang="en", tgt_lang="es"):
    return DocumentPair(
        id=pair_id,
        source_tokens=tuple(Token(src_lang, s) for s in src_surfaces),
        target_tokens=tuple(Token(tgt_lang, s) for s in tgt_surfaces),
    )


def write_corpus_tsv(path, records):
    """records: iterable of (doc_id, lang, token_surfaces)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc_id, lang, surfaces in records:
            fh.write(f"{doc_id}\t{lang}\t{' '.join(surfaces)}\n")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
