"""TF-IDF features over words, trigrams or dependency triples."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import PatentDoc, segment_claim
from .errors import ContractError, DataError, ParseError

MODES = ("bow", "trigram", "dependency")
SOURCES = ("abstract", "claims")

_SENTENCE_END = re.compile(r"\.\s+")


@dataclass(frozen=True)
class TermDoc:
    doc_id: str
    terms: Counter


def dependency_term(relation: str, governor: str, dependent: str) -> str:
    return f"{relation}({governor.lower()},{dependent.lower()})"


def _segments(doc: PatentDoc, source: str) -> list[list[str]]:
    if source == "claims":
        if not doc.claims:
            raise DataError(f"patent {doc.patent_id} has no claims")
        return [toks for claim in doc.claims for toks in segment_claim(claim)]
    if source == "abstract":
        if not doc.abstract:
            raise DataError(f"patent {doc.patent_id} has no abstract")
        return [toks for sent in _SENTENCE_END.split(doc.abstract) for toks in segment_claim(sent)]
    raise ContractError(f"unknown source {source!r}")


def termize(doc: PatentDoc, mode: str, source: str,
            dependencies: Mapping[str, Sequence] | None = None) -> TermDoc:
    """Extract the term multiset of one document.

    ``bow`` gives lowercased tokens, ``trigram`` every three consecutive
    lowercased tokens inside one segment, ``dependency`` one ``rel(gov,dep)``
    term per record in ``dependencies[doc.patent_id]``.
    """
    if mode == "dependency":
        if source not in SOURCES:
            raise ContractError(f"unknown source {source!r}")
        if dependencies is None or doc.patent_id not in dependencies:
            raise DataError(f"no {source} dependencies for patent {doc.patent_id}")
        return TermDoc(doc.patent_id, Counter(
            dependency_term(d.relation, d.governor, d.dependent) for d in dependencies[doc.patent_id]))
    segs = _segments(doc, source)
    if mode == "bow":
        terms = Counter(t.lower() for toks in segs for t in toks)
    elif mode == "trigram":
        terms = Counter()
        for toks in segs:
            low = [t.lower() for t in toks]
            for i in range(len(low) - 2):
                terms[" ".join(low[i:i + 3])] += 1
    else:
        raise ContractError(f"unknown mode {mode!r}")
    return TermDoc(doc.patent_id, terms)


class Vocab:
    def __init__(self, index: dict[str, int], df: dict[str, int], n_docs: int):
        self.index = index
        self.df = df
        self.n_docs = n_docs

    def __len__(self):
        return len(self.index)

    def __eq__(self, other):
        return (isinstance(other, Vocab) and self.index == other.index
                and self.df == other.df and self.n_docs == other.n_docs)

    def idf(self, term: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.df[term])) + 1.0


def fit_vocab(corpus: Sequence[TermDoc]) -> Vocab:
    if not corpus:
        raise ContractError("cannot fit a vocabulary on an empty corpus")
    df = Counter()
    for doc in corpus:
        df.update(doc.terms.keys())
    terms = sorted(df)
    return Vocab({t: i for i, t in enumerate(terms)}, dict(df), len(corpus))


def transform(vocab: Vocab, doc: TermDoc) -> dict[int, float]:
    """Raw-count tf times smoothed idf, L2-normalised; unseen terms are ignored."""
    vec = {vocab.index[t]: n * vocab.idf(t) for t, n in doc.terms.items() if t in vocab.index and n > 0}
    norm = math.sqrt(sum(v * v for v in vec.values()))
    if norm == 0:
        return {}
    return {i: v / norm for i, v in sorted(vec.items())}


def concat_blocks(blocks: Sequence[tuple[Mapping[int, float], int]]) -> tuple[dict[int, float], int]:
    """Join sparse vectors side by side; block k is shifted by the widths before it."""
    out = {}
    offset = 0
    for vec, width in blocks:
        for i, v in vec.items():
            if not 0 <= i < width:
                raise ContractError(f"index {i} outside block width {width}")
            out[offset + i] = v
        offset += width
    return out, offset


def to_dense(vectors: Iterable[Mapping[int, float]], width: int) -> np.ndarray:
    rows = list(vectors)
    M = np.zeros((len(rows), width))
    for r, vec in enumerate(rows):
        for i, v in vec.items():
            M[r, i] = v
    return M


def save_vocab(path, vocab: Vocab) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"#N\t{vocab.n_docs}\n")
        for term, i in sorted(vocab.index.items(), key=lambda kv: kv[1]):
            f.write(f"{term}\t{i}\t{vocab.df[term]}\n")


def load_vocab(path) -> Vocab:
    with open(path, encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        if len(header) != 2 or header[0] != "#N":
            raise ParseError("vocab: expected '#N<TAB>count' header", line=1)
        try:
            n = int(header[1])
        except ValueError:
            raise ParseError("vocab: bad document count", line=1) from None
        index, df = {}, {}
        for lineno, line in enumerate(f, 2):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3:
                raise ParseError(f"vocab: expected 3 fields, got {len(parts)}", line=lineno)
            try:
                index[parts[0]] = int(parts[1])
                df[parts[0]] = int(parts[2])
            except ValueError:
                raise ParseError("vocab: bad integer", line=lineno) from None
    if sorted(index.values()) != list(range(len(index))):
        raise ParseError("vocab: column indices are not dense")
    return Vocab(index, df, n)
