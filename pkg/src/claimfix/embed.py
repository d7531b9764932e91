"""Pretrained word vectors and trigram ("verb triplicate") features."""

from __future__ import annotations

import hashlib
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractError, ParseError

DEFAULT_DIM = 100


class EmbeddingStore:
    """Read-only word -> vector table. Lookups lowercase the query word."""

    def __init__(self, vectors: dict, dim: int):
        if dim <= 0:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self._index = {}
        self._matrix = np.zeros((len(vectors), dim))
        for i, (word, vec) in enumerate(vectors.items()):
            vec = np.asarray(vec, dtype=float)
            if vec.shape != (dim,):
                raise ValueError(f"vector for {word!r} has shape {vec.shape}, expected ({dim},)")
            self._index[word] = i
            self._matrix[i] = vec
        self._matrix.setflags(write=False)
        self._zero = np.zeros(dim)
        self._zero.setflags(write=False)

    def __len__(self):
        return len(self._index)

    def __contains__(self, word):
        return word.lower() in self._index

    def words(self) -> list[str]:
        return list(self._index)

    def get(self, word: str):
        """Vector for ``word``, or None when out of vocabulary."""
        i = self._index.get(word.lower())
        return None if i is None else self._matrix[i]

    def vector(self, word: str) -> np.ndarray:
        """Like ``get`` but maps OOV words to the zero vector."""
        i = self._index.get(word.lower())
        return self._zero if i is None else self._matrix[i]


def load_embeddings(path) -> EmbeddingStore:
    """Read word2vec text format: ``<count> <dim>`` header, then ``word v1 ... vd``."""
    with open(path, encoding="utf-8") as f:
        header = f.readline()
        parts = header.split()
        try:
            count, dim = int(parts[0]), int(parts[1])
            if len(parts) != 2 or count < 0 or dim <= 0:
                raise ValueError
        except (ValueError, IndexError):
            raise ParseError(f"bad embedding header {header.strip()!r}", line=1) from None
        vectors = {}
        lineno = 1
        for lineno, line in enumerate(f, 2):
            fields = line.rstrip("\n").split(" ")
            fields = [x for x in fields if x]
            if not fields:
                raise ParseError("blank line in embedding file", line=lineno)
            word, values = fields[0], fields[1:]
            if len(values) != dim:
                raise ParseError(f"expected {dim} values for {word!r}, got {len(values)}", line=lineno)
            if word in vectors:
                raise ParseError(f"duplicate word {word!r}", line=lineno)
            try:
                vectors[word] = np.array([float(v) for v in values])
            except ValueError:
                raise ParseError(f"non-numeric value for {word!r}", line=lineno) from None
        if len(vectors) != count:
            raise ParseError(f"header promises {count} words, file has {len(vectors)}", line=lineno)
    return EmbeddingStore(vectors, dim)


def save_embeddings(path, store: EmbeddingStore) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(store)} {store.dim}\n")
        for word in store.words():
            f.write(word + " " + " ".join(repr(float(x)) for x in store.get(word)) + "\n")


def pseudo_embeddings(words: Iterable[str], dim: int = DEFAULT_DIM, seed: int = 0) -> EmbeddingStore:
    """Deterministic stand-in vectors: each lowercased word hashes to a seed
    for a random unit vector. Similar words are NOT close; use for tests and
    smoke runs only."""
    vectors = {}
    for word in sorted({w.lower() for w in words}):
        digest = hashlib.blake2b(f"{seed}\x00{word}".encode("utf-8"), digest_size=8).digest()
        rng = np.random.default_rng(int.from_bytes(digest, "little"))
        v = rng.standard_normal(dim)
        vectors[word] = v / np.linalg.norm(v)
    return EmbeddingStore(vectors, dim)


def triplicate_features(store: EmbeddingStore, tokens: Sequence[str], index: int) -> np.ndarray:
    """Concatenate the vectors of tokens index-1, index and index+1.

    Neighbours past either end of the segment and unknown words contribute
    zeros, so the result always has length 3 * dim.
    """
    if hasattr(tokens, "tokens"):
        tokens = tokens.tokens
    if not 0 <= index < len(tokens):
        raise ContractError(f"index {index} out of range for {len(tokens)} tokens")
    parts = []
    for j in (index - 1, index, index + 1):
        parts.append(store.vector(tokens[j]) if 0 <= j < len(tokens) else store._zero)
    return np.concatenate(parts)
