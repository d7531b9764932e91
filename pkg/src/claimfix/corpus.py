"""Patent claim loading, punctuation segmentation and by-patent splitting."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import ContractError, DataError, ParseError

DELIMITERS = ",;:"
_DELIM_RE = re.compile(f"[{re.escape(DELIMITERS)}]")


class SegmentKey(NamedTuple):
    patent_id: str
    claim_index: int
    segment_index: int


@dataclass(frozen=True)
class PatentDoc:
    patent_id: str
    claims: tuple[str, ...] = ()
    abstract: str | None = None
    label: str | None = None

    def __post_init__(self):
        if not self.patent_id:
            raise DataError("patent_id must be nonempty")
        if not self.claims and self.abstract is None:
            raise DataError(f"patent {self.patent_id} has neither claims nor abstract")


@dataclass(frozen=True)
class Segment:
    patent_id: str
    claim_index: int
    segment_index: int
    tokens: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.tokens:
            raise DataError(f"segment {self.key} has no tokens")
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise DataError(f"segment {self.key} has invalid token {tok!r}")

    @property
    def key(self) -> SegmentKey:
        return SegmentKey(self.patent_id, self.claim_index, self.segment_index)


def segment_claim(claim_text: str) -> list[list[str]]:
    """Split a claim at commas, semicolons and colons into token lists.

    The delimiters are dropped, a claim-final period is removed, and each
    remaining piece is split on whitespace. Empty pieces are dropped, so
    all-whitespace or delimiter-only input gives ``[]``.
    """
    text = claim_text.rstrip()
    if text.endswith("."):
        text = text[:-1]
    pieces = (piece.split() for piece in _DELIM_RE.split(text))
    return [toks for toks in pieces if toks]


def segment_patent(doc: PatentDoc) -> list[Segment]:
    out = []
    for ci, claim in enumerate(doc.claims):
        for si, toks in enumerate(segment_claim(claim)):
            out.append(Segment(doc.patent_id, ci, si, tuple(toks)))
    return out


def segment_corpus(docs: Iterable[PatentDoc]) -> list[Segment]:
    segments = []
    seen = set()
    for doc in docs:
        for seg in segment_patent(doc):
            if seg.key in seen:
                raise DataError(f"duplicate segment key {seg.key}; is patent {doc.patent_id} listed twice?")
            seen.add(seg.key)
            segments.append(seg)
    return segments


def load_patents(path) -> list[PatentDoc]:
    """Read a JSON-lines corpus: one object per patent.

    Keys: ``patent_id``, ``claims`` (list of strings), optional ``abstract``
    and ``label``.
    """
    docs = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"invalid JSON: {e.msg}", line=lineno) from None
            if not isinstance(obj, dict) or "patent_id" not in obj:
                raise ParseError("expected an object with a patent_id", line=lineno)
            claims = obj.get("claims") or []
            if not isinstance(claims, list) or not all(isinstance(c, str) for c in claims):
                raise ParseError("claims must be a list of strings", line=lineno)
            label = obj.get("label")
            try:
                docs.append(PatentDoc(
                    patent_id=str(obj["patent_id"]),
                    claims=tuple(claims),
                    abstract=obj.get("abstract"),
                    label=None if label is None else str(label),
                ))
            except DataError as e:
                raise ParseError(str(e), line=lineno) from None
    return docs


def write_patents(path, docs: Iterable[PatentDoc]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for doc in docs:
            obj = {"patent_id": doc.patent_id, "claims": list(doc.claims)}
            if doc.abstract is not None:
                obj["abstract"] = doc.abstract
            if doc.label is not None:
                obj["label"] = doc.label
            f.write(json.dumps(obj, ensure_ascii=False) + "\n")


def write_segments(path, segments: Iterable[Segment]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for seg in segments:
            f.write(f"{seg.patent_id}\t{seg.claim_index}\t{seg.segment_index}\t{' '.join(seg.tokens)}\n")
            n += 1
    return n


def read_segments(path) -> list[Segment]:
    """Read the ``patent_id, claim_index, segment_index, tokens`` TSV."""
    segments = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ParseError(f"expected 4 tab-separated fields, got {len(parts)}", line=lineno)
            try:
                segments.append(Segment(parts[0], int(parts[1]), int(parts[2]), tuple(parts[3].split())))
            except (ValueError, DataError) as e:
                raise ParseError(str(e), line=lineno) from None
    return segments


def _patent_of(record) -> str:
    if isinstance(record, dict):
        return record["patent_id"]
    return record.patent_id


def split_by_patent(records: Sequence, train_fraction: float, seed: int) -> tuple[list, list]:
    """Partition records so that each patent lands wholly on one side.

    ``round(train_fraction * n_patents)`` patents, picked by a seeded shuffle
    of the sorted distinct ids, go to the training side. Both sides are kept
    nonempty. Input order is preserved within each side.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ContractError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if not records:
        raise ContractError("cannot split an empty record list")
    patents = sorted({_patent_of(r) for r in records})
    if len(patents) < 2:
        raise ContractError("need at least two distinct patents for a nonempty train/test split")
    random.Random(seed).shuffle(patents)
    n_train = min(max(round(train_fraction * len(patents)), 1), len(patents) - 1)
    train_ids = set(patents[:n_train])
    train = [r for r in records if _patent_of(r) in train_ids]
    test = [r for r in records if _patent_of(r) not in train_ids]
    return train, test
