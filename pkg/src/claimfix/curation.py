"""Quality control for crowd responses and reconciliation into curated tags."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .corpus import Segment, SegmentKey
from .errors import ConfigError, DataError, ParseError
from .tagset import CoarseClass


class TokenKey(NamedTuple):
    patent_id: str
    claim_index: int
    segment_index: int
    token_index: int

    @property
    def segment_key(self) -> SegmentKey:
        return SegmentKey(self.patent_id, self.claim_index, self.segment_index)


@dataclass(frozen=True)
class HitAnswer:
    key: TokenKey
    chosen_class: CoarseClass
    is_test: bool = False


@dataclass
class HitResponse:
    hit_id: str
    worker_id: str
    answers: list[HitAnswer] = field(default_factory=list)


@dataclass(frozen=True)
class HitDecision:
    hit_id: str
    worker_id: str
    accepted: bool
    correct: int
    tests: int
    failed: tuple[TokenKey, ...] = ()


@dataclass(frozen=True)
class CuratedTag:
    patent_id: str
    claim_index: int
    segment_index: int
    token_index: int
    gold_class: CoarseClass

    @property
    def key(self) -> TokenKey:
        return TokenKey(self.patent_id, self.claim_index, self.segment_index, self.token_index)

    @property
    def segment_key(self) -> SegmentKey:
        return SegmentKey(self.patent_id, self.claim_index, self.segment_index)


@dataclass(frozen=True)
class Conflict:
    key: TokenKey
    votes: tuple[tuple[CoarseClass, int], ...]


def validate_hit(response: HitResponse, answer_key: Mapping[TokenKey, frozenset],
                 required_correct: int) -> HitDecision:
    """Accept a HIT when at least ``required_correct`` test answers are in the key."""
    correct = 0
    tests = 0
    failed = []
    for ans in response.answers:
        if not ans.is_test:
            continue
        if ans.key not in answer_key:
            raise ConfigError(f"test question {tuple(ans.key)} has no entry in the answer key")
        tests += 1
        if ans.chosen_class in answer_key[ans.key]:
            correct += 1
        else:
            failed.append(ans.key)
    return HitDecision(response.hit_id, response.worker_id, correct >= required_correct,
                       correct, tests, tuple(failed))


def reconcile(accepted: Iterable[HitResponse]) -> tuple[list[CuratedTag], list[Conflict]]:
    """Majority vote per token over non-test answers of accepted HITs.

    Keys whose top vote is shared by two or more classes are dropped and
    returned as conflicts. Tags come back sorted by key.
    """
    votes: dict[TokenKey, Counter] = defaultdict(Counter)
    for resp in accepted:
        for ans in resp.answers:
            if not ans.is_test:
                votes[ans.key][ans.chosen_class] += 1
    tags, conflicts = [], []
    for key in sorted(votes):
        ranked = votes[key].most_common()
        top = ranked[0][1]
        winners = [c for c, n in ranked if n == top]
        if len(winners) > 1:
            conflicts.append(Conflict(key, tuple(sorted(ranked, key=lambda cn: (-cn[1], cn[0].value)))))
        else:
            tags.append(CuratedTag(*key, winners[0]))
    return tags, conflicts


def curation_stats(tags: Sequence[CuratedTag]) -> dict:
    """Class counts plus the fraction of putative verbs confirmed as verbs."""
    counts = Counter(t.gold_class for t in tags)
    total = len(tags)
    return {
        "total": total,
        "patents": len({t.patent_id for t in tags}),
        "segments": len({t.segment_key for t in tags}),
        "counts": {c.value: counts.get(c, 0) for c in CoarseClass},
        "verb_fraction": counts.get(CoarseClass.VERB, 0) / total if total else 0.0,
    }


# ---- file formats -------------------------------------------------------

def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "y", "t"):
        return True
    if t in ("0", "false", "no", "n", "f", ""):
        return False
    raise ValueError(f"bad boolean {text!r}")


def read_responses(path, segments: Mapping[SegmentKey, Segment] | None = None) -> list[HitResponse]:
    """Read the normalised raw-response TSV.

    Columns: worker_id, patent_id, claim_index, segment_index, token_index,
    chosen_class, is_test, and an optional hit_id. Rows without a hit_id are
    grouped into one HIT per worker. When ``segments`` is given, token
    indices are checked against segment lengths.
    """
    hits: dict[str, HitResponse] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) not in (7, 8):
                raise ParseError(f"responses: expected 7 or 8 fields, got {len(parts)}", line=lineno)
            try:
                key = TokenKey(parts[1], int(parts[2]), int(parts[3]), int(parts[4]))
                cls = CoarseClass.parse(parts[5])
                is_test = _parse_bool(parts[6])
            except ValueError as e:
                raise ParseError(f"responses: {e}", line=lineno) from None
            if segments is not None:
                seg = segments.get(key.segment_key)
                if seg is None:
                    raise ParseError(f"responses: unknown segment {tuple(key.segment_key)}", line=lineno)
                if not 0 <= key.token_index < len(seg.tokens):
                    raise ParseError(f"responses: token index {key.token_index} out of range", line=lineno)
            worker = parts[0]
            hit_id = parts[7] if len(parts) == 8 and parts[7] else worker
            resp = hits.setdefault(hit_id, HitResponse(hit_id, worker))
            if resp.worker_id != worker:
                raise ParseError(f"responses: HIT {hit_id} has several workers", line=lineno)
            resp.answers.append(HitAnswer(key, cls, is_test))
    return list(hits.values())


def read_answer_key(path) -> dict[TokenKey, frozenset]:
    """Columns: patent_id, claim_index, segment_index, token_index, then a
    comma-separated list of acceptable classes."""
    key = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ParseError(f"answer key: expected 5 fields, got {len(parts)}", line=lineno)
            try:
                k = TokenKey(parts[0], int(parts[1]), int(parts[2]), int(parts[3]))
                classes = frozenset(CoarseClass.parse(c) for c in parts[4].split(",") if c.strip())
            except ValueError as e:
                raise ParseError(f"answer key: {e}", line=lineno) from None
            if not classes:
                raise ParseError("answer key: no acceptable classes", line=lineno)
            if k in key:
                raise ParseError(f"answer key: duplicate entry {tuple(k)}", line=lineno)
            key[k] = classes
    return key


def write_curated(path, tags: Iterable[CuratedTag], segments: Mapping[SegmentKey, Sequence[str]]) -> int:
    """Write one line per tag: patent_id, claim_index, segment_index,
    space-joined tokens, token_index, gold_class."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for t in tags:
            toks = segments.get(t.segment_key)
            if toks is None:
                raise DataError(f"no segment text for {tuple(t.segment_key)}")
            toks = getattr(toks, "tokens", toks)
            if not 0 <= t.token_index < len(toks):
                raise DataError(f"token index {t.token_index} out of range for {tuple(t.segment_key)}")
            f.write(f"{t.patent_id}\t{t.claim_index}\t{t.segment_index}\t{' '.join(toks)}\t"
                    f"{t.token_index}\t{t.gold_class.value}\n")
            n += 1
    return n


def read_curated(path) -> tuple[list[CuratedTag], dict[SegmentKey, tuple[str, ...]]]:
    tags = []
    segments: dict[SegmentKey, tuple[str, ...]] = {}
    seen = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 6:
                raise ParseError(f"curated: expected 6 fields, got {len(parts)}", line=lineno)
            try:
                tag = CuratedTag(parts[0], int(parts[1]), int(parts[2]), int(parts[4]),
                                 CoarseClass.parse(parts[5]))
            except ValueError as e:
                raise ParseError(f"curated: {e}", line=lineno) from None
            toks = tuple(parts[3].split())
            if not toks or not 0 <= tag.token_index < len(toks):
                raise ParseError(f"curated: token index {tag.token_index} out of range", line=lineno)
            prev = segments.setdefault(tag.segment_key, toks)
            if prev != toks:
                raise ParseError(f"curated: segment {tuple(tag.segment_key)} has inconsistent text", line=lineno)
            if tag.key in seen:
                raise ParseError(f"curated: duplicate record {tuple(tag.key)}", line=lineno)
            seen.add(tag.key)
            tags.append(tag)
    return tags, segments
