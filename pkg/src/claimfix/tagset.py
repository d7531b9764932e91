"""Penn tag handling, coarse classes, slash-tagged I/O and forced-tag constraints."""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .corpus import Segment, SegmentKey
from .errors import ContractError, ParseError


class CoarseClass(str, enum.Enum):
    VERB = "Verb"
    NOUN = "Noun"
    ADJECTIVE = "Adjective"
    ADVERB = "Adverb"
    OTHER = "Other"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, text: str) -> "CoarseClass":
        for member in cls:
            if member.value.lower() == text.strip().lower():
                return member
        raise ValueError(f"unknown coarse class {text!r}")


# Fine tag written when a putative verb is re-tagged to a coarse class.
DEFAULT_FINE = {
    CoarseClass.NOUN: "NN",
    CoarseClass.ADJECTIVE: "JJ",
    CoarseClass.ADVERB: "RB",
}

_NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
_ADJ_TAGS = frozenset({"JJ", "JJR", "JJS"})
_ADV_TAGS = frozenset({"RB", "RBR", "RBS", "WRB"})


def coarse_of(tag: str) -> CoarseClass:
    if tag.startswith("VB"):
        return CoarseClass.VERB
    if tag in _NOUN_TAGS:
        return CoarseClass.NOUN
    if tag in _ADJ_TAGS:
        return CoarseClass.ADJECTIVE
    if tag in _ADV_TAGS:
        return CoarseClass.ADVERB
    return CoarseClass.OTHER


def is_verb_tag(tag: str) -> bool:
    return tag.startswith("VB")


@dataclass(frozen=True)
class TaggedSegment:
    """A segment with one fine tag per token.

    ``putative_verb`` records which positions the baseline tagger labelled
    VB*; it is fixed at creation and survives later re-tagging.
    """

    segment: Segment
    tags: tuple[str, ...]
    putative_verb: tuple[bool, ...]

    def __post_init__(self):
        n = len(self.segment.tokens)
        if len(self.tags) != n or len(self.putative_verb) != n:
            raise ContractError(
                f"tags ({len(self.tags)}) and flags ({len(self.putative_verb)}) must match {n} tokens")
        for tag in self.tags:
            if not tag or any(c.isspace() for c in tag) or "/" in tag:
                raise ContractError(f"invalid fine tag {tag!r}")

    @classmethod
    def from_tags(cls, segment: Segment, tags) -> "TaggedSegment":
        tags = tuple(tags)
        return cls(segment, tags, tuple(is_verb_tag(t) for t in tags))

    @property
    def tokens(self) -> tuple[str, ...]:
        return self.segment.tokens

    @property
    def key(self) -> SegmentKey:
        return self.segment.key

    def with_tag(self, index: int, tag: str) -> "TaggedSegment":
        tags = list(self.tags)
        tags[index] = tag
        return replace(self, tags=tuple(tags))


@dataclass(frozen=True)
class CorrectionRecord:
    key: SegmentKey
    token_index: int
    old_tag: str
    new_tag: str
    source: str  # "rule" or "svm"
    predicted: CoarseClass | None = None

    @property
    def changed(self) -> bool:
        return self.old_tag != self.new_tag


def apply_correction(seg: TaggedSegment, index: int, target: CoarseClass,
                     rules: Mapping | None = None) -> TaggedSegment:
    """Re-tag one putative verb to ``target``.

    Verb keeps the current fine tag. Other classes get NN/JJ/RB unless the
    rule table lists the token with a finer tag for that same class
    (wherein -> WRB).
    """
    if not 0 <= index < len(seg.tags):
        raise ContractError(f"index {index} out of range for {len(seg.tags)} tokens")
    if not seg.putative_verb[index]:
        raise ContractError(f"token {index} ({seg.tokens[index]!r}) is not a putative verb")
    target = CoarseClass(target)
    if target is CoarseClass.OTHER:
        raise ContractError("cannot correct a tag to class Other")
    if target is CoarseClass.VERB:
        return seg
    if rules is None:
        from .rules import default_rules
        rules = default_rules()
    entry = rules.get(seg.tokens[index].lower())
    if entry is not None and entry[0] is target:
        fine = entry[1]
    else:
        fine = DEFAULT_FINE[target]
    return seg.with_tag(index, fine)


def _escape(word: str) -> str:
    return word.replace("/", "\\/")


def parse_slash_tagged(text: str, key: SegmentKey | None = None) -> TaggedSegment:
    """Read ``word/TAG word/TAG ...``; slashes inside words are written ``\\/``."""
    key = SegmentKey(*key) if key is not None else SegmentKey("", 0, 0)
    words, tags = [], []
    for i, item in enumerate(text.split()):
        cut = item.rfind("/")
        if cut <= 0 or item[cut - 1] == "\\" or cut == len(item) - 1:
            raise ParseError(f"expected word/TAG, got {item!r}", token=i)
        words.append(item[:cut].replace("\\/", "/"))
        tags.append(item[cut + 1:])
    if not words:
        raise ParseError("empty tagged segment", token=0)
    return TaggedSegment.from_tags(Segment(key.patent_id, key.claim_index, key.segment_index, tuple(words)), tags)


def render_slash_tagged(seg: TaggedSegment) -> str:
    return " ".join(f"{_escape(w)}/{t}" for w, t in zip(seg.tokens, seg.tags))


def read_tagged_file(path) -> list[tuple[int, TaggedSegment]]:
    """One segment per line, either bare slash-tagged text or prefixed by
    ``patent_id<TAB>claim_index<TAB>segment_index<TAB>``.

    Bare lines get the key ``("", 0, n)`` with n counting segments from 0.
    """
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            try:
                if len(parts) == 4:
                    key = SegmentKey(parts[0], int(parts[1]), int(parts[2]))
                    text = parts[3]
                elif len(parts) == 1:
                    key = SegmentKey("", 0, len(out))
                    text = parts[0]
                else:
                    raise ParseError(f"expected 1 or 4 tab-separated fields, got {len(parts)}")
                out.append((lineno, parse_slash_tagged(text, key)))
            except ParseError as e:
                raise ParseError(f"tagged: {e}", line=lineno) from None
            except ValueError as e:
                raise ParseError(f"tagged: {e}", line=lineno) from None
    return out


def write_tagged_file(path, segments: Iterable[TaggedSegment]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for seg in segments:
            k = seg.key
            f.write(f"{k.patent_id}\t{k.claim_index}\t{k.segment_index}\t{render_slash_tagged(seg)}\n")


TAGGED_PREFIX = "#tagged: "


def emit_constraints(seg: TaggedSegment, corrections: Iterable[tuple[int, str]]) -> str:
    """Render forced-tag constraints for one segment.

    One ``index<TAB>token<TAB>tag`` line per corrected position in index
    order, then a ``#tagged:`` line with the whole segment in slash-tagged
    form (corrections applied) for parsers that take pre-tagged input.
    """
    corrections = list(corrections)
    seen = set()
    for index, tag in corrections:
        if index in seen:
            raise ContractError(f"duplicate correction for token {index}")
        if not 0 <= index < len(seg.tokens):
            raise ContractError(f"correction index {index} out of range")
        seen.add(index)
    forced = seg
    lines = []
    for index, tag in sorted(corrections):
        lines.append(f"{index}\t{seg.tokens[index]}\t{tag}")
        forced = forced.with_tag(index, tag)
    lines.append(TAGGED_PREFIX + render_slash_tagged(forced))
    return "\n".join(lines) + "\n"
