"""Fixed word-to-tag corrections applied before the learned corrector."""

from __future__ import annotations

from typing import Dict, Tuple

from .errors import ParseError
from .tagset import CoarseClass, CorrectionRecord, TaggedSegment, coarse_of

RuleTable = Dict[str, Tuple[CoarseClass, str]]

_DEFAULT = (
    ("said", CoarseClass.ADJECTIVE, "JJ"),
    ("means", CoarseClass.NOUN, "NN"),
    ("claim", CoarseClass.NOUN, "NN"),
    ("predetermined", CoarseClass.ADJECTIVE, "JJ"),
    ("wherein", CoarseClass.ADVERB, "WRB"),
    ("according", CoarseClass.ADVERB, "RB"),
)


def default_rules() -> RuleTable:
    return {word: (coarse, fine) for word, coarse, fine in _DEFAULT}


def _check_entry(word, coarse, fine):
    # WRB refines Adverb, so coarse_of(fine) must agree with the declared class.
    if coarse_of(fine) is not coarse:
        raise ValueError(f"rule {word!r}: tag {fine} is not a {coarse.value}")


def load_rules(path) -> RuleTable:
    """Read a ``word<TAB>coarse<TAB>fine`` table; ``#`` starts a comment line."""
    table: RuleTable = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"rules: expected 3 fields, got {len(parts)}", line=lineno)
            word, coarse, fine = parts[0].strip().lower(), parts[1], parts[2].strip()
            try:
                coarse = CoarseClass.parse(coarse)
                _check_entry(word, coarse, fine)
            except ValueError as e:
                raise ParseError(f"rules: {e}", line=lineno) from None
            if word in table:
                raise ParseError(f"rules: duplicate word {word!r}", line=lineno)
            table[word] = (coarse, fine)
    return table


def write_rules(path, table: RuleTable) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for word, (coarse, fine) in table.items():
            f.write(f"{word}\t{coarse.value}\t{fine}\n")


def rule_correct(seg: TaggedSegment, table: RuleTable, putative_only: bool = False):
    """Force table tags onto every token whose word is in ``table``.

    A position changes only when its current coarse class differs from the
    table's. With ``putative_only`` the rules fire on putative verbs alone.
    Returns the new segment and one record per changed position.
    """
    records = []
    for i, tok in enumerate(seg.tokens):
        entry = table.get(tok.lower())
        if entry is None or (putative_only and not seg.putative_verb[i]):
            continue
        coarse, fine = entry
        old = seg.tags[i]
        if coarse_of(old) is coarse:
            continue
        seg = seg.with_tag(i, fine)
        records.append(CorrectionRecord(seg.key, i, old, fine, "rule", coarse))
    return seg, records
