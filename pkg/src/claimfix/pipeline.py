"""Two-stage tag correction (rules, then SVM) and the parser file bridge."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .corpus import Segment, SegmentKey
from .curation import CuratedTag
from .embed import EmbeddingStore, triplicate_features
from .errors import ConfigError, DataError, ParseError
from .rules import RuleTable, rule_correct
from .svm import LinearModel, predict
from .tagset import (CoarseClass, CorrectionRecord, TaggedSegment, apply_correction,
                     emit_constraints, read_tagged_file)
from .treebank import parse_bracketed

SVM_CLASSES = (CoarseClass.ADJECTIVE, CoarseClass.ADVERB, CoarseClass.NOUN, CoarseClass.VERB)


def check_compatible(model: LinearModel, store: EmbeddingStore) -> None:
    if model.feature_dimension != 3 * store.dim:
        raise ConfigError(f"model expects {model.feature_dimension} features but embeddings "
                          f"give 3 x {store.dim} = {3 * store.dim}")


def correct_segment(tagged: TaggedSegment, rules: RuleTable, model: LinearModel,
                    store: EmbeddingStore, putative_only_rules: bool = False):
    """Run the rule corrector, then let the SVM decide every remaining
    putative verb whose word is not in the rule table."""
    check_compatible(model, store)
    seg, records = rule_correct(tagged, rules, putative_only=putative_only_rules)
    for i, tok in enumerate(seg.tokens):
        if not seg.putative_verb[i] or tok.lower() in rules:
            continue
        label, _ = predict(model, triplicate_features(store, seg.tokens, i))
        try:
            target = CoarseClass.parse(label)
        except ValueError:
            raise ConfigError(f"model label {label!r} is not a coarse class") from None
        old = seg.tags[i]
        if target is not CoarseClass.OTHER:
            seg = apply_correction(seg, i, target, rules)
        records.append(CorrectionRecord(seg.key, i, old, seg.tags[i], "svm", target))
    records.sort(key=lambda r: r.token_index)
    return seg, records


def correct_batch(segments: Iterable[TaggedSegment], rules: RuleTable, model: LinearModel,
                  store: EmbeddingStore, repeat: int = 1, putative_only_rules: bool = False):
    """Correct every segment ``repeat`` times; output is ordered by segment key."""
    out = []
    for seg in sorted(segments, key=lambda s: s.key):
        records = []
        for _ in range(max(repeat, 1)):
            seg, recs = correct_segment(seg, rules, model, store, putative_only_rules)
            records.extend(recs)
        out.append((seg, records))
    return out


@dataclass
class TrainingSet:
    X: np.ndarray
    y: list[str]
    keys: list = field(default_factory=list)
    excluded: Counter = field(default_factory=Counter)


def build_training_set(curated: Sequence[CuratedTag], segments: Mapping[SegmentKey, Sequence[str]],
                       rules: RuleTable, store: EmbeddingStore) -> TrainingSet:
    """Turn curated tags into (triplicate feature, gold class) pairs.

    Tokens covered by the rule table and tags with gold class Other are left
    out; ``excluded`` counts both.
    """
    missing = sorted({tuple(t.segment_key) for t in curated if t.segment_key not in segments})
    if missing:
        raise DataError(f"curated tags reference unknown segments: {missing[:10]}"
                        + (" ..." if len(missing) > 10 else ""))
    rows, y, keys = [], [], []
    excluded = Counter()
    for t in curated:
        toks = segments[t.segment_key]
        toks = getattr(toks, "tokens", toks)
        if toks[t.token_index].lower() in rules:
            excluded["rule"] += 1
            continue
        if t.gold_class is CoarseClass.OTHER:
            excluded["other"] += 1
            continue
        rows.append(triplicate_features(store, toks, t.token_index))
        y.append(t.gold_class.value)
        keys.append(t.key)
    X = np.vstack(rows) if rows else np.zeros((0, 3 * store.dim))
    return TrainingSet(X, y, keys, excluded)


# ---- external parser bridge ---------------------------------------------

class Dependency(NamedTuple):
    relation: str
    governor: str
    governor_index: int
    dependent: str
    dependent_index: int
    line: int = 0


_DEP_RE = re.compile(r"^([^\s(]+)\((.+)-(\d+)'*, (.+)-(\d+)'*\)$")


def parse_dependency(line: str, lineno: int = 0) -> Dependency:
    """Parse ``rel(governor-i, dependent-j)``."""
    m = _DEP_RE.match(line.strip())
    if not m:
        raise ParseError(f"dependencies: malformed line {line.strip()!r}", line=lineno or None)
    rel, gov, gi, dep, di = m.groups()
    return Dependency(rel, gov, int(gi), dep, int(di), lineno)


def read_dependencies(path) -> dict[str, list[Dependency]]:
    """Dependency lines grouped by document.

    A line starting with ``#`` names the document (patent id) for the lines
    that follow; blank lines separate sentences and are otherwise ignored.
    Lines before any ``#`` header belong to the document ``""``.
    """
    docs: dict[str, list[Dependency]] = {}
    current = ""
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                current = text[1:].strip()
                docs.setdefault(current, [])
                continue
            docs.setdefault(current, []).append(parse_dependency(text, lineno))
    return docs


def import_parser_output(path, kind: str):
    """Read external parser output of kind ``tagged``, ``tree`` or ``dependencies``.

    Returns a list of ``(line_number, record)`` pairs.
    """
    if kind == "tagged":
        return read_tagged_file(path)
    if kind == "tree":
        out = []
        with open(path, encoding="utf-8") as f:
            lines = [(n, ln) for n, ln in enumerate(f, 1) if ln.strip()]
        for n, ln in lines:
            try:
                out.append((n, parse_bracketed(ln)))
            except ParseError as e:
                raise ParseError(f"tree: {e}", line=n) from None
        return out
    if kind == "dependencies":
        out = []
        with open(path, encoding="utf-8") as f:
            for n, ln in enumerate(f, 1):
                if ln.strip() and not ln.lstrip().startswith("#"):
                    out.append((n, parse_dependency(ln, n)))
        return out
    raise ValueError(f"unknown parser output kind {kind!r}")


def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name) or "_"


def corrections_for(seg: TaggedSegment, records: Sequence[CorrectionRecord],
                    force_all: bool = False) -> list[tuple[int, str]]:
    """Positions to force: changed tags, or with ``force_all`` every changed
    tag plus every putative verb."""
    picked = {r.token_index for r in records if r.changed}
    if force_all:
        picked |= {i for i, flag in enumerate(seg.putative_verb) if flag}
    return [(i, seg.tags[i]) for i in sorted(picked)]


def export_constraints(batch: Sequence[tuple[TaggedSegment, Sequence[CorrectionRecord]]], out_dir,
                       force_all: bool = False) -> Path:
    """Write one constraint file per segment plus ``manifest.tsv``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = out_dir / "manifest.tsv"
    seen = set()
    with open(manifest, "w", encoding="utf-8") as mf:
        for seg, records in sorted(batch, key=lambda item: item[0].key):
            k = seg.key
            if k in seen:
                raise DataError(f"duplicate segment key {tuple(k)} in batch")
            seen.add(k)
            name = f"{_safe(k.patent_id)}_{k.claim_index}_{k.segment_index}.constraints.tsv"
            (out_dir / name).write_text(emit_constraints(seg, corrections_for(seg, records, force_all)),
                                        encoding="utf-8")
            mf.write(f"{k.patent_id}\t{k.claim_index}\t{k.segment_index}\t{name}\n")
    return manifest
