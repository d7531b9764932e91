"""Experiment harness: tag error rates, tree comparisons, subject classification."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import PatentDoc, Segment, SegmentKey
from .curation import CuratedTag
from .embed import EmbeddingStore
from .errors import ContractError, DataError, ProtocolError
from .features import concat_blocks, fit_vocab, termize, to_dense, transform, MODES, SOURCES
from .pipeline import correct_segment
from .rules import RuleTable, rule_correct
from .svm import LinearModel, TrainConfig, train
from .tagset import CoarseClass, TaggedSegment, coarse_of
from .treebank import ParseTree, TreeScore, score_corpus

SYSTEMS = ("original", "rule-only", "rule+svm")

OTHER_NOTE = "all curated test positions are scored, including those whose gold class is Other"


@dataclass
class TagEvalReport:
    system: str
    total: int
    wrong: int
    confusion: dict = field(default_factory=dict)  # gold -> predicted -> count

    @property
    def error(self) -> float:
        return self.wrong / self.total


def tag_error_rate(predictions: Sequence[CoarseClass], gold: Sequence[CoarseClass],
                   system: str = "") -> TagEvalReport:
    if len(predictions) != len(gold):
        raise ContractError(f"{len(predictions)} predictions for {len(gold)} gold tags")
    if not gold:
        raise ContractError("nothing to evaluate")
    confusion = {g.value: {p.value: 0 for p in CoarseClass} for g in CoarseClass}
    wrong = 0
    for p, g in zip(predictions, gold):
        p, g = CoarseClass(p), CoarseClass(g)
        confusion[g.value][p.value] += 1
        wrong += p is not g
    return TagEvalReport(system, len(gold), wrong, confusion)


def _probe_segment(key: SegmentKey, tokens, positions) -> TaggedSegment:
    # Curated positions were putative verbs; the other tags are unknown and
    # never scored, so a neutral placeholder is enough.
    tags = ["VB" if i in positions else "XX" for i in range(len(tokens))]
    return TaggedSegment.from_tags(Segment(key.patent_id, key.claim_index, key.segment_index, tuple(tokens)), tags)


def compare_systems(test: Sequence[CuratedTag], segments: Mapping[SegmentKey, Sequence[str]],
                    rules: RuleTable, model: LinearModel, store: EmbeddingStore,
                    train_patents=(), allow_overlap: bool = False) -> list[TagEvalReport]:
    """Score the unmodified tagger, the rule corrector and rules+SVM on the
    same curated test positions.

    The unmodified tagger called every curated position a verb.
    """
    overlap = set(train_patents) & {t.patent_id for t in test}
    if overlap and not allow_overlap:
        raise ProtocolError(f"{len(overlap)} patents appear in both training and test data, "
                            f"e.g. {sorted(overlap)[:5]}")
    by_segment = defaultdict(list)
    for t in test:
        if t.segment_key not in segments:
            raise DataError(f"no segment text for {tuple(t.segment_key)}")
        by_segment[t.segment_key].append(t)
    gold, preds = [], {s: [] for s in SYSTEMS}
    for key in sorted(by_segment):
        tags = by_segment[key]
        toks = segments[key]
        toks = getattr(toks, "tokens", toks)
        probe = _probe_segment(key, toks, {t.token_index for t in tags})
        ruled, _ = rule_correct(probe, rules)
        full, _ = correct_segment(probe, rules, model, store)
        for t in tags:
            gold.append(t.gold_class)
            preds["original"].append(coarse_of(probe.tags[t.token_index]))
            preds["rule-only"].append(coarse_of(ruled.tags[t.token_index]))
            preds["rule+svm"].append(coarse_of(full.tags[t.token_index]))
    return [tag_error_rate(preds[s], gold, s) for s in SYSTEMS]


def tag_reports_tsv(reports: Sequence[TagEvalReport]) -> str:
    lines = [f"# {OTHER_NOTE}", "system\ttotal\twrong\terror"]
    for r in reports:
        lines.append(f"{r.system}\t{r.total}\t{r.wrong}\t{r.error:.6f}")
    return "\n".join(lines) + "\n"


def tag_reports_table(reports: Sequence[TagEvalReport]) -> str:
    lines = [f"{'System':<12} {'Error':>8} {'Wrong':>8} {'Total':>8}"]
    for r in reports:
        lines.append(f"{r.system:<12} {100 * r.error:>7.2f}% {r.wrong:>8d} {r.total:>8d}")
    lines.append(f"({OTHER_NOTE})")
    return "\n".join(lines) + "\n"


# ---- parse tree comparison ------------------------------------------------

TREE_COLUMNS = ("original-vs-amt", "corrector-vs-amt", "original-vs-corrector")


def tree_experiment(original: Sequence[ParseTree], corrector: Sequence[ParseTree],
                    amt: Sequence[ParseTree]) -> dict[str, TreeScore]:
    """Labeled bracket scores for the three comparisons: original and
    corrector trees against the crowd-tag trees, and original against
    corrector trees taken as gold."""
    if not len(original) == len(corrector) == len(amt):
        raise DataError(f"tree sets differ in size: {len(original)}, {len(corrector)}, {len(amt)}")
    for i, (a, b, c) in enumerate(zip(original, corrector, amt)):
        if not a.leaves() == b.leaves() == c.leaves():
            raise DataError(f"tree sets cover different segments at position {i}")
    return {
        "original-vs-amt": score_corpus(list(zip(original, amt))),
        "corrector-vs-amt": score_corpus(list(zip(corrector, amt))),
        "original-vs-corrector": score_corpus(list(zip(original, corrector))),
    }


def tree_table_tsv(scores: Mapping[str, TreeScore]) -> str:
    cols = list(scores)
    lines = ["metric\t" + "\t".join(cols)]
    for metric in ("precision", "recall", "f1"):
        lines.append(metric + "\t" + "\t".join(f"{getattr(scores[c], metric):.6f}" for c in cols))
    for metric in ("matched", "predicted_count", "gold_count"):
        lines.append(metric + "\t" + "\t".join(str(getattr(scores[c], metric)) for c in cols))
    return "\n".join(lines) + "\n"


def tree_table_text(scores: Mapping[str, TreeScore]) -> str:
    cols = list(scores)
    w = max(len(c) for c in cols) + 2
    lines = [" " * 5 + "".join(f"{c:>{w}}" for c in cols)]
    for name, metric in (("LP", "precision"), ("LR", "recall"), ("F-1", "f1")):
        lines.append(f"{name:<5}" + "".join(f"{100 * getattr(scores[c], metric):>{w - 1}.2f}%" for c in cols))
    return "\n".join(lines) + "\n"


# ---- subject classification ----------------------------------------------

@dataclass(frozen=True)
class Block:
    mode: str
    source: str
    deps: str | None = None  # name of a dependency set for mode=dependency

    def __post_init__(self):
        if self.mode not in MODES:
            raise ContractError(f"unknown mode {self.mode!r}")
        if self.source not in SOURCES:
            raise ContractError(f"unknown source {self.source!r}")
        if self.mode == "dependency" and not self.deps:
            raise ContractError("dependency blocks must name a dependency set")


@dataclass(frozen=True)
class Recipe:
    name: str
    blocks: tuple[Block, ...]


@dataclass
class ClassifyReport:
    recipe: str
    total: int
    misclassified: int
    width: int = 0

    @property
    def error(self) -> float:
        return self.misclassified / self.total


def load_recipes(path) -> list[Recipe]:
    """JSON list of ``{"name": ..., "blocks": [{"mode", "source", "deps"?}, ...]}``."""
    with open(path, encoding="utf-8") as f:
        raw = json.load(f)
    try:
        return [Recipe(r["name"], tuple(Block(b["mode"], b["source"], b.get("deps")) for b in r["blocks"]))
                for r in raw]
    except (KeyError, TypeError) as e:
        raise DataError(f"malformed recipe file: {e}") from None


def recipes_to_json(recipes: Sequence[Recipe]) -> str:
    return json.dumps([{"name": r.name, "blocks": [
        {k: v for k, v in (("mode", b.mode), ("source", b.source), ("deps", b.deps)) if v is not None}
        for b in r.blocks]} for r in recipes], indent=2)


def _labels(docs: Sequence[PatentDoc]) -> list[str]:
    for d in docs:
        if d.label is None:
            raise DataError(f"patent {d.patent_id} has no label")
    return [d.label for d in docs]


def classification_experiment(train_docs: Sequence[PatentDoc], test_docs: Sequence[PatentDoc],
                              recipes: Sequence[Recipe],
                              dependency_sets: Mapping[str, Mapping[str, Sequence]] | None = None,
                              cfg: TrainConfig | None = None) -> list[ClassifyReport]:
    """Train a binary SVM per recipe on TF-IDF blocks fit on the training
    documents only, and report its test error."""
    y_train, y_test = _labels(train_docs), _labels(test_docs)
    classes = set(y_train) | set(y_test)
    if len(classes) != 2:
        raise DataError(f"expected exactly two labels, got {sorted(classes)}")
    if not test_docs:
        raise DataError("empty test set")
    dependency_sets = dependency_sets or {}
    reports = []
    for recipe in recipes:
        train_blocks, test_blocks = [], []
        for block in recipe.blocks:
            deps = None
            if block.mode == "dependency":
                if block.deps not in dependency_sets:
                    raise DataError(f"recipe {recipe.name}: unknown dependency set {block.deps!r}")
                deps = dependency_sets[block.deps]
            tr = [termize(d, block.mode, block.source, deps) for d in train_docs]
            te = [termize(d, block.mode, block.source, deps) for d in test_docs]
            vocab = fit_vocab(tr)
            train_blocks.append(([transform(vocab, t) for t in tr], len(vocab)))
            test_blocks.append(([transform(vocab, t) for t in te], len(vocab)))

        def assemble(blocks, n):
            rows = [concat_blocks([(vecs[i], w) for vecs, w in blocks]) for i in range(n)]
            width = sum(w for _, w in blocks)
            return to_dense((r for r, _ in rows), width), width

        X_tr, width = assemble(train_blocks, len(train_docs))
        X_te, _ = assemble(test_blocks, len(test_docs))
        model = train(X_tr, y_train, cfg)
        pred = model.predict_many(X_te)
        wrong = sum(p != t for p, t in zip(pred, y_test))
        reports.append(ClassifyReport(recipe.name, len(test_docs), wrong, width))
    return reports


def classify_reports_tsv(reports: Sequence[ClassifyReport]) -> str:
    lines = ["recipe\ttotal\tmisclassified\terror\twidth"]
    for r in reports:
        lines.append(f"{r.recipe}\t{r.total}\t{r.misclassified}\t{r.error:.6f}\t{r.width}")
    return "\n".join(lines) + "\n"
