"""Command line tools for patent claim tag correction and evaluation."""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import load_patents, read_segments, segment_corpus, split_by_patent, write_segments
from .curation import (curation_stats, read_answer_key, read_curated, read_responses, reconcile,
                       validate_hit, write_curated)
from .embed import DEFAULT_DIM, load_embeddings, pseudo_embeddings
from .errors import ClaimfixError
from .evalx import (classification_experiment, classify_reports_tsv, compare_systems, load_recipes,
                    tag_reports_table, tag_reports_tsv, tree_experiment, tree_table_text, tree_table_tsv)
from .features import fit_vocab, save_vocab, termize, transform
from .pipeline import (build_training_set, check_compatible, correct_batch, export_constraints,
                       read_dependencies)
from .rules import default_rules, load_rules
from .svm import TrainConfig, accuracy, load_model, save_model, train
from .tagset import read_tagged_file, write_tagged_file
from .treebank import load_trees

log = logging.getLogger("claimfix")

FORMATS = """\
file formats (UTF-8, tab-separated unless noted):
  patents.jsonl   {"patent_id": "US123", "claims": ["A valve, comprising: a body."], "abstract": "...", "label": "714/748"}
  segments        US123<TAB>0<TAB>1<TAB>comprising
  responses       worker7<TAB>US123<TAB>0<TAB>2<TAB>1<TAB>Noun<TAB>0[<TAB>hit_id]
  answer key      US999<TAB>0<TAB>0<TAB>3<TAB>Noun,Adjective
  curated         US123<TAB>0<TAB>2<TAB>said valve closes<TAB>0<TAB>Adjective
  tagged          US123<TAB>0<TAB>2<TAB>said/VBD valve/NN closes/VBZ   (or bare slash-tagged text)
  embeddings      "2 3" header, then "valve 0.1 -0.2 0.3" (space-separated)
  rules           said<TAB>Adjective<TAB>JJ
  trees           (ROOT (NP (JJ said) (NN valve)))   one per line
  dependencies    nsubj(closes-3, valve-2)   "# US123" lines name the patent that follows
  recipes.json    [{"name": "claim-trigrams", "blocks": [{"mode": "trigram", "source": "claims"}]}]
"""


class UsageError(Exception):
    pass


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(output, args, inputs, counts) -> Path:
    out = Path(output)
    target = out / "run.manifest.json" if out.is_dir() else out.with_name(out.name + ".manifest.json")
    manifest = {
        "command": args.command,
        "arguments": {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
                      if k not in ("func",)},
        "inputs": {str(p): _sha256(p) for p in inputs if p is not None and Path(p).is_file()},
        "seed": getattr(args, "seed", None),
        "versions": {"claimfix": __version__, "numpy": np.__version__, "python": platform.python_version()},
        "counts": counts,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
    }
    target.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return target


def _require(*paths):
    for p in paths:
        if p is not None and not Path(p).exists():
            raise UsageError(f"input not found: {p}")


def _rules(args):
    return load_rules(args.rules) if args.rules else default_rules()


def _store(args, words=()):
    if args.embeddings:
        return load_embeddings(args.embeddings)
    log.warning("no --embeddings given; using hash-based pseudo-embeddings (dim %d)", args.dim)
    return pseudo_embeddings(words, args.dim, args.embed_seed)


def _svm_cfg(args) -> TrainConfig:
    return TrainConfig(C=args.C, epochs=args.epochs, seed=args.seed)


# ---- subcommands ----------------------------------------------------------

def cmd_segment(args):
    _require(args.input)
    docs = load_patents(args.input)
    segs = segment_corpus(docs)
    n = write_segments(args.out, segs)
    write_manifest(args.out, args, [args.input], {"patents": len(docs), "segments": n})
    print(f"wrote {n} segments from {len(docs)} patents to {args.out}")


def cmd_curate(args):
    _require(args.raw, args.key, args.segments)
    segments = {s.key: s for s in read_segments(args.segments)}
    responses = read_responses(args.raw, segments)
    key = read_answer_key(args.key)
    decisions = [validate_hit(r, key, args.required_correct) for r in responses]
    accepted = [r for r, d in zip(responses, decisions) if d.accepted]
    tags, conflicts = reconcile(accepted)
    n = write_curated(args.out, tags, segments)
    hits_path = Path(str(args.out) + ".hits.tsv")
    with open(hits_path, "w", encoding="utf-8") as f:
        f.write("hit_id\tworker_id\taccepted\tcorrect\ttests\tfailed\n")
        for d in decisions:
            failed = ",".join(":".join(map(str, k)) for k in d.failed)
            f.write(f"{d.hit_id}\t{d.worker_id}\t{int(d.accepted)}\t{d.correct}\t{d.tests}\t{failed}\n")
    conflicts_path = Path(str(args.out) + ".conflicts.tsv")
    with open(conflicts_path, "w", encoding="utf-8") as f:
        f.write("patent_id\tclaim_index\tsegment_index\ttoken_index\tvotes\n")
        for c in conflicts:
            votes = ",".join(f"{cls.value}:{n}" for cls, n in c.votes)
            f.write("\t".join(map(str, c.key)) + f"\t{votes}\n")
    counts = {"hits": len(decisions), "accepted": len(accepted), "tags": n, "conflicts": len(conflicts)}
    write_manifest(args.out, args, [args.raw, args.key, args.segments], counts)
    print(f"accepted {len(accepted)}/{len(decisions)} HITs; wrote {n} curated tags, "
          f"{len(conflicts)} ties dropped (see {conflicts_path})")


def _train_corrector(tags, segments, rules, store, cfg):
    ts = build_training_set(tags, segments, rules, store)
    if len(set(ts.y)) < 2:
        raise ClaimfixError("training data needs at least two gold classes after exclusions")
    return train(ts.X, ts.y, cfg), ts


def _curated_words(segments):
    return {w for toks in segments.values() for w in toks}


def cmd_train_corrector(args):
    _require(args.curated, args.embeddings, args.rules)
    tags, segments = read_curated(args.curated)
    rules = _rules(args)
    store = _store(args, _curated_words(segments))
    model, ts = _train_corrector(tags, segments, rules, store, _svm_cfg(args))
    save_model(args.model, model)
    acc = accuracy(model, ts.X, ts.y)
    counts = {"examples": len(ts.y), "excluded_rule": ts.excluded["rule"],
              "excluded_other": ts.excluded["other"], "train_accuracy": acc}
    write_manifest(args.model, args, [args.curated, args.embeddings, args.rules], counts)
    print(f"trained on {len(ts.y)} examples (training accuracy {acc:.4f}); model written to {args.model}")


def cmd_correct(args):
    _require(args.tagged, args.model, args.embeddings, args.rules)
    tagged = [seg for _, seg in read_tagged_file(args.tagged)]
    model = load_model(args.model)
    store = _store(args, {w for s in tagged for w in s.tokens})
    check_compatible(model, store)
    batch = correct_batch(tagged, _rules(args), model, store, repeat=args.repeat,
                          putative_only_rules=args.rules_putative_only)
    out = Path(args.out_dir)
    manifest = export_constraints(batch, out, force_all=args.force_all_tags)
    write_tagged_file(out / "corrected.tagged", (seg for seg, _ in batch))
    n_changed = 0
    with open(out / "corrections.tsv", "w", encoding="utf-8") as f:
        f.write("patent_id\tclaim_index\tsegment_index\ttoken_index\told\tnew\tsource\tpredicted\n")
        for seg, records in batch:
            for r in records:
                n_changed += r.changed
                pred = r.predicted.value if r.predicted else ""
                f.write("\t".join(map(str, r.key)) + f"\t{r.token_index}\t{r.old_tag}\t{r.new_tag}\t{r.source}\t{pred}\n")
    write_manifest(out, args, [args.tagged, args.model, args.embeddings, args.rules],
                   {"segments": len(batch), "changed_tags": n_changed})
    print(f"corrected {len(batch)} segments ({n_changed} tags changed); constraints listed in {manifest}")


def cmd_eval_tags(args):
    _require(args.curated, args.test_curated, args.embeddings, args.rules)
    tags, segments = read_curated(args.curated)
    if args.test_curated:
        train_tags = tags
        test_tags, test_segments = read_curated(args.test_curated)
        segments = {**segments, **test_segments}
    else:
        train_tags, test_tags = split_by_patent(tags, args.train_fraction, args.seed)
    rules = _rules(args)
    store = _store(args, _curated_words(segments))
    model, ts = _train_corrector(train_tags, segments, rules, store, _svm_cfg(args))
    reports = compare_systems(test_tags, segments, rules, model, store,
                              train_patents={t.patent_id for t in train_tags},
                              allow_overlap=args.allow_overlap)
    Path(args.out).write_text(tag_reports_tsv(reports), encoding="utf-8")
    counts = {"train_records": len(train_tags), "test_records": len(test_tags),
              "train_examples": len(ts.y), **{r.system: r.error for r in reports}}
    write_manifest(args.out, args, [args.curated, args.test_curated, args.embeddings, args.rules], counts)
    print(f"train {len(train_tags)} / test {len(test_tags)} curated tags")
    print(tag_reports_table(reports), end="")


def cmd_eval_trees(args):
    _require(args.original, args.corrector, args.amt)
    scores = tree_experiment(load_trees(args.original), load_trees(args.corrector), load_trees(args.amt))
    Path(args.out).write_text(tree_table_tsv(scores), encoding="utf-8")
    write_manifest(args.out, args, [args.original, args.corrector, args.amt],
                   {k: {"matched": v.matched, "predicted": v.predicted_count, "gold": v.gold_count}
                    for k, v in scores.items()})
    print(tree_table_text(scores), end="")


def cmd_featurize(args):
    _require(args.corpus, args.deps)
    docs = load_patents(args.corpus)
    deps = read_dependencies(args.deps) if args.deps else None
    termdocs = [termize(d, args.mode, args.source, deps) for d in docs]
    vocab = fit_vocab(termdocs)
    with open(args.out, "w", encoding="utf-8") as f:
        for td in termdocs:
            vec = transform(vocab, td)
            f.write(td.doc_id + "\t" + " ".join(f"{i}:{v!r}" for i, v in vec.items()) + "\n")
    if args.vocab_out:
        save_vocab(args.vocab_out, vocab)
    write_manifest(args.out, args, [args.corpus, args.deps], {"documents": len(docs), "vocabulary": len(vocab)})
    print(f"wrote {len(docs)} vectors of width {len(vocab)} to {args.out}")


def _parse_deps_args(items):
    sets = {}
    for item in items or []:
        name, sep, path = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--deps expects NAME=PATH, got {item!r}")
        _require(path)
        sets[name] = read_dependencies(path)
    return sets


def cmd_classify(args):
    _require(args.train, args.test, args.corpus, args.recipes)
    if args.corpus:
        train_docs, test_docs = split_by_patent(load_patents(args.corpus), args.train_fraction, args.seed)
    elif args.train and args.test:
        train_docs, test_docs = load_patents(args.train), load_patents(args.test)
    else:
        raise UsageError("give either --corpus or both --train and --test")
    recipes = load_recipes(args.recipes)
    deps = _parse_deps_args(args.deps)
    reports = classification_experiment(train_docs, test_docs, recipes, deps, _svm_cfg(args))
    Path(args.out).write_text(classify_reports_tsv(reports), encoding="utf-8")
    dep_paths = [item.partition("=")[2] for item in args.deps or []]
    write_manifest(args.out, args, [args.train, args.test, args.corpus, args.recipes, *dep_paths],
                   {"train": len(train_docs), "test": len(test_docs),
                    **{r.recipe: r.error for r in reports}})
    for r in reports:
        print(f"{r.recipe:<30} {100 * r.error:6.3f}%  ({r.misclassified}/{r.total})")


def cmd_stats(args):
    _require(args.curated)
    tags, _ = read_curated(args.curated)
    stats = curation_stats(tags)
    text = json.dumps(stats, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        write_manifest(args.out, args, [args.curated], {"total": stats["total"]})
    print(text, end="")


# ---- parser ---------------------------------------------------------------

def _add_embedding_args(p):
    p.add_argument("--embeddings", type=Path, help="word vectors in text format (header 'count dim')")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM,
                   help="pseudo-embedding dimension when --embeddings is omitted (default %(default)s)")
    p.add_argument("--embed-seed", type=int, default=0, help="pseudo-embedding hash seed")
    p.add_argument("--rules", type=Path, help="rule table TSV (default: built-in table)")


def _add_svm_args(p):
    p.add_argument("--C", type=float, default=1.0, help="SVM regularisation (default %(default)s)")
    p.add_argument("--epochs", type=int, default=20, help="SVM epochs (default %(default)s)")
    p.add_argument("--seed", type=int, default=42, help="random seed (default %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="claimfix", description=__doc__, epilog=FORMATS,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"claimfix {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, epilog=None):
        p = sub.add_parser(name, help=help, description=help, epilog=epilog,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = add("segment", cmd_segment, "split patent claims into punctuation-delimited segments",
            'input line: {"patent_id": "US1", "claims": ["A valve, comprising: a body."]}\n'
            "output line: US1<TAB>0<TAB>1<TAB>comprising")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = add("curate", cmd_curate, "validate HIT responses and reconcile them into curated tags",
            "responses line: worker7<TAB>US1<TAB>0<TAB>2<TAB>1<TAB>Noun<TAB>0[<TAB>hit_id]\n"
            "answer key line: US9<TAB>0<TAB>0<TAB>3<TAB>Noun,Adjective\n"
            "curated line: US1<TAB>0<TAB>2<TAB>said valve closes<TAB>0<TAB>Adjective")
    p.add_argument("--raw", type=Path, required=True)
    p.add_argument("--key", type=Path, required=True)
    p.add_argument("--segments", type=Path, required=True)
    p.add_argument("--required-correct", type=int, default=18)
    p.add_argument("--out", type=Path, required=True)

    p = add("train-corrector", cmd_train_corrector, "train the SVM tag corrector on curated tags",
            "curated line: US1<TAB>0<TAB>2<TAB>said valve closes<TAB>2<TAB>Verb")
    p.add_argument("--curated", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True)
    _add_embedding_args(p)
    _add_svm_args(p)

    p = add("correct", cmd_correct, "correct putative verb tags and emit forced-tag constraints",
            "tagged line: US1<TAB>0<TAB>2<TAB>said/VBD valve/NN closes/VBZ\n"
            "constraint line: 0<TAB>said<TAB>JJ, then '#tagged: said/JJ valve/NN closes/VBZ'")
    p.add_argument("--tagged", type=Path, required=True)
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--force-all-tags", action="store_true",
                   help="emit constraints for every putative verb, not only changed tags")
    p.add_argument("--repeat", type=int, default=1, help="correction rounds (default %(default)s)")
    p.add_argument("--rules-putative-only", action="store_true",
                   help="apply rule table only to putative verbs")
    _add_embedding_args(p)

    p = add("eval-tags", cmd_eval_tags, "compare original, rule-only and rule+SVM tagging on curated data",
            "curated line: US1<TAB>0<TAB>2<TAB>said valve closes<TAB>0<TAB>Adjective")
    p.add_argument("--curated", type=Path, required=True)
    p.add_argument("--test-curated", type=Path,
                   help="separate test file; otherwise --curated is split by patent")
    p.add_argument("--train-fraction", type=float, default=1 / 3)
    p.add_argument("--allow-overlap", action="store_true",
                   help="run even if training and test share patents")
    p.add_argument("--out", type=Path, required=True)
    _add_embedding_args(p)
    _add_svm_args(p)

    p = add("eval-trees", cmd_eval_trees, "labeled precision/recall between three sets of parse trees",
            "tree line: (ROOT (NP (JJ said) (NN valve)))")
    p.add_argument("--original", type=Path, required=True, help="trees from the unmodified parser")
    p.add_argument("--corrector", type=Path, required=True, help="trees with corrector tags forced")
    p.add_argument("--amt", type=Path, required=True, help="trees with crowd tags forced")
    p.add_argument("--out", type=Path, required=True)

    p = add("featurize", cmd_featurize, "TF-IDF vectors for a patent corpus",
            "output line: US1<TAB>0:0.57 3:0.82")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--mode", choices=["bow", "trigram", "dependency"], required=True)
    p.add_argument("--source", choices=["abstract", "claims"], default="claims")
    p.add_argument("--deps", type=Path, help="dependency file for --mode dependency")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--vocab-out", type=Path)

    p = add("classify", cmd_classify, "binary subject classification over TF-IDF recipes",
            'recipes.json: [{"name": "deps", "blocks": [{"mode": "dependency", "source": "claims", '
            '"deps": "corrected"}]}]')
    p.add_argument("--train", type=Path)
    p.add_argument("--test", type=Path)
    p.add_argument("--corpus", type=Path, help="single corpus split by patent instead of --train/--test")
    p.add_argument("--train-fraction", type=float, default=0.5)
    p.add_argument("--recipes", type=Path, required=True)
    p.add_argument("--deps", action="append", metavar="NAME=PATH", help="named dependency file (repeatable)")
    p.add_argument("--out", type=Path, required=True)
    _add_svm_args(p)

    p = add("stats", cmd_stats, "class counts and confirmed-verb fraction of a curated file")
    p.add_argument("--curated", type=Path, required=True)
    p.add_argument("--out", type=Path)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except UsageError as e:
        parser.error(str(e))
    except (ClaimfixError, OSError, ValueError) as e:
        print(f"claimfix {args.command}: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
