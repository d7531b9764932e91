"""Seeded synthetic data shared by the tests."""

import random

import numpy as np

from claimfix.corpus import PatentDoc, Segment
from claimfix.curation import CuratedTag
from claimfix.embed import EmbeddingStore
from claimfix.tagset import CoarseClass, TaggedSegment
from claimfix.treebank import ParseTree

NOUNS = ["support", "display", "control", "drive", "switch", "guide", "seal", "stop",
         "lock", "mount", "feed", "return", "cover", "base", "spring", "clamp"]
ADJECTIVES = ["closed", "fixed", "coupled", "attached", "mounted", "sealed", "locked",
              "rotated", "biased", "threaded", "hinged", "formed"]
ADVERBS = ["thereby", "further", "therein", "thereon", "hereby", "whereby", "thereafter", "hence"]
VERBS = ["closes", "rotates", "moves", "engages", "receives", "transmits", "stores", "opens",
         "holds", "presses", "slides", "turns"]
FILLER = ["the", "a", "an", "of", "to", "first", "second", "valve", "housing", "member",
          "body", "plate", "shaft", "port", "data", "signal", "unit", "and", "is", "in"]

CENTER = {
    CoarseClass.NOUN: NOUNS,
    CoarseClass.ADJECTIVE: ADJECTIVES,
    CoarseClass.ADVERB: ADVERBS,
    CoarseClass.VERB: VERBS,
}
FINE_MISTAG = {
    CoarseClass.NOUN: "VBP",
    CoarseClass.ADJECTIVE: "VBN",
    CoarseClass.ADVERB: "VB",
    CoarseClass.VERB: "VBZ",
}


def clustered_embeddings(dim=12, seed=0, spread=0.3) -> EmbeddingStore:
    """Words of one coarse class sit around a shared centroid; filler words
    are small random vectors."""
    rng = np.random.default_rng(seed)
    vectors = {}
    for k, (cls, words) in enumerate(CENTER.items()):
        centroid = np.zeros(dim)
        centroid[k * (dim // 4):(k + 1) * (dim // 4)] = 2.0
        for w in words:
            vectors[w] = centroid + spread * rng.standard_normal(dim)
    for w in FILLER:
        vectors[w] = 0.2 * rng.standard_normal(dim)
    return EmbeddingStore(vectors, dim)


def planted_segments(n, seed, patent_prefix="P", words_per_class=None):
    """Segments with one planted putative verb each.

    Returns a list of (TaggedSegment, index, gold CoarseClass).
    """
    rng = random.Random(seed)
    classes = list(CENTER)
    out = []
    for i in range(n):
        gold = classes[i % len(classes)]
        pool = CENTER[gold] if words_per_class is None else words_per_class[gold]
        word = rng.choice(pool)
        left = [rng.choice(FILLER) for _ in range(rng.randint(1, 3))]
        right = [rng.choice(FILLER) for _ in range(rng.randint(1, 3))]
        tokens = left + [word] + right
        idx = len(left)
        tags = ["NN"] * len(tokens)
        tags[idx] = FINE_MISTAG[gold]
        seg = Segment(f"{patent_prefix}{i // 5}", i % 5, 0, tuple(tokens))
        out.append((TaggedSegment.from_tags(seg, tags), idx, gold))
    return out


def curated_from_planted(planted):
    tags, segments = [], {}
    for tagged, idx, gold in planted:
        k = tagged.key
        tags.append(CuratedTag(k.patent_id, k.claim_index, k.segment_index, idx, gold))
        segments[k] = tagged.tokens
    return tags, segments


def random_tree(rng: random.Random, n_leaves: int, labels="ABCDE", max_depth=6) -> ParseTree:
    """Random tree over leaves w1..wn with preterminals above every leaf.

    Internal nodes split their span into 1-4 parts, so unary chains occur.
    """
    words = [f"w{i}" for i in range(1, n_leaves + 1)]

    def pre(w):
        return ParseTree(rng.choice(labels).lower(), (ParseTree.leaf(w),))

    def build(ws, depth):
        if depth >= max_depth:
            return ParseTree(rng.choice(labels), tuple(pre(w) for w in ws))
        if len(ws) == 1 and rng.random() < 0.6:
            return pre(ws[0])
        k = rng.randint(1, min(4, len(ws)))
        cuts = sorted(rng.sample(range(1, len(ws)), k - 1))
        bounds = [0] + cuts + [len(ws)]
        return ParseTree(rng.choice(labels),
                         tuple(build(ws[a:b], depth + 1) for a, b in zip(bounds, bounds[1:])))

    return build(words, 0)


CLASS_WORDS = {
    "714/748": ["retransmission", "acknowledgment", "packet", "receiver", "sender", "request",
                "arq", "nack", "frame", "timeout"],
    "714/763": ["memory", "cell", "dram", "address", "ecc", "bank", "row", "column", "refresh", "cache"],
}
SHARED = ["a", "the", "method", "comprising", "error", "data", "bit", "circuit", "first", "second",
          "wherein", "unit", "signal", "code", "and", "of"]


def classification_corpus(n_per_class=20, seed=0):
    """Two-class patents whose claims draw discriminative words from
    disjoint pools plus shared filler; abstracts contain only filler."""
    rng = random.Random(seed)
    docs = []
    for label, words in CLASS_WORDS.items():
        for i in range(n_per_class):
            claims = []
            for _ in range(2):
                toks = [rng.choice(SHARED if rng.random() < 0.5 else words) for _ in range(12)]
                toks[0] = rng.choice(words)
                claims.append(" ".join(toks[:6]) + ", " + " ".join(toks[6:]) + ".")
            abstract = " ".join(rng.choice(SHARED) for _ in range(15)) + "."
            docs.append(PatentDoc(f"{label.replace('/', '-')}-{i}", tuple(claims), abstract, label))
    rng.shuffle(docs)
    return docs
