import itertools
import random

import pytest
from hypothesis import given, strategies as st

from claimfix.corpus import Segment
from claimfix.curation import (CuratedTag, HitAnswer, HitResponse, TokenKey, curation_stats, read_answer_key,
                               read_curated, read_responses, reconcile, validate_hit, write_curated)
from claimfix.errors import ConfigError, DataError, ParseError
from claimfix.tagset import CoarseClass

C = CoarseClass
CLASSES = list(CoarseClass)


def tkey(n):
    return TokenKey("T", 0, n, 0)


def make_hit(n_tests, n_correct, hit_id="h1"):
    key = {tkey(i): frozenset({C.NOUN}) for i in range(n_tests)}
    answers = [HitAnswer(tkey(i), C.NOUN if i < n_correct else C.VERB, True) for i in range(n_tests)]
    answers.append(HitAnswer(TokenKey("P", 0, 0, 1), C.ADJECTIVE, False))
    return HitResponse(hit_id, "w1", answers), key


def test_accept_at_18_of_20():
    hit, key = make_hit(20, 18)
    d = validate_hit(hit, key, 18)
    assert d.accepted and d.correct == 18 and d.tests == 20
    assert d.failed == (tkey(18), tkey(19))


def test_reject_at_17_of_20():
    hit, key = make_hit(20, 17)
    d = validate_hit(hit, key, 18)
    assert not d.accepted and len(d.failed) == 3


def test_vacuous_threshold():
    hit, key = make_hit(0, 0)
    assert validate_hit(hit, key, 0).accepted


def test_several_acceptable_answers():
    hit = HitResponse("h", "w", [HitAnswer(tkey(0), C.ADJECTIVE, True)])
    assert validate_hit(hit, {tkey(0): frozenset({C.NOUN, C.ADJECTIVE})}, 1).accepted


def test_missing_key_entry():
    hit, key = make_hit(3, 3)
    del key[tkey(1)]
    with pytest.raises(ConfigError):
        validate_hit(hit, key, 1)


@given(st.lists(st.booleans(), max_size=25), st.integers(0, 25))
def test_monotone(correctness, required):
    key = {tkey(i): frozenset({C.NOUN}) for i in range(len(correctness) + 1)}
    answers = [HitAnswer(tkey(i), C.NOUN if ok else C.VERB, True) for i, ok in enumerate(correctness)]
    before = validate_hit(HitResponse("h", "w", answers), key, required)
    extra = answers + [HitAnswer(tkey(len(correctness)), C.NOUN, True)]
    after = validate_hit(HitResponse("h", "w", extra), key, required)
    assert after.correct == before.correct + 1
    assert not (before.accepted and not after.accepted)


def resp(*classes, key=TokenKey("S", 0, 0, 3)):
    return [HitResponse(f"h{i}", f"w{i}", [HitAnswer(key, c)]) for i, c in enumerate(classes)]


def test_reconcile_singleton():
    tags, conflicts = reconcile(resp(C.NOUN))
    assert tags == [CuratedTag("S", 0, 0, 3, C.NOUN)] and conflicts == []


def test_reconcile_majority():
    tags, _ = reconcile(resp(C.NOUN, C.NOUN, C.ADJECTIVE))
    assert tags[0].gold_class is C.NOUN


def test_reconcile_tie_dropped():
    tags, conflicts = reconcile(resp(C.NOUN, C.ADJECTIVE))
    assert tags == []
    assert conflicts[0].key == TokenKey("S", 0, 0, 3)
    assert dict(conflicts[0].votes) == {C.NOUN: 1, C.ADJECTIVE: 1}


@pytest.mark.parametrize("a,b", list(itertools.product(CLASSES, repeat=2)))
def test_reconcile_all_two_answer_cases(a, b):
    tags, conflicts = reconcile(resp(a, b))
    if a is b:
        assert [t.gold_class for t in tags] == [a] and not conflicts
    else:
        assert tags == [] and len(conflicts) == 1


def test_reconcile_excludes_test_answers():
    r = HitResponse("h", "w", [HitAnswer(TokenKey("T", 0, 0, 0), C.NOUN, True),
                               HitAnswer(TokenKey("P", 0, 0, 0), C.VERB, False)])
    tags, _ = reconcile([r])
    assert [t.patent_id for t in tags] == ["P"]


answer = st.tuples(st.sampled_from(["P1", "P2"]), st.integers(0, 2), st.integers(0, 3),
                   st.sampled_from(CLASSES), st.booleans())


@given(st.lists(st.lists(answer, min_size=1, max_size=8), max_size=6))
def test_reconcile_properties(hits):
    responses = [HitResponse(f"h{i}", f"w{i}", [HitAnswer(TokenKey(p, 0, s, t), c, test)
                                                for p, s, t, c, test in answers])
                 for i, answers in enumerate(hits)]
    tags, conflicts = reconcile(responses)
    keys = [t.key for t in tags]
    assert len(keys) == len(set(keys))
    non_test = {a.key for r in responses for a in r.answers if not a.is_test}
    assert set(keys) | {c.key for c in conflicts} == non_test
    assert len(tags) <= len(non_test)


def random_curated(n, seed):
    rng = random.Random(seed)
    segments, tags, seen = {}, [], set()
    vocab = ["said", "valve", "closes", "the", "a", "claim", "1", "means", "for", "xé"]
    while len(tags) < n:
        key = (f"US{rng.randint(0, 40)}", rng.randint(0, 5), rng.randint(0, 5))
        if key not in segments:
            segments[key] = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 12)))
        t = CuratedTag(*key, rng.randrange(len(segments[key])), rng.choice(CLASSES))
        if t.key not in seen:
            seen.add(t.key)
            tags.append(t)
    return tags, segments


def test_curated_round_trip(tmp_path):
    tags, segments = random_curated(1000, 0)
    path = tmp_path / "c.tsv"
    assert write_curated(path, tags, segments) == 1000
    got_tags, got_segments = read_curated(path)
    assert got_tags == tags
    assert got_segments == {k: v for k, v in segments.items() if any(t.segment_key == k for t in tags)}


def test_curated_format(tmp_path):
    path = tmp_path / "c.tsv"
    write_curated(path, [], {})
    assert path.read_text() == ""
    assert read_curated(path) == ([], {})
    write_curated(path, [CuratedTag("P1", 0, 2, 0, C.ADJECTIVE)], {("P1", 0, 2): ("said", "valve")})
    assert path.read_text() == "P1\t0\t2\tsaid valve\t0\tAdjective\n"


def test_curated_write_needs_segment(tmp_path):
    with pytest.raises(DataError):
        write_curated(tmp_path / "c.tsv", [CuratedTag("P1", 0, 2, 0, C.NOUN)], {})
    with pytest.raises(DataError):
        write_curated(tmp_path / "c.tsv", [CuratedTag("P1", 0, 2, 5, C.NOUN)], {("P1", 0, 2): ("a",)})


@pytest.mark.parametrize("bad", ["P1\t0\t2\tsaid valve\t0\n", "P1\t0\tx\tsaid\t0\tNoun\n",
                                 "P1\t0\t2\tsaid\t4\tNoun\n", "P1\t0\t2\tsaid\t0\tPronoun\n"])
def test_curated_malformed_line(tmp_path, bad):
    path = tmp_path / "c.tsv"
    path.write_text("P1\t0\t1\tvalve\t0\tNoun\n" + bad)
    with pytest.raises(ParseError, match="line 2"):
        read_curated(path)


def test_read_responses_and_key(tmp_path):
    raw = tmp_path / "raw.tsv"
    raw.write_text("w1\tP1\t0\t0\t1\tNoun\t0\n"
                   "w1\tT1\t0\t0\t0\tadjective\t1\n"
                   "w2\tP1\t0\t0\t1\tNoun\tfalse\thitB\n")
    segs = {("P1", 0, 0): Segment("P1", 0, 0, ("the", "support")), ("T1", 0, 0): Segment("T1", 0, 0, ("x",))}
    hits = read_responses(raw, segs)
    assert [(h.hit_id, h.worker_id, len(h.answers)) for h in hits] == [("w1", "w1", 2), ("hitB", "w2", 1)]
    assert hits[0].answers[1] == HitAnswer(TokenKey("T1", 0, 0, 0), C.ADJECTIVE, True)
    raw.write_text("w1\tP1\t0\t0\t7\tNoun\t0\n")
    with pytest.raises(ParseError, match="line 1"):
        read_responses(raw, segs)
    keyf = tmp_path / "key.tsv"
    keyf.write_text("T1\t0\t0\t0\tNoun,Adjective\n")
    assert read_answer_key(keyf) == {TokenKey("T1", 0, 0, 0): frozenset({C.NOUN, C.ADJECTIVE})}


def test_stats_verb_fraction():
    tags = [CuratedTag("P", 0, 0, i, c) for i, c in enumerate([C.VERB] * 69 + [C.NOUN] * 31)]
    s = curation_stats(tags)
    assert s["verb_fraction"] == pytest.approx(0.69)
    assert s["counts"]["Noun"] == 31 and s["total"] == 100
