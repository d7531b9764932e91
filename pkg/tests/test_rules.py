import pytest
from hypothesis import given, strategies as st

from claimfix.corpus import Segment
from claimfix.errors import ParseError
from claimfix.rules import default_rules, load_rules, rule_correct, write_rules
from claimfix.tagset import CoarseClass, TaggedSegment, coarse_of, parse_slash_tagged, render_slash_tagged


def test_default_table_exact():
    C = CoarseClass
    assert default_rules() == {
        "said": (C.ADJECTIVE, "JJ"), "means": (C.NOUN, "NN"), "claim": (C.NOUN, "NN"),
        "predetermined": (C.ADJECTIVE, "JJ"), "wherein": (C.ADVERB, "WRB"),
        "according": (C.ADVERB, "RB"),
    }


def test_table_entries_consistent():
    for word, (coarse, fine) in default_rules().items():
        assert word == word.lower()
        assert coarse_of(fine) is coarse


def test_lookups():
    t = default_rules()
    assert t["said"][1] == "JJ"
    assert t["according"][1] == "RB"
    assert "valve" not in t


def correct(text):
    seg, recs = rule_correct(parse_slash_tagged(text), default_rules())
    return render_slash_tagged(seg), recs


def test_said_fixed():
    out, recs = correct("said/VBD housing/NN")
    assert out == "said/JJ housing/NN"
    assert [(r.token_index, r.old_tag, r.new_tag, r.source) for r in recs] == [(0, "VBD", "JJ", "rule")]


def test_already_correct_untouched():
    assert correct("said/JJ housing/NN") == ("said/JJ housing/NN", [])


def test_claim_fixed():
    assert correct("claim/VB 1/CD")[0] == "claim/NN 1/CD"


def test_case_insensitive():
    assert correct("Said/VBD valve/NN")[0] == "Said/JJ valve/NN"
    assert correct("WHEREIN/VBZ")[0] == "WHEREIN/WRB"


def test_fires_on_non_verbs_unless_restricted():
    seg = parse_slash_tagged("means/NNS said/IN")
    out, recs = rule_correct(seg, default_rules())
    assert out.tags == ("NNS", "JJ")  # NNS is already a noun
    out, recs = rule_correct(seg, default_rules(), putative_only=True)
    assert out == seg and recs == []


token = st.sampled_from(["said", "Said", "means", "claim", "predetermined", "wherein", "According",
                         "valve", "the", "closes", "1"])
tag = st.sampled_from(["VB", "VBD", "VBZ", "VBN", "NN", "NNS", "JJ", "RB", "WRB", "DT", "IN", "CD"])


@given(st.lists(st.tuples(token, tag), min_size=1, max_size=10))
def test_rule_properties(pairs):
    table = default_rules()
    seg = TaggedSegment.from_tags(Segment("P", 0, 0, tuple(w for w, _ in pairs)), [t for _, t in pairs])
    once, recs = rule_correct(seg, table)
    twice, recs2 = rule_correct(once, table)
    assert twice == once and recs2 == []
    changed = [i for i in range(len(pairs)) if once.tags[i] != seg.tags[i]]
    assert [r.token_index for r in recs] == changed
    for i, (w, _) in enumerate(pairs):
        if w.lower() not in table:
            assert once.tags[i] == seg.tags[i]
        else:
            assert coarse_of(once.tags[i]) is table[w.lower()][0]


def test_rules_tsv_round_trip(tmp_path):
    path = tmp_path / "rules.tsv"
    write_rules(path, default_rules())
    assert load_rules(path) == default_rules()


def test_rules_tsv_errors(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("# comment\nsaid\tAdjective\tNN\n")
    with pytest.raises(ParseError, match="line 2"):
        load_rules(path)
    path.write_text("said\tAdjective\n")
    with pytest.raises(ParseError, match="line 1"):
        load_rules(path)
    path.write_text("Said\tadjective\tJJ\nsaid\tAdjective\tJJ\n")
    with pytest.raises(ParseError, match="duplicate"):
        load_rules(path)


def test_extended_table(tmp_path):
    path = tmp_path / "rules.tsv"
    path.write_text("Plurality\tNoun\tNN\n")
    assert load_rules(path) == {"plurality": (CoarseClass.NOUN, "NN")}
