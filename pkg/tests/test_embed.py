import numpy as np
import pytest
from hypothesis import given, strategies as st

from claimfix.embed import EmbeddingStore, load_embeddings, pseudo_embeddings, save_embeddings, triplicate_features
from claimfix.errors import ContractError, ParseError


@pytest.fixture
def store():
    return EmbeddingStore({"a": [1.0, 2.0], "b": [3.0, 4.0], "c": [5.0, 6.0]}, 2)


def test_load_basic(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("2 3\na 1 0 0\nb 0 1 0\n")
    s = load_embeddings(p)
    assert s.dim == 3 and len(s) == 2
    assert list(s.get("b")) == [0, 1, 0]


@pytest.mark.parametrize("text,line", [
    ("2 3\na 1 0 0\nb 0 1\n", 3),
    ("2 3\na 1 0 0\na 0 1 0\n", 3),
    ("3 3\na 1 0 0\nb 0 1 0\n", 3),
    ("2 3\na 1 0 x\nb 0 1 0\n", 2),
    ("two 3\n", 1),
])
def test_load_errors(tmp_path, text, line):
    p = tmp_path / "e.txt"
    p.write_text(text)
    with pytest.raises(ParseError) as exc:
        load_embeddings(p)
    assert exc.value.line == line


def test_save_load_round_trip(tmp_path):
    s = pseudo_embeddings(["valve", "closes"], dim=5)
    p = tmp_path / "e.txt"
    save_embeddings(p, s)
    t = load_embeddings(p)
    for w in s.words():
        assert np.array_equal(s.get(w), t.get(w))


def test_lookup_lowercases(store):
    assert np.array_equal(store.vector("A"), [1.0, 2.0])
    assert store.get("zzz") is None
    assert not store.vector("zzz").any()


def test_triplicate_middle(store):
    assert list(triplicate_features(store, ["a", "b", "c"], 1)) == [1, 2, 3, 4, 5, 6]


def test_triplicate_left_pad(store):
    assert list(triplicate_features(store, ["a", "b", "c"], 0)) == [0, 0, 1, 2, 3, 4]


def test_triplicate_right_pad(store):
    assert list(triplicate_features(store, ["a", "b", "c"], 2)) == [3, 4, 5, 6, 0, 0]


def test_triplicate_oov_center(store):
    assert list(triplicate_features(store, ["a", "zz", "c"], 1)) == [1, 2, 0, 0, 5, 6]


def test_triplicate_index_error(store):
    with pytest.raises(ContractError):
        triplicate_features(store, ["a"], 1)
    with pytest.raises(ContractError):
        triplicate_features(store, ["a"], -1)


vocab = ["a", "b", "c", "d", "A", "zz"]


@given(st.lists(st.sampled_from(vocab), min_size=1, max_size=10), st.data())
def test_triplicate_properties(tokens, data):
    s = EmbeddingStore({"a": [1.0, 0.5], "b": [0.0, 2.0], "c": [3.0, 1.0], "d": [-1.0, -1.0]}, 2)
    i = data.draw(st.integers(0, len(tokens) - 1))
    f = triplicate_features(s, tokens, i)
    assert f.shape == (6,)
    assert np.array_equal(f, triplicate_features(s, list(tokens), i))
    shuffled = list(tokens)
    outside = [j for j in range(len(tokens)) if abs(j - i) > 1]
    perm = data.draw(st.permutations([tokens[j] for j in outside]))
    for j, w in zip(outside, perm):
        shuffled[j] = w
    assert np.array_equal(f, triplicate_features(s, shuffled, i))


def test_pseudo_embeddings_deterministic():
    a = pseudo_embeddings(["Valve", "closes"], dim=7, seed=3)
    b = pseudo_embeddings(["closes", "valve"], dim=7, seed=3)
    assert np.array_equal(a.get("valve"), b.get("VALVE"))
    assert np.isclose(np.linalg.norm(a.get("closes")), 1.0)
    c = pseudo_embeddings(["valve"], dim=7, seed=4)
    assert not np.array_equal(a.get("valve"), c.get("valve"))
