"""Constituency trees in bracketed notation and labeled bracket scoring."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import DataError, ParseError


@dataclass(frozen=True)
class ParseTree:
    """A tree node. Leaves have no children and carry ``word``; for a leaf
    ``label`` equals the word."""

    label: str
    children: tuple["ParseTree", ...] = ()
    word: str | None = None

    @classmethod
    def leaf(cls, word: str) -> "ParseTree":
        return cls(word, (), word)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def is_preterminal(self) -> bool:
        return len(self.children) == 1 and self.children[0].is_leaf

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.word]
        out = []
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node.word)
            else:
                stack.extend(reversed(node.children))
        return out

    def pos_tags(self) -> list[tuple[str, str]]:
        """(word, tag) for every preterminal, left to right."""
        out = []

        def walk(node):
            if node.is_preterminal:
                out.append((node.children[0].word, node.label))
            else:
                for c in node.children:
                    walk(c)

        walk(self)
        return out

    def __str__(self):
        return render_bracketed(self)


class Constituent(NamedTuple):
    label: str
    start: int
    finish: int


_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")


def parse_bracketed(text: str) -> ParseTree:
    """Parse ``(LABEL child ...)`` where leaves are bare tokens."""
    tokens = [(m.group(), m.start()) for m in _TOKEN_RE.finditer(text)]
    end = len(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, end)

    def node():
        nonlocal pos
        tok, off = peek()
        if tok != "(":
            raise ParseError("expected '('", offset=off)
        pos += 1
        label, off = peek()
        if label is None or label in "()":
            raise ParseError("missing node label", offset=off)
        pos += 1
        children = []
        while True:
            tok, off = peek()
            if tok is None:
                raise ParseError("unbalanced parentheses: unexpected end of input", offset=off)
            if tok == ")":
                pos += 1
                break
            if tok == "(":
                children.append(node())
            else:
                children.append(ParseTree.leaf(tok))
                pos += 1
        if not children:
            raise ParseError(f"node {label!r} has no children", offset=off)
        return ParseTree(label, tuple(children))

    tree = node()
    if pos != len(tokens):
        raise ParseError("trailing text after tree", offset=tokens[pos][1])
    return tree


def render_bracketed(tree: ParseTree) -> str:
    if tree.is_leaf:
        return tree.word
    return "(" + tree.label + " " + " ".join(render_bracketed(c) for c in tree.children) + ")"


def load_trees(path) -> list[ParseTree]:
    """One bracketed tree per line; blank lines are skipped."""
    trees = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                trees.append(parse_bracketed(line))
            except ParseError as e:
                raise ParseError(f"tree: {e}", line=lineno) from None
    return trees


def write_trees(path, trees: Iterable[ParseTree]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for t in trees:
            f.write(render_bracketed(t) + "\n")


def extract_constituents(tree: ParseTree) -> Counter:
    """Multiset of (label, start, finish) over internal non-preterminal nodes.

    Positions are 1-based leaf indices, inclusive.
    """
    result = Counter()

    def walk(node, start):
        # returns the index of the last leaf covered
        if node.is_leaf:
            return start
        i = start
        for child in node.children:
            i = walk(child, i) + 1
        finish = i - 1
        if not node.is_preterminal:
            result[Constituent(node.label, start, finish)] += 1
        return finish

    if not tree.is_leaf:
        walk(tree, 1)
    return result


@dataclass(frozen=True)
class TreeScore:
    matched: int
    predicted_count: int
    gold_count: int

    @property
    def precision(self) -> float:
        if self.predicted_count == 0:
            return 1.0 if self.matched == 0 else 0.0
        return self.matched / self.predicted_count

    @property
    def recall(self) -> float:
        if self.gold_count == 0:
            return 1.0 if self.matched == 0 else 0.0
        return self.matched / self.gold_count

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)

    def __add__(self, other: "TreeScore") -> "TreeScore":
        return TreeScore(self.matched + other.matched,
                         self.predicted_count + other.predicted_count,
                         self.gold_count + other.gold_count)


def score_trees(predicted: ParseTree, gold: ParseTree) -> TreeScore:
    if predicted.leaves() != gold.leaves():
        raise DataError("trees cover different word sequences")
    p = extract_constituents(predicted)
    g = extract_constituents(gold)
    return TreeScore(sum((p & g).values()), sum(p.values()), sum(g.values()))


def score_corpus(pairs: Sequence[tuple[ParseTree, ParseTree]]) -> TreeScore:
    """Micro-averaged score: counts are summed over pairs before dividing."""
    total = TreeScore(0, 0, 0)
    for i, (pred, gold) in enumerate(pairs):
        try:
            total = total + score_trees(pred, gold)
        except DataError as e:
            raise DataError(f"pair {i}: {e}") from None
    return total
