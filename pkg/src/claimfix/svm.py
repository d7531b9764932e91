"""Multiclass linear SVM: one-vs-rest hinge loss, stochastic subgradient training."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ContractError, ParseError, TrainingError

FORMAT_VERSION = "claimfix-linear-model 1"
SCHEDULES = ("pegasos",)
FORMULATIONS = ("ovr",)


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    epochs: int = 20
    seed: int = 0
    schedule: str = "pegasos"
    formulation: str = "ovr"

    def __post_init__(self):
        if not self.C > 0:
            raise ContractError(f"C must be positive, got {self.C}")
        if self.epochs < 1:
            raise ContractError(f"epochs must be >= 1, got {self.epochs}")
        if self.schedule not in SCHEDULES:
            raise ContractError(f"unknown learning-rate schedule {self.schedule!r}")
        if self.formulation not in FORMULATIONS:
            raise ContractError(f"unknown multiclass formulation {self.formulation!r}")


@dataclass(frozen=True, eq=False)
class LinearModel:
    labels: tuple[str, ...]
    W: np.ndarray
    b: np.ndarray
    feature_dimension: int = field(init=False)

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if len(self.labels) < 2:
            raise ContractError("a model needs at least two classes")
        if W.ndim != 2 or W.shape[0] != len(self.labels) or b.shape != (len(self.labels),):
            raise ContractError(f"inconsistent shapes: W {W.shape}, b {b.shape}, {len(self.labels)} labels")
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "feature_dimension", W.shape[1])

    def __eq__(self, other):
        if not isinstance(other, LinearModel):
            return NotImplemented
        return (self.labels == other.labels and np.array_equal(self.W, other.W)
                and np.array_equal(self.b, other.b))

    def scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.feature_dimension:
            raise ContractError(f"expected {self.feature_dimension} features, got {X.shape[-1]}")
        return X @ self.W.T + self.b

    def predict_many(self, X) -> list[str]:
        S = np.atleast_2d(self.scores(X))
        return [self._argmax(row) for row in S]

    def _argmax(self, scores) -> str:
        best = scores.max()
        return min(lab for lab, s in zip(self.labels, scores) if s == best)


def predict(model: LinearModel, x) -> tuple[str, np.ndarray]:
    """Highest-scoring label and the score vector; ties go to the
    lexicographically smallest label."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractError("predict expects a single feature vector")
    s = model.scores(x)
    return model._argmax(s), s


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, np.ndarray):
        if X.ndim != 2:
            raise TrainingError("X must be two-dimensional")
        return X.astype(float)
    rows = [np.asarray(x, dtype=float).ravel() for x in X]
    if not rows:
        raise TrainingError("no training examples")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise TrainingError(f"feature vectors have differing lengths {sorted(widths)}")
    return np.vstack(rows)


def train(X, y: Sequence, cfg: TrainConfig | None = None) -> LinearModel:
    """Fit one binary L2-regularised hinge classifier per class.

    Pegasos updates with regularisation 1/(C n); the bias is learned as the
    weight of a constant feature. Features are centred and divided by their
    RMS distance to the mean before training, and the weights are mapped back
    afterwards, so the penalty applies in that normalised space.
    Deterministic given ``cfg.seed``.
    """
    cfg = cfg or TrainConfig()
    X = _as_matrix(X)
    y = [str(v) for v in y]
    n, d = X.shape
    if len(y) != n:
        raise TrainingError(f"{n} feature vectors but {len(y)} labels")
    if n < 2:
        raise TrainingError("need at least two training examples")
    labels = tuple(sorted(set(y)))
    if len(labels) < 2:
        raise TrainingError(f"need at least two classes, got {labels}")
    k = len(labels)
    col = {lab: i for i, lab in enumerate(labels)}
    Y = -np.ones((n, k))
    Y[np.arange(n), [col[v] for v in y]] = 1.0

    mu = X.mean(axis=0)
    scale = float(np.sqrt(((X - mu) ** 2).sum(axis=1).mean())) or 1.0
    Xa = np.hstack([(X - mu) / scale, np.ones((n, 1))])
    lam = 1.0 / (cfg.C * n)
    radius = 1.0 / np.sqrt(lam)
    Wa = np.zeros((k, d + 1))
    rng = np.random.default_rng(cfg.seed)
    t = 0
    for _ in range(cfg.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            x, yi = Xa[i], Y[i]
            viol = yi * (Wa @ x) < 1.0
            Wa *= 1.0 - eta * lam
            if viol.any():
                Wa[viol] += eta * np.outer(yi[viol], x)
            norms = np.linalg.norm(Wa, axis=1)
            over = norms > radius
            if over.any():
                Wa[over] *= (radius / norms[over])[:, None]
    W = Wa[:, :d] / scale
    return LinearModel(labels, W, Wa[:, d] - W @ mu)


def accuracy(model: LinearModel, X, y) -> float:
    pred = model.predict_many(_as_matrix(X))
    return sum(p == str(t) for p, t in zip(pred, y)) / len(pred)


def save_model(path, model: LinearModel) -> None:
    if not str(path):
        raise FileNotFoundError("empty model path")
    with open(path, "w", encoding="utf-8") as f:
        f.write(FORMAT_VERSION + "\n")
        f.write(f"{len(model.labels)} {model.feature_dimension}\n")
        for lab in model.labels:
            f.write(lab + "\n")
        for row in model.W:
            f.write(" ".join(repr(float(v)) for v in row) + "\n")
        f.write(" ".join(repr(float(v)) for v in model.b) + "\n")


def load_model(path) -> LinearModel:
    if not str(path):
        raise FileNotFoundError("empty model path")
    with open(path, encoding="utf-8") as f:
        lines = f.read().split("\n")
    if not lines or lines[0] != FORMAT_VERSION:
        raise ParseError(f"not a model file (expected header {FORMAT_VERSION!r})", line=1)
    try:
        k, d = (int(v) for v in lines[1].split())
    except (ValueError, IndexError):
        raise ParseError("bad class/dimension header", line=2) from None
    if k < 2 or d < 0:
        raise ParseError("bad class/dimension header", line=2)
    body = lines[2:]
    if len(body) < 2 * k + 1:
        raise ParseError("model file is truncated", line=len(lines))
    labels = body[:k]

    def row(i, width):
        lineno = i + 3
        vals = body[i].split()
        if len(vals) != width:
            raise ParseError(f"expected {width} values, got {len(vals)}", line=lineno)
        try:
            return [float(v) for v in vals]
        except ValueError:
            raise ParseError("non-numeric weight", line=lineno) from None

    W = np.array([row(k + j, d) for j in range(k)]).reshape(k, d)
    b = np.array(row(2 * k, k))
    return LinearModel(tuple(labels), W, b)
