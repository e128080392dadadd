"""Feature selection, linear SMO classifiers, leave-one-out evaluation and LDA projection."""
from __future__ import annotations

import itertools
import json
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import RT, SS, SW
from .experiment import FeatureMatrix, standardize, study_dataset
from .netmeasure.record import MeasurementRecord

log = logging.getLogger(__name__)

REAL, SHUFFLED = "REAL", "SHUFFLED"
C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


class FeatureSelectionWarning(UserWarning):
    pass


def _gap_ranking(matrix: FeatureMatrix, other: str) -> list[int]:
    gap = np.abs(matrix.rows_of(RT).mean(axis=0) - matrix.rows_of(other).mean(axis=0))
    return sorted(range(len(gap)), key=lambda j: (-gap[j], j))


def select_features(matrix: FeatureMatrix, top: int = 10) -> list[str]:
    """Features among the ``top`` RT-vs-SS and the ``top`` RT-vs-SW mean gaps.

    The intersection is ordered by summed rank. An empty intersection falls
    back to the union of both top-5 lists.
    """
    for kind in (RT, SW, SS):
        if kind not in matrix.kinds:
            raise ValueError(f"feature selection needs {kind} rows")
    rank_ss = _gap_ranking(matrix, SS)
    rank_sw = _gap_ranking(matrix, SW)
    pos_ss = {j: r for r, j in enumerate(rank_ss)}
    pos_sw = {j: r for r, j in enumerate(rank_sw)}
    chosen = set(rank_ss[:top]) & set(rank_sw[:top])
    if not chosen:
        warnings.warn("top feature lists are disjoint; using the union of both top-5 lists",
                      FeatureSelectionWarning, stacklevel=2)
        chosen = set(rank_ss[:5]) | set(rank_sw[:5])
    ordered = sorted(chosen, key=lambda j: (pos_ss[j] + pos_sw[j], j))
    return [matrix.names[j] for j in ordered]


@dataclass
class BinarySVM:
    """Linear soft-margin SVM; label ``+1`` is ``positive``, ``-1`` is ``negative``."""

    positive: str
    negative: str
    w: np.ndarray
    b: float
    C: float
    alpha: np.ndarray = field(repr=False)
    support_vectors: np.ndarray = field(repr=False)
    support_coef: np.ndarray = field(repr=False)
    iterations: int = 0

    def decision(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.w + self.b


def smo_train(x: np.ndarray, y: np.ndarray, C: float = 1.0, tol: float = 1e-3,
              max_iter: int = 100_000) -> tuple[np.ndarray, float, int]:
    """Solve the linear-kernel SVM dual with SMO.

    The working pair is the maximal KKT violating pair (ties go to the lowest
    index). Stops when the violation drops below ``tol``. Returns
    ``(alpha, b, iterations)``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    k = x @ x.T
    q = (y[:, None] * y[None, :]) * k
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 0.5 a'Qa - e'a
    eps = 1e-12
    it = 0
    for it in range(1, max_iter + 1):
        yg = -y * grad
        up = ((y > 0) & (alpha < C - eps)) | ((y < 0) & (alpha > eps))
        low = ((y > 0) & (alpha > eps)) | ((y < 0) & (alpha < C - eps))
        if not up.any() or not low.any():
            break
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        if yg[i] - yg[j] < tol:
            break
        # move along y_i d_i = -y_j d_j
        curv = k[i, i] + k[j, j] - 2 * k[i, j]
        if curv <= 0:
            curv = 1e-12
        step = (yg[i] - yg[j]) / curv
        # box limits for the step on alpha_i (direction y_i) and alpha_j (direction -y_j)
        lim_i = C - alpha[i] if y[i] > 0 else alpha[i]
        lim_j = alpha[j] if y[j] > 0 else C - alpha[j]
        step = min(step, lim_i, lim_j)
        di = y[i] * step
        dj = -y[j] * step
        alpha[i] += di
        alpha[j] += dj
        grad += q[:, i] * di + q[:, j] * dj
        alpha[i] = min(max(alpha[i], 0.0), C)
        alpha[j] = min(max(alpha[j], 0.0), C)
    else:
        warnings.warn(f"SMO stopped at max_iter={max_iter}", RuntimeWarning, stacklevel=2)
    yg = -y * grad
    free = (alpha > eps) & (alpha < C - eps)
    if free.any():
        b = float(np.mean(yg[free]))
    else:
        up = ((y > 0) & (alpha < C - eps)) | ((y < 0) & (alpha > eps))
        low = ((y > 0) & (alpha > eps)) | ((y < 0) & (alpha < C - eps))
        hi = yg[up].max() if up.any() else yg[low].min()
        lo = yg[low].min() if low.any() else yg[up].max()
        b = float((hi + lo) / 2)
    return alpha, b, it


def dual_objective(x: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> float:
    v = (alpha * y) @ np.asarray(x, dtype=float)
    return float(0.5 * v @ v - alpha.sum())


def fit_binary(x: np.ndarray, labels: Sequence[str], positive: str, negative: str,
               C: float = 1.0, tol: float = 1e-3) -> BinarySVM:
    labels = np.asarray(labels)
    y = np.where(labels == positive, 1.0, -1.0)
    alpha, b, it = smo_train(x, y, C=C, tol=tol)
    sv = alpha > 1e-12
    coef = alpha[sv] * y[sv]
    w = coef @ np.asarray(x, dtype=float)[sv] if sv.any() else np.zeros(np.shape(x)[1])
    return BinarySVM(positive, negative, w, b, C, alpha, np.asarray(x)[sv], coef, it)


@dataclass
class MarginModel:
    """One-vs-one set of linear SVMs over ``classes``."""

    classes: tuple[str, ...]
    machines: list[BinarySVM]
    C: float
    kernel: str = "linear"

    @property
    def n_features(self) -> int:
        return len(self.machines[0].w)

    def votes(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-class vote counts and aggregate margins, shape ``(n, n_classes)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        idx = {c: i for i, c in enumerate(self.classes)}
        votes = np.zeros((len(x), len(self.classes)))
        margins = np.zeros_like(votes)
        for m in self.machines:
            d = m.decision(x)
            p, q = idx[m.positive], idx[m.negative]
            votes[:, p] += d >= 0
            votes[:, q] += d < 0
            margins[:, p] += d
            margins[:, q] -= d
        return votes, margins

    def predict(self, x: np.ndarray) -> list[str]:
        votes, margins = self.votes(x)
        out = []
        for v, m in zip(votes, margins):
            top = np.flatnonzero(v == v.max())
            out.append(self.classes[top[np.argmax(m[top])]])
        return out


def train(x: np.ndarray, labels: Sequence[str], C: float = 1.0, tol: float = 1e-3) -> MarginModel:
    """Train a linear SVM (one-vs-one when there are more than two classes)."""
    labels = [str(l) for l in labels]
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError("training needs at least two classes")
    x = np.asarray(x, dtype=float)
    arr = np.asarray(labels)
    machines = []
    for a, b in itertools.combinations(classes, 2):
        mask = (arr == a) | (arr == b)
        machines.append(fit_binary(x[mask], arr[mask], a, b, C=C, tol=tol))
    return MarginModel(classes, machines, C)


@dataclass
class EvalReport:
    classes: tuple[str, ...]
    confusion: np.ndarray  # rows: true class, columns: predicted class
    predictions: list[str]
    C: float | list[float] = 1.0

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion) / self.confusion.sum())

    @property
    def true_positive_rate(self) -> dict[str, float]:
        rows = self.confusion.sum(axis=1)
        return {c: float(self.confusion[i, i] / rows[i]) if rows[i] else float("nan")
                for i, c in enumerate(self.classes)}

    @property
    def false_negative_rate(self) -> dict[str, float]:
        return {c: 1.0 - v for c, v in self.true_positive_rate.items()}

    @property
    def false_positive_rate(self) -> dict[str, float]:
        cm = self.confusion
        out = {}
        for i, c in enumerate(self.classes):
            negatives = cm.sum() - cm[i].sum()
            out[c] = float((cm[:, i].sum() - cm[i, i]) / negatives) if negatives else float("nan")
        return out

    def to_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "accuracy": self.accuracy,
            "samples": self.total,
            "true_positive_rate": self.true_positive_rate,
            "false_negative_rate": self.false_negative_rate,
            "false_positive_rate": self.false_positive_rate,
            "confusion_matrix": self.confusion.astype(int).tolist(),
            "C": self.C,
        }


def select_C(x: np.ndarray, labels: Sequence[str], grid: Sequence[float] = C_GRID) -> float:
    """Regularization constant with the best inner leave-one-out accuracy (first wins ties)."""
    best, best_acc = grid[0], -1.0
    for C in grid:
        acc = loo_cv(x, labels, C=C).accuracy
        if acc > best_acc:
            best, best_acc = C, acc
    return best


def loo_cv(x: np.ndarray, labels: Sequence[str], C: float | str = 1.0,
           grid: Sequence[float] = C_GRID) -> EvalReport:
    """Leave-one-out evaluation. ``C="grid"`` picks C per fold by nested LOO."""
    x = np.asarray(x, dtype=float)
    labels = [str(l) for l in labels]
    n = len(labels)
    if n < 3:
        raise ValueError("leave-one-out needs at least three samples")
    classes = tuple(sorted(set(labels)))
    idx = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=int)
    preds, chosen = [], []
    for i in range(n):
        keep = np.arange(n) != i
        train_labels = [l for l, k in zip(labels, keep) if k]
        c_i = select_C(x[keep], train_labels, grid) if C == "grid" else float(C)
        chosen.append(c_i)
        model = train(x[keep], train_labels, C=c_i)
        pred = model.predict(x[i:i + 1])[0]
        preds.append(pred)
        cm[idx[labels[i]], idx[pred]] += 1
    if C == "grid":
        log.info("nested LOO chose C values %s", sorted(set(chosen)))
    return EvalReport(classes, cm, preds, chosen if C == "grid" else float(C))


def lda_project(x: np.ndarray, labels: Sequence[str], positive: str | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
    """Fisher discriminant projection of two classes onto one axis.

    Returns ``(projections, w)`` with ``w`` pointing from the negative class
    mean to the ``positive`` class mean; projections are centered on the
    pooled mean.
    """
    x = np.asarray(x, dtype=float)
    labels = np.asarray([str(l) for l in labels])
    classes = sorted(set(labels.tolist()))
    if len(classes) != 2:
        raise ValueError("LDA projection needs exactly two classes")
    positive = positive or classes[1]
    negative = classes[0] if positive == classes[1] else classes[1]
    a, b = x[labels == positive], x[labels == negative]
    if len(a) < 2 or len(b) < 2:
        raise ValueError("each class needs at least two samples")
    diff = a.mean(axis=0) - b.mean(axis=0)
    if np.linalg.norm(diff) <= 1e-12 * max(1.0, np.abs(x).max()):
        raise ValueError("degenerate projection: identical class means")
    sw = (a - a.mean(axis=0)).T @ (a - a.mean(axis=0)) + (b - b.mean(axis=0)).T @ (b - b.mean(axis=0))
    d = sw.shape[0]
    if np.linalg.matrix_rank(sw) < d:
        eps = 1e-8 * np.trace(sw) / d
        sw = sw + (eps if eps > 0 else 1e-8) * np.eye(d)
    w = np.linalg.solve(sw, diff)
    return (x - x.mean(axis=0)) @ w, w


@dataclass
class TrainedClassifier:
    """A model bundled with its feature subset and standardization parameters."""

    model: MarginModel
    features: list[str]
    means: np.ndarray
    stds: np.ndarray
    training_samples: int = 0

    def transform(self, values: np.ndarray, names: Sequence[str]) -> np.ndarray:
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[1] != len(names):
            raise ValueError(f"expected {len(names)} raw features, got {values.shape[1]}")
        cols = [list(names).index(f) for f in self.features]
        safe = np.where(self.stds > 0, self.stds, 1.0)
        return np.where(self.stds > 0, (values[:, cols] - self.means) / safe, 0.0)

    def to_dict(self) -> dict:
        return {
            "kernel": self.model.kernel,
            "C": self.model.C,
            "classes": list(self.model.classes),
            "features": list(self.features),
            "standardization": {"mean": self.means.tolist(), "std": self.stds.tolist()},
            "training_samples": self.training_samples,
            "machines": [
                {
                    "positive": m.positive,
                    "negative": m.negative,
                    "weights": m.w.tolist(),
                    "bias": m.b,
                    "support_vectors": m.support_vectors.tolist(),
                    "support_coefficients": m.support_coef.tolist(),
                }
                for m in self.model.machines
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrainedClassifier":
        if data.get("kernel", "linear") != "linear":
            raise ValueError(f"unsupported kernel {data.get('kernel')!r}")
        machines = []
        for m in data["machines"]:
            sv = np.asarray(m["support_vectors"], dtype=float).reshape(-1, len(data["features"]))
            coef = np.asarray(m["support_coefficients"], dtype=float)
            machines.append(BinarySVM(m["positive"], m["negative"], np.asarray(m["weights"]),
                                      float(m["bias"]), float(data["C"]), np.abs(coef), sv, coef))
        model = MarginModel(tuple(data["classes"]), machines, float(data["C"]))
        std = data["standardization"]
        return cls(model, list(data["features"]), np.asarray(std["mean"], dtype=float),
                   np.asarray(std["std"], dtype=float), int(data.get("training_samples", 0)))

    def save(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TrainedClassifier":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def classify_unknown(clf: TrainedClassifier, values: np.ndarray, names: Sequence[str]) -> list[dict]:
    """Verdicts for raw feature rows (standardized with the training parameters)."""
    x = clf.transform(values, names)
    votes, margins = clf.model.votes(x)
    labels = clf.model.predict(x)
    out = []
    for label, v, m in zip(labels, votes, margins):
        out.append({
            "label": label,
            "votes": dict(zip(clf.model.classes, v.tolist())),
            "margins": dict(zip(clf.model.classes, m.tolist())),
        })
    return out


def binary_labels(kinds: Sequence[str]) -> list[str]:
    """SW and SS merge into a single SHUFFLED class."""
    return [REAL if k == RT else SHUFFLED for k in kinds]


@dataclass
class Study:
    """Everything the classification experiment derives from one corpus."""

    records: list[MeasurementRecord]
    matrix: FeatureMatrix  # standardized balanced dataset
    features: list[str]
    reports: dict[str, EvalReport]
    projection: np.ndarray
    classifier: TrainedClassifier

    def columns(self, names: Sequence[str]) -> np.ndarray:
        return self.matrix.values[:, [self.matrix.names.index(f) for f in names]]


def run_study(records: Sequence[MeasurementRecord], C: float | str = 1.0, replicates: int = 1,
              grid: Sequence[float] = C_GRID) -> Study:
    """Feature selection, LOO reports, LDA projection and a final binary model.

    Works on the balanced dataset (RT plus the first ``replicates`` SW and
    SS replicates of each document), standardized over that dataset.
    """
    rows = study_dataset(records, replicates)
    matrix = standardize(FeatureMatrix.from_records(rows), on_constant="zero")
    features = select_features(matrix)
    kinds = list(matrix.kinds)
    binary = binary_labels(kinds)
    cols = lambda names: matrix.values[:, [matrix.names.index(f) for f in names]]
    x = cols(features)
    reports = {
        "three_class": loo_cv(x, kinds, C=C, grid=grid),
        "binary": loo_cv(x, binary, C=C, grid=grid),
        "binary_q_only": loo_cv(cols(["Q"]), binary, C=C, grid=grid),
    }
    projection, _ = lda_project(x, binary, positive=REAL)
    if C == "grid":
        C = select_C(x, binary, grid)
        log.info("grid search chose C=%s for the final model", C)
    model = train(x, binary, C=float(C))
    j = [matrix.names.index(f) for f in features]
    trained = TrainedClassifier(model, features, matrix.means[j], matrix.stds[j], len(rows))
    return Study(rows, matrix, features, reports, projection, trained)
