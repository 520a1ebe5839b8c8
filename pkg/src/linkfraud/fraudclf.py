"""Follower-entropy features and an RBF-kernel SVM trained by SMO.

An account is described by the entropy of each profile attribute over its
followers (not by its own attribute values). Labels are ``fraud`` (the
positive class) and ``genuine``.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .attrstats import ATTRIBUTES, BinningScheme, DEFAULT_BINS, Histogram, attribute_outcome, entropy
from .errors import ConvergenceError, DataError, InsufficientDataError, ParseError, ValidationError
from .graph_store import AccountAttributes, DirectedGraph, NodeId

FEATURE_NAMES = (
    "created_year",
    "default_profile",
    "default_profile_image",
    "favorites",
    "followers",
    "friends",
    "lists",
    "statuses",
    "geo_enabled",
    "lang",
    "protected",
    "utc_offset",
    "verified",
)
_FEATURE_ATTR = dict(zip(FEATURE_NAMES, ATTRIBUTES))
POSITIVE, NEGATIVE = "fraud", "genuine"
MODEL_FORMAT = "linkfraud-svm"
MODEL_VERSION = 1


@dataclass(frozen=True)
class FeatureGroup:
    name: str
    members: tuple

    @property
    def indices(self) -> tuple:
        return tuple(FEATURE_NAMES.index(m) for m in self.members)


_BASE_GROUPS = {
    "Connection": ("followers", "friends"),
    "Activity": ("statuses", "lists", "favorites"),
    "Profile": ("default_profile", "default_profile_image", "verified", "created_year"),
    "Geography": ("lang", "utc_offset"),
}
GROUPS = {name: FeatureGroup(name, m) for name, m in _BASE_GROUPS.items()}
GROUPS["All"] = FeatureGroup(
    "All", tuple(n for n in FEATURE_NAMES if any(n in m for m in _BASE_GROUPS.values()))
)


def feature_group(name: str | FeatureGroup) -> FeatureGroup:
    if isinstance(name, FeatureGroup):
        return name
    try:
        return GROUPS[name]
    except KeyError:
        raise ValidationError(f"unknown feature group {name!r}; expected one of {sorted(GROUPS)}") from None


# -- features -----------------------------------------------------------------


def follower_entropies(
    followers: Sequence[AccountAttributes], scheme: BinningScheme = DEFAULT_BINS
) -> np.ndarray:
    vec = np.zeros(len(FEATURE_NAMES))
    for k, name in enumerate(FEATURE_NAMES):
        attr = _FEATURE_ATTR[name]
        h = Histogram.from_values(attribute_outcome(attr, getattr(f, attr), scheme) for f in followers)
        # an attribute missing for every follower carries no information
        vec[k] = entropy(h) if h.total else 0.0
    return vec


def extract_features(
    account: NodeId,
    g: DirectedGraph,
    attrs: Mapping[NodeId, AccountAttributes],
    scheme: BinningScheme = DEFAULT_BINS,
) -> np.ndarray:
    """Entropy of each of the 13 attributes over ``account``'s followers."""
    followers = [attrs[u] for u in sorted(g.in_neighbors(account)) if u in attrs]
    if len(followers) < 2:
        raise InsufficientDataError(
            f"{account!r} has {len(followers)} attributed follower(s); at least 2 are needed"
        )
    return follower_entropies(followers, scheme)


def feature_matrix(accounts: Sequence[NodeId], g, attrs, scheme: BinningScheme = DEFAULT_BINS) -> np.ndarray:
    if not accounts:
        return np.zeros((0, len(FEATURE_NAMES)))
    return np.vstack([extract_features(a, g, attrs, scheme) for a in accounts])


def write_features(accounts: Sequence[NodeId], X: np.ndarray, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", *FEATURE_NAMES])
        for acc, row in zip(accounts, X):
            w.writerow([acc, *(repr(float(v)) for v in row)])


def load_features(path) -> tuple[list, np.ndarray]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"features file not found: {path}")
    ids, rows = [], []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["account_id", *FEATURE_NAMES]:
            raise ParseError("features header must be account_id followed by the 13 feature names", line=1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=lineno)
            try:
                vals = [float(v) for v in row[1:]]
            except ValueError:
                raise ParseError("non-numeric feature value", line=lineno) from None
            if any(math.isnan(v) for v in vals):
                raise ParseError("NaN feature value", line=lineno)
            ids.append(row[0])
            rows.append(vals)
    X = np.asarray(rows, dtype=float).reshape(len(rows), len(FEATURE_NAMES))
    return ids, X


# -- kernel and SMO -------------------------------------------------------------


def rbf_kernel(x, y, gamma: float) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    d = x - y
    return float(np.exp(-gamma * float(d @ d)))


def rbf_matrix(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return np.exp(-gamma * np.maximum(sq, 0.0))


def _encode(y) -> np.ndarray:
    out = np.empty(len(y))
    for i, lab in enumerate(y):
        if lab == POSITIVE or lab == 1 or lab is True:
            out[i] = 1.0
        elif lab == NEGATIVE or lab == -1 or lab == 0 or lab is False:
            out[i] = -1.0
        else:
            raise ValidationError(f"label must be {POSITIVE!r} or {NEGATIVE!r}, got {lab!r}")
    return out


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # standardized feature space
    alphas: np.ndarray
    labels: np.ndarray  # +1 fraud / -1 genuine
    bias: float
    gamma: float
    C: float
    mean: np.ndarray
    scale: np.ndarray
    feature_indices: tuple = tuple(range(len(FEATURE_NAMES)))
    diagnostics: dict = field(default_factory=dict, compare=False)

    def _project(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.mean):
            raise ValueError(f"expected {len(self.mean)} features, got {X.shape[1]}")
        return (X - self.mean) / self.scale

    def decision_function(self, X) -> np.ndarray:
        Z = self._project(X)
        if len(self.alphas) == 0:
            return np.full(len(Z), self.bias)
        K = rbf_matrix(Z, self.support_vectors, self.gamma)
        return K @ (self.alphas * self.labels) + self.bias

    def predict(self, X) -> list:
        # a decision value of exactly zero counts as fraud
        return [POSITIVE if v >= 0 else NEGATIVE for v in self.decision_function(X)]

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "gamma": self.gamma,
            "C": self.C,
            "bias": self.bias,
            "feature_indices": list(self.feature_indices),
            "feature_names": [FEATURE_NAMES[i] for i in self.feature_indices],
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "support_vectors": self.support_vectors.tolist(),
            "alphas": self.alphas.tolist(),
            "labels": self.labels.tolist(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SvmModel":
        if d.get("format") != MODEL_FORMAT:
            raise DataError("not a linkfraud SVM model document")
        if d.get("version") != MODEL_VERSION:
            raise DataError(f"unsupported model version {d.get('version')!r}")
        dim = len(d["mean"])
        return cls(
            support_vectors=np.asarray(d["support_vectors"], dtype=float).reshape(-1, dim),
            alphas=np.asarray(d["alphas"], dtype=float),
            labels=np.asarray(d["labels"], dtype=float),
            bias=float(d["bias"]),
            gamma=float(d["gamma"]),
            C=float(d["C"]),
            mean=np.asarray(d["mean"], dtype=float),
            scale=np.asarray(d["scale"], dtype=float),
            feature_indices=tuple(d["feature_indices"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "SvmModel":
        path = Path(path)
        if not path.exists():
            raise DataError(f"model file not found: {path}")
        try:
            return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DataError(f"malformed model file {path}: {exc}") from None


def standardization(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return mean, scale


def default_gamma(Z: np.ndarray) -> float:
    """1 / (d * mean feature variance) of the (standardized) training matrix."""
    d = Z.shape[1]
    var = float(Z.var(axis=0).mean())
    return 1.0 / (d * var) if var > 0 else 1.0 / d


def smo_solve(Q: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3, max_iter: int = 200_000):
    """Solve min 1/2 a'Qa - 1'a  s.t. y'a = 0, 0 <= a <= C.

    Working pairs are the maximal KKT violators. Returns (alphas, rho,
    iterations, gap); the decision value is sum(a y K) - rho.
    """
    n = len(y)
    a = np.zeros(n)
    G = -np.ones(n)
    QD = np.diag(Q).copy()
    tau = 1e-12
    it = 0
    gap = math.inf
    while True:
        yG = -y * G
        up = ((y > 0) & (a < C)) | ((y < 0) & (a > 0))
        low = ((y > 0) & (a > 0)) | ((y < 0) & (a < C))
        if not up.any() or not low.any():
            gap = 0.0
            break
        iu = np.flatnonzero(up)
        il = np.flatnonzero(low)
        i = iu[np.argmax(yG[iu])]
        j = il[np.argmin(yG[il])]
        gap = yG[i] - yG[j]
        if gap < tol:
            break
        if it >= max_iter:
            raise ConvergenceError(
                f"SMO did not converge in {max_iter} iterations (KKT gap {gap:.3g})",
                {"iterations": it, "gap": float(gap), "tol": tol},
            )
        it += 1
        old_i, old_j = a[i], a[j]
        if y[i] != y[j]:
            quad = QD[i] + QD[j] + 2.0 * Q[i, j]
            delta = (-G[i] - G[j]) / max(quad, tau)
            diff = a[i] - a[j]
            a[i] += delta
            a[j] += delta
            if diff > 0:
                if a[j] < 0:
                    a[j] = 0.0
                    a[i] = diff
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = -diff
            if diff > 0:
                if a[i] > C:
                    a[i] = C
                    a[j] = C - diff
            elif a[j] > C:
                a[j] = C
                a[i] = C + diff
        else:
            quad = QD[i] + QD[j] - 2.0 * Q[i, j]
            delta = (G[i] - G[j]) / max(quad, tau)
            total = a[i] + a[j]
            a[i] -= delta
            a[j] += delta
            if total > C:
                if a[i] > C:
                    a[i] = C
                    a[j] = total - C
            elif a[j] < 0:
                a[j] = 0.0
                a[i] = total
            if total > C:
                if a[j] > C:
                    a[j] = C
                    a[i] = total - C
            elif a[i] < 0:
                a[i] = 0.0
                a[j] = total
        di, dj = a[i] - old_i, a[j] - old_j
        G += Q[:, i] * di + Q[:, j] * dj
    # threshold from free variables, else midpoint of the feasible interval
    yG = y * G
    free = (a > 0) & (a < C)
    if free.any():
        rho = float(yG[free].mean())
    else:
        ub, lb = math.inf, -math.inf
        for t in range(n):
            if (a[t] >= C and y[t] < 0) or (a[t] <= 0 and y[t] > 0):
                ub = min(ub, yG[t])
            elif (a[t] >= C and y[t] > 0) or (a[t] <= 0 and y[t] < 0):
                lb = max(lb, yG[t])
        rho = float((ub + lb) / 2.0) if math.isfinite(ub) and math.isfinite(lb) else 0.0
    return a, rho, it, float(gap)


def train_svm(
    X,
    y: Sequence,
    C: float = 1.0,
    gamma: float | None = None,
    tol: float = 1e-3,
    max_iter: int = 200_000,
    feature_indices: Sequence[int] | None = None,
) -> SvmModel:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    yv = _encode(y)
    if len(yv) != len(X):
        raise ValidationError("X and y have different lengths")
    if C <= 0:
        raise ValidationError("C must be > 0")
    n_pos, n_neg = int((yv > 0).sum()), int((yv < 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("single-class input: both fraud and genuine examples are required")
    mean, scale = standardization(X)
    Z = (X - mean) / scale
    if gamma is None:
        gamma = default_gamma(Z)
    if gamma <= 0:
        raise ValidationError("gamma must be > 0")
    K = rbf_matrix(Z, Z, gamma)
    Q = (yv[:, None] * yv[None, :]) * K
    a, rho, it, gap = smo_solve(Q, yv, C, tol=tol, max_iter=max_iter)
    balance = float(a @ yv)
    if a.min() < 0 or a.max() > C or abs(balance) > 1e-6:
        raise ConvergenceError(
            "SMO returned duals outside the feasible set",
            {"min_alpha": float(a.min()), "max_alpha": float(a.max()), "balance": balance},
        )
    sv = a > 0
    idx = tuple(feature_indices) if feature_indices is not None else tuple(range(X.shape[1]))
    return SvmModel(
        support_vectors=Z[sv],
        alphas=a[sv],
        labels=yv[sv],
        bias=-rho,
        gamma=float(gamma),
        C=float(C),
        mean=mean,
        scale=scale,
        feature_indices=idx,
        diagnostics={"iterations": it, "gap": gap, "n_support": int(sv.sum())},
    )


# -- evaluation ---------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int
    folds: list
    group: str
    k: int
    seed: int
    C: float
    gamma: float | None

    def asdict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
            "folds": self.folds,
            "group": self.group,
            "k": self.k,
            "seed": self.seed,
            "C": self.C,
            "gamma": self.gamma,
        }


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def stratified_folds(y: Sequence, k: int, seed: int) -> np.ndarray:
    """Fold index per example; each class is shuffled then dealt round-robin."""
    yv = _encode(y)
    rng = np.random.default_rng(seed)
    fold = np.empty(len(yv), dtype=np.int64)
    for cls in (1.0, -1.0):
        idx = np.flatnonzero(yv == cls)
        idx = idx[rng.permutation(len(idx))]
        fold[idx] = np.arange(len(idx)) % k
    return fold


def _confusion(truth, pred):
    tp = sum(1 for t, p in zip(truth, pred) if t == POSITIVE and p == POSITIVE)
    fp = sum(1 for t, p in zip(truth, pred) if t == NEGATIVE and p == POSITIVE)
    tn = sum(1 for t, p in zip(truth, pred) if t == NEGATIVE and p == NEGATIVE)
    fn = sum(1 for t, p in zip(truth, pred) if t == POSITIVE and p == NEGATIVE)
    return tp, fp, tn, fn


def cross_validate(
    X,
    y: Sequence,
    k: int = 10,
    group: str | FeatureGroup = "All",
    C: float = 1.0,
    gamma: float | None = None,
    seed: int = 0,
) -> EvalReport:
    """Stratified k-fold CV with fraud as the positive class; predictions pooled over folds."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = list(y)
    yv = _encode(y)
    truth = [POSITIVE if v > 0 else NEGATIVE for v in yv]
    if k < 2:
        raise ValidationError("k must be >= 2")
    for cls, name in ((1.0, POSITIVE), (-1.0, NEGATIVE)):
        if int((yv == cls).sum()) < k:
            raise InsufficientDataError(f"need at least k={k} {name} examples")
    grp = feature_group(group)
    cols = list(grp.indices) if X.shape[1] == len(FEATURE_NAMES) else list(range(X.shape[1]))
    Xg = X[:, cols]
    fold = stratified_folds(y, k, seed)
    pred = [None] * len(y)
    folds = []
    for f in range(k):
        test = np.flatnonzero(fold == f)
        train = np.flatnonzero(fold != f)
        model = train_svm(Xg[train], [truth[i] for i in train], C=C, gamma=gamma, feature_indices=cols)
        p = model.predict(Xg[test])
        for i, lab in zip(test.tolist(), p):
            pred[i] = lab
        tp, fp, tn, fn = _confusion([truth[i] for i in test], p)
        pr, rc, f1 = prf(tp, fp, fn)
        folds.append({
            "fold": f, "n_train": int(len(train)), "n_test": int(len(test)),
            "tp": tp, "fp": fp, "tn": tn, "fn": fn,
            "precision": pr, "recall": rc, "f1": f1, "gamma": model.gamma,
        })
    tp, fp, tn, fn = _confusion(truth, pred)
    pr, rc, f1 = prf(tp, fp, fn)
    return EvalReport(pr, rc, f1, tp, fp, tn, fn, folds, grp.name, k, seed, float(C), gamma)
