"""scikit-learn style wrappers around the evaluators.

``X`` is always an ``(n_items, n_classifiers)`` matrix of labels.  Any two
distinct values may be used as labels; ``labels=(a, b)`` says which one
plays the role of ``a``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .baselines import majority_key, mv_grade, platanios_from_sketch
from .sketch import LabelStream, ingest
from .trio import Alarm, evaluate_trio

__all__ = [
    "check_label_matrix",
    "to_stream",
    "IndependentEvaluator",
    "MajorityVoteGrader",
    "AgreementEvaluator",
]


def check_label_matrix(X, labels=("a", "b"), n_classifiers=None) -> np.ndarray:
    """Validate a label matrix and map it onto ``"a"`` / ``"b"``."""
    X = check_array(X, dtype=object, ensure_2d=True)
    if n_classifiers is not None and X.shape[1] != n_classifiers:
        raise ValueError(f"expected {n_classifiers} classifier columns, got {X.shape[1]}")
    if not 1 <= X.shape[1] <= 3:
        raise ValueError(f"expected 1 to 3 classifier columns, got {X.shape[1]}")
    la, lb = labels
    out = np.empty(X.shape, dtype=object)
    is_a = X == la
    is_b = X == lb
    if not np.all(is_a | is_b):
        bad = X[~(is_a | is_b)][0]
        raise ValueError(f"unknown label {bad!r}; expected one of {labels!r}")
    out[is_a] = "a"
    out[is_b] = "b"
    return out


def to_stream(X, y=None, labels=("a", "b")) -> LabelStream:
    M = check_label_matrix(X, labels)
    truth = None
    if y is not None:
        truth = check_label_matrix(np.asarray(y, dtype=object).reshape(-1, 1), labels)[:, 0].tolist()
    return LabelStream.from_decisions([tuple(row) for row in M.tolist()], truth)


class _LabelMixin:
    def _to_labels(self, values):
        la, lb = self.labels
        return np.array([la if v == "a" else lb for v in values], dtype=object)


class IndependentEvaluator(_LabelMixin, BaseEstimator):
    """Exact evaluation of three classifiers assumed error independent.

    Fitted attributes: ``report_`` (the full report), ``alarm_``,
    ``prevalence_`` and ``accuracies_`` (``(3, 2)`` floats of psa, psb for
    the selected root), ``sketch_``.
    """

    def __init__(self, labels=("a", "b"), assume_better_than_chance=True, project=True):
        self.labels = labels
        self.assume_better_than_chance = assume_better_than_chance
        self.project = project

    def fit(self, X, y=None):
        M = check_label_matrix(X, self.labels, n_classifiers=3)
        self.n_features_in_ = 3
        self.sketch_ = ingest([tuple(r) for r in M.tolist()])
        self.report_ = evaluate_trio(self.sketch_, self.assume_better_than_chance, self.project)
        self.alarm_ = self.report_.alarm
        sol = self.report_.selected_solution
        if sol is None:
            usable = [s for s in self.report_.solutions if s.accuracies is not None and s.in_range]
            sol = usable[-1] if usable else None
        self.solution_ = sol
        if sol is None:
            self.prevalence_ = None
            self.accuracies_ = None
        else:
            self.prevalence_ = float(sol.prevalence)
            self.accuracies_ = np.array([[float(a), float(b)] for a, b in sol.accuracies])
        return self

    @property
    def is_alarmed(self) -> bool:
        check_is_fitted(self, "report_")
        return self.alarm_ is not Alarm.NONE

    def predict_proba(self, X) -> np.ndarray:
        """Posterior ``[P(a), P(b)]`` per item under the fitted independent model."""
        check_is_fitted(self, "report_")
        if self.accuracies_ is None:
            raise ValueError("no usable solution to predict with (alarm: %s)" % self.alarm_.value)
        M = check_label_matrix(X, self.labels, n_classifiers=3)
        p = min(max(self.prevalence_, 0.0), 1.0)
        acc = np.clip(self.accuracies_, 0.0, 1.0)
        votes_a = M == "a"
        like_a = np.prod(np.where(votes_a, acc[:, 0], 1 - acc[:, 0]), axis=1) * p
        like_b = np.prod(np.where(votes_a, 1 - acc[:, 1], acc[:, 1]), axis=1) * (1 - p)
        total = like_a + like_b
        with np.errstate(invalid="ignore", divide="ignore"):
            pa = np.where(total > 0, like_a / np.where(total > 0, total, 1), 0.5)
        return np.column_stack([pa, 1 - pa])

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        return self._to_labels(np.where(proba[:, 0] >= 0.5, "a", "b"))


class MajorityVoteGrader(_LabelMixin, BaseEstimator):
    """Grades each classifier against the per-item majority label."""

    def __init__(self, labels=("a", "b")):
        self.labels = labels

    def fit(self, X, y=None):
        stream = to_stream(X, labels=self.labels)
        if stream.n_classifiers != 3:
            raise ValueError("majority-vote grading needs three classifiers")
        self.n_features_in_ = 3
        self.report_ = mv_grade(stream)
        self.prevalence_ = self.report_.Qa_mv / len(stream)
        self.accuracies_ = np.array([[np.nan if v is None else float(v) for v in pair] for pair in self.report_.accuracies])
        return self

    def predict(self, X) -> np.ndarray:
        M = check_label_matrix(X, self.labels)
        return self._to_labels(majority_key(M.tolist()))


class AgreementEvaluator(BaseEstimator):
    """Error rates from pair agreement rates under ``e_ij = e_i e_j``."""

    def __init__(self, labels=("a", "b")):
        self.labels = labels

    def fit(self, X, y=None):
        M = check_label_matrix(X, self.labels, n_classifiers=3)
        self.n_features_in_ = 3
        self.report_ = platanios_from_sketch(ingest([tuple(r) for r in M.tolist()]))
        self.kind_ = self.report_.kind
        self.error_rates_ = np.array([[float(v) for v in branch] for branch in self.report_.branches])
        return self
