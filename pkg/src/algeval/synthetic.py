"""Ground-truthed synthetic tests for one to three binary classifiers.

Two generators are provided.  Independent trios come from the closed-form
pattern polynomials (prevalence times the product of per-classifier vote
probabilities).  Correlated ensembles are built item by item from integer
counts of correctness patterns on each question type, so anything they
produce is realizable by construction.

Randomness always comes from ``numpy.random.Generator(PCG64(seed))``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .exact import as_fraction
from .pair import PairGroundTruth
from .single import SingleEvaluation
from .sketch import LabelStream, Sketch, patterns

__all__ = [
    "SpecError",
    "TrioGroundTruth",
    "independent_frequencies",
    "independent_cells",
    "correlated_test",
    "sample_test",
    "sample_independent_test",
    "exact_test",
    "load_spec",
    "synthesize",
]

# Correctness patterns per question type: "c" correct, "w" wrong.
CORRECTNESS = ["".join(p) for p in itertools.product("cw", repeat=3)]
_OTHER = {"a": "b", "b": "a"}


class SpecError(ValueError):
    """A synthetic specification cannot be realized with integer counts."""


def _vote(truth: str, mark: str) -> str:
    return truth if mark == "c" else _OTHER[truth]


def independent_cells(prevalence, accuracies) -> dict[tuple[str, str], Fraction]:
    """Joint probability of (true label, vote pattern) for independent voters."""
    p = as_fraction(prevalence)
    accs = [(as_fraction(a), as_fraction(b)) for a, b in accuracies]
    for v in [p, *itertools.chain.from_iterable(accs)]:
        if not 0 <= v <= 1:
            raise ValueError(f"parameter {v} outside [0, 1]")
    out = {}
    for truth, weight, k in (("a", p, 0), ("b", 1 - p, 1)):
        for pat in patterns(len(accs)):
            prob = weight
            for vote, pair in zip(pat, accs):
                right = pair[k]
                prob *= right if vote == truth else 1 - right
            out[truth, pat] = prob
    return out


def independent_frequencies(prevalence, accuracies) -> dict[str, Fraction]:
    """Exact voting-pattern frequencies of error-independent classifiers.

    ``accuracies`` holds one ``(psa, psb)`` pair per classifier.
    """
    cells = independent_cells(prevalence, accuracies)
    out: dict[str, Fraction] = {}
    for (_, pat), prob in cells.items():
        out[pat] = out.get(pat, Fraction(0)) + prob
    return out


@dataclass(frozen=True)
class TrioGroundTruth:
    """Counts of each correctness pattern on a-questions and b-questions.

    ``cells_a["cwc"]`` is the number of a-questions that classifiers 1 and 3
    got right while classifier 2 got wrong.
    """

    cells_a: Mapping[str, int]
    cells_b: Mapping[str, int]

    def __post_init__(self):
        for name, cells in (("a", self.cells_a), ("b", self.cells_b)):
            if set(cells) != set(CORRECTNESS):
                raise SpecError(f"{name}-cells need exactly the patterns {CORRECTNESS}")
            bad = {k: v for k, v in cells.items() if v < 0}
            if bad:
                raise SpecError(f"negative {name}-cell counts {bad}")
        if self.Q == 0:
            raise SpecError("a test needs at least one question")

    @property
    def Qa(self) -> int:
        return sum(self.cells_a.values())

    @property
    def Qb(self) -> int:
        return sum(self.cells_b.values())

    @property
    def Q(self) -> int:
        return self.Qa + self.Qb

    @staticmethod
    def _joint(cells, members) -> int:
        return sum(n for pat, n in cells.items() if all(pat[m - 1] == "c" for m in members))

    def correct(self, label: str, *members: int) -> int:
        """Questions of type ``label`` that all ``members`` answered correctly."""
        return self._joint(self.cells_a if label == "a" else self.cells_b, members)

    def evaluations(self) -> tuple[SingleEvaluation, ...]:
        return tuple(SingleEvaluation(self.Q, self.Qa, self.correct("a", i), self.correct("b", i)) for i in (1, 2, 3))

    def pair(self, i: int, j: int) -> PairGroundTruth:
        return PairGroundTruth(
            self.Q, self.Qa,
            self.correct("a", i), self.correct("b", i),
            self.correct("a", j), self.correct("b", j),
            self.correct("a", i, j), self.correct("b", i, j),
        )

    def stream(self, seed: int | None = None) -> LabelStream:
        """Item-by-item stream with a truth column.

        Items come in blocks (a-questions first, patterns in lexicographic
        order) unless ``seed`` is given, in which case they are shuffled.
        """
        decisions, truth = [], []
        for label, cells in (("a", self.cells_a), ("b", self.cells_b)):
            for pat in CORRECTNESS:
                votes = tuple(_vote(label, m) for m in pat)
                decisions.extend([votes] * cells[pat])
                truth.extend([label] * cells[pat])
        if seed is not None:
            order = np.random.Generator(np.random.PCG64(seed)).permutation(len(decisions))
            decisions = [decisions[k] for k in order]
            truth = [truth[k] for k in order]
        return LabelStream.from_decisions(decisions, truth)

    def sketch(self) -> Sketch:
        counts = dict.fromkeys(patterns(3), 0)
        for label, cells in (("a", self.cells_a), ("b", self.cells_b)):
            for pat, n in cells.items():
                counts["".join(_vote(label, m) for m in pat)] += n
        return Sketch.from_counts(counts)

    @classmethod
    def from_stream(cls, stream: LabelStream) -> "TrioGroundTruth":
        if not stream.has_truth or stream.n_classifiers != 3:
            raise ValueError("need a three-classifier stream with a truth column")
        cells = {"a": dict.fromkeys(CORRECTNESS, 0), "b": dict.fromkeys(CORRECTNESS, 0)}
        for votes, t in zip(stream.decisions, stream.truth):
            cells[t]["".join("c" if v == t else "w" for v in votes)] += 1
        return cls(cells["a"], cells["b"])


def _cells_from_moments(label: str, total: int, single, pairs, trio) -> dict[str, int]:
    """Inclusion-exclusion from joint-correct counts to pattern counts."""
    cells = {}
    for pat in CORRECTNESS:
        right = [k + 1 for k, m in enumerate(pat) if m == "c"]
        wrong = [k + 1 for k, m in enumerate(pat) if m == "w"]
        n = 0
        for r in range(len(wrong) + 1):
            for extra in itertools.combinations(wrong, r):
                members = tuple(sorted(right + list(extra)))
                if len(members) == 0:
                    joint = total
                elif len(members) == 1:
                    joint = single[members[0] - 1]
                elif len(members) == 2:
                    joint = pairs[members]
                else:
                    joint = trio
                n += (-1) ** r * joint
        if n < 0:
            raise SpecError(
                f"{label}-questions: count of correctness pattern {pat!r} would be {n}; "
                f"the joint counts violate the bound {pat!r} >= 0"
            )
        cells[pat] = n
    return cells


def correlated_test(spec: Mapping) -> TrioGroundTruth:
    """Build a trio ground truth from explicit integer counts.

    Either give the cells directly::

        {"cells": {"a": {"ccc": 300, ...}, "b": {...}}}

    or give marginals and joints per question type::

        {"Qa": 40, "Qb": 60,
         "correct": {"a": [30, 28, 33], "b": [50, 45, 48]},
         "pairs": {"a": {"12": 21, "13": 25, "23": 23}, "b": {...}},
         "trio": {"a": 18, "b": 36}}

    A spec whose joints cannot be realized raises :class:`SpecError` naming
    the bound that fails.
    """
    if "cells" in spec:
        cells = spec["cells"]
        return TrioGroundTruth({p: int(cells["a"].get(p, 0)) for p in CORRECTNESS},
                               {p: int(cells["b"].get(p, 0)) for p in CORRECTNESS})
    try:
        totals = {"a": int(spec["Qa"]), "b": int(spec["Qb"])}
        out = {}
        for label in "ab":
            single = [int(v) for v in spec["correct"][label]]
            if len(single) != 3:
                raise SpecError(f"need three {label}-correct counts")
            pairs = {}
            for key, v in spec["pairs"][label].items():
                i, j = sorted(int(ch) for ch in str(key))
                pairs[i, j] = int(v)
            if set(pairs) != {(1, 2), (1, 3), (2, 3)}:
                raise SpecError(f"need pair counts 12, 13, 23 for {label}-questions")
            out[label] = _cells_from_moments(label, totals[label], single, pairs, int(spec["trio"][label]))
    except KeyError as exc:
        raise SpecError(f"missing spec field {exc}") from None
    return TrioGroundTruth(out["a"], out["b"])


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _exact_counts(probs: Mapping, Q: int) -> dict:
    out = {}
    for key, f in probs.items():
        n = f * Q
        if n.denominator != 1:
            lcd = math.lcm(*(Fraction(v).denominator for v in probs.values()))
            raise SpecError(f"exact proportions need Q to be a multiple of {lcd}, got {Q}")
        out[key] = int(n)
    return out


def sample_test(frequencies: Mapping[str, Fraction], Q: int, seed: int = 0, exact_proportion: bool = False) -> LabelStream:
    """Draw ``Q`` items from the given voting-pattern frequencies.

    With ``exact_proportion`` the counts are exactly ``Q * f`` and no
    randomness is used.  The result has no truth column.
    """
    freqs = {k: as_fraction(v) for k, v in frequencies.items()}
    if sum(freqs.values()) != 1:
        raise ValueError("frequencies must sum to 1")
    if Q <= 0:
        raise ValueError("Q must be positive")
    keys = sorted(freqs)
    if exact_proportion:
        counts = _exact_counts(freqs, Q)
        return LabelStream.from_decisions([tuple(k) for k in keys for _ in range(counts[k])])
    rng = _rng(seed)
    probs = np.array([float(freqs[k]) for k in keys])
    drawn = rng.multinomial(Q, probs / probs.sum())
    decisions = [tuple(k) for k, n in zip(keys, drawn) for _ in range(int(n))]
    order = rng.permutation(Q)
    return LabelStream.from_decisions([decisions[i] for i in order])


def exact_test(prevalence, accuracies, Q: int) -> LabelStream:
    """Stream whose (truth, votes) counts are exactly ``Q`` times the cell probabilities."""
    counts = _exact_counts(independent_cells(prevalence, accuracies), Q)
    decisions, truth = [], []
    for (t, pat), n in sorted(counts.items()):
        decisions.extend([tuple(pat)] * n)
        truth.extend([t] * n)
    return LabelStream.from_decisions(decisions, truth)


def sample_independent_test(prevalence, accuracies, Q: int, seed: int = 0, exact_proportion: bool = False) -> LabelStream:
    """Independent classifiers on a test with ``prevalence * Q`` a-questions.

    ``prevalence * Q`` must be an integer: the question-type split is fixed
    and each vote is an independent Bernoulli draw with the classifier's
    per-label accuracy.  The stream carries its truth column.
    """
    if exact_proportion:
        return exact_test(prevalence, accuracies, Q)
    p = as_fraction(prevalence)
    qa = p * Q
    if qa.denominator != 1:
        raise SpecError(f"prevalence {p} times Q={Q} is not an integer")
    qa = int(qa)
    accs = [(float(as_fraction(a)), float(as_fraction(b))) for a, b in accuracies]
    rng = _rng(seed)
    truth = np.array(["a"] * qa + ["b"] * (Q - qa))
    truth = truth[rng.permutation(Q)]
    draws = rng.random((Q, len(accs)))
    is_a = truth == "a"
    decisions = []
    cols = []
    for k, (psa, psb) in enumerate(accs):
        right = np.where(is_a, draws[:, k] < psa, draws[:, k] < psb)
        cols.append(np.where(right, truth, np.where(is_a, "b", "a")))
    decisions = [tuple(str(c[n]) for c in cols) for n in range(Q)]
    return LabelStream.from_decisions(decisions, [str(t) for t in truth])


def load_spec(source) -> dict:
    if isinstance(source, Mapping):
        return dict(source)
    if hasattr(source, "read"):
        return json.load(source)
    with open(source) as fh:
        return json.load(fh)


def synthesize(spec: Mapping, Q: int | None = None, seed: int | None = None, exact_proportion: bool = False) -> LabelStream:
    """Stream from a JSON spec of either kind.

    Independent specs look like ``{"prevalence": "19/20", "accuracies":
    [["18/25", "11/100"], ...], "Q": 1000}``; anything else is passed to
    :func:`correlated_test`.
    """
    if "accuracies" in spec:
        q = Q if Q is not None else spec.get("Q")
        if q is None:
            raise SpecError("independent specs need Q")
        s = seed if seed is not None else int(spec.get("seed", 0))
        return sample_independent_test(spec["prevalence"], spec["accuracies"], int(q), s,
                                       exact_proportion or bool(spec.get("exact_proportion", False)))
    gt = correlated_test(spec)
    return gt.stream(seed)
