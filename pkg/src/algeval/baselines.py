"""Reference evaluators: majority voting and the agreement-equation solution.

Majority voting grades each classifier against the per-item majority label.
The agreement-equation solution recovers error rates from the three pair
agreement rates alone by assuming ``e_ij = e_i * e_j``.  That assumption is
wrong for binary classifiers whose a- and b-accuracies differ, and the
square root it produces is irrational even on exactly independent data.  It
is kept as a diagnostic.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .exact import AlgebraicValue, DegenerateEquationError, Kind, as_fraction, sqrt_exact
from .pair import PairCorrelation, PairGroundTruth
from .single import SingleEvaluation
from .sketch import LabelStream, TrioSketch
from .trio import PAIRS

__all__ = [
    "MvReport",
    "PlataniosReport",
    "majority_key",
    "mv_grade",
    "platanios_solve",
    "platanios_from_sketch",
    "single_error_rate",
    "pair_error_rate",
    "agreement_from_errors",
]


def majority_key(decisions) -> list[str]:
    """Most common label per item; needs an odd number of voters."""
    out = []
    for votes in decisions:
        if len(votes) % 2 == 0:
            raise ValueError("majority voting needs an odd number of classifiers")
        out.append(Counter(votes).most_common(1)[0][0])
    return out


@dataclass
class MvReport:
    mv_key: list[str]
    evaluations: tuple[SingleEvaluation, ...]
    gammas: dict

    @property
    def Qa_mv(self) -> int:
        return self.mv_key.count("a")

    @property
    def accuracies(self) -> list[tuple[Fraction | None, Fraction | None]]:
        return [(ev.psa, ev.psb) for ev in self.evaluations]


def mv_grade(stream: LabelStream) -> MvReport:
    """Grade every classifier, and every pair's correlation, against the majority key."""
    if stream.n_classifiers != 3:
        raise ValueError("majority-vote grading needs three classifiers")
    key = majority_key(stream.decisions)
    gts = {(i, j): PairGroundTruth.from_stream(stream, i, j, truth=key) for i, j in PAIRS}
    evs = (gts[1, 2].evaluations()[0], gts[1, 2].evaluations()[1], gts[1, 3].evaluations()[1])
    gammas: dict[tuple[int, int], PairCorrelation] = {pair: gt.correlation() for pair, gt in gts.items()}
    return MvReport(key, evs, gammas)


@dataclass
class PlataniosReport:
    agreement: tuple[Fraction, Fraction, Fraction]
    c: AlgebraicValue
    branches: tuple[tuple[AlgebraicValue, ...], tuple[AlgebraicValue, ...]]

    @property
    def kind(self) -> Kind:
        return self.c.kind

    @property
    def c_squared(self) -> Fraction:
        a12, a13, a23 = self.agreement
        return (1 - a12) * (1 - a13) * (1 - a23)


def platanios_solve(a12, a13, a23) -> PlataniosReport:
    """Error rates from agreement rates under ``e_ij = e_i e_j``.

    Both sign branches ``e_i = 1/2 +- c / (2 (1 - 2 a_jk))`` are returned,
    with ``c = sqrt((1-a12)(1-a13)(1-a23))``.
    """
    a = {(1, 2): as_fraction(a12), (1, 3): as_fraction(a13), (2, 3): as_fraction(a23)}
    for pair, v in a.items():
        if v == Fraction(1, 2):
            raise DegenerateEquationError(f"agreement rate a{pair[0]}{pair[1]} is 1/2", has_solution=True)
    c = sqrt_exact((1 - a[1, 2]) * (1 - a[1, 3]) * (1 - a[2, 3]))
    opposite = {1: (2, 3), 2: (1, 3), 3: (1, 2)}
    half = Fraction(1, 2)
    branches = tuple(
        tuple(half + sign * c / (2 * (1 - 2 * a[opposite[i]])) for i in (1, 2, 3))
        for sign in (1, -1)
    )
    return PlataniosReport((a[1, 2], a[1, 3], a[2, 3]), c, branches)


def platanios_from_sketch(sketch: TrioSketch) -> PlataniosReport:
    return platanios_solve(*(sketch.pair(i, j).agreement_rate() for i, j in PAIRS))


def single_error_rate(prevalence, psa, psb) -> Fraction:
    p = as_fraction(prevalence)
    return p * (1 - as_fraction(psa)) + (1 - p) * (1 - as_fraction(psb))


def pair_error_rate(prevalence, psa_i, psb_i, psa_j, psb_j) -> Fraction:
    """Rate at which both classifiers are wrong, for error-independent classifiers."""
    p = as_fraction(prevalence)
    psa_i, psb_i, psa_j, psb_j = map(as_fraction, (psa_i, psb_i, psa_j, psb_j))
    return p * (1 - psa_i) * (1 - psa_j) + (1 - p) * (1 - psb_i) * (1 - psb_j)


def agreement_from_errors(e_i, e_j, e_ij) -> Fraction:
    """Agreement rate from individual and joint error rates: ``1 - e_i - e_j + 2 e_ij``."""
    return 1 - as_fraction(e_i) - as_fraction(e_j) + 2 * as_fraction(e_ij)
