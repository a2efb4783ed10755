"""Exact evaluator for three error-independent binary classifiers.

Under error independence the b-vote covariances factor as
``delta_ij = p(1-p) psi_i psi_j`` with ``psi_i = psa_i + psb_i - 1`` and the
third central moment as ``T = p(1-p)(2p-1) psi_1 psi_2 psi_3``.  Eliminating
the ``psi`` leaves a quadratic in the prevalence ``p``::

    (T**2 + 4 D) p (1 - p) - D = 0,    D = delta_12 delta_13 delta_23

whose roots are ``1/2 +- T / (2 sqrt(T**2 + 4 D))``.  For data that really
came from independent classifiers the square root resolves; when it does
not, or is imaginary, the classifiers are provably not independent on the
test.
"""
from __future__ import annotations

import enum
import math

import numpy as np
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import AlgebraicValue, Kind, sqrt_exact
from .pair import InconsistentEvaluationError, solve_gamma
from .single import SingleEvaluation
from .sketch import TrioSketch

__all__ = [
    "Alarm",
    "PAIRS",
    "DegenerateLadderError",
    "NotIndependentError",
    "TrioMoments",
    "PrevalenceQuadratic",
    "RootSolution",
    "IaeReport",
    "moments",
    "prevalence_quadratic",
    "accuracies",
    "project_integer",
    "implied_pair_gammas",
    "evaluate_trio",
    "quadratic_curve",
]

PAIRS = ((1, 2), (1, 3), (2, 3))
_OPPOSITE = {1: (2, 3), 2: (1, 3), 3: (1, 2)}


class Alarm(str, enum.Enum):
    NONE = "NONE"
    IRRATIONAL = "IRRATIONAL"
    IMAGINARY = "IMAGINARY"
    DEGENERATE = "DEGENERATE"
    NOT_INDEPENDENT = "NOT_INDEPENDENT"


class DegenerateLadderError(ValueError):
    """A pair covariance vanishes, so accuracies cannot be recovered."""


class NotIndependentError(ValueError):
    """The covariance signs cannot come from independent classifiers."""


@dataclass(frozen=True)
class TrioMoments:
    fb: tuple[Fraction, Fraction, Fraction]
    delta: dict
    fbbb: Fraction
    t: Fraction

    @property
    def delta_product(self) -> Fraction:
        d = self.delta
        return d[1, 2] * d[1, 3] * d[2, 3]

    @property
    def discriminant(self) -> Fraction:
        """``4 D + T**2``, the term under the prevalence square root."""
        return 4 * self.delta_product + self.t ** 2


def moments(sketch: TrioSketch) -> TrioMoments:
    fb = tuple(sketch.single(i).fb for i in (1, 2, 3))
    delta = {(i, j): sketch.pair(i, j).delta() for i, j in PAIRS}
    fbbb = sketch.frequency("bbb")
    t = fbbb - fb[0] * fb[1] * fb[2] - fb[0] * delta[2, 3] - fb[1] * delta[1, 3] - fb[2] * delta[1, 2]
    return TrioMoments(fb, delta, fbbb, t)


@dataclass(frozen=True)
class PrevalenceQuadratic:
    """``a p**2 + b p + c = 0``, equivalently ``curvature p(1-p) + offset = 0``."""

    a: Fraction
    b: Fraction
    c: Fraction
    sqrt_term: AlgebraicValue | None
    roots: tuple[AlgebraicValue, AlgebraicValue] | None

    @property
    def curvature(self) -> Fraction:
        return -self.a

    @property
    def offset(self) -> Fraction:
        return self.c

    @property
    def kind(self) -> Kind | None:
        return self.sqrt_term.kind if self.sqrt_term is not None else None

    def __call__(self, p):
        return self.a * p * p + self.b * p + self.c


def prevalence_quadratic(m: TrioMoments) -> PrevalenceQuadratic:
    disc = m.discriminant
    d = m.delta_product
    # disc p^2 - disc p + D = 0  <=>  -disc p(1-p) + D = 0
    a, b, c = disc, -disc, d
    if disc == 0:
        return PrevalenceQuadratic(a, b, c, AlgebraicValue(0), None)
    root = sqrt_exact(disc)
    half = AlgebraicValue(Fraction(1, 2))
    shift = m.t / (2 * root)
    lo, hi = half - shift, half + shift
    if root.is_real and hi < lo:
        lo, hi = hi, lo
    return PrevalenceQuadratic(a, b, c, root, (lo, hi))


def _signs(m: TrioMoments, root) -> tuple[int, int, int]:
    d = m.delta
    if any(v == 0 for v in d.values()):
        raise DegenerateLadderError("a pair covariance is zero; the accuracy ladder is undefined")
    sg = lambda v: 1 if v > 0 else -1
    s = (1, sg(d[1, 2]), sg(d[1, 3]))
    if s[1] * s[2] != sg(d[2, 3]):
        raise NotIndependentError("covariance signs admit no independent sign assignment")
    if m.t != 0:
        # sign(psi_1 psi_2 psi_3) must equal sign(T) * sign(2p - 1)
        want = sg(m.t) * (2 * root - 1).sign()
        if s[0] * s[1] * s[2] != want:
            s = tuple(-v for v in s)
    elif sum(v > 0 for v in s) < 2:
        s = tuple(-v for v in s)
    return s


def accuracies(m: TrioMoments, root: AlgebraicValue) -> list[tuple[AlgebraicValue, AlgebraicValue]]:
    """Per-classifier ``(psa, psb)`` implied by the prevalence ``root``.

    ``|psi_i| = sqrt(4 D + T**2) / |delta_jk|``; the signs follow the
    covariance signs, oriented so the third moment matches ``root``.
    """
    if not isinstance(root, AlgebraicValue):
        root = AlgebraicValue(root)
    if not root.is_real:
        raise ValueError("accuracies need a real prevalence")
    if m.delta_product < 0:
        raise NotIndependentError("negative covariance product")
    s = _signs(m, root)
    sq = sqrt_exact(m.discriminant)
    out = []
    for i in (1, 2, 3):
        j, k = _OPPOSITE[i]
        psi = s[i - 1] * sq / abs(m.delta[j, k])
        psa = 1 - m.fb[i - 1] + (1 - root) * psi
        psb = psi + 1 - psa
        out.append((psa, psb))
    return out


@dataclass
class RootSolution:
    prevalence: AlgebraicValue
    accuracies: list | None = None
    error: str | None = None
    projection: tuple[SingleEvaluation, ...] | None = None
    gammas: dict = field(default_factory=dict)

    @property
    def in_range(self) -> bool:
        if self.accuracies is None or not self.prevalence.is_real:
            return False
        vals = [self.prevalence] + [v for pair in self.accuracies for v in pair]
        return all(0 <= v <= 1 for v in vals)

    def overall_accuracies(self) -> list[AlgebraicValue]:
        p = self.prevalence
        return [p * a + (1 - p) * b for a, b in self.accuracies]

    def mean_accuracy(self) -> AlgebraicValue:
        return sum(self.overall_accuracies(), AlgebraicValue(0)) / 3

    def integer_evaluations(self, Q: int) -> tuple[SingleEvaluation, ...] | None:
        """The solution as integer counts on ``Q`` questions, if it is one.

        Returns None unless the prevalence and every accuracy are rational
        and scale to whole numbers of questions inside their ranges.
        """
        if not self.in_range:
            return None
        vals = [self.prevalence] + [v for pair in self.accuracies for v in pair]
        if not all(v.is_rational for v in vals):
            return None
        qa = self.prevalence.rational * Q
        qb = Q - qa
        out = []
        for psa, psb in self.accuracies:
            raa, rbb = psa.rational * qa, psb.rational * qb
            if any(x.denominator != 1 for x in (qa, raa, rbb)):
                return None
            out.append(SingleEvaluation(Q, int(qa), int(raa), int(rbb)))
        return tuple(out)


@dataclass
class IaeReport:
    Q: int
    moments: TrioMoments
    quadratic: PrevalenceQuadratic
    alarm: Alarm
    solutions: list[RootSolution]
    selected: int | None = None

    @property
    def roots(self):
        return self.quadratic.roots

    @property
    def selected_solution(self) -> RootSolution | None:
        return self.solutions[self.selected] if self.selected is not None else None

    @property
    def integer_realizable(self) -> bool:
        """Whether some root gives whole-number counts for every classifier."""
        return any(s.integer_evaluations(self.Q) is not None for s in self.solutions)


def _ceil(x):
    return -math.floor(-x)


def _best_raa(Q, qa, ra, x, y):
    """Closest point to ``(x, y)`` on the consistent line at this ``Qa``.

    Returns ``(cost, Raa)`` minimizing ``|Raa - x| + |Rbb - y|`` with
    ``Rbb = Raa - Ra + Qb``; ties go to the smaller ``Raa``.
    """
    qb = Q - qa
    lo_f, hi_f = max(0, ra - qb), min(qa, ra)
    if lo_f > hi_f:
        return None
    shift = qb - ra
    target = y - shift
    lo, hi = (x, target) if x <= target else (target, x)
    clamp = lambda r: min(max(r, lo_f), hi_f)
    cands = {lo_f, hi_f, clamp(math.floor(lo)), clamp(_ceil(lo)), clamp(math.floor(hi)), clamp(_ceil(hi))}
    best = None
    for r in sorted(cands):
        cost = abs(r - x) + abs(r + shift - y)
        if best is None or cost < best[0]:
            best = (cost, r)
    return best


def project_integer(solution: RootSolution, sketch: TrioSketch) -> tuple[SingleEvaluation, ...]:
    """Nearest integer evaluations sharing one ``Qa``, each consistent with
    its classifier's observed a-vote count.

    Distance is the summed L1 distance over ``(Qa, Raa, Rbb)``; ties go to
    the smallest ``Qa`` and then the smallest ``Raa``.
    """
    if solution.accuracies is None or not solution.prevalence.is_real:
        raise ValueError("projection needs a real solution with accuracies")
    Q = sketch.Q
    ras = [sketch.single(i).ra for i in (1, 2, 3)]
    qa_star = solution.prevalence * Q
    xs = [a * qa_star for a, _ in solution.accuracies]
    ys = [b * (Q - qa_star) for _, b in solution.accuracies]

    # Relaxed (real-valued Raa) cost for every Qa at once.  The integer cost
    # is at most 3 above the relaxed one, which bounds the candidate set.
    qa = np.arange(Q + 1, dtype=float)
    qb = Q - qa
    relaxed = 3 * np.abs(qa - float(qa_star))
    for ra, x, y in zip(ras, xs, ys):
        x, y = float(x), float(y)
        lo_f, hi_f = np.maximum(0, ra - qb), np.minimum(qa, ra)
        t = y - (qb - ra)
        m1, m2 = np.minimum(x, t), np.maximum(x, t)
        below = hi_f < m1
        above = lo_f > m2
        relaxed += np.where(below, (x - hi_f) + (t - hi_f), np.where(above, (lo_f - x) + (lo_f - t), m2 - m1))
    limit = relaxed.min() + 3 + 1e-9 * (1 + relaxed.min())
    candidates = np.flatnonzero(relaxed <= limit)

    best = None
    for q in candidates.tolist():
        cost = 3 * abs(q - qa_star)
        picks = []
        for ra, x, y in zip(ras, xs, ys):
            c, r = _best_raa(Q, q, ra, x, y)
            cost = cost + c
            picks.append(r)
        if best is None or cost < best[0]:
            best = (cost, q, picks)
    _, q, picks = best
    return tuple(SingleEvaluation(Q, q, raa, raa - ra + Q - q) for raa, ra in zip(picks, ras))


def implied_pair_gammas(solution: RootSolution, sketch: TrioSketch) -> dict:
    """Correlation solution for each pair given the projected evaluations.

    Values are :class:`GammaSolution` objects; solver errors propagate.
    """
    evaluations = solution.projection
    if evaluations is None:
        evaluations = project_integer(solution, sketch)
    return {(i, j): solve_gamma(evaluations[i - 1], evaluations[j - 1], sketch.pair(i, j)) for i, j in PAIRS}


def evaluate_trio(sketch: TrioSketch, assume_better_than_chance: bool = False, project: bool = True) -> IaeReport:
    """Run the full independent evaluation on a trio sketch."""
    m = moments(sketch)
    quad = prevalence_quadratic(m)
    sols: list[RootSolution] = []
    if quad.roots is not None:
        for r in quad.roots:
            sol = RootSolution(r)
            if r.is_real:
                try:
                    sol.accuracies = accuracies(m, r)
                except (DegenerateLadderError, NotIndependentError) as exc:
                    sol.error = str(exc)
            else:
                sol.error = "imaginary prevalence"
            sols.append(sol)

    disc = m.discriminant
    if disc == 0:
        alarm = Alarm.DEGENERATE
    elif disc < 0:
        alarm = Alarm.IMAGINARY
    elif quad.sqrt_term.kind is Kind.IRRATIONAL:
        alarm = Alarm.IRRATIONAL
    elif any(v == 0 for v in m.delta.values()):
        alarm = Alarm.DEGENERATE
    elif not any(s.in_range for s in sols):
        alarm = Alarm.NOT_INDEPENDENT
    else:
        alarm = Alarm.NONE

    report = IaeReport(sketch.Q, m, quad, alarm, sols)
    usable = [k for k, s in enumerate(sols) if s.accuracies is not None]
    if assume_better_than_chance and usable:
        better = [k for k in usable if sols[k].mean_accuracy() > Fraction(1, 2)]
        if better:
            report.selected = better[0]
    if project:
        for s in sols:
            if s.accuracies is None or not s.prevalence.is_real:
                continue
            s.projection = project_integer(s, sketch)
            if 0 < s.projection[0].Qa < sketch.Q:
                for pair in PAIRS:
                    i, j = pair
                    try:
                        s.gammas[pair] = solve_gamma(s.projection[i - 1], s.projection[j - 1], sketch.pair(i, j))
                    except InconsistentEvaluationError as exc:
                        s.gammas[pair] = exc
    return report


def quadratic_curve(quad: PrevalenceQuadratic, samples: int = 101) -> list[tuple[Fraction, Fraction]]:
    """``(p, a p**2 + b p + c)`` on an even grid over ``[0, 1]`` for plotting."""
    if samples < 2:
        raise ValueError("need at least two samples")
    return [(Fraction(k, samples - 1), quad(Fraction(k, samples - 1))) for k in range(samples)]
