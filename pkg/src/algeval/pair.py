"""Error correlations between two binary classifiers.

For a pair ``i, j`` the per-label correlations are

    gamma_a = Raaa/Qa - (Raa_i/Qa)(Raa_j/Qa)
    gamma_b = Rbbb/Qb - (Rbb_i/Qb)(Rbb_j/Qb)

where ``Raaa`` (``Rbbb``) counts a-questions (b-questions) both got right.
Given the two individual evaluations, the observed pair sketch pins
``prva*gamma_a + prvb*gamma_b``; :func:`solve_gamma` returns every
correlation pair consistent with that and with integer joint counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .single import SingleEvaluation
from .sketch import LabelStream, PairSketch

__all__ = [
    "InconsistentEvaluationError",
    "PairCorrelation",
    "PairGroundTruth",
    "PairCandidate",
    "GammaSolution",
    "pair_frequencies",
    "gb_residuals",
    "solve_gamma",
]


class InconsistentEvaluationError(ValueError):
    """The individual evaluations cannot explain the observed pair sketch."""


@dataclass(frozen=True)
class PairCorrelation:
    gamma_a: Fraction | None
    gamma_b: Fraction | None

    def norm2(self) -> Fraction:
        return (self.gamma_a or 0) ** 2 + (self.gamma_b or 0) ** 2


def _frechet(p_i, p_j):
    """Range of ``joint - p_i*p_j`` for a joint with marginals ``p_i, p_j``."""
    return max(Fraction(0), p_i + p_j - 1) - p_i * p_j, min(p_i, p_j) - p_i * p_j


@dataclass(frozen=True)
class PairGroundTruth:
    """Integer answer-key statistics for two classifiers on one test."""

    Q: int
    Qa: int
    raa_i: int
    rbb_i: int
    raa_j: int
    rbb_j: int
    raaa: int
    rbbb: int

    def __post_init__(self):
        qb = self.Q - self.Qa
        if not 0 <= self.Qa <= self.Q:
            raise ValueError("Qa out of range")
        for name, v, top in (("raa_i", self.raa_i, self.Qa), ("raa_j", self.raa_j, self.Qa),
                             ("rbb_i", self.rbb_i, qb), ("rbb_j", self.rbb_j, qb)):
            if not 0 <= v <= top:
                raise ValueError(f"{name}={v} outside [0, {top}]")
        if not max(0, self.raa_i + self.raa_j - self.Qa) <= self.raaa <= min(self.raa_i, self.raa_j):
            raise ValueError(f"raaa={self.raaa} violates the joint count bounds")
        if not max(0, self.rbb_i + self.rbb_j - qb) <= self.rbbb <= min(self.rbb_i, self.rbb_j):
            raise ValueError(f"rbbb={self.rbbb} violates the joint count bounds")

    @classmethod
    def from_labels(cls, truth: Sequence[str], votes_i: Sequence[str], votes_j: Sequence[str]):
        Q = len(truth)
        qa = raa_i = raa_j = raaa = rbb_i = rbb_j = rbbb = 0
        for t, x, y in zip(truth, votes_i, votes_j):
            if t == "a":
                qa += 1
                raa_i += x == "a"
                raa_j += y == "a"
                raaa += x == "a" and y == "a"
            else:
                rbb_i += x == "b"
                rbb_j += y == "b"
                rbbb += x == "b" and y == "b"
        return cls(Q, qa, raa_i, rbb_i, raa_j, rbb_j, raaa, rbbb)

    @classmethod
    def from_stream(cls, stream: LabelStream, i: int, j: int, truth: Sequence[str] | None = None):
        truth = truth if truth is not None else stream.truth
        if truth is None:
            raise ValueError("stream has no answer key")
        return cls.from_labels(truth, [d[i - 1] for d in stream.decisions], [d[j - 1] for d in stream.decisions])

    @property
    def Qb(self) -> int:
        return self.Q - self.Qa

    def evaluations(self) -> tuple[SingleEvaluation, SingleEvaluation]:
        return (SingleEvaluation(self.Q, self.Qa, self.raa_i, self.rbb_i),
                SingleEvaluation(self.Q, self.Qa, self.raa_j, self.rbb_j))

    def correlation(self) -> PairCorrelation:
        ga = gb = None
        if self.Qa:
            ga = Fraction(self.raaa, self.Qa) - Fraction(self.raa_i * self.raa_j, self.Qa ** 2)
        if self.Qb:
            gb = Fraction(self.rbbb, self.Qb) - Fraction(self.rbb_i * self.rbb_j, self.Qb ** 2)
        return PairCorrelation(ga, gb)

    def counts(self) -> PairSketch:
        """Voting-pattern counts implied by the joint correctness counts."""
        qa, qb = self.Qa, self.Qb
        # on a-questions an a-vote is correct; on b-questions it is wrong
        aa = self.raaa + (qb - self.rbb_i - self.rbb_j + self.rbbb)
        ab = (self.raa_i - self.raaa) + (self.rbb_j - self.rbbb)
        ba = (self.raa_j - self.raaa) + (self.rbb_i - self.rbbb)
        bb = (qa - self.raa_i - self.raa_j + self.raaa) + self.rbbb
        return PairSketch.from_counts({"aa": aa, "ab": ab, "ba": ba, "bb": bb})

    def frequencies(self) -> dict[str, Fraction]:
        ev_i, ev_j = self.evaluations()
        g = self.correlation()
        zero = Fraction(0)
        return pair_frequencies(
            ev_i.prevalence,
            ev_i.psa if ev_i.psa is not None else zero,
            ev_i.psb if ev_i.psb is not None else zero,
            ev_j.psa if ev_j.psa is not None else zero,
            ev_j.psb if ev_j.psb is not None else zero,
            g.gamma_a if g.gamma_a is not None else zero,
            g.gamma_b if g.gamma_b is not None else zero,
        )


def pair_frequencies(prevalence, psa_i, psb_i, psa_j, psb_j, gamma_a=0, gamma_b=0) -> dict:
    """Voting-pattern frequencies of a correlated pair (``aa, ab, ba, bb``)."""
    pa, pb = prevalence, 1 - prevalence
    return {
        "aa": pa * (psa_i * psa_j + gamma_a) + pb * ((1 - psb_i) * (1 - psb_j) + gamma_b),
        "ab": pa * (psa_i * (1 - psa_j) - gamma_a) + pb * ((1 - psb_i) * psb_j - gamma_b),
        "ba": pa * ((1 - psa_i) * psa_j - gamma_a) + pb * (psb_i * (1 - psb_j) - gamma_b),
        "bb": pa * ((1 - psa_i) * (1 - psa_j) + gamma_a) + pb * (psb_i * psb_j + gamma_b),
    }


@dataclass(frozen=True)
class PairCandidate:
    """A full pair evaluation to test against observations."""

    prevalence: Fraction
    psa_i: Fraction
    psb_i: Fraction
    psa_j: Fraction
    psb_j: Fraction
    gamma_a: Fraction = Fraction(0)
    gamma_b: Fraction = Fraction(0)

    @classmethod
    def from_ground_truth(cls, gt: PairGroundTruth) -> "PairCandidate":
        ev_i, ev_j = gt.evaluations()
        g = gt.correlation()
        return cls(ev_i.prevalence, ev_i.psa, ev_i.psb, ev_j.psa, ev_j.psb, g.gamma_a, g.gamma_b)


def gb_residuals(candidate: PairCandidate, observed: PairSketch) -> tuple:
    """The six basis polynomials evaluated at ``candidate``.

    All six vanish exactly when the candidate reproduces the observed pair
    sketch.  Elements 5 and 6 pair ``(psa - fa)`` with ``gamma_b`` and
    ``(psb - fb)`` with ``gamma_a``; that is the combination lying in the
    ideal of the pair postulates.
    """
    c = candidate
    s_i, s_j = observed.single(1), observed.single(2)
    delta = observed.delta()
    pa, pb = c.prevalence, 1 - c.prevalence
    da_i, db_i = c.psa_i - s_i.fa, c.psb_i - s_i.fb
    da_j, db_j = c.psa_j - s_j.fa, c.psb_j - s_j.fb
    ga, gb = c.gamma_a - delta, c.gamma_b - delta
    cross = da_i * db_j
    return (
        pa * da_i - pb * db_i,
        pa * da_j - pb * db_j,
        da_i * db_j - db_i * da_j,
        cross + pa * ga + pb * gb,
        cross * (da_i + db_i) + da_i * gb + db_i * ga,
        cross * (da_j + db_j) + da_j * gb + db_j * ga,
    )


@dataclass
class GammaSolution:
    """Correlations consistent with a pair sketch given both evaluations.

    ``rank`` is the rank of the linear system in ``(gamma_a, gamma_b)`` and
    ``segment`` its intersection with the joint-count bounds.  Realizable
    joint counts form the progression ``(raaa0 + k*step_a, rbbb0 + k*step_b)``
    for ``k`` in ``[0, count)``.
    """

    rank: int
    equations: list
    segment: tuple[PairCorrelation, PairCorrelation] | None
    Qa: int
    Qb: int
    prod_a: Fraction
    prod_b: Fraction
    raaa0: int
    rbbb0: int
    step_a: int
    step_b: int
    count: int

    def _gamma(self, raaa, rbbb) -> PairCorrelation:
        return PairCorrelation((raaa - self.prod_a) / self.Qa, (rbbb - self.prod_b) / self.Qb)

    def point(self, k: int) -> tuple[int, int, PairCorrelation]:
        if not 0 <= k < self.count:
            raise IndexError(k)
        x, y = self.raaa0 + k * self.step_a, self.rbbb0 + k * self.step_b
        return x, y, self._gamma(x, y)

    @property
    def integer_points(self) -> list[tuple[int, int, PairCorrelation]]:
        return [self.point(k) for k in range(self.count)]

    @property
    def correlations(self) -> list[PairCorrelation]:
        return [pt[2] for pt in self.integer_points]

    @property
    def is_unique(self) -> bool:
        return self.count == 1

    @property
    def representative(self) -> PairCorrelation:
        """Smallest ``gamma_a**2 + gamma_b**2``; ties go to the smaller gamma_a."""
        g0 = self.point(0)[2]
        va, vb = Fraction(self.step_a, self.Qa), Fraction(self.step_b, self.Qb)
        ks = {0, self.count - 1}
        if va or vb:
            k_star = -(g0.gamma_a * va + g0.gamma_b * vb) / (va * va + vb * vb)
            for k in (math.floor(k_star), math.ceil(k_star)):
                ks.add(min(max(k, 0), self.count - 1))
        pts = [self.point(k)[2] for k in sorted(ks)]
        return min(pts, key=lambda g: (g.norm2(), g.gamma_a))

    def __contains__(self, g: PairCorrelation) -> bool:
        raaa = g.gamma_a * self.Qa + self.prod_a
        rbbb = g.gamma_b * self.Qb + self.prod_b
        if raaa.denominator != 1 or rbbb.denominator != 1:
            return False
        return any(
            self.point(k)[:2] == (raaa, rbbb)
            for k in _lattice_index(int(raaa) - self.raaa0, int(rbbb) - self.rbbb0, self.step_a, self.step_b, self.count)
        )


def _lattice_index(dx, dy, sa, sb, count):
    if sa:
        k, rem = divmod(dx, sa)
        return [k] if not rem and 0 <= k < count and k * sb == dy else []
    if sb:
        k, rem = divmod(dy, sb)
        return [k] if not rem and 0 <= k < count and dx == 0 else []
    return [0] if dx == 0 and dy == 0 and count else []


def _solve_linear_int(A, B, C, x_rng, y_rng):
    """Integer ``(x, y)`` in the boxes with ``A x + B y = C`` (rational A, B, C).

    Returns ``(x0, y0, dx, dy, count)``; ``count`` may be 0.
    """
    den = math.lcm(A.denominator, B.denominator, C.denominator)
    a, b, c = int(A * den), int(B * den), int(C * den)
    (xl, xh), (yl, yh) = x_rng, y_rng
    if a == 0 and b == 0:
        raise ValueError("no equation")
    if b == 0:
        if c % a:
            return 0, 0, 0, 0, 0
        x = c // a
        if not xl <= x <= xh or yl > yh:
            return 0, 0, 0, 0, 0
        return x, yl, 0, 1, yh - yl + 1
    if a == 0:
        if c % b:
            return 0, 0, 0, 0, 0
        y = c // b
        if not yl <= y <= yh or xl > xh:
            return 0, 0, 0, 0, 0
        return xl, y, 1, 0, xh - xl + 1
    g, u, v = _egcd(a, b)
    if c % g:
        return 0, 0, 0, 0, 0
    x0, y0 = u * (c // g), v * (c // g)
    dx, dy = b // g, -(a // g)
    if dx < 0:
        dx, dy = -dx, -dy
    # x0 + k dx in [xl, xh]
    k_lo = -((x0 - xl) // dx)
    k_hi = (xh - x0) // dx
    # y0 + k dy in [yl, yh]
    if dy > 0:
        k_lo = max(k_lo, -((y0 - yl) // dy))
        k_hi = min(k_hi, (yh - y0) // dy)
    else:
        k_lo = max(k_lo, -((yh - y0) // -dy))
        k_hi = min(k_hi, (y0 - yl) // -dy)
    if k_lo > k_hi:
        return 0, 0, 0, 0, 0
    return x0 + k_lo * dx, y0 + k_lo * dy, dx, dy, k_hi - k_lo + 1


def _egcd(a, b):
    """``(g, u, v)`` with ``a*u + b*v = g = gcd(a, b) > 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    aa, bb = a, b
    while bb:
        q = aa // bb
        aa, bb = bb, aa - q * bb
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if aa < 0:
        aa, x0, y0 = -aa, -x0, -y0
    return aa, x0, y0


def _reduce(rows):
    """Rank and solution of ``alpha*x + beta*y + c = 0`` rows, exactly.

    Returns ``(rank, point_or_line)`` or raises when inconsistent; for rank 1
    the line is given as one representative row.
    """
    live = [r for r in rows if r[0] or r[1]]
    if any(not (r[0] or r[1]) and r[2] for r in rows):
        return None, None
    if not live:
        return 0, None
    a1, b1, c1 = live[0]
    for a2, b2, c2 in live[1:]:
        det = a1 * b2 - a2 * b1
        if det:
            x = (b1 * c2 - b2 * c1) / det
            y = (a2 * c1 - a1 * c2) / det
            if all(a * x + b * y + c == 0 for a, b, c in live):
                return 2, (x, y)
            return None, None
    # all rows proportional; check the constants agree
    for a2, b2, c2 in live[1:]:
        k = a2 / a1 if a1 else b2 / b1
        if c2 != k * c1:
            return None, None
    return 1, live[0]


def solve_gamma(ev_i: SingleEvaluation, ev_j: SingleEvaluation, observed: PairSketch) -> GammaSolution:
    """Every ``(gamma_a, gamma_b)`` consistent with ``observed`` given both evaluations.

    The residuals 4-6 of :func:`gb_residuals` are affine in the correlations;
    their solution set is intersected with the joint-count bounds and then
    restricted to values giving integer joint counts.  Raises
    :class:`InconsistentEvaluationError` when nothing survives.
    """
    Q = observed.Q
    if ev_i.Q != Q or ev_j.Q != Q:
        raise InconsistentEvaluationError("evaluations and sketch have different Q")
    if ev_i.Qa != ev_j.Qa:
        raise InconsistentEvaluationError("evaluations disagree on Qa")
    qa, qb = ev_i.Qa, ev_i.Qb
    if qa == 0 or qb == 0:
        raise ValueError("correlations are undefined when Qa is 0 or Q")
    for k, ev in ((1, ev_i), (2, ev_j)):
        if ev.Ra != observed.single(k).ra:
            raise InconsistentEvaluationError(
                f"evaluation {ev.as_tuple()} implies {ev.Ra} a-votes, observed {observed.single(k).ra}"
            )

    def residuals(ga, gb):
        cand = PairCandidate(ev_i.prevalence, ev_i.psa, ev_i.psb, ev_j.psa, ev_j.psb, ga, gb)
        return gb_residuals(cand, observed)[3:]

    base = residuals(Fraction(0), Fraction(0))
    unit_a = residuals(Fraction(1), Fraction(0))
    unit_b = residuals(Fraction(0), Fraction(1))
    rows = [(ua - z, ub - z, z) for z, ua, ub in zip(base, unit_a, unit_b)]
    rank, sol = _reduce(rows)
    if rank is None:
        raise InconsistentEvaluationError("logically inconsistent individuals: no correlation solves the pair postulates")

    la, ua = _frechet(ev_i.psa, ev_j.psa)
    lb, ub = _frechet(ev_i.psb, ev_j.psb)
    segment = _clip(rank, sol, (la, ua), (lb, ub))

    prod_a = Fraction(ev_i.Raa * ev_j.Raa, qa)
    prod_b = Fraction(ev_i.Rbb * ev_j.Rbb, qb)
    ra_lo, ra_hi = max(0, ev_i.Raa + ev_j.Raa - qa), min(ev_i.Raa, ev_j.Raa)
    rb_lo, rb_hi = max(0, ev_i.Rbb + ev_j.Rbb - qb), min(ev_i.Rbb, ev_j.Rbb)

    ra_rng, rb_rng = (ra_lo, ra_hi), (rb_lo, rb_hi)
    if rank == 2:
        x, y = sol
        raaa, rbbb = x * qa + prod_a, y * qb + prod_b
        ok = (raaa.denominator == 1 and rbbb.denominator == 1
              and ra_lo <= raaa <= ra_hi and rb_lo <= rbbb <= rb_hi)
        lattice = (int(raaa), int(rbbb), 0, 0, 1) if ok else (0, 0, 0, 0, 0)
    elif rank == 1:
        # alpha (raaa - prod_a)/qa + beta (rbbb - prod_b)/qb + c = 0
        alpha, beta, c = sol
        A, B = alpha / qa, beta / qb
        lattice = _solve_linear_int(A, B, A * prod_a + B * prod_b - c, ra_rng, rb_rng)
    else:
        # every joint count is allowed; enumerate raaa as the index
        if rb_lo == rb_hi:
            lattice = (ra_lo, rb_lo, 1, 0, ra_hi - ra_lo + 1)
        elif ra_lo == ra_hi:
            lattice = (ra_lo, rb_lo, 0, 1, rb_hi - rb_lo + 1)
        else:
            raise ValueError("correlations are unconstrained in both labels")

    if lattice[4] == 0:
        raise InconsistentEvaluationError(
            "logically inconsistent individuals: no integer joint counts reproduce the pair sketch"
        )
    return GammaSolution(rank, rows, segment, qa, qb, prod_a, prod_b, *lattice)


def _clip(rank, sol, box_a, box_b):
    la, ua = box_a
    lb, ub = box_b
    if rank == 2:
        x, y = sol
        if la <= x <= ua and lb <= y <= ub:
            g = PairCorrelation(x, y)
            return g, g
        return None
    if rank == 0:
        return PairCorrelation(la, lb), PairCorrelation(ua, ub)
    alpha, beta, c = sol
    if not beta:
        x = -c / alpha
        if la <= x <= ua:
            return PairCorrelation(x, lb), PairCorrelation(x, ub)
        return None
    # y = -(alpha x + c)/beta is monotone in x; clip x so y stays in [lb, ub]
    lo, hi = la, ua
    for bound in (lb, ub):
        if alpha:
            x_at = -(beta * bound + c) / alpha
            if (-alpha / beta) > 0:
                lo, hi = (max(lo, x_at), hi) if bound == lb else (lo, min(hi, x_at))
            else:
                lo, hi = (lo, min(hi, x_at)) if bound == lb else (max(lo, x_at), hi)
        else:
            y = -c / beta
            if not lb <= y <= ub:
                return None
    if lo > hi:
        return None
    return (PairCorrelation(lo, -(alpha * lo + c) / beta), PairCorrelation(hi, -(alpha * hi + c) / beta))
