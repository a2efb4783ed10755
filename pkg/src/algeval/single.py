"""The space of single-classifier evaluations ``(Qa, Raa, Rbb)``.

Before responses are seen every integer triple with ``0 <= Raa <= Qa`` and
``0 <= Rbb <= Q - Qa`` is possible.  Seeing the classifier emit ``Ra``
a-labels leaves only the triples on the plane ``Raa - Rbb = Ra - Qb``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .sketch import SingleSketch

__all__ = [
    "SingleEvaluation",
    "enumerate_all",
    "count_all",
    "consistent_with",
    "posterior_counts",
    "export_plane",
]


@dataclass(frozen=True, order=True)
class SingleEvaluation:
    Q: int
    Qa: int
    Raa: int
    Rbb: int

    def __post_init__(self):
        if not (0 <= self.Qa <= self.Q and 0 <= self.Raa <= self.Qa and 0 <= self.Rbb <= self.Q - self.Qa):
            raise ValueError(f"counts out of range: {self}")

    @property
    def Qb(self) -> int:
        return self.Q - self.Qa

    @property
    def prevalence(self) -> Fraction:
        return Fraction(self.Qa, self.Q)

    @property
    def psa(self) -> Fraction | None:
        """Accuracy on a-questions; None when there are none."""
        return Fraction(self.Raa, self.Qa) if self.Qa else None

    @property
    def psb(self) -> Fraction | None:
        return Fraction(self.Rbb, self.Qb) if self.Qb else None

    @property
    def correct(self) -> int:
        return self.Raa + self.Rbb

    @property
    def Ra(self) -> int:
        """a-labels this evaluation implies: correct a's plus wrong b's."""
        return self.Raa + self.Qb - self.Rbb

    def as_tuple(self) -> tuple[int, int, int]:
        return self.Qa, self.Raa, self.Rbb


def enumerate_all(Q: int) -> Iterator[SingleEvaluation]:
    if Q < 0:
        raise ValueError("Q must be non-negative")
    for qa in range(Q + 1):
        for raa in range(qa + 1):
            for rbb in range(Q - qa + 1):
                yield SingleEvaluation(Q, qa, raa, rbb)


def count_all(Q: int) -> int:
    if Q < 0:
        raise ValueError("Q must be non-negative")
    return (Q + 1) * (Q + 2) * (Q + 3) // 6


def consistent_with(sketch: SingleSketch) -> Iterator[SingleEvaluation]:
    """Evaluations whose implied a-label count equals the observed ``Ra``.

    Generated directly: for each ``Qa`` and ``Raa`` the value of ``Rbb`` is
    forced, so the cost is quadratic in ``Q``.
    """
    Q, ra = sketch.Q, sketch.ra
    for qa in range(Q + 1):
        qb = Q - qa
        # Rbb = Raa - Ra + Qb must lie in [0, Qb]
        lo = max(0, ra - qb)
        hi = min(qa, ra)
        for raa in range(lo, hi + 1):
            yield SingleEvaluation(Q, qa, raa, raa - ra + qb)


def posterior_counts(sketch: SingleSketch) -> dict[int, int]:
    """Number of consistent evaluations for each value of ``Qa``."""
    Q, ra = sketch.Q, sketch.ra
    out = {}
    for qa in range(Q + 1):
        qb = Q - qa
        out[qa] = max(0, min(qa, ra) - max(0, ra - qb) + 1)
    return out


def export_plane(sketch: SingleSketch, dest=None) -> str | None:
    """CSV ``Qa,Raa,Rbb`` rows of the consistent plane."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Qa", "Raa", "Rbb"])
    for ev in consistent_with(sketch):
        w.writerow(ev.as_tuple())
    text = buf.getvalue()
    if dest is None:
        return text
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w", newline="") as fh:
            fh.write(text)
    return None
