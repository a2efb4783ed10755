"""Voting-pattern counts ("data sketches") for one to three binary classifiers.

A sketch stores integer counts for every aligned voting pattern; frequencies
are derived as exact fractions over ``Q``.  Classifiers are numbered from 1,
matching the ``c1, c2, c3`` columns of the CSV format.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

LABELS = ("a", "b")

__all__ = [
    "LABELS",
    "IngestionError",
    "LabelStream",
    "Sketch",
    "SingleSketch",
    "PairSketch",
    "TrioSketch",
    "patterns",
    "ingest",
    "read_stream",
    "write_stream",
    "sketch_from_json",
]


class IngestionError(ValueError):
    """Malformed input row; ``row`` is the 1-based data row number."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


def patterns(n: int) -> list[str]:
    return ["".join(p) for p in itertools.product(LABELS, repeat=n)]


@dataclass
class LabelStream:
    """Per-item decisions of ``n_classifiers`` classifiers, optional answer key."""

    item_ids: list[str]
    decisions: list[tuple[str, ...]]
    truth: list[str] | None = None

    def __post_init__(self):
        if len(self.item_ids) != len(self.decisions):
            raise IngestionError("item_ids and decisions differ in length")
        if self.truth is not None and len(self.truth) != len(self.decisions):
            raise IngestionError("truth column differs in length from decisions")
        # validate distinct rows first; only scan row by row to locate an error
        distinct = set(self.decisions)
        widths = {len(v) for v in distinct}
        if (len(widths) <= 1 and widths <= {1, 2, 3} and all(x in LABELS for v in distinct for x in v)
                and (self.truth is None or set(self.truth) <= set(LABELS))):
            return
        n = None
        for row, votes in enumerate(self.decisions, start=1):
            if n is None:
                n = len(votes)
                if not 1 <= n <= 3:
                    raise IngestionError(f"expected 1 to 3 classifiers, got {n}", row)
            elif len(votes) != n:
                raise IngestionError(f"expected {n} decisions, got {len(votes)}", row)
            for v in votes:
                if v not in LABELS:
                    raise IngestionError(f"unknown label {v!r}", row)
        if self.truth is not None:
            for row, t in enumerate(self.truth, start=1):
                if t not in LABELS:
                    raise IngestionError(f"unknown truth label {t!r}", row)

    @classmethod
    def from_decisions(cls, decisions: Iterable[Sequence[str]], truth=None) -> "LabelStream":
        decisions = [tuple(d) for d in decisions]
        ids = [str(i) for i in range(1, len(decisions) + 1)]
        return cls(ids, decisions, list(truth) if truth is not None else None)

    @property
    def n_classifiers(self) -> int:
        return len(self.decisions[0]) if self.decisions else 0

    def __len__(self):
        return len(self.decisions)

    @property
    def has_truth(self) -> bool:
        return self.truth is not None


@dataclass(frozen=True)
class Sketch:
    """Counts of every voting pattern over ``{a, b}**n``."""

    n: int
    _counts: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if len(self._counts) != 2 ** self.n:
            raise ValueError(f"need {2 ** self.n} counts, got {len(self._counts)}")
        if any(c < 0 for c in self._counts):
            raise ValueError("counts must be non-negative")
        if not any(self._counts):
            raise ValueError("a sketch needs at least one item")

    @classmethod
    def from_counts(cls, counts: Mapping[str, int]) -> "Sketch":
        """Build the sketch subclass matching the pattern length."""
        if not counts:
            raise ValueError("empty counts")
        n = len(next(iter(counts)))
        pats = patterns(n)
        unknown = set(counts) - set(pats)
        if unknown:
            raise ValueError(f"unknown patterns {sorted(unknown)}")
        klass = _BY_SIZE[n]
        return klass(n, tuple(int(counts.get(p, 0)) for p in pats))

    @property
    def counts(self) -> dict[str, int]:
        return dict(zip(patterns(self.n), self._counts))

    @property
    def Q(self) -> int:
        return sum(self._counts)

    def count(self, pattern: str) -> int:
        return self._counts[patterns(self.n).index(pattern)]

    def frequency(self, pattern: str) -> Fraction:
        return Fraction(self.count(pattern), self.Q)

    @property
    def frequencies(self) -> dict[str, Fraction]:
        q = self.Q
        return {p: Fraction(c, q) for p, c in self.counts.items()}

    def marginalize(self, subset: Iterable[int]) -> "Sketch":
        """Sum out every classifier not in ``subset`` (1-based numbers)."""
        keep = sorted(set(subset))
        if not 1 <= len(keep) < self.n or any(not 1 <= k <= self.n for k in keep):
            raise ValueError(f"bad classifier subset {subset!r} for {self.n} classifiers")
        out = dict.fromkeys(patterns(len(keep)), 0)
        for pat, c in self.counts.items():
            out["".join(pat[k - 1] for k in keep)] += c
        return Sketch.from_counts(out)

    def __add__(self, other: "Sketch") -> "Sketch":
        if not isinstance(other, Sketch):
            return NotImplemented
        if other.n != self.n:
            raise ValueError("cannot merge sketches of different classifier counts")
        return type(self)(self.n, tuple(x + y for x, y in zip(self._counts, other._counts)))

    def to_json(self) -> dict:
        return {"Q": self.Q, "counts": self.counts}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


class SingleSketch(Sketch):
    @property
    def ra(self) -> int:
        return self._counts[0]

    @property
    def rb(self) -> int:
        return self._counts[1]

    @property
    def fa(self) -> Fraction:
        return Fraction(self.ra, self.Q)

    @property
    def fb(self) -> Fraction:
        return Fraction(self.rb, self.Q)

    @classmethod
    def of(cls, ra: int, rb: int) -> "SingleSketch":
        return cls(1, (ra, rb))


class PairSketch(Sketch):
    faa = property(lambda self: self.frequency("aa"))
    fab = property(lambda self: self.frequency("ab"))
    fba = property(lambda self: self.frequency("ba"))
    fbb = property(lambda self: self.frequency("bb"))

    def single(self, i: int) -> SingleSketch:
        return self.marginalize([i])

    def agreement_rate(self) -> Fraction:
        """Frequency with which both classifiers emit the same label."""
        return self.faa + self.fbb

    def delta(self) -> Fraction:
        """Covariance of the b-votes, ``fbb - fb_i * fb_j``."""
        return self.fbb - self.single(1).fb * self.single(2).fb

    def delta_from_a(self) -> Fraction:
        return self.faa - self.single(1).fa * self.single(2).fa


class TrioSketch(Sketch):
    def pair(self, i: int, j: int) -> PairSketch:
        return self.marginalize([i, j])

    def single(self, i: int) -> SingleSketch:
        return self.marginalize([i])


_BY_SIZE = {1: SingleSketch, 2: PairSketch, 3: TrioSketch}


def ingest(stream: LabelStream | Iterable[Sequence[str]]) -> Sketch:
    """Tally aligned voting patterns in one pass; the answer key is ignored."""
    if isinstance(stream, LabelStream):
        rows = stream.decisions
    else:
        rows = stream
    tally: dict[str, int] = {}
    n = None
    for row, votes in enumerate(rows, start=1):
        if n is None:
            n = len(votes)
            if n not in _BY_SIZE:
                raise IngestionError(f"expected 1 to 3 classifiers, got {n}", row)
        elif len(votes) != n:
            raise IngestionError(f"expected {n} decisions, got {len(votes)}", row)
        key = "".join(votes)
        if any(v not in LABELS for v in votes):
            raise IngestionError(f"unknown label in {tuple(votes)!r}", row)
        tally[key] = tally.get(key, 0) + 1
    if n is None:
        raise IngestionError("empty stream")
    return Sketch.from_counts({p: tally.get(p, 0) for p in patterns(n)})


def read_stream(source) -> LabelStream:
    """Read ``item_id,c1[,c2[,c3]][,truth]`` CSV from a path or text file."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="") as fh:
            return read_stream(fh)
    reader = csv.reader(source)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise IngestionError("missing header") from None
    if not header or header[0] != "item_id":
        raise IngestionError("header must start with item_id", 0)
    has_truth = header[-1] == "truth"
    voters = header[1:-1] if has_truth else header[1:]
    expected = [f"c{k}" for k in range(1, len(voters) + 1)]
    if voters != expected or not 1 <= len(voters) <= 3:
        raise IngestionError(f"expected classifier columns {expected[:3] or ['c1']}, got {voters}", 0)
    ids, decisions, truth = [], [], []
    width = len(header)
    for row, rec in enumerate(reader, start=1):
        if not rec:
            continue
        if len(rec) != width:
            raise IngestionError(f"expected {width} fields, got {len(rec)}", row)
        rec = [r.strip() for r in rec]
        votes = tuple(rec[1 : 1 + len(voters)])
        for v in votes:
            if v not in LABELS:
                raise IngestionError(f"unknown label {v!r}", row)
        if has_truth and rec[-1] not in LABELS:
            raise IngestionError(f"unknown truth label {rec[-1]!r}", row)
        ids.append(rec[0])
        decisions.append(votes)
        if has_truth:
            truth.append(rec[-1])
    if not decisions:
        raise IngestionError("empty stream")
    return LabelStream(ids, decisions, truth if has_truth else None)


def write_stream(stream: LabelStream, dest=None) -> str | None:
    """Write the CSV form; returns the text when ``dest`` is None."""
    buf = io.StringIO() if dest is None else None
    fh = buf
    close = False
    if dest is not None:
        if hasattr(dest, "write"):
            fh = dest
        else:
            fh = open(dest, "w", newline="")
            close = True
    try:
        w = csv.writer(fh, lineterminator="\n")
        header = ["item_id"] + [f"c{k}" for k in range(1, stream.n_classifiers + 1)]
        if stream.has_truth:
            header.append("truth")
        w.writerow(header)
        for k, (item, votes) in enumerate(zip(stream.item_ids, stream.decisions)):
            row = [item, *votes]
            if stream.has_truth:
                row.append(stream.truth[k])
            w.writerow(row)
    finally:
        if close:
            fh.close()
    return buf.getvalue() if buf is not None else None


def sketch_from_json(data: Mapping | str) -> Sketch:
    if isinstance(data, str):
        data = json.loads(data)
    sk = Sketch.from_counts(data["counts"])
    if "Q" in data and int(data["Q"]) != sk.Q:
        raise ValueError(f"Q={data['Q']} disagrees with counts total {sk.Q}")
    return sk
