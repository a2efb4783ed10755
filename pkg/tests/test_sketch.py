import io
from fractions import Fraction as F

import pytest

from algeval.sketch import (
    IngestionError, LabelStream, PairSketch, Sketch, SingleSketch, TrioSketch, ingest, read_stream,
    sketch_from_json, write_stream,
)


def test_trio_marginals(synthetic_sketch):
    sk = synthetic_sketch
    assert isinstance(sk, TrioSketch) and sk.Q == 5_000_000
    assert [sk.single(i).fb for i in (1, 2, 3)] == [F(543, 2000), F(19, 100), F(637, 2000)]
    p12 = sk.pair(1, 2)
    assert isinstance(p12, PairSketch)
    assert p12.faa == F(58847, 100000) and p12.fbb == F(4997, 100000)
    assert p12.agreement_rate() == F(15961, 25000)
    assert sk.pair(1, 3).agreement_rate() == F(28687, 50000)
    assert sk.pair(2, 3).agreement_rate() == F(1948, 3125)


def test_delta_identity_both_labels(synthetic_sketch):
    for i, j in ((1, 2), (1, 3), (2, 3)):
        p = synthetic_sketch.pair(i, j)
        assert p.delta() == p.delta_from_a()
    assert synthetic_sketch.pair(1, 2).delta() == F(-323, 200000)


def test_ingest_and_merge():
    rows = [("a", "b"), ("a", "a"), ("b", "b"), ("a", "b")]
    sk = ingest(rows)
    assert sk.counts == {"aa": 1, "ab": 2, "ba": 0, "bb": 1}
    merged = ingest(rows[:2]) + ingest(rows[2:])
    assert merged == sk


def test_ingest_errors_report_row():
    with pytest.raises(IngestionError) as exc:
        ingest([("a", "b"), ("a",)])
    assert exc.value.row == 2
    with pytest.raises(IngestionError):
        ingest([("a", "c")])
    with pytest.raises(IngestionError):
        ingest([])


def test_csv_round_trip():
    stream = LabelStream.from_decisions([("a", "b", "a"), ("b", "b", "a")], truth=["a", "b"])
    text = write_stream(stream)
    assert text.splitlines()[0] == "item_id,c1,c2,c3,truth"
    back = read_stream(io.StringIO(text))
    assert back.decisions == stream.decisions and back.truth == stream.truth


def test_csv_bad_header_and_label():
    with pytest.raises(IngestionError):
        read_stream(io.StringIO("id,c1\n1,a\n"))
    with pytest.raises(IngestionError) as exc:
        read_stream(io.StringIO("item_id,c1\n1,a\n2,x\n"))
    assert exc.value.row == 2


def test_json_round_trip(synthetic_sketch):
    assert sketch_from_json(synthetic_sketch.dumps()) == synthetic_sketch
    with pytest.raises(ValueError):
        sketch_from_json({"Q": 3, "counts": {"a": 1, "b": 1}})


def test_single_sketch_rates():
    s = SingleSketch.of(3, 1)
    assert (s.fa, s.fb, s.Q) == (F(3, 4), F(1, 4), 4)


def test_bad_marginalization(synthetic_sketch):
    with pytest.raises(ValueError):
        synthetic_sketch.marginalize([1, 2, 3])
    with pytest.raises(ValueError):
        synthetic_sketch.marginalize([4])


def test_empty_sketch_rejected():
    with pytest.raises(ValueError):
        Sketch.from_counts({"a": 0, "b": 0})
