import time

from hypothesis import given, settings, strategies as st

from algeval.single import SingleEvaluation, consistent_with, count_all, enumerate_all, export_plane, posterior_counts
from algeval.sketch import SingleSketch


def test_count_all_closed_form():
    assert count_all(0) == 1
    assert count_all(1000) == 167_668_501
    for q in range(8):
        assert count_all(q) == sum(1 for _ in enumerate_all(q))


def test_consistent_plane_small():
    rows = [ev.as_tuple() for ev in consistent_with(SingleSketch.of(2, 0))]
    assert rows == [(0, 0, 0), (1, 1, 0), (2, 2, 0)]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=12).flatmap(lambda q: st.tuples(st.just(q), st.integers(0, q))))
def test_consistent_equals_filter(args):
    Q, ra = args
    sk = SingleSketch.of(ra, Q - ra)
    brute = [ev for ev in enumerate_all(Q) if ev.Ra == ra]
    assert list(consistent_with(sk)) == brute


def test_posterior_counts_match_plane():
    sk = SingleSketch.of(4, 3)
    counts = posterior_counts(sk)
    plane = list(consistent_with(sk))
    for qa, n in counts.items():
        assert n == sum(ev.Qa == qa for ev in plane)


def test_evaluation_properties():
    ev = SingleEvaluation(10, 4, 3, 5)
    assert ev.Qb == 6 and ev.correct == 8 and ev.Ra == 3 + 6 - 5
    assert SingleEvaluation(3, 0, 0, 1).psa is None


def test_export_plane_header():
    text = export_plane(SingleSketch.of(1, 1))
    assert text.splitlines()[0] == "Qa,Raa,Rbb"
    assert len(text.splitlines()) == 1 + sum(posterior_counts(SingleSketch.of(1, 1)).values())


def test_enumeration_speed_q200():
    start = time.perf_counter()
    n = sum(1 for _ in enumerate_all(200))
    assert n == count_all(200)
    assert time.perf_counter() - start < 10
