from fractions import Fraction as F

import pytest

from algeval.sketch import Sketch

PREVALENCE = F(19, 20)
ACCURACIES = [(F(18, 25), F(11, 100)), (F(41, 50), F(19, 50)), (F(71, 100), F(43, 50))]
COUNTS = {
    "aaa": 2010437, "aab": 931913, "aba": 448913, "abb": 251237,
    "baa": 776713, "bab": 330937, "bba": 171437, "bbb": 78413,
}


@pytest.fixture
def synthetic_sketch():
    return Sketch.from_counts(COUNTS)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")
