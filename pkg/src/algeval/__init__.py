"""Exact algebraic evaluation of binary classifiers without an answer key."""

__version__ = "0.1.0"

from .exact import AlgebraicValue, Kind, decimal_render, solve_quadratic, sqrt_exact
from .sketch import LabelStream, Sketch, SingleSketch, PairSketch, TrioSketch, ingest, read_stream, write_stream
from .single import SingleEvaluation, consistent_with, count_all, enumerate_all, posterior_counts
from .pair import PairCorrelation, PairGroundTruth, pair_frequencies, solve_gamma
from .trio import Alarm, evaluate_trio, moments, prevalence_quadratic
from .baselines import mv_grade, platanios_solve
from .synthetic import correlated_test, independent_frequencies, sample_independent_test, sample_test
from .estimators import IndependentEvaluator, MajorityVoteGrader, AgreementEvaluator

__all__ = [
    "AlgebraicValue", "Kind", "decimal_render", "solve_quadratic", "sqrt_exact",
    "LabelStream", "Sketch", "SingleSketch", "PairSketch", "TrioSketch", "ingest", "read_stream", "write_stream",
    "SingleEvaluation", "consistent_with", "count_all", "enumerate_all", "posterior_counts",
    "PairCorrelation", "PairGroundTruth", "pair_frequencies", "solve_gamma",
    "Alarm", "evaluate_trio", "moments", "prevalence_quadratic",
    "mv_grade", "platanios_solve",
    "correlated_test", "independent_frequencies", "sample_independent_test", "sample_test",
    "IndependentEvaluator", "MajorityVoteGrader", "AgreementEvaluator",
]
