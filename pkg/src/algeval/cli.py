"""Command-line front end.

Exit status: 0 on success, 2 when an evaluator raised an alarm, 1 on error.
All JSON output is written with sorted keys so repeated runs are
byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import __version__
from .baselines import mv_grade, platanios_from_sketch
from .exact import AlgebraicValue, Kind, decimal_render, format_value
from .pair import InconsistentEvaluationError, PairGroundTruth, solve_gamma
from .single import count_all, enumerate_all, export_plane, posterior_counts
from .sketch import IngestionError, LabelStream, Sketch, SingleSketch, ingest, read_stream, sketch_from_json, write_stream
from .synthetic import SpecError, TrioGroundTruth, load_spec, synthesize
from .trio import PAIRS, Alarm, evaluate_trio, quadratic_curve

EXIT_OK, EXIT_ERROR, EXIT_ALARM = 0, 1, 2
METHODS = ("iae", "mv", "platanios", "pair", "single")
ENUMERATION_LIMIT = 200


class CliError(Exception):
    pass


# ---------------------------------------------------------------- rendering

def num(x, digits: int):
    """Exact string, kind and decimal rendering of a number (None passes through)."""
    if x is None:
        return None
    v = x if isinstance(x, AlgebraicValue) else AlgebraicValue(x)
    return {"exact": format_value(v), "kind": v.kind.value, "decimal": decimal_render(v, digits)}


def cell(x, digits: int) -> str:
    """Compact ``fraction (decimal)`` table cell."""
    if x is None:
        return "-"
    v = x if isinstance(x, AlgebraicValue) else AlgebraicValue(x)
    if v.kind is Kind.RATIONAL:
        return f"{format_value(v)} ({decimal_render(v, digits)})"
    return f"{v.kind.value} ({decimal_render(v, digits)})"


def dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ------------------------------------------------------------------ inputs

def load_input(path: str) -> tuple[LabelStream | None, Sketch]:
    """A CSV label stream or a JSON sketch."""
    if not os.path.exists(path):
        raise CliError(f"no such file: {path}")
    if path.endswith(".json"):
        with open(path) as fh:
            return None, sketch_from_json(json.load(fh))
    stream = read_stream(path)
    return stream, ingest(stream)


def parse_single_sketch(text: str, Q: int) -> SingleSketch:
    """``ra=2`` / ``ra=2,rb=0`` or a JSON sketch file."""
    if os.path.exists(text):
        with open(text) as fh:
            sk = sketch_from_json(json.load(fh))
        if not isinstance(sk, SingleSketch):
            raise CliError("enumerate needs a one-classifier sketch")
    else:
        fields = {}
        for part in text.split(","):
            key, _, val = part.partition("=")
            if key.strip() not in ("ra", "rb") or not val.strip().lstrip("-").isdigit():
                raise CliError(f"bad sketch spec {text!r}; use ra=N[,rb=M] or a JSON file")
            fields[key.strip()] = int(val)
        ra = fields.get("ra", Q - fields.get("rb", 0))
        rb = fields.get("rb", Q - ra)
        if ra < 0 or rb < 0:
            raise CliError(f"sketch counts must be non-negative, got ra={ra}, rb={rb}")
        sk = SingleSketch.of(ra, rb)
    if sk.Q != Q:
        raise CliError(f"sketch has Q={sk.Q} but Q={Q} was requested")
    return sk


# ---------------------------------------------------------------- reports

def _gt_section(stream: LabelStream, digits: int) -> dict:
    n = stream.n_classifiers
    ids = range(1, n + 1)
    truth = stream.truth
    Q = len(stream)
    qa = truth.count("a")
    classifiers = []
    for i in ids:
        raa = sum(1 for d, t in zip(stream.decisions, truth) if t == "a" and d[i - 1] == "a")
        rbb = sum(1 for d, t in zip(stream.decisions, truth) if t == "b" and d[i - 1] == "b")
        classifiers.append({
            "Raa": raa, "Rbb": rbb,
            "psa": num(Fraction(raa, qa) if qa else None, digits),
            "psb": num(Fraction(rbb, Q - qa) if Q - qa else None, digits),
        })
    pairs = {}
    for i in ids:
        for j in ids:
            if i < j:
                g = PairGroundTruth.from_stream(stream, i, j).correlation()
                pairs[f"{i}{j}"] = {"gamma_a": num(g.gamma_a, digits), "gamma_b": num(g.gamma_b, digits)}
    return {"Qa": qa, "prevalence": num(Fraction(qa, Q), digits), "classifiers": classifiers, "pairs": pairs}


def _gamma_section(sol, digits: int) -> dict:
    if isinstance(sol, Exception):
        return {"error": str(sol)}
    rep = sol.representative
    return {
        "rank": sol.rank,
        "count": sol.count,
        "unique": sol.is_unique,
        "gamma_a": num(rep.gamma_a, digits),
        "gamma_b": num(rep.gamma_b, digits),
    }


def _iae_section(sketch: Sketch, digits: int, better: bool, project: bool):
    report = evaluate_trio(sketch, assume_better_than_chance=better, project=project)
    m, quad = report.moments, report.quadratic
    sols = []
    for s in report.solutions:
        entry = {"prevalence": num(s.prevalence, digits), "error": s.error, "in_range": s.in_range}
        if s.accuracies is not None:
            entry["accuracies"] = [{"psa": num(a, digits), "psb": num(b, digits)} for a, b in s.accuracies]
        if s.projection is not None:
            entry["projection"] = {
                "Qa": s.projection[0].Qa,
                "classifiers": [{"Raa": ev.Raa, "Rbb": ev.Rbb} for ev in s.projection],
            }
            entry["pairs"] = {f"{i}{j}": _gamma_section(g, digits) for (i, j), g in sorted(s.gammas.items())}
        sols.append(entry)
    section = {
        "alarm": report.alarm.value,
        "moments": {
            "fb": [num(v, digits) for v in m.fb],
            "delta": {f"{i}{j}": num(m.delta[i, j], digits) for i, j in PAIRS},
            "T": num(m.t, digits),
        },
        "quadratic": {
            "a": num(quad.a, digits), "b": num(quad.b, digits), "c": num(quad.c, digits),
            "sqrt_term": num(quad.sqrt_term, digits),
        },
        "solutions": sols,
        "selected": report.selected,
    }
    return section, report


def _mv_section(stream: LabelStream, digits: int) -> dict:
    rep = mv_grade(stream)
    return {
        "Qa": rep.Qa_mv,
        "classifiers": [
            {"Raa": ev.Raa, "Rbb": ev.Rbb, "psa": num(ev.psa, digits), "psb": num(ev.psb, digits)}
            for ev in rep.evaluations
        ],
        "pairs": {
            f"{i}{j}": {"gamma_a": num(g.gamma_a, digits), "gamma_b": num(g.gamma_b, digits)}
            for (i, j), g in sorted(rep.gammas.items())
        },
    }


def _platanios_section(sketch: Sketch, digits: int):
    rep = platanios_from_sketch(sketch)
    return {
        "agreement": [num(a, digits) for a in rep.agreement],
        "c": num(rep.c, digits),
        "c_squared": num(rep.c_squared, digits),
        "branches": [[num(e, digits) for e in branch] for branch in rep.branches],
    }, rep


def _single_section(sketch: Sketch, digits: int) -> list:
    out = []
    for i in range(1, sketch.n + 1):
        s = sketch if sketch.n == 1 else sketch.marginalize([i])
        out.append({
            "ra": s.ra, "rb": s.rb,
            "fa": num(s.fa, digits),
            "consistent_evaluations": sum(posterior_counts(s).values()),
            "total_evaluations": count_all(s.Q),
        })
    return out


def _pair_section(stream, sketch: Sketch, iae_report, digits: int) -> dict:
    out = {}
    for i in range(1, sketch.n + 1):
        for j in range(i + 1, sketch.n + 1):
            ps = sketch if sketch.n == 2 else sketch.marginalize([i, j])
            entry = {"agreement": num(ps.agreement_rate(), digits), "delta": num(ps.delta(), digits)}
            evs = None
            if stream is not None and stream.has_truth:
                gt = PairGroundTruth.from_stream(stream, i, j)
                evs, entry["source"] = gt.evaluations(), "truth"
            elif iae_report is not None:
                sol = iae_report.selected_solution or next(
                    (s for s in reversed(iae_report.solutions) if s.projection is not None), None)
                if sol is not None and sol.projection is not None:
                    evs, entry["source"] = (sol.projection[i - 1], sol.projection[j - 1]), "iae"
            if evs is not None:
                if 0 < evs[0].Qa < evs[0].Q:
                    try:
                        entry["solution"] = _gamma_section(solve_gamma(evs[0], evs[1], ps), digits)
                    except InconsistentEvaluationError as exc:
                        entry["solution"] = {"error": str(exc)}
                else:
                    entry["solution"] = {"error": "one question type is empty"}
            out[f"{i}{j}"] = entry
    return out


def _default_methods(n: int, stream) -> list[str]:
    if n == 1:
        return ["single"]
    if n == 2:
        return ["pair"]
    return ["iae", "mv"] if stream is not None else ["iae"]


def evaluate_path(path: str, methods, digits: int, better: bool, project: bool = True) -> tuple[dict, list[str]]:
    stream, sketch = load_input(path)
    n = sketch.n
    methods = list(methods) if methods else _default_methods(n, stream)
    for meth in methods:
        if meth in ("iae", "mv", "platanios") and n != 3:
            raise CliError(f"method {meth} needs three classifiers, input has {n}")
        if meth == "pair" and n < 2:
            raise CliError("method pair needs at least two classifiers")
        if meth == "mv" and stream is None:
            raise CliError("method mv needs a label stream, not a sketch")
    result: dict = {"input": os.path.basename(path), "Q": sketch.Q, "n_classifiers": n,
                    "sketch": sketch.counts, "methods": {}}
    alarms: list[str] = []
    if stream is not None and stream.has_truth:
        result["methods"]["gt"] = _gt_section(stream, digits)
    iae_report = None
    for meth in methods:
        if meth == "iae":
            section, iae_report = _iae_section(sketch, digits, better, project)
            result["methods"]["iae"] = section
            if iae_report.alarm is not Alarm.NONE:
                alarms.append(f"iae:{iae_report.alarm.value}")
        elif meth == "mv":
            result["methods"]["mv"] = _mv_section(stream, digits)
        elif meth == "platanios":
            section, rep = _platanios_section(sketch, digits)
            result["methods"]["platanios"] = section
            if rep.kind is not Kind.RATIONAL:
                alarms.append(f"platanios:{rep.kind.value}")
        elif meth == "single":
            result["methods"]["single"] = _single_section(sketch, digits)
        elif meth == "pair":
            result["methods"]["pair"] = _pair_section(stream, sketch, iae_report, digits)
    result["alarms"] = alarms
    return result, alarms


# ---------------------------------------------------------------- commands

def cmd_enumerate(args) -> int:
    Q = args.Q
    if Q < 0:
        raise CliError("Q must be non-negative")
    if args.sketch is not None:
        sk = parse_single_sketch(args.sketch, Q)
        if args.posterior:
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["Qa", "count"])
            for qa, c in posterior_counts(sk).items():
                w.writerow([qa, c])
            emit(buf.getvalue(), args.out)
        else:
            emit(export_plane(sk), args.out)
        return EXIT_OK
    if not args.list:
        emit(f"{count_all(Q)}\n", args.out)
        return EXIT_OK
    if Q > ENUMERATION_LIMIT and not args.stream:
        raise CliError(f"full enumeration at Q={Q} has {count_all(Q)} rows; pass --stream to write it anyway")
    fh = sys.stdout if args.out is None else open(args.out, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["Qa", "Raa", "Rbb"])
        for ev in enumerate_all(Q):
            w.writerow(ev.as_tuple())
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_sketch(args) -> int:
    stream, sketch = load_input(args.input)
    emit(dump(sketch.to_json()), args.out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    result, alarms = evaluate_path(args.input, args.method, args.digits, args.assume_better_than_chance,
                                   project=not args.no_project)
    emit(dump(result), args.out)
    if args.curve:
        _, sketch = load_input(args.input)
        if sketch.n != 3:
            raise CliError("--curve needs three classifiers")
        from .trio import moments, prevalence_quadratic
        quad = prevalence_quadratic(moments(sketch))
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "value", "value_decimal"])
        for p, v in quadratic_curve(quad, args.samples):
            w.writerow([format_value(AlgebraicValue(p)), format_value(AlgebraicValue(v)), f"{float(v):.6e}"])
        with open(args.curve, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_ALARM if alarms else EXIT_OK


def cmd_synth(args) -> int:
    if not os.path.exists(args.spec):
        raise CliError(f"no such file: {args.spec}")
    spec = load_spec(args.spec)
    stream = synthesize(spec, Q=args.Q, seed=args.seed, exact_proportion=args.exact_proportion)
    emit(write_stream(stream), args.out)
    return EXIT_OK


_COMPARE_ROWS = ("Qa",) + tuple(f"{k}{i}" for i in (1, 2, 3) for k in ("psa", "psb"))


def _compare_one(path: str, digits: int, better: bool):
    stream, sketch = load_input(path)
    if sketch.n != 3:
        raise CliError(f"{path}: compare needs three classifiers")
    cols: dict[str, dict] = {}
    Q = sketch.Q
    if stream is not None and stream.has_truth:
        gt = TrioGroundTruth.from_stream(stream)
        cols["GT"] = {"Qa": gt.Qa}
        for i, ev in enumerate(gt.evaluations(), 1):
            cols["GT"][f"psa{i}"], cols["GT"][f"psb{i}"] = ev.psa, ev.psb
    report = evaluate_trio(sketch, assume_better_than_chance=better, project=True)
    sol = report.selected_solution or next((s for s in reversed(report.solutions) if s.projection is not None), None)
    if sol is not None:
        cols["iAE"] = {"Qa": sol.prevalence * Q}
        for i, (a, b) in enumerate(sol.accuracies, 1):
            cols["iAE"][f"psa{i}"], cols["iAE"][f"psb{i}"] = a, b
    if stream is not None:
        mv = mv_grade(stream)
        cols["MV"] = {"Qa": mv.Qa_mv}
        for i, ev in enumerate(mv.evaluations, 1):
            cols["MV"][f"psa{i}"], cols["MV"][f"psb{i}"] = ev.psa, ev.psb
    plat = platanios_from_sketch(sketch)
    cols["Platanios"] = {f"psa{i}": None for i in (1, 2, 3)}
    for i, e in enumerate(plat.branches[0], 1):
        # the agreement solution has one error rate per classifier, not one per label
        cols["Platanios"][f"psa{i}"] = 1 - e
        cols["Platanios"][f"psb{i}"] = 1 - e
    rows = []
    for q in _COMPARE_ROWS:
        rows.append([os.path.basename(path), q] + [cell(cols.get(c, {}).get(q), digits) for c in ("GT", "iAE", "MV", "Platanios")])
    alarms = [] if report.alarm is Alarm.NONE else [f"{path}:iae:{report.alarm.value}"]
    return rows, alarms


def _compare_job(job):
    return _compare_one(*job)


def cmd_compare(args) -> int:
    for path in args.inputs:
        if not os.path.exists(path):
            raise CliError(f"no such file: {path}")
    jobs = [(p, args.digits, args.assume_better_than_chance) for p in args.inputs]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_compare_job, jobs))
    else:
        results = [_compare_job(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["input", "quantity", "GT", "iAE", "MV", "Platanios"])
    alarms = []
    for rows, al in results:
        w.writerows(rows)
        alarms.extend(al)
    emit(buf.getvalue(), args.out)
    for a in alarms:
        print(f"alarm: {a}", file=sys.stderr)
    return EXIT_ALARM if alarms else EXIT_OK


# ------------------------------------------------------------------ parser

def _methods(text: str) -> list[str]:
    out = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in out if m not in METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown method(s) {bad}; choose from {', '.join(METHODS)}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="algeval", description="Exact algebraic evaluation of binary classifiers.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="count or list single-classifier evaluations")
    p.add_argument("Q", type=int)
    p.add_argument("--sketch", help="observed a-votes as ra=N[,rb=M] or a one-classifier sketch JSON")
    p.add_argument("--posterior", action="store_true", help="with --sketch, print consistent counts per Qa")
    p.add_argument("--list", action="store_true", help="list every evaluation as CSV")
    p.add_argument("--stream", action="store_true", help=f"allow listing above Q={ENUMERATION_LIMIT}")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sketch", help="tally voting patterns of a label stream")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sketch)

    p = sub.add_parser("evaluate", help="evaluate a label stream or sketch")
    p.add_argument("input", help="CSV stream or JSON sketch")
    p.add_argument("--method", type=_methods, default=None, help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("--assume-better-than-chance", action="store_true")
    p.add_argument("--no-project", action="store_true", help="skip integer projection and pair correlations")
    p.add_argument("--curve", help="also write prevalence quadratic samples to this CSV")
    p.add_argument("--samples", type=int, default=101)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic label stream from a JSON spec")
    p.add_argument("spec")
    p.add_argument("-Q", type=int, default=None, help="number of items (independent specs)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--exact-proportion", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="GT | iAE | MV | Platanios table for one or more streams")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("--assume-better-than-chance", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "digits", 3) < 1:
        parser.error("--digits must be at least 1")
    try:
        return args.func(args)
    except (CliError, IngestionError, SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
