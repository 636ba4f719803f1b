"""Command-line front end.

Exit codes: 0 success, 1 negative verdict (``verify-stationary`` found the state
not stationary, ``partition`` found no decomposition), 2 invalid spec or
arguments, 3 numerical invariant violated during a run.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bounds, harness, stationary
from .config import ExperimentSpec, SpecError, load_spec, load_suite
from .errors import Infeasible, NumericalViolation, QWSearchError

EXIT_OK, EXIT_NEGATIVE, EXIT_SPEC, EXIT_NUMERIC = 0, 1, 2, 3


def _summary(spec: ExperimentSpec, series: harness.TimeSeries) -> str:
    parts = [f"{spec.name}: {len(series) - 1} steps"]
    if "overlap" in series.columns:
        parts.append(f"min overlap {series['overlap'].min():.6f}")
    if "p_m" in series.columns:
        pm = series["p_m"]
        parts.append(f"p_M initial {pm[0]:.6g} max {pm.max():.6g}")
    return ", ".join(parts)


def _write_or_print(spec: ExperimentSpec, series, out: Path | None, fmt: str | None) -> None:
    fmt = fmt or spec.fmt
    path = out or spec.output_path()
    if path is None:
        sys.stdout.write(harness.to_csv(series) if fmt == "csv" else harness.to_json(series))
    else:
        harness.emit(series, fmt, path)
        print(_summary(spec, series))


def cmd_run(args) -> int:
    spec = load_spec(args.config)
    series = harness.run_experiment(spec)
    _write_or_print(spec, series, args.output, args.format)
    return EXIT_OK


def cmd_suite(args) -> int:
    specs = load_suite(args.directory)
    results = harness.run_suite(specs, fail_fast=not args.collect_errors, workers=args.workers)
    status = EXIT_OK
    for spec, res in zip(specs, results):
        if isinstance(res, Exception):
            print(f"{spec.name}: FAILED: {res}", file=sys.stderr)
            code = EXIT_NUMERIC if isinstance(res, NumericalViolation) else EXIT_SPEC
            status = max(status, code)
            continue
        path = spec.output_path()
        if args.output_dir is not None:
            path = args.output_dir / f"{spec.name}.{spec.fmt}"
        if path is None:
            print(_summary(spec, res))
        else:
            harness.emit(res, spec.fmt, path)
            print(_summary(spec, res))
    return status


def _stationary_candidate(graph, marked):
    """Declared partition, else a searched one, else the generic linear solve."""
    if marked.partition is not None:
        return "declared partition", stationary.partition_state(graph, marked)
    part = stationary.find_exceptional_partition(graph, marked.marked)
    if part is not None:
        cfg = stationary.MarkedConfig(marked.marked, part)
        return f"partition {list(part)}", stationary.partition_state(graph, cfg)
    return "linear solve", stationary.solve_correction_weights(graph, marked.marked)


def cmd_verify(args) -> int:
    spec = load_spec(args.config)
    graph, marked = spec.build()
    try:
        how, state = _stationary_candidate(graph, marked)
    except Infeasible as exc:
        print(f"no stationary state of this family: {exc}")
        return EXIT_NEGATIVE
    check = stationary.is_stationary(state, marked, args.tol, graph=graph)
    report = stationary.check_general_conditions(state, marked, args.tol, graph=graph)
    print(f"construction: {how}")
    print(f"baseline a = {state.baseline:.17g}")
    for (u, v), l in sorted(state.corrections.items()):
        print(f"  edge ({u}, {v}): l = {l:.17g}")
    print(f"residual ||U'phi - phi|| = {check.residual:.3e} "
          f"({'stationary' if check.stationary else 'NOT stationary'} at tol {args.tol:g})")
    for line in report.lines():
        print(line)
    if args.json is not None:
        args.json.write_text(state.to_json(indent=1) + "\n")
    return EXIT_OK if check.stationary else EXIT_NEGATIVE


def cmd_bound(args) -> int:
    value = bounds.pair_pm_bound(args.degree, args.edges)
    print(f"closed form: {value:.17g}")
    if args.bruteforce:
        res = bounds.maximize_pm_bruteforce(args.degree, (2 * args.edges) ** -0.5)
        print(f"brute force: {res.ceiling:.17g} at x1={res.optimizer[0]:.6g} "
              f"x2={res.optimizer[1]:.6g}")
    return EXIT_OK


def cmd_partition(args) -> int:
    spec = load_spec(args.config)
    graph, marked = spec.build()
    part = stationary.find_exceptional_partition(graph, marked.marked, cap=args.cap)
    if part is None:
        print("no exceptional partition")
        return EXIT_NEGATIVE
    for group in part:
        kind = stationary.MarkedConfig.group_kind(group)
        print(f"{kind}: {' '.join(str(v) for v in group)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwsearch",
                                description="Coined quantum-walk search with multiple marked vertices.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one experiment config")
    r.add_argument("config", type=Path)
    r.add_argument("-o", "--output", type=Path, default=None, help="override output path")
    r.add_argument("--format", choices=("csv", "json"), default=None)
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("suite", help="run every *.cfg in a directory, in name order")
    s.add_argument("directory", type=Path)
    s.add_argument("--output-dir", type=Path, default=None)
    s.add_argument("--collect-errors", action="store_true",
                   help="keep going after a failing spec")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_suite)

    v = sub.add_parser("verify-stationary", help="build a stationary state and check it")
    v.add_argument("config", type=Path)
    v.add_argument("--tol", type=float, default=stationary.DEFAULT_TOL)
    v.add_argument("--json", type=Path, default=None, help="write the state as JSON")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bound", help="p_M ceiling for an equal-degree adjacent pair")
    b.add_argument("--degree", "-d", type=int, required=True)
    b.add_argument("--edges", "-m", type=int, required=True)
    b.add_argument("--bruteforce", action="store_true")
    b.set_defaults(func=cmd_bound)

    q = sub.add_parser("partition", help="search for an exceptional decomposition")
    q.add_argument("config", type=Path)
    q.add_argument("--cap", type=int, default=stationary.DEFAULT_SEARCH_CAP)
    q.set_defaults(func=cmd_partition)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except NumericalViolation as exc:
        print(f"numerical violation: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (QWSearchError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
