"""Command-line entry point: ``pas-opt <subcommand> INSTANCE [options]``.

Exit codes: 0 success, 1 model-level failure (invalid or infeasible
instance, unknown ids), 2 usage or I/O error, 3 a limit stopped a solve
before optimality was proven.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
import warnings
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .instance import ParseError, load_instance, validate_instance
from .model import DomainError, as_fraction, build_model, objective_value
from .report import (
    BaselineWarning,
    UnknownIdError,
    compare_baseline,
    floor_heatmap,
    format_table,
    load_baseline,
    room_usage,
)
from .solution import SolutionFormatError, dump_solution, read_solution, solution_to_dict, unknown_ids
from .solver import (
    CoolingSchedule,
    InfeasibleError,
    NoSolutionError,
    OracleTooLargeError,
    SolveLimits,
    anneal_improve,
    brute_force,
    solve_exact,
)
from .solver.common import counting_certificate
from .sweep import grid, monotonicity_problems, sweep

EXIT_OK, EXIT_MODEL, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3
BUNDLED = Path(__file__).parent / "data"
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("pas_opt")


class ModelFailure(Exception):
    """Reported with exit code 1."""


def _alpha(text: str):
    try:
        return as_fraction(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _alpha_list(text: str):
    return [_alpha(p) for p in text.split(",") if p.strip()]


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pas-opt", description="Classroom allocation with accessibility penalties.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("instance", help="directory of CSV tables, instance JSON file, or a bundled name (case_study, table1)")
    common.add_argument("--enforce-capacity", action="store_true", help="forbid rooms smaller than the enrollment")
    common.add_argument("--same-room", action="store_true", help="keep all meetings of a discipline in one room")
    common.add_argument("--distinct-days", action="store_true", help="put a discipline's meetings on different days")
    common.add_argument("--out", default=".", help="output directory (default: current directory)")
    common.add_argument("--seed", type=int, default=0, help="seed for the annealing polish (default 0)")

    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--max-seconds", type=_positive_float, default=60.0, help="time limit per solve (default 60)")
    limits.add_argument("--max-nodes", type=_positive_int, default=None, help="node limit per solve")
    limits.add_argument("--timings", action="store_true", help="write measured seconds into output files")

    sub.add_parser("validate", parents=[common], help="check an instance and list violations")

    s = sub.add_parser("solve", parents=[common, limits], help="solve one alpha; writes solution.json")
    s.add_argument("--alpha", type=_alpha, default=as_fraction("0.5"), help="weight of the penalty term (default 0.5)")

    s = sub.add_parser("sweep", parents=[common, limits], help="solve a grid of alphas; writes calibration.csv")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--grid", type=_alpha_list, default=None, help="comma-separated alphas (default 0,0.25,0.5,0.75,1)")
    g.add_argument("--step", type=_alpha, default=None, help="evenly spaced alphas from 0 to 1")
    s.add_argument("--jobs", type=_positive_int, default=1, help="solve up to N alphas in parallel")

    s = sub.add_parser("report", parents=[common], help="usage.csv and heatmap.csv from solution files")
    s.add_argument("solutions", nargs="+", help="solution.json files; one heatmap column each")
    s.add_argument("--baseline", default=None, help="baseline.csv to compare with the first solution")

    s = sub.add_parser("compare", parents=[common], help="compare a baseline allocation with a solution")
    s.add_argument("solution", help="solution.json of the optimized allocation")
    s.add_argument("--baseline", required=True, help="baseline.csv (discipline,timeslot,room)")

    s = sub.add_parser("oracle", parents=[common], help="exhaustive search for tiny instances")
    s.add_argument("--alpha", type=_alpha, default=as_fraction("0.5"))
    s.add_argument("--cell-limit", type=_positive_int, default=10**7, help="refuse above this many leaves")
    return p


def _load(args):
    path = Path(args.instance)
    if not path.exists() and (BUNDLED / args.instance).is_dir():
        path = BUNDLED / args.instance
    if not path.exists():
        raise OSError(f"no such instance: {args.instance}")
    inst = load_instance(path)
    changes = {}
    if args.enforce_capacity:
        changes["enforce_capacity"] = True
    if args.same_room:
        changes["same_room_per_discipline"] = True
    if args.distinct_days:
        changes["distinct_days"] = True
    return (inst.with_options(**changes) if changes else inst), path


def _require_valid(inst):
    bad = validate_instance(inst)
    if bad:
        raise ModelFailure("\n".join(str(v) for v in bad))


def _limits(args) -> SolveLimits:
    return SolveLimits(max_nodes=args.max_nodes, max_seconds=args.max_seconds)


def _fmt_alpha(a) -> str:
    return f"{float(a):.4f}"


def _breakdown_text(br) -> str:
    rows = [[k, f"{v:.4f}" if isinstance(v, float) else v] for k, v in br.as_dict().items()]
    return format_table(["term", "value"], rows)


class Run:
    """Output directory bookkeeping plus the provenance manifest."""

    def __init__(self, args, inst_path, inst):
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files = []
        self.started = time.perf_counter()
        self.manifest = {
            "version": __version__,
            "command": args.command,
            "instance": str(inst_path),
            "seed": args.seed,
            "options": asdict(inst.options),
        }
        for key in ("alpha", "max_seconds", "max_nodes", "jobs", "timings", "cell_limit"):
            if hasattr(args, key):
                v = getattr(args, key)
                self.manifest[key] = float(v) if key == "alpha" else v

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        self.files.append(name)
        return path

    def finish(self, **extra):
        self.manifest.update(extra)
        self.manifest["outputs"] = sorted(self.files)
        self.manifest["elapsed_seconds"] = round(time.perf_counter() - self.started, 3)
        (self.out / "run_manifest.json").write_text(json.dumps(self.manifest, indent=2) + "\n", encoding="utf-8")


def cmd_validate(args) -> int:
    inst, _ = _load(args)
    bad = validate_instance(inst)
    if bad:
        for v in bad:
            print(v)
        return EXIT_MODEL
    cert = counting_certificate(inst)
    if cert:
        print(cert)
        return EXIT_MODEL
    print("OK")
    return EXIT_OK


def _solve_one(inst, alpha, args):
    try:
        a, br, stats = solve_exact(build_model(inst, alpha), _limits(args))
    except InfeasibleError as exc:
        raise ModelFailure(f"infeasible: {exc}") from None
    except NoSolutionError as exc:
        raise ModelFailure(f"no solution within limits (best bound {float(exc.best_bound):.4f})") from None
    if not stats.proven_optimal:
        polished = anneal_improve(inst, a, alpha, CoolingSchedule(), seed=args.seed)
        pbr = objective_value(polished, inst, alpha)
        if pbr.fo < br.fo:
            log.info("annealing improved fo from %s to %s", float(br.fo), float(pbr.fo))
            a, br = polished, pbr
            stats.incumbent_fo = pbr.fo
    return a, br, stats


def cmd_solve(args) -> int:
    inst, path = _load(args)
    _require_valid(inst)
    run = Run(args, path, inst)
    a, br, stats = _solve_one(inst, args.alpha, args)
    doc = solution_to_dict(inst, args.alpha, a, br, stats, seconds=None if args.timings else 0.0)
    run.write("solution.json", dump_solution(doc))
    print(f"alpha = {float(args.alpha)}  seed = {args.seed}")
    print(_breakdown_text(br), end="")
    status = "proven optimal" if stats.proven_optimal else f"limit hit; bound {float(stats.best_bound):.4f}"
    print(f"{status}; {stats.nodes_explored} nodes, {stats.elapsed:.2f} s")
    run.finish(proven_optimal=stats.proven_optimal, solve_seconds=round(stats.elapsed, 3))
    return EXIT_OK if stats.proven_optimal else EXIT_LIMIT


def cmd_sweep(args) -> int:
    inst, path = _load(args)
    _require_valid(inst)
    cert = counting_certificate(inst)
    if cert:
        raise ModelFailure(f"infeasible: {cert}")
    alphas = grid(step=args.step, alphas=args.grid)
    run = Run(args, path, inst)
    run.manifest["grid"] = [float(a) for a in alphas]
    try:
        table = sweep(inst, alphas, _limits(args), jobs=args.jobs)
    except NoSolutionError as exc:
        raise ModelFailure(f"a row found no solution within limits (best bound {float(exc.best_bound):.4f})") from None
    run.write("calibration.csv", table.to_csv(timings=args.timings))
    for r in table.rows:
        doc = solution_to_dict(inst, r.alpha, r.assignment, r.breakdown, r.stats, seconds=None if args.timings else 0.0)
        run.write(f"solutions/alpha-{_fmt_alpha(r.alpha)}.json", dump_solution(doc))
    print(f"seed = {args.seed}")
    print(table.to_csv(timings=True).replace(",", "  "), end="")
    problems = monotonicity_problems(table)
    for p in problems:
        print(f"warning: {p}", file=sys.stderr)
    run.finish(
        all_proven=table.all_proven,
        solve_seconds=[round(r.stats.elapsed, 3) for r in table.rows],
        raw_y=[r.raw_y for r in table.rows],
    )
    return EXIT_OK if table.all_proven else EXIT_LIMIT


def _read_checked(path, inst):
    rec = read_solution(path)
    bad = unknown_ids(rec.assignment, inst)
    if bad:
        raise ModelFailure(f"{path}: unknown ids: {', '.join(bad)}")
    return rec


def _label(rec, used: set) -> str:
    base = f"{float(rec.alpha):g}"
    label, n = base, 2
    while label in used:
        label, n = f"{base}#{n}", n + 1
    used.add(label)
    return label


def _compare_text(base_path, rec, inst) -> str:
    base = load_baseline(base_path)
    bad = unknown_ids(base, inst)
    if bad:
        raise ModelFailure(f"{base_path}: unknown ids: {', '.join(bad)}")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", BaselineWarning)
        cmp = compare_baseline(base, rec.assignment, inst, rec.alpha)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    return f"alpha = {float(rec.alpha)}\n" + cmp.to_text()


def cmd_report(args) -> int:
    inst, path = _load(args)
    run = Run(args, path, inst)
    recs = [_read_checked(p, inst) for p in args.solutions]
    used = set()
    heat = floor_heatmap([(_label(r, used), r.assignment) for r in recs], inst)
    usage = room_usage(recs[0].assignment, inst)
    run.write("usage.csv", usage.to_csv())
    run.write("heatmap.csv", heat.to_csv())
    print(usage.to_text())
    print(heat.to_text(), end="")
    if args.baseline:
        text = _compare_text(args.baseline, recs[0], inst)
        run.write("comparison.txt", text)
        print()
        print(text, end="")
    run.finish(solutions=list(args.solutions), baseline=args.baseline)
    return EXIT_OK


def cmd_compare(args) -> int:
    inst, path = _load(args)
    run = Run(args, path, inst)
    rec = _read_checked(args.solution, inst)
    text = _compare_text(args.baseline, rec, inst)
    run.write("comparison.txt", text)
    print(text, end="")
    run.finish(solution=args.solution, baseline=args.baseline)
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst, path = _load(args)
    _require_valid(inst)
    run = Run(args, path, inst)
    try:
        a, br = brute_force(inst, args.alpha, args.cell_limit)
    except OracleTooLargeError as exc:
        raise ModelFailure(str(exc)) from None
    except InfeasibleError as exc:
        raise ModelFailure(f"infeasible: {exc}") from None
    run.write("solution.json", dump_solution(solution_to_dict(inst, args.alpha, a, br)))
    print(_breakdown_text(br), end="")
    run.finish()
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "report": cmd_report,
    "compare": cmd_compare,
    "oracle": cmd_oracle,
}


def _setup_logging() -> bool:
    level = os.environ.get("PAS_OPT_LOG", "error").strip().lower()
    if level not in LOG_LEVELS:
        print(f"pas-opt: PAS_OPT_LOG must be one of {', '.join(LOG_LEVELS)}, got {level!r}", file=sys.stderr)
        return False
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("pas_opt").setLevel(LOG_LEVELS[level])
    return True


def main(argv=None) -> int:
    if not _setup_logging():
        return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except ModelFailure as exc:
        print(f"pas-opt: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ParseError, SolutionFormatError, UnknownIdError) as exc:
        print(f"pas-opt: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"pas-opt: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
