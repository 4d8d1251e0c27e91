"""``fw`` command line: run scenario tasks and write JSON/CSV artifacts.

Exit codes: 0 ok, 2 scenario/parse error, 3 semiclassical validity failure,
4 numerical failure, 5 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    FieldConsistencyError,
    FieldDomainError,
    GapClosure,
    NotExactCase,
    ScenarioError,
    SingularSqrt,
    StiffnessError,
    Unsupported,
    ValidityError,
)
from .scenario import (
    canonical_json,
    list_presets,
    load_scenario,
    preset_scenario,
    run_check,
    run_ehrenfest,
    run_probe,
    run_simulate,
    run_transform,
    validate_scenario,
)

EXIT_OK, EXIT_PARSE, EXIT_VALIDITY, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4, 5
COMMANDS = ("transform", "simulate", "ehrenfest", "probe", "check", "validate", "presets")


def _hbar_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if len(vals) < 3 or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("need at least three positive hbar values")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fw", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--scenario", type=Path, help="TOML scenario file")
    src.add_argument("--preset", help="run a catalog preset instead of a file")
    ap.add_argument("--out", type=Path, default=None, help="output directory")
    ap.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
    ap.add_argument("--hbar-scale", type=_hbar_list, default=None, help="comma-separated hbar values for probe")
    ap.add_argument("--tolerance", type=float, default=None, help="pass threshold / integrator rtol")
    ap.add_argument("--seed", type=int, default=None, help="seed for randomized sweeps")
    return ap


def _load(args):
    if args.preset:
        return preset_scenario(args.preset)
    if args.scenario is None:
        raise ScenarioError("--scenario or --preset is required")
    return load_scenario(args.scenario)


def _emit(text: str, out: Path | None, name: str) -> None:
    sys.stdout.write(text)
    if out is not None:
        (out / name).write_text(text)


def run(argv=None) -> int:
    """Entry point; returns the exit status."""
    args = build_parser().parse_args(argv)
    try:
        if args.command == "presets":
            _emit(canonical_json({"presets": list_presets()}), args.out, "presets.json")
            return EXIT_OK
        scn = _load(args)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
        if args.command == "validate":
            _emit(canonical_json(validate_scenario(scn)), args.out, "validate.json")
            return EXIT_OK
        if args.command != scn.task:
            raise ScenarioError(f"scenario task is {scn.task!r}, command is {args.command!r}")
        if args.command == "transform":
            summary = run_transform(scn, jobs=args.jobs, tolerance=args.tolerance)
        elif args.command == "simulate":
            summary = run_simulate(scn, args.out, tolerance=args.tolerance)
        elif args.command == "probe":
            summary = run_probe(scn, jobs=args.jobs, hbar_values=args.hbar_scale)
        elif args.command == "ehrenfest":
            summary = run_ehrenfest(scn)
        else:
            summary = run_check(scn, seed=args.seed, tolerance=args.tolerance)
        summary["scenario"] = scn.data
        summary["seed"] = scn.seed if args.seed is None else args.seed
        name = scn.section("output").get("summary", "summary.json")
        _emit(canonical_json(summary), args.out, name)
        return EXIT_OK
    except ValidityError as exc:
        print(f"fw: validity: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except FieldConsistencyError as exc:
        loc = ", ".join(f"{v:.6g}" for v in exc.location)
        print(
            f"fw: field: {exc} [quantity={exc.quantity} max_deviation={exc.max_deviation:.3e} at ({loc})]",
            file=sys.stderr,
        )
        return EXIT_PARSE
    except (SingularSqrt, GapClosure, StiffnessError, NotExactCase, Unsupported, FieldDomainError) as exc:
        print(f"fw: numerical: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ScenarioError, ValueError) as exc:
        print(f"fw: scenario: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"fw: io: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
