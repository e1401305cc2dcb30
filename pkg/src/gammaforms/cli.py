"""Command-line verification harness.

    gammaforms run <scenario.toml> [--seed N] [--suite NAME]...
                   [--format text|machine] [--couplings MODE]
    gammaforms constraints [--format text|machine]
    gammaforms list

Exit status: 0 all checks passed, 1 at least one check failed, 2 input
error.  Machine output is line-delimited JSON with a stable field set;
re-running with the same seed reproduces it byte for byte (timings are
only shown in the text format).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from .dirac import derive_constraints
from .scenario import SUITE_ORDER, ScenarioError, load_scenario
from .suites import SUITES, SuiteContext, detect_policy

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _builtin_dir():
    return resources.files("gammaforms") / "scenarios"


def builtin_scenarios() -> list[Path]:
    return sorted(Path(str(_builtin_dir())).glob("*.toml"))


def _resolve_scenario(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    candidate = Path(str(_builtin_dir())) / f"{arg}.toml"
    if candidate.exists():
        return candidate
    raise ScenarioError(f"no such scenario file or built-in name: {arg}")


def _emit(records, fmt, stream, timings=None):
    if fmt == "machine":
        for rec in records:
            stream.write(json.dumps(rec, sort_keys=True) + "\n")
        return
    for rec in records:
        status = rec["status"].upper()
        res = rec["max_residual"]
        res_txt = "exact 0" if res == 0.0 else f"max residual {res:.3e}"
        line = f"[{status:4s}] {rec['check']}  ({rec['mode']}, {res_txt})"
        if rec.get("detail"):
            line += f"\n        {rec['detail']}"
        stream.write(line + "\n")
    if timings:
        for suite, dt in timings.items():
            stream.write(f"# {suite}: {dt:.2f}s\n")


def cmd_run(args) -> int:
    try:
        path = _resolve_scenario(args.scenario)
        sc = load_scenario(path)
        seed = sc.seed if args.seed is None else args.seed
        geom = sc.build_geometry(seed=seed)
        couplings = sc.build_couplings(mode_override=args.couplings)
        psi = sc.build_spinor()
        mass = sc.build_mass()
    except (ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    requested = tuple(args.suite) if args.suite else sc.suites
    if not requested:
        requested = ("geometry", "dirac")
    unknown = [s for s in requested if s not in SUITES]
    if unknown:
        print(f"error: unknown suites {unknown}", file=sys.stderr)
        return EXIT_INPUT
    ordered = [s for s in SUITE_ORDER if s in requested]

    ctx = SuiteContext(
        geom=geom,
        couplings=couplings,
        psi=psi,
        mass=mass,
        seed=seed,
        policy=detect_policy(geom, psi),
    )
    records = []
    timings = {}
    failed = False
    for suite in ordered:
        t0 = time.monotonic()
        for result in SUITES[suite](ctx):
            records.append(result.as_record(suite, seed))
            if result.status == "fail":
                failed = True
        timings[suite] = time.monotonic() - t0
    summary = {
        "scenario": sc.name,
        "seed": seed,
        "policy": ctx.policy,
        "checks": len(records),
        "failed": sum(1 for r in records if r["status"] == "fail"),
        "status": "fail" if failed else "pass",
    }
    if args.format == "machine":
        _emit(records + [{"summary": summary}], "machine", sys.stdout)
    else:
        print(f"scenario: {sc.name} (seed {seed}, {ctx.policy} equality)")
        if sc.description:
            print(f"  {sc.description}")
        _emit(records, "text", sys.stdout, timings)
        print(f"result: {summary['status'].upper()} "
              f"({summary['checks'] - summary['failed']}/{summary['checks']} checks)")
    return EXIT_FAIL if failed else EXIT_PASS


def cmd_constraints(args) -> int:
    sol = derive_constraints()
    if args.format == "machine":
        payload = {
            "equations": [
                {"channel": ch, "clifford": label, "lhs": str(eq.lhs), "rhs": str(eq.rhs)}
                for ch, label, eq in sol.equations
            ],
            "real_parts": {k: str(v) for k, v in sol.real_parts.items()},
            "real_couplings": list(sol.real_couplings),
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(sol.describe())
    return EXIT_PASS


def cmd_list(_args) -> int:
    for path in builtin_scenarios():
        try:
            sc = load_scenario(path)
        except ScenarioError as exc:
            print(f"{path.stem}: unreadable ({exc})")
            continue
        suites = ", ".join(sc.suites)
        print(f"{sc.name:28s} {sc.description}")
        print(f"{'':28s}   suites: {suites}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gammaforms",
        description="Symbolic verification of exterior-calculus identities and "
        "Dirac-operator consistency on metric-affine backgrounds.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario's check suites")
    run.add_argument("scenario", help="scenario file path or built-in name")
    run.add_argument("--seed", type=int, default=None,
                     help="override the scenario seed (sampling and random geometry)")
    run.add_argument("--suite", action="append", default=None,
                     help="run only the named suite (repeatable)")
    run.add_argument("--format", choices=("text", "machine"), default="text")
    run.add_argument("--couplings",
                     choices=("zero", "constrained", "symbolic", "explicit"),
                     default=None, help="override the scenario coupling mode")
    run.set_defaults(func=cmd_run)

    cons = sub.add_parser("constraints",
                          help="derive and print the coupling-constant constraints")
    cons.add_argument("--format", choices=("text", "machine"), default="text")
    cons.set_defaults(func=cmd_constraints)

    lst = sub.add_parser("list", help="list built-in scenarios")
    lst.set_defaults(func=cmd_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
