"""Command line: verify-dga, bfs, gen, report.

Exit codes: 0 every check passes, 1 some axiom or check fails, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bfs_core.calibrate import MODES, CalibrationAmbiguous, CalibrationExhausted
from .bfs_core.comparison import SplittingMismatch
from .bfs_core.structure import TypecheckFailure
from .exactalg import PolyParseError
from .instances import SchemaError, gen_ci, gen_perturbed, gen_tensor, parse_instance, to_json
from .multialg import DualityFailure, koszul_algebra, verify_dga
from .pipeline import CORRUPTIONS, run_bfs
from .report import all_passed

OK, FAIL, BAD_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _load(path):
    try:
        return parse_instance(path)
    except FileNotFoundError as exc:
        raise UsageError(f"no such instance file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc


def cmd_verify_dga(args):
    spec = _load(args.file)
    checks = verify_dga(spec.M)
    checks += verify_dga(koszul_algebra(list(spec.sequence), name="K"))
    for c in checks:
        print(c.line())
    return OK if all_passed(checks) else FAIL


def cmd_bfs(args):
    spec = _load(args.file)
    r = None
    if args.r is not None:
        r = spec.ring.parse(args.r)
    try:
        rep, _ = run_bfs(spec, r=r, calibration=args.calibration, corrupt=args.corrupt)
    except TypecheckFailure as exc:
        print("TypecheckFailure: the tables do not typecheck as printed:")
        for p in exc.problems:
            print(f"  {p}")
        return FAIL
    except (CalibrationAmbiguous, CalibrationExhausted) as exc:
        print(f"{type(exc).__name__}: {exc}")
        return FAIL
    text = rep.to_text()
    print(text, end="")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
        (out / "report.json").write_text(rep.to_json() + "\n", encoding="utf-8")
    return OK if rep.passed else FAIL


def cmd_gen(args):
    if args.kind == "ci":
        spec = gen_ci(args.char)
    elif args.kind == "tensor":
        spec = gen_tensor(args.char, seed=args.seed)
    else:
        if not args.base:
            raise UsageError("gen perturbed needs --base <instance file>")
        spec = gen_perturbed(_load(args.base), args.seed)
    text = to_json(spec)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return OK


def cmd_report(args):
    path = Path(args.dir) / "report.json"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise UsageError(f"no report.json in {args.dir}") from exc
    print(f"instance {data['instance']}, r = {data['r']}, calibration {data['calibration_mode']}")
    total = bad = 0
    for stage, checks in data["stages"].items():
        n_bad = sum(1 for c in checks if not c["passed"])
        total += len(checks)
        bad += n_bad
        print(f"{stage}: {len(checks) - n_bad}/{len(checks)} pass")
        for c in checks:
            if not c["passed"]:
                print(f"  FAIL  {c['name']}  [{c['witness']}]")
    print(f"calibration repairs: {len(data['calibration_log'])}")
    print(f"total: {total - bad}/{total} pass")
    return OK if data["passed"] else FAIL


def build_parser():
    p = argparse.ArgumentParser(prog="bfsdg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-dga", help="check the DG axioms of an instance's M and K")
    s.add_argument("file")
    s.set_defaults(func=cmd_verify_dga)

    s = sub.add_parser("bfs", help="build F(alpha, r) and verify it")
    s.add_argument("file")
    s.add_argument("--r", help="override r (a polynomial in the instance's variables)")
    s.add_argument("--calibration", choices=MODES, default="full")
    s.add_argument("--out", help="directory for report.txt and report.json")
    s.add_argument("--corrupt", choices=CORRUPTIONS, help="negative control: corrupt one sign")
    s.set_defaults(func=cmd_bfs)

    s = sub.add_parser("gen", help="write an example instance")
    s.add_argument("kind", choices=("ci", "tensor", "perturbed"))
    s.add_argument("--char", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--base", help="base instance for perturbed")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("report", help="summarize a report directory")
    s.add_argument("dir")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        return args.func(args)
    except (UsageError, SchemaError, PolyParseError, SplittingMismatch, DualityFailure, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
