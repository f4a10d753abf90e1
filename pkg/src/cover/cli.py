"""Command-line entry point (``cover``).

Exit status is 0 whenever the analysis ran (the verdict is in the JSON
report on stdout) and 2 for usage, parse or validation errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import CoverError

log = logging.getLogger("cover")


def _consts(items: list[str]) -> dict[str, int]:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--const expects NAME=INT, got {item!r}")
        out[name.strip()] = int(value)
    return out


def _default_pack(mode) -> str:
    return "mpi_f08" if mode.value == "fortran" else "mpi_c"


def cmd_check(args) -> int:
    from .alias import compute_alias
    from .contracts import collect_attachments, validate
    from .dynamic import run_dynamic, write_trace
    from .frontends import load_generic_map
    from .ir import parse_program
    from .modes import LanguageMode
    from .static import run_static

    text = Path(args.program).read_text(encoding="utf-8")
    mode = LanguageMode.parse(args.lang) if args.lang else None
    program = parse_program(text, mode)
    gmap = load_generic_map(args.gmap) if args.gmap else None
    packs = args.contracts or [_default_pack(program.mode)]
    table = collect_attachments(program, packs, gmap)
    issues = validate(table, program, gmap)
    for issue in issues:
        print(issue, file=sys.stderr)
    if any(i.severity == "error" for i in issues):
        return 2

    if args.dump_alias:
        print(compute_alias(program).dump())
        return 0

    case = Path(args.program).stem
    reports = []
    if args.mode in ("static", "both"):
        reports.append(run_static(program, table, case=case, gmap=gmap, warn_weak_alias=args.warn_weak_alias))
    if args.mode in ("dynamic", "both") or args.trace_out:
        report, trace = run_dynamic(program, table, case=case, gmap=gmap, consts=_consts(args.const))
        if args.mode in ("dynamic", "both"):
            reports.append(report)
        if args.trace_out:
            write_trace(trace, args.trace_out)
    for r in reports:
        print(r.text(), file=sys.stderr)
    payload = reports[0].to_json() if len(reports) == 1 else [r.to_json() for r in reports]
    print(json.dumps(payload, indent=2))
    return 0


def cmd_trace_check(args) -> int:
    from .contracts import ContractTable, load_pack
    from .contracts.table import validate
    from .dynamic import check_trace, read_trace

    trace = read_trace(args.trace, args.lang)
    packs = [load_pack(p) for p in (args.contracts or [_default_pack(trace.mode)])]
    attachments = [a for p in packs for a in p.attachments]
    for p in packs:
        if p.mode is not trace.mode:
            raise CoverError(f"contract pack {p.name} is {p.mode}-mode but the trace is {trace.mode}-mode")
    table = ContractTable.build(attachments, trace.mode)
    issues = [i for i in validate(table) if i.severity == "error"]
    for issue in issues:
        print(issue, file=sys.stderr)
    if issues:
        return 2
    report = check_trace(trace, table, case=Path(args.trace).stem)
    print(report.text(), file=sys.stderr)
    print(json.dumps(report.to_json(), indent=2))
    return 0


def cmd_bench(args) -> int:
    from .harness import compare_modes, run_corpus

    engines = tuple(args.engines.split(",")) if args.engines else ("static", "dynamic")
    report = run_corpus(args.corpus, engines, timeout=args.timeout, jobs=args.jobs)
    data = report.to_json()
    if args.report:
        Path(args.report).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    print(report.text(), file=sys.stderr)
    print(compare_modes(report).text(), file=sys.stderr)
    print(json.dumps({"summary": data["summary"], "diff": data["diff"]["deltas"]}, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cover", description="Contract checker for parallel-API usage in mini-IR programs.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="analyze one mini-IR program")
    check.add_argument("program", metavar="PROG.ir")
    check.add_argument("--mode", choices=("static", "dynamic", "both"), default="both")
    check.add_argument("--lang", choices=("c", "fortran"), help="language mode (default: the file's mode directive)")
    check.add_argument("--contracts", action="append", metavar="PACK",
                       help="contract pack file or shipped name (mpi_c, mpi_f08); repeatable")
    check.add_argument("--dump-alias", action="store_true", help="print alias classes instead of checking")
    check.add_argument("--trace-out", metavar="F", help="write the dynamic trace as JSON Lines")
    check.add_argument("--warn-weak-alias", action="store_true",
                       help="downgrade races matched only through unified aliases to warnings")
    check.add_argument("--gmap", metavar="FILE", help="generic-name map (default: shipped f08_names.map)")
    check.add_argument("--const", action="append", metavar="NAME=INT", help="override a const for the dynamic run")
    check.set_defaults(func=cmd_check)

    tc = sub.add_parser("trace-check", help="check a recorded JSON Lines trace")
    tc.add_argument("trace", metavar="TRACE.jsonl")
    tc.add_argument("--contracts", action="append", metavar="PACK")
    tc.add_argument("--lang", choices=("c", "fortran"), help="mode for traces without a summary record")
    tc.set_defaults(func=cmd_trace_check)

    bench = sub.add_parser("bench", help="classify a labeled corpus with both engines")
    bench.add_argument("corpus", nargs="?", metavar="CORPUS_DIR", help="default: the shipped corpus")
    bench.add_argument("--report", metavar="OUT.json")
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--timeout", type=float, default=30.0)
    bench.add_argument("--engines", help="comma-separated subset of static,dynamic")
    bench.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (CoverError, OSError, ValueError) as exc:
        print(f"cover: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
