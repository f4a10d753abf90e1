"""Corpus runner: TP/TN/FP/FN classification and C/Fortran parity tables."""

from __future__ import annotations

import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .contracts.packs import Pack, load_pack
from .contracts.table import collect_attachments, validate
from .errors import AnalysisTimeout, CorpusError, CoverError
from .ir.parser import parse_program
from .modes import LanguageMode

log = logging.getLogger(__name__)

ENGINES = ("static", "dynamic")
CLASSES = ("Init", "Race", "HandleLifecycle", "RMA", "Other")
OUTCOMES = ("TP", "TN", "FP", "FN", "TO")
STATIC_ONLY = "static-only"


def shipped_corpus() -> Path:
    return Path(__file__).resolve().parent / "corpus"


@dataclass(frozen=True)
class CorpusCase:
    id: str
    file: Path
    mode: LanguageMode
    expected: str  # "Error" | "NoError"
    error_class: str
    pair: str | None = None
    tags: tuple[str, ...] = ()
    pack: str = ""

    @property
    def static_only(self) -> bool:
        return STATIC_ONLY in self.tags


def load_manifest(directory: str | Path) -> list[CorpusCase]:
    root = Path(directory)
    path = root / "corpus.toml"
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorpusError(f"cannot read manifest {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise CorpusError(f"{path}: {exc}") from exc

    packs = data.get("packs", {})
    cases: list[CorpusCase] = []
    seen_ids: set[str] = set()
    seen_files: dict[Path, str] = {}
    for i, raw in enumerate(data.get("case", [])):
        where = f"{path}: case #{i + 1}"
        try:
            cid, rel, mode_s, expected, klass = (raw[k] for k in ("id", "file", "mode", "expected", "class"))
        except KeyError as exc:
            raise CorpusError(f"{where}: missing field {exc.args[0]!r}") from None
        if cid in seen_ids:
            raise CorpusError(f"{where}: duplicate case id {cid!r}")
        seen_ids.add(cid)
        try:
            mode = LanguageMode.parse(mode_s)
        except ValueError as exc:
            raise CorpusError(f"{where}: {exc}") from None
        if expected not in ("error", "noerror"):
            raise CorpusError(f"{where}: expected must be 'error' or 'noerror', got {expected!r}")
        if klass not in CLASSES:
            raise CorpusError(f"{where}: unknown class {klass!r}")
        file = (root / rel).resolve()
        if not file.is_file():
            raise CorpusError(f"{where}: program file {rel} does not exist")
        if file in seen_files:
            raise CorpusError(f"{where}: {rel} is already used by case {seen_files[file]!r}")
        seen_files[file] = cid
        pack = raw.get("pack") or packs.get(mode.value)
        if not pack:
            raise CorpusError(f"{where}: no contract pack for mode {mode.value}")
        pack_path = root / pack
        cases.append(
            CorpusCase(
                cid,
                file,
                mode,
                "Error" if expected == "error" else "NoError",
                klass,
                raw.get("pair"),
                tuple(raw.get("tags", ())),
                str(pack_path) if pack_path.is_file() else pack,
            )
        )

    for ir in sorted(root.rglob("*.ir")):
        if ir.resolve() not in seen_files:
            raise CorpusError(f"{ir.relative_to(root)} is not referenced by any case in {path}")

    by_id = {c.id: c for c in cases}
    for c in cases:
        if c.pair is None:
            continue
        other = by_id.get(c.pair)
        if other is None:
            raise CorpusError(f"case {c.id} is paired with unknown case {c.pair!r}")
        if other.mode is c.mode:
            raise CorpusError(f"paired cases {c.id} and {other.id} have the same mode")
        if (other.expected, other.error_class) != (c.expected, c.error_class):
            raise CorpusError(f"paired cases {c.id} and {other.id} disagree on expected verdict or class")
    return cases


@dataclass
class CaseResult:
    case: str
    engine: str
    mode: str
    expected: str
    verdict: str | None
    outcome: str
    error_class: str = ""
    tags: tuple[str, ...] = ()
    kinds: tuple[str, ...] = ()
    mem_events: int | None = None
    suppressed_metadata_events: int | None = None
    seconds: float = 0.0

    def to_json(self) -> dict:
        out = asdict(self)
        out["tags"] = list(self.tags)
        out["kinds"] = list(self.kinds)
        del out["seconds"]
        return out


@dataclass(frozen=True)
class Counts:
    TP: int = 0
    TN: int = 0
    FP: int = 0
    FN: int = 0
    TO: int = 0

    @property
    def total(self) -> int:
        return self.TP + self.TN + self.FP + self.FN + self.TO

    @property
    def accuracy(self) -> float:
        return (self.TP + self.TN) / self.total if self.total else 0.0

    def to_json(self) -> dict:
        return {**asdict(self), "total": self.total, "accuracy": round(self.accuracy, 4)}


@dataclass
class ClassificationReport:
    results: list[CaseResult] = field(default_factory=list)
    cases: list[CorpusCase] = field(default_factory=list)
    seconds: float = 0.0

    def engines(self) -> list[str]:
        return [e for e in ENGINES if any(r.engine == e for r in self.results)]

    def modes(self) -> list[str]:
        return [m.value for m in LanguageMode if any(r.mode == m.value for r in self.results)]

    def counts(self, engine: str, mode: str | None = None) -> Counts:
        tally = {k: 0 for k in OUTCOMES}
        for r in self.results:
            if r.engine == engine and (mode is None or r.mode == mode):
                tally[r.outcome] += 1
        return Counts(**tally)

    def result(self, case: str, engine: str) -> CaseResult | None:
        for r in self.results:
            if r.case == case and r.engine == engine:
                return r
        return None

    def to_json(self) -> dict:
        summary = {e: {m: self.counts(e, m).to_json() for m in self.modes()} for e in self.engines()}
        return {
            "summary": summary,
            "diff": compare_modes(self).to_json(),
            "cases": [r.to_json() for r in self.results],
        }

    def text(self) -> str:
        lines = [f"{'engine':8} {'mode':8} {'TP':>3} {'TN':>3} {'FP':>3} {'FN':>3} {'TO':>3}  accuracy"]
        for e in self.engines():
            for m in self.modes():
                c = self.counts(e, m)
                lines.append(f"{e:8} {m:8} {c.TP:3} {c.TN:3} {c.FP:3} {c.FN:3} {c.TO:3}  {c.accuracy:.2f}")
        return "\n".join(lines)


def classify(expected: str, verdict: str | None) -> str:
    if verdict is None:
        return "TO"
    if expected == "Error":
        return "TP" if verdict == "Error" else "FN"
    return "FP" if verdict == "Error" else "TN"


@lru_cache(maxsize=None)
def _pack(spec: str) -> Pack:
    return load_pack(spec)


def run_case(case: CorpusCase, engine: str, timeout: float = 30.0) -> CaseResult:
    """Run one engine on one case; deadline overruns become ``TO``."""
    from .dynamic import run_dynamic
    from .static import run_static

    start = time.monotonic()
    deadline = start + timeout if timeout else None
    try:
        program = parse_program(case.file.read_text(encoding="utf-8"), case.mode)
        table = collect_attachments(program, [_pack(case.pack)])
    except CoverError as exc:
        raise CorpusError(f"case {case.id}: {exc}") from exc
    errors = [i for i in validate(table, program) if i.severity == "error"]
    if errors:
        raise CorpusError(f"case {case.id}: contract validation failed: {'; '.join(map(str, errors))}")
    mem = sup = None
    try:
        if engine == "static":
            report = run_static(program, table, case=case.id, deadline=deadline)
        elif engine == "dynamic":
            report, trace = run_dynamic(program, table, case=case.id, deadline=deadline)
            c = trace.counters
            mem, sup = c.mem_events, c.suppressed_metadata_events
        else:
            raise ValueError(f"unknown engine {engine!r}")
        verdict = report.verdict
        kinds = tuple(sorted(set(report.kinds())))
    except AnalysisTimeout:
        verdict, kinds = None, ()
    if deadline is not None and time.monotonic() > deadline:
        verdict, kinds = None, ()
    return CaseResult(
        case.id,
        engine,
        case.mode.value,
        case.expected,
        verdict,
        classify(case.expected, verdict),
        case.error_class,
        case.tags,
        kinds,
        mem,
        sup,
        time.monotonic() - start,
    )


def _run_job(args):
    return run_case(*args)


def run_corpus(
    directory: str | Path | None = None,
    engines: tuple[str, ...] | list[str] = ENGINES,
    timeout: float = 30.0,
    jobs: int = 1,
    modes: tuple[str, ...] | None = None,
) -> ClassificationReport:
    root = Path(directory) if directory is not None else shipped_corpus()
    cases = load_manifest(root)
    if modes is not None:
        wanted = {LanguageMode.parse(m) for m in modes}
        cases = [c for c in cases if c.mode in wanted]
    for e in engines:
        if e not in ENGINES:
            raise ValueError(f"unknown engine {e!r}")
    work = [(c, e, timeout) for e in engines for c in cases]
    start = time.monotonic()
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, work))
    else:
        results = [_run_job(w) for w in work]
    return ClassificationReport(results, cases, time.monotonic() - start)


@dataclass
class PairRow:
    pair: str
    c_case: str
    fortran_case: str
    c_mem_events: int
    fortran_mem_events: int
    fortran_suppressed: int

    @property
    def ratio(self) -> float:
        if self.c_mem_events == 0:
            return 0.0 if self.fortran_mem_events == 0 else float("inf")
        return self.fortran_mem_events / self.c_mem_events

    def to_json(self) -> dict:
        return {**asdict(self), "ratio": round(self.ratio, 4) if self.ratio != float("inf") else None}


@dataclass
class DiffTable:
    # engine -> metric -> Fortran minus C
    deltas: dict[str, dict[str, float]] = field(default_factory=dict)
    pairs: list[PairRow] = field(default_factory=list)
    unpaired: list[str] = field(default_factory=list)

    def flagged(self) -> dict[str, list[str]]:
        """Metrics with a nonzero delta, per engine (parity regressions)."""
        return {e: [k for k, v in d.items() if v] for e, d in self.deltas.items() if any(d.values())}

    @property
    def parity(self) -> bool:
        return not self.flagged()

    def to_json(self) -> dict:
        return {
            "deltas": self.deltas,
            "flagged": self.flagged(),
            "pairs": [p.to_json() for p in self.pairs],
            "unpaired": self.unpaired,
        }

    def text(self) -> str:
        lines = []
        for e, d in self.deltas.items():
            parts = [f"d{k}={v:+d}" if k != "accuracy" else f"dacc={v:+.2f}" for k, v in d.items()]
            lines.append(f"{e:8} " + " ".join(parts))
        return "\n".join(lines)


def compare_modes(report: ClassificationReport) -> DiffTable:
    table = DiffTable()
    by_id = {c.id: c for c in report.cases}
    for c in report.cases:
        if c.pair is None or c.pair not in by_id:
            log.warning("UnpairedCase: %s has no counterpart in the other mode", c.id)
            table.unpaired.append(c.id)
    for e in report.engines():
        fc = report.counts(e, LanguageMode.FORTRAN.value)
        cc = report.counts(e, LanguageMode.C.value)
        d: dict[str, float] = {k: getattr(fc, k) - getattr(cc, k) for k in OUTCOMES}
        d["accuracy"] = round(fc.accuracy - cc.accuracy, 4)
        table.deltas[e] = d
    for c in report.cases:
        if c.mode is not LanguageMode.C or c.pair not in by_id:
            continue
        rc = report.result(c.id, "dynamic")
        rf = report.result(c.pair, "dynamic")
        if rc is None or rf is None or rc.mem_events is None or rf.mem_events is None:
            continue
        table.pairs.append(
            PairRow(c.id.split("/", 1)[-1], c.id, c.pair, rc.mem_events, rf.mem_events, rf.suppressed_metadata_events or 0)
        )
    return table
