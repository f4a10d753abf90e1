"""Trace events and their JSON Lines encoding.

One JSON object per line::

    {"seq":0,"ev":"call","fn":"MPI_Get","nargs":8,"args":[{"k":"addr","v":4096},...]}
    {"seq":3,"ev":"read","addr":4096,"bytes":8}
    {"ev":"summary","mode":"c","api_calls":1,"mem_events":1,"suppressed_metadata_events":0}

Events may carry ``"site": [function, instr_index]`` naming the instruction
that produced them. The summary record is optional when reading.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

from ..errors import SchemaError
from ..modes import LanguageMode

ADDR = "addr"
INT = "int"


@dataclass(frozen=True)
class TraceArg:
    kind: str  # ADDR or INT
    value: int


@dataclass(frozen=True)
class ApiCall:
    seq: int
    fn: str
    args: tuple[TraceArg, ...] = ()
    site: tuple[str, int] | None = None

    @property
    def nargs(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class MemRead:
    seq: int
    addr: int
    bytes: int = 8
    site: tuple[str, int] | None = None


@dataclass(frozen=True)
class MemWrite:
    seq: int
    addr: int
    bytes: int = 8
    site: tuple[str, int] | None = None


@dataclass(frozen=True)
class AllocEvent:
    seq: int
    addr: int
    bytes: int
    site: tuple[str, int] | None = None


@dataclass(frozen=True)
class Free:
    seq: int
    addr: int
    site: tuple[str, int] | None = None


TraceEvent = Union[ApiCall, MemRead, MemWrite, AllocEvent, Free]

_EV_NAMES = {ApiCall: "call", MemRead: "read", MemWrite: "write", AllocEvent: "alloc", Free: "free"}


@dataclass(frozen=True)
class Counters:
    api_calls: int = 0
    mem_events: int = 0
    suppressed_metadata_events: int = 0


@dataclass
class Trace:
    mode: LanguageMode = LanguageMode.C
    events: list = field(default_factory=list)
    suppressed_metadata_events: int = 0
    trap: str | None = None

    @property
    def counters(self) -> Counters:
        api = sum(1 for e in self.events if isinstance(e, ApiCall))
        mem = sum(1 for e in self.events if isinstance(e, (MemRead, MemWrite)))
        return Counters(api, mem, self.suppressed_metadata_events)

    def calls(self) -> list[ApiCall]:
        return [e for e in self.events if isinstance(e, ApiCall)]


def event_to_json(ev) -> dict:
    out: dict = {"seq": ev.seq, "ev": _EV_NAMES[type(ev)]}
    if isinstance(ev, ApiCall):
        out["fn"] = ev.fn
        out["nargs"] = ev.nargs
        out["args"] = [{"k": a.kind, "v": a.value} for a in ev.args]
    elif isinstance(ev, Free):
        out["addr"] = ev.addr
    else:
        out["addr"] = ev.addr
        out["bytes"] = ev.bytes
    if ev.site is not None:
        out["site"] = [ev.site[0], ev.site[1]]
    return out


def summary_json(trace: Trace) -> dict:
    c = trace.counters
    out = {
        "ev": "summary",
        "mode": trace.mode.value,
        "api_calls": c.api_calls,
        "mem_events": c.mem_events,
        "suppressed_metadata_events": c.suppressed_metadata_events,
    }
    if trace.trap is not None:
        out["trap"] = trace.trap
    return out


def dumps(trace: Trace) -> str:
    lines = [json.dumps(event_to_json(e), separators=(",", ":")) for e in trace.events]
    lines.append(json.dumps(summary_json(trace), separators=(",", ":")))
    return "\n".join(lines) + "\n"


def _int(obj: dict, key: str, lineno: int, minimum: int = 0) -> int:
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < minimum:
        raise SchemaError(f"line {lineno}: field {key!r} must be an integer >= {minimum}")
    return v


def _site(obj: dict, lineno: int):
    s = obj.get("site")
    if s is None:
        return None
    if not (isinstance(s, list) and len(s) == 2 and isinstance(s[0], str) and isinstance(s[1], int)):
        raise SchemaError(f"line {lineno}: site must be [function, index]")
    return (s[0], s[1])


def _event_from_json(obj: dict, lineno: int):
    ev = obj.get("ev")
    seq = _int(obj, "seq", lineno)
    site = _site(obj, lineno)
    if ev == "call":
        fn = obj.get("fn")
        if not isinstance(fn, str) or not fn:
            raise SchemaError(f"line {lineno}: call event needs a function name")
        raw = obj.get("args")
        if not isinstance(raw, list):
            raise SchemaError(f"line {lineno}: call event needs an args list")
        args = []
        for a in raw:
            if not isinstance(a, dict) or a.get("k") not in (ADDR, INT):
                raise SchemaError(f"line {lineno}: argument kind must be 'addr' or 'int'")
            v = a.get("v")
            if not isinstance(v, int) or isinstance(v, bool):
                raise SchemaError(f"line {lineno}: argument value must be an integer")
            args.append(TraceArg(a["k"], v))
        nargs = _int(obj, "nargs", lineno)
        if nargs != len(args):
            raise SchemaError(f"line {lineno}: nargs={nargs} but {len(args)} argument(s) listed")
        return ApiCall(seq, fn, tuple(args), site)
    if ev in ("read", "write", "alloc"):
        cls = {"read": MemRead, "write": MemWrite, "alloc": AllocEvent}[ev]
        return cls(seq, _int(obj, "addr", lineno), _int(obj, "bytes", lineno), site)
    if ev == "free":
        return Free(seq, _int(obj, "addr", lineno), site)
    raise SchemaError(f"line {lineno}: unknown event kind {ev!r}")


def loads(text: str, mode: LanguageMode | str | None = None) -> Trace:
    events = []
    summary = None
    last_seq = -1
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        if summary is not None:
            raise SchemaError(f"line {lineno}: events after the summary record")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {lineno}: not JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise SchemaError(f"line {lineno}: expected a JSON object")
        if obj.get("ev") == "summary":
            summary = (obj, lineno)
            continue
        ev = _event_from_json(obj, lineno)
        if ev.seq <= last_seq:
            raise SchemaError(f"line {lineno}: seq {ev.seq} does not increase (previous {last_seq})")
        last_seq = ev.seq
        events.append(ev)

    trace = Trace(LanguageMode.parse(mode) if mode is not None else LanguageMode.C, events)
    if summary is not None:
        obj, lineno = summary
        try:
            trace.mode = LanguageMode.parse(obj.get("mode", trace.mode.value))
        except ValueError as exc:
            raise SchemaError(f"line {lineno}: {exc}") from None
        trace.suppressed_metadata_events = _int(obj, "suppressed_metadata_events", lineno)
        trap = obj.get("trap")
        if trap is not None and not isinstance(trap, str):
            raise SchemaError(f"line {lineno}: trap must be a string")
        trace.trap = trap
        c = trace.counters
        for key in ("api_calls", "mem_events"):
            if _int(obj, key, lineno) != getattr(c, key):
                raise SchemaError(f"line {lineno}: summary {key}={obj[key]} but the trace has {getattr(c, key)}")
    return trace


def write_trace(trace: Trace, path: str | Path) -> None:
    Path(path).write_text(dumps(trace), encoding="utf-8")


def read_trace(path: str | Path, mode: LanguageMode | str | None = None) -> Trace:
    return loads(Path(path).read_text(encoding="utf-8"), mode)


def renumber(events: Iterable) -> list:
    """Copy of ``events`` with seq reassigned 0, 1, 2, ..."""
    from dataclasses import replace

    return [replace(e, seq=i) for i, e in enumerate(events)]
