"""Contract checking over a recorded trace.

API-call events are replayed in order to track the called set, open
regions and owed obligations. Regions that forbid memory access are then
matched against all read/write events in one sweep by the access kernel.
Handles match by exact argument equality, buffers by byte-range overlap.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .. import kernels
from ..contracts.ast import Call, CallTag, NoUntil, Read, Write
from ..contracts.table import ContractTable
from ..frontends import check_slot
from ..report import (
    ERROR,
    HANDLE_LIFECYCLE,
    MUST_EVENTUALLY,
    PRE_VIOLATION,
    RACE_VIOLATION,
    TAG_MAPPING,
    WARNING,
    Diagnostic,
    Report,
)
from .trace import ADDR, AllocEvent, ApiCall, MemRead, MemWrite, Trace, TraceArg

READ_BIT, WRITE_BIT = 1, 2
NEVER = 2**62


@dataclass
class _Region:
    forbid: tuple  # ("mem", mask, lo, hi) | ("call", name) | ("tag", tag, arg)
    release: tuple  # ("call", name) | ("tag", tag, arg)
    opened: int
    site: tuple[str, int]
    contract_fn: str
    op: str
    closed: int = NEVER


def _site(ev) -> tuple[str, int]:
    return ev.site if ev.site is not None else ("<trace>", ev.seq)


class _Allocations:
    def __init__(self):
        self.bases: list[int] = []
        self.sizes: dict[int, int] = {}

    def add(self, base: int, size: int):
        if base not in self.sizes:
            i = bisect_right(self.bases, base)
            self.bases.insert(i, base)
        self.sizes[base] = size

    def extent(self, addr: int) -> tuple[int, int]:
        """Byte range of the allocation holding ``addr`` (one byte if unknown)."""
        i = bisect_right(self.bases, addr) - 1
        if i >= 0:
            base = self.bases[i]
            size = max(self.sizes[base], 1)
            if addr < base + size:
                return addr, base + size
        return addr, addr + 1


def _arg(ev: ApiCall, index: int | None) -> TraceArg | None:
    if index is None or not 0 <= index < ev.nargs:
        return None
    return ev.args[index]


def _matches(want: tuple, ev: ApiCall, tags) -> bool:
    if want[0] == "call":
        return want[1] == ev.fn
    return any(t == want[1] and (want[2] is None or _arg(ev, p) == want[2]) for t, p in tags)


def check_trace(
    trace: Trace,
    table: ContractTable,
    *,
    case: str = "",
    impl: str | None = None,
    order: dict[str, int] | None = None,
) -> Report:
    """Verify ``trace`` against ``table``; ``order`` ranks functions for sorting."""
    diags: dict[tuple, Diagnostic] = {}

    def emit(kind, site, contract_fn, message, severity=ERROR, dedup=""):
        key = (kind, site[0], site[1], dedup)
        if key not in diags:
            diags[key] = Diagnostic(kind, site[0], site[1], contract_fn, message, severity)

    allocs = _Allocations()
    called_fns: set[str] = set()
    called_tags: set[tuple] = set()
    open_regions: list[_Region] = []
    mem_regions: list[_Region] = []
    pending: list[tuple] = []  # (want, site, contract_fn, op)

    for ev in trace.events:
        if isinstance(ev, AllocEvent):
            allocs.add(ev.addr, ev.bytes)
            continue
        if not isinstance(ev, ApiCall):
            continue
        name, site = ev.fn, _site(ev)
        contract = table.get(name)
        tags = table.tags_of(name)

        if contract is not None:
            for op in contract.pre:
                if isinstance(op, Call):
                    ok = op.target in called_fns
                elif isinstance(op, CallTag):
                    want = _arg(ev, op.mapping) if op.mapping is not None else None
                    ok = any(t == op.tag and (want is None or a == want) for t, a in called_tags)
                else:
                    continue
                if not ok:
                    emit(PRE_VIOLATION, site, name, f"{name} requires {op} beforehand, which never happened", dedup=str(op))

        for r in open_regions:
            if r.forbid[0] in ("call", "tag") and _matches(r.forbid, ev, tags):
                emit(
                    HANDLE_LIFECYCLE,
                    site,
                    r.contract_fn,
                    f"{name} is forbidden here by {r.op} from {r.contract_fn} at {r.site[0]}#{r.site[1]}",
                    dedup=str(r.site),
                )

        released = [r for r in open_regions if _matches(r.release, ev, tags)]
        for t, _ in tags:
            data = [r for r in open_regions if r.forbid[0] == "mem" and r.release[:2] == ("tag", t)]
            if data and not any(r in released for r in data):
                emit(TAG_MAPPING, site, name, f"{name} belongs to tag {t} but its handle matches none of the open regions", WARNING, dedup=t)
        for r in released:
            r.closed = ev.seq
        open_regions = [r for r in open_regions if r.closed == NEVER]
        pending = [o for o in pending if not _matches(o[0], ev, tags)]

        called_fns.add(name)
        for t, p in tags:
            called_tags.add((t, _arg(ev, p)))

        if contract is None:
            continue
        for op in contract.post:
            if isinstance(op, NoUntil):
                if isinstance(op.release, (Read, Write)):
                    continue
                release = _want(ev, op.release)
                f = op.forbidden
                if isinstance(f, (Read, Write)):
                    check_slot(f.slot, trace.mode)
                    arg = _arg(ev, f.slot.index)
                    if arg is None or arg.kind != ADDR:
                        continue
                    lo, hi = allocs.extent(arg.value)
                    forbid = ("mem", READ_BIT if isinstance(f, Read) else WRITE_BIT, lo, hi)
                    region = _Region(forbid, release, ev.seq, site, name, str(op))
                    mem_regions.append(region)
                else:
                    region = _Region(_want(ev, f), release, ev.seq, site, name, str(op))
                open_regions.append(region)
            elif isinstance(op, (Call, CallTag)):
                pending.append((_want(ev, op), site, name, str(op)))

    _match_memory(trace, mem_regions, emit, impl)

    info = {}
    if trace.trap is not None:
        info["trap"] = trace.trap
    else:
        for want, site, contract_fn, op in pending:
            emit(MUST_EVENTUALLY, site, contract_fn, f"{op} required after {contract_fn} never happened before exit", dedup=op)

    rank = order or {}
    ordered = sorted(
        diags.values(),
        key=lambda d: (rank.get(d.function, len(rank)), d.function, d.instr_index, d.kind, d.contract_fn, d.message),
    )
    return Report(case, trace.mode.value, "dynamic", ordered, info)


def _want(ev: ApiCall, op) -> tuple:
    if isinstance(op, Call):
        return ("call", op.target)
    return ("tag", op.tag, _arg(ev, op.mapping) if op.mapping is not None else None)


def _match_memory(trace: Trace, regions: list[_Region], emit, impl):
    if not regions:
        return
    i64 = kernels.i64
    mem = [e for e in trace.events if isinstance(e, (MemRead, MemWrite))]
    if not mem:
        return
    r_open = i64(r.opened for r in regions)
    r_close = i64(r.closed for r in regions)
    r_lo = i64(r.forbid[2] for r in regions)
    r_hi = i64(r.forbid[3] for r in regions)
    r_mask = i64(r.forbid[1] for r in regions)
    e_seq = i64(e.seq for e in mem)
    e_lo = i64(e.addr for e in mem)
    e_hi = i64(e.addr + max(e.bytes, 1) for e in mem)
    e_mask = i64(READ_BIT if isinstance(e, MemRead) else WRITE_BIT for e in mem)
    out = i64([-1] * len(mem))
    kernels.match_accesses(r_open, r_close, r_lo, r_hi, r_mask, e_seq, e_lo, e_hi, e_mask, out, impl=impl)
    for e, hit in zip(mem, out):
        if hit < 0:
            continue
        r = regions[hit]
        verb = "read from" if isinstance(e, MemRead) else "write to"
        emit(
            RACE_VIOLATION,
            _site(e),
            r.contract_fn,
            f"{verb} address {e.addr} overlaps the buffer of {r.contract_fn} at {r.site[0]}#{r.site[1]}"
            f" while {r.op} is in force",
        )
