"""Concrete interpreter that emits the instrumentation event stream.

Memory is a bump allocator starting at 4096. Every allocation is at least
eight bytes and eight-byte aligned; cells are keyed by exact address and
read as 0 until written. Descriptor objects live in their own allocations
and every access to them counts as suppressed metadata instead of an event.
"""

from __future__ import annotations

import time
from bisect import bisect_right
from typing import Mapping

from ..contracts.table import ContractTable
from ..errors import Trap
from ..frontends import DECLARE_CONTRACT, normalize_call_args, value_types
from ..alias import value_id
from ..ir.nodes import (
    AddrOf,
    Alloc,
    Branch,
    CallInstr,
    CondBranch,
    ExtractBase,
    FuncRef,
    Load,
    MakeDescriptor,
    Program,
    Return,
    Store,
    Str,
    Var,
)
from .trace import ADDR, INT, AllocEvent, ApiCall, MemRead, MemWrite, Trace, TraceArg

HEAP_BASE = 4096
WORD = 8

DATA, DESC, HANDLE, STRING = "data", "desc", "handle", "string"


class Address(int):
    """An integer that came from the allocator (as opposed to a scalar)."""

    def __repr__(self) -> str:
        return f"Address({int(self)})"


class _Machine:
    def __init__(self, program, table, gmap, consts, max_steps, deadline, observed):
        self.program = program
        self.mode = program.mode
        self.table = table
        self.gmap = gmap
        self.consts = dict(program.consts)
        self.consts.update(consts or {})
        self.max_steps = max_steps
        self.deadline = deadline
        self.observed = observed
        self.trace = Trace(program.mode)
        self.seq = 0
        self.steps = 0
        self.bump = HEAP_BASE
        self.allocs: dict[int, tuple[int, str]] = {}  # base -> (size, kind)
        self.bases: list[int] = []
        self.cells: dict[int, object] = {}
        self.descs: dict[int, tuple[Address, int, tuple[int, ...]]] = {}
        self.strings: dict[str, Address] = {}
        self.types = {f.name: value_types(f) for f in program.functions if not f.is_external}
        self.instrumented = table.mentioned if table is not None else frozenset()
        self.bodies = {}
        for f in program.functions:
            if not f.is_external:
                self.bodies[f.name] = {b.label: b for b in f.blocks}
        self.index = {}
        for f in program.functions:
            for idx, block, ins in f.instructions():
                self.index[id(ins)] = idx

    # -- memory ---------------------------------------------------------

    def allocate(self, size: int, kind: str) -> Address:
        base = self.bump
        span = max(WORD, (size + WORD - 1) // WORD * WORD)
        self.bump += span
        self.allocs[base] = (size, kind)
        self.bases.append(base)
        return Address(base)

    def owner(self, addr) -> tuple[int, int, str] | None:
        i = bisect_right(self.bases, addr) - 1
        if i < 0:
            return None
        base = self.bases[i]
        size, kind = self.allocs[base]
        if addr < base + max(size, 1):
            return base, size, kind
        return None

    def suppress(self, n: int = 1):
        self.trace.suppressed_metadata_events += n

    def emit(self, cls, *fields, site):
        self.trace.events.append(cls(self.seq, *fields, site=site))
        self.seq += 1

    # -- values ---------------------------------------------------------

    def value(self, frame: dict, op):
        if isinstance(op, bool):
            return int(op)
        if isinstance(op, int):
            return op
        if isinstance(op, Var):
            if op.name in frame:
                return frame[op.name]
            if op.name in self.consts:
                return self.consts[op.name]
            raise Trap(f"use of undefined value {op.name}")
        if isinstance(op, Str):
            addr = self.strings.get(op.text)
            if addr is None:
                addr = self.strings[op.text] = self.allocate(len(op.text.encode()) + 1, STRING)
            return addr
        if isinstance(op, FuncRef):
            return 0
        raise Trap(f"unsupported operand {op!r}")

    def assign(self, fn: str, frame: dict, name: str, val):
        frame[name] = val
        if self.observed is not None and isinstance(val, Address):
            self.observed.setdefault(value_id(fn, name), set()).add(int(val))

    # -- execution ------------------------------------------------------

    def tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise Trap(f"step limit of {self.max_steps} exceeded")
        if self.deadline is not None and self.steps % 1024 == 0 and time.monotonic() > self.deadline:
            from ..errors import AnalysisTimeout

            raise AnalysisTimeout("interpretation exceeded its deadline")

    def run_function(self, name: str, args: list, depth: int = 0):
        if depth > 500:
            raise Trap("call depth limit exceeded")
        fn = self.program.defined(name)
        frame: dict = {}
        for p, a in zip(fn.params, args):
            self.assign(name, frame, p.name, a)
        blocks = self.bodies[name]
        block = fn.blocks[0]
        while True:
            for ins in block.instrs:
                self.tick()
                site = (name, self.index[id(ins)])
                if isinstance(ins, Return):
                    return None if ins.val is None else self.value(frame, ins.val)
                if isinstance(ins, Branch):
                    block = blocks[ins.target]
                    break
                if isinstance(ins, CondBranch):
                    block = blocks[ins.then if self.value(frame, ins.cond) else ins.else_]
                    break
                self.step(name, frame, ins, site, depth)
            else:
                raise Trap(f"fell off the end of block {block.label} in {name}")

    def step(self, fn: str, frame: dict, ins, site, depth: int):
        if isinstance(ins, Alloc):
            size = self.value(frame, ins.size)
            if isinstance(size, Address) or size < 0:
                raise Trap(f"bad allocation size {size!r}")
            addr = self.allocate(size, DATA)
            self.emit(AllocEvent, int(addr), size, site=site)
            self.assign(fn, frame, ins.dest, addr)
        elif isinstance(ins, Load):
            addr = self.value(frame, ins.addr)
            kind = self.check_addr(addr, "load")
            if kind == DESC:
                self.suppress()
            else:
                self.emit(MemRead, int(addr), WORD, site=site)
            self.assign(fn, frame, ins.dest, self.cells.get(int(addr), 0))
        elif isinstance(ins, Store):
            addr = self.value(frame, ins.addr)
            kind = self.check_addr(addr, "store")
            val = self.value(frame, ins.src)
            if kind == DESC:
                self.suppress()
            else:
                self.emit(MemWrite, int(addr), WORD, site=site)
            self.cells[int(addr)] = val
        elif isinstance(ins, AddrOf):
            # registers have no memory of their own: spill to a fresh slot
            slot = self.allocate(WORD, DATA)
            self.cells[int(slot)] = self.value(frame, ins.var)
            self.assign(fn, frame, ins.dest, slot)
        elif isinstance(ins, MakeDescriptor):
            base = self.value(frame, ins.base)
            d = self.allocate((2 + ins.rank) * WORD, DESC)
            self.descs[int(d)] = (base, ins.rank, ins.extents)
            self.cells[int(d)] = base
            self.suppress(2 + ins.rank)
            self.assign(fn, frame, ins.dest, d)
        elif isinstance(ins, ExtractBase):
            d = self.value(frame, ins.descriptor)
            self.assign(fn, frame, ins.dest, self.descriptor_base(d))
        elif isinstance(ins, CallInstr):
            self.call(fn, frame, ins, site, depth)
        else:
            raise Trap(f"cannot execute {ins}")

    def check_addr(self, addr, what: str) -> str:
        if not isinstance(addr, Address):
            raise Trap(f"{what} through non-address value {addr!r}")
        own = self.owner(addr)
        if own is None:
            raise Trap(f"{what} of unallocated address {int(addr)}")
        return own[2]

    def descriptor_base(self, d):
        if not isinstance(d, Address) or int(d) not in self.descs:
            raise Trap(f"extractbase of non-descriptor {d!r}")
        self.suppress()
        return self.descs[int(d)][0]

    def call(self, fn: str, frame: dict, ins: CallInstr, site, depth: int):
        if ins.callee == DECLARE_CONTRACT:
            return
        callee = self.program.defined(ins.callee)
        if callee is not None:
            args = [self.value(frame, a) for a in ins.args]
            if len(args) != callee.arity:
                raise Trap(f"{callee.name} called with {len(args)} argument(s), expects {callee.arity}")
            if callee.name in self.instrumented:
                self.emit(ApiCall, callee.name, tuple(self.encode(a) for a in args), site=site)
            ret = self.run_function(callee.name, args, depth + 1)
            if ins.dest:
                self.assign(fn, frame, ins.dest, 0 if ret is None else ret)
            return
        norm = normalize_call_args(ins, self.mode, self.program, self.program.function(fn), self.gmap, self.types[fn])
        values = []
        for a in norm.args:
            v = self.value(frame, a.value)
            if a.via_descriptor:
                v = self.descriptor_base(v)
            values.append(v)
        if norm.callee in self.instrumented:
            self.emit(ApiCall, norm.callee, tuple(self.encode(v) for v in values), site=site)
        if ins.dest:
            self.assign(fn, frame, ins.dest, self.allocate(WORD, HANDLE))

    @staticmethod
    def encode(v) -> TraceArg:
        if isinstance(v, Address):
            return TraceArg(ADDR, int(v))
        return TraceArg(INT, int(v))


def interpret(
    program: Program,
    table: ContractTable | None = None,
    *,
    gmap: Mapping[str, str] | None = None,
    consts: Mapping[str, int] | None = None,
    max_steps: int = 1_000_000,
    deadline: float | None = None,
    observed: dict | None = None,
) -> tuple[int, Trace]:
    """Run ``program`` from its entry function.

    Returns ``(status, trace)``: status is the entry function's integer
    return value (0 when it returns nothing) or 1 after a trap, whose
    message is kept in ``trace.trap``. ``consts`` overrides ``const``
    declarations, which is how branch valuations are explored. When
    ``observed`` is a dict it is filled with value-id -> set of concrete
    addresses held.
    """
    m = _Machine(program, table, gmap, consts, max_steps, deadline, observed)
    try:
        ret = m.run_function(program.entry, [])
    except Trap as exc:
        m.trace.trap = str(exc)
        return 1, m.trace
    status = ret if isinstance(ret, int) and not isinstance(ret, Address) else 0
    return int(status), m.trace
