"""Data-flow contract verification over the mini-IR.

One forward analysis carries three kinds of facts per program point:

* ``called``: calls guaranteed to have happened on every incoming path
  (intersection at joins), used for PRE requirements;
* ``regions``: open ``no!...until!`` regions on some incoming path (union);
* ``pending``: bare POST requirements still owed on some path (union),
  reported when the entry function returns.

Calls into defined functions are analyzed with the caller's state and
memoized per (function, state); recursion is resolved by re-running the
whole analysis until the recursive summaries stop changing.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass
from typing import Mapping, NamedTuple

from .alias import AliasModel, compute_alias, value_id
from .contracts.ast import Call, CallTag, NoUntil, Read, Write
from .contracts.table import ContractTable
from .errors import AnalysisTimeout, CoverError
from .frontends import (
    DECLARE_CONTRACT,
    NormArg,
    NormalizedCall,
    normalize_call_args,
    resolve_slot,
    value_types,
)
from .ir.cfg import build_cfg
from .ir.nodes import CallInstr, ExtractBase, Load, MakeDescriptor, Program, Return, Store, Var
from .report import (
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

Key = tuple | None  # ("n", alias class) | ("lit", int) | None for "could be anything"


def keys_match(a: Key, b: Key) -> bool:
    return a is None or b is None or a == b


@dataclass(frozen=True)
class Region:
    forbid: tuple  # ("read"|"write", node) | ("call", name) | ("tag", tag, key)
    release: tuple  # ("call", name) | ("tag", tag, key)
    site: tuple[str, int]
    contract_fn: str
    op: str
    origin: str | None = None


@dataclass(frozen=True)
class Obligation:
    need: tuple  # ("call", name) | ("tag", tag, key)
    site: tuple[str, int]
    contract_fn: str
    op: str


class State(NamedTuple):
    called: frozenset
    regions: frozenset
    pending: frozenset


INITIAL = State(frozenset(), frozenset(), frozenset())


def join(a: State | None, b: State | None) -> State | None:
    if a is None:
        return b
    if b is None:
        return a
    return State(a.called & b.called, a.regions | b.regions, a.pending | b.pending)


class _Engine:
    def __init__(
        self,
        program: Program,
        table: ContractTable,
        alias: AliasModel,
        gmap: Mapping[str, str] | None,
        warn_weak_alias: bool,
        deadline: float | None,
        max_rounds: int = 64,
    ):
        self.program = program
        self.mode = program.mode
        self.table = table
        self.alias = alias
        self.gmap = gmap
        self.warn_weak_alias = warn_weak_alias
        self.deadline = deadline
        self.max_rounds = max_rounds
        self.order = {f.name: i for i, f in enumerate(program.functions)}
        self.cfgs = {}
        self.blocks = {}
        self.types = {}
        self.defs = {}
        for f in program.functions:
            if f.is_external:
                continue
            self.cfgs[f.name] = build_cfg(f)
            self.types[f.name] = value_types(f)
            per_block: dict[str, list] = {}
            defs = {}
            for idx, block, ins in f.instructions():
                per_block.setdefault(block.label, []).append((idx, ins))
                if getattr(ins, "dest", None):
                    defs[ins.dest] = ins
            self.blocks[f.name] = per_block
            self.defs[f.name] = defs
        self.diags: dict[tuple, Diagnostic] = {}

    # -- driver --------------------------------------------------------

    def run(self) -> list[Diagnostic]:
        prev: dict = {}
        out = None
        for _ in range(self.max_rounds):
            self.cache: dict = {}
            self.prev = prev
            self.in_progress: set = set()
            self.recursive: set = set()
            self.diags = {}
            out = self.analyze(self.program.entry, INITIAL)
            if all(self.cache.get(k) == prev.get(k) for k in self.recursive):
                break
            prev = dict(self.cache)
        else:
            raise CoverError("recursive summaries did not stabilise")
        if out is not None:
            for ob in sorted(out.pending, key=lambda o: (self.order.get(o.site[0], 0), o.site[1], o.op)):
                self.emit(
                    MUST_EVENTUALLY,
                    ob.site,
                    ob.contract_fn,
                    f"{ob.op} required after {ob.contract_fn} is missing on some path to program exit",
                    dedup=ob.op,
                )
        return sorted(
            self.diags.values(),
            key=lambda d: (self.order.get(d.function, 0), d.instr_index, d.kind, d.contract_fn, d.message),
        )

    def analyze(self, fn: str, state: State) -> State | None:
        key = (fn, state)
        if key in self.cache:
            return self.cache[key]
        if key in self.in_progress:
            self.recursive.add(key)
            return self.prev.get(key)
        self.in_progress.add(key)
        result = self.intra(fn, state)
        self.in_progress.discard(key)
        self.cache[key] = result
        return result

    def intra(self, fn: str, state: State) -> State | None:
        cfg = self.cfgs[fn]
        blocks = self.blocks[fn]
        rpo = cfg.rpo_index
        entry_in: dict[str, State] = {cfg.entry: state}
        exits: dict[str, State] = {}
        work = [(rpo[cfg.entry], cfg.entry)]
        queued = {cfg.entry}
        while work:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise AnalysisTimeout(f"static analysis exceeded its deadline in {fn}")
            _, label = heapq.heappop(work)
            queued.discard(label)
            s = entry_in[label]
            for idx, ins in blocks.get(label, ()):
                s = self.transfer(fn, idx, ins, s)
                if s is None:
                    break
                if isinstance(ins, Return):
                    exits[label] = s
            if s is None:
                continue
            for nxt in cfg.succ[label]:
                merged = join(entry_in.get(nxt), s)
                if merged != entry_in.get(nxt):
                    entry_in[nxt] = merged
                    if nxt not in queued:
                        queued.add(nxt)
                        heapq.heappush(work, (rpo[nxt], nxt))
        out = None
        for s in exits.values():
            out = join(out, s)
        return out

    # -- diagnostics ---------------------------------------------------

    def emit(self, kind, site, contract_fn, message, severity=ERROR, dedup=""):
        key = (kind, site[0], site[1], dedup)
        old = self.diags.get(key)
        if old is not None and not (old.severity == WARNING and severity == ERROR):
            return
        self.diags[key] = Diagnostic(kind, site[0], site[1], contract_fn, message, severity)

    # -- value helpers -------------------------------------------------

    def arg_key(self, fn: str, call: NormalizedCall, index: int) -> Key:
        if index is None or not 0 <= index < call.arity:
            return None
        arg = call.args[index]
        v = arg.value
        if isinstance(v, bool):
            return None
        if isinstance(v, int):
            return ("lit", v)
        if isinstance(v, Var):
            if v.name in self.program.consts:
                return ("lit", self.program.consts[v.name])
            node = self.alias.pointee_in(fn, v.name) if arg.via_descriptor else self.alias.node_in(fn, v.name)
            return None if node is None else ("n", node)
        return None

    def root(self, fn: str, name: str) -> str:
        """Syntactic origin of an address, looking through descriptors."""
        defs = self.defs.get(fn, {})
        seen = set()
        while name not in seen:
            seen.add(name)
            ins = defs.get(name)
            if isinstance(ins, ExtractBase) and isinstance(ins.descriptor, Var):
                name = ins.descriptor.name
            elif isinstance(ins, MakeDescriptor) and isinstance(ins.base, Var):
                name = ins.base.name
            else:
                break
        return value_id(fn, name)

    def call_matches(self, want: tuple, name: str, tags, fn: str, call: NormalizedCall) -> bool:
        if want[0] == "call":
            return want[1] == name
        return any(t == want[1] and keys_match(want[2], self.arg_key(fn, call, p)) for t, p in tags)

    # -- transfer ------------------------------------------------------

    def transfer(self, fn: str, idx: int, ins, s: State) -> State | None:
        if isinstance(ins, Load):
            self.check_access(fn, idx, ins.addr, "read", s)
        elif isinstance(ins, Store):
            self.check_access(fn, idx, ins.addr, "write", s)
        elif isinstance(ins, CallInstr):
            if ins.callee == DECLARE_CONTRACT:
                return s
            callee = self.program.defined(ins.callee)
            if callee is not None:
                call = NormalizedCall(callee.name, tuple(NormArg(a) for a in ins.args), len(ins.args))
            else:
                call = normalize_call_args(
                    ins, self.mode, self.program, self.program.function(fn), self.gmap, self.types[fn]
                )
            s = self.apply_contract(fn, idx, call, s)
            if callee is not None:
                return self.analyze(callee.name, s)
        return s

    def check_access(self, fn: str, idx: int, addr, kind: str, s: State):
        if not isinstance(addr, Var) or addr.name in self.program.consts:
            return
        node = self.alias.node_in(fn, addr.name)
        if node is None:
            return
        origin = self.root(fn, addr.name)
        for r in sorted(s.regions, key=lambda r: (r.site, r.op)):
            if r.forbid != (kind, node):
                continue
            weak = self.warn_weak_alias and r.origin is not None and r.origin != origin
            verb = "read from" if kind == "read" else "write to"
            self.emit(
                RACE_VIOLATION,
                (fn, idx),
                r.contract_fn,
                f"{verb} {addr.name} overlaps the buffer of {r.contract_fn} at {r.site[0]}#{r.site[1]}"
                f" while {r.op} is in force",
                WARNING if weak else ERROR,
            )

    def apply_contract(self, fn: str, idx: int, call: NormalizedCall, s: State) -> State:
        name = call.callee
        site = (fn, idx)
        contract = self.table.get(name)
        tags = self.table.tags_of(name)
        called, regions, pending = set(s.called), set(s.regions), set(s.pending)

        if contract is not None:
            for op in contract.pre:
                if isinstance(op, Call):
                    ok = ("call", op.target) in called
                elif isinstance(op, CallTag):
                    want = self.arg_key(fn, call, op.mapping) if op.mapping is not None else None
                    ok = any(f[0] == "tag" and f[1] == op.tag and keys_match(f[2], want) for f in called)
                else:
                    continue
                if not ok:
                    self.emit(
                        PRE_VIOLATION,
                        site,
                        name,
                        f"{name} requires {op} beforehand, which is not guaranteed on every path",
                        dedup=str(op),
                    )

        for r in sorted(regions, key=lambda r: (r.site, r.op)):
            f = r.forbid
            hit = (f[0] == "call" and f[1] == name) or (
                f[0] == "tag" and self.call_matches(f, name, tags, fn, call)
            )
            if hit:
                self.emit(
                    HANDLE_LIFECYCLE,
                    site,
                    r.contract_fn,
                    f"{name} is forbidden here by {r.op} from {r.contract_fn} at {r.site[0]}#{r.site[1]}",
                    dedup=str(r.site),
                )

        released = {r for r in regions if self.call_matches(r.release, name, tags, fn, call)}
        for t, _ in tags:
            data = [r for r in regions if r.forbid[0] in ("read", "write") and r.release[:2] == ("tag", t)]
            if data and not any(r in released for r in data):
                self.emit(
                    TAG_MAPPING,
                    site,
                    name,
                    f"{name} belongs to tag {t} but its handle matches none of the open regions",
                    WARNING,
                    dedup=t,
                )
        regions -= released
        pending = {o for o in pending if not self.call_matches(o.need, name, tags, fn, call)}

        called.add(("call", name))
        for t, p in tags:
            called.add(("tag", t, self.arg_key(fn, call, p)))

        if contract is not None:
            for op in contract.post:
                if isinstance(op, NoUntil):
                    region = self.open_region(fn, site, name, call, op)
                    if region is not None:
                        regions.add(region)
                elif isinstance(op, (Call, CallTag)):
                    pending.add(Obligation(self.want(fn, call, op), site, name, str(op)))
        return State(frozenset(called), frozenset(regions), frozenset(pending))

    def want(self, fn: str, call: NormalizedCall, op) -> tuple:
        if isinstance(op, Call):
            return ("call", op.target)
        key = self.arg_key(fn, call, op.mapping) if op.mapping is not None else None
        return ("tag", op.tag, key)

    def open_region(self, fn, site, name, call: NormalizedCall, op: NoUntil) -> Region | None:
        if isinstance(op.release, (Read, Write)):
            return None
        release = self.want(fn, call, op.release)
        forbidden = op.forbidden
        origin = None
        if isinstance(forbidden, (Read, Write)):
            try:
                node = resolve_slot(forbidden.slot, call, self.mode, self.alias, fn)
            except IndexError:
                return None
            if node is None:
                return None
            arg = call.args[forbidden.slot.index].value
            if isinstance(arg, Var):
                origin = self.root(fn, arg.name)
            forbid = ("read" if isinstance(forbidden, Read) else "write", node)
        else:
            forbid = self.want(fn, call, forbidden)
        return Region(forbid, release, site, name, str(op), origin)


def run_checks(
    program: Program,
    table: ContractTable,
    alias: AliasModel | None = None,
    *,
    gmap: Mapping[str, str] | None = None,
    warn_weak_alias: bool = False,
    deadline: float | None = None,
) -> list[Diagnostic]:
    if alias is None:
        alias = compute_alias(program)
    return _Engine(program, table, alias, gmap, warn_weak_alias, deadline).run()


def check_pre(program, table, alias=None, **kw) -> list[Diagnostic]:
    return [d for d in run_checks(program, table, alias, **kw) if d.kind == PRE_VIOLATION]


def check_noregion(program, table, alias=None, **kw) -> list[Diagnostic]:
    kinds = (RACE_VIOLATION, HANDLE_LIFECYCLE, TAG_MAPPING)
    return [d for d in run_checks(program, table, alias, **kw) if d.kind in kinds]


def check_musteventually(program, table, alias=None, **kw) -> list[Diagnostic]:
    return [d for d in run_checks(program, table, alias, **kw) if d.kind == MUST_EVENTUALLY]


def run_static(
    program: Program,
    table: ContractTable,
    *,
    case: str = "",
    alias: AliasModel | None = None,
    gmap: Mapping[str, str] | None = None,
    warn_weak_alias: bool = False,
    deadline: float | None = None,
) -> Report:
    diags = run_checks(program, table, alias, gmap=gmap, warn_weak_alias=warn_weak_alias, deadline=deadline)
    return Report(case, program.mode.value, "static", diags)
