"""Interprocedural unification-based may-alias analysis.

Every register ``v`` of every defined function gets one abstract node that
stands for *the memory v points to*. Constraints are collected in one pass
over the program and solved by union-find with pointee propagation
(Steensgaard style), so ``may_alias`` is an equivalence relation.
Context-insensitive: actuals unify with formals across all call sites.
Calls to bodyless API functions bind nothing; their result is a fresh node.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernels
from .ir.nodes import (
    AddrOf,
    Alloc,
    CallInstr,
    ExtractBase,
    Load,
    MakeDescriptor,
    Program,
    Return,
    Store,
    Var,
)

HEAP = "heap"
STACK = "stack"
DESCRIPTOR = "descriptor"
PAYLOAD = "descriptor-payload"
HANDLE = "handle"


def value_id(function: str, name: str) -> str:
    return f"{function}:{name}"


@dataclass
class AliasModel:
    ids: dict[str, int]
    root: list[int]
    pointee_of_root: dict[int, int]
    attributes: dict[int, frozenset[str]] = field(default_factory=dict)

    def node(self, vid: str) -> int | None:
        """Class id of the memory ``vid`` points to, or None when unknown."""
        n = self.ids.get(vid)
        return None if n is None else self.root[n]

    def node_in(self, function: str, name: str) -> int | None:
        return self.node(value_id(function, name))

    def pointee(self, vid: str) -> int | None:
        """Class of the memory that pointers stored in ``vid``'s target point to."""
        n = self.node(vid)
        return None if n is None else self.pointee_of_root.get(n)

    def pointee_in(self, function: str, name: str) -> int | None:
        return self.pointee(value_id(function, name))

    def may_alias(self, v1: str, v2: str) -> bool:
        a, b = self.node(v1), self.node(v2)
        if a is None or b is None:
            return True
        return a == b

    def attrs(self, node: int) -> frozenset[str]:
        return self.attributes.get(node, frozenset())

    def classes(self) -> list[list[str]]:
        groups: dict[int, list[str]] = {}
        for vid, n in self.ids.items():
            groups.setdefault(self.root[n], []).append(vid)
        out = [sorted(g) for g in groups.values()]
        out.sort()
        return out

    def dump(self) -> str:
        return "\n".join(" ".join(c) for c in self.classes())


class _Builder:
    def __init__(self, program: Program):
        self.program = program
        self.ids: dict[str, int] = {}
        self.attr: dict[int, set[str]] = {}
        self.kinds = kernels.i64()
        self.lhs = kernels.i64()
        self.rhs = kernels.i64()

    def node(self, fn: str, name: str) -> int:
        vid = value_id(fn, name)
        n = self.ids.get(vid)
        if n is None:
            n = self.ids[vid] = len(self.ids)
        return n

    def operand(self, fn: str, op) -> int | None:
        if isinstance(op, Var) and op.name not in self.program.consts:
            return self.node(fn, op.name)
        return None

    def tag(self, n: int, attr: str):
        self.attr.setdefault(n, set()).add(attr)

    def emit(self, kind: int, a: int | None, b: int | None):
        if a is None or b is None:
            return
        self.kinds.append(kind)
        self.lhs.append(a)
        self.rhs.append(b)

    def build(self):
        prog = self.program
        for f in prog.functions:
            if f.is_external:
                continue
            for p in f.params:
                self.node(f.name, p.name)
        for f in prog.functions:
            if f.is_external:
                continue
            for _, _, ins in f.instructions():
                self.instr(f.name, ins)

    def instr(self, fn: str, ins):
        U, P = kernels.UNIFY, kernels.POINTS_TO
        if isinstance(ins, Alloc):
            self.tag(self.node(fn, ins.dest), HEAP)
        elif isinstance(ins, Load):
            self.emit(P, self.operand(fn, ins.addr), self.node(fn, ins.dest))
        elif isinstance(ins, Store):
            self.emit(P, self.operand(fn, ins.addr), self.operand(fn, ins.src))
        elif isinstance(ins, AddrOf):
            p = self.node(fn, ins.dest)
            self.tag(p, STACK)
            self.emit(P, p, self.operand(fn, ins.var))
        elif isinstance(ins, MakeDescriptor):
            d = self.node(fn, ins.dest)
            self.tag(d, DESCRIPTOR)
            base = self.operand(fn, ins.base)
            if base is not None:
                self.tag(base, PAYLOAD)
            self.emit(P, d, base)
        elif isinstance(ins, ExtractBase):
            self.emit(P, self.operand(fn, ins.descriptor), self.node(fn, ins.dest))
        elif isinstance(ins, CallInstr):
            dest = self.node(fn, ins.dest) if ins.dest else None
            callee = self.program.defined(ins.callee)
            if callee is None:
                if dest is not None:
                    self.tag(dest, HANDLE)
                return
            for actual, formal in zip(ins.args, callee.params):
                self.emit(U, self.operand(fn, actual), self.node(callee.name, formal.name))
            if dest is not None:
                for _, _, cins in callee.instructions():
                    if isinstance(cins, Return) and cins.val is not None:
                        self.emit(U, dest, self.operand(callee.name, cins.val))


def compute_alias(program: Program, impl: str | None = None) -> AliasModel:
    b = _Builder(program)
    b.build()
    n = len(b.ids)
    parent = kernels.i64(range(n))
    pts = kernels.i64([-1] * n)
    kernels.solve_unification(parent, pts, b.kinds, b.lhs, b.rhs, impl=impl)
    root = list(parent)
    pointee = {r: pts[r] for r in set(root) if pts[r] != -1}
    attributes: dict[int, set[str]] = {}
    for node, attrs in b.attr.items():
        attributes.setdefault(root[node], set()).update(attrs)
    return AliasModel(
        ids=dict(b.ids),
        root=root,
        pointee_of_root=pointee,
        attributes={k: frozenset(v) for k, v in attributes.items()},
    )


def may_alias(model: AliasModel, v1: str, v2: str) -> bool:
    return model.may_alias(v1, v2)
