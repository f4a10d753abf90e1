"""Mini-IR data model.

Values are named registers assigned once per function. Operands are either a
:class:`Var` reference or a plain ``int`` literal; call arguments may also be
string literals (:class:`Str`) or function references (:class:`FuncRef`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from ..modes import LanguageMode

PARAM_TYPES = ("int", "addr", "desc", "str")
INTENTS = ("in", "out", "inout")


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Str:
    text: str

    def __str__(self) -> str:
        escaped = self.text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'


@dataclass(frozen=True)
class FuncRef:
    name: str

    def __str__(self) -> str:
        return f"@{self.name}"


Operand = Union[Var, int]
Arg = Union[Var, int, Str, FuncRef]


def _fmt(op) -> str:
    return str(op)


@dataclass(frozen=True)
class Alloc:
    dest: str
    size: Operand
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.dest} = alloc {_fmt(self.size)}"


@dataclass(frozen=True)
class Load:
    dest: str
    addr: Operand
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.dest} = load {_fmt(self.addr)}"


@dataclass(frozen=True)
class Store:
    addr: Operand
    src: Operand
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"store {_fmt(self.addr)}, {_fmt(self.src)}"


@dataclass(frozen=True)
class AddrOf:
    dest: str
    var: Var
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.dest} = addrof {self.var}"


@dataclass(frozen=True)
class CallInstr:
    dest: str | None
    callee: str
    args: tuple[Arg, ...] = ()
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        call = f"call {self.callee}(" + ", ".join(map(_fmt, self.args)) + ")"
        return f"{self.dest} = {call}" if self.dest else call


@dataclass(frozen=True)
class MakeDescriptor:
    dest: str
    base: Operand
    rank: int
    extents: tuple[int, ...]
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        ext = ",".join(str(e) for e in self.extents)
        return f"{self.dest} = makedesc {_fmt(self.base)} rank={self.rank} extents=[{ext}]"


@dataclass(frozen=True)
class ExtractBase:
    dest: str
    descriptor: Operand
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"{self.dest} = extractbase {_fmt(self.descriptor)}"


@dataclass(frozen=True)
class Branch:
    target: str
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"br {self.target}"


@dataclass(frozen=True)
class CondBranch:
    cond: Operand
    then: str
    else_: str
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return f"cbr {_fmt(self.cond)}, {self.then}, {self.else_}"


@dataclass(frozen=True)
class Return:
    val: Operand | None = None
    line: int = field(default=0, compare=False)

    def __str__(self) -> str:
        return "ret" if self.val is None else f"ret {_fmt(self.val)}"


Instruction = Union[Alloc, Load, Store, AddrOf, CallInstr, MakeDescriptor, ExtractBase, Branch, CondBranch, Return]
TERMINATORS = (Branch, CondBranch, Return)


def defined_name(instr) -> str | None:
    return getattr(instr, "dest", None)


def used_operands(instr) -> list:
    """Operands read by ``instr`` (literals included)."""
    if isinstance(instr, Alloc):
        return [instr.size]
    if isinstance(instr, Load):
        return [instr.addr]
    if isinstance(instr, Store):
        return [instr.addr, instr.src]
    if isinstance(instr, AddrOf):
        return [instr.var]
    if isinstance(instr, CallInstr):
        return list(instr.args)
    if isinstance(instr, MakeDescriptor):
        return [instr.base]
    if isinstance(instr, ExtractBase):
        return [instr.descriptor]
    if isinstance(instr, CondBranch):
        return [instr.cond]
    if isinstance(instr, Return):
        return [] if instr.val is None else [instr.val]
    return []


def successors(term) -> tuple[str, ...]:
    if isinstance(term, Branch):
        return (term.target,)
    if isinstance(term, CondBranch):
        return (term.then, term.else_)
    return ()


@dataclass(frozen=True)
class Param:
    name: str
    type: str = "int"
    intent: str | None = None

    def __str__(self) -> str:
        text = f"{self.name}:{self.type}"
        return f"{text}:{self.intent}" if self.intent else text


@dataclass
class Block:
    label: str
    instrs: list = field(default_factory=list)

    @property
    def terminator(self):
        if self.instrs and isinstance(self.instrs[-1], TERMINATORS):
            return self.instrs[-1]
        return None


@dataclass
class Function:
    name: str
    params: tuple[Param, ...] = ()
    blocks: list[Block] = field(default_factory=list)
    # set for declarations written without a body
    declared_external: bool = False

    @property
    def is_external(self) -> bool:
        return self.declared_external

    @property
    def arity(self) -> int:
        return len(self.params)

    def block(self, label: str) -> Block:
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)

    def instructions(self) -> Iterator[tuple[int, Block, object]]:
        """Yield ``(index, block, instr)`` with a function-wide running index."""
        idx = 0
        for b in self.blocks:
            for ins in b.instrs:
                yield idx, b, ins
                idx += 1


@dataclass
class Program:
    mode: LanguageMode = LanguageMode.C
    functions: list[Function] = field(default_factory=list)
    entry: str = "main"
    consts: dict[str, int] = field(default_factory=dict)

    def function(self, name: str) -> Function | None:
        for f in self.functions:
            if f.name == name:
                return f
        return None

    def defined(self, name: str) -> Function | None:
        """The function named ``name`` if it has a body."""
        f = self.function(name)
        return f if f is not None and not f.is_external else None

    def called_names(self) -> set[str]:
        return {
            ins.callee
            for f in self.functions
            for _, _, ins in f.instructions()
            if isinstance(ins, CallInstr)
        }
