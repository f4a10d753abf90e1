"""Text format of the mini-IR.

::

    mode fortran                      ; optional, default c
    entry main                        ; optional, default main
    const INT = 1
    func MPI_Get(buf:addr, n:int, ...)       ; no body: external API function
    func main() {
    entry:
      buf = alloc 64
      r = call MPI_Get(buf, 1, INT, 0, 0, 1, INT, w)
      cbr f, then, done
    ...
    }

Instructions end at a newline or at a ``;`` written directly after a token.
A ``;`` at the start of a line or preceded by whitespace starts a comment.
"""

from __future__ import annotations

import re

from ..errors import (
    DuplicateDefinition,
    DuplicateFunction,
    IRSyntaxError,
    ModeError,
    NoEntry,
    UndefinedValue,
)
from ..modes import LanguageMode
from .cfg import build_cfg
from .nodes import (
    INTENTS,
    PARAM_TYPES,
    AddrOf,
    Alloc,
    Block,
    Branch,
    CallInstr,
    CondBranch,
    ExtractBase,
    FuncRef,
    Function,
    Load,
    MakeDescriptor,
    Param,
    Program,
    Return,
    Store,
    Str,
    TERMINATORS,
    Var,
    defined_name,
    used_operands,
)

_TOKEN = re.compile(
    r"""
    (?P<nl>\n)
  | (?P<ws>[ \t\r]+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[(){}\[\],:=@;])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


def _unescape(body: str) -> str:
    return re.sub(r"\\(.)", lambda m: _ESCAPES.get(m.group(1), m.group(1)), body)


def tokenize(text: str):
    """Yield ``(kind, value, line, col)``; newlines and separators become ``nl``."""
    pos, line, line_start = 0, 1, 0
    depth = 0
    prev_ws = True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise IRSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind, value = m.lastgroup, m.group()
        if kind == "nl":
            if depth == 0:
                yield "nl", "\n", line, col
            line += 1
            line_start = m.end()
            prev_ws = True
        elif kind == "ws":
            prev_ws = True
        elif value == ";":
            if prev_ws:
                end = text.find("\n", pos)
                pos = len(text) if end < 0 else end
                continue
            if depth == 0:
                yield "nl", ";", line, col
            prev_ws = True
        else:
            if value in "([":
                depth += 1
            elif value in ")]":
                depth = max(0, depth - 1)
            if kind == "str":
                value = _unescape(value[1:-1])
            yield kind, value, line, col
            prev_ws = False
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


class _Parser:
    def __init__(self, text: str):
        self.toks = list(tokenize(text))
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return IRSyntaxError(msg, tok[2], tok[3])

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind) or tok[0] == "eof":
            want = value if value is not None else kind
            shown = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise self.error(f"expected {want}, got {shown}", tok)
        self.i += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok[1] == value and tok[0] in ("punct", "name")

    def skip_nl(self):
        while self.peek()[0] == "nl":
            self.i += 1

    def end_stmt(self):
        tok = self.peek()
        if tok[0] == "nl":
            self.skip_nl()
        elif tok[1] != "}" and tok[0] != "eof":
            raise self.error(f"expected end of instruction, got {tok[1]!r}")

    # top level
    def program(self, mode: LanguageMode | None) -> Program:
        prog = Program(mode=mode or LanguageMode.C)
        file_mode = None
        entry = None
        names = set()
        while True:
            self.skip_nl()
            tok = self.peek()
            if tok[0] == "eof":
                break
            if tok[1] == "mode" and tok[0] == "name":
                self.next()
                mtok = self.expect(kind="name")
                try:
                    file_mode = LanguageMode.parse(mtok[1])
                except ValueError:
                    raise self.error(f"unknown mode {mtok[1]!r}", mtok) from None
                self.end_stmt()
            elif tok[1] == "entry" and tok[0] == "name":
                self.next()
                entry = self.expect(kind="name")[1]
                self.end_stmt()
            elif tok[1] == "const" and tok[0] == "name":
                self.next()
                name = self.expect(kind="name")
                self.expect("=")
                value = int(self.expect(kind="int")[1])
                if name[1] in prog.consts:
                    raise DuplicateDefinition(f"constant {name[1]!r} defined twice", name[2], name[3])
                prog.consts[name[1]] = value
                self.end_stmt()
            elif tok[1] == "func" and tok[0] == "name":
                fn = self.function()
                if fn.name in names:
                    raise DuplicateFunction(f"function {fn.name!r} defined twice", tok[2], tok[3])
                names.add(fn.name)
                prog.functions.append(fn)
            else:
                raise self.error(f"unexpected {tok[1]!r} at top level", tok)
        if file_mode is not None:
            if mode is not None and mode is not file_mode:
                raise ModeError(f"program declares mode {file_mode} but {mode} was requested")
            prog.mode = file_mode
        if entry is not None:
            prog.entry = entry
        return prog

    def function(self) -> Function:
        self.expect("func")
        name = self.expect(kind="name")[1]
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.next()
                params.append(self.param())
        self.expect(")")
        if not self.at("{"):
            self.end_stmt()
            return Function(name, tuple(params), [], declared_external=True)
        self.expect("{")
        blocks: list[Block] = []
        self.skip_nl()
        while not self.at("}"):
            tok = self.peek()
            if tok[0] == "eof":
                raise self.error(f"unterminated body of {name}")
            if tok[0] == "name" and self.peek(1)[1] == ":":
                self.next()
                self.next()
                blocks.append(Block(tok[1]))
                self.skip_nl()
                continue
            if not blocks:
                raise self.error("instruction before first block label", tok)
            blocks[-1].instrs.append(self.instruction())
            self.end_stmt()
        self.expect("}")
        self.end_stmt()
        return Function(name, tuple(params), blocks)

    def param(self) -> Param:
        name = self.expect(kind="name")[1]
        ptype, intent = "int", None
        if self.at(":"):
            self.next()
            tt = self.expect(kind="name")
            if tt[1] not in PARAM_TYPES:
                raise self.error(f"unknown type {tt[1]!r}", tt)
            ptype = tt[1]
            if self.at(":"):
                self.next()
                it = self.expect(kind="name")
                if it[1] not in INTENTS:
                    raise self.error(f"unknown intent {it[1]!r}", it)
                intent = it[1]
        return Param(name, ptype, intent)

    def operand(self):
        tok = self.next()
        if tok[0] == "int":
            return int(tok[1])
        if tok[0] == "name":
            return Var(tok[1])
        raise self.error(f"expected value, got {tok[1]!r}", tok)

    def arg(self):
        tok = self.peek()
        if tok[0] == "str":
            self.next()
            return Str(tok[1])
        if tok[1] == "@" and tok[0] == "punct":
            self.next()
            return FuncRef(self.expect(kind="name")[1])
        return self.operand()

    def call(self, dest, line):
        self.expect("call")
        callee = self.expect(kind="name")[1]
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.arg())
            while self.at(","):
                self.next()
                args.append(self.arg())
        self.expect(")")
        return CallInstr(dest, callee, tuple(args), line)

    def instruction(self):
        tok = self.peek()
        line = tok[2]
        if tok[0] != "name":
            raise self.error(f"expected instruction, got {tok[1]!r}", tok)
        op = tok[1]
        if op == "store":
            self.next()
            addr = self.operand()
            self.expect(",")
            return Store(addr, self.operand(), line)
        if op == "br":
            self.next()
            return Branch(self.expect(kind="name")[1], line)
        if op == "cbr":
            self.next()
            cond = self.operand()
            self.expect(",")
            then = self.expect(kind="name")[1]
            self.expect(",")
            return CondBranch(cond, then, self.expect(kind="name")[1], line)
        if op == "ret":
            self.next()
            if self.peek()[0] in ("nl", "eof") or self.at("}"):
                return Return(None, line)
            return Return(self.operand(), line)
        if op == "call":
            return self.call(None, line)
        # dest = ...
        dest = self.next()[1]
        self.expect("=")
        kw = self.peek()
        if kw[1] == "call":
            return self.call(dest, line)
        self.next()
        if kw[1] == "alloc":
            return Alloc(dest, self.operand(), line)
        if kw[1] == "load":
            return Load(dest, self.operand(), line)
        if kw[1] == "addrof":
            v = self.operand()
            if not isinstance(v, Var):
                raise self.error("addrof needs a value name", kw)
            return AddrOf(dest, v, line)
        if kw[1] == "extractbase":
            return ExtractBase(dest, self.operand(), line)
        if kw[1] == "makedesc":
            base = self.operand()
            self.expect("rank")
            self.expect("=")
            rank = int(self.expect(kind="int")[1])
            self.expect("extents")
            self.expect("=")
            self.expect("[")
            extents = []
            if not self.at("]"):
                extents.append(int(self.expect(kind="int")[1]))
                while self.at(","):
                    self.next()
                    extents.append(int(self.expect(kind="int")[1]))
            self.expect("]")
            if len(extents) != rank:
                raise self.error(f"rank={rank} but {len(extents)} extents", kw)
            return MakeDescriptor(dest, base, rank, tuple(extents), line)
        raise self.error(f"unknown instruction {kw[1]!r}", kw)


def check_function(fn: Function, program: Program) -> None:
    """Structural checks: terminators last, single assignment, defs dominate uses."""
    if program.mode is not LanguageMode.FORTRAN:
        for p in fn.params:
            if p.intent is not None:
                raise ModeError(f"intent on parameter {p.name!r} of {fn.name} requires Fortran mode")
    if fn.is_external:
        return
    for b in fn.blocks:
        for ins in b.instrs[:-1]:
            if isinstance(ins, TERMINATORS):
                raise IRSyntaxError(f"instruction after terminator in block {b.label!r}", ins.line)
    labels = [b.label for b in fn.blocks]
    if len(set(labels)) != len(labels):
        raise IRSyntaxError(f"duplicate block label in {fn.name}")
    cfg = build_cfg(fn)

    where: dict[str, tuple[str, int]] = {}
    for p in fn.params:
        if p.name in where:
            raise DuplicateDefinition(f"parameter {p.name!r} repeated in {fn.name}")
        where[p.name] = (None, -1)
    for b in fn.blocks:
        for i, ins in enumerate(b.instrs):
            d = defined_name(ins)
            if d is None:
                continue
            if d in where or d in program.consts:
                raise DuplicateDefinition(f"{d!r} assigned more than once in {fn.name}", ins.line)
            where[d] = (b.label, i)

    dom = cfg.dominators()
    for b in fn.blocks:
        for i, ins in enumerate(b.instrs):
            for op in used_operands(ins):
                if not isinstance(op, Var):
                    continue
                if op.name in program.consts:
                    continue
                site = where.get(op.name)
                if site is None:
                    raise UndefinedValue(f"{op.name!r} used but never defined in {fn.name}", ins.line)
                dblock, di = site
                if dblock is None or b.label in cfg.dead:
                    continue
                ok = di < i if dblock == b.label else dblock in dom.get(b.label, ())
                if not ok:
                    raise UndefinedValue(f"{op.name!r} used before its definition in {fn.name}", ins.line)


def parse_program(text: str, mode: LanguageMode | str | None = None) -> Program:
    """Parse and structurally validate a mini-IR module."""
    if mode is not None:
        mode = LanguageMode.parse(mode)
    program = _Parser(text).program(mode)
    defined = [f for f in program.functions if not f.is_external]
    if program.function(program.entry) is None or program.function(program.entry).is_external:
        if not defined:
            raise NoEntry("program has no functions" if not program.functions else "no entry function")
        raise NoEntry(f"entry function {program.entry!r} is not defined")
    for fn in program.functions:
        check_function(fn, program)
    return program
