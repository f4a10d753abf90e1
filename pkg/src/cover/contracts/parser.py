"""Recursive-descent parser for contract bodies.

Grammar::

    contract    ::= { scope }
    scope       ::= ("PRE" | "POST") "{" [op {"," op}] "}"
                  | "TAGS" "{" [tagdecl {"," tagdecl}] "}"
    op          ::= "call!" "(" NAME ")"
                  | "call_tag!" "(" NAME ["," "$:" INT] ")"
                  | "read!" "(" slotexpr ")" | "write!" "(" slotexpr ")"
                  | "no!" "(" op ")" "until!" "(" op ")"
    tagdecl     ::= NAME "(" INT ")"
    slotexpr    ::= ["*" | "&"] INT
"""

from __future__ import annotations

import re

from ..errors import ContractSyntaxError, ModeError
from ..modes import LanguageMode
from .ast import Access, Call, CallTag, Contract, NoUntil, Read, Slot, TagDecl, Write

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<kw>(?:call_tag|call|read|write|no|until)!)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<map>\$:)
  | (?P<punct>[{}(),*&])
    """,
    re.VERBOSE,
)


def strip_continuations(text: str) -> str:
    """Remove Fortran free-form continuation ampersands.

    A trailing ``&`` marks a continued line; the optional leading ``&`` on the
    following line belongs to the same continuation and is removed with it.
    Any other ``&`` is left alone (and later rejected as an address-of slot).
    """
    lines = text.split("\n")
    out = []
    continued = False
    for line in lines:
        body = line
        if continued:
            stripped = body.lstrip()
            if stripped.startswith("&"):
                body = stripped[1:]
        rstripped = body.rstrip()
        continued = rstripped.endswith("&")
        if continued:
            body = rstripped[:-1]
        out.append(body)
    return " ".join(out)


class _Parser:
    def __init__(self, text: str, mode: LanguageMode):
        self.text = text
        self.mode = mode
        self.tokens = list(self._lex(text))
        self.i = 0

    def _lex(self, text):
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ContractSyntaxError(f"unexpected character {text[pos]!r}", pos, text=text)
            kind = m.lastgroup
            if kind != "ws":
                yield kind, m.group(), pos
            pos = m.end()

    # token helpers
    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return ("eof", "", len(self.text))

    def expect(self, value: str | None = None, kind: str | None = None) -> str:
        tk, tv, tp = self.peek()
        if tk == "eof" or (value is not None and tv != value) or (kind is not None and tk != kind):
            want = value if value is not None else kind
            got = "end of input" if tk == "eof" else repr(tv)
            raise ContractSyntaxError(f"unexpected {got}", tp, expected=want, text=self.text)
        self.i += 1
        return tv

    def accept(self, value: str) -> bool:
        if self.peek()[1] == value:
            self.i += 1
            return True
        return False

    # grammar
    def contract(self) -> Contract:
        pre, post, tags = [], [], []
        while self.peek()[0] != "eof":
            tk, tv, tp = self.peek()
            if tv == "PRE":
                self.i += 1
                pre.extend(self.op_list())
            elif tv == "POST":
                self.i += 1
                post.extend(self.op_list())
            elif tv == "TAGS":
                self.i += 1
                tags.extend(self.tag_list())
            else:
                raise ContractSyntaxError(f"unexpected {tv!r}", tp, expected="PRE, POST or TAGS", text=self.text)
        return Contract(tuple(pre), tuple(post), tuple(tags))

    def op_list(self):
        self.expect("{")
        ops = []
        if not self.accept("}"):
            ops.append(self.op())
            while self.accept(","):
                ops.append(self.op())
            self.expect("}")
        return ops

    def tag_list(self):
        self.expect("{")
        decls = []
        if not self.accept("}"):
            decls.append(self.tag_decl())
            while self.accept(","):
                decls.append(self.tag_decl())
            self.expect("}")
        return decls

    def tag_decl(self) -> TagDecl:
        name = self.expect(kind="name")
        self.expect("(")
        param = int(self.expect(kind="int"))
        self.expect(")")
        return TagDecl(name, param)

    def op(self, nested: bool = False):
        tk, tv, tp = self.peek()
        if tk != "kw":
            raise ContractSyntaxError(f"unexpected {tv!r}", tp, expected="operation", text=self.text)
        self.i += 1
        if tv == "call!":
            self.expect("(")
            target = self.expect(kind="name")
            self.expect(")")
            return Call(target)
        if tv == "call_tag!":
            self.expect("(")
            tag = self.expect(kind="name")
            mapping = None
            if self.accept(","):
                self.expect("$:")
                mapping = int(self.expect(kind="int"))
            self.expect(")")
            return CallTag(tag, mapping)
        if tv in ("read!", "write!"):
            self.expect("(")
            slot = self.slot()
            self.expect(")")
            return Read(slot) if tv == "read!" else Write(slot)
        if tv == "no!":
            if nested:
                raise ContractSyntaxError("no! cannot nest inside no!/until!", tp, text=self.text)
            self.expect("(")
            forbidden = self.op(nested=True)
            self.expect(")")
            self.expect("until!")
            self.expect("(")
            release = self.op(nested=True)
            self.expect(")")
            return NoUntil(forbidden, release)
        raise ContractSyntaxError(f"unexpected {tv!r}", tp, expected="operation", text=self.text)

    def slot(self) -> Slot:
        tk, tv, tp = self.peek()
        access = Access.DIRECT
        if tv in ("*", "&"):
            access = Access(tv)
            if self.mode is LanguageMode.FORTRAN:
                raise ModeError(f"{tv!r} slot at offset {tp} is not allowed in Fortran-mode contracts")
            self.i += 1
        return Slot(int(self.expect(kind="int")), access)


def parse_contract(text: str, mode: LanguageMode | str = LanguageMode.C) -> Contract:
    """Parse one contract body (the text of one CONTRACT(...) annotation)."""
    mode = LanguageMode.parse(mode)
    if mode is LanguageMode.FORTRAN:
        text = strip_continuations(text)
    parser = _Parser(text, mode)
    return parser.contract()
