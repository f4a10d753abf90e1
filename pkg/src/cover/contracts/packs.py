"""Contract-pack files (``.ctr``).

::

    # comment
    mode fortran
    contract MPI_Win_fence_f08 { TAGS { rma_complete(1) } }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import ContractSyntaxError, DuplicateContract, ModeError, PackError
from ..modes import LanguageMode
from .ast import Attachment
from .parser import parse_contract

SHIPPED = ("mpi_c", "mpi_f08")

_HEAD = re.compile(r"\s*(mode|contract)\b")
_NAME = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)")


@dataclass
class Pack:
    name: str
    mode: LanguageMode
    attachments: list[Attachment] = field(default_factory=list)

    def functions(self) -> list[str]:
        return [a.function for a in self.attachments]


def _strip_comments(text: str) -> str:
    return "\n".join(line.split("#", 1)[0] for line in text.split("\n"))


def parse_pack(text: str, name: str = "<pack>") -> Pack:
    src = _strip_comments(text)
    mode: LanguageMode | None = None
    attachments: list[Attachment] = []
    seen: set[str] = set()
    pos = 0

    def lineno(offset: int) -> int:
        return src.count("\n", 0, offset) + 1

    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src):
            break
        m = _HEAD.match(src, pos)
        if not m:
            raise PackError(f"{name}:{lineno(pos)}: expected 'mode' or 'contract'")
        pos = m.end()
        nm = _NAME.match(src, pos)
        if not nm:
            raise PackError(f"{name}:{lineno(pos)}: expected a name after {m.group(1)!r}")
        pos = nm.end()
        if m.group(1) == "mode":
            if attachments:
                raise PackError(f"{name}:{lineno(pos)}: mode must precede all contracts")
            try:
                mode = LanguageMode.parse(nm.group(1))
            except ValueError as exc:
                raise PackError(f"{name}:{lineno(pos)}: {exc}") from None
            continue
        if mode is None:
            raise PackError(f"{name}:{lineno(pos)}: pack must declare its mode before contracts")
        fn = nm.group(1)
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos >= len(src) or src[pos] != "{":
            raise PackError(f"{name}:{lineno(pos)}: expected '{{' after contract {fn}")
        depth, start = 0, pos
        while pos < len(src):
            if src[pos] == "{":
                depth += 1
            elif src[pos] == "}":
                depth -= 1
                if depth == 0:
                    break
            pos += 1
        if depth:
            raise PackError(f"{name}:{lineno(start)}: unbalanced braces in contract {fn}")
        body = src[start + 1 : pos]
        pos += 1
        try:
            contract = parse_contract(body, mode)
        except ContractSyntaxError as exc:
            raise PackError(f"{name}:{lineno(start + 1 + exc.position)}: contract {fn}: {exc}") from exc
        except ModeError as exc:
            raise ModeError(f"{name}:{lineno(start)}: contract {fn}: {exc}") from exc
        if fn in seen:
            raise DuplicateContract(f"{name}: {fn} has more than one contract")
        seen.add(fn)
        attachments.append(Attachment(fn, contract, origin=f"pack:{name}", source=body.strip()))
    if mode is None:
        raise PackError(f"{name}: missing mode declaration")
    return Pack(name, mode, attachments)


def load_pack(spec: str | Path) -> Pack:
    """Load a pack from a path, or by shipped name (``mpi_c``, ``mpi_f08``)."""
    path = Path(spec)
    if not path.exists() and str(spec) in SHIPPED:
        text = resources.files("cover.packs").joinpath(f"{spec}.ctr").read_text(encoding="utf-8")
        return parse_pack(text, str(spec))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise PackError(f"cannot read contract pack {spec}: {exc}") from exc
    return parse_pack(text, path.name)


def format_pack(pack: Pack) -> str:
    lines = [f"mode {pack.mode.value}"]
    lines += [f"contract {a.function} {{ {a.contract} }}" for a in pack.attachments]
    return "\n".join(lines) + "\n"
