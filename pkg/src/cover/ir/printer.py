from __future__ import annotations

from ..modes import LanguageMode
from .nodes import Function, Program


def format_function(fn: Function) -> str:
    head = f"func {fn.name}(" + ", ".join(str(p) for p in fn.params) + ")"
    if fn.is_external:
        return head
    lines = [head + " {"]
    for b in fn.blocks:
        lines.append(f"{b.label}:")
        lines.extend(f"  {ins}" for ins in b.instrs)
    lines.append("}")
    return "\n".join(lines)


def format_program(program: Program) -> str:
    """Canonical text; ``parse_program(format_program(p)) == p``."""
    out = []
    if program.mode is not LanguageMode.C:
        out.append(f"mode {program.mode.value}")
    if program.entry != "main":
        out.append(f"entry {program.entry}")
    for name, value in program.consts.items():
        out.append(f"const {name} = {value}")
    for fn in program.functions:
        out.append(format_function(fn))
    return "\n".join(out) + "\n"
