"""Language-mode normalization shared by the static and dynamic engines.

Fortran mode differs from C mode in three ways that matter here:
generic API names resolve to ``_f08`` implementation symbols, array
arguments travel inside descriptors, and every string parameter adds a
hidden length argument after the declared ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .contracts.ast import Access, Slot
from .errors import ArityMismatch, ModeError
from .ir.nodes import (
    AddrOf,
    Alloc,
    CallInstr,
    ExtractBase,
    Function,
    MakeDescriptor,
    Program,
    Var,
)
from .modes import LanguageMode

DECLARE_CONTRACT = "Declare_Contract"


class GenericMap(Mapping[str, str]):
    """generic-name -> implementation-name, injective."""

    def __init__(self, entries: Mapping[str, str] | None = None):
        self._map: dict[str, str] = {}
        seen: dict[str, str] = {}
        for generic, impl in (entries or {}).items():
            if impl in seen and seen[impl] != generic:
                raise ValueError(f"{impl!r} is the implementation of both {seen[impl]!r} and {generic!r}")
            seen[impl] = generic
            self._map[generic] = impl
        self._impls = frozenset(seen)

    def __getitem__(self, key: str) -> str:
        return self._map[key]

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def is_implementation(self, name: str) -> bool:
        return name in self._impls

    @classmethod
    def parse(cls, text: str) -> "GenericMap":
        entries: dict[str, str] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            generic, sep, impl = line.partition("=")
            if not sep or not generic.strip() or not impl.strip():
                raise ValueError(f"line {lineno}: expected generic=implementation, got {raw!r}")
            entries[generic.strip()] = impl.strip()
        return cls(entries)


def load_generic_map(path: str | Path | None = None) -> GenericMap:
    if path is None:
        text = resources.files("cover.data").joinpath("f08_names.map").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return GenericMap.parse(text)


_DEFAULT_GMAP: GenericMap | None = None


def default_generic_map() -> GenericMap:
    global _DEFAULT_GMAP
    if _DEFAULT_GMAP is None:
        _DEFAULT_GMAP = load_generic_map()
    return _DEFAULT_GMAP


def resolve_callee(name: str, mode: LanguageMode, gmap: Mapping[str, str] | None = None) -> str:
    if mode is not LanguageMode.FORTRAN:
        return name
    if gmap is None:
        gmap = default_generic_map()
    return gmap.get(name, name)


def value_types(fn: Function) -> dict[str, str]:
    """Best-effort static type of each register: ``addr``, ``desc`` or declared param type."""
    types = {p.name: p.type for p in fn.params}
    for _, _, ins in fn.instructions():
        if isinstance(ins, (Alloc, AddrOf, ExtractBase)):
            types[ins.dest] = "addr"
        elif isinstance(ins, MakeDescriptor):
            types[ins.dest] = "desc"
    return types


@dataclass(frozen=True)
class NormArg:
    value: object
    # True when the IR operand is a descriptor and the callback sees its base
    via_descriptor: bool = False


@dataclass(frozen=True)
class NormalizedCall:
    callee: str
    args: tuple[NormArg, ...]
    ir_arity: int
    trimmed: int = 0

    @property
    def arity(self) -> int:
        return len(self.args)


def declaration(program: Program, name: str, resolved: str) -> Function | None:
    for candidate in (resolved, name):
        f = program.function(candidate)
        if f is not None and f.is_external:
            return f
    return None


def normalize_call_args(
    call: CallInstr,
    mode: LanguageMode,
    program: Program,
    caller: Function,
    gmap: Mapping[str, str] | None = None,
    types: dict[str, str] | None = None,
) -> NormalizedCall:
    resolved = resolve_callee(call.callee, mode, gmap)
    decl = declaration(program, call.callee, resolved)
    args = list(call.args)
    trimmed = 0
    if mode is LanguageMode.FORTRAN:
        if decl is not None:
            trimmed = sum(1 for p in decl.params if p.type == "str")
            if trimmed:
                args = args[: len(args) - trimmed] if len(args) >= trimmed else []
        if types is None:
            types = value_types(caller)
        norm = tuple(
            NormArg(a, isinstance(a, Var) and types.get(a.name) == "desc") for a in args
        )
    else:
        norm = tuple(NormArg(a) for a in args)
    if decl is not None and len(norm) != decl.arity:
        raise ArityMismatch(
            f"call to {resolved} at line {call.line} passes {len(norm)} argument(s)"
            f" after trimming {trimmed}, declaration expects {decl.arity}"
        )
    return NormalizedCall(resolved, norm, len(call.args), trimmed)


def check_slot(slot: Slot, mode: LanguageMode, arity: int | None = None) -> None:
    if slot.access is not Access.DIRECT and mode is LanguageMode.FORTRAN:
        raise ModeError(f"slot {slot} uses {slot.access.value!r}, which Fortran-mode contracts do not allow")
    if arity is not None and not 0 <= slot.index < arity:
        raise IndexError(f"slot {slot} out of range for a call with {arity} argument(s)")


def resolve_slot(slot: Slot, call: NormalizedCall, mode: LanguageMode, alias, function: str) -> int | None:
    """Abstract location named by ``slot`` at a normalized call site.

    Every form resolves to the memory the argument addresses: Fortran passes
    by reference, and in C both ``*k`` and ``&k`` name the object behind the
    pointer argument. Literal arguments name no memory (None).
    """
    check_slot(slot, mode, call.arity)
    arg = call.args[slot.index]
    if not isinstance(arg.value, Var):
        return None
    if arg.via_descriptor:
        return alias.pointee_in(function, arg.value.name)
    return alias.node_in(function, arg.value.name)
