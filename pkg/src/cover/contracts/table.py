from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from ..errors import DuplicateContract, ModeError
from ..frontends import DECLARE_CONTRACT, resolve_callee
from ..ir.nodes import CallInstr, FuncRef, Program, Str
from ..modes import LanguageMode
from .ast import Attachment, Call, CallTag, Contract, NoUntil, Read, ValidationIssue, Write
from .packs import Pack, load_pack
from .parser import parse_contract

log = logging.getLogger(__name__)


def _op_names(op):
    """(call targets, tag names) mentioned by one contract operation."""
    if isinstance(op, Call):
        return {op.target}, set()
    if isinstance(op, CallTag):
        return set(), {op.tag}
    if isinstance(op, NoUntil):
        c1, t1 = _op_names(op.forbidden)
        c2, t2 = _op_names(op.release)
        return c1 | c2, t1 | t2
    return set(), set()


@dataclass(frozen=True)
class ContractTable:
    mode: LanguageMode
    by_function: Mapping[str, Contract]
    tag_index: Mapping[str, frozenset[tuple[str, int]]]
    origins: Mapping[str, str] = field(default_factory=dict)
    warnings: tuple[ValidationIssue, ...] = ()

    @classmethod
    def build(cls, attachments: Iterable[Attachment], mode: LanguageMode, warnings=()) -> "ContractTable":
        by_function: dict[str, Contract] = {}
        origins: dict[str, str] = {}
        tags: dict[str, set[tuple[str, int]]] = {}
        for att in attachments:
            if att.function in by_function:
                raise DuplicateContract(
                    f"{att.function} already has a contract from {origins[att.function]}; "
                    f"second attachment from {att.origin}"
                )
            by_function[att.function] = att.contract
            origins[att.function] = att.origin
            for decl in att.contract.tags:
                tags.setdefault(decl.name, set()).add((att.function, decl.param))
        return cls(
            mode,
            MappingProxyType(by_function),
            MappingProxyType({k: frozenset(v) for k, v in tags.items()}),
            MappingProxyType(origins),
            tuple(warnings),
        )

    def get(self, function: str) -> Contract | None:
        return self.by_function.get(function)

    def tags_of(self, function: str) -> tuple[tuple[str, int], ...]:
        """(tag, param) pairs declared by ``function``, sorted by tag name."""
        c = self.by_function.get(function)
        if c is None:
            return ()
        return tuple(sorted((d.name, d.param) for d in c.tags))

    def tag_members(self, tag: str) -> frozenset[tuple[str, int]]:
        return self.tag_index.get(tag, frozenset())

    @property
    def mentioned(self) -> frozenset[str]:
        """Functions that carry a contract or are named by one (directly or through a tag)."""
        names = set(self.by_function)
        for c in self.by_function.values():
            for op in c.pre + c.post:
                calls, tags = _op_names(op)
                names |= calls
                for t in tags:
                    names |= {fn for fn, _ in self.tag_members(t)}
        return frozenset(names)

    def instrumented(self, function: str) -> bool:
        return function in self.mentioned

    def __len__(self) -> int:
        return len(self.by_function)


def _declare_contract_text(ins: CallInstr) -> tuple[str, str]:
    if not ins.args or not isinstance(ins.args[0], FuncRef):
        raise ValueError(f"line {ins.line}: {DECLARE_CONTRACT} needs a function reference (@name) first")
    parts = ins.args[1:]
    if not parts or not all(isinstance(p, Str) for p in parts):
        raise ValueError(f"line {ins.line}: {DECLARE_CONTRACT} needs string-literal contract text")
    return ins.args[0].name, "\n".join(p.text for p in parts)


def collect_attachments(
    program: Program,
    packs: Iterable[Pack | str | Path] = (),
    gmap: Mapping[str, str] | None = None,
) -> ContractTable:
    """Merge pack contracts with in-program ``Declare_Contract`` calls.

    The ``Declare_Contract`` call instructions are deleted from ``program``.
    Attachment names are resolved like call targets, so in Fortran mode a
    generic name attaches to its implementation symbol.
    """
    mode = program.mode
    attachments: list[Attachment] = []
    for pack in packs:
        if not isinstance(pack, Pack):
            pack = load_pack(pack)
        if pack.mode is not mode:
            raise ModeError(f"contract pack {pack.name} is {pack.mode}-mode but the program is {mode}-mode")
        for att in pack.attachments:
            attachments.append(
                Attachment(resolve_callee(att.function, mode, gmap), att.contract, att.origin, att.source)
            )

    warnings: list[ValidationIssue] = []
    known = {f.name for f in program.functions} | program.called_names()
    known |= {resolve_callee(n, mode, gmap) for n in known}
    pack_names = {a.function for a in attachments}
    for fn in program.functions:
        for block in fn.blocks:
            keep = []
            for ins in block.instrs:
                if isinstance(ins, CallInstr) and ins.callee == DECLARE_CONTRACT:
                    target, text = _declare_contract_text(ins)
                    resolved = resolve_callee(target, mode, gmap)
                    contract = parse_contract(text, mode)
                    attachments.append(Attachment(resolved, contract, f"program:{fn.name}:{ins.line}", text))
                    if resolved not in known and resolved not in pack_names:
                        issue = ValidationIssue(
                            "UnknownFunction",
                            f"contract attached to {resolved}, which the program never declares or calls",
                            resolved,
                            "warning",
                        )
                        log.warning("%s", issue)
                        warnings.append(issue)
                else:
                    keep.append(ins)
            if len(keep) != len(block.instrs):
                block.instrs[:] = keep
    return ContractTable.build(attachments, mode, warnings)


def _arity(program: Program | None, fn: str) -> int | None:
    if program is None:
        return None
    f = program.function(fn)
    return None if f is None else f.arity


def validate(table: ContractTable, program: Program | None = None, gmap: Mapping[str, str] | None = None) -> list[ValidationIssue]:
    """Check tag resolution, index ranges and scope legality; [] when clean."""
    issues: list[ValidationIssue] = list(table.warnings)
    generic_names = set()
    if table.mode is LanguageMode.FORTRAN:
        from ..frontends import default_generic_map

        generic_names = set(gmap if gmap is not None else default_generic_map())

    def out_of_range(fn, index, what):
        issues.append(ValidationIssue("ParamOutOfRange", f"{what} refers to parameter {index}, but {fn} takes {_arity(program, fn)}", fn))

    for fn in sorted(table.by_function):
        contract = table.by_function[fn]
        arity = _arity(program, fn)

        def check_op(op, scope, in_region=False):
            if isinstance(op, Call):
                if op.target in generic_names:
                    issues.append(ValidationIssue(
                        "GenericTarget",
                        f"call!({op.target}) names a generic; Fortran code only calls {resolve_callee(op.target, table.mode, gmap)}",
                        fn, "warning"))
            elif isinstance(op, CallTag):
                if not table.tag_members(op.tag):
                    issues.append(ValidationIssue("UnresolvedTag", f"no function declares tag {op.tag!r}", fn))
                if op.mapping is not None and arity is not None and not 0 <= op.mapping < arity:
                    out_of_range(fn, op.mapping, f"mapping $:{op.mapping}")
            elif isinstance(op, (Read, Write)):
                if not in_region:
                    issues.append(ValidationIssue("UnsupportedOp", f"bare {op} in {scope} has no meaning; wrap it in no!(...) until!(...)", fn))
                if arity is not None and not 0 <= op.slot.index < arity:
                    out_of_range(fn, op.slot.index, f"slot {op.slot}")
            elif isinstance(op, NoUntil):
                if scope == "PRE":
                    issues.append(ValidationIssue("UnsupportedOp", "no!/until! is only meaningful in POST", fn))
                check_op(op.forbidden, scope, True)
                if isinstance(op.release, (Read, Write)):
                    issues.append(ValidationIssue("UnsupportedOp", "until! must name a call or call_tag", fn))
                check_op(op.release, scope, True)

        for op in contract.pre:
            check_op(op, "PRE")
        for op in contract.post:
            check_op(op, "POST")
        for decl in contract.tags:
            if arity is not None and not 0 <= decl.param < arity:
                out_of_range(fn, decl.param, f"tag {decl.name}({decl.param})")
    return issues
