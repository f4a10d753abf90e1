"""Structured form of contract text.

All nodes are frozen dataclasses so contracts can be hashed, compared and
shared between analyses without copying.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Union


class Access(enum.Enum):
    DIRECT = ""
    DEREF = "*"
    ADDROF = "&"


@dataclass(frozen=True)
class Slot:
    index: int
    access: Access = Access.DIRECT

    def __str__(self) -> str:
        return f"{self.access.value}{self.index}"


@dataclass(frozen=True)
class Call:
    target: str

    def __str__(self) -> str:
        return f"call!({self.target})"


@dataclass(frozen=True)
class CallTag:
    tag: str
    # parameter ordinal on the annotated call that the releasing call's
    # tagged argument must alias (``$:k``)
    mapping: int | None = None

    def __str__(self) -> str:
        if self.mapping is None:
            return f"call_tag!({self.tag})"
        return f"call_tag!({self.tag},$:{self.mapping})"


@dataclass(frozen=True)
class Read:
    slot: Slot

    def __str__(self) -> str:
        return f"read!({self.slot})"


@dataclass(frozen=True)
class Write:
    slot: Slot

    def __str__(self) -> str:
        return f"write!({self.slot})"


@dataclass(frozen=True)
class NoUntil:
    forbidden: "SimpleOp"
    release: "SimpleOp"

    def __str__(self) -> str:
        return f"no! ({self.forbidden}) until! ({self.release})"


SimpleOp = Union[Call, CallTag, Read, Write]
ContractOp = Union[Call, CallTag, Read, Write, NoUntil]


@dataclass(frozen=True)
class TagDecl:
    name: str
    param: int

    def __str__(self) -> str:
        return f"{self.name}({self.param})"


@dataclass(frozen=True)
class Contract:
    pre: tuple[ContractOp, ...] = ()
    post: tuple[ContractOp, ...] = ()
    tags: tuple[TagDecl, ...] = ()

    def is_empty(self) -> bool:
        return not (self.pre or self.post or self.tags)

    def slots(self):
        """Yield every slot referenced anywhere in the contract."""
        for op in self.pre + self.post:
            yield from _op_slots(op)

    def __str__(self) -> str:
        return pretty(self)


def _op_slots(op):
    if isinstance(op, (Read, Write)):
        yield op.slot
    elif isinstance(op, NoUntil):
        yield from _op_slots(op.forbidden)
        yield from _op_slots(op.release)


def pretty(contract: Contract) -> str:
    """Canonical single-line text; parses back to an equal Contract."""
    parts = []
    if contract.pre:
        parts.append("PRE { " + ", ".join(map(str, contract.pre)) + " }")
    if contract.post:
        parts.append("POST { " + ", ".join(map(str, contract.post)) + " }")
    if contract.tags:
        parts.append("TAGS { " + ", ".join(map(str, contract.tags)) + " }")
    return " ".join(parts)


@dataclass(frozen=True)
class ValidationIssue:
    kind: str
    message: str
    function: str | None = None
    severity: str = "error"

    def __str__(self) -> str:
        where = f"{self.function}: " if self.function else ""
        return f"{self.severity}: {self.kind}: {where}{self.message}"


@dataclass
class Attachment:
    """One contract attached to one function, plus where it came from."""

    function: str
    contract: Contract
    origin: str = "pack"
    source: str = field(default="", compare=False)
