"""Contract language: parsing, packs, attachment collection and validation."""

from .ast import (
    Access,
    Attachment,
    Call,
    CallTag,
    Contract,
    NoUntil,
    Read,
    Slot,
    TagDecl,
    ValidationIssue,
    Write,
    pretty,
)
from .packs import Pack, format_pack, load_pack, parse_pack
from .parser import parse_contract, strip_continuations
from .table import ContractTable, collect_attachments, validate

__all__ = [
    "Access", "Attachment", "Call", "CallTag", "Contract", "ContractTable", "NoUntil", "Pack", "Read",
    "Slot", "TagDecl", "ValidationIssue", "Write", "collect_attachments", "format_pack", "load_pack",
    "parse_contract", "parse_pack", "pretty", "strip_continuations", "validate",
]
