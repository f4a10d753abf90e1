"""Textual mini-IR standing in for compiler IR."""

from .cfg import CFG, build_cfg
from .nodes import (
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
    Var,
)
from .parser import parse_program, tokenize
from .printer import format_function, format_program

__all__ = [
    "AddrOf", "Alloc", "Block", "Branch", "CFG", "CallInstr", "CondBranch", "ExtractBase", "FuncRef",
    "Function", "Load", "MakeDescriptor", "Param", "Program", "Return", "Store", "Str", "Var",
    "build_cfg", "format_function", "format_program", "parse_program", "tokenize",
]
