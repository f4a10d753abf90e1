"""Contract-based verification of parallel-API usage for C- and Fortran-mode programs."""

from .alias import AliasModel, compute_alias, may_alias
from .contracts import ContractTable, collect_attachments, load_pack, parse_contract, validate
from .dynamic import check_trace, interpret, read_trace, run_dynamic, write_trace
from .frontends import normalize_call_args, resolve_callee, resolve_slot
from .harness import compare_modes, run_corpus
from .ir import parse_program
from .modes import LanguageMode
from .report import Diagnostic, Report
from .static import run_static

__version__ = "0.1.0"

__all__ = [
    "AliasModel", "ContractTable", "Diagnostic", "LanguageMode", "Report", "check_trace", "collect_attachments",
    "compare_modes", "compute_alias", "interpret", "load_pack", "may_alias", "normalize_call_args",
    "parse_contract", "parse_program", "read_trace", "resolve_callee", "resolve_slot", "run_corpus",
    "run_dynamic", "run_static", "validate", "write_trace",
]
