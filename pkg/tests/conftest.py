from __future__ import annotations

import sys
from pathlib import Path

import pytest

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from cover.contracts import collect_attachments
from cover.harness import load_manifest, shipped_corpus
from cover.ir import parse_program

CORPUS = shipped_corpus()

C_DECLS = """\
mode c
const INT = 1
func MPI_Init()
func MPI_Finalize()
func MPI_Get(buf:addr, oc:int, ot:int, tr:int, td:int, tc:int, tt:int, win:addr)
func MPI_Put(buf:addr, oc:int, ot:int, tr:int, td:int, tc:int, tt:int, win:addr)
func MPI_Win_fence(a:int, win:addr)
func MPI_Isend(buf:addr, n:int, dt:int, dst:int, tag:int, comm:int, req:addr)
func MPI_Irecv(buf:addr, n:int, dt:int, src:int, tag:int, comm:int, req:addr)
func MPI_Wait(req:addr, st:int)
func MPI_Barrier(comm:int)
"""

F_DECLS = """\
mode fortran
const INT = 1
func MPI_Init_f08()
func MPI_Finalize_f08()
func MPI_Get_f08(buf:desc:out, oc:int, ot:int, tr:int, td:int, tc:int, tt:int, win:addr:in)
func MPI_Win_fence_f08(a:int, win:addr)
func MPI_Info_set_f08(info:addr:in, key:str:in, value:str:in, ierror:addr:out)
"""


def c_program(body: str, helpers: str = "", decls: str = C_DECLS):
    """C-mode program whose ``main`` is ``body`` (one instruction per line)."""
    lines = "\n".join(f"  {ln.strip()}" for ln in body.strip().splitlines())
    return parse_program(f"{decls}\n{helpers}\nfunc main() {{\nentry:\n{lines}\n}}\n")


def checked(program, pack: str | None = None):
    pack = pack or ("mpi_f08" if program.mode.value == "fortran" else "mpi_c")
    return program, collect_attachments(program, [pack])


def corpus_manifest() -> dict:
    return tomllib.loads((CORPUS / "corpus.toml").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus_cases():
    return load_manifest(CORPUS)


def load_case(case):
    program = parse_program(case.file.read_text(encoding="utf-8"), case.mode)
    return checked(program, case.pack)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
