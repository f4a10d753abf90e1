import pytest

from conftest import F_DECLS, c_program, load_case
from cover.alias import compute_alias
from cover.contracts import Access, Slot
from cover.errors import ArityMismatch, ModeError
from cover.frontends import (
    GenericMap,
    NormalizedCall,
    NormArg,
    default_generic_map,
    normalize_call_args,
    resolve_callee,
    resolve_slot,
)
from cover.ir import parse_program
from cover.ir.nodes import CallInstr, Var
from cover.modes import LanguageMode

C, F = LanguageMode.C, LanguageMode.FORTRAN


def calls(program, fn="main"):
    f = program.function(fn)
    return f, [i for _, _, i in f.instructions() if isinstance(i, CallInstr)]


def test_resolve_callee():
    assert resolve_callee("MPI_Get", F) == "MPI_Get_f08"
    assert resolve_callee("MPI_Get_f08", F) == "MPI_Get_f08"
    assert resolve_callee("MPI_Get", C) == "MPI_Get"
    assert resolve_callee("helper", F) == "helper"
    assert resolve_callee("X", F, {"X": "Y"}) == "Y"


def test_generic_map_is_injective():
    gmap = default_generic_map()
    assert len(set(gmap.values())) == len(gmap)
    assert gmap.is_implementation("MPI_Wait_f08")
    assert not gmap.is_implementation("MPI_Wait")
    with pytest.raises(ValueError):
        GenericMap({"A": "X", "B": "X"})
    with pytest.raises(ValueError, match="line 2"):
        GenericMap.parse("A=B\nnonsense\n")
    assert dict(GenericMap.parse("# c\nA = B # x\n\n")) == {"A": "B"}


def test_fortran_info_set_trims_hidden_lengths():
    p = parse_program(F_DECLS + """
func main() {
entry:
  info = alloc 8
  err = alloc 8
  r = call MPI_Info_set_f08(info, "k", "v", err, 1, 1)
  ret
}
""")
    f, (call,) = calls(p)
    n = normalize_call_args(call, F, p, f)
    assert (n.callee, n.arity, n.ir_arity, n.trimmed) == ("MPI_Info_set_f08", 4, 6, 2)
    assert [a.value for a in n.args][0] == Var("info")


def test_c_info_set_is_unchanged():
    p = c_program(
        'info = alloc 8\nerr = alloc 8\nr = call MPI_Info_set(info, "k", "v", err)\nret',
        decls="mode c\nfunc MPI_Info_set(info:addr, key:str, value:str, ierror:addr)\n",
    )
    f, (call,) = calls(p)
    n = normalize_call_args(call, C, p, f)
    assert (n.arity, n.trimmed) == (4, 0)


def test_arity_mismatch_after_trimming():
    p = parse_program(F_DECLS + """
func main() {
entry:
  info = alloc 8
  err = alloc 8
  r = call MPI_Info_set_f08(info, "k", "v", err)
  ret
}
""")
    f, (call,) = calls(p)
    with pytest.raises(ArityMismatch):
        normalize_call_args(call, F, p, f)


def test_descriptor_arguments_are_marked():
    p = parse_program(F_DECLS + """
func main() {
entry:
  buf = alloc 64
  d = makedesc buf rank=1 extents=[8]
  w = alloc 8
  g = call MPI_Get_f08(d, 1, INT, 0, 0, 1, INT, w)
  ret
}
""")
    f, (call,) = calls(p)
    n = normalize_call_args(call, F, p, f)
    assert n.args[0].via_descriptor and not n.args[7].via_descriptor
    alias = compute_alias(p)
    # the slot names the payload, not the descriptor
    assert resolve_slot(Slot(0), n, F, alias, "main") == alias.node_in("main", "buf")
    assert resolve_slot(Slot(7), n, F, alias, "main") == alias.node_in("main", "w")
    assert resolve_slot(Slot(1), n, F, alias, "main") is None


def test_resolve_slot_errors():
    n = NormalizedCall("F", (NormArg(Var("a")),), 1)
    alias = compute_alias(c_program("a = alloc 8\nret"))
    with pytest.raises(ModeError):
        resolve_slot(Slot(0, Access.DEREF), n, F, alias, "main")
    with pytest.raises(IndexError):
        resolve_slot(Slot(1), n, C, alias, "main")
    assert resolve_slot(Slot(0, Access.DEREF), n, C, alias, "main") == alias.node_in("main", "a")
    assert resolve_slot(Slot(0, Access.ADDROF), n, C, alias, "main") == alias.node_in("main", "a")


def test_cross_mode_normalized_arity(corpus_cases):
    """After trimming, each API call has the same arity in both lowerings."""
    by_id = {c.id: c for c in corpus_cases}
    seen = 0
    for case in corpus_cases:
        if case.mode is not C:
            continue
        twin = by_id[case.pair]
        shapes = []
        for cs in (case, twin):
            program, table = load_case(cs)
            row = []
            for f in program.functions:
                if f.is_external:
                    continue
                for _, _, ins in f.instructions():
                    if isinstance(ins, CallInstr) and program.defined(ins.callee) is None:
                        n = normalize_call_args(ins, cs.mode, program, f)
                        row.append((n.callee.removesuffix("_f08"), n.arity))
            shapes.append(row)
        assert shapes[0] == shapes[1], case.id
        seen += 1
    assert seen == 48
