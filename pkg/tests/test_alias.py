import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, F_DECLS, c_program, load_case
from cover.alias import DESCRIPTOR, HANDLE, HEAP, PAYLOAD, compute_alias, may_alias, value_id
from cover.dynamic import interpret
from cover.ir import MakeDescriptor, ExtractBase, parse_program


def shared_address_pairs(program):
    """Pairs of value-ids that held the same concrete address during a run."""
    observed: dict = {}
    status, trace = interpret(program, observed=observed)
    assert trace.trap is None, trace.trap
    holders: dict[int, set[str]] = {}
    for vid, addrs in observed.items():
        for a in addrs:
            holders.setdefault(a, set()).add(vid)
    pairs = set()
    for vids in holders.values():
        pairs |= set(itertools.combinations(sorted(vids), 2))
    return pairs


def test_fresh_allocations_do_not_alias():
    m = compute_alias(c_program("a = alloc 8\nb = alloc 8\nret"))
    assert not m.may_alias("main:a", "main:b")
    assert m.may_alias("main:a", "main:a")
    assert HEAP in m.attrs(m.node("main:a"))


def test_unknown_values_alias_everything():
    m = compute_alias(c_program("a = alloc 8\nret"))
    assert may_alias(m, "main:a", "main:nothing")
    assert may_alias(m, "elsewhere:x", "main:a")


def test_window_handle_reaches_both_calls():
    p = parse_program(F_DECLS + """
func main() {
entry:
  buf = alloc 64
  d = makedesc buf rank=1 extents=[8]
  w = alloc 8
  g = call MPI_Get_f08(d, 1, INT, 0, 0, 1, INT, w)
  f = call MPI_Win_fence_f08(0, w)
  ret
}
""")
    m = compute_alias(p)
    # both calls receive the same register, hence the same node
    assert m.node("main:w") is not None
    assert not m.may_alias("main:w", "main:buf")
    # external results are fresh handles and stay apart from each other
    assert not m.may_alias("main:g", "main:f")
    assert HANDLE in m.attrs(m.node("main:g"))


def test_descriptor_transparency():
    p = c_program("buf = alloc 64\nd = makedesc buf rank=1 extents=[8]\nb = extractbase d\nx = load b\nret")
    m = compute_alias(p)
    assert m.may_alias("main:b", "main:buf")
    assert not m.may_alias("main:d", "main:buf")
    assert m.pointee("main:d") == m.node("main:buf")
    assert DESCRIPTOR in m.attrs(m.node("main:d"))
    assert PAYLOAD in m.attrs(m.node("main:buf"))
    # oracle: the concrete run puts b and buf at one address
    assert ("main:b", "main:buf") in shared_address_pairs(p)


TWO_LAYERS = """
func inner(q:addr) {
entry:
  ret q
}
func outer(p:addr) {
entry:
  r = call inner(p)
  ret r
}
"""


def test_value_through_two_call_layers_then_memory():
    p = c_program(
        "buf = alloc 8\ncell = alloc 8\nv = call outer(buf)\nstore cell, v\nw = load cell\nret",
        helpers=TWO_LAYERS,
    )
    m = compute_alias(p)
    assert m.may_alias("main:w", "main:buf")
    assert m.may_alias("inner:q", "main:buf")
    assert not m.may_alias("main:cell", "main:buf")
    for a, b in shared_address_pairs(p):
        assert m.may_alias(a, b)


def test_external_calls_do_not_unify_arguments():
    p = c_program("a = alloc 8\nb = alloc 8\nr = call MPI_Barrier(0)\ns = call MPI_Win_fence(a, b)\nret")
    assert not compute_alias(p).may_alias("main:a", "main:b")


def test_dump_is_sorted_and_stable():
    p = c_program("b = alloc 8\na = alloc 8\nstore a, b\nc = load a\nret")
    m = compute_alias(p)
    lines = m.dump().splitlines()
    assert "main:b main:c" in lines
    assert lines == sorted(lines)
    assert compute_alias(p).dump() == m.dump()


def test_backends_give_identical_partitions():
    for path in sorted(CORPUS.rglob("*.ir"))[:20]:
        p = parse_program(path.read_text())
        assert compute_alias(p, "python").classes() == compute_alias(p, None).classes()


def test_corpus_soundness_and_transparency(corpus_cases):
    for case in corpus_cases:
        program, _ = load_case(case)
        m = compute_alias(program)
        for a, b in shared_address_pairs(program):
            assert m.may_alias(a, b), (case.id, a, b)
        assert compute_alias(program).classes() == m.classes()
        for f in program.functions:
            made = {i.dest: i.base for _, _, i in f.instructions() if isinstance(i, MakeDescriptor)}
            for _, _, ins in f.instructions():
                if isinstance(ins, ExtractBase) and ins.descriptor.name in made:
                    base = made[ins.descriptor.name]
                    assert m.may_alias(value_id(f.name, ins.dest), value_id(f.name, base.name))


# -- generated programs ---------------------------------------------------------

HELPERS = """func ident(p:addr) {
entry:
  ret p
}
func put(p:addr, q:addr) {
entry:
  store p, q
  ret
}
func get(p:addr) {
entry:
  x = load p
  ret x
}
"""

OPS = ["alloc", "load", "store", "addrof", "desc", "base", "ident", "put", "get"]


@st.composite
def pointer_programs(draw):
    addrs, descs, lines = ["a0"], [], ["a0 = alloc 8", "store a0, a0"]
    for n, op in enumerate(draw(st.lists(st.sampled_from(OPS), min_size=1, max_size=30)), 1):
        v = f"v{n}"
        pick = lambda: draw(st.sampled_from(addrs))  # noqa: E731
        if op == "alloc":
            lines += [f"{v} = alloc 8", f"store {v}, {pick()}"]
        elif op == "load":
            lines.append(f"{v} = load {pick()}")
        elif op == "store":
            lines.append(f"store {pick()}, {pick()}")
            continue
        elif op == "addrof":
            lines.append(f"{v} = addrof {pick()}")
        elif op == "desc":
            lines.append(f"{v} = makedesc {pick()} rank=1 extents=[1]")
            descs.append(v)
            continue
        elif op == "base":
            if not descs:
                continue
            lines.append(f"{v} = extractbase {draw(st.sampled_from(descs))}")
        elif op == "ident":
            lines.append(f"{v} = call ident({pick()})")
        elif op == "put":
            lines.append(f"call put({pick()}, {pick()})")
            continue
        elif op == "get":
            lines.append(f"{v} = call get({pick()})")
        addrs.append(v)
    body = "\n".join(f"  {ln}" for ln in lines)
    return f"{HELPERS}\nfunc main() {{\nentry:\n{body}\n  ret\n}}\n"


@settings(max_examples=200, deadline=None)
@given(pointer_programs())
def test_generated_programs_are_sound(text):
    program = parse_program(text)
    m = compute_alias(program)
    for a, b in shared_address_pairs(program):
        assert m.may_alias(a, b), (a, b)


@settings(max_examples=100, deadline=None)
@given(pointer_programs())
def test_may_alias_is_an_equivalence(text):
    m = compute_alias(parse_program(text))
    vids = sorted(m.ids)
    for a in vids:
        assert m.may_alias(a, a)
    for a, b, c in itertools.islice(itertools.permutations(vids, 3), 400):
        assert m.may_alias(a, b) == m.may_alias(b, a)
        if m.may_alias(a, b) and m.may_alias(b, c):
            assert m.may_alias(a, c)
