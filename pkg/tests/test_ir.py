import pytest

from conftest import CORPUS
from cover.errors import (
    DuplicateDefinition,
    DuplicateFunction,
    IRSyntaxError,
    MissingTerminator,
    ModeError,
    NoEntry,
    UndefinedValue,
)
from cover.ir import (
    Alloc,
    CallInstr,
    CondBranch,
    ExtractBase,
    FuncRef,
    MakeDescriptor,
    Str,
    Var,
    build_cfg,
    format_program,
    parse_program,
)
from cover.ir.nodes import successors
from cover.modes import LanguageMode


def test_minimal_fortran_program():
    p = parse_program("func main(){ entry: r = call MPI_Init_f08(); ret }", "fortran")
    assert p.mode is LanguageMode.FORTRAN
    ins = [i for _, _, i in p.function("main").instructions()]
    assert ins[0] == CallInstr("r", "MPI_Init_f08", ())
    assert len(ins) == 2


def test_semicolon_comment_versus_separator():
    p = parse_program(
        """; leading comment
func main() {
entry:
  a = alloc 8 ; trailing comment
  store a, 1; x = load a
  ret
}
"""
    )
    assert len(list(p.function("main").instructions())) == 4


def test_instruction_forms():
    p = parse_program(
        """mode fortran
const N = 3
func ext(a:desc:in, s:str:in)
func main() {
entry:
  buf = alloc 64
  d = makedesc buf rank=2 extents=[4,4]
  b = extractbase d
  c = call ext(d, "hi \\"x\\"")
  e = call Declare_Contract(@ext, "PRE { }")
  cbr N, yes, no
yes:
  br no
no:
  ret
}
"""
    )
    ins = [i for _, _, i in p.function("main").instructions()]
    assert ins[0] == Alloc("buf", 64)
    assert ins[1] == MakeDescriptor("d", Var("buf"), 2, (4, 4))
    assert ins[2] == ExtractBase("b", Var("d"))
    assert ins[3].args == (Var("d"), Str('hi "x"'))
    assert ins[4].args[0] == FuncRef("ext")
    assert isinstance(ins[5], CondBranch)
    assert p.consts == {"N": 3}
    assert p.function("ext").is_external
    assert [x.type for x in p.function("ext").params] == ["desc", "str"]


@pytest.mark.parametrize(
    "text, exc",
    [
        ("func main() { entry: x = load y\n ret }", UndefinedValue),
        ("func main() { entry: cbr 1, a, b\na: x = alloc 8\n br c\nb: br c\nc: y = load x\n ret }", UndefinedValue),
        ("func main() { entry: ret }\nfunc main() { entry: ret }", DuplicateFunction),
        ("func helper() { entry: ret }", NoEntry),
        ("", NoEntry),
        ("func main() { entry: x = alloc 8 }", MissingTerminator),
        ("func main() { entry: br nowhere }", IRSyntaxError),
        ("func main() { entry: x = alloc 8\n x = alloc 8\n ret }", DuplicateDefinition),
        ("func main() { entry: ret\n x = alloc 8 }", IRSyntaxError),
        ("func main() { entry: x = frob 8\n ret }", IRSyntaxError),
        ("func f(a:int:in)\nfunc main() { entry: ret }", ModeError),
        ("mode c\nfunc main() { entry: ret }", None),
        ("func main() { entry: d = makedesc 0 rank=2 extents=[1]\n ret }", IRSyntaxError),
        ("func main() { entry: ret } $", IRSyntaxError),
    ],
)
def test_parse_errors(text, exc):
    if exc is None:
        parse_program(text)
        return
    with pytest.raises(exc):
        parse_program(text)


def test_requested_mode_must_match_directive():
    with pytest.raises(ModeError):
        parse_program("mode c\nfunc main() { entry: ret }", "fortran")


def test_error_locations():
    with pytest.raises(UndefinedValue) as info:
        parse_program("func main() {\nentry:\n  x = load y\n  ret\n}")
    assert info.value.line == 3


@pytest.mark.parametrize("path", sorted(CORPUS.rglob("*.ir")), ids=lambda p: f"{p.parent.name}/{p.stem}")
def test_corpus_round_trips(path):
    p = parse_program(path.read_text())
    text = format_program(p)
    q = parse_program(text)
    assert format_program(q) == text
    assert [f.name for f in q.functions] == [f.name for f in p.functions]
    for f, g in zip(p.functions, q.functions):
        assert [i for _, _, i in f.instructions()] == [i for _, _, i in g.instructions()]
        assert f.params == g.params


def test_cfg_shape():
    p = parse_program(
        """func main() {
entry:
  br head
head:
  cbr 1, body, exit
body:
  br head
exit:
  ret
dead:
  ret
}"""
    )
    cfg = build_cfg(p.function("main"))
    assert cfg.rpo[0] == "entry"
    assert cfg.back_edges() == [("body", "head")]
    assert cfg.dead == {"dead"}
    dom = cfg.dominators()
    assert dom["exit"] == {"entry", "head", "exit"}


def test_straight_line_and_diamond_cfgs():
    p = parse_program(
        """func main() {
entry:
  x = alloc 8
  ret
}
func d(c:int) {
entry:
  cbr c, a, b
a:
  br join
b:
  br join
join:
  ret
}"""
    )
    line = build_cfg(p.function("main"))
    assert line.rpo == ["entry"] and line.edges() == []
    diamond = build_cfg(p.function("d"))
    assert len(diamond.rpo) == 4
    assert sorted(diamond.pred["join"]) == ["a", "b"]


@pytest.mark.parametrize("path", sorted(CORPUS.rglob("*.ir"))[:30], ids=lambda p: f"{p.parent.name}/{p.stem}")
def test_edge_count_matches_terminator_targets(path):
    p = parse_program(path.read_text())
    for f in p.functions:
        if f.is_external:
            continue
        cfg = build_cfg(f)
        targets = sum(len(successors(b.terminator)) for b in f.blocks)
        assert len(cfg.edges()) == targets
