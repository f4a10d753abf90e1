"""Generate the paired C/Fortran mini-IR corpus and its manifest.

Each case is written once against a small builder; the builder lowers it
twice. C mode passes buffers as plain addresses and calls ``MPI_X``.
Fortran mode wraps every buffer in a descriptor, calls the ``MPI_X_f08``
implementation symbols, declares intents, and appends hidden string
lengths. Run from the repository root::

    python tools/gen_corpus.py [OUT_DIR]
"""

from __future__ import annotations

import sys
from pathlib import Path

# declared C signatures; Fortran mode omits the optional ierror argument
# except where it is listed explicitly
SIGNATURES = {
    "MPI_Init": [],
    "MPI_Finalize": [],
    "MPI_Comm_rank": [("comm", "int", "in"), ("rank", "addr", "out")],
    "MPI_Comm_size": [("comm", "int", "in"), ("size", "addr", "out")],
    "MPI_Barrier": [("comm", "int", "in")],
    "MPI_Send": [("buf", "buf", "in"), ("count", "int", "in"), ("dt", "int", "in"), ("dest", "int", "in"),
                 ("tag", "int", "in"), ("comm", "int", "in")],
    "MPI_Recv": [("buf", "buf", "out"), ("count", "int", "in"), ("dt", "int", "in"), ("src", "int", "in"),
                 ("tag", "int", "in"), ("comm", "int", "in"), ("status", "int", "out")],
    "MPI_Isend": [("buf", "buf", "in"), ("count", "int", "in"), ("dt", "int", "in"), ("dest", "int", "in"),
                  ("tag", "int", "in"), ("comm", "int", "in"), ("req", "addr", "out")],
    "MPI_Irecv": [("buf", "buf", "out"), ("count", "int", "in"), ("dt", "int", "in"), ("src", "int", "in"),
                  ("tag", "int", "in"), ("comm", "int", "in"), ("req", "addr", "out")],
    "MPI_Wait": [("req", "addr", "inout"), ("status", "int", "out")],
    "MPI_Win_create": [("base", "buf", "in"), ("size", "int", "in"), ("disp", "int", "in"), ("info", "int", "in"),
                       ("comm", "int", "in"), ("win", "addr", "out")],
    "MPI_Win_free": [("win", "addr", "inout")],
    "MPI_Win_fence": [("assert", "int", "in"), ("win", "addr", "in")],
    "MPI_Win_lock_all": [("assert", "int", "in"), ("win", "addr", "in")],
    "MPI_Win_unlock_all": [("win", "addr", "in")],
    "MPI_Get": [("buf", "buf", "out"), ("ocount", "int", "in"), ("odt", "int", "in"), ("rank", "int", "in"),
                ("disp", "int", "in"), ("tcount", "int", "in"), ("tdt", "int", "in"), ("win", "addr", "in")],
    "MPI_Put": [("buf", "buf", "in"), ("ocount", "int", "in"), ("odt", "int", "in"), ("rank", "int", "in"),
                ("disp", "int", "in"), ("tcount", "int", "in"), ("tdt", "int", "in"), ("win", "addr", "in")],
    "MPI_Info_create": [("info", "addr", "out")],
    # the trailing status argument keeps the declared arity equal across modes
    "MPI_Info_set": [("info", "addr", "in"), ("key", "str", "in"), ("value", "str", "in"), ("ierror", "addr", "out")],
    "MPI_Info_free": [("info", "addr", "inout")],
}

CONSTS = {"INT": 1, "COMM": 0, "STATUS_IGNORE": 0, "INFO_NULL": 0}


class Buf:
    def __init__(self, mem: str, arg: str):
        self.mem = mem  # what loads/stores address
        self.arg = arg  # what is passed to calls


class Prog:
    def __init__(self, mode: str):
        self.mode = mode
        self.fortran = mode == "fortran"
        self.used: list[str] = []
        self.consts = dict(CONSTS)
        self.helpers: list[list[str]] = []
        self.main: list[str] = ["entry:"]
        self.cur = self.main
        self.n = 0

    # -- naming ----------------------------------------------------------

    def fresh(self, prefix: str = "r") -> str:
        self.n += 1
        return f"{prefix}{self.n}"

    def api_name(self, name: str) -> str:
        return f"{name}_f08" if self.fortran else name

    # -- emission --------------------------------------------------------

    def emit(self, text: str):
        self.cur.append(f"  {text}")

    def label(self, name: str):
        self.cur.append(f"{name}:")

    def const(self, name: str, value: int):
        self.consts[name] = value

    def call(self, name: str, *args) -> str:
        if name not in self.used:
            self.used.append(name)
        sig = SIGNATURES[name]
        assert len(args) == len(sig), (name, args)
        rendered = []
        lengths = []
        for a, (_, ptype, _) in zip(args, sig):
            if isinstance(a, Buf):
                rendered.append(a.arg)
            elif ptype == "str":
                rendered.append(f'"{a}"')
                lengths.append(str(len(a)))
            else:
                rendered.append(str(a))
        if self.fortran:
            rendered += lengths
        dest = self.fresh()
        self.emit(f"{dest} = call {self.api_name(name)}({', '.join(rendered)})")
        return dest

    def buffer(self, name: str, size: int = 64) -> Buf:
        self.emit(f"{name} = alloc {size}")
        if not self.fortran:
            return Buf(name, name)
        self.emit(f"{name}_d = makedesc {name} rank=1 extents=[{size // 8}]")
        return Buf(name, f"{name}_d")

    def handle(self, name: str) -> str:
        self.emit(f"{name} = alloc 8")
        return name

    def load(self, addr) -> str:
        dest = self.fresh("x")
        self.emit(f"{dest} = load {addr.mem if isinstance(addr, Buf) else addr}")
        return dest

    def store(self, addr, value=1):
        self.emit(f"store {addr.mem if isinstance(addr, Buf) else addr}, {value}")

    def invoke(self, fn: str, *args):
        rendered = [a.arg if isinstance(a, Buf) else str(a) for a in args]
        self.emit(f"call {fn}({', '.join(rendered)})")

    # -- helper functions ------------------------------------------------

    def helper(self, name: str, params: list[tuple[str, str]]):
        """Start a helper; ``params`` are (name, "buf"|"addr"|"int")."""
        rendered = []
        for pname, ptype in params:
            if ptype == "buf":
                rendered.append(f"{pname}:desc" if self.fortran else f"{pname}:addr")
            else:
                rendered.append(f"{pname}:{ptype}")
        lines = [f"func {name}({', '.join(rendered)}) {{", "entry:"]
        self.helpers.append(lines)
        self.cur = lines

    def param_buf(self, pname: str) -> Buf:
        """Buffer view of a helper's buffer parameter."""
        if not self.fortran:
            return Buf(pname, pname)
        base = self.fresh("b")
        self.emit(f"{base} = extractbase {pname}")
        return Buf(base, pname)

    def end_helper(self):
        self.emit("ret")
        self.cur.append("}")
        self.cur = self.main

    # -- loops -------------------------------------------------------------

    def counter(self, n: int) -> str:
        """A linked chain of ``n`` cells; the loop walks it without arithmetic."""
        prev = "0"
        for _ in range(n):
            node = self.fresh("c")
            self.emit(f"{node} = alloc 8")
            self.emit(f"store {node}, {prev}")
            prev = node
        cursor = self.fresh("it")
        self.emit(f"{cursor} = alloc 8")
        self.emit(f"store {cursor}, {prev}")
        return cursor

    def loop_head(self, cursor: str, body: str, done: str):
        cur = self.fresh("p")
        self.emit(f"{cur} = load {cursor}")
        self.emit(f"cbr {cur}, {body}, {done}")
        return cur

    def loop_next(self, cursor: str, cur: str, head: str):
        nxt = self.fresh("p")
        self.emit(f"{nxt} = load {cur}")
        self.emit(f"store {cursor}, {nxt}")
        self.emit(f"br {head}")

    # -- output ------------------------------------------------------------

    def render(self, title: str) -> str:
        out = [f"; {title}", f"mode {self.mode}"]
        out += [f"const {k} = {v}" for k, v in self.consts.items()]
        out.append("")
        for name in self.used:
            params = []
            for pname, ptype, intent in SIGNATURES[name]:
                t = {"buf": "desc" if self.fortran else "addr"}.get(ptype, ptype)
                params.append(f"{pname}:{t}:{intent}" if self.fortran else f"{pname}:{t}")
            out.append(f"func {self.api_name(name)}({', '.join(params)})")
        out.append("")
        for h in self.helpers:
            out += h
            out.append("")
        out.append("func main() {")
        out += self.main
        out.append("}")
        return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# cases: (id, class, expected_error, tags, builder)

CASES = []


def case(cid, klass, error, tags=()):
    def deco(fn):
        CASES.append((cid, klass, error, tuple(tags), fn))
        return fn

    return deco


def init(p):
    p.call("MPI_Init")


def finalize(p):
    p.call("MPI_Finalize")


# ---- Init: erroneous

@case("init_missing", "Init", True)
def _(p):
    rank = p.handle("rank")
    p.call("MPI_Comm_rank", "COMM", rank)
    finalize(p)
    p.emit("ret")


@case("finalize_missing", "Init", True)
def _(p):
    init(p)
    p.call("MPI_Barrier", "COMM")
    p.emit("ret")


@case("init_after_use", "Init", True)
def _(p):
    p.call("MPI_Barrier", "COMM")
    init(p)
    finalize(p)
    p.emit("ret")


@case("init_one_branch", "Init", True)
def _(p):
    p.const("FLAG", 0)
    p.emit("cbr FLAG, doinit, join")
    p.label("doinit")
    init(p)
    p.emit("br join")
    p.label("join")
    p.call("MPI_Barrier", "COMM")
    finalize(p)
    p.emit("ret")


@case("finalize_one_branch", "Init", True)
def _(p):
    p.const("FLAG", 0)
    init(p)
    p.emit("cbr FLAG, fin, done")
    p.label("fin")
    finalize(p)
    p.emit("br done")
    p.label("done")
    p.emit("ret")


@case("finalize_untaken_branch", "Init", True, ["static-only"])
def _(p):
    # the skip path is only taken for FLAG = 0; the shipped valuation finalizes
    p.const("FLAG", 1)
    init(p)
    p.emit("cbr FLAG, fin, done")
    p.label("fin")
    finalize(p)
    p.emit("br done")
    p.label("done")
    p.emit("ret")


@case("finalize_before_init", "Init", True)
def _(p):
    finalize(p)
    init(p)
    p.emit("ret")


# ---- Init: correct

@case("init_finalize_basic", "Init", False)
def _(p):
    init(p)
    rank = p.handle("rank")
    p.call("MPI_Comm_rank", "COMM", rank)
    finalize(p)
    p.emit("ret")


@case("init_both_branches", "Init", False)
def _(p):
    p.const("FLAG", 1)
    p.emit("cbr FLAG, left, right")
    p.label("left")
    init(p)
    p.emit("br join")
    p.label("right")
    init(p)
    p.emit("br join")
    p.label("join")
    p.call("MPI_Barrier", "COMM")
    finalize(p)
    p.emit("ret")


@case("finalize_both_branches", "Init", False)
def _(p):
    p.const("FLAG", 0)
    init(p)
    p.emit("cbr FLAG, left, right")
    p.label("left")
    p.call("MPI_Barrier", "COMM")
    finalize(p)
    p.emit("ret")
    p.label("right")
    finalize(p)
    p.emit("ret")


@case("init_in_helper", "Init", False)
def _(p):
    p.helper("setup", [])
    init(p)
    p.end_helper()
    p.helper("teardown", [])
    finalize(p)
    p.end_helper()
    p.invoke("setup")
    p.call("MPI_Barrier", "COMM")
    p.invoke("teardown")
    p.emit("ret")


@case("init_loop_barrier", "Init", False)
def _(p):
    init(p)
    cursor = p.counter(3)
    p.emit("br head")
    p.label("head")
    cur = p.loop_head(cursor, "body", "exit")
    p.label("body")
    p.call("MPI_Barrier", "COMM")
    p.loop_next(cursor, cur, "head")
    p.label("exit")
    finalize(p)
    p.emit("ret")


@case("init_comm_size_rank", "Init", False)
def _(p):
    init(p)
    size = p.handle("size")
    rank = p.handle("rank")
    p.call("MPI_Comm_size", "COMM", size)
    p.call("MPI_Comm_rank", "COMM", rank)
    p.load(size)
    p.load(rank)
    finalize(p)
    p.emit("ret")


# ---- Race: erroneous

def nonblocking(p, which, buf, req):
    p.call(which, buf, 1, "INT", 1, 0, "COMM", req)


def wait(p, req):
    p.call("MPI_Wait", req, "STATUS_IGNORE")


@case("isend_write_before_wait", "Race", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    p.store(buf)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("irecv_read_before_wait", "Race", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Irecv", buf, req)
    p.load(buf)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("irecv_write_before_wait", "Race", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Irecv", buf, req)
    p.store(buf, 7)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("isend_write_in_helper", "Race", True)
def _(p):
    p.helper("fill", [("data", "buf")])
    view = p.param_buf("data")
    p.store(view, 3)
    p.end_helper()
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    p.invoke("fill", buf)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("irecv_wrong_request_read", "Race", True)
def _(p):
    init(p)
    a = p.buffer("a")
    b = p.buffer("b")
    ra = p.handle("ra")
    rb = p.handle("rb")
    nonblocking(p, "MPI_Irecv", a, ra)
    nonblocking(p, "MPI_Isend", b, rb)
    wait(p, rb)
    p.load(a)
    wait(p, ra)
    finalize(p)
    p.emit("ret")


@case("race_untaken_branch", "Race", True, ["static-only"])
def _(p):
    # the write happens only for FLAG != 0; the shipped valuation skips it
    p.const("FLAG", 0)
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    p.emit("cbr FLAG, touch, skip")
    p.label("touch")
    p.store(buf, 5)
    p.emit("br skip")
    p.label("skip")
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("irecv_read_via_alias_cell", "Race", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    cell = p.handle("cell")
    p.store(cell, buf.mem)
    nonblocking(p, "MPI_Irecv", buf, req)
    alias = p.load(cell)
    p.load(alias)
    wait(p, req)
    finalize(p)
    p.emit("ret")


# ---- Race: correct

@case("isend_wait_then_write", "Race", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    wait(p, req)
    p.store(buf, 2)
    finalize(p)
    p.emit("ret")


@case("irecv_wait_then_read", "Race", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Irecv", buf, req)
    wait(p, req)
    p.load(buf)
    finalize(p)
    p.emit("ret")


@case("isend_other_buffer_write", "Race", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    other = p.buffer("other")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    p.store(other, 4)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("irecv_two_requests", "Race", False)
def _(p):
    init(p)
    a = p.buffer("a")
    b = p.buffer("b")
    ra = p.handle("ra")
    rb = p.handle("rb")
    nonblocking(p, "MPI_Irecv", a, ra)
    nonblocking(p, "MPI_Irecv", b, rb)
    wait(p, ra)
    p.load(a)
    wait(p, rb)
    p.load(b)
    finalize(p)
    p.emit("ret")


@case("isend_read_allowed", "Race", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    p.store(buf, 9)
    nonblocking(p, "MPI_Isend", buf, req)
    p.load(buf)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("recv_blocking_then_access", "Race", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    p.call("MPI_Recv", buf, 1, "INT", 0, 0, "COMM", "STATUS_IGNORE")
    p.load(buf)
    p.store(buf, 1)
    finalize(p)
    p.emit("ret")


# ---- HandleLifecycle: erroneous

@case("double_wait", "HandleLifecycle", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    wait(p, req)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("missing_wait", "HandleLifecycle", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    finalize(p)
    p.emit("ret")


@case("wait_wrong_request", "HandleLifecycle", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    other = p.handle("other")
    nonblocking(p, "MPI_Isend", buf, req)
    wait(p, other)
    finalize(p)
    p.emit("ret")


@case("double_wait_loop", "HandleLifecycle", True)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    cursor = p.counter(2)
    p.emit("br head")
    p.label("head")
    cur = p.loop_head(cursor, "body", "exit")
    p.label("body")
    wait(p, req)
    p.loop_next(cursor, cur, "head")
    p.label("exit")
    finalize(p)
    p.emit("ret")


# ---- HandleLifecycle: correct

@case("wait_once", "HandleLifecycle", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("request_reuse", "HandleLifecycle", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    nonblocking(p, "MPI_Isend", buf, req)
    wait(p, req)
    nonblocking(p, "MPI_Irecv", buf, req)
    wait(p, req)
    finalize(p)
    p.emit("ret")


@case("loop_isend_wait", "HandleLifecycle", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    req = p.handle("req")
    cursor = p.counter(2)
    p.emit("br head")
    p.label("head")
    cur = p.loop_head(cursor, "body", "exit")
    p.label("body")
    nonblocking(p, "MPI_Isend", buf, req)
    wait(p, req)
    p.loop_next(cursor, cur, "head")
    p.label("exit")
    finalize(p)
    p.emit("ret")


@case("two_requests_waits", "HandleLifecycle", False)
def _(p):
    init(p)
    a = p.buffer("a")
    b = p.buffer("b")
    ra = p.handle("ra")
    rb = p.handle("rb")
    nonblocking(p, "MPI_Isend", a, ra)
    nonblocking(p, "MPI_Irecv", b, rb)
    wait(p, rb)
    wait(p, ra)
    finalize(p)
    p.emit("ret")


# ---- RMA

def window(p, name, mem):
    win = p.handle(name)
    p.call("MPI_Win_create", mem, 64, 1, "INFO_NULL", "COMM", win)
    return win


def rma(p, which, buf, win):
    p.call(which, buf, 1, "INT", 1, 0, 1, "INT", win)


def fence(p, win):
    p.call("MPI_Win_fence", 0, win)


def rma_prologue(p):
    init(p)
    mem = p.buffer("mem")
    buf = p.buffer("buf")
    win = window(p, "win", mem)
    fence(p, win)
    return buf, win


def rma_epilogue(p, *wins):
    for w in wins:
        p.call("MPI_Win_free", w)
    finalize(p)
    p.emit("ret")


@case("get_read_before_fence", "RMA", True)
def _(p):
    buf, win = rma_prologue(p)
    rma(p, "MPI_Get", buf, win)
    p.load(buf)
    fence(p, win)
    rma_epilogue(p, win)


@case("get_write_before_fence", "RMA", True)
def _(p):
    buf, win = rma_prologue(p)
    rma(p, "MPI_Get", buf, win)
    p.store(buf, 6)
    fence(p, win)
    rma_epilogue(p, win)


@case("put_write_before_fence", "RMA", True)
def _(p):
    buf, win = rma_prologue(p)
    rma(p, "MPI_Put", buf, win)
    p.store(buf, 8)
    fence(p, win)
    rma_epilogue(p, win)


@case("get_wrong_window", "RMA", True)
def _(p):
    buf, win = rma_prologue(p)
    mem2 = p.buffer("mem2")
    win2 = window(p, "win2", mem2)
    fence(p, win2)
    rma(p, "MPI_Get", buf, win)
    fence(p, win2)
    p.load(buf)
    fence(p, win)
    rma_epilogue(p, win, win2)


@case("get_read_before_unlock_all", "RMA", True)
def _(p):
    init(p)
    mem = p.buffer("mem")
    buf = p.buffer("buf")
    win = window(p, "win", mem)
    p.call("MPI_Win_lock_all", 0, win)
    rma(p, "MPI_Get", buf, win)
    p.load(buf)
    p.call("MPI_Win_unlock_all", win)
    rma_epilogue(p, win)


@case("get_read_in_helper_before_fence", "RMA", True)
def _(p):
    p.helper("peek", [("data", "buf")])
    view = p.param_buf("data")
    p.load(view)
    p.end_helper()
    buf, win = rma_prologue(p)
    rma(p, "MPI_Get", buf, win)
    p.invoke("peek", buf)
    fence(p, win)
    rma_epilogue(p, win)


@case("get_fence_read", "RMA", False)
def _(p):
    buf, win = rma_prologue(p)
    rma(p, "MPI_Get", buf, win)
    fence(p, win)
    p.load(buf)
    rma_epilogue(p, win)


@case("put_fence_write", "RMA", False)
def _(p):
    buf, win = rma_prologue(p)
    p.store(buf, 1)
    rma(p, "MPI_Put", buf, win)
    fence(p, win)
    p.store(buf, 2)
    rma_epilogue(p, win)


@case("get_unlock_all_read", "RMA", False)
def _(p):
    init(p)
    mem = p.buffer("mem")
    buf = p.buffer("buf")
    win = window(p, "win", mem)
    p.call("MPI_Win_lock_all", 0, win)
    rma(p, "MPI_Get", buf, win)
    p.call("MPI_Win_unlock_all", win)
    p.load(buf)
    rma_epilogue(p, win)


@case("get_two_windows", "RMA", False)
def _(p):
    buf, win = rma_prologue(p)
    other = p.buffer("other")
    mem2 = p.buffer("mem2")
    win2 = window(p, "win2", mem2)
    fence(p, win2)
    rma(p, "MPI_Get", buf, win)
    rma(p, "MPI_Get", other, win2)
    fence(p, win)
    p.load(buf)
    fence(p, win2)
    p.load(other)
    rma_epilogue(p, win, win2)


@case("put_read_allowed", "RMA", False)
def _(p):
    buf, win = rma_prologue(p)
    p.store(buf, 1)
    rma(p, "MPI_Put", buf, win)
    p.load(buf)
    fence(p, win)
    rma_epilogue(p, win)


@case("get_fence_in_helper", "RMA", False)
def _(p):
    p.helper("sync", [("w", "addr")])
    fence(p, "w")
    p.end_helper()
    buf, win = rma_prologue(p)
    rma(p, "MPI_Get", buf, win)
    p.invoke("sync", win)
    p.load(buf)
    rma_epilogue(p, win)


# ---- Other: correct

@case("info_set_strings", "Other", False)
def _(p):
    init(p)
    info = p.handle("info")
    err = p.handle("err")
    p.call("MPI_Info_create", info)
    p.call("MPI_Info_set", info, "cb_nodes", "4", err)
    p.call("MPI_Info_free", info)
    finalize(p)
    p.emit("ret")


@case("send_recv_blocking", "Other", False)
def _(p):
    init(p)
    buf = p.buffer("buf")
    p.store(buf, 1)
    p.call("MPI_Send", buf, 1, "INT", 1, 0, "COMM")
    p.call("MPI_Recv", buf, 1, "INT", 1, 0, "COMM", "STATUS_IGNORE")
    p.load(buf)
    finalize(p)
    p.emit("ret")


def main(argv: list[str]) -> int:
    out = Path(argv[1]) if len(argv) > 1 else Path(__file__).resolve().parents[1] / "src" / "cover" / "corpus"
    manifest = [
        "# Paired C/Fortran corpus; generated by tools/gen_corpus.py",
        "",
        "[packs]",
        'c = "mpi_c"',
        'fortran = "mpi_f08"',
    ]
    for mode in ("c", "fortran"):
        (out / mode).mkdir(parents=True, exist_ok=True)
        for old in (out / mode).glob("*.ir"):
            old.unlink()
    for cid, klass, error, tags, build in CASES:
        for mode in ("c", "fortran"):
            p = Prog(mode)
            build(p)
            title = f"{cid} ({mode}): {'erroneous' if error else 'correct'}, class {klass}"
            (out / mode / f"{cid}.ir").write_text(p.render(title), encoding="utf-8")
            other = "fortran" if mode == "c" else "c"
            manifest += [
                "",
                "[[case]]",
                f'id = "{mode}/{cid}"',
                f'file = "{mode}/{cid}.ir"',
                f'mode = "{mode}"',
                f'expected = "{"error" if error else "noerror"}"',
                f'class = "{klass}"',
                f'pair = "{other}/{cid}"',
                f"tags = [{', '.join(repr(t).replace(chr(39), chr(34)) for t in tags)}]",
            ]
    (out / "corpus.toml").write_text("\n".join(manifest) + "\n", encoding="utf-8")
    print(f"wrote {2 * len(CASES)} programs to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
