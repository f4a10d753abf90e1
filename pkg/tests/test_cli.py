import json

import pytest

from conftest import CORPUS
from cover.cli import main

RACY = CORPUS / "c" / "get_read_before_fence.ir"
CLEAN_F = CORPUS / "fortran" / "get_fence_read.ir"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check_both_engines(capsys):
    code, out, err = run(capsys, "check", RACY)
    assert code == 0
    static, dynamic = json.loads(out)
    assert static["engine"] == "static" and dynamic["engine"] == "dynamic"
    assert static["verdict"] == dynamic["verdict"] == "Error"
    assert "RaceViolation" in err


def test_check_single_engine_fortran(capsys):
    code, out, _ = run(capsys, "check", "--mode", "static", "--lang", "fortran", "--contracts", "mpi_f08", CLEAN_F)
    assert code == 0
    report = json.loads(out)
    assert (report["mode"], report["verdict"], report["diagnostics"]) == ("fortran", "NoError", [])


def test_dump_alias(capsys):
    code, out, _ = run(capsys, "check", "--dump-alias", RACY)
    assert code == 0
    lines = out.splitlines()
    assert lines == sorted(lines)
    assert all(line.split() == sorted(line.split()) for line in lines)


def test_trace_out_then_trace_check(capsys, tmp_path):
    trace = tmp_path / "t.jsonl"
    code, out, _ = run(capsys, "check", "--mode", "dynamic", "--trace-out", trace, RACY)
    direct = json.loads(out)
    assert code == 0 and trace.exists()
    code, out, _ = run(capsys, "trace-check", "--contracts", "mpi_c", trace)
    replayed = json.loads(out)
    assert code == 0
    assert replayed["verdict"] == direct["verdict"] == "Error"
    assert replayed["diagnostics"] == direct["diagnostics"]


def test_const_override(capsys):
    prog = CORPUS / "c" / "race_untaken_branch.ir"
    _, out, _ = run(capsys, "check", "--mode", "dynamic", prog)
    assert json.loads(out)["verdict"] == "NoError"
    _, out, _ = run(capsys, "check", "--mode", "dynamic", "--const", "FLAG=1", prog)
    assert json.loads(out)["verdict"] == "Error"


def test_bench_report(capsys, tmp_path):
    out_json = tmp_path / "bench.json"
    code, out, err = run(capsys, "bench", CORPUS, "--report", out_json, "--jobs", "1")
    assert code == 0
    summary = json.loads(out)
    assert summary["summary"]["static"]["fortran"]["FP"] == 0
    assert json.loads(out_json.read_text())["diff"]["flagged"] == {}
    assert "dacc=+0.00" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "/nonexistent.ir"],
        ["check", "--lang", "fortran", RACY],
        ["check", "--contracts", "mpi_f08", RACY],
        ["check", "--const", "FLAG", RACY],
        ["trace-check", "/nonexistent.jsonl"],
        ["bench", "/nonexistent-dir"],
    ],
)
def test_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("cover:")


def test_validation_errors_exit_2(capsys, tmp_path):
    pack = tmp_path / "bad.ctr"
    pack.write_text("mode c\ncontract MPI_Get { POST { no! (read!(*12)) until! (call!(MPI_Win_fence)) } }\n")
    code, _, err = run(capsys, "check", "--contracts", pack, RACY)
    assert code == 2
    assert "ParamOutOfRange" in err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["check", "--mode", "sideways", str(RACY)])
    assert info.value.code == 2
