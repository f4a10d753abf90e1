"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line.

The lines are printed as tests run (visible with ``-s``) and repeated in the
terminal summary by ``conftest.pytest_terminal_summary``.
"""

import contextlib
import itertools
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, checked, load_case
from cover.alias import compute_alias
from cover.contracts import parse_contract, pretty
from cover.dynamic import AllocEvent, check_trace, dumps, interpret, loads, run_dynamic
from cover.harness import compare_modes, run_corpus
from cover.ir import parse_program
from cover.modes import LanguageMode
from cover.static import run_static
from test_contracts import contracts
from test_dynamic import TRACES

RESULTS: list[str] = []


@contextlib.contextmanager
def criterion(number: int, title: str):
    detail: list[str] = []
    try:
        yield detail
    except BaseException:
        line = f"criterion {number} FAIL  {title}  {'; '.join(detail)}".rstrip()
        print(line)
        RESULTS.append(line)
        raise
    line = f"criterion {number} PASS  {title}  {'; '.join(detail)}".rstrip()
    print(line)
    RESULTS.append(line)


@pytest.fixture(scope="module")
def corpus_run():
    start = time.monotonic()
    report = run_corpus(engines=("static", "dynamic"), timeout=30)
    return report, time.monotonic() - start


def test_criterion_1_cross_mode_parity(corpus_run):
    with criterion(1, "cross-mode parity") as detail:
        report, seconds = corpus_run
        pairs = sum(1 for c in report.cases if c.mode.value == "c" and c.pair)
        diff = compare_modes(report)
        detail.append(f"{pairs} pairs, {seconds:.2f}s")
        detail.append(" ".join(f"{e}:{d}" for e, d in diff.deltas.items()))
        assert pairs >= 24
        for engine in ("static", "dynamic"):
            d = diff.deltas[engine]
            assert d["TP"] == d["TN"] == d["FN"] == d["FP"] == 0
            assert d["accuracy"] == 0.0
        assert seconds < 60


def test_criterion_2_zero_false_positives(corpus_run):
    with criterion(2, "zero false positives") as detail:
        report, _ = corpus_run
        fps = {(e, m): report.counts(e, m).FP for e in ("static", "dynamic") for m in ("c", "fortran")}
        detail.append(f"FP={sum(fps.values())}")
        assert all(v == 0 for v in fps.values())


def test_criterion_3_static_completeness(corpus_run):
    with criterion(3, "static completeness, documented dynamic gap") as detail:
        report, _ = corpus_run
        for mode in ("c", "fortran"):
            s = report.counts("static", mode)
            d = report.counts("dynamic", mode)
            detail.append(f"{mode}: static TP={s.TP} FN={s.FN} acc={s.accuracy:.2f}, dynamic TP={d.TP} FN={d.FN}")
            assert s.FN == 0 and s.TO == 0 and round(s.accuracy, 2) == 1.00
        static_only = {c.id for c in report.cases if c.static_only}
        for r in report.results:
            if r.engine == "dynamic" and r.outcome == "FN":
                assert r.case in static_only, r.case
            if r.engine == "dynamic" and r.case not in static_only:
                assert r.outcome in ("TP", "TN"), r.case


def _without_second_wait(text: str) -> str:
    lines = text.splitlines()
    waits = [i for i, ln in enumerate(lines) if "call MPI_Wait" in ln]
    assert len(waits) == 2
    del lines[waits[1]]
    return "\n".join(lines) + "\n"


def test_criterion_4_double_wait():
    with criterion(4, "double-wait detection") as detail:
        for mode, pack in (("c", "mpi_c"), ("fortran", "mpi_f08")):
            text = (CORPUS / mode / "double_wait.ir").read_text()
            for source, want in ((text, "Error"), (_without_second_wait(text), "NoError")):
                program, table = checked(parse_program(source), pack)
                s = run_static(program, table).verdict
                d = run_dynamic(program, table)[0].verdict
                detail.append(f"{mode}/{'double' if want == 'Error' else 'single'}: static={s} dynamic={d}")
                assert s == d == want


def test_criterion_5_fortran_lowering():
    with criterion(5, "Fortran lowering fidelity") as detail:
        program, table = checked(parse_program((CORPUS / "fortran" / "info_set_strings.ir").read_text()))
        _, trace = interpret(program, table)
        (info_set,) = [c for c in trace.calls() if c.fn == "MPI_Info_set_f08"]
        detail.append(f"Info_set nargs={info_set.nargs}")
        assert info_set.nargs == 4

        program, table = checked(parse_program((CORPUS / "fortran" / "get_fence_read.ir").read_text()))
        observed: dict = {}
        _, trace = interpret(program, table, observed=observed)
        (get,) = [c for c in trace.calls() if c.fn == "MPI_Get_f08"]
        (buf,) = observed["main:buf"]
        detail.append(f"Get arg0={get.args[0].value} buf={buf}")
        assert get.args[0].kind == "addr" and get.args[0].value == buf
        assert any(isinstance(e, AllocEvent) and e.addr == buf for e in trace.events)


def test_criterion_6_metadata_overhead(corpus_run):
    with criterion(6, "metadata-overhead bound") as detail:
        report, _ = corpus_run
        diff = compare_modes(report)
        worst = max(p.ratio for p in diff.pairs)
        detail.append(f"{len(diff.pairs)} pairs, max Fortran/C ratio {worst:.2f}")
        assert len(diff.pairs) >= 24
        assert worst <= 2.0
        for case in report.cases:
            if case.mode.value != "fortran":
                continue
            program, _ = load_case(case)
            uses_desc = any(type(i).__name__ == "MakeDescriptor" for f in program.functions for _, _, i in f.instructions())
            if uses_desc:
                assert report.result(case.id, "dynamic").suppressed_metadata_events > 0, case.id


def test_criterion_7_oracle_equivalence(corpus_cases):
    with criterion(7, "oracle equivalence") as detail:
        start = time.monotonic()
        checked_pairs = 0
        for case in corpus_cases:
            program, table = load_case(case)
            static = run_static(program, table)
            observed: dict = {}
            _, trace = interpret(program, table, observed=observed)
            dynamic = check_trace(trace, table)
            if not case.static_only:
                assert static.verdict == dynamic.verdict, case.id
            model = compute_alias(program)
            holders: dict[int, set[str]] = {}
            for vid, addrs in observed.items():
                for a in addrs:
                    holders.setdefault(a, set()).add(vid)
            for vids in holders.values():
                for a, b in itertools.combinations(sorted(vids), 2):
                    assert model.may_alias(a, b), (case.id, a, b)
                    checked_pairs += 1
        seconds = time.monotonic() - start
        detail.append(f"{len(corpus_cases)} cases, {checked_pairs} address-sharing pairs, {seconds:.2f}s")
        assert seconds < 120


_CONTRACT_OK: list[int] = []
_TRACE_OK: list[int] = []


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(st.sampled_from(list(LanguageMode)).flatmap(lambda m: st.tuples(st.just(m), contracts(m))))
def _contract_round_trip(pair):
    mode, contract = pair
    assert parse_contract(pretty(contract), mode) == contract
    _CONTRACT_OK.append(1)


@settings(max_examples=1000, deadline=None, derandomize=True)
@given(TRACES)
def _trace_round_trip(trace):
    assert loads(dumps(trace)) == trace
    _TRACE_OK.append(1)


def test_criterion_8_round_trips():
    with criterion(8, "grammar/format round-trips") as detail:
        _CONTRACT_OK.clear()
        _TRACE_OK.clear()
        _contract_round_trip()
        _trace_round_trip()
        detail.append(f"contracts={len(_CONTRACT_OK)} traces={len(_TRACE_OK)}")
        assert len(_CONTRACT_OK) >= 1000 and len(_TRACE_OK) >= 1000
