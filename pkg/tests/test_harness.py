import dataclasses
import logging
import shutil

import pytest

from conftest import CORPUS
from cover.errors import CorpusError
from cover.harness import ClassificationReport, classify, compare_modes, load_manifest, run_corpus

CLEAN_C = (CORPUS / "c" / "get_fence_read.ir").read_text()
CLEAN_F = (CORPUS / "fortran" / "get_fence_read.ir").read_text()
RACY_C = (CORPUS / "c" / "get_read_before_fence.ir").read_text()

CASE = """
[[case]]
id = "{id}"
file = "{file}"
mode = "{mode}"
expected = "{expected}"
class = "{klass}"
{extra}
"""


def make_corpus(root, cases, header='[packs]\nc = "mpi_c"\nfortran = "mpi_f08"\n'):
    parts = [header]
    for c in cases:
        (root / c["file"]).write_text(c.pop("text"))
        c.setdefault("klass", "RMA")
        c.setdefault("extra", "")
        parts.append(CASE.format(**c))
    (root / "corpus.toml").write_text("".join(parts))
    return root


def test_classify():
    assert [classify("Error", "Error"), classify("Error", "NoError"), classify("NoError", "Error"),
            classify("NoError", "NoError"), classify("Error", None)] == ["TP", "FN", "FP", "TN", "TO"]


@pytest.fixture(scope="module")
def shipped():
    return run_corpus()


def test_shipped_corpus_has_no_false_positives(shipped):
    for engine in ("static", "dynamic"):
        for mode in ("c", "fortran"):
            counts = shipped.counts(engine, mode)
            assert counts.FP == 0 and counts.TO == 0
            assert counts.total == 48


def test_shipped_corpus_parity(shipped):
    diff = compare_modes(shipped)
    assert diff.parity and diff.unpaired == []
    assert all(v == 0 for d in diff.deltas.values() for v in d.values())
    assert len(diff.pairs) == 48
    assert all(p.ratio <= 2.0 for p in diff.pairs)


def test_report_json_and_text(shipped):
    data = shipped.to_json()
    assert set(data) == {"summary", "diff", "cases"}
    assert data["summary"]["static"]["c"]["accuracy"] == 1.0
    assert "static" in shipped.text()


def test_harness_is_deterministic(shipped):
    again = run_corpus()
    assert again.to_json() == shipped.to_json()


def test_parallel_matches_serial(shipped):
    parallel = run_corpus(jobs=2)
    assert parallel.to_json() == shipped.to_json()


def test_single_clean_case(tmp_path):
    make_corpus(tmp_path, [dict(id="one", file="one.ir", mode="c", expected="noerror", text=CLEAN_C)])
    report = run_corpus(tmp_path)
    counts = report.counts("static", "c")
    assert (counts.TN, counts.total, counts.accuracy) == (1, 1, 1.0)
    assert report.counts("dynamic").TN == 1


def test_mislabeled_case_surfaces_as_false_positive(tmp_path):
    make_corpus(tmp_path, [dict(id="bad", file="bad.ir", mode="c", expected="noerror", text=RACY_C)])
    report = run_corpus(tmp_path)
    assert report.counts("static").FP == 1
    assert report.counts("dynamic").FP == 1


def test_tiny_timeout_counts_as_TO(tmp_path):
    make_corpus(tmp_path, [dict(id="one", file="one.ir", mode="c", expected="noerror", text=CLEAN_C)])
    report = run_corpus(tmp_path, timeout=1e-9)
    assert report.counts("static").TO == 1 and report.counts("dynamic").TO == 1


def test_removed_detection_is_flagged(shipped):
    victim = next(r for r in shipped.results if r.mode == "fortran" and r.engine == "static" and r.outcome == "TP")
    results = [dataclasses.replace(r, verdict="NoError", outcome="FN") if r is victim else r for r in shipped.results]
    diff = compare_modes(ClassificationReport(results, shipped.cases, 0.0))
    assert diff.deltas["static"]["TP"] == -1
    assert diff.deltas["static"]["FN"] == 1
    assert set(diff.flagged()["static"]) == {"TP", "FN", "accuracy"}
    assert not diff.parity


def test_unpaired_case_warns(tmp_path, caplog):
    make_corpus(tmp_path, [dict(id="one", file="one.ir", mode="c", expected="noerror", text=CLEAN_C)])
    with caplog.at_level(logging.WARNING):
        diff = compare_modes(run_corpus(tmp_path, ("static",)))
    assert diff.unpaired == ["one"]
    assert "UnpairedCase" in caplog.text


def test_pair_ratio(tmp_path):
    make_corpus(tmp_path, [
        dict(id="c1", file="c1.ir", mode="c", expected="noerror", text=CLEAN_C, extra='pair = "f1"'),
        dict(id="f1", file="f1.ir", mode="fortran", expected="noerror", text=CLEAN_F, extra='pair = "c1"'),
    ])
    (row,) = compare_modes(run_corpus(tmp_path)).pairs
    assert row.ratio == 1.0 and row.fortran_suppressed > 0


@pytest.mark.parametrize(
    "cases, match",
    [
        ([dict(id="a", file="a.ir", mode="c", expected="maybe", text=CLEAN_C)], "expected"),
        ([dict(id="a", file="a.ir", mode="c", expected="error", klass="Weird", text=CLEAN_C)], "class"),
        ([dict(id="a", file="a.ir", mode="c", expected="error", text=CLEAN_C),
          dict(id="a", file="b.ir", mode="c", expected="error", text=CLEAN_C)], "duplicate"),
        ([dict(id="a", file="a.ir", mode="c", expected="error", text=CLEAN_C, extra='pair = "zzz"')], "unknown case"),
        ([dict(id="a", file="a.ir", mode="c", expected="error", text=CLEAN_C, extra='pair = "b"'),
          dict(id="b", file="b.ir", mode="c", expected="error", text=CLEAN_C, extra='pair = "a"')], "same mode"),
        ([dict(id="a", file="a.ir", mode="c", expected="error", text=CLEAN_C, extra='pair = "b"'),
          dict(id="b", file="b.ir", mode="fortran", expected="noerror", text=CLEAN_F, extra='pair = "a"')], "disagree"),
    ],
)
def test_manifest_errors(tmp_path, cases, match):
    make_corpus(tmp_path, cases)
    with pytest.raises(CorpusError, match=match):
        load_manifest(tmp_path)


def test_unreferenced_program_file(tmp_path):
    make_corpus(tmp_path, [dict(id="a", file="a.ir", mode="c", expected="error", text=CLEAN_C)])
    shutil.copy(tmp_path / "a.ir", tmp_path / "stray.ir")
    with pytest.raises(CorpusError, match="not referenced"):
        load_manifest(tmp_path)


def test_missing_pack_and_file(tmp_path):
    make_corpus(tmp_path, [dict(id="a", file="a.ir", mode="c", expected="error", text=CLEAN_C)], header="")
    with pytest.raises(CorpusError, match="pack"):
        load_manifest(tmp_path)
    (tmp_path / "corpus.toml").write_text(CASE.format(id="a", file="nope.ir", mode="c", expected="error", klass="Init", extra=""))
    with pytest.raises(CorpusError, match="does not exist"):
        load_manifest(tmp_path)


def test_shipped_manifest_covers_classes(corpus_cases):
    assert len(corpus_cases) == 96
    assert {c.error_class for c in corpus_cases} >= {"Init", "Race", "HandleLifecycle", "RMA"}
    errors = sum(c.expected == "Error" for c in corpus_cases)
    assert errors == len(corpus_cases) // 2
    assert sorted(c.id for c in corpus_cases if c.static_only) == [
        "c/finalize_untaken_branch", "c/race_untaken_branch",
        "fortran/finalize_untaken_branch", "fortran/race_untaken_branch",
    ]
