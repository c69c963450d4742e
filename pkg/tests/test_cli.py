import csv
import io
import json
import subprocess
import sys

import pytest

from citeindex.cli import main
from citeindex.ingest import RawRecord, write_jsonl


def write(path, records):
    with open(path, "wb") as f:
        write_jsonl(records, f)
    return str(path)


def run(capsysbinary, *argv):
    code = main([str(a) for a in argv])
    out = capsysbinary.readouterr()
    return code, out.out.decode(), out.err.decode()


def rows(text, delim="\t"):
    return list(csv.reader(io.StringIO(text), delimiter=delim))


@pytest.fixture
def three_authors(tmp_path):
    recs = [RawRecord("p1", year=1990, authors=["Ann"]),
            RawRecord("p2", year=1990, authors=["Bob"]),
            RawRecord("p3", year=1991, authors=["Cy"], cites=["p1", "p2"]),
            RawRecord("p4", year=1992, authors=["Cy"], cites=["p1"])]
    return write(tmp_path / "three.jsonl", recs)


@pytest.fixture
def synthetic(tmp_path, capsysbinary):
    path = tmp_path / "syn.jsonl"
    code, _, _ = run(capsysbinary, "generate", path, "--seed", 4, "--papers", 800,
                     "--authors", 60, "--venues", 5, "--trendsetter-fraction", 0.1)
    assert code == 0
    return str(path)


class TestRank:
    def test_three_authors(self, capsysbinary, three_authors):
        code, out, err = run(capsysbinary, "rank", three_authors)
        assert code == 0
        table = rows(out)
        assert table[0] == ["rank", "name", "h", "a", "n_c_tot", "n_p"]
        assert [r[:2] for r in table[1:]] == [["1", "Ann"], ["2", "Bob"], ["3", "Cy"]]
        # ingest report goes to stderr as JSON
        assert json.loads(err.splitlines()[-1])["records_read"] == 4

    def test_top_20(self, capsysbinary, synthetic):
        code, out, _ = run(capsysbinary, "rank", synthetic, "--top", 20)
        assert code == 0
        assert len(rows(out)) == 21

    def test_reduction_flags(self, capsysbinary, synthetic):
        _, plain, _ = run(capsysbinary, "rank", synthetic, "-f", "json")
        _, reduced, _ = run(capsysbinary, "rank", synthetic, "--index", "h_c",
                            "--delta", 0, "--gamma", 1, "-f", "json")
        plain, reduced = json.loads(plain), json.loads(reduced)
        assert [(r["name"], r["h"], r["a"]) for r in plain] == \
               [(r["name"], r["h_c"], r["a_c"]) for r in reduced]

    def test_venue_entities_csv(self, capsysbinary, synthetic):
        code, out, _ = run(capsysbinary, "rank", synthetic, "--entity", "venue", "-f", "csv")
        assert code == 0
        assert len(rows(out, ",")) == 6

    def test_now_slices(self, capsysbinary, three_authors):
        _, out, _ = run(capsysbinary, "rank", three_authors, "--now", 1991, "-f", "json")
        data = {r["name"]: r for r in json.loads(out)}
        assert data["Ann"]["n_c_tot"] == 1

    def test_bad_params(self, capsysbinary, three_authors):
        code, out, err = run(capsysbinary, "rank", three_authors, "--gamma", -1)
        assert code != 0 and out == "" and "error" in err

    def test_missing_file(self, capsysbinary, tmp_path):
        code, out, _ = run(capsysbinary, "rank", tmp_path / "nope.jsonl")
        assert code != 0 and out == ""

    def test_parse_error(self, capsysbinary, tmp_path):
        bad = tmp_path / "bad.xml"
        bad.write_bytes(b"<dblp><article key='a'></dblp>")
        code, out, err = run(capsysbinary, "rank", bad)
        assert code != 0 and out == "" and "byte" in err


class TestHistory:
    def test_non_decreasing(self, capsysbinary, synthetic):
        _, out, _ = run(capsysbinary, "rank", synthetic, "--top", 1)
        name = rows(out)[1][1]
        code, out, _ = run(capsysbinary, "history", synthetic, name)
        assert code == 0
        table = rows(out)
        assert table[0] == ["year", f"{name}:h"]
        values = [int(r[1]) for r in table[1:]]
        assert values == sorted(values) and values[-1] > 0

    def test_three_kinds(self, capsysbinary, synthetic):
        code, out, _ = run(capsysbinary, "history", synthetic, "Author 00001",
                           "--index", "h,h_c", "--index", "h_t")
        assert code == 0
        assert all(len(r) == 4 for r in rows(out))

    def test_years_without_data_are_zero(self, capsysbinary, three_authors):
        code, out, _ = run(capsysbinary, "history", three_authors, "Ann",
                           "--from", 1980, "--to", 1989)
        assert code == 0
        assert [r[1] for r in rows(out)[1:]] == ["0"] * 10

    def test_unknown_entity_suggests(self, capsysbinary, three_authors):
        code, out, err = run(capsysbinary, "history", three_authors, "Annn")
        assert code != 0 and out == ""
        assert "did you mean" in err and "Ann" in err

    def test_venue_year_needs_year(self, capsysbinary, three_authors):
        code, _, err = run(capsysbinary, "history", three_authors, "x", "--entity", "venue_year")
        assert code != 0 and "--year" in err


@pytest.fixture
def vldb_1995(tmp_path):
    counts = [11] * 11 + [10] * 31 + [1] + [0] * 29
    recs = []
    for i, c in enumerate(counts):
        key = f"vldb95_{i}"
        recs.append(RawRecord(key, year=1995, authors=[f"a{i}"], venue="vldb"))
        recs += [RawRecord(f"{key}_c{j}", year=2000, authors=["z"], venue="other", cites=[key])
                 for j in range(c)]
    recs.append(RawRecord("sig", year=1995, authors=["s"], venue="sigmod"))
    recs.append(RawRecord("sigc", year=2000, authors=["z"], venue="other", cites=["sig"]))
    return write(tmp_path / "vldb.jsonl", recs)


class TestYearly:
    def test_vldb_row(self, capsysbinary, vldb_1995):
        code, out, _ = run(capsysbinary, "yearly", vldb_1995, "--from", 1995, "--to", 1995)
        assert code == 0
        table = rows(out)
        assert table[0] == ["rank", "name", "year", "h", "a", "h_n", "n_c_tot", "n_p"]
        assert table[1] == ["1", "vldb", "1995", "11", "3.57", "0.15", "432", "72"]
        assert table[2][1] == "sigmod"

    def test_sort_by_normalized(self, capsysbinary, vldb_1995):
        _, out, _ = run(capsysbinary, "yearly", vldb_1995, "--from", 1995, "--to", 1995,
                        "--sort", "h_n")
        table = rows(out)
        assert table[0] == ["rank", "name", "year", "h_n", "h", "n_p"]
        assert [r[1] for r in table[1:]] == ["sigmod", "vldb"]
        assert table[1][3] == "1"

    def test_empty_venue_years_omitted(self, capsysbinary, vldb_1995):
        _, out, _ = run(capsysbinary, "yearly", vldb_1995, "--from", 1994, "--to", 1996)
        names = {(r[1], r[2]) for r in rows(out)[1:]}
        assert ("vldb", "1995") in names
        assert all(y == "1995" for _, y in names if _ in ("vldb", "sigmod"))

    def test_as_of(self, capsysbinary, vldb_1995):
        _, out, _ = run(capsysbinary, "yearly", vldb_1995, "--from", 1995, "--to", 1995,
                        "--venue", "vldb", "--as-of", 1999)
        assert rows(out)[1][3] == "0"

    def test_unknown_venue(self, capsysbinary, vldb_1995):
        code, _, err = run(capsysbinary, "yearly", vldb_1995, "--venue", "vldbb")
        assert code != 0 and "vldb" in err


class TestGenerate:
    def test_byte_identical(self, capsysbinary, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for p in (a, b):
            assert run(capsysbinary, "generate", p, "--seed", 9, "--papers", 300)[0] == 0
        assert a.read_bytes() == b.read_bytes() and a.stat().st_size > 0
        assert not (tmp_path / "a.jsonl.partial").exists()

    def test_zero_papers(self, capsysbinary, tmp_path):
        out = tmp_path / "empty.jsonl"
        assert run(capsysbinary, "generate", out, "--papers", 0)[0] == 0
        assert out.read_bytes() == b""

    def test_infeasible(self, capsysbinary, tmp_path):
        out = tmp_path / "x.jsonl"
        code, _, err = run(capsysbinary, "generate", out, "--papers", 10,
                           "--years", 1990, 1999, "--cites-per-paper", 3, 4)
        assert code != 0 and "needs 3 citations" in err
        assert not out.exists()


def test_validate(capsysbinary, data_dir):
    code, out, _ = run(capsysbinary, "validate", data_dir / "sample_dblp.xml",
                       "--drop-self-citations")
    assert code == 0
    summary = json.loads(out)
    assert summary["papers"] == 4 and summary["edges"] == 2
    assert summary["report"]["self_citations_dropped"] == 2


def test_module_entry_point(three_authors):
    proc = subprocess.run([sys.executable, "-m", "citeindex", "rank", three_authors, "-f", "csv"],
                          capture_output=True, check=True)
    assert proc.stdout.startswith(b"rank,name,h,a,n_c_tot,n_p\r\n")
