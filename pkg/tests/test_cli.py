import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from planar_oracle.cli import BENCH_COLUMNS, default_k, main
from planar_oracle.graph import load_graph
from planar_oracle.storage import from_bytes, load_oracle, to_bytes


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def g23(tmp_path):
    path = tmp_path / "g.el"
    assert run("generate", "--grid", "2x3", "--unit", "-o", path)[0] == 0
    return path


@pytest.fixture
def o23(tmp_path, g23):
    path = tmp_path / "o.bin"
    code, text = run("preprocess", "-i", g23, "-o", path, "--k", 2)
    assert code == 0
    return path, json.loads(text)


def test_default_k():
    assert [default_k(n) for n in (1, 2, 4, 5, 16, 17, 65536)] == [1, 2, 2, 3, 4, 5, 256]


def test_generate_2x3(g23):
    text = g23.read_text().splitlines()
    assert text[0] == "6 7"
    g = load_graph(g23)
    assert (g.n, g.m) == (6, 7)


def test_generate_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run("generate", "--grid", "64x64", "--uniform", "1,2", "--seed", 1,
                   "-o", tmp_path / name)[0] == 0
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_generate_triangulated_dimacs(tmp_path):
    path = tmp_path / "t.gr"
    code, _ = run("generate", "--grid", "3x4", "--triangulated", "--integer", "1,9",
                  "-o", path, "--format", "dimacs")
    assert code == 0
    g = load_graph(path, "dimacs")
    assert g.m == 17 + 6


def test_generate_bad_grid(tmp_path, capsys):
    with pytest.raises(SystemExit) as ei:
        run("generate", "--grid", "0x5", "-o", tmp_path / "x")
    assert ei.value.code == 1


def test_generate_unwritable(tmp_path):
    code, _ = run("generate", "--grid", "2x2", "-o", tmp_path / "missing" / "g.el")
    assert code == 2


def test_preprocess_2x3(o23):
    _, stats = o23
    assert stats["n"] == 6 and stats["k"] == 2 and stats["p"] == 1
    assert stats["boundary_total"] == 4
    assert stats["stored_entries"] == 4 ** 2 + 2 ** 2 + 4 * 4
    for key in ("partition_s", "component_apsp_s", "boundary_s"):
        assert key in stats["elapsed"]
    assert stats["peak_table_entries_per_worker"] == stats["stored_entries"]


def test_preprocess_k1_and_kn(tmp_path, g23):
    _, text = run("preprocess", "-i", g23, "-o", tmp_path / "a", "--k", 1)
    assert json.loads(text)["boundary_total"] == 0
    _, text = run("preprocess", "-i", g23, "-o", tmp_path / "b", "--k", 6)
    assert json.loads(text)["boundary_total"] == 6


def test_preprocess_default_k(tmp_path):
    g = tmp_path / "g.el"
    run("generate", "--grid", "5x5", "-o", g)
    _, text = run("preprocess", "-i", g, "-o", tmp_path / "o")
    assert json.loads(text)["k"] == 5


def test_preprocess_errors(tmp_path, g23):
    assert run("preprocess", "-i", g23, "-o", tmp_path / "o", "--k", 7)[0] == 1
    assert run("preprocess", "-i", g23, "-o", tmp_path / "o", "--k", 0)[0] == 1
    assert run("preprocess", "-i", g23, "-o", tmp_path / "o", "-p", 0)[0] == 1
    assert run("preprocess", "-i", tmp_path / "nope", "-o", tmp_path / "o")[0] == 2
    (tmp_path / "bad.el").write_text("2 1\n0 1 -1\n")
    assert run("preprocess", "-i", tmp_path / "bad.el", "-o", tmp_path / "o")[0] == 2


def test_preprocess_workers_byte_identical(tmp_path):
    g = tmp_path / "g.el"
    run("generate", "--grid", "20x20", "--triangulated", "--integer", "1,9", "-o", g)
    blobs = []
    for p in (1, 4, 8):
        run("preprocess", "-i", g, "-o", tmp_path / f"o{p}", "--k", 9, "-p", p)
        blobs.append((tmp_path / f"o{p}").read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]


def test_partition_out(tmp_path, g23):
    part = tmp_path / "p.txt"
    run("preprocess", "-i", g23, "-o", tmp_path / "o", "--k", 2, "--partition-out", part)
    lines = [line.split() for line in part.read_text().splitlines()]
    assert len(lines) == 6
    assert sum(int(f) for _, _, f in lines) == 4


def test_query_2x3(o23):
    path, _ = o23
    code, text = run("query", "-i", path, "--pair", 0, 5, "--pair", 4, 4)
    assert code == 0
    lines = text.splitlines()
    assert lines[0].split()[:3] == ["0", "5", "3"]
    assert lines[1].split()[:3] == ["4", "4", "0"]
    assert lines[0].split()[3] == "6"


def test_query_transfer_column(tmp_path, g23):
    path = tmp_path / "o"
    run("preprocess", "-i", g23, "-o", path, "--k", 2)
    _, one = run("query", "-i", path, "--pair", 0, 5, "-p", 1)
    _, two = run("query", "-i", path, "--pair", 0, 5, "-p", 2)
    assert one.split()[4] == "0"
    o = load_oracle(path)
    a = o.partition.assignment
    expect = 0 if a[0] == a[5] else int(o.partition.boundary_sizes[a[5]])
    assert two.split()[4] == str(expect)


def test_query_pairs_file_and_random(tmp_path, o23):
    path, _ = o23
    pf = tmp_path / "pairs.txt"
    pf.write_text("# comment\n0 5\n1 3\n")
    code, text = run("query", "-i", path, "--pairs", pf, "--random-pairs", 4, "--seed", 2)
    assert code == 0
    assert len(text.splitlines()) == 6


def test_query_inf(tmp_path):
    g = tmp_path / "g.el"
    g.write_text("3 1\n0 1 2.5\n")
    run("preprocess", "-i", g, "-o", tmp_path / "o", "--k", 2)
    _, text = run("query", "-i", tmp_path / "o", "--pair", 0, 2, "--pair", 1, 0)
    assert text.splitlines()[0].split()[2] == "inf"
    assert text.splitlines()[1].split()[2] == "2.5"


def test_query_errors(tmp_path, o23):
    path, _ = o23
    assert run("query", "-i", path, "--pair", 0, 99)[0] == 1
    assert run("query", "-i", path)[0] == 1
    assert run("query", "-i", tmp_path / "none")[0] == 2
    bad = tmp_path / "bad.bin"
    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0xFF
    bad.write_bytes(bytes(data))
    assert run("query", "-i", bad, "--pair", 0, 1)[0] == 2


def test_verify_2x3(o23, g23):
    path, _ = o23
    code, text = run("verify", "-i", g23, "--oracle", path)
    rep = json.loads(text)
    assert code == 0
    assert rep["pairs_checked"] == 36 and rep["mismatches"] == 0
    assert rep["boundary_checked"] and rep["boundary_violations"] == 0


def test_verify_64x64_random(tmp_path):
    g = tmp_path / "g.el"
    run("generate", "--grid", "64x64", "--integer", "1,20", "--seed", 3, "-o", g)
    run("preprocess", "-i", g, "-o", tmp_path / "o")
    code, text = run("verify", "-i", g, "--oracle", tmp_path / "o", "--random-pairs", 10000)
    rep = json.loads(text)
    assert code == 0 and rep["pairs_checked"] == 10000 and rep["mismatches"] == 0


def test_verify_detects_corruption(tmp_path, g23, o23):
    path, _ = o23
    o = load_oracle(path)
    o.component_tables.flat[1] = 0.0   # claims two distinct vertices coincide
    bad = tmp_path / "bad.bin"
    bad.write_bytes(to_bytes(o))
    code, text = run("verify", "-i", g23, "--oracle", bad)
    assert code == 3
    assert json.loads(text)["mismatches"] >= 1


def test_verify_mismatched_graph(tmp_path, o23):
    path, _ = o23
    g = tmp_path / "g.el"
    run("generate", "--grid", "3x3", "-o", g)
    assert run("verify", "-i", g, "--oracle", path)[0] == 1


def _bench(tmp_path, *extra):
    g = tmp_path / "g.el"
    if not g.exists():
        run("generate", "--grid", "24x24", "-o", g)
    code, text = run("bench", "-i", g, *extra)
    return code, list(csv.DictReader(io.StringIO(text)))


def test_bench_rows_and_identity(tmp_path):
    code, rows = _bench(tmp_path, "--sweep-k", "8,16", "--random-pairs", 200)
    assert code == 0 and len(rows) == 2
    assert list(rows[0]) == BENCH_COLUMNS
    g = load_graph(tmp_path / "g.el")
    from planar_oracle.partition import partition_graph
    for row in rows:
        p = partition_graph(g, int(row["k"]), 0)
        b = int(p.boundary_sizes.sum())
        assert int(row["stored_entries"]) == int((p.sizes.astype(np.int64) ** 2).sum()) + b * b
        assert row["status"] == "ok"


def test_bench_empty_sweep(tmp_path):
    code, text = (lambda r: (r[0], r[1]))(_bench(tmp_path, "--sweep-k", ""))
    assert code == 0 and text == []


def test_bench_bad_k_and_p(tmp_path):
    code, rows = _bench(tmp_path, "--sweep-k", "4,9999", "--sweep-p", "1,2,8",
                        "--random-pairs", 50)
    assert code == 0
    status = {(r["k"], r["p"]): r["status"] for r in rows}
    assert status[("4", "1")] == "ok" and status[("4", "2")] == "ok"
    assert status[("4", "8")].startswith("error")
    assert status[("9999", "1")].startswith("error")
    p2 = next(r for r in rows if (r["k"], r["p"]) == ("4", "2"))
    p1 = next(r for r in rows if (r["k"], r["p"]) == ("4", "1"))
    assert int(p1["transfer_bytes"]) == 0 and int(p2["transfer_bytes"]) > 0


def test_bench_to_file(tmp_path):
    out = tmp_path / "b.csv"
    code, _ = _bench(tmp_path, "--sweep-k", "4", "-o", out, "--random-pairs", 10)
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(BENCH_COLUMNS)


def test_usage_errors():
    for argv in ([], ["nope"], ["query"], ["bench", "-i", "x", "--sweep-k", "a,b"]):
        with pytest.raises(SystemExit) as ei:
            run(*argv)
        assert ei.value.code == 1


def test_module_entry_point(tmp_path):
    g = tmp_path / "g.el"
    res = subprocess.run([sys.executable, "-m", "planar_oracle", "generate", "--grid", "2x2",
                          "-o", str(g)], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["m"] == 4
