import csv
import io
import json
import subprocess
import sys

import pytest

from treematch.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return write


def test_mast_command(capsys, files):
    a = files("a.tre", "(b,c)a;\n")
    z = files("z.tre", "(x,y)w;\n")
    assert run(capsys, "mast", a, a, "--engine", "fast")[:2] == (0, "mast=3\n")
    assert run(capsys, "mast", a, z)[:2] == (0, "mast=0\n")
    code, out, _ = run(capsys, "mast", a, a, "--check")
    assert code == 0 and "oracle=3" in out and out.endswith("mast=3\n")


def test_mast_input_errors(capsys, files):
    good = files("a.tre", "(b,c)a;")
    bad = files("bad.tre", "(b,c")
    code, _, err = run(capsys, "mast", bad, good)
    assert code == 2 and "position" in err
    assert run(capsys, "mast", good, good.with_name("nope"))[0] == 2


def test_check_reports_disagreement(capsys, files, monkeypatch):
    import treematch.cli as cli
    a = files("a.tre", "(b,c)a;")
    monkeypatch.setitem(cli.MAST_ENGINES, "fast", lambda t1, t2: 99)
    code, out, err = run(capsys, "mast", a, a, "--check")
    assert code == 3 and "fast=99" in out


def test_mwm_command(capsys, files):
    g = files("g.txt", "bipartite 2 2\n0 0 3\n0 1 4\n1 0 5\n1 1 2\n")
    for algo in ("exact", "sweep", "pruned"):
        assert run(capsys, "mwm", g, "--algo", algo)[:2] == (0, "weight=9\n")
    code, out, _ = run(capsys, "mwm", g, "--pairs")
    assert out.splitlines()[1:] == ["0 1", "1 0"]
    h = files("h.txt", "bipartite 2 1\n0 0 10\n1 0 7\n")
    assert run(capsys, "mwm", h, "--hubs", "0")[:2] == (0, "weight=10\n")
    assert run(capsys, "mwm-recover", h, "--hubs", "0")[:2] == (0, "weight=10\n")


@pytest.mark.parametrize("text", ["bipartite 1 1\n", "bipartite 0 0\n", "bipartite 1 1\n0 0 -2\n",
                                  "garbage\n"])
def test_mwm_input_errors(capsys, files, text):
    assert run(capsys, "mwm", files("g.txt", text))[0] == 2


def test_mwm_bad_hubs(capsys, files):
    h = files("h.txt", "bipartite 2 1\n0 0 10\n1 0 7\n")
    assert run(capsys, "mwm", h, "--hubs", "7")[0] == 2
    assert run(capsys, "mwm", h, "--hubs", "a,b")[0] == 2


def test_hmatch_command(capsys, files):
    doc = {"nodes": [
        {"id": "r", "weight": 10, "children": ["a", "b"],
         "graph": {"y_count": 2, "edges": [["a", 0, 5], ["b", 0, 2], ["b", 1, 2]]}},
        {"id": "a", "weight": 6},
        {"id": "b", "weight": 4},
    ]}
    code, out, _ = run(capsys, "hmatch", files("i.json", json.dumps(doc)))
    assert code == 0 and out == "node=r weight=7\n"
    doc["nodes"][0]["weight"] = 9
    assert run(capsys, "hmatch", files("j.json", json.dumps(doc)))[0] == 2


def test_fuzz_command(capsys):
    code, out, _ = run(capsys, "fuzz", "--seed", 1, "--count", 100)
    assert code == 0 and "cases=100" in out
    assert run(capsys, "fuzz", "--count", 0)[:2] == (0, "ok cases=0 seed=1\n")


@pytest.mark.parametrize("fault", ["sweep", "mam", "fast", "hier"])
def test_fuzz_catches_injected_faults(capsys, fault):
    code, out, _ = run(capsys, "fuzz", "--seed", 3, "--count", 40, "--inject-fault", fault)
    assert code == 1 and out.startswith("FAIL seed=3 case=")


def test_fuzz_is_thread_count_independent(capsys, monkeypatch):
    monkeypatch.setenv("TREEMATCH_THREADS", "4")
    four = run(capsys, "fuzz", "--seed", 2, "--count", 30)
    monkeypatch.setenv("TREEMATCH_THREADS", "1")
    assert run(capsys, "fuzz", "--seed", 2, "--count", 30) == four


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bench_rows(capsys):
    code, out, _ = run(capsys, "bench", "--family", "evolutionary", "--sizes", "100,200")
    rows = parse_csv(out)
    assert code == 0 and len(rows) == 4
    assert out.startswith("engine,n,d,delta,millis\n")
    assert {r["engine"] for r in rows} == {"reference", "fast"}


def test_bench_uniform_delta(capsys):
    _, out, _ = run(capsys, "bench", "--family", "uniform", "--sizes", "15,30", "--no-timing")
    for row in parse_csv(out):
        assert int(row["delta"]) == int(row["n"]) ** 2


def test_bench_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"b{k}.csv"
        run(capsys, "bench", "--family", "random-labeled", "--sizes", "40,80", "--seed", 9,
            "--no-timing", "--out", path)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    _, timed, _ = run(capsys, "bench", "--family", "random-labeled", "--sizes", "40,80",
                      "--seed", 9)
    strip = lambda text: [r[:4] for r in csv.reader(io.StringIO(text))]
    assert strip(timed) == strip(outs[0].decode())


def test_console_entry_point(tmp_path):
    p = tmp_path / "t.tre"
    p.write_text("((a,b),c);")
    res = subprocess.run([sys.executable, "-m", "treematch.cli", "mast", str(p), str(p)],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "mast=3\n"
