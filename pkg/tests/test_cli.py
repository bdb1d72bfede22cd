import json

import pytest

from pcpforge.cli import main

CNF = "p cnf 4 3\n1 2 3 0\n-1 2 4 0\n-2 -3 -4 0\n"


@pytest.fixture
def files(tmp_path):
    cnf = tmp_path / "phi.cnf"
    cnf.write_text(CNF)
    sym = tmp_path / "sym.txt"
    sym.write_text("1 1 0\n1 1 1\n0 1 0\n")
    asym = tmp_path / "asym.txt"
    asym.write_text("1 1 0\n0 1 1\n0 1 0\n")
    sysf = tmp_path / "s.sys"
    sysf.write_text("p quad 4 2\n1 | 1:1 3:1 | 1,2:1\n0 | 2:1 | 3,4:1\n")
    return tmp_path, cnf, sym, asym, sysf


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_lc(files, capsys):
    tmp, cnf, *_ = files
    code, out, _ = run(["lc", "--cnf", str(cnf)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["value"] == "1" and doc["n_edges"] == 9
    assert doc["provenance"]["command"] == "lc"


def test_decompose(files, capsys):
    tmp, _, sym, asym, _ = files
    code, out, _ = run(["decompose", "--matrix", str(sym)], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["kind"] == "symmetric" and doc["count"] <= 3 * doc["rank"] // 2
    code, out, err = run(["decompose", "--matrix", str(asym)], capsys)
    assert code != 0 and json.loads(err) == {"error": "not_symmetric", "message": "not symmetric"}


def test_missing_file(files, capsys):
    tmp, *_ = files
    code, _, err = run(["lc", "--cnf", str(tmp / "nope.cnf")], capsys)
    assert code == 1 and "error" in json.loads(err)


def test_bad_cnf(files, capsys):
    tmp, *_ = files
    bad = tmp / "bad.cnf"
    bad.write_text("p cnf 4 1\n1 2 3 4 0\n")
    code, _, err = run(["lc", "--cnf", str(bad)], capsys)
    assert code == 2 and json.loads(err)["error"] == "parse"


def test_surface_and_matrix_from_system(files, capsys):
    tmp, _, _, _, sysf = files
    code, out, _ = run(["surface-lc", "--sys", str(sysf), "--m", "2", "--h", "2", "--d", "2", "--e", "3"], capsys)
    doc = json.loads(out)
    assert code == 0 and all(doc["completeness"].values())
    code, out, _ = run(["matrix-lc", "--sys", str(sysf)], capsys)
    assert code == 0 and all(json.loads(out)["completeness"].values())


def test_hypergraph_artifacts_are_deterministic(files, capsys):
    tmp, cnf, *_ = files
    outs = []
    for k in range(2):
        d = tmp / f"h{k}"
        code, _, _ = run(["hypergraph", "--cnf", str(cnf), "--seed", "2", "--samples", "3000", "--out", str(d)],
                         capsys)
        assert code == 0
        outs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outs[0] == outs[1]
    assert set(outs[0]) == {"hypergraph.hyp", "hypergraph.json", "hypergraph.csv", "hypergraph.png"}
    assert json.loads(outs[0]["hypergraph.json"])["coloring"]["monochromatic"] == 0


def test_ledger_artifacts(files, capsys):
    tmp, *_ = files
    code, out, _ = run(["ledger", "--seed", "1", "--samples", "5000", "--sets", "2", "--out", str(tmp / "l")], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["all_checks_pass"] and len(doc["sets"]) == 4
    header = (tmp / "l" / "ledger.csv").read_text().splitlines()[0]
    assert header.startswith("set,kind,theta0")
    assert (tmp / "l" / "ledger.png").read_bytes()[:4] == b"\x89PNG"


def test_tsa(files, capsys):
    tmp, cnf, *_ = files
    code, out, _ = run(["tsa", "--cnf", str(cnf), "--exact"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["queries_per_edge"] == 131072
    assert doc["rates"]["ldlc"]["rate"] == "1" and doc["rates"]["ldlc"]["exact"]


def test_decompose_pseudo(files, capsys):
    tmp, _, sym, _, _ = files
    code, out, _ = run(["decompose", "--matrix", str(sym), "--pseudo"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["count"] % 2 == 1 and all(v[0] == "1" for v in doc["vectors"])


def test_selftest_exit_zero(capsys):
    code, out, _ = run(["selftest"], capsys)
    assert code == 0
    assert json.loads(out.strip().splitlines()[-1]) == {"passed": 13, "failed": []}
