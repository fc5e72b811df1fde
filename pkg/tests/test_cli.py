import json

import pytest

from polycert import cli
from polycert.encodings import complete_graph, groetzsch_graph, random_graph

TRIANGLE = "p edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write


def test_nulla_roundtrip_and_tamper(files, capsys, tmp_path):
    g = files("k4.col", complete_graph(4).to_dimacs())
    sys_path = str(tmp_path / "k4.json")
    assert run(["encode", "--graph", g, "-o", sys_path], capsys)[0] == 0
    cert_path = str(tmp_path / "cert.json")
    assert run(["nulla", "--system", sys_path, "-o", cert_path], capsys)[0] == 0
    code, out, _ = run(["check-cert", cert_path, "--system", sys_path], capsys)
    assert code == 0 and json.loads(out)["valid"]
    obj = json.loads(open(cert_path).read())
    obj["certificate"]["multipliers"][0] = [{"coeff": "1", "monomial": [0, 0, 0, 0]}]
    bad = files("bad.json", json.dumps(obj))
    code, _, err = run(["check-cert", bad, "--system", sys_path], capsys)
    assert code == 1 and "identity residual nonzero" in err


def test_nulla_bound_exit_code(files, capsys, tmp_path):
    g = files("tri.col", TRIANGLE)
    sys_path = str(tmp_path / "tri.json")
    run(["encode", "--graph", g, "-o", sys_path], capsys)
    code, out, _ = run(["nulla", "--system", sys_path, "--max-degree", "1"], capsys)
    assert code == 2 and json.loads(out)["status"] == "BOUND_REACHED"


def test_fpnulla_and_solve(files, capsys, tmp_path):
    g = files("tri.col", TRIANGLE)
    sys_path = str(tmp_path / "tri.json")
    run(["encode", "--graph", g, "--symmetry-break", "-o", sys_path], capsys)
    code, out, _ = run(["fpnulla", "--system", sys_path], capsys)
    assert code == 0 and json.loads(out)["count"] == 2
    code, out, _ = run(["solve", "--system", sys_path, "--seed", "3"], capsys)
    res = json.loads(out)
    assert code == 0 and len(res["roots"]) == 2
    assert sorted(map(tuple, res["colors"])) == [("red", "blue", "green"), ("red", "green", "blue")]


def test_fpnulla_certificate_roundtrip(files, capsys, tmp_path):
    g = files("k4.col", complete_graph(4).to_dimacs())
    sys_path = str(tmp_path / "k4.json")
    run(["encode", "--graph", g, "-o", sys_path], capsys)
    out_path = str(tmp_path / "fp.json")
    run(["fpnulla", "--system", sys_path, "-o", out_path], capsys)
    code, out, _ = run(["check-cert", out_path, "--system", sys_path], capsys)
    assert code == 0 and json.loads(out)["valid"]


def test_cycle_cert_roundtrip(files, capsys, tmp_path):
    g = files("g.json", json.dumps(groetzsch_graph().to_json()))
    cert = str(tmp_path / "c.json")
    assert run(["cycle-cert", "--graph", g, "-o", cert], capsys)[0] == 0
    code, out, _ = run(["check-cert", cert, "--graph", g], capsys)
    assert code == 0 and json.loads(out)["valid"]
    c6 = files("c6.col", "p edge 6 6\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\ne 6 1\n")
    code, out, _ = run(["cycle-cert", "--graph", c6], capsys)
    assert code == 0 and json.loads(out)["status"] == "NO_CERTIFICATE"


def test_psatz_roundtrip(files, capsys, tmp_path):
    spec = files("ps.json", json.dumps({"variables": ["x1", "x2"], "eqs": ["x2 + x1^2 + 2"],
                                        "ineqs": ["x1 - x2^2 + 3"]}))
    cert = str(tmp_path / "psc.json")
    assert run(["psatz", "--system", spec, "-o", cert], capsys)[0] == 0
    code, out, _ = run(["check-cert", cert, "--system", spec], capsys)
    res = json.loads(out)
    assert code == 0 and res["valid"] and res["exact"]
    code, out, _ = run(["psatz", "--system", spec, "--moment"], capsys)
    assert code == 0 and json.loads(out)["status"] == "INFEASIBLE"


def test_sos_and_theta(files, capsys):
    code, out, _ = run(["sos-check", "--poly", "x1^2 - x1*x2^2 + x2^4 + 1", "--vars", "x1,x2"], capsys)
    assert code == 0 and json.loads(out)["status"] == "SOS"
    g = files("c5.col", "p edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n")
    code, out, _ = run(["theta1", "--graph", g], capsys)
    assert code == 0 and abs(json.loads(out)["value"] - 5 ** 0.5) < 1e-6


def test_errors_go_to_stderr(files, capsys):
    code, _, err = run(["nulla", "--system", "/nonexistent.json"], capsys)
    assert code == 1 and err.startswith("polycert nulla:")
    bad = files("bad.col", "p edge 2 1\ne 1 5\n")
    code, _, err = run(["encode", "--graph", bad], capsys)
    assert code == 1 and "outside" in err


def test_experiment_reproducible(tmp_path, capsys):
    argv = ["experiment", "--n", "9", "--p", "0.3:0.6:0.1", "--trials", "6", "--seed", "5",
            "--no-timestamp", "--no-timing", "--assert-dominance"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(argv + ["-o", str(a)]) == 0
    assert cli.main(argv + ["--workers", "2", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# schema: polycert-experiment/1\n")
    assert len([ln for ln in text.splitlines() if not ln.startswith("#")]) == 1 + 4 * 3


def test_cell_seeds_and_grid():
    assert cli.parse_grid("0.05:0.20:0.05") == [0.05, 0.1, 0.15, 0.2]
    assert cli.parse_grid("0.1,0.3") == [0.1, 0.3]
    assert cli.cell_seed(1, 2, 3) == cli.cell_seed(1, 2, 3) != cli.cell_seed(1, 2, 4)


def test_dominance_chain_on_cells():
    spec = cli.ExperimentSpec(n=12, ps=[0.4, 0.7], trials=4, seed=9, methods=list(cli.METHODS))
    cells = cli.run_experiment(spec)
    rows = cli.aggregate(spec, cells)
    assert cli.check_dominance(spec, cells, rows) == []
    for c in cells:
        G = random_graph(spec.n, spec.ps[c.p_index], cli.cell_seed(spec.seed, c.p_index, c.trial))
        if c.proven["EXACT_ORACLE"]:
            assert not cli.three_colorable(G)
