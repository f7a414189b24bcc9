import json
import subprocess
import sys

import pytest
from click.testing import CliRunner

from tentopt.cli import cli
from tentopt.hypergraphs import make_tent, make_turan_graph

runner = CliRunner()


def invoke(*args):
    res = runner.invoke(cli, list(args), obj={}, catch_exceptions=False)
    return res


def write_host(tmp_path, H, name="host.json"):
    p = tmp_path / name
    p.write_text(H.to_json())
    return str(p)


def run_main(*args, timeout=120):
    return subprocess.run([sys.executable, "-m", "tentopt.cli", *args],
                          capture_output=True, text=True, timeout=timeout)


# -- commands through the runner -------------------------------------------


def test_tent_make():
    res = invoke("tent", "make", "--r", "4", "--i", "1")
    assert res.exit_code == 0
    d = json.loads(res.output)
    assert d["r"] == 4 and len(d["edges"]) == 3


def test_tent_make_lam():
    res = invoke("tent", "make", "--r", "4", "--lam", "2,1,1")
    assert res.exit_code == 0
    assert json.loads(res.output)["r"] == 4


def test_tent_family():
    res = invoke("tent", "family", "--r", "5", "--k", "2")
    assert res.exit_code == 0
    assert len(json.loads(res.output)) == 2


def test_hom_check(tmp_path):
    src = write_host(tmp_path, make_tent(3, 1), "src.json")
    host = write_host(tmp_path, make_tent(3, 1), "host.json")
    res = invoke("hom", "check", src, host)
    assert res.exit_code == 0
    assert json.loads(res.output)["found"] is True

    free = write_host(tmp_path, make_turan_graph(3, 6), "free.json")
    res = invoke("hom", "check", src, free)
    assert json.loads(res.output)["found"] is False


def test_hom_check_partial(tmp_path):
    p = tmp_path / "partial.json"
    p.write_text(json.dumps({"r": 3, "n": 2, "edges": [[0, 1]]}))
    host = write_host(tmp_path, make_turan_graph(3, 6))
    res = invoke("hom", "check", "--partial", str(p), host)
    assert res.exit_code == 0
    assert json.loads(res.output)["found"] is True


def test_hom_exact_turan():
    res = invoke("hom", "exact-turan", "--n", "5", "--r", "2", "--k", "1")
    assert res.exit_code == 0
    d = json.loads(res.output)
    assert d["ex"] == 6 and d["extremal_count"] == 1


def test_lagrangian_command(tmp_path):
    host = write_host(tmp_path, make_tent(2, 1))
    res = invoke("lagrangian", host)
    d = json.loads(res.output)
    assert d["value"] == pytest.approx(1 / 3, abs=1e-8)
    assert d["status"] == "converged"


def test_region_max_with_certificate(tmp_path):
    cert = tmp_path / "cert.json"
    res = invoke("region", "max", "--r", "5", "--k", "2", "--exact",
                 "--certificate", str(cert))
    assert res.exit_code == 0
    d = json.loads(res.output)
    assert d["status"] == "converged"
    assert d["value"] == pytest.approx(120 / 5 ** 5, rel=1e-6)

    vres = invoke("verify", str(cert))
    assert vres.exit_code == 0
    assert json.loads(vres.output)["passed"] is True


def test_region_counterexample_with_certificate(tmp_path):
    cert = tmp_path / "cert.json"
    res = invoke("region", "counterexample", "--r", "6", "--k", "1",
                 "--certificate", str(cert))
    d = json.loads(res.output)
    assert d["exceeds_bound"] is True and d["margin"] > 0
    vres = invoke("verify", str(cert))
    assert json.loads(vres.output)["passed"] is True


def test_region_counterexample_eps_option():
    res = invoke("region", "counterexample", "--r", "6", "--k", "1",
                 "--eps", "1/100")
    d = json.loads(res.output)
    from fractions import Fraction
    from tentopt.region import counterexample_point
    expect = counterexample_point(6, 1, Fraction(1, 100))
    assert d["x_exact"] == [str(v) for v in expect.x]


def test_region_segments(tmp_path):
    p = tmp_path / "point.json"
    p.write_text(json.dumps(
        {"r": 6, "k": 2, "x": [0.1, 0.25, 0.5, 0.75, 0.9, 1.0]}))
    res = invoke("region", "segments", str(p))
    d = json.loads(res.output)
    assert d["initial_length"] == 1
    assert len(d["segments"]) == 5


def test_region_probe_floor():
    res = invoke("region", "probe-floor", "--r", "6")
    d = json.loads(res.output)
    assert d["k"] == 2


def test_entropy_density(tmp_path):
    host = write_host(tmp_path, make_tent(2, 1))
    res = invoke("entropy", "density", host, "--restarts", "20")
    d = json.loads(res.output)
    assert d["value"] == pytest.approx(2 / 3, abs=1e-6)


def test_entropy_ratio(tmp_path):
    host = write_host(tmp_path, make_turan_graph(3, 6))
    w = tmp_path / "w.json"
    w.write_text(json.dumps([1 / 8] * 8))
    res = invoke("entropy", "ratio", host, str(w))
    d = json.loads(res.output)
    assert len(d["x"]) == 3 and d["x"][-1] == pytest.approx(1.0)


def test_entropy_verify_ratio(tmp_path):
    host = write_host(tmp_path, make_turan_graph(3, 6))
    res = invoke("entropy", "verify-ratio", host, "--family", "3,1",
                 "--trials", "10")
    assert res.exit_code == 0
    assert json.loads(res.output)["all_feasible"] is True


def test_theorem_table_with_certs(tmp_path):
    certs = tmp_path / "certs"
    certs.mkdir()
    res = invoke("report", "theorem-table", "--r-min", "4", "--r-max", "5",
                 "--cert-dir", str(certs))
    rows = json.loads(res.output)
    assert [row["r"] for row in rows] == [4, 5]
    assert all(row["relative_gap"] < 1e-6 for row in rows)
    for r in (4, 5):
        vres = invoke("verify", str(certs / f"region-max-r{r}.json"))
        assert json.loads(vres.output)["passed"] is True


def test_counterexample_table_csv():
    res = invoke("--format", "csv", "report", "counterexample-table",
                 "--r-min", "6", "--r-max", "9")
    lines = res.output.strip().splitlines()
    header = lines[0].split(",")
    assert {"r", "k", "eps", "margin"} <= set(header)
    # rows exist exactly for k < floor(r/e): r=6,7,8 give k=1, r=9 gives k=1,2
    assert len(lines) - 1 == 5


def test_json_output_deterministic():
    a = invoke("region", "max", "--r", "5", "--k", "2")
    b = invoke("region", "max", "--r", "5", "--k", "2")
    assert a.output == b.output


def test_output_files(tmp_path):
    out = tmp_path / "tent.json"
    res = invoke("tent", "make", "--r", "4", "--i", "2", "-o", str(out))
    assert res.exit_code == 0
    assert json.loads(out.read_text())["r"] == 4


# -- exit codes through the real entry point -------------------------------


def test_exit_code_success():
    proc = run_main("tent", "make", "--r", "4", "--i", "1")
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["r"] == 4


def test_exit_code_verification_failure(tmp_path):
    cert = tmp_path / "cert.json"
    run_main("region", "counterexample", "--r", "6", "--k", "1",
             "--certificate", str(cert))
    d = json.loads(cert.read_text())
    d["evidence"]["value"] += 0.5
    cert.write_text(json.dumps(d))
    proc = run_main("verify", str(cert))
    assert proc.returncode == 1


def test_exit_code_budget_exhaustion(tmp_path):
    src = tmp_path / "src.json"
    src.write_text(make_tent(3, 1).to_json())
    host = tmp_path / "host.json"
    host.write_text(make_turan_graph(3, 9).to_json())
    proc = run_main("--timeout", "1e-9", "hom", "check", str(src), str(host))
    assert proc.returncode == 2


def test_exit_code_bad_input(tmp_path):
    proc = run_main("tent", "make", "--r", "4")  # neither --i nor --lam
    assert proc.returncode == 3
    proc = run_main("lagrangian", str(tmp_path / "missing.json"))
    assert proc.returncode == 3
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    proc = run_main("lagrangian", str(bad))
    assert proc.returncode == 3
