import csv
import io
import json
import math

import pytest

from zetalab.cli import RunConfig, UsageError, main, parse_args


def run(*argv, timestamp="fixed"):
    buf = io.StringIO()
    code = main(list(argv), out=buf, timestamp=timestamp)
    return code, buf.getvalue()


def data_lines(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


def rows(text):
    return list(csv.DictReader(io.StringIO("\n".join(data_lines(text)))))


def summary(text):
    line = [l for l in text.splitlines() if l.startswith("# summary ")][-1]
    return json.loads(line[len("# summary "):])


def test_eval_first_zero():
    code, out = run("eval", "--fn", "hardy-z", "--t", "14.1347251417")
    assert code == 0
    (row,) = rows(out)
    assert abs(float(row["re"])) < 1e-6


def test_eval_zeta_two():
    code, out = run("eval", "--fn", "zeta", "--sigma", "2", "--t", "0")
    assert code == 0
    assert abs(float(rows(out)[0]["re"]) - math.pi**2 / 6) < 1e-12


def test_eval_several_points_and_functions():
    for fn in ("theta", "s", "s1"):
        code, out = run("eval", "--fn", fn, "--t", "20,30.5,40")
        assert code == 0 and len(rows(out)) == 3


def test_usage_errors_exit_2(capsys):
    assert run("eval", "--bogus")[0] == 2
    assert run("nosuch")[0] == 2
    assert run("eval", "--fn", "zeta", "--t", "abc")[0] == 2
    assert run("ladder", "--T", "5", "--k", "1")[0] == 2
    assert run("eval", "--fn", "zeta", "--sigma", "1", "--t", "0")[0] == 2
    assert run("chain", "--family", "unit:x", "--backend", "synthetic", "--cbar", "0.7")[0] == 2
    assert run("eval", "--fn", "zeta", "--t", "1", "--precision", "-1")[0] == 2
    capsys.readouterr()


def test_numeric_failure_exit_1(capsys):
    assert run("eval", "--fn", "zeta", "--t", "1e12")[0] == 1
    # S is undefined on a zero of zeta, which is a domain error
    assert run("eval", "--fn", "s", "--t", "14.134725141734693")[0] == 2
    capsys.readouterr()


def test_ladder_asymptotic():
    code, out = run("ladder", "--T", "1e4", "--k", "5", "--mode", "asymptotic")
    assert code == 0
    r = rows(out)
    assert len(r) == 6 and sum(1 for row in r if row["increment"]) == 5
    Ts = [float(row["T"]) for row in r]
    assert all(b > a for a, b in zip(Ts, Ts[1:]))
    assert summary(out)["increasing"] is True


def test_ladder_k0():
    code, out = run("ladder", "--T", "1e4", "--k", "0")
    assert code == 0
    assert [float(row["T"]) for row in rows(out)] == [1e4]


def test_ladder_quadrature_segment():
    code, out = run("ladder", "--T", "1e3", "--k", "1", "--mode", "quadrature")
    assert code == 0
    seg = float(rows(out)[1]["segment"])
    assert abs(seg / (0.4227843351 * 1e3) - 1) < 0.10


def test_functional_synthetic_grid():
    code, out = run("functional", "--kind", "prod3", "--x", "1", "--tau-grid", "1e3,2e3,4e3",
                    "--backend", "synthetic")
    assert code == 0
    assert [float(r["estimate"]) for r in rows(out)] == pytest.approx([1.0] * 3, abs=1e-12)


def test_functional_real_examples():
    code, out = run("functional", "--kind", "dprod", "--family", "unit:2", "--x", "0.728", "--tau", "500")
    assert code == 0
    assert abs(float(rows(out)[0]["estimate"]) - 0.728) < 0.05 * 0.728
    code, out = run("functional", "--kind", "divisor", "--x", "1", "--tau", "1e4")
    assert code == 0
    assert abs(float(rows(out)[0]["estimate"]) - 1) < 0.25


def test_scan_small():
    code, out = run("scan", "--x-max", "10", "--y-max", "10", "--z-max", "10", "--n-max", "5", "--cbar", "0.7")
    assert code == 0
    r = rows(out)
    assert len(r) == 10 * 10 * 10 * 3
    row = next(x for x in r if (x["x"], x["y"], x["z"], x["n"]) == ("3", "4", "5", "3"))
    assert row["exact"] == "91/125"
    for x in r:
        assert abs(float(x["estimate"]) - float(x["exact_float"])) <= 1e-12 * float(x["exact_float"])
    s = summary(out)
    assert s["fermat_equalities"] == 0 and s["predicate_held_everywhere"] is True


def test_chain_synthetic():
    code, out = run("chain", "--backend", "synthetic", "--cbar", "0.7", "--tau-grid", "1e3,1e4")
    assert code == 0
    for r in rows(out):
        for k in ("prod3/dprod", "prod3/divisor", "dprod/divisor"):
            assert abs(float(r[k]) - 1) < 1e-12


def test_json_format():
    code, out = run("eval", "--fn", "theta", "--t", "10,20", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "rows", "summary"}
    assert doc["config"]["command"] == "eval" and doc["config"]["timestamp"] == "fixed"
    assert len(doc["rows"]) == 2


def test_header_carries_config():
    code, out = run("eval", "--fn", "theta", "--t", "10", "--precision", "1e-9")
    header = json.loads(out.splitlines()[0][2:])
    assert header["precision"] == 1e-9 and header["params"]["t"] == [10.0]
    assert "workers" not in header


def test_timestamp_only_in_header():
    a = run("eval", "--fn", "theta", "--t", "10", timestamp="one")[1]
    b = run("eval", "--fn", "theta", "--t", "10", timestamp="two")[1]
    assert a != b
    assert a.splitlines()[1:] == b.splitlines()[1:]


def test_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# ladder settings\nT = 1e4\nk=2\nmode=asymptotic\n")
    code, out = run("ladder", "--config", str(path))
    assert code == 0 and len(rows(out)) == 3
    # flags on the command line override the file
    code, out = run("ladder", "--config", str(path), "--k", "1")
    assert len(rows(out)) == 2
    path.write_text("unknown_key=1\n")
    assert run("ladder", "--T", "1e4", "--config", str(path))[0] == 2
    path.write_text("T=1e4\nmode=exact\n")
    assert run("ladder", "--config", str(path))[0] == 2
    path.write_text("k=notanint\n")
    assert run("ladder", "--T", "1e4", "--config", str(path))[0] == 2
    assert run("ladder", "--T", "1e4", "--config", str(tmp_path / "missing"))[0] == 2


def test_env_cache_and_warm_cold(tmp_path, monkeypatch):
    cache = tmp_path / "store.tsv"
    monkeypatch.setenv("ZETALAB_CACHE", str(cache))
    argv = ("ladder", "--T", "300", "--k", "2", "--mode", "quadrature")
    cold = run(*argv)[1]
    assert cache.stat().st_size > 0
    warm = run(*argv)[1]
    assert data_lines(cold) == data_lines(warm)
    monkeypatch.delenv("ZETALAB_CACHE")
    uncached = run(*argv)[1]
    assert data_lines(uncached) == data_lines(cold)


def test_run_config_validation():
    cfg = parse_args(["eval", "--fn", "zeta", "--t", "1"])
    assert isinstance(cfg, RunConfig) and cfg.params["fn"] == "zeta"
    with pytest.raises(UsageError):
        RunConfig("eval", {}, workers=0)
    with pytest.raises(UsageError):
        RunConfig("eval", {}, format="xml")
