import json
from fractions import Fraction

import pytest

from dofsim import cli
from dofsim.doffit import fit_dof, power_grid_db, sweep
from dofsim.region import RegionPolygon
from dofsim.schemes import RatePair, SchemeConfig


def run(*argv):
    return cli.main([str(a) for a in argv])


def test_region_half(tmp_path):
    out = tmp_path / "r.json"
    assert run("region", "--alpha", "1/2", "--out", out) == 0
    poly = RegionPolygon.from_json(out.read_text())
    assert (Fraction(5, 6), Fraction(5, 6)) in poly.vertices
    assert [[5, 6], [5, 6]] in json.loads(out.read_text())["vertices"]


def test_region_zero_and_mimo(tmp_path, capsys):
    assert run("region", "--alpha", "0") == 0
    poly = RegionPolygon.from_json(capsys.readouterr().out)
    assert (Fraction(2, 3), Fraction(2, 3)) in poly.vertices
    assert run("region", "--alpha", "0.5", "--n-rx", "2") == 0
    poly = RegionPolygon.from_json(capsys.readouterr().out)
    assert (Fraction(5, 3), Fraction(5, 3)) in poly.vertices


@pytest.mark.parametrize("argv", [
    ("region", "--alpha", "2"),
    ("region", "--alpha", "abc"),
    ("region", "--alpha", "0.5", "--n-rx", "0"),
    ("bounds", "--m", "1", "--n", "2"),
    ("bounds", "--sigma2-grid", "0,0.5"),
    ("sweep", "--alpha", "0.5", "--points", "2"),
    ("sweep", "--alpha", "1.5", "--trials", "100"),
    ("sweep", "--alpha", "0.5", "--trials", "10"),
    ("sweep", "--scheme", "mimo", "--dims", "3,2"),
    ("sweep", "--scheme", "hk", "--dims", "4,2"),
    ("sweep", "--window", "6"),
    ("check", "--eps", "-1"),
    ("nosuch",),
    ("sweep", "--scheme", "bogus"),
])
def test_validation_exit_code(argv, capsys):
    assert run(*argv) == 1
    assert capsys.readouterr().err


def test_help_exits_zero():
    assert run("--help") == 0


def test_sweep_csv_deterministic_and_roundtrip(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("sweep", "--scheme", "hk", "--alpha", "0.5", "--trials", "300", "--seed", "7")
    assert run(*args, "--out", a) == 0
    assert run(*args, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    header = text.splitlines()[0]
    assert header == "scheme,alpha,P_dB,r1,se1,r2,se2"
    curve, fit, meta = cli.curve_from_csv(text)
    tmpl = SchemeConfig(0.5, 1.0, trials=300, seed=7)
    ref = sweep("hk", tmpl, power_grid_db())
    assert curve == ref
    assert fit == fit_dof(ref)
    assert [r.diagnostics for r in curve.points] == [r.diagnostics for r in ref.points]
    assert fit.slope1 == pytest.approx(1.0, abs=0.1)
    assert fit.slope2 == pytest.approx(0.5, abs=0.1)
    assert cli.curve_to_csv(curve, fit, meta) == text


def test_sweep_json_roundtrip(tmp_path):
    out = tmp_path / "c.json"
    assert run("sweep", "--scheme", "enhanced", "--alpha", "0.5", "--trials", "200",
               "--format", "json", "--out", out) == 0
    curve, fit, meta = cli.curve_from_json(out.read_text())
    assert cli.curve_to_json(curve, fit, meta) == out.read_text()
    assert meta["trials"] == 200


def test_sweep_enhanced_fit(tmp_path):
    out = tmp_path / "e.csv"
    assert run("sweep", "--scheme", "enhanced", "--alpha", "0.5", "--trials", "1000", "--out", out) == 0
    _, fit, _ = cli.curve_from_csv(out.read_text())
    assert fit.slope1 == pytest.approx(5 / 6, abs=0.1)


def test_seed_precedence(tmp_path, monkeypatch):
    conf = tmp_path / "c.ini"
    conf.write_text("scheme = zf\nalpha = 1/2\ntrials = 150\nseed = 5\n")
    monkeypatch.setenv("DOFSIM_SEED", "9")
    outs = {}
    for name, extra in [("cfg", ()), ("flag", ("--seed", "5")), ("env", None)]:
        out = tmp_path / f"{name}.csv"
        if extra is None:
            c2 = tmp_path / "c2.ini"
            c2.write_text("scheme = zf\nalpha = 1/2\ntrials = 150\n")
            assert run("--config", c2, "sweep", "--out", out) == 0
        else:
            assert run("--config", conf, "sweep", *extra, "--out", out) == 0
        outs[name] = cli.curve_from_csv(out.read_text())
    assert outs["cfg"][0].scheme == "zf"
    assert outs["cfg"][2]["seed"] == 5 and outs["flag"][2]["seed"] == 5
    assert outs["env"][2]["seed"] == 9
    # flag beats the config file
    out = tmp_path / "t.csv"
    assert run("--config", conf, "sweep", "--trials", "120", "--out", out) == 0
    assert cli.curve_from_csv(out.read_text())[2]["trials"] == 120


def test_bad_config(tmp_path):
    conf = tmp_path / "bad.ini"
    conf.write_text("nonsense_key = 1\n")
    assert run("--config", conf, "region") == 1
    assert run("--config", tmp_path / "missing.ini", "region") == 1


def test_threads_do_not_change_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("sweep", "--scheme", "mat", "--trials", "200")
    assert run(*args, "--out", a) == 0
    assert run(*args, "--threads", "4", "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bounds_small(tmp_path, capsys):
    out = tmp_path / "b.json"
    code = run("bounds", "--n", "2", "--m", "4", "--instances", "5", "--trials", "2000",
               "--sigma2-grid", "1,0.01", "--out", out)
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["passed"] == 10 and doc["failed"] == 0
    ones = [r for r in doc["rows"] if r["sigma2"] == 1.0]
    assert all(r["gap"] <= r["slack"] for r in ones)
    assert "sigma2=1: 5/5 pass" in capsys.readouterr().err


def test_bounds_failure_exit_code(tmp_path):
    # zero slack cannot absorb the omitted constants
    assert run("bounds", "--instances", "3", "--trials", "500", "--slack", "0",
               "--out", tmp_path / "b.json") == 2


def write_fake_curve(path, slope, alpha=0.5):
    grid = power_grid_db()
    import math

    pts = tuple(RatePair(r1=slope * math.log2(p), r2=slope * math.log2(p), se1=0.0, se2=0.0,
                         P=p, alpha=alpha) for p in grid)
    from dofsim.doffit import RateCurve

    path.write_text(cli.curve_to_csv(RateCurve("fake", alpha, pts)))


def test_check_fake_curve_fails(tmp_path, capsys):
    bad, good = tmp_path / "bad.csv", tmp_path / "good.csv"
    write_fake_curve(bad, 1.2)
    write_fake_curve(good, 0.8)
    assert run("check", "--input", good) == 0
    assert run("check", "--input", bad) == 2
    assert "FAIL" in capsys.readouterr().out
    # (0.85, 0.85) breaks 2 d1 + d2 <= 2.5 by 0.05; a 0.05 max-norm inflation allows 0.15
    edge = tmp_path / "edge.csv"
    write_fake_curve(edge, 0.85)
    assert run("check", "--input", edge, "--eps", "0") == 2
    assert run("check", "--input", edge, "--eps", "0.05") == 0


def test_check_handwritten_csv_without_footer(tmp_path):
    p = tmp_path / "hand.csv"
    p.write_text("scheme,alpha,P_dB,r1,se1,r2,se2\n"
                 "x,0.5,40,10,0,5,0\nx,0.5,60,16.6,0,8.3,0\nx,0.5,80,23.2,0,11.6,0\n")
    assert run("check", "--input", p) == 0
    p.write_text("scheme,alpha\nx,0.5\n")
    assert run("check", "--input", p) == 1


def test_check_runs_sweeps(capsys):
    code = run("check", "--scheme", "hk", "zf", "--alpha", "0", "1", "--trials", "300")
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("PASS") == 4


def test_write_atomic_leaves_no_temp(tmp_path):
    p = tmp_path / "x.txt"
    cli.write_atomic(p, "one")
    cli.write_atomic(p, "two")
    assert p.read_text() == "two"
    assert [f.name for f in tmp_path.iterdir()] == ["x.txt"]


def test_default_window_shrinks_to_short_grid(tmp_path, capsys):
    out = tmp_path / "c.csv"
    assert cli.main(["sweep", "--scheme", "zf", "--alpha", "0.5", "--points", "3",
                     "--trials", "200", "--out", str(out)]) == 0
    assert cli.main(["sweep", "--scheme", "zf", "--alpha", "0.5", "--points", "3",
                     "--window", "4", "--trials", "200"]) == 1


def test_unwritable_output_is_invalid_input(tmp_path, capsys):
    out = tmp_path / "missing" / "region.json"
    assert cli.main(["region", "--alpha", "1/2", "--out", str(out)]) == 1
    assert "error" in capsys.readouterr().err
