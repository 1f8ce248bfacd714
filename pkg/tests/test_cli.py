import json

import pytest

from multitw.cli import config_hash, main


def _run(capsys, argv):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def _body(out):
    return "\n".join(line for line in out.splitlines() if not line.startswith("#"))


def test_lenard_print(capsys):
    code, out, _ = _run(capsys, ["lenard", "--kmax", "4", "--print"])
    assert code == 0
    assert out.startswith("# multitw ")
    k3 = [line for line in out.splitlines() if line.startswith("k=3 ")][0]
    assert "140*u^3*u'" in k3
    assert "L_2 = 1 * u^(2)^1 + 3 * u^(0)^2" in out


def test_lenard_json(capsys):
    code, out, _ = _run(capsys, ["lenard", "--kmax", "2", "--format", "json"])
    assert code == 0
    data = json.loads(_body(out))
    assert data["k_max"] == 2


def test_header_hash_and_determinism(capsys, tmp_path):
    argv = ["oracle", "fredholm", "--smin", "-1", "--smax", "0", "--step", "0.5", "--nodes", "30"]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["--out", str(f1)] + argv) == 0
    assert main(["--out", str(f2)] + argv) == 0
    t1 = f1.read_text()
    assert t1 == f2.read_text()
    cfg_line = [line for line in t1.splitlines() if line.startswith("# config ")][0]
    h, cfg = cfg_line.split(" ", 3)[2:]
    assert config_hash(json.loads(cfg)) == h
    rows = [line for line in t1.splitlines() if not line.startswith("#")]
    assert rows[0] == "s,F2,self_error" and len(rows) == 4


def test_finite_n_gap_scalar(capsys):
    code, out, _ = _run(capsys, ["finite-n", "gap", "--N", "1", "--y", "0.0"])
    assert code == 0
    assert float(_body(out)) == pytest.approx(0.5, abs=1e-12)


def test_finite_n_verify_json(capsys):
    code, out, _ = _run(capsys, ["finite-n", "verify", "--y", "1", "--nmax", "20"])
    assert code == 0
    rep = json.loads(_body(out))
    assert rep["recurrence"]["string1"] < 1e-10
    assert rep["lax"]["stringeqn"] < 1e-10


def test_gue_sample_reproducible(capsys):
    argv = ["gue", "sample", "--n", "5", "--samples", "2000", "--seed", "42", "--ystep", "0.5"]
    _, a, _ = _run(capsys, argv)
    _, b, _ = _run(capsys, argv)
    assert a == b
    assert _body(a).splitlines()[0] == "y,cdf,stderr"


def test_tw_csv_columns(capsys):
    code, out, _ = _run(capsys, ["tw", "--k", "1", "--smin", "-0.5", "--smax", "0", "--step", "0.05"])
    assert code == 0
    rows = _body(out).splitlines()
    assert rows[0] == "s,cdf,pdf,dlogp_i,dlogp_ii,newton_residual"
    assert len(rows) == 12
    last = [float(v) for v in rows[-1].split(",")]
    assert last[0] == 0.0 and last[1] == pytest.approx(0.9693728283552627, abs=1e-9)


def test_tw_coarse_grid_fails_cross_check(capsys):
    code, _, err = _run(capsys, ["tw", "--k", "1", "--smin", "-1", "--smax", "0", "--step", "0.25"])
    assert code == 4 and "CrossCheckFailed" in err


def test_p34_dump_grid(capsys):
    code, out, _ = _run(capsys, ["p34", "--k", "1", "--s", "0.5", "--dump-grid"])
    assert code == 0
    rec = json.loads(_body(out))
    assert rec["converged"] and len(rec["x"]) == len(rec["u"])
    assert rec["equation_residual"] < 1e-9


def test_backlund_report(capsys):
    code, out, _ = _run(capsys, ["backlund", "--k", "1", "--s", "0.0"])
    assert code == 0
    assert json.loads(_body(out))["residual_schrodinger"] < 1e-9


def test_exit_codes(capsys):
    assert _run(capsys, ["lenard", "--kmax", "-1"])[0] == 2
    assert _run(capsys, ["oracle", "fredholm", "--nodes", "4"])[0] == 2
    assert _run(capsys, ["p34", "--k", "2", "--s", "1.0"])[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_verify_all_quick(capsys):
    code, out, _ = _run(capsys, ["verify-all", "--quick"])
    assert code == 0
    assert "FAIL" not in out
    assert "failed 0" in out
