import csv
import io
import json
import math
import subprocess
import sys

import pytest

from riemann_holder.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def numeric_dicts_have_errors(obj):
    """Every dict holding a number (bools excluded) also holds est_error."""
    if isinstance(obj, dict):
        has_number = any(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj.values())
        if has_number and "est_error" not in obj:
            return False
        return all(numeric_dicts_have_errors(v) for v in obj.values())
    if isinstance(obj, list):
        return all(not isinstance(v, (int, float)) or isinstance(v, bool) for v in obj) and all(
            numeric_dicts_have_errors(v) for v in obj
        )
    return True


def test_gauss_sum_three(capsys):
    out = run_json(capsys, "gauss-sum", "3", "1")
    assert out["exact"] == "i*sqrt(3)"
    assert abs(out["value"]["re"]) < 1e-14 and abs(out["value"]["im"] - math.sqrt(3)) < 1e-14
    assert numeric_dicts_have_errors(out)


def test_gauss_sum_zero(capsys):
    assert run_json(capsys, "gauss-sum", "2", "1")["exact"] == "0"


def test_gauss_sum_general(capsys):
    out = run_json(capsys, "gauss-sum", "3", "1", "--m", "1", "--brute")
    assert abs(out["value"]["re"] - 1.5) < 1e-12 and abs(out["value"]["im"] + 0.8660254) < 1e-7
    assert abs(out["brute"]["re"] - 1.5) < 1e-12


def test_gauss_sum_invalid(capsys):
    code, _, err = run(capsys, "gauss-sum", "4", "2")
    assert code == 2 and "gcd" in err


def test_alpha_predict_only(capsys):
    assert run_json(capsys, "alpha", "quad:0,1,(1)", "--predict-only")["predicted"]["value"] == 0.75
    assert run_json(capsys, "alpha", "rat:1/3", "--predict-only")["predicted"]["value"] == 0.5


def test_alpha_detrended_one_half(capsys):
    out = run_json(capsys, "alpha", "rat:1/2", "--detrend")
    assert abs(out["fitted_detrended"]["value"] - 1.5) < 0.1
    assert numeric_dicts_have_errors(out)


def test_alpha_csv(capsys):
    code, out, _ = run(capsys, "alpha", "rat:1/3", "--h-min", "1e-4", "--per-decade", "3", "--csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["h", "abs_increment", "re", "im", "est_error"]
    hs = [abs(float(r[0])) for r in rows[1:]]
    assert len(hs) == 14 and hs == sorted(hs, reverse=True)


def test_alpha_degenerate_is_usage_error(capsys):
    code, _, err = run(capsys, "alpha", "rat:1/3", "--h-min", "1e-3", "--h-max", "2e-3", "--per-decade", "1")
    assert code == 2 and "degenerate" in err


def test_precision_shortfall_exit_code(capsys):
    code, _, err = run(capsys, "phi", "0.3", "--h", "1e-40")
    assert code == 4 and "55" in err


def test_bad_config_and_spec(capsys):
    assert run(capsys, "--precision", "10", "cf", "rat:1/3")[0] == 2
    assert run(capsys, "--precision", "20", "--tol", "1e-30", "cf", "rat:1/3")[0] == 2
    assert run(capsys, "cf", "foo:1")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_global_options_after_subcommand(capsys):
    code, out, _ = run(capsys, "verify", "contfrac", "--output", "text")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines and all(line.startswith("PASS ") for line in lines)


def test_theta_phi_expand_cf(capsys):
    th = run_json(capsys, "theta", "0", "0.5")
    assert abs(th["value"]["re"] - 1.086434811213308) < 1e-10
    ph = run_json(capsys, "phi", "0.5", "--h", "0.0001")
    assert abs(ph["increment"]["re"] + 5e-5) < 3e-6
    ex = run_json(capsys, "expand", "1/4", "--h", "0.001", "--K", "2")
    assert numeric_dicts_have_errors(ex)
    cf = run_json(capsys, "cf", "rat:3/4")
    assert [(int(c["p"]), int(c["q"])) for c in cf["convergents"]] == [(1, 1), (3, 4)]
    for obj in (th, ph, cf):
        assert numeric_dicts_have_errors(obj)


def test_repeated_runs_byte_identical():
    argv = [sys.executable, "-m", "riemann_holder.cli", "phi", "0.3", "--h", "0.001"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a


@pytest.mark.parametrize("fmt", ["json", "text"])
def test_output_formats(capsys, fmt):
    code, out, _ = run(capsys, "--output", fmt, "gauss-sum", "5", "2")
    assert code == 0 and out.strip()


def test_csv_only_for_grids(capsys):
    code, _, err = run(capsys, "--output", "csv", "gauss-sum", "5", "2")
    assert code == 2 and "grid" in err
    code, out, _ = run(capsys, "--output", "csv", "phi", "0.5", "--h", "0.0001")
    assert code == 0 and out.startswith("h,abs_increment,re,im,est_error\n")
