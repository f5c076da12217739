import csv
import io
import json
import subprocess
import sys

import pytest

from skellam_markov import LatticeMeasure, SkellamParams, exact_distribution
from skellam_markov.checks import poisson_convolution_pmf
from skellam_markov.cli import CommandError, main, parse_command
from skellam_markov.components import ChainParams


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_pmf():
    cmd = parse_command(["pmf", "--l1", "1", "--l2", "1", "--k", "0"])
    assert cmd.name == "pmf" and cmd.args.params == SkellamParams(1.0, 1.0) and cmd.args.k == 0


def test_pmf_output(capsys):
    code, out, _ = run(capsys, "pmf", "--l1", "1", "--l2", "1", "--k", "0")
    assert code == 0
    assert out.strip() == f"{poisson_convolution_pmf(1, 1, 0):.12g}"
    assert out.startswith("0.308508")


def test_unknown_subcommand(capsys):
    with pytest.raises(CommandError):
        parse_command(["frobnicate"])
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "frobnicate" in err


def test_constraint_error_cites_condition(capsys):
    code, _, err = run(capsys, "sweep", "--alpha", "0.5", "--beta", "0.02", "--n", "10")
    assert code == 3 and "0 ≤ α ≤ 1/30" in err
    with pytest.warns(UserWarning):
        code, out, _ = run(capsys, "compare", "--alpha", "0.1", "--beta", "0.02", "--n", "10", "--exploratory")
    assert code == 0


def test_fraction_arguments(capsys):
    code, out, _ = run(capsys, "exact", "--alpha", "1/30", "--beta", "1/40", "--n", "3")
    assert code == 0
    assert LatticeMeasure.from_json(out) == exact_distribution(ChainParams(1 / 30, 1 / 40), 3)


def test_compare_row(capsys):
    code, out, _ = run(capsys, "compare", "--alpha", "0.02", "--beta", "0.02", "--n", "256",
                       "--approx", "skellam", "--metric", "tv")
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert float(row["shape"]) == pytest.approx(1 / 256)
    assert float(row["ratio"]) == pytest.approx(float(row["lhs"]) * 256, rel=1e-15)


def test_build_and_approx_roundtrip(capsys, tmp_path):
    target = tmp_path / "k.json"
    code, _, _ = run(capsys, "build", "--alpha", "0.02", "--beta", "0.01", "--name", "k", "--out", str(target))
    assert code == 0
    K = LatticeMeasure.from_json(target.read_text())
    assert K.mass == pytest.approx(1, abs=1e-11)
    assert LatticeMeasure.from_json(K.to_json()) == K
    code, out, _ = run(capsys, "approx", "--alpha", "0.02", "--beta", "0.01", "--n", "30", "--approx", "expansion")
    assert code == 0 and LatticeMeasure.from_json(out).mass == pytest.approx(1, abs=1e-11)


def test_sweep_and_ratefit(capsys, tmp_path):
    sweep_csv = tmp_path / "rows.csv"
    code, _, _ = run(capsys, "sweep", "--alpha", "0.02", "--beta", "0.02", "--n", "128,256,512,1024",
                     "--metric", "tv,local", "--out", str(sweep_csv))
    assert code == 0
    code, out, _ = run(capsys, "ratefit", "--input", str(sweep_csv), "--metric", "tv")
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert -1.15 <= float(row["slope"]) <= -0.85


def test_sweep_grid_file_and_json(capsys, tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps([{"alpha": 0.01, "beta": 0.02, "n": 40}, {"alpha": 0.0, "beta": 0.03, "n": 50}]))
    code, out, _ = run(capsys, "sweep", "--grid", str(grid), "--format", "json", "--metric", "tv,w")
    assert code == 0
    data = json.loads(out)
    assert len(data) == 4 and data[0]["metric"] == "tv" and data[1]["metric"] == "wasserstein"


def test_sweep_error_rows_exit_nonzero(capsys):
    code, out, err = run(capsys, "sweep", "--alpha", "0.02", "--beta", "0.02", "--n", "20", "--metric", "lr:2")
    assert code == 1 and "1 of 1 rows failed" in err


def test_check_smoothing(capsys):
    code, out, _ = run(capsys, "check", "--suite", "smoothing", "--cases", "200", "--seed", "7")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())


def test_bad_flags(capsys):
    assert run(capsys, "pmf", "--l1", "x", "--l2", "1", "--k", "0")[0] == 2
    assert run(capsys, "pmf", "--l1", "-1", "--l2", "1", "--k", "0")[0] == 3
    assert run(capsys, "exact", "--alpha", "0.01", "--beta", "0.01", "--n", "-2")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "skellam_markov", "pmf", "--l1", "2", "--l2", "0", "--k", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and float(proc.stdout) == pytest.approx(2 * 2.718281828459045 ** -2)
