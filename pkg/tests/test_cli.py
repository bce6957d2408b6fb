import subprocess
import sys
from fractions import Fraction

import pytest

from eulertop import catalog
from eulertop.cli import (
    EXIT_INCONCLUSIVE,
    EXIT_INVALID,
    EXIT_OK,
    RunConfig,
    UsageError,
    main,
)
from eulertop.model import InertiaParams
from eulertop.perturbation import CrossProductSpec, PerturbedSystem, SemisphereSpec, dump_spec
from eulertop.polynomial import Poly3


@pytest.fixture
def spec_file(tmp_path):
    def write(system, name="spec.json"):
        path = tmp_path / name
        dump_spec(system, path)
        return str(path)

    return write


def test_moments_table(capsys):
    assert main(["moments", "4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "W(0,0) = 2pi" in out and "W(4,0) = 3pi/4" in out and "W(3,1) = 0" in out


def test_moments_csv(capsys, tmp_path):
    assert main(["moments", "2", "--format", "csv", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "moments.csv").read_text().splitlines()[1] == "0,0,2,6.283185307179586"


def test_analyze_example1(spec_file, capsys):
    params = InertiaParams(Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
    path = spec_file(PerturbedSystem(params, catalog.example1_field(1, 2), c=1))
    assert main(["analyze", "--spec", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "h*=1.2" in out  # alpha beta c^2 / (beta - alpha) = -6 / -5


def test_analyze_zero_is_inconclusive(spec_file, capsys):
    path = spec_file(PerturbedSystem(InertiaParams(3, 2, 1), CrossProductSpec(Poly3(), Poly3(), Poly3())))
    assert main(["analyze", "--spec", path]) == EXIT_INCONCLUSIVE
    assert "identically zero" in capsys.readouterr().out


def test_analyze_degree5_semisphere_bound(spec_file, capsys, tmp_path):
    import numpy as np

    rng = np.random.default_rng(4)
    spec = catalog.random_semisphere(rng, 5, 2)
    path = spec_file(PerturbedSystem(catalog.random_params(rng), spec))
    code = main(["analyze", "--spec", path, "--format", "csv", "--out", str(tmp_path / "o")])
    assert code in (EXIT_OK, EXIT_INCONCLUSIVE)
    rows = (tmp_path / "o" / "report.csv").read_text().splitlines()[1:]
    assert sum(r.split(",")[2] == "True" for r in rows) <= 2


def test_invalid_inputs(spec_file, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["analyze", "--spec", str(bad)]) == EXIT_INVALID
    assert main(["analyze", "--spec", str(tmp_path / "missing.json")]) == EXIT_INVALID
    semi = spec_file(PerturbedSystem(InertiaParams(3, 2, 1), SemisphereSpec(Poly3.parse("x1"), Poly3(), Poly3(), 1)))
    assert main(["analyze", "--spec", semi, "--c", "2"]) == EXIT_INVALID
    assert main(["frobnicate"]) == EXIT_INVALID
    assert main(["example", "example9"]) == EXIT_INVALID


def test_mu3_override_validated():
    cfg = RunConfig("analyze", mu3=Fraction(5, 2))
    sys_ = PerturbedSystem(InertiaParams(3, 2, 1), catalog.example2_field(1))
    with pytest.raises(UsageError):
        cfg.apply(sys_)  # mu3 = 5 makes x3 the middle axis
    new, c = RunConfig("analyze", mu3=Fraction(1, 2), c=Fraction(3)).apply(sys_)
    assert new.params.mu3 == Fraction(1, 2) and c == 3


def test_verify_skips_inadmissible(spec_file, capsys):
    params = InertiaParams(Fraction(1, 2), Fraction(1, 3), Fraction(1, 5))
    path = spec_file(PerturbedSystem(params, catalog.example1_field(1, 2), c=1))
    assert main(["verify", "--spec", path, "--epsilon", "1e-3"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[1].endswith("skipped: admissibility")


def test_verify_example2(spec_file, tmp_path, capsys):
    params, c, k = catalog.search_example2_parameters()
    path = spec_file(PerturbedSystem(params, catalog.example2_field(k), c=c))
    out_dir = tmp_path / "run"
    assert main(["verify", "--spec", path, "--epsilon", "5e-3,2.5e-3", "--out", str(out_dir)]) == EXIT_OK
    rows = (out_dir / "verification.csv").read_text().splitlines()
    assert len(rows) == 3
    for row in rows[1:]:
        fields = row.split(",")
        assert fields[4] == "1" and fields[5] == "attracting" and fields[7] == "ok"
        assert float(fields[6]) <= 1e-9
    assert len(list((out_dir / "trajectories").glob("*.csv"))) == 2


def test_out_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("EULERTOP_OUT", str(tmp_path / "env"))
    assert main(["moments", "2"]) == EXIT_OK
    assert (tmp_path / "env" / "moments.txt").exists()


@pytest.mark.parametrize("name", ["corollary-m3", "corollary-m5", "corollary-m4", "corollary-m7", "example1"])
def test_examples(name, capsys):
    assert main(["example", name]) == EXIT_OK


def test_example2_header(capsys):
    assert main(["example", "example2", "--epsilon", "5e-3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "reproduced" in out and "k=1/10" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "eulertop", "moments", "0"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "W(0,0) = 2pi"
