import csv

import pytest

from fracext import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_single_mode(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--lam", "2", "--y-list", "1,4", "--out", str(tmp_path))
    assert code == 0
    assert out.count("PASS mode") == 3
    rows = list(csv.DictReader((tmp_path / "mode.csv").open()))
    assert [r["Y"] for r in rows] == ["1.0", "4.0", "inf"]


def test_solve_norms_and_stability(tmp_path, capsys):
    code, out, _ = run(capsys, "solve", "--beta", "0.3", "--s", "2", "--y-list", "1,2", "--out", str(tmp_path))
    assert code == 0 and "PASS stability" in out
    assert (tmp_path / "solve.csv").exists()


def test_truncation_study_outputs(tmp_path, capsys):
    code, out, _ = run(capsys, "truncation-study", "--y-list", "1,2,4,8", "--out", str(tmp_path))
    assert code == 0 and out.startswith("PASS truncation-study")
    for name in ("truncation.csv", "fit.csv", "truncation.svg"):
        assert (tmp_path / name).exists()


def test_format_csv_only(tmp_path, capsys):
    code, _, _ = run(capsys, "truncation-study", "--y-list", "1,2,4,8", "--format", "csv", "--out", str(tmp_path))
    assert code == 0
    assert not (tmp_path / "truncation.svg").exists()


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# study setup\nbeta = 0.75\ns = 0\ny-list = 1,2,4,8\nout = " + str(tmp_path / "cfg") + "\n")
    code, out, _ = run(capsys, "truncation-study", "--config", str(cfg))
    assert code == 0 and "mu=0.5" in out  # s = 0 gives 1 + alpha
    code, out, _ = run(capsys, "truncation-study", "--config", str(cfg), "--beta", "0.25", "--s", "1")
    assert code == 0 and "mu=1.5" in out  # beta = 1/4 with s > 0 also gives 1 + |alpha| = 1.5
    code, out, _ = run(capsys, "truncation-study", "--config", str(cfg), "--s", "1")
    assert code == 0 and "mu=1.5" in out
    opts = cli.resolve(cli.build_parser().parse_args(["solve", "--config", str(cfg), "--beta", "0.6"]))
    assert opts["beta"] == 0.6 and opts["s"] == 0.0 and opts["y_list"] == (1, 2, 4, 8)


def test_cauchy_and_regularity(tmp_path, capsys):
    code, out, _ = run(capsys, "cauchy-study", "--n-max", "4", "--out", str(tmp_path))
    assert code == 0 and "PASS cauchy-study" in out
    assert (tmp_path / "cauchy.csv").exists() and (tmp_path / "cauchy.svg").exists()
    code, out, _ = run(capsys, "regularity-probe", "--ell-max", "4", "--out", str(tmp_path))
    assert code == 0 and "PASS regularity-probe" in out
    assert len(list(csv.DictReader((tmp_path / "regularity.csv").open()))) == 5


def test_inequality_suite(tmp_path, capsys):
    code, out, _ = run(capsys, "inequality-suite", "--trials", "100", "--seed", "7", "--out", str(tmp_path))
    assert code == 0
    assert out.count("PASS") == len(out.strip().splitlines())
    first = (tmp_path / "inequalities.csv").read_text()
    run(capsys, "inequality-suite", "--trials", "100", "--seed", "7", "--out", str(tmp_path))
    assert (tmp_path / "inequalities.csv").read_text() == first


def test_failing_verdict_exit_code(tmp_path, capsys, monkeypatch):
    import fracext.lab as lab

    monkeypatch.setitem(lab.TRIALS, "trace", lambda rng: 2.0)
    code, out, _ = run(capsys, "inequality-suite", "--trials", "100", "--out", str(tmp_path))
    assert code == 1 and "FAIL trace" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "--beta", "1.2"],
        ["solve", "--s", "-1"],
        ["solve", "--s", "0", "--dim", "2"],
        ["bogus"],
        ["solve", "--y-list", "1,-2"],
        ["inequality-suite", "--trials", "10"],
        ["cauchy-study", "--n-max", "2"],
        [],
    ],
)
def test_usage_errors(argv, capsys, tmp_path):
    code, _, _ = run(capsys, *argv, *(["--out", str(tmp_path)] if argv and argv[0] != "bogus" else []))
    assert code == 2


def test_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    code, _, err = run(capsys, "solve", "--config", str(bad))
    assert code == 2 and "unknown key" in err
    bad.write_text("beta = half\n")
    assert run(capsys, "solve", "--config", str(bad))[0] == 2
    assert run(capsys, "solve", "--config", str(tmp_path / "nope.cfg"))[0] == 2


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "f"
    blocker.write_text("x")
    code, _, err = run(capsys, "truncation-study", "--y-list", "1,2,4,8", "--out", str(blocker / "d"))
    assert code == 2 and "cannot write" in err


def test_help_exits_cleanly(capsys):
    assert cli.main(["--help"]) == 0
