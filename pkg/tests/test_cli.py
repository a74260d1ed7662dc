import math

import pytest

from vlc_secrecy import cli, experiments
from vlc_secrecy.bounds import Scenario, weighted_bounds
from vlc_secrecy.channel import db_to_linear, default_sigma, make_ratio_link


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gap_table(capsys):
    code, out, _ = run(capsys, "gap-table", "--scenario", "avg", "--xi", "0.5",
                       "--ratios", "10,100,1000", "--p-db", "30:80:10")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "p_db,ratio_10,ratio_100,ratio_1000" and len(lines) == 7


def test_bounds_matches_library(capsys):
    code, out, _ = run(capsys, "bounds", "--scenario", "peak", "--a-db", "25", "--p-db", "25",
                       "--xi", "0.5", "--ratio-db", "30", "--scheme", "us", "--m", "8")
    assert code == 0
    row = experiments.parse_csv(out)[0]
    p = db_to_linear(25)
    ref = weighted_bounds(make_ratio_link(1000.0, 8, default_sigma()), [1 / 8] * 8, Scenario.peak(p, 0.5, p))
    assert row.lower == ref.lower and row.upper == ref.upper


def test_bounds_bits(capsys):
    _, nats, _ = run(capsys, "bounds", "--p-db", "20")
    _, bits, _ = run(capsys, "bounds", "--p-db", "20", "--bits")
    a, b = experiments.parse_csv(nats)[0], experiments.parse_csv(bits)[0]
    assert b.lower == pytest.approx(a.lower / math.log(2), rel=1e-15)


def test_bounds_explicit_gains(capsys):
    code, out, _ = run(capsys, "bounds", "--h-b", "1,1", "--h-e", "0.1,2", "--scheme", "cas,gs")
    assert code == 0 and len(experiments.parse_csv(out)) == 2
    assert run(capsys, "bounds", "--h-b", "1,1")[0] == 1
    assert run(capsys, "bounds", "--h-e", "1,1")[0] == 1
    # every LED zero-rate: CAS undefined -> domain error
    assert run(capsys, "bounds", "--h-b", "1", "--h-e", "2", "--scheme", "cas")[0] == 2


def test_sample_report_and_determinism(capsys):
    code, out, _ = run(capsys, "sample", "--scheme", "us", "--m", "8", "--draws", "1000", "--seed", "7")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "led,prob,count,freq" and len(lines) == 9
    assert sum(int(l.split(",")[2]) for l in lines[1:]) == 1000
    assert run(capsys, "sample", "--scheme", "us", "--m", "8", "--draws", "1000", "--seed", "7")[1] == out
    assert run(capsys, "sample", "--scheme", "us", "--m", "8", "--draws", "1000", "--seed", "8")[1] != out


def test_default_seed_is_fixed(capsys):
    a = run(capsys, "sample", "--h-b", "3,2,1", "--h-e", "1,1,1", "--scheme", "cas")[1]
    b = run(capsys, "sample", "--h-b", "3,2,1", "--h-e", "1,1,1", "--scheme", "cas",
            "--seed", str(cli.DEFAULT_SEED))[1]
    assert a == b and a.splitlines()[3].split(",")[2] == "0"


def test_sweep_and_plot(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep", "--sweep", "xi", "--range", "0.1:0.9:0.2", "--scheme", "us,gs",
                       "--scenario", "peak", "--out", str(tmp_path / "s.csv"), "--plot", str(tmp_path / "s.svg"))
    assert code == 0 and out == ""
    assert len(experiments.read_csv(tmp_path / "s.csv")) == 10
    assert (tmp_path / "s.svg").read_text().startswith("<svg")


def test_sweep_spec_file(capsys, tmp_path):
    (tmp_path / "s.cfg").write_text("sweep = p_db\nrange = 0:20:10\nschemes = us\n")
    code, out, _ = run(capsys, "sweep", "--spec", str(tmp_path / "s.cfg"))
    assert code == 0 and len(experiments.parse_csv(out)) == 3
    (tmp_path / "p.cfg").write_text("grid = 3x3\n")
    assert run(capsys, "sweep", "--spec", str(tmp_path / "p.cfg"))[0] == 1
    assert run(capsys, "plane", "--spec", str(tmp_path / "s.cfg"))[0] == 1
    code, out, _ = run(capsys, "plane", "--spec", str(tmp_path / "p.cfg"))
    assert code == 0 and len(experiments.parse_csv(out)) == 19 * 3


def test_plane_inline(capsys):
    code, out, _ = run(capsys, "plane", "--grid", "5x4", "--xi-range", "0.2:0.4:0.2", "--scenario", "peak")
    assert code == 0 and len(experiments.parse_csv(out)) == 6


def test_selfcheck(capsys):
    code, out, _ = run(capsys, "selfcheck")
    assert code == 0 and out.splitlines()[-1] == "118/118 checks passed"


def test_selfcheck_failure_exits_2(capsys, monkeypatch):
    from vlc_secrecy import oracles
    monkeypatch.setattr(oracles, "selfcheck", lambda: [oracles.Check("x", False, "forced")])
    code, out, _ = run(capsys, "selfcheck")
    assert code == 2 and out.startswith("FAIL x")


@pytest.mark.parametrize("argv", [["bogus"], ["bounds", "--nope"], [], ["sweep"],
                                  ["bounds", "--xi", "abc"], ["bounds", "--scenario", "mid"],
                                  ["sweep", "--range", "1:2"], ["sweep", "--spec", "/nonexistent.cfg"]])
def test_config_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err


def test_usage_on_unknown_flag(capsys):
    code, _, err = run(capsys, "bounds", "--nope")
    assert code == 1 and "usage:" in err


@pytest.mark.parametrize("argv", [["bounds", "--xi", "1.5"], ["bounds", "--scenario", "peak", "--a-db", "0"],
                                  ["bounds", "--ratio-db", "30", "--m", "0"]])
def test_domain_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_out_write_failure(capsys, tmp_path):
    assert run(capsys, "bounds", "--out", str(tmp_path / "missing" / "x.csv"))[0] == 1
