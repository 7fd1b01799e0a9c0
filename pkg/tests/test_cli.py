import math

import pytest

from zenodisc import cli, protocol
from zenodisc.cli import parse_config, render_csv, render_summary, run_sweep
from zenodisc.protocol import Mode
from zenodisc.qcore import DegenerateBranchError, ValidationError

FIXTURE = """\
# headline fixture
b=10
delta=0.01,0.001
dt=auto
k=1,5,20
xi=0.5
mode=both
"""


# ---------------------------------------------------------------- parsing

def test_parse_config_grid_sizes():
    cfg = parse_config("delta=0.01,0.001\nk=1,5\nb=10\nxi=0.5\nmode=both")
    assert cfg.delta == (0.01, 0.001)
    assert cfg.k == (1, 5)
    assert cfg.b == (10.0,)
    assert cfg.modes == (Mode.EXACT, Mode.PAPER)
    assert len(run_sweep(cfg)) == 2 * 2 * 1 * 1 * 2  # 4 tuples, two ledgers


def test_parse_config_auto_dt_solves_per_point():
    cfg = parse_config("b=10\ndelta=0.001\ndt=auto\nk=2\nxi=0.5")
    rows = run_sweep(cfg)
    assert len(rows) == 1
    row = rows[0]
    assert row.dt == pytest.approx(row.b / (2 * row.k * row.a), abs=1e-15)


def test_parse_config_errors_carry_line_numbers():
    with pytest.raises(ValidationError, match="line 2.*xi"):
        parse_config("b=10\nxi=1.5\ndelta=0.01")
    with pytest.raises(ValidationError, match="line 1.*unknown key"):
        parse_config("frobnicate=3\nb=10\ndelta=0.01")
    with pytest.raises(ValidationError, match="line 3.*key=value"):
        parse_config("b=10\ndelta=0.01\njusttext")
    with pytest.raises(ValidationError, match="line 2.*duplicate"):
        parse_config("b=10\nb=11\ndelta=0.01")
    with pytest.raises(ValidationError, match="empty value"):
        parse_config("b=10\ndelta=\nxi=0.5")


def test_parse_config_parameterization_rules():
    with pytest.raises(ValidationError, match="exactly one of 'a' or 'b'"):
        parse_config("a=0.9\nb=10\ndelta=0.01")
    with pytest.raises(ValidationError, match="exactly one of 'a' or 'b'"):
        parse_config("delta=0.01")
    with pytest.raises(ValidationError, match="mix 'auto'"):
        parse_config("b=10\ndelta=0.01\ndt=auto,1.0")


# ------------------------------------------------------------------ sweeps

def test_run_sweep_single_point_single_row():
    cfg = parse_config("b=10\ndelta=0.001\ndt=1.0\nk=3\nxi=0.5")
    rows = run_sweep(cfg)
    assert len(rows) == 1
    assert rows[0].mode == "exact"
    assert rows[0].error == ""


def test_run_sweep_records_failures_as_rows():
    # b * delta > 1 at the larger delta: that point fails, sweep continues.
    cfg = parse_config("b=10\ndelta=0.2,0.001\ndt=1.0\nk=1\nxi=0.5")
    rows = run_sweep(cfg)
    assert len(rows) == 2
    errors = [r for r in rows if r.error]
    assert len(errors) == 1
    assert "exceeds 1" in errors[0].error
    assert errors[0].delta == 0.2


def test_run_sweep_is_deterministic_and_sorted():
    cfg = parse_config(FIXTURE)
    rows1 = run_sweep(cfg)
    rows2 = run_sweep(cfg)
    assert rows1 == rows2
    keys = [(r.delta, r.dt, r.k, r.mode) for r in rows1]
    assert keys == sorted(keys)


def test_run_sweep_fixture_paper_total_matches_reduction_identity():
    cfg = parse_config(FIXTURE)
    rows = run_sweep(cfg)
    target = [r for r in rows if r.mode == "paper" and r.k == 5 and r.delta == 0.001]
    assert len(target) == 1
    row = target[0]
    original = row.a**2 * row.k**2 * row.dt**2 * row.delta**2
    assert row.total_cost == pytest.approx(original / (4 * row.k), rel=1e-4)
    # Every exact row respects the optimality floor.
    for r in rows:
        if r.mode == "exact" and not r.error:
            assert r.verdict_vs_baseline_exact >= -1e-10


# ------------------------------------------------------------------ output

def test_render_csv_shape():
    cfg = parse_config("b=10\ndelta=0.001\ndt=1.0\nk=1\nxi=0.5")
    text = render_csv(run_sweep(cfg))
    lines = text.split("\n")
    assert lines[0] == ",".join(cli.CSV_COLUMNS)
    assert len(lines) == 3 and lines[2] == ""  # header + row + trailing LF
    assert "\r" not in text


def test_render_summary_mentions_baselines_and_flags():
    cfg = parse_config(FIXTURE)
    text = render_summary(run_sweep(cfg))
    assert "baseline_exact" in text and "baseline_paper" in text
    assert "baseline exact/paper" in text
    assert "overlap_k_paper" in text and "survival_k_paper" in text
    assert "exact-ledger sanity" in text and "paper-ledger claim" in text


def test_emit_report_round_trips_bytes(tmp_path):
    cfg = parse_config("b=10\ndelta=0.01\ndt=auto\nk=2\nxi=0.5\nmode=both")
    rows = run_sweep(cfg)
    first = cli.emit_report(rows, str(tmp_path / "one"))
    second = cli.emit_report(rows, str(tmp_path / "two"))
    assert first[0].read_bytes() == second[0].read_bytes()
    assert first[1].read_bytes() == second[1].read_bytes()


# ---------------------------------------------------------------- optimize

def test_optimize_prefers_large_k_under_cancellation_spacing():
    # With dt bound to b/(2ka), the idealized total scales as 1/k, so the
    # largest admitted k wins.
    cfg = parse_config("b=10\ndelta=0.001\ndt=auto\nk=" +
                       ",".join(str(i) for i in range(1, 21)) + "\nxi=0.5\nmode=paper")
    params, row = cli.optimize(cfg, Mode.PAPER)
    assert params.k == 20
    assert row.total_cost == pytest.approx((10 * 0.001) ** 2 / (16 * 20), rel=1e-3)


def test_optimize_single_point_returns_it():
    cfg = parse_config("b=10\ndelta=0.001\ndt=0.7\nk=4\nxi=0.5\nmode=exact")
    params, row = cli.optimize(cfg, Mode.EXACT)
    assert params.k == 4 and params.dt == 0.7
    assert row.total_cost >= row.baseline_exact - 1e-10


def test_optimize_refines_dt_on_a_bracket():
    # Idealized cost grows with both k and dt here, so the smallest corner
    # of the search region is optimal and golden refinement must not lose it.
    cfg = parse_config("b=10\ndelta=0.001\ndt=0.2,5.0\nk=1,2\nxi=0.5\nmode=paper")
    params, row = cli.optimize(cfg, Mode.PAPER)
    assert params.k == 1
    assert params.dt == pytest.approx(0.2, abs=1e-6)
    grid_costs = [protocol.run(cli._point_params(cfg, 10.0, 0.001, dt, k, 0.5, Mode.PAPER)).total_cost
                  for dt in (0.2, 5.0) for k in (1, 2)]
    assert row.total_cost <= min(grid_costs) + 1e-18


def test_optimize_validates_grids():
    cfg = parse_config("b=10\ndelta=0.01,0.001\ndt=auto\nk=1\nxi=0.5")
    with pytest.raises(ValidationError, match="single value"):
        cli.optimize(cfg, Mode.EXACT)


# ------------------------------------------------------------ main / exits

def test_main_baseline_prints_both_conventions(capsys):
    code = cli.main(["baseline", "--b", "10", "--delta", "0.01", "--xi", "0.5"])
    out = capsys.readouterr().out
    assert code == 0
    values = {}
    for line in out.strip().splitlines():
        key, _, val = line.partition("=")
        values[key.strip()] = float(val)
    assert values["baseline_paper"] == pytest.approx(0.0025062814466900174, abs=1e-16)
    assert values["baseline_exact"] == pytest.approx(
        0.5 * (1 - math.sqrt(1 - 0.01**2)), abs=1e-15)
    assert values["guess_only_cost"] == 0.5


def test_main_run_both_modes(capsys):
    code = cli.main(["run", "--b", "10", "--delta", "0.001", "--k", "3",
                     "--dt", "auto", "--xi", "0.5", "--mode", "both"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("total_cost") == 2
    assert "mode=exact" in out and "mode=paper" in out


def test_main_sweep_writes_files(tmp_path, capsys):
    cfg_path = tmp_path / "fix.cfg"
    cfg_path.write_text(FIXTURE)
    out_prefix = tmp_path / "res"
    code = cli.main(["sweep", "--config", str(cfg_path), "--out", str(out_prefix), "--quiet"])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert (tmp_path / "res.csv").exists() and (tmp_path / "res.txt").exists()


def test_main_scaling_reports_exponents(tmp_path, capsys):
    cfg_path = tmp_path / "scal.cfg"
    cfg_path.write_text("b=10\ndelta=0.01,0.0031622776601683794,0.001\ndt=auto\nk=5\nxi=0.5\n")
    code = cli.main(["scaling", "--config", str(cfg_path), "--quantity", "final_overlap"])
    out = capsys.readouterr().out
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("quantity,")
    fields = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert fields["quantity"] == "final_overlap"
    assert 1.8 <= float(fields["exponent"]) <= 2.2
    assert fields["flag"] == "overlap_k_paper"  # verbatim-formula marker


def test_main_scaling_rejects_short_grid(tmp_path, capsys):
    cfg_path = tmp_path / "scal.cfg"
    cfg_path.write_text("b=10\ndelta=0.01,0.001\ndt=auto\nk=5\nxi=0.5\n")
    code = cli.main(["scaling", "--config", str(cfg_path)])
    assert code == 1
    assert "at least 3" in capsys.readouterr().err


def test_main_validation_failures_exit_one(tmp_path, capsys):
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text("b=10\nxi=1.5\ndelta=0.01\n")
    assert cli.main(["sweep", "--config", str(cfg_path)]) == 1
    assert "xi=1.5" in capsys.readouterr().err
    assert cli.main(["baseline", "--delta", "0.01"]) == 1  # neither a nor b
    assert cli.main(["nonsense"]) == 1


def test_main_numerical_failure_exits_two(monkeypatch, capsys):
    def boom(params, initial_pair=None):
        raise DegenerateBranchError("forced for the exit-code contract")

    monkeypatch.setattr(protocol, "run", boom)
    code = cli.main(["run", "--b", "10", "--delta", "0.001", "--k", "1", "--dt", "1.0"])
    assert code == 2
    assert "numerical failure" in capsys.readouterr().err


def test_main_quiet_silences_stdout(capsys):
    code = cli.main(["baseline", "--b", "10", "--delta", "0.01", "--quiet"])
    assert code == 0
    assert capsys.readouterr().out == ""
