import json
from pathlib import Path

import pytest

from kmvertex.cli import main, run
from kmvertex.config import ConfigError, RunConfig, from_env, load, parse_config_text
from kmvertex.report import Record, Report, render

GOLDEN = Path(__file__).parent / "golden"


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_golden_cocycle_table(capsys):
    code, out, _ = _run(capsys, "verify", "cocycle", "--algebra", "A1", "--window", "2", "--no-timestamp")
    assert code == 0
    assert out == (GOLDEN / "cocycle_A1_w2.txt").read_text()


def test_cocycle_a2_example(capsys):
    code, out, _ = _run(capsys, "verify", "cocycle", "--algebra", "A2", "--window", "3", "--format", "json", "--no-timestamp")
    assert code == 0
    recs = json.loads(out)["records"]
    assert recs and all(r["passed"] for r in recs)


def test_torus_example_reports_node_count(capsys):
    code, out, _ = _run(capsys, "verify", "torus", "--algebra", "A1", "--sites", "3", "--modes", "2", "--level", "3",
                        "--format", "json", "--no-timestamp")
    assert code == 0
    central = [r["central_measured"] for r in json.loads(out)["records"] if r["central_measured"] is not None]
    assert central and all(c == 3 for c in central)


def test_coeffs_csv_row(capsys):
    code, out, _ = _run(capsys, "coeffs", "--lmax", "4", "--format", "csv")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "l1,m1,l2,m2,l3,m3,value"
    row = next(r for r in rows if r.startswith("1,0,1,0,2,0,"))
    assert row.startswith("1,0,1,0,2,0,0.8944271909")


def test_coeffs_json(capsys):
    code, out, _ = _run(capsys, "coeffs", "--lmax", "1", "--format", "json", "--no-timestamp")
    data = json.loads(out)
    assert {"l1", "m1", "l2", "m2", "l3", "m3", "value"} == set(data["coefficients"][0])


def test_json_is_deterministic(capsys):
    args = ("verify", "site", "--level", "2", "--modes", "1", "--momentum-window", "1", "--format", "json", "--no-timestamp")
    first = _run(capsys, *args)[1]
    assert first == _run(capsys, *args)[1]
    assert "timestamp" not in json.loads(first)["metadata"]


def test_timestamp_present_by_default(capsys):
    out = _run(capsys, "coeffs", "--lmax", "1", "--format", "json")[1]
    assert "timestamp" in json.loads(out)["metadata"]


def test_failing_record_gives_exit_one(capsys):
    code, out, _ = _run(capsys, "verify", "regularization")
    assert code == 1
    assert out.splitlines()[0].split() == ["eps", "delta_eps(0)", "coth(eps)", "zeta_assigned"]


def test_unknown_format_exits_two(capsys):
    code, _, err = _run(capsys, "verify", "cocycle", "--format", "xml")
    assert code == 2 and "format" in err


def test_bad_config_exits_two(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("level = seven\n")
    assert _run(capsys, "verify", "site", "--config", str(cfg))[0] == 2
    assert _run(capsys, "verify", "site", "--config", str(tmp_path / "missing.cfg"))[0] == 2
    assert _run(capsys, "verify", "site", "--algebra", "B2")[0] == 2


def test_unknown_subcommand_exits_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "klein-bottle"])
    assert exc.value.code == 2


def test_out_path(capsys, tmp_path):
    target = tmp_path / "coeffs.csv"
    code, out, _ = _run(capsys, "coeffs", "--lmax", "1", "--format", "csv", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("l1,m1")


def test_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nlevel = 5\nmodes = 1\nsites = 2\n")
    env = {"KMVERTEX_MODES": "2", "KMVERTEX_SITES": "4", "OTHER": "x"}
    c = load(str(cfg), {"sites": 6, "lmax": None}, environ=env)
    assert (c.level, c.modes, c.sites, c.lmax) == (5, 2, 6, RunConfig().lmax)


@pytest.mark.parametrize(
    "kw",
    [{"level": 0}, {"tol": 0.0}, {"sphere_tol": -1.0}, {"modes": 5, "level": 4}, {"grid": 2}, {"eps": "1,-1"},
     {"format": "yaml"}, {"surface": "klein"}, {"algebra": "G2"}],
)
def test_validation(kw):
    with pytest.raises(ConfigError):
        RunConfig(**kw).validate()


def test_config_parsing():
    assert parse_config_text("momentum-window = 3\ntimestamp = off") == {"momentum_window": 3, "timestamp": False}
    with pytest.raises(ConfigError):
        parse_config_text("no equals sign")
    with pytest.raises(ConfigError):
        parse_config_text("colour = red")
    assert from_env({"KMVERTEX_TOL": "1e-9"}) == {"tol": 1e-9}


def test_empty_report_json():
    data = json.loads(render(Report(metadata={"command": "x"}), "json"))
    assert data == {"metadata": {"command": "x"}, "records": []}


def test_record_pass_rules():
    assert not Record("r", "t", 0.0, 1.0).passed  # nothing checked
    assert not Record("r", "t", float("nan"), 1.0, n_checked=1).passed
    assert Record("r", "t", 0.5, 1.0, n_checked=1).passed
    rep = Report([Record("a", "t", 0.0, 0.0, n_checked=1), Record("b", "t", 1.0, 0.0, n_checked=1)])
    assert rep.exit_code == 1 and [r.relation for r in rep.failures()] == ["b"]


def test_csv_field_order():
    text = render(Report([Record("a", "t", 1 / 3, 1.0, n_checked=1)]), "csv")
    head, row = text.splitlines()
    assert head == "relation,tag,residual,tolerance,central_measured,central_reduced,n_checked,passed,detail"
    assert row.split(",")[2] == "0.333333333333"


def test_run_rejects_unknown_command():
    with pytest.raises(ConfigError):
        run("nothing", RunConfig())
