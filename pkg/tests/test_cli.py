import csv
import io
import os

import pytest

from delaynoise import cli
from delaynoise.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main, read_embedded_config, run
from delaynoise.config import dump_config, parse_config
from delaynoise.errors import ParseError, StepTooLarge, ValidationError

DRIFT_TABLE = [(0.0, 0.5, 0.5), (0.5, 0.30327, 0.33333), (1.0, 0.18394, 0.25), (2.0, 0.06767, 0.16667)]


def _table(path):
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    return rows[0], rows[1:]


def _body(path):
    return "\n".join(ln for ln in path.read_text(encoding="utf-8").splitlines() if not ln.startswith("#"))


def _write_config(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_minimal_config_gets_defaults():
    cfg = parse_config('command = "drift-table"')
    assert cfg.ratios == (0.0, 0.5, 1.0, 2.0)
    assert cfg.seed == 42
    assert cfg.out == "drift-table.csv"


def test_eps_list_must_decrease():
    with pytest.raises(ValidationError):
        parse_config('command = "converge"\neps_list = [0.1, 0.2]')
    with pytest.raises(ValidationError):
        parse_config('command = "converge"\neps_list = [0.1, 0.1]')


def test_c_length_mismatch_names_dimension_mismatch():
    with pytest.raises(ValidationError, match="DimensionMismatch"):
        parse_config('command = "simulate"\nmodel = "bounded2d"\nc = [0.1]')


def test_unknown_key_and_bad_syntax():
    with pytest.raises(ParseError) as err:
        parse_config('command = "simulate"\nbogus = 1')
    assert err.value.field == "bogus"
    with pytest.raises(ParseError) as err:
        parse_config('command = "simulate"\neps = = 2')
    assert err.value.line == 2


def test_delay_history_guard_is_named():
    with pytest.raises(ValidationError, match="t_minus"):
        parse_config('command = "simulate"\nc = [1.0, 1.0]\neps = 0.1\nt_minus = -0.1')


def test_step_guard_rejected_before_running():
    with pytest.raises(ValidationError, match="step guard"):
        parse_config('command = "simulate"\nh_ratio = 10')


def test_drift_table_values(tmp_path):
    out = tmp_path / "dt.csv"
    assert main(["drift-table", "--out", str(out)]) == EXIT_OK
    header, rows = _table(out)
    assert header == ["ratio", "exact", "taylor"]
    for row, expected in zip(rows, DRIFT_TABLE, strict=True):
        assert tuple(round(float(v), 5) for v in row) == expected


def test_reruns_are_byte_identical(tmp_path):
    cfg = _write_config(tmp_path, 'command = "simulate"\nT = 0.2\neps = 0.05')
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == EXIT_OK
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == EXIT_OK
    assert _body(a) == _body(b)
    header, rows = _table(a)
    assert header == ["t", "x_1", "x_2", "y_1", "y_2"]
    assert float(rows[-1][0]) == pytest.approx(0.2)


@pytest.mark.parametrize("command", ["simulate", "drift-table", "spectrum", "falsify"])
def test_embedded_config_round_trips(tmp_path, command):
    extra = {"simulate": "T = 0.1", "falsify": "T = 0.1\ntrials = 5", "spectrum": "segments = 2"}.get(command, "")
    cfg = parse_config(f'command = "{command}"\nout = "{tmp_path / "o.csv"}"\n{extra}')
    (path,) = run(cfg)
    assert read_embedded_config(path.read_text(encoding="utf-8")) == cfg
    assert parse_config(dump_config(cfg)) == cfg


def test_seed_precedence(tmp_path):
    assert parse_config('command = "simulate"').seed == 42
    cfg_file = _write_config(tmp_path, 'command = "simulate"\nseed = 7\nT = 0.1')
    assert cli.load_config("simulate", cfg_file).seed == 7
    assert cli.load_config("simulate", cfg_file, seed=9).seed == 9
    out = tmp_path / "s.csv"
    assert main(["simulate", "--config", cfg_file, "--seed", "9", "--out", str(out)]) == EXIT_OK
    assert "# seed = 9" in out.read_text(encoding="utf-8").splitlines()


def test_exit_code_config(tmp_path, capsys):
    cfg = _write_config(tmp_path, 'command = "simulate"\nunknown_thing = 3')
    assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == EXIT_CONFIG
    err = capsys.readouterr().err.strip()
    assert len(err.splitlines()) == 1 and "unknown_thing" in err
    assert not (tmp_path / "x.csv").exists()


def test_exit_code_numeric(tmp_path, monkeypatch, capsys):
    def boom(cfg):
        raise StepTooLarge("h exceeds tau/10")

    monkeypatch.setitem(cli._RUNNERS, "simulate", boom)
    assert main(["simulate", "--out", str(tmp_path / "x.csv")]) == EXIT_NUMERIC
    assert "tau/10" in capsys.readouterr().err


def test_exit_code_io(tmp_path):
    assert main(["drift-table", "--out", str(tmp_path / "missing" / "dt.csv")]) == EXIT_IO
    assert main(["drift-table", "--config", str(tmp_path / "nope.toml")]) == EXIT_IO


def test_converge_small_run(tmp_path):
    cfg = _write_config(tmp_path, 'command = "converge"\neps_list = [0.2, 0.05]\ntrials = 50\nT = 0.5')
    out = tmp_path / "conv.csv"
    assert main(["converge", "--config", cfg, "--out", str(out)]) == EXIT_OK
    header, rows = _table(out)
    assert header == ["eps", "p_hat", "wilson_lo", "wilson_hi", "mean_sup_err", "se"]
    p_hat = [float(r[1]) for r in rows]
    assert p_hat == sorted(p_hat, reverse=True)
    for r in rows:
        assert float(r[2]) <= float(r[1]) <= float(r[3])


def test_falsify_columns(tmp_path):
    cfg = parse_config(f'command = "falsify"\ntrials = 10\nT = 0.2\nout = "{tmp_path / "f.csv"}"')
    (path,) = run(cfg)
    header, rows = _table(path)
    assert header == ["eps", "mean_err_exact", "se_exact", "mean_err_taylor", "se_taylor", "t_stat", "p_value"]
    assert len(rows) == 1 and 0 <= float(rows[0][-1]) <= 1


def test_fig1_writes_two_deterministic_files(tmp_path):
    cfg = _write_config(tmp_path, 'command = "fig1"\nT = 5.0\ntrials = 2')
    first = tmp_path / "a" / "fig.csv"
    second = tmp_path / "b" / "fig.csv"
    first.parent.mkdir()
    second.parent.mkdir()
    assert main(["fig1", "--config", cfg, "--out", str(first)]) == EXIT_OK
    assert main(["fig1", "--config", cfg, "--out", str(second)]) == EXIT_OK
    assert sorted(os.listdir(first.parent)) == ["fig_ou.csv", "fig_white.csv"]
    for name in ("fig_ou.csv", "fig_white.csv"):
        assert _body(first.parent / name) == _body(second.parent / name)
        header, rows = _table(first.parent / name)
        assert header == ["t", "x_trial0", "x_trial1"]
        assert float(rows[-1][0]) == pytest.approx(5.0)


@pytest.mark.parametrize("command", ["simulate", "drift-table", "spectrum", "gstat", "ydiag"])
def test_no_writes_outside_out_path(tmp_path, monkeypatch, command):
    work = tmp_path / "cwd"
    work.mkdir()
    monkeypatch.chdir(work)
    extra = {
        "simulate": "T = 0.1",
        "spectrum": "segments = 2",
        "gstat": "T = 0.1\ntrials = 4\neps_list = [0.08, 0.04]",
        "ydiag": "T = 0.1\ntrials = 100\neps_list = [0.1, 0.05]",
    }.get(command, "")
    cfg = _write_config(tmp_path, f'command = "{command}"\n{extra}')
    out = tmp_path / "result" / "r.csv"
    out.parent.mkdir()
    assert main([command, "--config", cfg, "--out", str(out)]) == EXIT_OK
    assert os.listdir(work) == []
    assert os.listdir(out.parent) == ["r.csv"]
