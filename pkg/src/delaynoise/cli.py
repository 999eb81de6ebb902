"""Command-line front end.

    delaynoise <command> [--config FILE] [--seed N] [--out PATH]

Every command writes UTF-8 CSV whose leading ``#`` lines hold the full
resolved configuration, so a result file can be re-run from its own header.
Exit status: 0 success, 1 configuration error, 2 numerical guard, 3 I/O.
"""
import argparse
import csv
import io
import logging
import math
import sys
import warnings
from pathlib import Path as FsPath

import numpy as np

from . import experiments as ex
from .config import COMMANDS, dump_config, parse_config
from .errors import ConfigError, DimensionMismatch, NumericGuardError
from .limit import DriftKind, drift_coefficient
from .models import additive, bounded2d, linear1d
from .sdde import (
    DelaySchedule,
    build_wiener,
    constant_past,
    default_t_minus,
    integrate_sdde,
)

log = logging.getLogger("delaynoise")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3
CONFIG_MARKER = "# [config]"


def build_model(cfg):
    if cfg.model == "linear1d":
        return linear1d(cfg.lin_a, cfg.lin_b, cfg.lin_c)
    if cfg.model == "additive":
        return additive(cfg.sigma_const)
    return bounded2d(cfg.sigma_A, cfg.sigma_B)


def _schedule(cfg, eps=None):
    return DelaySchedule(cfg.c, cfg.k, cfg.eps if eps is None else eps)


def _simulate(cfg):
    model = build_model(cfg)
    sched = _schedule(cfg)
    h = cfg.eps / cfg.h_ratio
    t_minus = default_t_minus(sched, h) if cfg.t_minus is None else cfg.t_minus
    # align the history start with the grid
    t_minus = -math.ceil(abs(t_minus) / h - 1e-9) * h
    wiener = build_wiener(cfg.seed, t_minus, cfg.T, h, model.n)
    x, y = integrate_sdde(model, sched, constant_past(cfg.x0, t_minus), wiener, h)
    y_fwd = y.states[0, wiener.index_of(0.0):, :]
    header = ["t"] + [f"x_{i + 1}" for i in range(model.m)] + [f"y_{j + 1}" for j in range(model.n)]
    rows = [[t, *xs, *ys] for t, xs, ys in zip(x.times, x.states[0], y_fwd)]
    return {"": (header, rows)}


def _converge(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rep = ex.convergence_experiment(build_model(cfg), _schedule(cfg), cfg.eps_list, cfg.trials,
                                        cfg.a, cfg.T, cfg.seed, cfg.h_ratio)
    if not rep.p_hat_nonincreasing():
        log.warning("p_hat is not nonincreasing along the eps schedule")
    return {"": (["eps", "p_hat", "wilson_lo", "wilson_hi", "mean_sup_err", "se"], rep.rows())}


def _falsify(cfg):
    rep = ex.drift_falsification(build_model(cfg), _schedule(cfg), cfg.eps, cfg.trials, cfg.T, cfg.seed, cfg.h_ratio)
    t_stat, p_value = rep.paired_test()
    row = [cfg.eps, rep.mean_err_exact, rep.se_exact, rep.mean_err_taylor, rep.se_taylor, t_stat, p_value]
    return {"": (["eps", "mean_err_exact", "se_exact", "mean_err_taylor", "se_taylor", "t_stat", "p_value"], [row])}


def _gstat(cfg):
    rep = ex.g_stat_experiment(_schedule(cfg), cfg.indices, cfg.eps_list, cfg.trials, cfg.T, cfg.seed, cfg.h_ratio)
    return {"": (["eps", "estimate", "se"], rep.rows())}


def _ydiag(cfg):
    rep = ex.eps_y_sup_moment(_schedule(cfg), cfg.eps_list, cfg.T, cfg.trials, cfg.seed, cfg.h_ratio)
    return {"": (["eps", "estimate", "se"], rep.rows())}


def _spectrum(cfg):
    n_samples = ex.DEFAULT_NPERSEG * (cfg.segments + 1) // 2
    if cfg.noise == "white":
        # dW/h has the flat two-sided density 1/(2 pi)
        series = ex.white_noise_series(cfg.seed, n_samples, cfg.h) / math.sqrt(cfg.h)
        omega, power = ex.spectrum_periodogram(series, cfg.h)
        ref = np.full_like(omega, 1 / (2 * np.pi))
    else:
        series = ex.ou_series(cfg.seed, n_samples, cfg.h, cfg.tau)
        omega, power = ex.spectrum_periodogram(series, cfg.h)
        ref = ex.lorentzian_psd(omega, cfg.tau)
    return {"": (["omega", "power", "lorentzian_ref"], list(zip(omega, power, ref)))}


def _drift_table(cfg):
    rows = [(r, float(drift_coefficient(DriftKind.EXACT, r, 1.0)), float(drift_coefficient(DriftKind.TAYLOR, r, 1.0)))
            for r in cfg.ratios]
    return {"": (["ratio", "exact", "taylor"], rows)}


def _fig1(cfg):
    ou, white = ex.fig1_realizations(cfg.lin_a, cfg.lin_b, cfg.lin_c, cfg.tau, cfg.T, cfg.seed,
                                     trials=range(cfg.trials), h=cfg.h, x0=cfg.x0[0])
    out = {}
    for label, path in (("ou", ou), ("white", white)):
        header = ["t"] + [f"x_trial{b}" for b in range(path.states.shape[0])]
        out[label] = (header, [[t, *path.states[:, i, 0]] for i, t in enumerate(path.times)])
    return out


_RUNNERS = {
    "simulate": _simulate,
    "converge": _converge,
    "falsify": _falsify,
    "gstat": _gstat,
    "ydiag": _ydiag,
    "spectrum": _spectrum,
    "drift-table": _drift_table,
    "fig1": _fig1,
}


def output_paths(cfg):
    """Files a command writes; fig1 splits its output into ``<stem>_ou`` and ``<stem>_white``."""
    out = FsPath(cfg.out)
    if cfg.command == "fig1":
        return {label: out.with_name(f"{out.stem}_{label}{out.suffix or '.csv'}") for label in ("ou", "white")}
    return {"": out}


def render_csv(cfg, header, rows):
    buf = io.StringIO()
    buf.write(f"# delaynoise {cfg.command}\n")
    buf.write(f"# seed = {cfg.seed}\n")
    buf.write(CONFIG_MARKER + "\n")
    for line in dump_config(cfg).splitlines():
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_embedded_config(text):
    """Recover the ``RunConfig`` stored in a CSV header."""
    lines = text.splitlines()
    start = lines.index(CONFIG_MARKER) + 1
    body = []
    for line in lines[start:]:
        if not line.startswith("# "):
            break
        body.append(line[2:])
    return parse_config("\n".join(body))


def run(cfg):
    """Execute ``cfg`` and write its CSV file(s); returns the list of paths written."""
    tables = _RUNNERS[cfg.command](cfg)
    paths = output_paths(cfg)
    written = []
    for label, (header, rows) in tables.items():
        path = paths[label]
        path.write_text(render_csv(cfg, header, rows), encoding="utf-8")
        written.append(path)
    return written


def load_config(command, config_path=None, seed=None, out=None):
    """Resolve the config; CLI flags take precedence over the file, which beats the defaults."""
    text = FsPath(config_path).read_text(encoding="utf-8") if config_path is not None else ""
    overrides = {key: value for key, value in (("seed", seed), ("out", out)) if value is not None}
    return parse_config(text, command, overrides)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="delaynoise", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat TOML configuration file")
    parser.add_argument("--seed", type=int, help="overrides the config seed")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.command, args.config, args.seed, args.out)
        written = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericGuardError, DimensionMismatch) as exc:
        print(f"numeric guard: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
