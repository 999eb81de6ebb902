"""Run configuration: a flat TOML document of ``key = value`` lines.

Every command has documented defaults; ``parse_config`` fills them in so the
resulting ``RunConfig`` is complete and can be written back verbatim with
``dump_config``.
"""
import json
import math
from dataclasses import asdict, dataclass, fields

import tomli

from .errors import ParseError, ValidationError
from .models import DEFAULT_BOUNDED_A, DEFAULT_BOUNDED_B, DEFAULT_LINEAR, BUILTIN

COMMANDS = ("simulate", "converge", "falsify", "gstat", "ydiag", "spectrum", "drift-table", "fig1")
DEFAULT_SEED = 42

_EPS_LISTS = {
    "converge": (0.2, 0.1, 0.05, 0.025),
    "gstat": (0.08, 0.04, 0.02, 0.01),
    "ydiag": (0.1, 0.05, 0.025, 0.0125),
}
_TRIALS = {"converge": 200, "falsify": 200, "gstat": 200, "ydiag": 200, "fig1": 1}
_MIN_TRIALS = {"converge": 50, "falsify": 2, "gstat": 2, "ydiag": 100}


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str = "bounded2d"
    lin_a: float = DEFAULT_LINEAR["a"]
    lin_b: float = DEFAULT_LINEAR["b"]
    lin_c: float = DEFAULT_LINEAR["c"]
    sigma_A: tuple = DEFAULT_BOUNDED_A
    sigma_B: tuple = DEFAULT_BOUNDED_B
    sigma_const: tuple = ((1.0,),)
    c: tuple = None
    k: tuple = None
    x0: tuple = None
    eps: float = 0.02
    eps_list: tuple = None
    h_ratio: float = 100.0
    t_minus: float = None
    T: float = None
    trials: int = None
    a: float = 0.1
    indices: tuple = (0, 0, 0)
    tau: float = 5.0
    h: float = None
    noise: str = "ou"
    segments: int = 100
    ratios: tuple = (0.0, 0.5, 1.0, 2.0)
    seed: int = DEFAULT_SEED
    out: str = None

    def to_dict(self):
        return asdict(self)


_FLOAT = {"lin_a", "lin_b", "lin_c", "eps", "h_ratio", "t_minus", "T", "a", "tau", "h"}
_INT = {"trials", "seed", "segments"}
_STR = {"command", "model", "noise", "out"}
_VEC = {"c", "k", "x0", "eps_list", "ratios"}
_MAT = {"sigma_A", "sigma_B", "sigma_const"}
_KEYS = {f.name for f in fields(RunConfig)}


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _coerce(key, value):
    if key in _FLOAT:
        if not _is_number(value):
            raise ParseError("expected a number", field=key)
        return float(value)
    if key in _INT:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ParseError("expected an integer", field=key)
        return value
    if key in _STR:
        if not isinstance(value, str):
            raise ParseError("expected a string", field=key)
        return value
    if key == "indices":
        if not (isinstance(value, list) and len(value) == 3 and all(isinstance(v, int) and not isinstance(v, bool) for v in value)):
            raise ParseError("expected three integers [j, l, p]", field=key)
        return tuple(value)
    if key in _VEC:
        if not (isinstance(value, list) and all(_is_number(v) for v in value)):
            raise ParseError("expected an array of numbers", field=key)
        return tuple(float(v) for v in value)
    if key in _MAT:
        if not (isinstance(value, list) and value and all(isinstance(r, list) and all(_is_number(v) for v in r) for r in value)):
            raise ParseError("expected an array of arrays of numbers", field=key)
        return tuple(tuple(float(v) for v in r) for r in value)
    raise ParseError("unknown key", field=key)


def model_dims(cfg):
    if cfg.model == "linear1d":
        return 1, 1
    if cfg.model == "bounded2d":
        return 2, 2
    return len(cfg.sigma_const), len(cfg.sigma_const[0])


def _defaults(cfg):
    cmd = cfg.command
    m, n = model_dims(cfg)
    fill = {}
    if cfg.c is None:
        if cfg.model == "bounded2d":
            fill["c"] = (0.4, 0.4) if cmd == "falsify" else (0.1, 0.2)
        elif cmd == "gstat":
            fill["c"] = (1.0,) * m
        else:
            fill["c"] = (0.0,) * m
    if cfg.k is None:
        fill["k"] = (0.2,) * n if cfg.model == "bounded2d" else (1.0,) * n
    if cfg.x0 is None:
        fill["x0"] = (0.0,) * m
    if cfg.eps_list is None:
        fill["eps_list"] = _EPS_LISTS.get(cmd, (cfg.eps,))
    if cfg.T is None:
        fill["T"] = 50.0 if cmd == "fig1" else 1.0
    if cfg.trials is None:
        fill["trials"] = _TRIALS.get(cmd, 1)
    if cfg.h is None and cmd in ("spectrum", "fig1"):
        fill["h"] = cfg.tau / 20 if cmd == "spectrum" else cfg.tau / 100
    if cfg.out is None:
        fill["out"] = f"{cmd}.csv"
    return cfg.__class__(**{**cfg.to_dict(), **fill})


def _validate(cfg):
    if cfg.command not in COMMANDS:
        raise ValidationError(f"unknown command {cfg.command!r}; expected one of {', '.join(COMMANDS)}")
    if cfg.model not in BUILTIN:
        raise ValidationError(f"unknown model {cfg.model!r}; expected one of {', '.join(BUILTIN)}")
    m, n = model_dims(cfg)
    if cfg.model == "additive" and (n == 0 or any(len(r) != n for r in cfg.sigma_const)):
        raise ValidationError("sigma_const rows must have equal length")
    for name, M in (("sigma_A", cfg.sigma_A), ("sigma_B", cfg.sigma_B)):
        if len(M) != 2 or any(len(r) != 2 for r in M):
            raise ValidationError(f"DimensionMismatch: {name} must be 2x2")
    if len(cfg.c) != m:
        raise ValidationError(f"DimensionMismatch: c has length {len(cfg.c)} but model {cfg.model} has m = {m}")
    if len(cfg.k) != n:
        raise ValidationError(f"DimensionMismatch: k has length {len(cfg.k)} but model {cfg.model} has n = {n}")
    if len(cfg.x0) != m:
        raise ValidationError(f"DimensionMismatch: x0 has length {len(cfg.x0)} but model {cfg.model} has m = {m}")
    if any(v < 0 for v in cfg.c) or any(v <= 0 for v in cfg.k):
        raise ValidationError("c must be nonnegative and k positive")
    if not cfg.eps > 0 or not cfg.h_ratio > 0:
        raise ValidationError("eps and h_ratio must be positive")
    el = cfg.eps_list
    if not el or any(e <= 0 for e in el) or any(b >= a for a, b in zip(el, el[1:])):
        raise ValidationError(f"eps_list must be positive and strictly decreasing, got {list(el)}")
    if not cfg.T >= 0 or (cfg.T == 0 and cfg.command != "gstat"):
        raise ValidationError("T must be positive")
    if cfg.trials < _MIN_TRIALS.get(cfg.command, 1):
        raise ValidationError(f"{cfg.command} needs trials >= {_MIN_TRIALS.get(cfg.command, 1)}, got {cfg.trials}")
    if not cfg.a > 0:
        raise ValidationError("threshold a must be positive")
    # h = eps / h_ratio must satisfy h <= tau_j / 10 and h <= delta_i / 4
    if cfg.command in ("simulate", "converge", "falsify", "gstat", "ydiag"):
        if min(cfg.k) * cfg.h_ratio < 10 * (1 - 1e-9):
            raise ValidationError(f"step guard: h = eps/{cfg.h_ratio:g} exceeds min(tau)/10; need min(k) * h_ratio >= 10")
        pos = [v for v in cfg.c if v > 0]
        if pos and min(pos) * cfg.h_ratio < 4 * (1 - 1e-9):
            raise ValidationError(f"step guard: h = eps/{cfg.h_ratio:g} does not resolve the delays; need min(c > 0) * h_ratio >= 4")
    if cfg.t_minus is not None:
        if not cfg.t_minus < 0:
            raise ValidationError("t_minus must be negative")
        worst = max(cfg.c) * max((cfg.eps,) + tuple(cfg.eps_list))
        if not worst < abs(cfg.t_minus) / 2:
            raise ValidationError(f"max delay {worst:g} >= |t_minus|/2 = {abs(cfg.t_minus) / 2:g}")
    j, l, p = cfg.indices
    if cfg.command == "gstat" and not (0 <= j < n and 0 <= l < n and 0 <= p < m):
        raise ValidationError(f"DimensionMismatch: indices {cfg.indices} out of range for n = {n}, m = {m}")
    if cfg.command in ("spectrum", "fig1"):
        if not (cfg.tau > 0 and cfg.h > 0):
            raise ValidationError("tau and h must be positive")
        if cfg.command == "spectrum" and cfg.noise == "ou" and cfg.h > cfg.tau:
            raise ValidationError("spectrum sampling step h must not exceed tau")
        if cfg.command == "fig1" and cfg.h > cfg.tau / 10 * (1 + 1e-9):
            raise ValidationError("step guard: fig1 needs h <= tau/10")
    if cfg.noise not in ("ou", "white"):
        raise ValidationError(f"noise must be 'ou' or 'white', got {cfg.noise!r}")
    if cfg.segments < 1:
        raise ValidationError("segments must be positive")
    if any(r < 0 for r in cfg.ratios):
        raise ValidationError("ratios must be nonnegative")
    if not cfg.out:
        raise ValidationError("out must be a nonempty path")
    return cfg


def config_from_dict(data, command=None):
    data = dict(data)
    for key in data:
        if key not in _KEYS:
            raise ParseError("unknown key", field=key)
    values = {key: _coerce(key, value) for key, value in data.items()}
    if command is not None:
        if "command" in values and values["command"] != command:
            raise ValidationError(f"config command {values['command']!r} conflicts with {command!r}")
        values["command"] = command
    if "command" not in values:
        raise ParseError("missing required key", field="command")
    if values["command"] not in COMMANDS:
        raise ValidationError(f"unknown command {values['command']!r}; expected one of {', '.join(COMMANDS)}")
    return _validate(_defaults(RunConfig(**values)))


def parse_config(text, command=None, overrides=None):
    """Parse and validate a TOML configuration document.

    ``overrides`` (e.g. command-line flags) replace keys from the document.
    """
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ParseError(str(exc), line=getattr(exc, "lineno", None)) from None
    for key, value in data.items():
        if isinstance(value, dict):
            raise ParseError("tables are not allowed; the document must be flat", field=key)
    data.update(overrides or {})
    return config_from_dict(data, command)


def dump_config(cfg):
    """TOML text that ``parse_config`` maps back to ``cfg``."""
    lines = []
    for key, value in cfg.to_dict().items():
        if value is None:
            continue
        if isinstance(value, float) and not math.isfinite(value):
            raise ValueError(f"{key} is not finite")
        lines.append(f"{key} = {json.dumps(value)}")
    return "\n".join(lines) + "\n"
