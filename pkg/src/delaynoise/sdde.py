"""Euler integration of the delayed system driven by OU colored noise.

The state obeys ``dx = f(x_t) dt + sigma(x_{t - delta}) y_t dt`` where
component ``i`` of the delayed argument is read at ``t - c_i eps`` and the
noise ``y`` is a stationary OU process with correlation times ``k_j eps``.

Everything is batched over independent trials: a ``WienerGrid`` carries
increments of shape ``(B, N, n)`` and a ``Path`` carries states of shape
``(B, N + 1, dim)``. Trial ``b`` is keyed by ``trials[b]`` in the
counter-based RNG, so results do not depend on the batch composition.
"""
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import rng as rngmod
from .errors import BadGrid, DimensionMismatch, HistoryTooShort, StepTooLarge
from .models import eval_drift, eval_sigma
from .noise import check_shared_step, ou_path_shared

#: positive delays must span at least this many grid steps
DELAY_STEPS_MIN = 4

_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class DelaySchedule:
    c: tuple
    k: tuple
    eps: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(self.c))
        k = tuple(float(v) for v in np.atleast_1d(self.k))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "k", k)
        if any(v < 0 for v in c):
            raise ValueError("delay coefficients c must be nonnegative")
        if any(v <= 0 for v in k):
            raise ValueError("correlation coefficients k must be positive")
        if not self.eps > 0:
            raise ValueError("eps must be positive")

    @property
    def deltas(self):
        return np.asarray(self.c) * self.eps

    @property
    def taus(self):
        return np.asarray(self.k) * self.eps

    @property
    def max_delay(self):
        return float(self.deltas.max())

    def with_eps(self, eps):
        return replace(self, eps=eps)

    def check_model(self, model):
        if len(self.c) != model.m:
            raise DimensionMismatch(f"c has length {len(self.c)} but model state dimension is {model.m}")
        if len(self.k) != model.n:
            raise DimensionMismatch(f"k has length {len(self.k)} but model noise dimension is {model.n}")


@dataclass(frozen=True)
class PastCondition:
    t_minus: float
    x_past: Callable

    def __post_init__(self):
        if not self.t_minus < 0:
            raise ValueError("t_minus must be negative")

    @property
    def x0(self):
        return np.asarray(self.x_past(0.0), dtype=float)

    def check(self, sched):
        if not sched.max_delay < abs(self.t_minus) / 2:
            raise HistoryTooShort(
                f"max delay {sched.max_delay:g} must be below |t_minus|/2 = {abs(self.t_minus) / 2:g}"
            )


def constant_past(x0, t_minus):
    x0 = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    x0.setflags(write=False)
    return PastCondition(t_minus, lambda t: x0)


def default_t_minus(sched, h):
    """Grid-aligned history start with room for twice the largest delay."""
    n_past = max(math.ceil(4 * sched.max_delay / h - _GRID_RTOL), 10)
    return -n_past * h


@dataclass(frozen=True)
class WienerGrid:
    seed: int
    t_start: float
    t_end: float
    h: float
    increments: np.ndarray
    trials: tuple = (0,)

    @property
    def n_steps(self):
        return self.increments.shape[1]

    @property
    def n_channels(self):
        return self.increments.shape[2]

    @property
    def times(self):
        return self.t_start + self.h * np.arange(self.n_steps + 1)

    def index_of(self, t):
        q = (t - self.t_start) / self.h
        idx = int(round(q))
        if abs(q - idx) > 1e-6 or idx < 0 or idx > self.n_steps:
            raise BadGrid(f"time {t:g} is not a node of the grid [{self.t_start:g}, {self.t_end:g}] step {self.h:g}")
        return idx


@dataclass(frozen=True)
class Path:
    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        if self.states.ndim != 3 or self.states.shape[1] != len(self.times):
            raise DimensionMismatch(f"states {self.states.shape} do not match {len(self.times)} times")

    @property
    def h(self):
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    @property
    def terminal(self):
        return self.states[:, -1, :]


def _n_steps(t_start, t_end, h):
    if not h > 0:
        raise BadGrid("step h must be positive")
    if not t_start < t_end:
        raise BadGrid(f"empty grid: t_start={t_start:g} >= t_end={t_end:g}")
    q = (t_end - t_start) / h
    n = int(round(q))
    if abs(q - n) > _GRID_RTOL * max(1.0, q):
        raise BadGrid(f"h={h:g} does not divide [{t_start:g}, {t_end:g}]")
    return n


def build_wiener(seed, t_start, t_end, h, n=1, trials=(0,)):
    """Seeded Brownian increments ``N(0, h)`` on a uniform grid."""
    N = _n_steps(t_start, t_end, h)
    trials = tuple(int(t) for t in trials)
    z = rngmod.normals(seed, trials, rngmod.WIENER, n, N)
    return WienerGrid(int(seed), float(t_start), float(t_end), float(h), np.sqrt(h) * z, trials)


def stationary_start(sched, wiener, rng=None):
    """Stationary draws ``N(0, 1/(2 tau_j))`` for every trial, shape ``(B, n)``."""
    sd = np.sqrt(1.0 / (2.0 * sched.taus))
    B, n = len(wiener.trials), len(sched.k)
    if rng is not None:
        return rng.standard_normal((B, n)) * sd
    z = rngmod.normals(wiener.seed, wiener.trials, rngmod.NOISE_INIT, n, 1)[:, 0, :]
    return z * sd


def noise_path(sched, wiener, rng=None):
    """Stationary OU noise on the whole Wiener grid, advanced by shared Euler steps."""
    if wiener.n_channels != len(sched.k):
        raise DimensionMismatch(f"wiener has {wiener.n_channels} channels, schedule has {len(sched.k)}")
    y = ou_path_shared(stationary_start(sched, wiener, rng), wiener.h, sched.taus, wiener.increments)
    return Path(wiener.times, y)


def sample_past_noise(sched, t_minus, wiener, rng=None):
    """Stationary noise history on ``[t_minus, 0]``."""
    if wiener.t_start > t_minus + 1e-12:
        raise HistoryTooShort(f"wiener starts at {wiener.t_start:g}, after t_minus={t_minus:g}")
    i0 = wiener.index_of(t_minus)
    i1 = wiener.index_of(0.0)
    sub = replace(wiener, t_start=t_minus, t_end=0.0, increments=wiener.increments[:, i0:i1])
    return noise_path(sched, sub, rng)


def _lookup_component(states, h, past, s, i):
    """Component ``i`` of the trajectory at time ``s``; ``states[:, 0]`` is time 0."""
    if s < 0:
        return np.full(states.shape[0], float(np.asarray(past.x_past(s))[i]))
    q = s / h
    idx = int(math.floor(q + 1e-9))
    w = q - idx
    if w <= 1e-9:
        return states[:, idx, i]
    return states[:, idx, i] + w * (states[:, idx + 1, i] - states[:, idx, i])


def delayed_lookup(x_path, past, t, c, eps):
    """Componentwise delayed state ``(x_i(t - c_i eps))_i`` for every trial.

    Off-grid times are linearly interpolated; negative times are read from
    the past condition.
    """
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.size != x_path.states.shape[2]:
        raise DimensionMismatch(f"c has length {c.size}, path has dimension {x_path.states.shape[2]}")
    t0 = float(x_path.times[0])
    h = x_path.h
    out = np.empty((x_path.states.shape[0], c.size))
    for i, ci in enumerate(c):
        s = t - ci * eps
        if s < past.t_minus - 1e-12:
            raise HistoryTooShort(f"lookup at {s:g} precedes t_minus={past.t_minus:g}")
        if s - t0 > x_path.times[-1] - t0 + 1e-12:
            raise ValueError(f"lookup at {s:g} is beyond the end of the path")
        if s >= t0:
            out[:, i] = _lookup_component(x_path.states, h, past, s - t0, i)
        else:
            out[:, i] = float(np.asarray(past.x_past(s))[i])
    return out


def check_delay_step(sched, h):
    for d in sched.deltas:
        if d > 0 and h > d / DELAY_STEPS_MIN * (1 + _GRID_RTOL):
            raise StepTooLarge(f"step h={h:g} does not resolve delay {d:g} (need h <= delay/{DELAY_STEPS_MIN})")


def integrate_sdde(model, sched, past, wiener, h, rng=None):
    """Explicit Euler for the colored-noise delay system on ``[0, wiener.t_end]``.

    Returns ``(x_path, y_path)``; ``x_path`` covers ``[0, T]`` and ``y_path``
    the whole Wiener grid.
    """
    sched.check_model(model)
    if abs(h - wiener.h) > _GRID_RTOL * h:
        raise BadGrid(f"h={h:g} differs from the wiener step {wiener.h:g}")
    check_shared_step(h, sched.taus)
    check_delay_step(sched, h)
    past.check(sched)
    x0 = past.x0
    if x0.shape != (model.m,):
        raise DimensionMismatch(f"x0 has shape {x0.shape}, model expects ({model.m},)")

    y_path = noise_path(sched, wiener, rng)
    n0 = wiener.index_of(0.0)
    N = wiener.n_steps - n0
    y = y_path.states[:, n0:, :]
    B = y.shape[0]
    X = np.empty((B, N + 1, model.m))
    X[:, 0, :] = x0
    deltas = sched.deltas
    xd = np.empty((B, model.m))
    for n in range(N):
        t = n * h
        for i, d in enumerate(deltas):
            if t - d < past.t_minus - 1e-12:
                raise HistoryTooShort(f"lookup at {t - d:g} precedes t_minus={past.t_minus:g}")
            xd[:, i] = X[:, n, i] if d == 0 else _lookup_component(X, h, past, t - d, i)
        xn = X[:, n, :]
        forcing = np.einsum("bij,bj->bi", eval_sigma(model, xd), y[:, n, :])
        X[:, n + 1, :] = xn + eval_drift(model, xn) * h + forcing * h
    return Path(h * np.arange(N + 1), X), y_path


def integrate_colored(model, y, x0, h):
    """Undelayed colored-noise Euler scheme for a given noise array ``y`` of shape ``(B, N+1, n)``."""
    B, Np1, _ = y.shape
    X = np.empty((B, Np1, model.m))
    X[:, 0, :] = x0
    for n in range(Np1 - 1):
        xn = X[:, n, :]
        forcing = np.einsum("bij,bj->bi", eval_sigma(model, xn), y[:, n, :])
        X[:, n + 1, :] = xn + eval_drift(model, xn) * h + forcing * h
    return Path(h * np.arange(Np1), X)
