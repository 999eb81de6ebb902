"""Noise-induced drift and the limiting white-noise SDE.

As the delays ``c_p eps`` and correlation times ``k_j eps`` shrink together,
the delayed colored-noise system approaches the Ito equation

    dx = (f(x) + S(x)) dt + sigma(x) dW,
    S_i(x) = sum_{p,j} alpha(c_p/k_j) sigma_pj(x) d sigma_ij(x) / d x_p,

with ``alpha(r) = exp(-r)/2``. The first-order Taylor variant uses
``alpha(r) = 1/(2 (1 + r))``; ``alpha = 1/2`` is the Stratonovich correction
and ``alpha = 0`` is the plain Ito equation.
"""
import enum

import numpy as np

from .errors import BadGrid, DimensionMismatch
from .models import eval_drift, eval_sigma, eval_sigma_jacobian
from .sdde import Path


class DriftKind(str, enum.Enum):
    EXACT = "exact"
    TAYLOR = "taylor"
    STRATONOVICH = "stratonovich"
    NONE = "none"


def drift_coefficient(kind, c_p, k_j):
    kind = DriftKind(kind)
    r = np.asarray(c_p, dtype=float) / np.asarray(k_j, dtype=float)
    if kind is DriftKind.EXACT:
        return 0.5 * np.exp(-r)
    if kind is DriftKind.TAYLOR:
        return 0.5 / (1.0 + r)
    if kind is DriftKind.STRATONOVICH:
        return np.full_like(r, 0.5)
    return np.zeros_like(r)


def coefficient_matrix(sched, kind):
    """``alpha[j, p]`` for every noise channel ``j`` and delayed component ``p``."""
    c = np.asarray(sched.c)
    k = np.asarray(sched.k)
    return drift_coefficient(kind, c[None, :], k[:, None])


def noise_induced_drift(model, x, sched, kind):
    sched.check_model(model)
    x = np.asarray(x, dtype=float)
    alpha = coefficient_matrix(sched, kind)
    sig = eval_sigma(model, x)
    jac = eval_sigma_jacobian(model, x)
    # S_i = sum_{p,j} alpha[j,p] sigma[p,j] jac[i,j,p]
    return np.einsum("jp,...pj,...ijp->...i", alpha, sig, jac)


def integrate_ito_sde(model, sched, kind, x0, wiener, h):
    """Euler-Maruyama on ``[0, wiener.t_end]`` using the increments after time 0."""
    sched.check_model(model)
    if abs(h - wiener.h) > 1e-9 * h:
        raise BadGrid(f"h={h:g} differs from the wiener step {wiener.h:g}")
    if wiener.n_channels != model.n:
        raise DimensionMismatch(f"wiener has {wiener.n_channels} channels, model noise dimension is {model.n}")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape[-1] != model.m:
        raise DimensionMismatch(f"x0 has shape {x0.shape}, model expects {model.m} components")
    dW = wiener.increments[:, wiener.index_of(0.0):, :]
    B, N, _ = dW.shape
    alpha = coefficient_matrix(sched, kind)
    use_drift = bool(np.any(alpha))
    X = np.empty((B, N + 1, model.m))
    X[:, 0, :] = x0
    for n in range(N):
        xn = X[:, n, :]
        sig = eval_sigma(model, xn)
        drift = eval_drift(model, xn)
        if use_drift:
            drift = drift + np.einsum("jp,bpj,bijp->bi", alpha, sig, eval_sigma_jacobian(model, xn))
        X[:, n + 1, :] = xn + drift * h + np.einsum("bij,bj->bi", sig, dW[:, n, :])
    return Path(h * np.arange(N + 1), X)


def integrate_stratonovich_heun(model, x0, wiener, h):
    """Stratonovich Heun predictor-corrector for ``dx = f dt + sigma o dW``."""
    if abs(h - wiener.h) > 1e-9 * h:
        raise BadGrid(f"h={h:g} differs from the wiener step {wiener.h:g}")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    dW = wiener.increments[:, wiener.index_of(0.0):, :]
    B, N, _ = dW.shape
    X = np.empty((B, N + 1, model.m))
    X[:, 0, :] = x0
    for n in range(N):
        xn = X[:, n, :]
        f0 = eval_drift(model, xn)
        g0 = np.einsum("bij,bj->bi", eval_sigma(model, xn), dW[:, n, :])
        pred = xn + f0 * h + g0
        f1 = eval_drift(model, pred)
        g1 = np.einsum("bij,bj->bi", eval_sigma(model, pred), dW[:, n, :])
        X[:, n + 1, :] = xn + 0.5 * (f0 + f1) * h + 0.5 * (g0 + g1)
    return Path(h * np.arange(N + 1), X)
