"""Drift and diffusion coefficients of the built-in test systems.

All model callables are vectorised over leading axes: ``x`` of shape
``(..., m)`` gives ``f`` of shape ``(..., m)``, ``sigma`` of shape
``(..., m, n)`` and ``sigma_jac`` of shape ``(..., m, n, m)`` where
``sigma_jac[..., i, j, p] = d sigma_ij / d x_p``.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionMismatch

DEFAULT_LINEAR = {"a": -1.0, "b": 0.5, "c": 1.0}
DEFAULT_BOUNDED_A = ((0.3, 0.06), (0.06, 0.3))
DEFAULT_BOUNDED_B = ((0.3, 0.12), (0.12, 0.3))


@dataclass(frozen=True)
class ModelSpec:
    m: int
    n: int
    f: Callable
    sigma: Callable
    sigma_jac: Callable
    bounded: bool
    name: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("model dimensions must be positive")


def _as_state(model, x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] != model.m:
        raise DimensionMismatch(f"state has shape {x.shape}, model {model.name} expects last axis {model.m}")
    return x


def eval_drift(model, x):
    return model.f(_as_state(model, x))


def eval_sigma(model, x):
    return model.sigma(_as_state(model, x))


def eval_sigma_jacobian(model, x):
    return model.sigma_jac(_as_state(model, x))


def linear1d(a=DEFAULT_LINEAR["a"], b=DEFAULT_LINEAR["b"], c=DEFAULT_LINEAR["c"]):
    """``f(x) = a x`` and ``sigma(x) = b x + c`` in one dimension (unbounded)."""

    def f(x):
        return a * x

    def sigma(x):
        return (b * x + c)[..., None]

    def sigma_jac(x):
        return np.full(x.shape[:-1] + (1, 1, 1), float(b))

    return ModelSpec(1, 1, f, sigma, sigma_jac, bounded=False, name="linear1d",
                     params={"a": a, "b": b, "c": c})


def additive(sigma_const, drift=None):
    """Constant diffusion matrix; zero drift unless ``drift`` is given."""
    S = np.atleast_2d(np.asarray(sigma_const, dtype=float))
    m, n = S.shape

    def f(x):
        return np.zeros_like(x) if drift is None else drift(x)

    def sigma(x):
        return np.broadcast_to(S, x.shape[:-1] + (m, n)).copy()

    def sigma_jac(x):
        return np.zeros(x.shape[:-1] + (m, n, m))

    return ModelSpec(m, n, f, sigma, sigma_jac, bounded=drift is None, name="additive",
                     params={"sigma": S.tolist()})


def bounded2d(A=DEFAULT_BOUNDED_A, B=DEFAULT_BOUNDED_B):
    """Two-dimensional system with bounded, Lipschitz coefficients.

    ``f_i(x) = -tanh(x_i)`` and ``sigma_ij(x) = A_ij + B_ij tanh(x_j)``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != (2, 2) or B.shape != (2, 2):
        raise DimensionMismatch("bounded2d needs 2x2 matrices A and B")

    def f(x):
        return -np.tanh(x)

    def sigma(x):
        # column j depends on x_j only
        return A + B * np.tanh(x)[..., None, :]

    def sigma_jac(x):
        sech2 = 1.0 / np.cosh(x) ** 2
        out = np.zeros(x.shape[:-1] + (2, 2, 2))
        for j in range(2):
            out[..., :, j, j] = B[:, j] * sech2[..., j, None]
        return out

    return ModelSpec(2, 2, f, sigma, sigma_jac, bounded=True, name="bounded2d",
                     params={"A": A.tolist(), "B": B.tolist()})


def zero_model(m=1, n=1, decay=0.0):
    """sigma = 0 and f(x) = -decay x; a deterministic ODE used as a sanity check."""

    def f(x):
        return -decay * x

    def sigma(x):
        return np.zeros(x.shape[:-1] + (m, n))

    def sigma_jac(x):
        return np.zeros(x.shape[:-1] + (m, n, m))

    return ModelSpec(m, n, f, sigma, sigma_jac, bounded=True, name="zero", params={"decay": decay})


def finite_difference_jacobian(model, x, step=1e-5):
    """Centered finite differences of ``sigma``; same layout as ``sigma_jac``."""
    x = _as_state(model, x)
    out = np.empty(x.shape[:-1] + (model.m, model.n, model.m))
    for p in range(model.m):
        e = np.zeros(model.m)
        e[p] = step
        out[..., p] = (model.sigma(x + e) - model.sigma(x - e)) / (2 * step)
    return out


BUILTIN = {"linear1d": linear1d, "additive": additive, "bounded2d": bounded2d}
