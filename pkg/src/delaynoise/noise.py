"""Stationary Ornstein-Uhlenbeck colored noise.

Each channel solves ``dy = -(1/tau) y dt + (1/tau) dW`` with ``tau = k * eps``.
The stationary law is ``N(0, 1/(2 tau))`` and the autocovariance is
``exp(-|lag|/tau) / (2 tau)``.

Two ways of advancing the noise are provided:

* ``ou_step_exact`` samples the Gaussian transition exactly and is used for
  standalone statistics.
* ``ou_step_shared`` is the Euler step driven by a given Wiener increment. It
  is what coupled runs use, because the same increment then also drives the
  limiting white-noise SDE.
"""
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import DimensionMismatch, StepTooLarge

#: ``ou_step_shared`` refuses steps larger than this fraction of the smallest tau.
SHARED_STEP_FRACTION = 0.1


@dataclass(frozen=True)
class OUParams:
    k: float
    eps: float

    def __post_init__(self):
        if not (self.k > 0 and self.eps > 0):
            raise ValueError(f"k and eps must be positive, got k={self.k}, eps={self.eps}")

    @property
    def tau(self):
        return self.k * self.eps

    @property
    def stationary_variance(self):
        return 1.0 / (2.0 * self.tau)


@dataclass
class NoiseState:
    y: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.y = np.atleast_1d(np.asarray(self.y, dtype=float))

    def check(self, n):
        if self.y.shape[-1] != n:
            raise DimensionMismatch(f"noise state has {self.y.shape[-1]} channels, model has {n}")


def ou_stationary_sample(params, rng, size=None):
    """Draw from the stationary law N(0, 1/(2 tau))."""
    return rng.normal(0.0, np.sqrt(params.stationary_variance), size=size)


def _exact_coefficients(h, tau):
    decay = np.exp(-h / tau)
    scale = np.sqrt(-np.expm1(-2.0 * h / tau) / (2.0 * tau))
    return decay, scale


def ou_step_exact(y, h, tau, z):
    """Exact OU transition over a step ``h`` given a standard normal ``z``."""
    if np.any(np.asarray(tau) <= 0):
        raise ValueError("tau must be positive")
    if np.any(np.asarray(h) < 0):
        raise ValueError("h must be nonnegative")
    decay, scale = _exact_coefficients(h, tau)
    return decay * y + scale * z


def check_shared_step(h, taus):
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    limit = SHARED_STEP_FRACTION * taus.min()
    # relative slack so that h = tau/10 computed in floating point is accepted
    if h > limit * (1 + 1e-9):
        raise StepTooLarge(f"step h={h:g} exceeds min(tau)/10 = {limit:g}")


def ou_step_shared(y, h, taus, dW):
    """One Euler step of the OU equation driven by the Wiener increment ``dW``."""
    taus = np.asarray(taus, dtype=float)
    check_shared_step(h, taus)
    y = np.asarray(y, dtype=float)
    return y + h * (-y / taus) + np.asarray(dW) / taus


def ou_path_shared(y0, h, taus, increments):
    """Iterate ``ou_step_shared`` over a whole increment array.

    ``y0`` has shape ``(B, n)`` and ``increments`` shape ``(B, N, n)``; the
    result has shape ``(B, N + 1, n)`` with ``y0`` in slot 0. The recursion is
    linear, so it is run as an AR(1) filter rather than a Python loop.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    check_shared_step(h, taus)
    y0 = np.atleast_2d(np.asarray(y0, dtype=float))
    increments = np.asarray(increments, dtype=float)
    if increments.ndim != 3 or increments.shape[2] != taus.size or y0.shape != (increments.shape[0], taus.size):
        raise DimensionMismatch(
            f"expected y0 (B, {taus.size}) and increments (B, N, {taus.size}), "
            f"got {y0.shape} and {increments.shape}"
        )
    B, N, n = increments.shape
    out = np.empty((B, N + 1, n))
    out[:, 0, :] = y0
    for j, tau in enumerate(taus):
        rho = 1.0 - h / tau
        if N:
            out[:, 1:, j], _ = lfilter([1.0], [1.0, -rho], increments[:, :, j] / tau, axis=1,
                                       zi=(rho * y0[:, j])[:, None])
    return out


def ou_path_exact(y0, h, tau, z):
    """Iterate ``ou_step_exact`` along the last axis of ``z``; returns N + 1 points."""
    z = np.asarray(z, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    decay, scale = _exact_coefficients(h, tau)
    out = np.empty(z.shape[:-1] + (z.shape[-1] + 1,))
    out[..., 0] = y0
    if z.shape[-1]:
        out[..., 1:], _ = lfilter([scale], [1.0, -decay], z, axis=-1, zi=(decay * y0)[..., None])
    return out


def ou_autocovariance(tau, lag):
    return np.exp(-np.abs(lag) / tau) / (2.0 * tau)


def wick_product_second_moment(kj, kl, same_index, eps, lag):
    """E[(eps * y_j(t) * y_l(s))**2] for stationary channels, ``lag = t - s``.

    Wick's theorem gives the product of the variances plus, for a single
    channel, twice the squared covariance.
    """
    value = 1.0 / (4.0 * kj * kl)
    if same_index:
        value = value + np.exp(-2.0 * np.abs(lag) / (kj * eps)) / (2.0 * kj**2)
    return value


def psi(j, l, p, k, c):
    """Stationary mean of ``k_j eps y_j(u) y_l(u - c_p eps)``."""
    k = np.asarray(k, dtype=float)
    c = np.asarray(c, dtype=float)
    if j != l:
        return 0.0
    return 0.5 * float(np.exp(-c[p] / k[j]))
