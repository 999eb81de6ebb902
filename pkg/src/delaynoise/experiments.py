"""Monte Carlo studies built on the integrators.

* coupled convergence of the delayed colored-noise system to its limit
* exact versus Taylor drift comparison
* diagnostics of the noise itself: centered lagged-product integrals and
  sup-moments of ``eps * y``
* Welch spectra and the white-versus-OU realizations
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal, stats

from .errors import PathTooShort, ValidationError
from .limit import DriftKind, integrate_ito_sde, integrate_stratonovich_heun
from .models import linear1d
from .noise import psi
from .sdde import (
    DelaySchedule,
    Path,
    build_wiener,
    constant_past,
    default_t_minus,
    integrate_sdde,
    noise_path,
)

DEFAULT_H_RATIO = 100
DEFAULT_NPERSEG = 2**12
MIN_CONVERGENCE_TRIALS = 50
MIN_MOMENT_TRIALS = 100


def wilson_interval(successes, trials, confidence=0.95):
    ci = stats.binomtest(int(successes), int(trials)).proportion_ci(confidence_level=confidence, method="wilson")
    return ci.low, ci.high


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / math.sqrt(values.size) if values.size > 1 else 0.0
    return float(values.mean()), float(se)


def _sup_distance(p, q):
    return np.linalg.norm(p.states - q.states, axis=2).max(axis=1)


def coupled_sup_errors(model, sched, seed, h, T, trials=(0,), kinds=(DriftKind.EXACT,), x0=None):
    """Sup-norm distance on ``[0, T]`` between the delayed system and its limits.

    One Wiener grid on ``[t_minus, T]`` drives the delayed system and every
    requested limit equation. Returns ``{kind: array of shape (len(trials),)}``.
    """
    if not model.bounded:
        warnings.warn(f"model {model.name} does not satisfy the boundedness hypotheses", stacklevel=2)
    t_minus = default_t_minus(sched, h)
    x0 = np.zeros(model.m) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    past = constant_past(x0, t_minus)
    wiener = build_wiener(seed, t_minus, T, h, model.n, trials)
    x_eps, _ = integrate_sdde(model, sched, past, wiener, h)
    return {DriftKind(kind): _sup_distance(x_eps, integrate_ito_sde(model, sched, kind, x0, wiener, h))
            for kind in kinds}


def coupled_sup_error(model, sched, seed, h, T):
    return float(coupled_sup_errors(model, sched, seed, h, T)[DriftKind.EXACT][0])


@dataclass
class ConvergenceReport:
    eps_list: list
    a: float
    trials: int
    p_hat: np.ndarray
    wilson_lo: np.ndarray
    wilson_hi: np.ndarray
    mean_sup_error: np.ndarray
    se: np.ndarray

    def p_hat_nonincreasing(self):
        """Each step down the schedule either lowers p_hat or keeps Wilson intervals overlapping."""
        for i in range(len(self.eps_list) - 1):
            if self.p_hat[i + 1] > self.p_hat[i] and self.wilson_lo[i + 1] > self.wilson_hi[i]:
                return False
        return True

    def rows(self):
        return [
            (self.eps_list[i], self.p_hat[i], self.wilson_lo[i], self.wilson_hi[i], self.mean_sup_error[i], self.se[i])
            for i in range(len(self.eps_list))
        ]


def _check_eps_list(eps_list):
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list) or any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValidationError(f"eps_list must be positive and strictly decreasing, got {eps_list}")
    return eps_list


def convergence_experiment(model, sched, eps_list, trials, a, T, base_seed, h_ratio=DEFAULT_H_RATIO):
    """Exceedance probability ``P[sup |x_eps - x| > a]`` along a decreasing eps schedule.

    Trial ``i`` uses the RNG key ``(base_seed, i)`` for every eps; the step is
    ``h = eps / h_ratio``.
    """
    eps_list = _check_eps_list(eps_list)
    if trials < MIN_CONVERGENCE_TRIALS:
        raise ValidationError(f"convergence needs at least {MIN_CONVERGENCE_TRIALS} trials")
    if not a > 0:
        raise ValidationError("threshold a must be positive")
    p_hat, lo, hi, means, ses = [], [], [], [], []
    for eps in eps_list:
        errs = coupled_sup_errors(model, sched.with_eps(eps), base_seed, eps / h_ratio, T, range(trials))[DriftKind.EXACT]
        hits = int(np.sum(errs > a))
        p_hat.append(hits / trials)
        wl, wh = wilson_interval(hits, trials)
        lo.append(wl)
        hi.append(wh)
        m, s = _mean_se(errs)
        means.append(m)
        ses.append(s)
    return ConvergenceReport(eps_list, a, trials, *map(np.asarray, (p_hat, lo, hi, means, ses)))


@dataclass
class FalsificationReport:
    eps: float
    err_exact: np.ndarray
    err_taylor: np.ndarray

    @property
    def mean_err_exact(self):
        return _mean_se(self.err_exact)[0]

    @property
    def mean_err_taylor(self):
        return _mean_se(self.err_taylor)[0]

    @property
    def se_exact(self):
        return _mean_se(self.err_exact)[1]

    @property
    def se_taylor(self):
        return _mean_se(self.err_taylor)[1]

    def paired_test(self):
        """One-sided paired t-test of ``exact < taylor``; returns ``(t, p)``."""
        diff = self.err_exact - self.err_taylor
        if np.all(diff == 0):
            return 0.0, 1.0
        res = stats.ttest_rel(self.err_exact, self.err_taylor, alternative="less")
        return float(res.statistic), float(res.pvalue)


def drift_falsification(model, sched, eps, trials, T, base_seed, h_ratio=DEFAULT_H_RATIO):
    """Couple the delayed system against the exact-drift and Taylor-drift limits."""
    if trials < 2:
        raise ValidationError("a paired comparison needs at least 2 trials")
    s = sched.with_eps(eps)
    errs = coupled_sup_errors(model, s, base_seed, eps / h_ratio, T, range(trials),
                              kinds=(DriftKind.EXACT, DriftKind.TAYLOR))
    return FalsificationReport(eps, errs[DriftKind.EXACT], errs[DriftKind.TAYLOR])


def _stationary_noise(sched, T, h, seed, trials, lag_back=0.0):
    """Noise on ``[-t_back, T]``; returns (y array, index of time 0)."""
    back = max(lag_back, sched.max_delay)
    n_back = max(math.ceil(back / h - 1e-9), 1)
    wiener = build_wiener(seed, -n_back * h, T, h, len(sched.k), trials)
    return noise_path(sched, wiener).states, n_back


def _lagged_products(sched, indices, T, h, seed, trials):
    """``k_j eps y_j(u) y_l(u - c_p eps)`` at the grid times ``u`` in ``[0, T)``."""
    j, l, p = indices
    lag = sched.c[p] * sched.eps
    y, n0 = _stationary_noise(sched, T, h, seed, trials, lag_back=lag)
    idx = n0 + np.arange(int(round(T / h)))
    steps = lag / h
    lo = int(math.floor(steps + 1e-9))
    w = steps - lo
    back = y[:, idx - lo, l]
    if w > 1e-9:
        back = (1 - w) * back + w * y[:, idx - lo - 1, l]
    return sched.k[j] * sched.eps * y[:, idx, j] * back


def g_process_sups(sched, indices, T, h, seed, trials=(0,), center=True):
    """Sup over ``[0, T]`` of ``|int_0^t (k_j eps y_j(u) y_l(u - c_p eps) - Psi) du|`` per trial.

    The integral is a left Riemann sum on the noise grid. With ``center=False``
    the stationary mean Psi is not subtracted.
    """
    trials = tuple(trials)
    if T == 0:
        return np.zeros(len(trials))
    integrand = _lagged_products(sched, indices, T, h, seed, trials)
    if center:
        integrand = integrand - psi(*indices, sched.k, sched.c)
    G = np.cumsum(integrand, axis=1) * h
    return np.abs(G).max(axis=1)


def g_process_sup(sched, indices, T, h, seed):
    return float(g_process_sups(sched, indices, T, h, seed)[0])


def lagged_product_average(sched, indices, T, h, seed, trials=(0,)):
    """Time average over ``[0, T]`` of ``k_j eps y_j(u) y_l(u - c_p eps)``."""
    return _lagged_products(sched, indices, T, h, seed, tuple(trials)).mean(axis=1)


@dataclass
class EstimateReport:
    eps_list: list
    estimate: np.ndarray
    se: np.ndarray

    def rows(self):
        return [(e, v, s) for e, v, s in zip(self.eps_list, self.estimate, self.se)]

    def halving_ratios(self):
        return self.estimate[1:] / self.estimate[:-1]

    def loglog_slope(self):
        return float(np.polyfit(np.log(self.eps_list), np.log(self.estimate), 1)[0])


@dataclass
class GStatReport(EstimateReport):
    indices: tuple = (0, 0, 0)

    @property
    def mean_sup_G_sq(self):
        return self.estimate


def g_stat_experiment(sched, indices, eps_list, trials, T, base_seed, h_ratio=DEFAULT_H_RATIO):
    """Estimate ``E[sup |G|^2]`` for each eps."""
    eps_list = _check_eps_list(eps_list)
    est, ses = [], []
    for eps in eps_list:
        sups = g_process_sups(sched.with_eps(eps), indices, T, eps / h_ratio, base_seed, range(trials))
        m, s = _mean_se(sups**2)
        est.append(m)
        ses.append(s)
    return GStatReport(eps_list, np.asarray(est), np.asarray(ses), tuple(indices))


def eps_y_sup_moment(sched, eps_list, T, trials, base_seed, h_ratio=DEFAULT_H_RATIO):
    """Estimate ``E[sup_{[0,T]} |eps y|^2]`` for each eps."""
    eps_list = _check_eps_list(eps_list)
    if trials < MIN_MOMENT_TRIALS:
        raise ValidationError(f"the moment estimate needs at least {MIN_MOMENT_TRIALS} trials")
    est, ses = [], []
    for eps in eps_list:
        h = eps / h_ratio
        s = sched.with_eps(eps)
        y, n0 = _stationary_noise(s, T, h, base_seed, range(trials))
        sq = np.sum((eps * y[:, n0:, :]) ** 2, axis=2)
        m, se = _mean_se(sq.max(axis=1))
        est.append(m)
        ses.append(se)
    return EstimateReport(eps_list, np.asarray(est), np.asarray(ses))


def spectrum_periodogram(path, h, nperseg=DEFAULT_NPERSEG):
    """Welch estimate of the two-sided power spectral density in angular frequency.

    Accepts a ``Path`` (trial 0, component 0 is used) or a 1-d array. The
    returned density integrates to the variance over ``omega`` in
    ``(-inf, inf)``, which is the convention of ``lorentzian_psd``.
    """
    series = path.states[0, :, 0] if isinstance(path, Path) else np.asarray(path, dtype=float)
    if series.size < nperseg:
        raise PathTooShort(f"series of length {series.size} is shorter than one segment ({nperseg})")
    f, p1 = signal.welch(series, fs=1.0 / h, window="hann", nperseg=nperseg,
                         noverlap=nperseg // 2, detrend=False, scaling="density")
    two_sided = p1 / 2.0
    two_sided[0] = p1[0]
    if nperseg % 2 == 0:
        two_sided[-1] = p1[-1]
    return 2 * np.pi * f, two_sided / (2 * np.pi)


def lorentzian_psd(omega, tau):
    return (1 / tau**2) / (2 * np.pi * (np.asarray(omega) ** 2 + 1 / tau**2))


def fit_lorentzian(omega, power, omega_max=None):
    """Least-squares fit of ``P0 w_c^2 / (omega^2 + w_c^2)`` in log space.

    Returns ``(P0, w_c)``.
    """
    omega = np.asarray(omega)
    power = np.asarray(power)
    keep = (omega > 0) & (power > 0)
    if omega_max is not None:
        keep &= omega <= omega_max
    w, pw = omega[keep], power[keep]

    def log_model(w, log_p0, log_wc):
        wc2 = np.exp(2 * log_wc)
        return log_p0 + np.log(wc2) - np.log(w**2 + wc2)

    guess = (np.log(pw[:5].mean()), np.log(w[len(w) // 10]))
    (log_p0, log_wc), _ = optimize.curve_fit(log_model, w, np.log(pw), p0=guess)
    return float(np.exp(log_p0)), float(np.exp(log_wc))


def band_flatness(omega, power, n_bands=16):
    """Max/min ratio of band-averaged power over the lower half of the spectrum (DC excluded)."""
    half = power[1 : len(power) // 2]
    bands = np.array_split(half, n_bands)
    means = np.array([b.mean() for b in bands])
    if means.min() <= 0:
        return math.inf
    return float(means.max() / means.min())


def white_noise_series(seed, n_samples, h):
    """Scaled Wiener increments ``dW / sqrt(h)`` (unit variance samples)."""
    w = build_wiener(seed, 0.0, n_samples * h, h, 1)
    return w.increments[0, :, 0] / math.sqrt(h)


def ou_series(seed, n_samples, h, tau):
    """Stationary OU series sampled with exact transitions."""
    from .noise import OUParams, ou_path_exact, ou_stationary_sample
    from .rng import AUX, stream

    g = stream(seed, 0, AUX, 0)
    y0 = ou_stationary_sample(OUParams(tau, 1.0), g)
    return ou_path_exact(y0, h, tau, g.standard_normal(n_samples - 1))


def fig1_realizations(a, b, c, tau, T, seed, trials=(0,), h=None, x0=0.0, white_kind=DriftKind.NONE):
    """Linear system ``dx = a x dt + (b x + c) xi dt`` driven by OU noise and by white noise.

    Both paths share one Wiener grid; the white-noise path is the Ito
    equation with drift correction ``white_kind`` (none by default).
    """
    model = linear1d(a, b, c)
    h = tau / DEFAULT_H_RATIO if h is None else h
    sched = DelaySchedule((0.0,), (1.0,), tau)
    t_minus = default_t_minus(sched, h)
    wiener = build_wiener(seed, t_minus, T, h, 1, trials)
    ou_driven, _ = integrate_sdde(model, sched, constant_past([x0], t_minus), wiener, h)
    white_driven = integrate_ito_sde(model, sched, white_kind, [x0], wiener, h)
    return ou_driven, white_driven


def stratonovich_coupled(model, tau, T, seed, trials=(0,), h=None, x0=None):
    """Undelayed OU-driven system against the Heun (Stratonovich) solution on a shared grid.

    Returns ``(sup_errors, ou_driven, heun)``.
    """
    h = tau / DEFAULT_H_RATIO if h is None else h
    sched = DelaySchedule((0.0,) * model.m, (1.0,) * model.n, tau)
    t_minus = default_t_minus(sched, h)
    x0 = np.zeros(model.m) if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    wiener = build_wiener(seed, t_minus, T, h, model.n, trials)
    ou_driven, _ = integrate_sdde(model, sched, constant_past(x0, t_minus), wiener, h)
    heun = integrate_stratonovich_heun(model, x0, wiener, h)
    return _sup_distance(ou_driven, heun), ou_driven, heun
