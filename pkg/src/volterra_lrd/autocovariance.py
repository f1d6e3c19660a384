"""Stationary autocovariance from a tabulated resolvent.

``c(t) = sigma^2 int_0^inf r(s) r(s + t) ds`` (continuous) or
``c(h) = sigma^2 sum_n r_n r_{n+h}`` (discrete).  The tabulation is finite, so
the neglected tail is replaced by the integral of a power law ``C t^mu`` fitted
to the last decade of the table.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .exceptions import DomainError
from .resolvent import ResolventGrid


@dataclass(frozen=True)
class PowerTailFit:
    """``r(t) ~ coefficient * t**exponent`` on ``[t_lo, t_hi]``."""

    exponent: float
    log_coefficient: float
    t_lo: float
    t_hi: float

    @property
    def coefficient(self) -> float:
        return math.exp(min(self.log_coefficient, 709.0))

    def __call__(self, t):
        return np.exp(self.log_coefficient + self.exponent * np.log(t))


@dataclass(frozen=True, eq=False)
class CovarianceSeries:
    lags: np.ndarray
    c: np.ndarray
    sigma: float
    tail_method: Optional[PowerTailFit]
    truncation_T: float
    tail_correction: np.ndarray = field(repr=False)

    @property
    def fitted_exponent(self) -> Optional[float]:
        return None if self.tail_method is None else self.tail_method.exponent

    @property
    def c_exponent(self) -> Optional[float]:
        """Regular-variation index ``2 mu + 1`` of ``c`` implied by the fit (valid for ``mu > -1``)."""
        mu = self.fitted_exponent
        return None if mu is None else 2.0 * mu + 1.0

    @property
    def long_memory(self) -> bool:
        """True when the implied decay of ``c`` is not integrable (index above -1)."""
        mu = self.fitted_exponent
        return mu is not None and mu > -1.0

    def value(self, lag) -> float:
        i = int(np.nonzero(np.isclose(self.lags, lag, rtol=0, atol=1e-9 * max(1.0, abs(lag))))[0][0])
        return float(self.c[i])

    def summary(self) -> dict:
        return {
            "sigma": self.sigma,
            "truncation_T": self.truncation_T,
            "fitted_exponent": self.fitted_exponent,
            "fitted_coefficient": None if self.tail_method is None else self.tail_method.coefficient,
            "c_exponent": self.c_exponent,
            "long_memory": self.long_memory,
        }


def fit_power_tail(t, r) -> Optional[PowerTailFit]:
    """Least-squares fit of ``log r`` against ``log t`` on the last decade ``[T/10, T]``.

    Returns None if fewer than two positive samples lie in the window.
    """
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    T = t[-1]
    sel = (t >= T / 10.0) & (t > 0) & (r > 0)
    if np.count_nonzero(sel) < 2:
        return None
    slope, icpt = np.polyfit(np.log(t[sel]), np.log(r[sel]), 1)
    return PowerTailFit(float(slope), float(icpt), float(T / 10.0), float(T))


def _tail_pair_integral(fit: PowerTailFit, start: float, lag: float) -> float:
    """``int_start^inf C^2 s^mu (s + lag)^mu ds`` for ``2 mu < -1``."""
    mu = fit.exponent
    if start <= 0:
        raise DomainError("tail must start at a positive time")
    p = 2.0 * mu + 1.0
    scale = math.exp(2.0 * fit.log_coefficient + p * math.log(start))
    if lag == 0:
        return scale / -p
    # s = start * x keeps the integrand O(1)
    q = lag / start
    with warnings.catch_warnings():
        # steep fits underflow the integrand long before quad's error estimate settles
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(lambda x: x ** mu * (x + q) ** mu, 1.0, np.inf,
                                epsabs=0, epsrel=1e-12, limit=200)
    return scale * val


def _check_square_integrable(fit: Optional[PowerTailFit]):
    if fit is not None and fit.exponent >= -0.5:
        raise DomainError(
            f"fitted decay exponent {fit.exponent:.4f} >= -1/2: the resolvent is not square "
            "integrable and no stationary solution exists")


def autocov_continuous(res: ResolventGrid, sigma: float, lags) -> CovarianceSeries:
    """Trapezoid quadrature of ``sigma^2 int_0^{T-lag} r(s) r(s+lag) ds`` plus a fitted tail.

    Parameters
    ----------
    res : ResolventGrid
        Continuous-time tabulation of ``r``.
    sigma : float
        Noise intensity.
    lags : array_like
        Lags in time units; each must be a grid point not exceeding ``T/2``.

    Returns
    -------
    CovarianceSeries
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    h = res.grid.step
    T = res.grid.t_max
    r = np.asarray(res.r, dtype=float)
    t = res.times
    lags = np.atleast_1d(np.asarray(lags, dtype=float))
    if np.any(lags < 0) or np.any(lags > T / 2 + 1e-9 * T):
        raise DomainError(f"lags must lie in [0, T/2] = [0, {T / 2}]")
    fit = fit_power_tail(t, r)
    _check_square_integrable(fit)
    c = np.empty(lags.size)
    tail = np.zeros(lags.size)
    for i, lag in enumerate(lags):
        m = res.grid.index(lag)
        x, y = r[: r.size - m], r[m:]
        body = h * (np.dot(x, y) - 0.5 * (x[0] * y[0] + x[-1] * y[-1]))
        if fit is not None:
            tail[i] = _tail_pair_integral(fit, T - lag, lag)
        c[i] = sigma * sigma * (body + tail[i])
    return CovarianceSeries(lags, c, float(sigma), fit, float(T), sigma * sigma * tail)


def autocov_discrete(r_seq, sigma: float, lags, M: Optional[int] = None) -> CovarianceSeries:
    """``sigma^2 (sum_{n=0}^{M} r_n r_{n+h} + tail)`` with a power-law tail beyond ``M``.

    The tail ``sum_{n>M} C^2 n^mu (n+h)^mu`` is replaced by the midpoint-rule
    integral from ``M + 1/2``.  ``M`` defaults to the largest value the table
    supports for the requested lags.

    Examples
    --------
    >>> s = autocov_discrete(0.5 ** np.arange(200), 1.0, [0, 1])
    >>> np.round(s.c, 12)
    array([1.333333333333, 0.666666666667])
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    r = np.asarray(r_seq, dtype=float)
    lags = np.atleast_1d(np.asarray(lags))
    if lags.size and (np.any(lags < 0) or np.any(lags != np.round(lags))):
        raise DomainError("discrete lags must be nonnegative integers")
    lags = lags.astype(np.int64)
    max_lag = int(lags.max()) if lags.size else 0
    if M is None:
        M = r.size - 1 - max_lag
    if M < 1 or M + max_lag > r.size - 1:
        raise DomainError(f"M={M} must satisfy 1 <= M <= len(r) - 1 - max_lag = {r.size - 1 - max_lag}")
    n = np.arange(r.size, dtype=float)
    fit = fit_power_tail(n[1:], r[1:])
    _check_square_integrable(fit)
    c = np.empty(lags.size)
    tail = np.zeros(lags.size)
    for i, lag in enumerate(lags):
        body = float(np.dot(r[: M + 1], r[lag: lag + M + 1]))
        if fit is not None:
            tail[i] = _tail_pair_integral(fit, M + 0.5, float(lag))
        c[i] = sigma * sigma * (body + tail[i])
    return CovarianceSeries(lags, c, float(sigma), fit, float(M), sigma * sigma * tail)


def write_csv(path, series: CovarianceSeries):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["lag", "c", "tail_correction"])
        for lag, c, tc in zip(series.lags, series.c, series.tail_correction):
            out.writerow([f"{lag:.17g}", f"{c:.17g}", f"{tc:.17g}"])


def write_summary(path, series: CovarianceSeries):
    with open(path, "w") as fh:
        json.dump(series.summary(), fh, indent=2)
