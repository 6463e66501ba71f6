"""The five comparison tests: Lilliefors, Jarque-Bera, Shapiro-Wilk,
Anderson-Darling and D'Agostino-Pearson.

Every test has a row-wise statistic function (``*_rows``) working on a 2-D
array of samples, which the Monte Carlo harness calls directly, and a
single-sample wrapper returning a :class:`TestResult`. Central moments use
divisor n and kurtosis is the raw (non-excess) ``m4 / m2**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from .epps_pulley import EpCriticalTable, _check_table_alpha
from .errors import DegenerateSample, TooLarge, TooSmall
from .stat_core import SampleLike, as_sample, studentize_rows

TEST_NAMES = ("ECFT", "EP", "LL", "JB", "SW", "AD", "DP")


@dataclass(frozen=True)
class TestResult:
    """Outcome of one normality test on one sample.

    ``p_value`` is None for the table-calibrated tests (EP, LL, AD), which
    carry ``critical_value`` instead.
    """

    __test__ = False  # not a pytest class

    test_name: str
    statistic: float
    p_value: Optional[float]
    reject: bool
    alpha: float
    n: int
    critical_value: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "test_name": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "n": self.n,
        }


def _rows(x) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(np.ptp(x, axis=-1) == 0):
        raise DegenerateSample("sample has zero variance")
    return x


def _need(n: int, lo: int, name: str, hi: Optional[int] = None) -> None:
    if n < lo:
        raise TooSmall(f"{name} needs n >= {lo}, got {n}")
    if hi is not None and n > hi:
        raise TooLarge(f"{name} supports n <= {hi}, got {n}")


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def skew_kurt_rows(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    d = x - x.mean(axis=-1, keepdims=True)
    d2 = d * d
    m2 = d2.mean(axis=-1)
    m3 = (d2 * d).mean(axis=-1)
    m4 = (d2 * d2).mean(axis=-1)
    return m3 / m2**1.5, m4 / (m2 * m2)


# -- Jarque-Bera -------------------------------------------------------------

def jb_rows(x) -> np.ndarray:
    x = _rows(x)
    n = x.shape[-1]
    s, k = skew_kurt_rows(x)
    return n * (s * s / 6.0 + (k - 3.0) ** 2 / 24.0)


def jarque_bera(sample: SampleLike, alpha: float = 0.05, calibration: str = "simulated",
                crit: Optional[EpCriticalTable] = None) -> TestResult:
    """Jarque-Bera test.

    ``calibration="simulated"`` (default) compares JB with a simulated
    finite-n 0.95 quantile; the chi-square(2) limit is far too conservative
    below a few hundred observations (about 0.041 size at n = 50).
    ``calibration="chi2"`` gives the asymptotic p-value at any alpha.
    """
    if calibration == "simulated":
        return _table_test("JB", jb_rows, 8, sample, alpha, crit)
    if calibration != "chi2":
        raise ValueError(f"calibration must be 'simulated' or 'chi2', got {calibration!r}")
    s = as_sample(sample)
    _check_alpha(alpha)
    _need(s.n, 8, "Jarque-Bera")
    stat = float(jb_rows(s.values)[0])
    p = math.exp(-stat / 2.0)  # chi-square(2) survival function
    return TestResult("JB", stat, p, p < alpha, alpha, s.n)


# -- D'Agostino-Pearson ------------------------------------------------------

def skew_z(b1: np.ndarray, n: int) -> np.ndarray:
    """D'Agostino's normalizing transform of the sample skewness."""
    y = b1 * math.sqrt((n + 1) * (n + 3) / (6.0 * (n - 2)))
    beta2 = 3.0 * (n * n + 27 * n - 70) * (n + 1) * (n + 3) / ((n - 2.0) * (n + 5) * (n + 7) * (n + 9))
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    a = math.sqrt(2.0 / (w2 - 1.0))
    return delta * np.arcsinh(y / a)


def kurt_z(b2: np.ndarray, n: int) -> np.ndarray:
    """Anscombe-Glynn normalizing transform of the raw sample kurtosis."""
    mean = 3.0 * (n - 1) / (n + 1)
    var = 24.0 * n * (n - 2) * (n - 3) / ((n + 1) ** 2 * (n + 3) * (n + 5))
    x = (b2 - mean) / math.sqrt(var)
    root_beta1 = (6.0 * (n * n - 5 * n + 2) / ((n + 7) * (n + 9))
                  * math.sqrt(6.0 * (n + 3) * (n + 5) / (n * (n - 2) * (n - 3))))
    a = 6.0 + 8.0 / root_beta1 * (2.0 / root_beta1 + math.sqrt(1.0 + 4.0 / root_beta1**2))
    denom = 1.0 + x * math.sqrt(2.0 / (a - 4.0))
    term2 = np.sign(denom) * np.cbrt((1.0 - 2.0 / a) / np.abs(denom))
    return (1.0 - 2.0 / (9.0 * a) - term2) / math.sqrt(2.0 / (9.0 * a))


def dp_rows(x) -> np.ndarray:
    x = _rows(x)
    n = x.shape[-1]
    s, k = skew_kurt_rows(x)
    with np.errstate(divide="ignore"):
        return skew_z(s, n) ** 2 + kurt_z(k, n) ** 2


def dagostino_pearson(sample: SampleLike, alpha: float = 0.05) -> TestResult:
    s = as_sample(sample)
    _check_alpha(alpha)
    _need(s.n, 20, "D'Agostino-Pearson")
    stat = float(dp_rows(s.values)[0])
    p = math.exp(-stat / 2.0)
    return TestResult("DP", stat, p, p < alpha, alpha, s.n)


# -- Shapiro-Wilk (Royston's approximation) ----------------------------------

_SW_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_SW_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582663)
_SW_SMALL_GAMMA = (-2.273, 0.459)
_SW_SMALL_MEAN = (0.5440, -0.39978, 0.025054, -0.6714e-3)
_SW_SMALL_LOGSD = (1.3822, -0.77857, 0.062767, -0.20322e-2)
_SW_LARGE_MEAN = (-1.5861, -0.31082, -0.083751, 0.0038915)
_SW_LARGE_LOGSD = (-0.4803, -0.082676, 0.0030302)
SW_MAX_N = 5000


def _poly(c, x):
    return sum(ci * x**i for i, ci in enumerate(c))


@lru_cache(maxsize=64)
def sw_coefficients(n: int) -> np.ndarray:
    """Antisymmetric Shapiro-Wilk weights for sorted data of size n."""
    _need(n, 3, "Shapiro-Wilk", SW_MAX_N)
    if n == 3:
        a = np.array([-math.sqrt(0.5), 0.0, math.sqrt(0.5)])
    else:
        m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
        summ2 = float(m @ m)
        c = m / math.sqrt(summ2)
        u = 1.0 / math.sqrt(n)
        a = np.empty(n)
        a[-1] = c[-1] + _poly(_SW_C1, u)
        if n > 5:
            a[-2] = c[-2] + _poly(_SW_C2, u)
            phi = (summ2 - 2 * m[-1] ** 2 - 2 * m[-2] ** 2) / (1 - 2 * a[-1] ** 2 - 2 * a[-2] ** 2)
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[:2] = -a[-1:-3:-1]
        else:
            phi = (summ2 - 2 * m[-1] ** 2) / (1 - 2 * a[-1] ** 2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[0] = -a[-1]
    a.flags.writeable = False
    return a


def sw_rows(x) -> np.ndarray:
    x = _rows(x)
    n = x.shape[-1]
    a = sw_coefficients(n)
    y = np.sort(x, axis=-1)
    y = y - y.mean(axis=-1, keepdims=True)
    num = (y * a).sum(axis=-1)
    return np.minimum(num * num / (y * y).sum(axis=-1), 1.0)


def sw_pvalue(w, n: int):
    """Upper-tail p-value of W for sample size n (Royston 1992 normalization)."""
    w = np.asarray(w, dtype=float)
    if n == 3:
        p = 6.0 / math.pi * (np.arcsin(np.sqrt(w)) - math.pi / 3.0)
        return np.clip(p, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        y = np.log1p(-w)
        if n <= 11:
            gamma = _poly(_SW_SMALL_GAMMA, n)
            mean = _poly(_SW_SMALL_MEAN, n)
            sd = math.exp(_poly(_SW_SMALL_LOGSD, n))
            # W so small that log(1 - W) passes gamma: p is effectively zero.
            z = np.where(y < gamma, (-np.log(gamma - y) - mean) / sd, np.inf)
        else:
            ln = math.log(n)
            mean = _poly(_SW_LARGE_MEAN, ln)
            sd = math.exp(_poly(_SW_LARGE_LOGSD, ln))
            z = (y - mean) / sd
    return ndtr(-z)


def shapiro_wilk(sample: SampleLike, alpha: float = 0.05) -> TestResult:
    s = as_sample(sample)
    _check_alpha(alpha)
    _need(s.n, 3, "Shapiro-Wilk", SW_MAX_N)
    w = float(sw_rows(s.values)[0])
    p = float(sw_pvalue(w, s.n))
    return TestResult("SW", w, p, p < alpha, alpha, s.n)


# -- Anderson-Darling ---------------------------------------------------------

def ad_rows(x) -> np.ndarray:
    """Modified statistic A*^2 = A^2 (1 + 0.75/n + 2.25/n^2), parameters estimated."""
    x = _rows(x)
    n = x.shape[-1]
    z = np.sort(studentize_rows(x), axis=-1)
    # log_ndtr keeps both tails accurate, so no clamping of Phi is needed.
    w = 2.0 * np.arange(1, n + 1) - 1.0
    s = (w * (log_ndtr(z) + log_ndtr(-z[..., ::-1]))).sum(axis=-1)
    a2 = -n - s / n
    return a2 * (1.0 + 0.75 / n + 2.25 / n**2)


# -- Lilliefors ---------------------------------------------------------------

def ll_rows(x) -> np.ndarray:
    x = _rows(x)
    n = x.shape[-1]
    cdf = ndtr(np.sort(studentize_rows(x), axis=-1))
    i = np.arange(1, n + 1)
    d_plus = (i / n - cdf).max(axis=-1)
    d_minus = (cdf - (i - 1) / n).max(axis=-1)
    return np.maximum(d_plus, d_minus)


@lru_cache(maxsize=None)
def shipped_table(name: str) -> EpCriticalTable:
    """Cached null 0.95 quantiles shipped with the package ("LL", "AD" or "JB")."""
    fname = {"LL": "ll_critical.csv", "AD": "ad_critical.csv", "JB": "jb_critical.csv"}[name]
    text = resources.files("ecfnorm").joinpath("data", fname).read_text(encoding="utf-8")
    return EpCriticalTable.from_csv(text, sqrt_n_scaled=(name == "LL"))


def _table_test(name, stat_fn, min_n, sample, alpha, table):
    s = as_sample(sample)
    table = table or shipped_table(name)
    _check_table_alpha(alpha, table)
    _need(s.n, min_n, name)
    stat = float(stat_fn(s.values)[0])
    crit = table.critical_value(s.n)
    return TestResult(name, stat, None, stat > crit, alpha, s.n, crit)


def lilliefors(sample: SampleLike, alpha: float = 0.05, crit: Optional[EpCriticalTable] = None) -> TestResult:
    return _table_test("LL", ll_rows, 4, sample, alpha, crit)


def anderson_darling(sample: SampleLike, alpha: float = 0.05, crit: Optional[EpCriticalTable] = None) -> TestResult:
    return _table_test("AD", ad_rows, 8, sample, alpha, crit)
