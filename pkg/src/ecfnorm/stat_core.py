"""Studentization, the empirical characteristic function and the single-point ECF test.

The test compares the modulus of the studentized ecf at one point ``t``
with the standard normal characteristic function ``exp(-t**2/2)``:

    v_n(t) = log|phi_S(t)| + t**2/2

Under normality ``sqrt(n) * v_n(t)`` is asymptotically ``N(0, c(t))`` with
``c(t) = cosh(t**2) - 1 - t**4/2``; at ``t = 1``, ``c = 0.0431``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence, Union

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateSample, EmptyInput, InvalidPoint, ZeroModulus

Divisor = Literal["n", "n-1"]
DIVISORS = ("n", "n-1")
DEFAULT_DIVISOR: Divisor = "n-1"


@dataclass(frozen=True)
class Sample:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValueError("a sample is one-dimensional")
        if v.size == 0:
            raise EmptyInput("sample is empty")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample contains NaN or infinite values")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size


SampleLike = Union[Sample, Sequence[float], np.ndarray]


def as_sample(x: SampleLike) -> Sample:
    return x if isinstance(x, Sample) else Sample(x)


@dataclass(frozen=True)
class StudentizedSample:
    z: np.ndarray
    mu_hat: float
    sigma_hat: float
    divisor_convention: Divisor

    @property
    def n(self) -> int:
        return self.z.size


@dataclass(frozen=True)
class EcfValue:
    re: float
    im: float
    t: float

    @property
    def modulus(self) -> float:
        return math.hypot(self.re, self.im)

    def conjugate(self) -> "EcfValue":
        return EcfValue(self.re, -self.im, self.t)


@dataclass(frozen=True)
class EcftResult:
    v_n: float
    t: float
    standardized: float
    p_value: float
    reject: bool
    alpha: float
    n: int

    def to_test_result(self):
        from .classical import TestResult

        return TestResult("ECFT", self.standardized, self.p_value, self.reject, self.alpha, self.n)


def _ddof(divisor: str) -> int:
    if divisor not in DIVISORS:
        raise ValueError(f"divisor must be one of {DIVISORS}, got {divisor!r}")
    return 0 if divisor == "n" else 1


def studentize_rows(x: np.ndarray, divisor: Divisor = DEFAULT_DIVISOR) -> np.ndarray:
    """Studentize each row of a 2-D array independently."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    if n < 2:
        raise DegenerateSample(f"need at least 2 observations, got {n}")
    mu = x.mean(axis=-1, keepdims=True)
    sigma = x.std(axis=-1, ddof=_ddof(divisor), keepdims=True)
    if np.any(sigma == 0):
        raise DegenerateSample("sample has zero variance")
    return (x - mu) / sigma


def studentize(sample: SampleLike, divisor: Divisor = DEFAULT_DIVISOR) -> StudentizedSample:
    s = as_sample(sample)
    if s.n < 2:
        raise DegenerateSample(f"need at least 2 observations, got {s.n}")
    mu = float(s.values.mean())
    sigma = float(s.values.std(ddof=_ddof(divisor)))
    # A constant sample can leave a rounding-level spread behind the mean.
    if sigma == 0 or np.ptp(s.values) == 0:
        raise DegenerateSample("sample has zero variance")
    return StudentizedSample((s.values - mu) / sigma, mu, sigma, divisor)


def ecf_at(values, t: float) -> EcfValue:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise EmptyInput("ecf of an empty sequence")
    tv = t * v
    return EcfValue(float(np.cos(tv).mean()), float(np.sin(tv).mean()), float(t))


def asymptotic_coeff(t: float) -> float:
    """c(t) = cosh(t^2) - 1 - t^4/2, so that Var(v_n(t)) ~ c(t)/n."""
    u = t * t
    if u > 2.0:
        return math.cosh(u) - 1.0 - u * u / 2.0
    # Tail of the cosh series; the closed form cancels badly for small t.
    term = u**4 / 24.0
    total = 0.0
    k = 2
    while term > 1e-18 * total or total == 0.0:
        total += term
        term *= u * u / ((2 * k + 1) * (2 * k + 2))
        k += 1
        if term == 0.0:
            break
    return total


def _check_point(t: float) -> None:
    if t == 0:
        raise InvalidPoint("t = 0 gives an identically zero statistic with zero variance")
    if not math.isfinite(t):
        raise InvalidPoint(f"t must be finite, got {t}")


def vn_rows(z: np.ndarray, t: float = 1.0) -> np.ndarray:
    """v_n(t) for each row of studentized data."""
    _check_point(t)
    tz = t * np.asarray(z, dtype=float)
    re = np.cos(tz).mean(axis=-1)
    im = np.sin(tz).mean(axis=-1)
    mod2 = re * re + im * im
    if np.any(mod2 == 0):
        raise ZeroModulus(f"ecf modulus is exactly zero at t = {t}")
    return 0.5 * np.log(mod2) + 0.5 * t * t


def vn_statistic(s: StudentizedSample, t: float = 1.0) -> float:
    _check_point(t)
    phi = ecf_at(s.z, t)
    mod2 = phi.re * phi.re + phi.im * phi.im
    if mod2 == 0:
        raise ZeroModulus(f"ecf modulus is exactly zero at t = {t}")
    return 0.5 * math.log(mod2) + 0.5 * t * t


def ecft_standardized_rows(x: np.ndarray, t: float = 1.0, divisor: Divisor = DEFAULT_DIVISOR) -> np.ndarray:
    """sqrt(n / c(t)) * v_n(t) for each row of raw data."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    return vn_rows(studentize_rows(x, divisor), t) * math.sqrt(n / asymptotic_coeff(t))


def two_sided_p(standardized):
    return 2.0 * ndtr(-np.abs(standardized))


def ecft_test(
    sample: SampleLike, t: float = 1.0, alpha: float = 0.05, divisor: Divisor = DEFAULT_DIVISOR
) -> EcftResult:
    """Single-point ECF normality test with the asymptotic normal calibration."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    _check_point(t)
    s = studentize(sample, divisor)
    v = vn_statistic(s, t)
    standardized = v * math.sqrt(s.n / asymptotic_coeff(t))
    p = float(two_sided_p(standardized))
    return EcftResult(v, float(t), standardized, p, p < alpha, alpha, s.n)
