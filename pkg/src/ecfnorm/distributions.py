"""Seeded samplers for the simulation alternatives and the spec-string grammar.

Grammar accepted by :func:`parse_spec`::

    normal[:mu:sigma] | uniform | t:df | laplace | logistic | mix:sigma:alpha

``mix:sigma:alpha`` is the contaminated normal
``(1 - alpha) N(0, 1) + alpha N(0, sigma**2)``: ``alpha`` is the weight of
the wide (or narrow) component, matching the (sigma, alpha) labels of the
published power tables.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.special import betainc

from .errors import InvalidParameters, ParseError
from .stat_core import Sample


@dataclass(frozen=True)
class Normal:
    mu: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        _positive(self.sigma, "Normal sigma")
        _finite(self.mu, "Normal mu")

    @property
    def label(self):
        return "normal" if (self.mu, self.sigma) == (0.0, 1.0) else f"normal:{self.mu:g}:{self.sigma:g}"

    def draw(self, rng, n):
        return self.mu + self.sigma * rng.standard_normal(n)

    def cdf(self, x):
        from scipy.special import ndtr

        return ndtr((np.asarray(x) - self.mu) / self.sigma)


@dataclass(frozen=True)
class Uniform01:
    label = "uniform"

    def draw(self, rng, n):
        return rng.random(n)

    def cdf(self, x):
        return np.clip(x, 0.0, 1.0)


@dataclass(frozen=True)
class StudentT:
    df: int

    def __post_init__(self):
        if isinstance(self.df, bool) or int(self.df) != self.df or self.df < 1:
            raise InvalidParameters(f"Student-t df must be an integer >= 1, got {self.df}")

    @property
    def label(self):
        return f"t:{self.df}"

    def draw(self, rng, n):
        # Ratio construction: N(0,1) / sqrt(chi2_df / df).
        z = rng.standard_normal(n)
        v = rng.chisquare(self.df, n)
        return z / np.sqrt(v / self.df)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        tail = 0.5 * betainc(self.df / 2.0, 0.5, self.df / (self.df + x * x))
        return np.where(x < 0, tail, 1.0 - tail)


@dataclass(frozen=True)
class Laplace:
    mu: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        _positive(self.b, "Laplace scale")
        _finite(self.mu, "Laplace mu")

    @property
    def label(self):
        return "laplace" if (self.mu, self.b) == (0.0, 1.0) else f"laplace:{self.mu:g}:{self.b:g}"

    def draw(self, rng, n):
        u = rng.random(n)
        u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
        lower = u < 0.5
        return self.mu + self.b * np.where(lower, np.log(2.0 * u), -np.log(2.0 * (1.0 - u)))

    def cdf(self, x):
        d = (np.asarray(x, dtype=float) - self.mu) / self.b
        return np.where(d < 0, 0.5 * np.exp(d), 1.0 - 0.5 * np.exp(-d))


@dataclass(frozen=True)
class Logistic:
    mu: float = 0.0
    s: float = 1.0

    def __post_init__(self):
        _positive(self.s, "logistic scale")
        _finite(self.mu, "logistic mu")

    @property
    def label(self):
        return "logistic" if (self.mu, self.s) == (0.0, 1.0) else f"logistic:{self.mu:g}:{self.s:g}"

    def draw(self, rng, n):
        u = rng.random(n)
        # random() can return exactly 0; the open interval keeps log finite.
        u = np.where(u == 0.0, np.nextafter(0.0, 1.0), u)
        return self.mu + self.s * (np.log(u) - np.log1p(-u))

    def cdf(self, x):
        return 1.0 / (1.0 + np.exp(-(np.asarray(x, dtype=float) - self.mu) / self.s))


@dataclass(frozen=True)
class NormalMixture:
    alpha: float
    sigma2nd: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise InvalidParameters(f"mixture alpha must lie in [0, 1], got {self.alpha}")
        _positive(self.sigma2nd, "mixture sigma")

    @property
    def label(self):
        return f"mix:{self.sigma2nd:g}:{self.alpha:g}"

    def draw(self, rng, n):
        second = rng.random(n) < self.alpha
        z = rng.standard_normal(n)
        return np.where(second, self.sigma2nd * z, z)

    def cdf(self, x):
        from scipy.special import ndtr

        x = np.asarray(x, dtype=float)
        return (1.0 - self.alpha) * ndtr(x) + self.alpha * ndtr(x / self.sigma2nd)


DistributionSpec = Union[Normal, Uniform01, StudentT, Laplace, Logistic, NormalMixture]


def _positive(v, what):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise InvalidParameters(f"{what} must be a positive finite number, got {v}")


def _finite(v, what):
    if not (isinstance(v, (int, float)) and math.isfinite(v)):
        raise InvalidParameters(f"{what} must be finite, got {v}")


@dataclass(frozen=True)
class RngStream:
    """Counter-based stream: (master_seed, path) hashed into a Philox key.

    Different paths give independent streams; the same (seed, path) always
    yields the same numbers, whichever process asks for them.
    """

    master_seed: int
    path: tuple = ()

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise InvalidParameters("master_seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def child(self, *indices: int) -> "RngStream":
        return RngStream(self.master_seed, self.path + indices)

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def draw_sample(spec: DistributionSpec, n: int, stream: RngStream) -> Sample:
    if n < 1:
        raise InvalidParameters(f"sample size must be >= 1, got {n}")
    return Sample(spec.draw(stream.generator(), n))


def draw_rows(spec: DistributionSpec, n: int, stream: RngStream, reps: Sequence[int]) -> np.ndarray:
    """One sample per replication index, each from its own child stream."""
    out = np.empty((len(reps), n))
    for i, r in enumerate(reps):
        out[i] = spec.draw(stream.child(r).generator(), n)
    return out


_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_KEYWORDS = ("normal", "uniform", "t", "laplace", "logistic", "mix")


def parse_spec(text: str) -> DistributionSpec:
    raw = text
    text = text.strip().lower()
    parts = text.split(":")
    head, args = parts[0], parts[1:]
    if head not in _KEYWORDS:
        raise ParseError(f"unknown distribution {raw!r}", 0, _KEYWORDS)

    def number(i, what):
        if i >= len(args) or not args[i]:
            pos = len(":".join(parts[: i + 1])) + 1
            raise ParseError(f"missing {what} in {raw!r}", pos, (what,))
        if not re.fullmatch(_NUMBER, args[i]):
            pos = len(":".join(parts[: i + 1])) + 1
            raise ParseError(f"bad number {args[i]!r} in {raw!r}", pos, (what,))
        return float(args[i])

    def arity(k):
        if len(args) > k:
            pos = len(":".join(parts[: k + 1]))
            raise ParseError(f"too many fields in {raw!r}", pos, ("end of spec",))

    try:
        if head == "normal":
            if not args:
                return Normal()
            arity(2)
            return Normal(number(0, "mu"), number(1, "sigma"))
        if head == "uniform":
            arity(0)
            return Uniform01()
        if head == "t":
            arity(1)
            df = number(0, "df")
            if df != int(df):
                raise ParseError(f"df must be an integer in {raw!r}", 2, ("integer df",))
            return StudentT(int(df))
        if head == "laplace":
            if not args:
                return Laplace()
            arity(2)
            return Laplace(number(0, "mu"), number(1, "b"))
        if head == "logistic":
            if not args:
                return Logistic()
            arity(2)
            return Logistic(number(0, "mu"), number(1, "s"))
        arity(2)
        return NormalMixture(alpha=number(1, "alpha"), sigma2nd=number(0, "sigma"))
    except InvalidParameters as exc:
        raise ParseError(f"{exc} in {raw!r}") from exc


def parse_spec_list(text: str) -> list:
    return [parse_spec(p) for p in text.split(",") if p.strip()]
