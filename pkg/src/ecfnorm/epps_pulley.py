"""Epps-Pulley statistic on studentized data and its table-based test.

With a standard normal weight the weighted L2 distance between the
studentized ecf and ``exp(-t**2/2)`` has the closed form

    T_n = n * I_n = (1/n) sum_jk exp(-(z_j - z_k)**2 / 2)
                    - sqrt(2) * sum_j exp(-z_j**2 / 4) + n / sqrt(3)

``form="as_printed"`` swaps the middle term for ``2 * sum_j exp(-z_j**2/2)``,
a variant that does not follow from the integral. It is kept only so the
discrepancy can be measured; the quadrature oracle sides with the
reference form.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Mapping

import numpy as np
from scipy.spatial.distance import pdist

from .errors import DegenerateSample, EmptyInput, UnsupportedAlpha
from .stat_core import DEFAULT_DIVISOR, Divisor, SampleLike, StudentizedSample, studentize, studentize_rows

Form = Literal["reference", "as_printed"]
FORMS = ("reference", "as_printed")

TABLE_FORMAT = "critical-table/1"
TABLE_COLUMNS = ("n", "q95", "mean", "variance", "provenance", "m", "seed")


def _series_terms(lam_max: np.ndarray) -> np.ndarray:
    # Poisson(lam) mass beyond lam + 9 sqrt(lam) + 30 is below 1e-18 for every lam.
    return np.ceil(lam_max + 9.0 * np.sqrt(lam_max) + 30.0).astype(np.int64)


def kernel_sum_rows(z: np.ndarray) -> np.ndarray:
    """sum_jk exp(-(z_j - z_k)^2 / 2) for each row, via a nonnegative power series.

    exp(-(a-b)^2/2) = exp(-a^2/2) exp(-b^2/2) sum_p (ab)^p / p!, so the double
    sum equals sum_p M_p^2 with M_p = sum_j exp(-z_j^2/2) z_j^p / sqrt(p!).
    Every term is nonnegative and the cost is O(n * terms) instead of O(n^2).
    The number of terms depends only on the row itself, so the result for a
    row never depends on which other rows share the batch.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    # Canonical order (by |z|, ties negative first) makes the sums exactly
    # invariant to permutation and sign flip of the row.
    z = np.sort(z, axis=-1)
    z = np.take_along_axis(z, np.argsort(np.abs(z), axis=-1, kind="stable"), axis=-1)
    lam = np.max(z * z, axis=-1)
    terms = _series_terms(lam)
    u = np.exp(-0.5 * z * z)
    total = np.zeros(z.shape[0])
    live = np.ones(z.shape[0], dtype=bool)
    p = 0
    p_max = int(terms.max())
    while p <= p_max:
        if p > 0:
            u *= z / math.sqrt(p)
        m = u.sum(axis=-1)
        total += np.where(live, m * m, 0.0)
        p += 1
        live &= terms >= p
    return total


def kernel_sum_pairwise(z) -> float:
    """The same double sum evaluated pair by pair (reference evaluation)."""
    z = np.asarray(z, dtype=float)
    if z.size == 1:
        return 1.0
    d2 = pdist(z[:, None], "sqeuclidean")
    return float(z.size + 2.0 * math.fsum(np.exp(-0.5 * d2)))


def ep_t_rows(z: np.ndarray, form: Form = "reference") -> np.ndarray:
    """T_n for each row of studentized data."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    n = z.shape[-1]
    if n == 0:
        raise EmptyInput("Epps-Pulley statistic of an empty sample")
    zz = np.sort(z * z, axis=-1)
    if form == "reference":
        middle = math.sqrt(2.0) * np.exp(-0.25 * zz).sum(axis=-1)
    elif form == "as_printed":
        middle = 2.0 * np.exp(-0.5 * zz).sum(axis=-1)
    else:
        raise ValueError(f"form must be one of {FORMS}, got {form!r}")
    return kernel_sum_rows(z) / n - middle + n / math.sqrt(3.0)


def ep_statistic(s: StudentizedSample, form: Form = "reference", method: str = "series") -> tuple[float, float]:
    """Return ``(i_n, t_n)``.

    ``method="pairwise"`` evaluates the double sum directly; ``"series"``
    (default) uses the power-series expansion. They agree to ~1e-13 relative.
    """
    z = np.asarray(s.z, dtype=float)
    n = z.size
    if n == 0:
        raise EmptyInput("Epps-Pulley statistic of an empty sample")
    if method == "series":
        t_n = float(ep_t_rows(z[None, :], form)[0])
    elif method == "pairwise":
        if form == "reference":
            middle = math.sqrt(2.0) * math.fsum(np.exp(-0.25 * z * z))
        elif form == "as_printed":
            middle = 2.0 * math.fsum(np.exp(-0.5 * z * z))
        else:
            raise ValueError(f"form must be one of {FORMS}, got {form!r}")
        t_n = kernel_sum_pairwise(z) / n - middle + n / math.sqrt(3.0)
    else:
        raise ValueError(f"unknown method {method!r}")
    return t_n / n, t_n


@dataclass(frozen=True)
class QuadratureSettings:
    lower: float = -8.0
    upper: float = 8.0
    nodes: int = 400

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("quadrature range must satisfy lower < upper")
        if self.nodes < 2:
            raise ValueError("need at least 2 quadrature nodes")


def ep_quadrature_oracle(s: StudentizedSample, grid: QuadratureSettings = QuadratureSettings()) -> float:
    """Gauss-Legendre evaluation of the integral of |phi_S(t) - exp(-t^2/2)|^2 phi(t).

    Independent of the closed form: it integrates the defining expression
    numerically, term by term, on a fixed range.
    """
    z = np.asarray(s.z, dtype=float)
    if z.size == 0:
        raise EmptyInput("quadrature oracle of an empty sample")
    x, w = np.polynomial.legendre.leggauss(grid.nodes)
    half = 0.5 * (grid.upper - grid.lower)
    t = half * x + 0.5 * (grid.upper + grid.lower)
    tz = np.outer(t, z)
    re = np.cos(tz).mean(axis=1) - np.exp(-0.5 * t * t)
    im = np.sin(tz).mean(axis=1)
    density = np.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
    return float(half * np.sum(w * (re * re + im * im) * density))


@dataclass(frozen=True)
class CriticalRow:
    q95: float
    mean: float = math.nan
    variance: float = math.nan


@dataclass(frozen=True)
class EpCriticalTable:
    """Null 0.95 quantiles by sample size.

    ``provenance`` is ``"published"`` for the shipped values or
    ``"self_simulated"`` with ``m`` and ``seed`` recorded.
    """

    rows: Mapping[int, CriticalRow]
    provenance: str = "self_simulated"
    m: int | None = None
    seed: int | None = None
    sqrt_n_scaled: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.rows:
            raise ValueError("critical table has no rows")
        object.__setattr__(self, "rows", dict(sorted(self.rows.items())))

    def critical_value(self, n: int) -> float:
        """Exact row, else linear interpolation in 1/n, else the nearest end row.

        With ``sqrt_n_scaled`` the interpolated quantity is ``sqrt(n) * q95``,
        which is the stable scale for Kolmogorov-type statistics.
        """
        if n in self.rows:
            return self.rows[n].q95
        ns = np.array(list(self.rows), dtype=float)
        q = np.array([r.q95 for r in self.rows.values()])
        if self.sqrt_n_scaled:
            q = q * np.sqrt(ns)
        if n <= ns[0]:
            val = float(q[0])
        elif n >= ns[-1]:
            val = float(q[-1])
        else:
            # np.interp needs increasing abscissae; 1/n decreases with n.
            val = float(np.interp(1.0 / n, (1.0 / ns)[::-1], q[::-1]))
        return val / math.sqrt(n) if self.sqrt_n_scaled else val

    def to_csv(self, quantile: float = 0.95) -> str:
        buf = io.StringIO()
        buf.write(f"# {TABLE_FORMAT}; quantile={quantile}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for n, r in self.rows.items():
            w.writerow([n, repr(r.q95), repr(r.mean), repr(r.variance), self.provenance,
                        "" if self.m is None else self.m, "" if self.seed is None else self.seed])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, sqrt_n_scaled: bool = False) -> "EpCriticalTable":
        lines = text.splitlines()
        if not lines or not lines[0].startswith(f"# {TABLE_FORMAT}"):
            raise ValueError(f"not a {TABLE_FORMAT} file")
        reader = csv.DictReader(lines[1:])
        if tuple(reader.fieldnames or ()) != TABLE_COLUMNS:
            raise ValueError(f"expected columns {TABLE_COLUMNS}, got {reader.fieldnames}")
        rows, prov, m, seed = {}, set(), set(), set()
        for rec in reader:
            rows[int(rec["n"])] = CriticalRow(float(rec["q95"]), float(rec["mean"]), float(rec["variance"]))
            prov.add(rec["provenance"])
            m.add(rec["m"])
            seed.add(rec["seed"])
        if len(prov) != 1 or len(m) != 1 or len(seed) != 1:
            raise ValueError("mixed provenance within one critical table")
        m_val, seed_val = m.pop(), seed.pop()
        return cls(rows, prov.pop(), int(m_val) if m_val else None, int(seed_val) if seed_val else None,
                   sqrt_n_scaled)

    @classmethod
    def load(cls, path, sqrt_n_scaled: bool = False) -> "EpCriticalTable":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"), sqrt_n_scaled)


# Simulated .95 percentiles with null mean and variance of T_n, m = 200000.
PUBLISHED_EP_TABLE = EpCriticalTable(
    {
        50: CriticalRow(0.370, 0.1303, 0.0148),
        100: CriticalRow(0.373, 0.1321, 0.0150),
        250: CriticalRow(0.375, 0.1338, 0.0151),
        500: CriticalRow(0.377, 0.1338, 0.0152),
        750: CriticalRow(0.377, 0.1334, 0.0151),
        1000: CriticalRow(0.377, 0.1336, 0.0151),
    },
    provenance="published",
    m=200000,
)

# Henze's asymptotic null moments of T_n.
HENZE_MEAN = 0.13397
HENZE_VARIANCE = 0.015236


@dataclass(frozen=True)
class EpResult:
    i_n: float
    t_n: float
    critical_value: float
    reject: bool
    alpha: float
    n: int
    form: str = "reference"

    def to_test_result(self):
        from .classical import TestResult

        return TestResult("EP", self.t_n, None, self.reject, self.alpha, self.n, self.critical_value)


def _check_table_alpha(alpha: float, table: EpCriticalTable) -> None:
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not math.isclose(alpha, 0.05):
        raise UnsupportedAlpha(
            f"critical table ({table.provenance}) holds 0.95 quantiles only; alpha={alpha} is unsupported"
        )


def ep_reject_rows(x: np.ndarray, alpha: float = 0.05, table: EpCriticalTable = PUBLISHED_EP_TABLE,
                   divisor: Divisor = DEFAULT_DIVISOR) -> np.ndarray:
    _check_table_alpha(alpha, table)
    x = np.atleast_2d(x)
    return ep_t_rows(studentize_rows(x, divisor)) > table.critical_value(x.shape[-1])


def ep_test(
    sample: SampleLike,
    alpha: float = 0.05,
    table: EpCriticalTable = PUBLISHED_EP_TABLE,
    form: Form = "reference",
    divisor: Divisor = DEFAULT_DIVISOR,
) -> EpResult:
    _check_table_alpha(alpha, table)
    s = studentize(sample, divisor)
    if s.n < 2:
        raise DegenerateSample("need at least 2 observations")
    i_n, t_n = ep_statistic(s, form)
    crit = table.critical_value(s.n)
    return EpResult(i_n, t_n, crit, t_n > crit, alpha, s.n, form)
