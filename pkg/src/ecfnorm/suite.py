"""Uniform access to all seven tests, one sample at a time or row-wise."""
from __future__ import annotations

import numpy as np

from . import classical
from .classical import TEST_NAMES, TestResult, _need, shipped_table
from .epps_pulley import PUBLISHED_EP_TABLE, _check_table_alpha, ep_t_rows, ep_test
from .stat_core import DEFAULT_DIVISOR, SampleLike, ecft_standardized_rows, ecft_test, studentize_rows, two_sided_p


def normalize_names(names) -> tuple:
    if isinstance(names, str):
        names = [p for p in names.split(",") if p.strip()]
    out = []
    for name in names:
        key = name.strip().upper()
        if key == "ALL":
            out.extend(TEST_NAMES)
        elif key in TEST_NAMES:
            out.append(key)
        else:
            raise ValueError(f"unknown test {name!r}; choose from {', '.join(TEST_NAMES)} or all")
    return tuple(dict.fromkeys(out))


def statistic_rows(name: str, x: np.ndarray, t: float = 1.0, divisor: str = DEFAULT_DIVISOR) -> np.ndarray:
    """Test statistic for every row of ``x`` (ECFT: the standardized value)."""
    n = np.shape(x)[-1]
    if name == "ECFT":
        return ecft_standardized_rows(x, t, divisor)
    if name == "EP":
        return ep_t_rows(studentize_rows(x, divisor))
    if name == "LL":
        _need(n, 4, "LL")
        return classical.ll_rows(x)
    if name == "AD":
        _need(n, 8, "AD")
        return classical.ad_rows(x)
    if name == "JB":
        _need(n, 8, "JB")
        return classical.jb_rows(x)
    if name == "DP":
        _need(n, 20, "DP")
        return classical.dp_rows(x)
    if name == "SW":
        _need(n, 3, "SW", classical.SW_MAX_N)
        return classical.sw_rows(x)
    raise ValueError(f"unknown test {name!r}")


def reject_rows(name: str, x: np.ndarray, alpha: float = 0.05, t: float = 1.0,
                divisor: str = DEFAULT_DIVISOR) -> np.ndarray:
    """Boolean rejection decision for every row of ``x``."""
    n = np.shape(x)[-1]
    stat = statistic_rows(name, x, t, divisor)
    if name == "ECFT":
        return two_sided_p(stat) < alpha
    if name == "DP":
        return np.exp(-stat / 2.0) < alpha
    if name == "SW":
        return classical.sw_pvalue(stat, n) < alpha
    table = PUBLISHED_EP_TABLE if name == "EP" else shipped_table(name)
    _check_table_alpha(alpha, table)
    return stat > table.critical_value(n)


def run_test(name: str, sample: SampleLike, alpha: float = 0.05, t: float = 1.0,
             divisor: str = DEFAULT_DIVISOR) -> TestResult:
    if name == "ECFT":
        return ecft_test(sample, t, alpha, divisor).to_test_result()
    if name == "EP":
        return ep_test(sample, alpha, divisor=divisor).to_test_result()
    fn = {
        "LL": classical.lilliefors,
        "JB": classical.jarque_bera,
        "SW": classical.shapiro_wilk,
        "AD": classical.anderson_darling,
        "DP": classical.dagostino_pearson,
    }[name]
    return fn(sample, alpha)
