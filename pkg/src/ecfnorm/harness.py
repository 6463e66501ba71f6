"""Deterministic Monte Carlo engine for size, power and null-quantile studies.

Replication ``r`` of table cell ``(dist_index, n_index)`` draws its sample
from ``RngStream(master_seed, (dist_index, n_index, r))``. Work is split into
fixed blocks of replications and every statistic is computed row by row, so
the counts do not depend on how many worker processes run the blocks.
All tests in a cell see the same samples.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .distributions import DistributionSpec, Normal, RngStream, draw_rows
from .errors import InvalidPoint, NormalityError, SimulationError
from .stat_core import DEFAULT_DIVISOR, asymptotic_coeff, studentize_rows, vn_rows
from .suite import normalize_names, reject_rows, statistic_rows

BLOCK = 250
POWER_COLUMNS = ("dist", "n", "test", "reps", "rejections", "proportion", "std_error", "seed")


@dataclass(frozen=True)
class SimulationConfig:
    tests: tuple
    dists: tuple
    sizes: tuple
    reps: int = 5000
    alpha: float = 0.05
    master_seed: int = 20240101
    t_point: float = 1.0
    divisor: str = DEFAULT_DIVISOR

    def __post_init__(self):
        object.__setattr__(self, "tests", normalize_names(self.tests))
        object.__setattr__(self, "dists", tuple(self.dists))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        if self.reps < 100:
            raise ValueError(f"reps must be at least 100, got {self.reps}")
        if not self.sizes:
            raise ValueError("sizes must be nonempty")
        if not self.dists:
            raise ValueError("dists must be nonempty")
        if not self.tests:
            raise ValueError("tests must be nonempty")
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.t_point == 0:
            raise InvalidPoint("t = 0 is a degenerate evaluation point")

    def echo(self) -> dict:
        d = asdict(self)
        d["tests"] = list(self.tests)
        d["dists"] = [s.label for s in self.dists]
        d["sizes"] = list(self.sizes)
        return d


@dataclass(frozen=True)
class Cell:
    rejections: int
    reps: int

    @property
    def proportion(self) -> float:
        return self.rejections / self.reps

    @property
    def std_error(self) -> float:
        p = self.proportion
        return math.sqrt(p * (1.0 - p) / self.reps)


@dataclass
class PowerTable:
    cells: dict  # (dist label, n, test) -> Cell
    config: SimulationConfig
    elapsed_seconds: float = 0.0

    def __getitem__(self, key) -> Cell:
        return self.cells[key]

    def proportion(self, dist: str, n: int, test: str) -> float:
        return self.cells[(dist, n, test)].proportion

    def counts(self) -> dict:
        return {k: c.rejections for k, c in self.cells.items()}

    def rows(self) -> list:
        return [
            {"dist": d, "n": n, "test": t, "reps": c.reps, "rejections": c.rejections,
             "proportion": c.proportion, "std_error": c.std_error, "seed": self.config.master_seed}
            for (d, n, t), c in self.cells.items()
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, POWER_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({**row, "proportion": repr(row["proportion"]), "std_error": repr(row["std_error"])})
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"config": self.config.echo(), "elapsed_seconds": self.elapsed_seconds, "cells": self.rows()}
        return json.dumps(doc, indent=2)

    def wide(self, dist: str) -> str:
        """Wide layout: one row per n, one column per test."""
        tests = self.config.tests
        lines = ["n\t" + "\t".join(tests)]
        for n in self.config.sizes:
            lines.append(f"{n}\t" + "\t".join(f"{self.proportion(dist, n, t):.4f}" for t in tests))
        return "\n".join(lines)


@dataclass(frozen=True)
class PercentileEstimate:
    n: int
    q: float
    value: float
    reps: int
    mean: float
    variance: float
    seed: int = 0
    values: np.ndarray = field(default=None, repr=False, compare=False)


# -- block execution ----------------------------------------------------------

def _blocks(reps: int):
    return [range(s, min(s + BLOCK, reps)) for s in range(0, reps, BLOCK)]


def _power_block(task):
    dist, n, path, seed, reps, tests, alpha, t, divisor = task
    x = draw_rows(dist, n, RngStream(seed, path), reps)
    out = {}
    for name in tests:
        try:
            out[name] = int(np.count_nonzero(reject_rows(name, x, alpha, t, divisor)))
        except NormalityError as exc:
            raise SimulationError(
                f"cell ({dist.label}, n={n}, {name}) replications {reps.start}-{reps.stop - 1} failed: {exc}"
            ) from exc
    return out


def _stat_block(task):
    stat, dist, n, path, seed, reps, t, divisor = task
    x = draw_rows(dist, n, RngStream(seed, path), reps)
    try:
        if callable(stat):
            return np.asarray(stat(x), dtype=float)
        return statistic_rows(stat, x, t, divisor)
    except NormalityError as exc:
        raise SimulationError(f"null statistic at n={n}, replications {reps.start}-{reps.stop - 1} failed: {exc}") from exc


def _map(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _simulate(config: SimulationConfig, workers: int) -> PowerTable:
    start = time.perf_counter()
    tasks, keys = [], []
    for di, dist in enumerate(config.dists):
        for ni, n in enumerate(config.sizes):
            for block in _blocks(config.reps):
                tasks.append((dist, n, (di, ni), config.master_seed, block, config.tests,
                              config.alpha, config.t_point, config.divisor))
                keys.append((dist.label, n))
    counts = {}
    for key, result in zip(keys, _map(_power_block, tasks, workers)):
        acc = counts.setdefault(key, dict.fromkeys(config.tests, 0))
        for name, c in result.items():
            acc[name] += c
    cells = {
        (d, n, name): Cell(counts[(d, n)][name], config.reps)
        for (d, n) in counts
        for name in config.tests
    }
    return PowerTable(cells, config, time.perf_counter() - start)


def estimate_type1(config: SimulationConfig, workers: int = 1) -> PowerTable:
    """Rejection rates under standard normal data."""
    if config.dists != (Normal(),):
        raise ValueError("Type I error studies sample from Normal(0, 1) only")
    return _simulate(config, workers)


def estimate_power(config: SimulationConfig, workers: int = 1) -> PowerTable:
    """Rejection rates under non-normal alternatives."""
    if any(isinstance(d, Normal) for d in config.dists):
        raise ValueError("power studies exclude the normal distribution; use estimate_type1")
    return _simulate(config, workers)


def null_statistics(test: Union[str, Callable], n: int, reps: int, seed: int, workers: int = 1,
                    t: float = 1.0, divisor: str = DEFAULT_DIVISOR) -> np.ndarray:
    """Statistic values over ``reps`` standard normal samples of size n, in replication order."""
    if isinstance(test, str):
        test = normalize_names(test)[0]
    tasks = [(test, Normal(), n, (n,), seed, block, t, divisor) for block in _blocks(reps)]
    return np.concatenate(_map(_stat_block, tasks, workers))


def estimate_null_percentile(test: Union[str, Callable], n: int, q: float = 0.95, reps: int = 200000,
                             seed: int = 1, workers: int = 1, t: float = 1.0,
                             divisor: str = DEFAULT_DIVISOR) -> PercentileEstimate:
    """Empirical null q-quantile: the ceil(q * reps)-th order statistic, no interpolation."""
    if reps < 1000:
        raise ValueError(f"percentile estimates need reps >= 1000, got {reps}")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    values = null_statistics(test, n, reps, seed, workers, t, divisor)
    rank = math.ceil(q * reps)
    value = float(np.partition(values, rank - 1)[rank - 1])
    return PercentileEstimate(n, q, value, reps, float(values.mean()), float(values.var(ddof=1)), seed, values)


def percentile_table(estimates: Sequence[PercentileEstimate], provenance: str = "self_simulated"):
    from .epps_pulley import CriticalRow, EpCriticalTable

    seeds = {e.seed for e in estimates}
    reps = {e.reps for e in estimates}
    return EpCriticalTable(
        {e.n: CriticalRow(e.value, e.mean, e.variance) for e in estimates},
        provenance,
        reps.pop() if len(reps) == 1 else None,
        seeds.pop() if len(seeds) == 1 else None,
    )


# -- curves -----------------------------------------------------------------------

def _curve_block(task):
    n, seed, reps, t, divisor = task
    x = draw_rows(Normal(), n, RngStream(seed, (n,)), reps)
    tx = t * x
    raw = 0.5 * np.log(np.cos(tx).mean(axis=-1) ** 2 + np.sin(tx).mean(axis=-1) ** 2)
    v = vn_rows(studentize_rows(x, divisor), t)
    return raw, v


def _curve_values(sizes, reps, t, seed, workers, divisor):
    if t == 0:
        raise InvalidPoint("t = 0 is a degenerate evaluation point")
    tasks, owners = [], []
    for n in sizes:
        for block in _blocks(reps):
            tasks.append((int(n), seed, block, t, divisor))
            owners.append(int(n))
    results = _map(_curve_block, tasks, workers)
    out = {}
    for n, (raw, v) in zip(owners, results):
        r, s = out.setdefault(n, ([], []))
        r.append(raw)
        s.append(v)
    return {n: (np.concatenate(r), np.concatenate(s)) for n, (r, s) in out.items()}


def bias_curve(sizes: Sequence[int], reps: int = 5000, t: float = 1.0, seed: int = 1, workers: int = 1,
               divisor: str = DEFAULT_DIVISOR) -> list:
    """Mean log|ecf(t)| of standard normal samples, studentized and raw, per n.

    Both converge to -t^2/2. ``sd_*`` report the spread across replications.
    """
    if reps < 1000:
        raise ValueError(f"bias curve needs reps >= 1000, got {reps}")
    vals = _curve_values(sizes, reps, t, seed, workers, divisor)
    out = []
    for n in sizes:
        raw, v = vals[int(n)]
        stud = v - 0.5 * t * t
        out.append({"n": int(n), "studentized": float(stud.mean()), "raw": float(raw.mean()),
                    "sd_studentized": float(stud.std(ddof=1)), "sd_raw": float(raw.std(ddof=1))})
    return out


def variance_curve(sizes: Sequence[int], reps: int = 1000, t: float = 1.0, seed: int = 1, workers: int = 1,
                   divisor: str = DEFAULT_DIVISOR) -> list:
    """Empirical Var(v_n(t)) over null samples next to the asymptotic c(t)/n."""
    if reps < 500:
        raise ValueError(f"variance curve needs reps >= 500, got {reps}")
    if t == 0:
        raise InvalidPoint("t = 0 is a degenerate evaluation point")
    vals = _curve_values(sizes, reps, t, seed, workers, divisor)
    c = asymptotic_coeff(t)
    return [{"n": int(n), "empirical": float(vals[int(n)][1].var(ddof=1)), "asymptotic": c / int(n)}
            for n in sizes]


def curve_csv(points: list, series: Sequence[str]) -> str:
    """Two columns (x, y) per series, ready for any plotting tool."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = []
    for s in series:
        header += [f"n_{s}", s]
    w.writerow(header)
    for p in points:
        row = []
        for s in series:
            row += [p["n"], repr(p[s])]
        w.writerow(row)
    return buf.getvalue()
