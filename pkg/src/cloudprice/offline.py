"""Offline welfare benchmark: expected LP, half-Opt pricing, and a DP oracle.

In the correlated model a job of class j arrives each step with
probability r_j, runs a_j steps, and pays off v_j per step.  The expected
LP relaxes the admission problem to fractional acceptance rates x_j <= r_j
with total expected load at most one step per step; its optimum Opt upper
bounds the long-run offline welfare per step, and the flat price Opt/2
guarantees half of it.  The LP is a fractional knapsack, so a greedy by
value per step is exact and no solver is needed.

The DP oracle computes the realized offline optimum on a sampled arrival
trace; jobs must complete by the horizon, leaving O(a_max / T) boundary
slack against the LP bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

__all__ = [
    "CorrelatedClassList",
    "LpSolution",
    "expected_lp",
    "half_opt_price",
    "fleet_half_opt_prices",
    "FleetPriceSelection",
    "sample_trace",
    "offline_dp_oracle",
    "save_trace",
    "load_trace",
]


@dataclass(frozen=True)
class CorrelatedClassList:
    """Job classes (rate, length, value per step); values may repeat."""

    rates: tuple
    lengths: tuple
    values: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        lengths = tuple(int(a) for a in self.lengths)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "values", values)
        if not len(rates) == len(lengths) == len(values):
            raise ValueError("rates, lengths, values must have the same count")
        if any(not 0.0 < r <= 1.0 for r in rates):
            raise ValueError("class rates must lie in (0, 1]")
        if sum(rates) > 1.0 + 1e-12:
            raise ValueError(f"class rates sum to {sum(rates)!r} > 1")
        if any(a < 1 for a in lengths):
            raise ValueError("class lengths must be positive integers")
        if any(v < 0 for v in values):
            raise ValueError("class values must be nonnegative")

    @property
    def n_classes(self) -> int:
        return len(self.rates)

    @classmethod
    def from_tuples(cls, triples):
        """Build from an iterable of (rate, length, value) triples."""
        triples = list(triples)
        return cls(
            tuple(t[0] for t in triples),
            tuple(t[1] for t in triples),
            tuple(t[2] for t in triples),
        )


@dataclass(frozen=True)
class LpSolution:
    opt: float
    x: tuple


def expected_lp(classes: CorrelatedClassList) -> LpSolution:
    """Greedy-exact solution of the expected LP.

    Classes are filled in descending value order (ties: longer length
    first, then input order) until the unit of expected capacity per step
    is exhausted.
    """
    order = sorted(
        range(classes.n_classes),
        key=lambda j: (-classes.values[j], -classes.lengths[j], j),
    )
    x = [0.0] * classes.n_classes
    capacity = 1.0
    opt = 0.0
    for j in order:
        if capacity <= 0.0:
            break
        a, r, v = classes.lengths[j], classes.rates[j], classes.values[j]
        x[j] = min(r, capacity / a)
        capacity -= x[j] * a
        opt += x[j] * v * a
    return LpSolution(opt, tuple(x))


def half_opt_price(classes: CorrelatedClassList) -> float:
    """Flat price Opt/2; posting it recovers at least half the LP optimum."""
    if classes.n_classes == 0:
        return 0.0
    return expected_lp(classes).opt / 2.0


@dataclass(frozen=True)
class FleetPriceSelection:
    price: float
    candidates: tuple
    welfare: float


def fleet_half_opt_prices(server_classes: Sequence[CorrelatedClassList], cfg):
    """Pick the best per-server half-Opt price as one fleet-wide flat price.

    Each server's Opt_i/2 is evaluated by simulating every server at that
    price and summing welfare; the welfare-maximizing candidate wins.
    """
    from .optimize import PriceSchedule
    from .sim import simulate

    if not server_classes:
        raise ValueError("need at least one server")
    candidates = tuple(half_opt_price(c) for c in server_classes)
    best_price, best_welfare = None, -np.inf
    for p in candidates:
        schedule = PriceSchedule("flat", p)
        welfare = sum(
            simulate(c, schedule, cfg).welfare.mean for c in server_classes
        )
        if welfare > best_welfare:
            best_price, best_welfare = p, welfare
    return FleetPriceSelection(best_price, candidates, best_welfare)


def sample_trace(classes: CorrelatedClassList, horizon: int, rng) -> tuple:
    """Arrival trace over `horizon` steps: (lengths, total values) arrays.

    Length 0 marks a step without an arrival.  Arrivals are drawn
    regardless of server state; the offline benchmark sees them all.
    """
    u = rng.random(horizon)
    cum = np.cumsum(classes.rates)
    cls = np.searchsorted(cum, u, side="right")
    lengths = np.append(np.asarray(classes.lengths, dtype=np.int64), 0)[cls]
    per_step = np.append(np.asarray(classes.values, dtype=float), 0.0)[cls]
    return lengths, per_step * lengths


@njit(cache=True)
def _dp_best(lengths, totals, T):  # pragma: no cover - compiled
    opt = np.zeros(T + 1)
    for t in range(T - 1, -1, -1):
        best = opt[t + 1]
        a = lengths[t]
        if a > 0 and t + a <= T:
            cand = totals[t] + opt[t + a]
            if cand > best:
                best = cand
        opt[t] = best
    return opt[0]


def offline_dp_oracle(trace: tuple, horizon: int) -> float:
    """Optimal offline welfare per step for one realized arrival trace."""
    lengths, totals = trace
    if len(lengths) != horizon or len(totals) != horizon:
        raise ValueError("trace arrays must match the horizon")
    if horizon == 0:
        return 0.0
    return float(
        _dp_best(
            np.ascontiguousarray(lengths, dtype=np.int64),
            np.ascontiguousarray(totals, dtype=np.float64),
            horizon,
        )
    ) / horizon


def save_trace(path, trace) -> None:
    """Persist a trace as columnar text: step, length, total value."""
    lengths, totals = trace
    with open(path, "w") as fh:
        fh.write("step length total_value\n")
        for t, (a, w) in enumerate(zip(lengths, totals)):
            fh.write(f"{t} {a} {w:.12g}\n")


def load_trace(path) -> tuple:
    data = np.loadtxt(path, skiprows=1, ndmin=2)
    return data[:, 1].astype(np.int64), data[:, 2]
