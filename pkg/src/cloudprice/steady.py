"""Closed-form steady-state welfare and revenue per time step.

Single server: at every time step a job of length a_i arrives with
probability r_i (no job with probability 1 - sum r_i).  A free server
posts a per-step price for the arriving job's length and accepts iff the
job's per-step value is at least the price, staying busy for a_i steps
including the current one.  The long-run averages admit closed forms in
terms of the strict CDF and the partial expectation of the value law.

Fleets are unions of independent single servers sharing one value law,
either with a common no-job probability per server ("equal-r") or with a
single job length shared by all servers ("shared-length").
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import ValueDistribution

__all__ = [
    "JobMix",
    "Fleet",
    "SteadyStateMetrics",
    "single_server_metrics",
    "single_server_flat_metrics",
    "fleet_metrics",
]

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class JobMix:
    """Job lengths a_1 <= ... <= a_n with arrival probabilities r_1 ... r_n."""

    lengths: tuple
    probs: tuple

    def __post_init__(self):
        lengths = tuple(int(a) for a in self.lengths)
        probs = tuple(float(r) for r in self.probs)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "probs", probs)
        if len(lengths) != len(probs):
            raise ValueError("lengths and probs must have the same count")
        if not lengths:
            raise ValueError("need at least one job class")
        if any(a < 1 for a in lengths):
            raise ValueError("job lengths must be positive integers")
        if any(b < a for a, b in zip(lengths, lengths[1:])):
            raise ValueError("job lengths must be ascending")
        if any(not 0.0 < r <= 1.0 for r in probs):
            raise ValueError("each arrival probability must lie in (0, 1]")
        if sum(probs) > 1.0 + _PROB_TOL:
            raise ValueError(f"arrival probabilities sum to {sum(probs)!r} > 1")

    @property
    def n_classes(self) -> int:
        return len(self.lengths)

    @property
    def load(self) -> float:
        """Expected busy steps generated per time step: sum a_i * r_i."""
        return float(np.dot(self.lengths, self.probs))

    @property
    def total_rate(self) -> float:
        """Probability that some job arrives: sum r_i."""
        return float(sum(self.probs))

    @property
    def idle_rate(self) -> float:
        # clamp tiny negatives produced by rounding when the rates sum to 1
        return max(1.0 - self.total_rate, 0.0)


@dataclass(frozen=True)
class Fleet:
    """A group of independent servers sharing one value distribution.

    mode "equal-r": all servers have the same total arrival probability.
    mode "shared-length": each server has exactly one job class and all
    servers share the same length.
    """

    servers: tuple
    mode: str = "equal-r"

    def __post_init__(self):
        object.__setattr__(self, "servers", tuple(self.servers))
        if not self.servers:
            raise ValueError("fleet needs at least one server")
        if self.mode not in ("equal-r", "shared-length"):
            raise ValueError(f"unknown fleet mode {self.mode!r}")
        if self.mode == "equal-r":
            rates = [m.total_rate for m in self.servers]
            if max(rates) - min(rates) > _PROB_TOL:
                raise ValueError(
                    "equal-r fleet requires identical total arrival "
                    f"probabilities, got {rates}"
                )
        else:
            lengths = set()
            for m in self.servers:
                if m.n_classes != 1:
                    raise ValueError(
                        "shared-length fleet requires one job class per server"
                    )
                lengths.add(m.lengths[0])
            if len(lengths) != 1:
                raise ValueError(
                    f"shared-length fleet requires one common length, got {lengths}"
                )

    @property
    def n_servers(self) -> int:
        return len(self.servers)

    @property
    def shared_length(self) -> int:
        if self.mode != "shared-length":
            raise ValueError("shared_length only defined in shared-length mode")
        return self.servers[0].lengths[0]


@dataclass(frozen=True)
class SteadyStateMetrics:
    """Per-time-step welfare and revenue, plus acceptance and occupancy.

    accept_probs holds Pr[accept | arrival of class i, server free]; for a
    fleet it is a tuple of per-server tuples.  Occupancy is the long-run
    fraction of busy time steps (averaged over servers for a fleet).
    """

    welfare: float
    revenue: float
    accept_probs: tuple
    occupancy: float

    def objective(self, lam: float) -> float:
        """Convex combination lam * welfare + (1 - lam) * revenue."""
        return lam * self.welfare + (1.0 - lam) * self.revenue


def single_server_metrics(
    mix: JobMix, dist: ValueDistribution, prices: Sequence[float]
) -> SteadyStateMetrics:
    """Steady-state metrics under a per-length price vector."""
    if len(prices) != mix.n_classes:
        raise ValueError(
            f"expected {mix.n_classes} prices, got {len(prices)}"
        )
    a = np.asarray(mix.lengths, dtype=float)
    r = np.asarray(mix.probs, dtype=float)
    p = np.asarray(prices, dtype=float)
    if np.any(p < 0):
        raise ValueError("prices must be nonnegative")
    F = np.array([dist.cdf_strict(x) for x in p])
    pe = np.array([dist.partial_expectation(x) for x in p])
    den = mix.load - float(np.sum((a - 1.0) * r * F)) + mix.idle_rate
    welfare = float(np.sum(a * r * pe)) / den
    revenue = float(np.sum(a * r * (1.0 - F) * p)) / den
    occupancy = float(np.sum(a * r * (1.0 - F))) / den
    return SteadyStateMetrics(welfare, revenue, tuple(1.0 - F), occupancy)


def single_server_flat_metrics(
    mix: JobMix, dist: ValueDistribution, p: float
) -> SteadyStateMetrics:
    """Steady-state metrics under one price for every job length."""
    return single_server_metrics(mix, dist, [p] * mix.n_classes)


def fleet_metrics(
    fleet: Fleet, dist: ValueDistribution, prices: Sequence[float]
) -> SteadyStateMetrics:
    """Fleet metrics under one flat price per server.

    Welfare and revenue add across servers; occupancy is the mean busy
    fraction over servers.
    """
    if len(prices) != fleet.n_servers:
        raise ValueError(
            f"expected {fleet.n_servers} prices, got {len(prices)}"
        )
    per = [
        single_server_flat_metrics(mix, dist, p)
        for mix, p in zip(fleet.servers, prices)
    ]
    return SteadyStateMetrics(
        welfare=sum(m.welfare for m in per),
        revenue=sum(m.revenue for m in per),
        accept_probs=tuple(m.accept_probs for m in per),
        occupancy=sum(m.occupancy for m in per) / fleet.n_servers,
    )
