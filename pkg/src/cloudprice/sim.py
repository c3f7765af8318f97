"""Monte Carlo simulation of posted-price job admission.

The discrete-time process renews at every step where the server is free,
so a replication is simulated as a sequence of free-step events: draw a
class (or none), draw a value, accept iff value >= the posted price, and
advance by the job length (or one step).  Everything is vectorized; since
every event consumes at least one step, drawing `horizon` events always
covers the horizon.

Replications use independent child streams spawned from one seed, and the
reported standard errors and 95% confidence intervals come from the
spread of replication means.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .distributions import ValueDistribution
from .offline import CorrelatedClassList
from .optimize import PriceSchedule
from .steady import Fleet, JobMix

__all__ = [
    "SimConfig",
    "StatSummary",
    "SimResult",
    "seeded_streams",
    "simulate",
    "result_to_csv",
]

Z_95 = 1.96


@dataclass(frozen=True)
class SimConfig:
    horizon: int
    replications: int = 30
    seed: int = 0
    warmup: Optional[int] = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        warmup = self.warmup
        if warmup is None:
            warmup = self.horizon // 100
        if not 0 <= warmup < self.horizon:
            raise ValueError("warmup must lie in [0, horizon)")
        object.__setattr__(self, "warmup", int(warmup))


@dataclass(frozen=True)
class StatSummary:
    mean: float
    se: float

    @property
    def ci_low(self) -> float:
        return self.mean - Z_95 * self.se

    @property
    def ci_high(self) -> float:
        return self.mean + Z_95 * self.se

    def covers(self, x: float, z: float = 2.0) -> bool:
        return abs(x - self.mean) <= z * self.se


@dataclass(frozen=True)
class SimResult:
    welfare: StatSummary
    revenue: StatSummary
    occupancy: StatSummary
    rep_welfare: np.ndarray = field(repr=False)
    rep_revenue: np.ndarray = field(repr=False)
    rep_occupancy: np.ndarray = field(repr=False)
    arrivals_by_class: np.ndarray = field(repr=False)
    accepts_by_class: np.ndarray = field(repr=False)
    surplus: Optional[StatSummary] = None


def seeded_streams(seed: int, k: int):
    """k independent, reproducible generators derived from one seed."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(k)]


def _summary(reps: np.ndarray) -> StatSummary:
    k = len(reps)
    mean = float(np.mean(reps))
    se = float(np.std(reps, ddof=1) / np.sqrt(k)) if k > 1 else 0.0
    return StatSummary(mean, se)


def _run_events(lengths, probs, prices, values, u_class, horizon, warmup):
    """Per-step sums for one replication given pre-drawn event randomness.

    Returns (welfare_sum, revenue_sum, occupied_steps, arrivals, accepts)
    where sums run over steps in [warmup, horizon).
    """
    n = len(lengths)
    cum = np.cumsum(probs)
    cls = np.searchsorted(cum, u_class, side="right")  # == n means no arrival
    arrived = cls < n
    len_pad = np.append(np.asarray(lengths, dtype=np.int64), 1)
    price_pad = np.append(np.asarray(prices, dtype=float), np.inf)
    accept = arrived & (values >= price_pad[cls])
    dur = np.where(accept, len_pad[cls], 1)
    end = np.cumsum(dur)
    start = end - dur
    counted = np.clip(
        np.minimum(end, horizon) - np.maximum(start, warmup), 0, None
    ).astype(float)
    wsum = float(np.sum(counted * np.where(accept, values, 0.0)))
    rsum = float(np.sum(counted * np.where(accept, price_pad[cls], 0.0)))
    occ = float(np.sum(counted[accept]))
    in_window = arrived & (start >= warmup) & (start < horizon)
    arrivals = np.bincount(cls[in_window], minlength=n + 1)[:n]
    accepts = np.bincount(cls[in_window & accept], minlength=n + 1)[:n]
    return wsum, rsum, occ, arrivals, accepts


def _replicate_mix(mix, dist, prices, cfg, rng):
    h, w = cfg.horizon, cfg.warmup
    u = rng.random(h)
    values = dist.sample(rng, h)
    return _run_events(mix.lengths, mix.probs, prices, values, u, h, w)


def _replicate_correlated(classes, price_by_class, cfg, rng):
    h, w = cfg.horizon, cfg.warmup
    u = rng.random(h)
    cum = np.cumsum(classes.rates)
    cls = np.searchsorted(cum, u, side="right")
    values = np.append(np.asarray(classes.values, dtype=float), 0.0)[cls]
    return _run_events(classes.lengths, classes.rates, price_by_class, values, u, h, w)


def simulate(model, schedule: PriceSchedule, cfg: SimConfig) -> SimResult:
    """Simulate a model under a price schedule.

    model is one of:
      (JobMix, ValueDistribution)  - a single server,
      (Fleet, ValueDistribution)   - independent servers, metrics summed,
      CorrelatedClassList          - per-class deterministic values.
    """
    if isinstance(model, CorrelatedClassList):
        return _simulate_correlated(model, schedule, cfg)
    target, dist = model
    if not isinstance(dist, ValueDistribution):
        raise TypeError("second model element must be a ValueDistribution")
    if isinstance(target, JobMix):
        return _simulate_mix(target, dist, schedule, cfg)
    if isinstance(target, Fleet):
        return _simulate_fleet(target, dist, schedule, cfg)
    raise TypeError(f"cannot simulate model of type {type(target).__name__}")


def _check_horizon(cfg, max_length):
    if cfg.horizon < 10 * max_length:
        raise ValueError(
            f"horizon {cfg.horizon} too short for max job length {max_length}"
        )


def _simulate_mix(mix, dist, schedule, cfg):
    prices = schedule.for_mix(mix)
    _check_horizon(cfg, max(mix.lengths))
    streams = seeded_streams(cfg.seed, cfg.replications)
    steps = cfg.horizon - cfg.warmup
    wel, rev, occ = [], [], []
    arrivals = np.zeros(mix.n_classes, dtype=np.int64)
    accepts = np.zeros(mix.n_classes, dtype=np.int64)
    for rng in streams:
        ws, rs, oc, arr, acc = _replicate_mix(mix, dist, prices, cfg, rng)
        wel.append(ws / steps)
        rev.append(rs / steps)
        occ.append(oc / steps)
        arrivals += arr
        accepts += acc
    wel, rev, occ = np.array(wel), np.array(rev), np.array(occ)
    return SimResult(
        _summary(wel), _summary(rev), _summary(occ), wel, rev, occ, arrivals, accepts
    )


def _simulate_fleet(fleet, dist, schedule, cfg):
    per_server = schedule.for_fleet(fleet)
    _check_horizon(cfg, max(max(m.lengths) for m in fleet.servers))
    streams = seeded_streams(cfg.seed, cfg.replications * fleet.n_servers)
    steps = cfg.horizon - cfg.warmup
    wel, rev, occ = [], [], []
    arrivals = [np.zeros(m.n_classes, dtype=np.int64) for m in fleet.servers]
    accepts = [np.zeros(m.n_classes, dtype=np.int64) for m in fleet.servers]
    for k in range(cfg.replications):
        ws_tot = rs_tot = oc_tot = 0.0
        for j, mix in enumerate(fleet.servers):
            rng = streams[k * fleet.n_servers + j]
            ws, rs, oc, arr, acc = _replicate_mix(
                mix, dist, per_server[j], cfg, rng
            )
            ws_tot += ws
            rs_tot += rs
            oc_tot += oc
            arrivals[j] += arr
            accepts[j] += acc
        wel.append(ws_tot / steps)
        rev.append(rs_tot / steps)
        occ.append(oc_tot / steps / fleet.n_servers)
    wel, rev, occ = np.array(wel), np.array(rev), np.array(occ)
    return SimResult(
        _summary(wel),
        _summary(rev),
        _summary(occ),
        wel,
        rev,
        occ,
        np.concatenate(arrivals),
        np.concatenate(accepts),
    )


def _simulate_correlated(classes, schedule, cfg):
    if schedule.shape == "flat":
        prices = (schedule.prices,) * classes.n_classes
    elif schedule.shape == "per-length":
        if len(schedule.prices) != classes.n_classes:
            raise ValueError("schedule/class count mismatch")
        prices = schedule.prices
    else:
        raise ValueError(f"{schedule.shape!r} schedule does not apply to class lists")
    _check_horizon(cfg, max(classes.lengths))
    streams = seeded_streams(cfg.seed, cfg.replications)
    steps = cfg.horizon - cfg.warmup
    wel, rev, occ = [], [], []
    arrivals = np.zeros(classes.n_classes, dtype=np.int64)
    accepts = np.zeros(classes.n_classes, dtype=np.int64)
    for rng in streams:
        ws, rs, oc, arr, acc = _replicate_correlated(classes, prices, cfg, rng)
        wel.append(ws / steps)
        rev.append(rs / steps)
        occ.append(oc / steps)
        arrivals += arr
        accepts += acc
    wel, rev, occ = np.array(wel), np.array(rev), np.array(occ)
    return SimResult(
        _summary(wel),
        _summary(rev),
        _summary(occ),
        wel,
        rev,
        occ,
        arrivals,
        accepts,
        surplus=_summary(wel - rev),
    )


def result_to_csv(result: SimResult) -> str:
    """Stable CSV: one row per replication plus an aggregate row."""
    lines = ["row,rep,welfare,revenue,occupancy,welfare_se,revenue_se,occupancy_se"]
    for i, (w, r, o) in enumerate(
        zip(result.rep_welfare, result.rep_revenue, result.rep_occupancy)
    ):
        lines.append(f"rep,{i},{w:.12g},{r:.12g},{o:.12g},,,")
    lines.append(
        "aggregate,,{:.12g},{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}".format(
            result.welfare.mean,
            result.revenue.mean,
            result.occupancy.mean,
            result.welfare.se,
            result.revenue.se,
            result.occupancy.se,
        )
    )
    return "\n".join(lines) + "\n"
