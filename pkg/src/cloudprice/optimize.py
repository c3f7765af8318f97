"""Price search over flat and multi-price schedules.

For discrete value laws only the support points (plus 0 and a price just
above the maximum) can be optimal, since both the strict CDF and the
partial expectation are constant between consecutive atoms; the searches
below are therefore exact via candidate enumeration.  For continuous laws
we use a grid followed by golden-section refinement, and coordinate ascent
for multi-price schedules (no global-optimality guarantee; the paper-style
objectives are smooth enough in practice that a few restarts suffice).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distributions import ValueDistribution
from .steady import Fleet, JobMix, single_server_flat_metrics, single_server_metrics

__all__ = [
    "PriceSchedule",
    "OptimizationResult",
    "golden_section_max",
    "optimize_flat",
    "optimize_multi",
    "best_single_from_multi",
    "optimize_fleet",
]

SWEEP_TOL = 1e-10
MAX_SWEEPS = 200
DEFAULT_GRID = 1024
DEFAULT_BUDGET = 10 ** 6
DEFAULT_RESTARTS = 8

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PriceSchedule:
    """A price assignment: flat, per-length, per-server, or per-server-per-length.

    prices is a float for "flat", a tuple for "per-length"/"per-server",
    and a tuple of tuples for "per-server-per-length".
    """

    shape: str
    prices: object

    _SHAPES = ("flat", "per-length", "per-server", "per-server-per-length")

    def __post_init__(self):
        if self.shape not in self._SHAPES:
            raise ValueError(f"unknown schedule shape {self.shape!r}")
        if self.shape == "flat":
            object.__setattr__(self, "prices", float(self.prices))
        elif self.shape == "per-server-per-length":
            object.__setattr__(
                self, "prices", tuple(tuple(float(p) for p in row) for row in self.prices)
            )
        else:
            object.__setattr__(self, "prices", tuple(float(p) for p in self.prices))

    def for_mix(self, mix: JobMix) -> tuple:
        """Per-class price vector for a single server."""
        if self.shape == "flat":
            return (self.prices,) * mix.n_classes
        if self.shape == "per-length":
            if len(self.prices) != mix.n_classes:
                raise ValueError(
                    f"schedule has {len(self.prices)} prices for {mix.n_classes} classes"
                )
            return self.prices
        raise ValueError(f"{self.shape!r} schedule does not apply to a single server")

    def for_fleet(self, fleet: Fleet) -> tuple:
        """Per-server tuple of per-class price vectors."""
        if self.shape == "flat":
            return tuple((self.prices,) * m.n_classes for m in fleet.servers)
        if self.shape == "per-server":
            if len(self.prices) != fleet.n_servers:
                raise ValueError(
                    f"schedule has {len(self.prices)} prices for {fleet.n_servers} servers"
                )
            return tuple(
                (p,) * m.n_classes for p, m in zip(self.prices, fleet.servers)
            )
        if self.shape == "per-server-per-length":
            if len(self.prices) != fleet.n_servers:
                raise ValueError(
                    f"schedule has {len(self.prices)} rows for {fleet.n_servers} servers"
                )
            for row, m in zip(self.prices, fleet.servers):
                if len(row) != m.n_classes:
                    raise ValueError("per-server-per-length row/class mismatch")
            return self.prices
        raise ValueError(f"{self.shape!r} schedule does not apply to a fleet")


@dataclass(frozen=True)
class OptimizationResult:
    schedule: PriceSchedule
    value: float
    lam: float
    method: str


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Return the argmax of a unimodal f on [lo, hi] via golden-section search."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _flat_tables(mix: JobMix, dist: ValueDistribution, cands: np.ndarray, lam: float):
    """Vectorized flat-price objective over candidate prices."""
    a = np.asarray(mix.lengths, dtype=float)
    r = np.asarray(mix.probs, dtype=float)
    F = np.array([dist.cdf_strict(c) for c in cands])
    pe = np.array([dist.partial_expectation(c) for c in cands])
    s = mix.load
    den = s - (s - mix.total_rate) * F + mix.idle_rate
    num = lam * s * pe + (1.0 - lam) * s * (1.0 - F) * cands
    return num / den


def _refine_grid(f, cands: np.ndarray, values: np.ndarray) -> tuple:
    """Golden-section refinement inside the grid interval bracketing the argmax."""
    k = int(np.argmax(values))
    lo = cands[max(k - 1, 0)]
    hi = cands[min(k + 1, len(cands) - 1)]
    p = golden_section_max(f, lo, hi)
    best_p, best_v = cands[k], values[k]
    v = f(p)
    if v > best_v:
        best_p, best_v = p, v
    return float(best_p), float(best_v)


def optimize_flat(
    mix: JobMix,
    dist: ValueDistribution,
    lam: float = 1.0,
    grid: int = DEFAULT_GRID,
) -> OptimizationResult:
    """Best single price for all job lengths."""
    cands = dist.support_candidates(grid)
    values = _flat_tables(mix, dist, cands, lam)
    if dist.is_discrete:
        k = int(np.argmax(values))
        p, v, method = float(cands[k]), float(values[k]), "exhaustive"
    else:
        f = lambda p: single_server_flat_metrics(mix, dist, p).objective(lam)
        p, v = _refine_grid(f, cands, values)
        method = "grid+refine"
    return OptimizationResult(PriceSchedule("flat", p), v, lam, method)


def _exhaustive_multi(mix, dist, lam, cands):
    """Exact argmax of the multi-price objective over candidate tuples.

    Builds the numerator/denominator sums by broadcasting one axis per job
    class, so the cost is O(m^n) memory but pure numpy.  Ties resolve to the
    lexicographically lowest price tuple.
    """
    n = mix.n_classes
    m = len(cands)
    a = np.asarray(mix.lengths, dtype=float)
    r = np.asarray(mix.probs, dtype=float)
    F = np.array([dist.cdf_strict(c) for c in cands])
    pe = np.array([dist.partial_expectation(c) for c in cands])
    num = np.zeros((m,) * n)
    den = np.full((m,) * n, mix.load + mix.idle_rate)
    for i in range(n):
        shape = [1] * n
        shape[i] = m
        num += (
            lam * a[i] * r[i] * pe + (1.0 - lam) * a[i] * r[i] * (1.0 - F) * cands
        ).reshape(shape)
        den -= ((a[i] - 1.0) * r[i] * F).reshape(shape)
    obj = num / den
    flat_idx = int(np.argmax(obj))
    idx = np.unravel_index(flat_idx, obj.shape)
    prices = tuple(float(cands[k]) for k in idx)
    return prices, float(obj[idx])


def _coordinate_ascent(mix, dist, lam, grid, restarts, seed):
    """Multi-start coordinate ascent; per-coordinate grid + golden refinement."""
    rng = np.random.default_rng(seed)
    n = mix.n_classes
    hull_hi = dist.max_support()
    best_prices, best_value = None, -np.inf
    starts = [np.zeros(n)] + [rng.random(n) * hull_hi for _ in range(restarts - 1)]
    for start in starts:
        prices = np.array(start, dtype=float)
        value = single_server_metrics(mix, dist, prices).objective(lam)
        for _ in range(MAX_SWEEPS):
            improved = 0.0
            for i in range(n):
                def f(p, i=i):
                    trial = prices.copy()
                    trial[i] = p
                    return single_server_metrics(mix, dist, trial).objective(lam)

                cands = dist.support_candidates(grid)
                vals = np.array([f(c) for c in cands])
                p_i, v_i = _refine_grid(f, cands, vals)
                if v_i > value + 0.0:
                    improved += v_i - value
                    prices[i] = p_i
                    value = v_i
            if improved < SWEEP_TOL:
                break
        if value > best_value:
            best_prices, best_value = tuple(float(p) for p in prices), value
    return best_prices, best_value


def optimize_multi(
    mix: JobMix,
    dist: ValueDistribution,
    lam: float = 1.0,
    grid: int = DEFAULT_GRID,
    budget: int = DEFAULT_BUDGET,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> OptimizationResult:
    """Best per-length price vector.

    Exact (exhaustive over support candidates) for discrete laws within the
    tuple budget; coordinate ascent with restarts otherwise.
    """
    if mix.n_classes == 1:
        flat = optimize_flat(mix, dist, lam, grid)
        return OptimizationResult(
            PriceSchedule("per-length", (flat.schedule.prices,)),
            flat.value,
            lam,
            flat.method,
        )
    cands = dist.support_candidates(grid)
    if dist.is_discrete and len(cands) ** mix.n_classes <= budget:
        prices, value = _exhaustive_multi(mix, dist, lam, cands)
        method = "exhaustive"
    else:
        cg = min(grid, 256) if not dist.is_discrete else grid
        prices, value = _coordinate_ascent(mix, dist, lam, cg, restarts, seed)
        method = "coordinate-ascent"
    return OptimizationResult(PriceSchedule("per-length", prices), value, lam, method)


def best_single_from_multi(
    mix: JobMix,
    dist: ValueDistribution,
    prices: Sequence[float],
    lam: float = 1.0,
) -> tuple:
    """Pick the best of the multi-prices as a flat price.

    Returns (chosen price, flat objective value, flat/multi ratio).  The
    ratio is at least 1/2 for any price vector; it is defined as 1 when the
    multi-price objective is 0.
    """
    if len(prices) != mix.n_classes:
        raise ValueError(f"expected {mix.n_classes} prices, got {len(prices)}")
    multi = single_server_metrics(mix, dist, prices).objective(lam)
    best_p, best_v = None, -np.inf
    for p in prices:
        v = single_server_flat_metrics(mix, dist, p).objective(lam)
        if v > best_v or (v == best_v and (best_p is None or p < best_p)):
            best_p, best_v = p, v
    ratio = 1.0 if multi == 0.0 else best_v / multi
    return float(best_p), float(best_v), float(ratio)


def optimize_fleet(
    fleet: Fleet,
    dist: ValueDistribution,
    lam: float = 1.0,
    scheme: str = "per-server",
    grid: int = DEFAULT_GRID,
) -> OptimizationResult:
    """Best flat or per-server price for a fleet.

    The fleet objective is a sum of per-server terms, so the per-server
    scheme decomposes into independent flat optimizations.
    """
    if scheme == "per-server":
        per = [optimize_flat(m, dist, lam, grid) for m in fleet.servers]
        prices = tuple(res.schedule.prices for res in per)
        value = sum(res.value for res in per)
        method = per[0].method
        return OptimizationResult(
            PriceSchedule("per-server", prices), value, lam, method
        )
    if scheme != "flat":
        raise ValueError(f"unknown fleet scheme {scheme!r}")
    cands = dist.support_candidates(grid)
    totals = np.zeros(len(cands))
    for m in fleet.servers:
        totals += _flat_tables(m, dist, cands, lam)
    if dist.is_discrete:
        k = int(np.argmax(totals))
        p, v, method = float(cands[k]), float(totals[k]), "exhaustive"
    else:
        def f(p):
            return sum(
                single_server_flat_metrics(m, dist, p).objective(lam)
                for m in fleet.servers
            )

        p, v = _refine_grid(f, cands, totals)
        method = "grid+refine"
    return OptimizationResult(PriceSchedule("flat", p), v, lam, method)
