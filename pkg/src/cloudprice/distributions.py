"""Value-per-time-step distributions.

All distributions use a strict CDF convention: ``cdf_strict(x)`` returns
Pr[value < x], not Pr[value <= x].  The complementary tail Pr[value >= x]
therefore includes any atom sitting exactly at x.  This matches the tie
rule used everywhere in this package: a job whose value per step equals
the posted price is accepted.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "ValueDistribution",
    "DiscreteDistribution",
    "UniformDistribution",
    "PiecewiseLinearDistribution",
    "make_bimodal",
]

_WEIGHT_TOL = 1e-12


class ValueDistribution:
    """Base class for per-step value laws.

    Instances are immutable after construction and safe to share across
    threads.  Subclasses implement the strict CDF, the partial expectation
    E[value * 1{value >= p}], inverse-CDF sampling, and candidate price
    enumeration for discrete optimization.
    """

    def cdf_strict(self, x: float) -> float:
        """Pr[value < x]; left-continuous at atoms."""
        raise NotImplementedError

    def tail_prob(self, x: float) -> float:
        """Pr[value >= x]; complement of the strict CDF."""
        return 1.0 - self.cdf_strict(x)

    def partial_expectation(self, p: float) -> float:
        """E[value * 1{value >= p}]; atoms exactly at p are included."""
        raise NotImplementedError

    def mean(self) -> float:
        return self.partial_expectation(0.0)

    def max_support(self) -> float:
        raise NotImplementedError

    def support_candidates(self, grid: int = 1024) -> np.ndarray:
        """Candidate prices for exact or grid-based price search."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw `size` values via inverse-CDF sampling."""
        return self._inverse_cdf(rng.random(size))

    def _inverse_cdf(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def is_discrete(self) -> bool:
        return False


def _reject_price_delta(vmax: float) -> float:
    # price strictly above the support, i.e. "reject everything"
    return max(1.0, vmax) * 1e-6


class DiscreteDistribution(ValueDistribution):
    """Finite support distribution given as ascending (value, weight) atoms."""

    def __init__(self, atoms):
        atoms = [(float(v), float(w)) for v, w in atoms]
        if not atoms:
            raise ValueError("need at least one atom")
        values = np.array([v for v, _ in atoms])
        weights = np.array([w for _, w in atoms])
        if np.any(values < 0):
            raise ValueError("atom values must be nonnegative")
        if np.any(np.diff(values) <= 0):
            raise ValueError("atom values must be strictly ascending")
        if np.any(weights < 0):
            raise ValueError("atom weights must be nonnegative")
        if abs(weights.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"atom weights sum to {weights.sum()!r}, expected 1")
        self.values = values
        self.weights = weights
        # mass strictly below each insertion point
        self._cum_below = np.concatenate(([0.0], np.cumsum(weights)))
        # sum of v*w over atoms at index >= k
        vw = values * weights
        self._tail_vw = np.concatenate((np.cumsum(vw[::-1])[::-1], [0.0]))
        self._cum_weights = np.cumsum(weights)

    @property
    def is_discrete(self) -> bool:
        return True

    def cdf_strict(self, x):
        idx = np.searchsorted(self.values, x, side="left")
        return float(self._cum_below[idx])

    def partial_expectation(self, p):
        idx = np.searchsorted(self.values, p, side="left")
        return float(self._tail_vw[idx])

    def max_support(self):
        return float(self.values[-1])

    def support_candidates(self, grid: int = 1024) -> np.ndarray:
        vmax = self.max_support()
        cands = [0.0] + [v for v in self.values if v > 0.0]
        cands.append(vmax + _reject_price_delta(vmax))
        return np.array(cands)

    def _inverse_cdf(self, u):
        idx = np.searchsorted(self._cum_weights, u, side="right")
        return self.values[np.minimum(idx, len(self.values) - 1)]


class UniformDistribution(ValueDistribution):
    """Continuous uniform on [lo, hi], lo >= 0."""

    def __init__(self, lo: float, hi: float):
        lo, hi = float(lo), float(hi)
        if lo < 0:
            raise ValueError("lo must be nonnegative")
        if not lo < hi:
            raise ValueError("need lo < hi")
        self.lo = lo
        self.hi = hi

    def cdf_strict(self, x):
        # continuous, so the strict and ordinary CDF coincide
        return float(np.clip((x - self.lo) / (self.hi - self.lo), 0.0, 1.0))

    def partial_expectation(self, p):
        if p <= self.lo:
            return 0.5 * (self.lo + self.hi)
        if p >= self.hi:
            return 0.0
        return (self.hi ** 2 - p ** 2) / (2.0 * (self.hi - self.lo))

    def max_support(self):
        return self.hi

    def support_candidates(self, grid: int = 1024) -> np.ndarray:
        return np.linspace(self.lo, self.hi, grid)

    def _inverse_cdf(self, u):
        return self.lo + u * (self.hi - self.lo)


class PiecewiseLinearDistribution(ValueDistribution):
    """Density that is piecewise linear between breakpoints (x_k, f(x_k)).

    The breakpoints must integrate to total mass 1 (trapezoid rule is exact
    for a piecewise-linear density).
    """

    def __init__(self, breakpoints):
        pts = [(float(x), float(d)) for x, d in breakpoints]
        if len(pts) < 2:
            raise ValueError("need at least two breakpoints")
        xs = np.array([x for x, _ in pts])
        ds = np.array([d for _, d in pts])
        if xs[0] < 0:
            raise ValueError("support must be nonnegative")
        if np.any(np.diff(xs) <= 0):
            raise ValueError("breakpoint positions must be strictly ascending")
        if np.any(ds < 0):
            raise ValueError("density must be nonnegative")
        seg_mass = 0.5 * (ds[:-1] + ds[1:]) * np.diff(xs)
        total = seg_mass.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {total!r}, expected 1")
        self.xs = xs
        self.ds = ds
        self._widths = np.diff(xs)
        self._slopes = np.diff(ds) / self._widths
        self._cum_mass = np.concatenate(([0.0], np.cumsum(seg_mass)))
        # full integrals of t*f(t) per segment, then suffix totals
        seg_xf = np.array(
            [self._int_xf(k, self._widths[k]) for k in range(len(self._widths))]
        )
        self._tail_xf = np.concatenate((np.cumsum(seg_xf[::-1])[::-1], [0.0]))

    def _int_f(self, k, u):
        # integral of f over [x_k, x_k + u]
        return self.ds[k] * u + 0.5 * self._slopes[k] * u ** 2

    def _int_xf(self, k, u):
        # integral of t*f(t) over [x_k, x_k + u]
        xk, dk, m = self.xs[k], self.ds[k], self._slopes[k]
        return xk * dk * u + 0.5 * (dk + xk * m) * u ** 2 + m * u ** 3 / 3.0

    def _segment(self, x):
        k = int(np.searchsorted(self.xs, x, side="right")) - 1
        return min(max(k, 0), len(self._widths) - 1)

    def cdf_strict(self, x):
        if x <= self.xs[0]:
            return 0.0
        if x >= self.xs[-1]:
            return 1.0
        k = self._segment(x)
        return float(self._cum_mass[k] + self._int_f(k, x - self.xs[k]))

    def partial_expectation(self, p):
        if p <= self.xs[0]:
            return float(self._tail_xf[0])
        if p >= self.xs[-1]:
            return 0.0
        k = self._segment(p)
        return float(self._tail_xf[k] - self._int_xf(k, p - self.xs[k]))

    def max_support(self):
        return float(self.xs[-1])

    def support_candidates(self, grid: int = 1024) -> np.ndarray:
        return np.linspace(self.xs[0], self.xs[-1], grid)

    def _inverse_cdf(self, u):
        u = np.asarray(u, dtype=float)
        k = np.clip(
            np.searchsorted(self._cum_mass, u, side="right") - 1,
            0,
            len(self._widths) - 1,
        )
        rem = u - self._cum_mass[k]
        dk = self.ds[k]
        m = self._slopes[k]
        # solve 0.5*m*t^2 + dk*t = rem for t in [0, width_k]
        with np.errstate(divide="ignore", invalid="ignore"):
            disc = np.sqrt(np.maximum(dk ** 2 + 2.0 * m * rem, 0.0))
            t_quad = np.where(m != 0, (disc - dk) / np.where(m != 0, m, 1.0), 0.0)
            t_lin = np.where(dk > 0, rem / np.where(dk > 0, dk, 1.0), 0.0)
        t = np.where(np.abs(m) > 1e-300, t_quad, t_lin)
        t = np.clip(t, 0.0, self._widths[k])
        return self.xs[k] + t


def make_bimodal(q2: float, v1: float, v2: float) -> DiscreteDistribution:
    """Two-point law: mass 1-q2 on the low value v1 and q2 on the high v2."""
    if not 0.0 < q2 < 1.0:
        raise ValueError("q2 must lie strictly in (0, 1)")
    if v1 < 0:
        raise ValueError("values must be nonnegative")
    if v1 >= v2:
        raise ValueError("need v1 < v2")
    return DiscreteDistribution([(v1, 1.0 - q2), (v2, q2)])
