"""Flat-vs-multi-price approximation ratios and their worst cases.

The central object is the ratio function h(B_1, ..., B_n) obtained after
minimizing over the tail-weight variables: B_i is the strict CDF of the
value law at the i-th price, and the worst flat/multi ratio for a job mix
is the minimum of h over corner vectors B in {0, 1}^n, always attained
with B_1 = 0 and B_n = 1.  For two job lengths the minimum has the closed
form rho(a, b, r1, r2).  Fleet ratios are governed by the harmonic number
of the fleet size and by the spread M of the per-server loads (or arrival
rates in the shared-length model), via the companion h0 sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distributions import DiscreteDistribution, make_bimodal
from .steady import Fleet, JobMix

__all__ = [
    "RatioBound",
    "rho",
    "h_eval",
    "h_corner_min",
    "harmonic",
    "m_ratio_term",
    "fleet_bound",
    "one_length_fleet_bound",
    "composed_bound",
    "tight_bimodal_instance",
    "h0_equal_load",
    "h0_shared_length",
]

CORNER_BUDGET = 24


@dataclass(frozen=True)
class RatioBound:
    """An approximation-ratio guarantee in (0, 1], with optional witness corner."""

    value: float
    kind: str
    witness: Optional[tuple] = None


def harmonic(n: int) -> float:
    """nth harmonic number 1 + 1/2 + ... + 1/n."""
    if n < 1:
        raise ValueError("n must be positive")
    return float(sum(1.0 / k for k in range(1, n + 1)))


def m_ratio_term(M: float) -> float:
    """(M-1)/(M ln M) with the M -> 1 limit defined as 1."""
    if M < 1.0 - 1e-12:
        raise ValueError("spread M must be at least 1")
    if abs(M - 1.0) < 1e-12:
        return 1.0
    return (M - 1.0) / (M * math.log(M))


def rho(a: int, b, r1: float, r2: float) -> float:
    """Tight flat-vs-two-price ratio for lengths a < b with rates r1, r2.

    Pass b = math.inf for the long-job limit (a*r1 + 1 - r1)/(a*r1 + 1),
    which does not depend on r2.
    """
    if a < 1:
        raise ValueError("a must be at least 1")
    if not (r1 > 0 and r2 > 0 and r1 + r2 <= 1.0 + 1e-12):
        raise ValueError("need r1, r2 > 0 with r1 + r2 <= 1")
    if math.isinf(b):
        return (a * r1 + 1.0 - r1) / (a * r1 + 1.0)
    if b <= a:
        raise ValueError("need a < b")
    num = (a * r1 + b * r2) * (a * r1 + 1.0 - r1)
    den = a * (a - 1.0) * r1 ** 2 + a * (b - 1.0) * r1 * r2 + a * r1 + b * r2
    return num / den


def h_eval(mix: JobMix, B: Sequence[float]) -> float:
    """The worst-case flat/multi ratio as a function of the CDF corner vector B."""
    if len(B) != mix.n_classes:
        raise ValueError(f"expected {mix.n_classes} coordinates, got {len(B)}")
    a = np.asarray(mix.lengths, dtype=float)
    r = np.asarray(mix.probs, dtype=float)
    Bv = np.asarray(B, dtype=float)
    s = mix.load
    rt = mix.total_rate
    base = s * s + s * (1.0 - rt)
    num = base - s * float(np.sum((a - 1.0) * r * Bv))
    den = base - (s - rt) * float(np.sum(a * r * Bv))
    assert den > 0.0, "h denominator must be positive for a valid job mix"
    return num / den


def h_corner_min(mix: JobMix) -> RatioBound:
    """Exhaustive minimum of h over corner vectors B in {0, 1}^n.

    The minimum is always attained with B_1 = 0 and B_n = 1, so only the
    middle coordinates are enumerated (2^(n-2) corners).  Value >= 1/2 for
    every mix.
    """
    n = mix.n_classes
    if n > CORNER_BUDGET:
        raise ValueError(f"corner search supports at most {CORNER_BUDGET} classes")
    if n == 1:
        return RatioBound(1.0, "h-corner", witness=(0.0,))
    a = np.asarray(mix.lengths, dtype=float)
    r = np.asarray(mix.probs, dtype=float)
    s = mix.load
    rt = mix.total_rate
    base = s * s + s * (1.0 - rt)
    num_coef = s * (a - 1.0) * r
    den_coef = (s - rt) * a * r
    # contributions of the pinned coordinates B_1 = 0, B_n = 1
    num0 = base - num_coef[-1]
    den0 = base - den_coef[-1]
    mid = n - 2
    if mid == 0:
        return RatioBound(num0 / den0, "h-corner", witness=(0.0,) * (n - 1) + (1.0,))
    bits = (
        np.arange(2 ** mid)[:, None] >> np.arange(mid)[None, :]
    ) & 1
    nums = num0 - bits.astype(float) @ num_coef[1:-1]
    dens = den0 - bits.astype(float) @ den_coef[1:-1]
    vals = nums / dens
    k = int(np.argmin(vals))
    witness = (0.0,) + tuple(float(b) for b in bits[k]) + (1.0,)
    return RatioBound(float(vals[k]), "h-corner", witness=witness)


def fleet_bound(fleet: Fleet) -> RatioBound:
    """Flat-vs-per-server guarantee for an equal-r fleet."""
    if fleet.mode != "equal-r":
        raise ValueError("fleet_bound requires an equal-r fleet")
    n = fleet.n_servers
    loads = [m.load for m in fleet.servers]
    M = max(loads) / min(loads)
    value = max(1.0 / harmonic(n), m_ratio_term(M))
    return RatioBound(value, "harmonic/m-ratio")


def one_length_fleet_bound(fleet: Fleet) -> RatioBound:
    """Flat-vs-per-server guarantee for a shared-length fleet."""
    if fleet.mode != "shared-length":
        raise ValueError("one_length_fleet_bound requires a shared-length fleet")
    n = fleet.n_servers
    rates = [m.probs[0] for m in fleet.servers]
    M = max(rates) / min(rates)
    a = fleet.shared_length
    value = max(1.0 / harmonic(n), m_ratio_term(M), 1.0 / a)
    return RatioBound(value, "one-length")


def composed_bound(fleet: Fleet) -> RatioBound:
    """Single price for all servers and lengths vs per-server-per-length prices."""
    return RatioBound(0.5 * fleet_bound(fleet).value, "composed")


def tight_bimodal_instance(
    a: int, b: int, r1: float, r2: float, eps: float
) -> tuple:
    """Worst-case construction approaching the rho(a, b, r1, r2) ratio.

    Returns (mix, bimodal distribution, two-price vector).  The high value
    1 - eps carries mass eps and the low value is chosen so that the low
    and high welfare contributions balance; the realized flat/multi welfare
    ratio converges to rho as eps -> 0.
    """
    if not a < b:
        raise ValueError("need a < b")
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    mix = JobMix((a, b), (r1, r2))
    excess = mix.load - mix.total_rate
    if excess <= 1e-12:
        raise ValueError("construction requires load > arrival rate (some length > 1)")
    q2 = eps
    v2 = 1.0 - eps
    q1 = 1.0 - eps
    v1 = q2 * v2 * excess / q1
    if v1 >= v2:
        raise ValueError("eps too large for this mix: low value reaches the high value")
    dist = make_bimodal(q2, v1, v2)
    return mix, dist, (v1, v2)


def h0_equal_load(
    inv_loads: Sequence[float],
    B: Optional[Sequence[float]] = None,
    arrival_prob: float = 1.0,
    one_minus_b: Optional[Sequence[float]] = None,
) -> float:
    """The h0 sum for equal-r fleets; the ratio function h is 1/h0.

    inv_loads are the reciprocals 1/S_j of the per-server loads.  Pass
    one_minus_b instead of B when the corner values sit within float
    rounding of 1 (the tightness constructions do).
    """
    s = np.asarray(inv_loads, dtype=float)
    omb = _one_minus(B, one_minus_b, len(s))
    R = arrival_prob
    # numerator/denominator terms of h_j, written in terms of 1 - B_j
    scale = 1.0 - R * omb  # = 1 - R + R*B_j
    total = 0.0
    for j in range(len(s)):
        inner = np.sum((omb[j] + s[j] * scale[j]) / (omb[j] + s * scale[j]))
        total += 1.0 / inner
    return float(total)


def h0_shared_length(
    inv_rates: Sequence[float],
    length: float,
    B: Optional[Sequence[float]] = None,
    one_minus_b: Optional[Sequence[float]] = None,
) -> float:
    """The h0 sum for shared-length fleets; h is 1/h0.

    inv_rates are the reciprocals 1/r_j of the per-server arrival rates.
    """
    R = np.asarray(inv_rates, dtype=float)
    omb = _one_minus(B, one_minus_b, len(R))
    am1 = length - 1.0
    total = 0.0
    for j in range(len(R)):
        inner = np.sum((R[j] + am1 * omb[j]) / (R + am1 * omb[j]))
        total += 1.0 / inner
    return float(total)


def _one_minus(B, one_minus_b, n):
    if (B is None) == (one_minus_b is None):
        raise ValueError("pass exactly one of B or one_minus_b")
    if one_minus_b is not None:
        omb = np.asarray(one_minus_b, dtype=float)
    else:
        omb = 1.0 - np.asarray(B, dtype=float)
    if len(omb) != n:
        raise ValueError("coordinate count mismatch")
    if np.any(omb < 0) or np.any(omb > 1):
        raise ValueError("corner coordinates must lie in [0, 1]")
    return omb
