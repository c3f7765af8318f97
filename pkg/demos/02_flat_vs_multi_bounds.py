"""Worst-case ratio of one flat price against a per-length schedule.

For two job lengths the worst ratio has a closed form rho(a, b, r1, r2);
for more lengths it is the minimum of the h function over 0/1 corner
vectors.  Both are tight: a bimodal value distribution parameterized by
a small eps realizes ratios approaching the bound.
"""
import numpy as np

from cloudprice import (
    JobMix,
    best_single_from_multi,
    h_corner_min,
    rho,
    single_server_metrics,
    tight_bimodal_instance,
)

print("== two lengths: the rho table ==")
for a, b in [(1, 2), (1, 3), (2, 3)]:
    print(f"rho({a},{b}, 1/2, 1/2) = {rho(a, b, 0.5, 0.5):.6f}")
print(f"rho(1, inf, 1/2, .)   = {rho(1, float('inf'), 0.5, 0.5):.6f}"
      "   (long-job limit)")

print()
print("== three lengths: corner search over the h function ==")
third = 1.0 / 3.0
for a3 in (6, 7, 8):
    mix = JobMix((2, 3, a3), (third, third, third))
    res = h_corner_min(mix)
    print(f"lengths (2,3,{a3}): min h = {res.value:.6f} at B = {res.witness}")

print()
print("== the bound is tight: a bimodal instance approaches rho ==")
target = rho(1, 2, 0.5, 0.5)
print(f"target rho(1,2,1/2,1/2) = {target:.6f}")
for eps in (1e-2, 1e-3, 1e-4):
    mix, dist, prices = tight_bimodal_instance(1, 2, 0.5, 0.5, eps)
    multi = single_server_metrics(mix, dist, prices).welfare
    _, flat, _ = best_single_from_multi(mix, dist, prices, lam=1.0)
    print(f"eps {eps:g}: realized flat/multi ratio {flat / multi:.6f}")

print()
print("== no random mix ever breaks 1/2 ==")
rng = np.random.default_rng(0)
worst = 1.0
for _ in range(500):
    n = int(rng.integers(2, 6))
    lengths = tuple(sorted(int(x) for x in rng.integers(1, 13, n)))
    w = rng.dirichlet(np.ones(n)) * rng.uniform(0.2, 1.0)
    worst = min(worst, h_corner_min(JobMix(lengths, tuple(w))).value)
print(f"worst corner minimum over 500 random mixes: {worst:.6f} (>= 0.5)")
