"""Posting half the offline optimum as a price.

In the correlated model each class has a fixed value per step, so an
expected LP (a fractional knapsack) upper-bounds the offline welfare per
step.  Posting the flat price Opt/2 recovers at least half of Opt.  A
dynamic program over sampled arrival traces provides the realized
offline optimum for comparison.
"""
import numpy as np

from cloudprice import (
    CorrelatedClassList,
    PriceSchedule,
    SimConfig,
    expected_lp,
    half_opt_price,
    offline_dp_oracle,
    sample_trace,
    simulate,
)

classes = CorrelatedClassList.from_tuples([
    # (arrival rate, length, value per step)
    (0.30, 1, 1.00),
    (0.25, 3, 0.60),
    (0.20, 5, 0.35),
    (0.10, 2, 0.90),
])

sol = expected_lp(classes)
price = half_opt_price(classes)
print("expected LP (fractional knapsack, greedy-exact):")
for j, x in enumerate(sol.x):
    print(f"  class {j}: rate {classes.rates[j]:.2f} -> accept rate {x:.4f}")
print(f"Opt = {sol.opt:.5f} per step, posted price Opt/2 = {price:.5f}")

print()
print("== simulate the posted price ==")
cfg = SimConfig(horizon=500_000, replications=10, seed=2)
res = simulate(classes, PriceSchedule("flat", price), cfg)
print(f"welfare {res.welfare.mean:.5f} +- {1.96 * res.welfare.se:.5f}")
print(f"  = revenue {res.revenue.mean:.5f} + surplus {res.surplus.mean:.5f}")
print(f"guarantee: welfare >= Opt/2 = {sol.opt / 2:.5f}"
      f"  ({'holds' if res.welfare.mean >= sol.opt / 2 - 3 * res.welfare.se else 'VIOLATED'})")

print()
print("== realized offline optimum on sampled traces ==")
rng = np.random.default_rng(3)
T = 200_000
vals = [offline_dp_oracle(sample_trace(classes, T, rng), T) for _ in range(5)]
print(f"DP optimum per step: {np.mean(vals):.5f} (LP bound {sol.opt:.5f})")
print(f"posted price recovers {100 * res.welfare.mean / np.mean(vals):.1f}%"
      " of the realized offline optimum")
