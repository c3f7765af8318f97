"""Command-line front end.

Subcommands: evaluate, optimize, bounds, simulate, offline, paper-suite.
Exit codes: 0 success, 1 assertion/acceptance failure, 2 config error.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bounds as bounds_mod
from .config import ConfigError, dump_config, load_config
from .offline import (
    CorrelatedClassList,
    expected_lp,
    half_opt_price,
    offline_dp_oracle,
    sample_trace,
)
from .optimize import (
    PriceSchedule,
    best_single_from_multi,
    optimize_flat,
    optimize_fleet,
    optimize_multi,
)
from .sim import SimConfig, result_to_csv, simulate
from .steady import Fleet, JobMix, fleet_metrics, single_server_metrics
from .distributions import UniformDistribution


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _ci_half(stat) -> float:
    return 1.96 * stat.se


def _metrics_for(cfg):
    model, dist, schedule = cfg.model, cfg.dist, cfg.schedule
    if schedule is None:
        raise ConfigError("schedule", "missing required section for this command")
    if isinstance(model, JobMix):
        return single_server_metrics(model, dist, schedule.for_mix(model))
    if isinstance(model, Fleet):
        per_server = schedule.for_fleet(model)
        flat = []
        for row, mix in zip(per_server, model.servers):
            if len(set(row)) != 1:
                raise ConfigError(
                    "schedule", "fleet closed forms need one price per server"
                )
            flat.append(row[0])
        return fleet_metrics(model, dist, flat)
    raise ConfigError("model", "evaluate supports jobmix and fleet models")


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    if args.dump_config:
        print(dump_config(cfg), end="")
        return 0
    lam = cfg.lam if args.objective_weight is None else args.objective_weight
    m = _metrics_for(cfg)
    if args.csv:
        print("welfare,revenue,occupancy,objective")
        print(f"{m.welfare:.12g},{m.revenue:.12g},{m.occupancy:.12g},{m.objective(lam):.12g}")
        return 0
    primary = "welfare" if lam >= 0.5 else "revenue"
    print(f"objective weight lambda = {lam} (primary column: {primary})")
    print(f"  welfare per step   {m.welfare:.10f}")
    print(f"  revenue per step   {m.revenue:.10f}")
    print(f"  occupancy          {m.occupancy:.10f}")
    print(f"  objective          {m.objective(lam):.10f}")
    return 0


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if args.dump_config:
        print(dump_config(cfg), end="")
        return 0
    lam = cfg.lam if args.objective_weight is None else args.objective_weight
    model, dist = cfg.model, cfg.dist
    scheme = args.scheme
    if isinstance(model, JobMix):
        if scheme == "flat":
            res = optimize_flat(model, dist, lam, grid=args.grid)
        elif scheme == "multi":
            res = optimize_multi(model, dist, lam, grid=args.grid)
        else:
            raise ConfigError("model", f"scheme {scheme!r} needs a fleet model")
    elif isinstance(model, Fleet):
        if scheme in ("flat", "per-server"):
            res = optimize_fleet(model, dist, lam, scheme=scheme, grid=args.grid)
        elif scheme == "per-server-per-length":
            per = [optimize_multi(m, dist, lam, grid=args.grid) for m in model.servers]
            value = sum(r.value for r in per)
            prices = tuple(r.schedule.prices for r in per)
            print(f"scheme: per-server-per-length   method: {per[0].method}")
            print(f"value: {value:.10f}")
            for j, row in enumerate(prices):
                print(f"  server {j}: {tuple(round(p, 10) for p in row)}")
            return 0
        else:
            raise ConfigError("model", f"scheme {scheme!r} needs a jobmix model")
    else:
        raise ConfigError("model", "optimize supports jobmix and fleet models")
    print(f"scheme: {res.schedule.shape}   method: {res.method}")
    print(f"value: {res.value:.10f}")
    print(f"prices: {res.schedule.prices}")
    if scheme == "multi":
        p, flat_v, ratio = best_single_from_multi(
            model, dist, res.schedule.prices, lam
        )
        print(f"best single from multi: p={p:.10f} value={flat_v:.10f} ratio={ratio:.6f}")
    return 0


def cmd_bounds(args) -> int:
    cfg = load_config(args.config)
    if args.dump_config:
        print(dump_config(cfg), end="")
        return 0
    model = cfg.model
    if isinstance(model, JobMix):
        hb = bounds_mod.h_corner_min(model)
        print(f"h corner minimum: {hb.value:.12f}  witness B = {hb.witness}")
        if model.n_classes == 2:
            r = bounds_mod.rho(
                model.lengths[0], model.lengths[1], model.probs[0], model.probs[1]
            )
            print(f"rho({model.lengths[0]},{model.lengths[1]},"
                  f"{model.probs[0]},{model.probs[1]}) = {r:.12f}")
        return 0
    if isinstance(model, Fleet):
        if model.mode == "equal-r":
            fb = bounds_mod.fleet_bound(model)
            cb = bounds_mod.composed_bound(model)
            print(f"fleet flat-vs-per-server bound: {fb.value:.12f}")
            print(f"composed (flat vs per-server-per-length): {cb.value:.12f}")
        else:
            ob = bounds_mod.one_length_fleet_bound(model)
            print(f"one-length fleet bound: {ob.value:.12f}")
        return 0
    raise ConfigError("model", "bounds supports jobmix and fleet models")


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.dump_config:
        print(dump_config(cfg), end="")
        return 0
    sim_cfg = cfg.sim or SimConfig(horizon=10 ** 6)
    sim_cfg = SimConfig(
        horizon=args.horizon if args.horizon else sim_cfg.horizon,
        replications=args.reps if args.reps else sim_cfg.replications,
        seed=args.seed if args.seed is not None else sim_cfg.seed,
        warmup=sim_cfg.warmup if args.horizon is None else None,
    )
    model, dist = cfg.model, cfg.dist
    schedule = cfg.schedule
    lp_opt = None
    if args.price is not None:
        if args.price == "half-opt":
            if not isinstance(model, CorrelatedClassList):
                raise ConfigError("model", "--price half-opt needs a correlated model")
            lp_opt = expected_lp(model).opt
            schedule = PriceSchedule("flat", lp_opt / 2.0)
        else:
            schedule = PriceSchedule("flat", float(args.price))
    if schedule is None:
        raise ConfigError("schedule", "missing schedule section (or pass --price)")
    sim_model = model if isinstance(model, CorrelatedClassList) else (model, dist)
    result = simulate(sim_model, schedule, sim_cfg)
    if args.csv:
        print(result_to_csv(result), end="")
        return 0
    print(f"horizon={sim_cfg.horizon} replications={sim_cfg.replications} "
          f"seed={sim_cfg.seed} warmup={sim_cfg.warmup}")
    closed = None
    if isinstance(model, JobMix):
        closed = single_server_metrics(model, dist, schedule.for_mix(model))
    elif isinstance(model, Fleet):
        rows = schedule.for_fleet(model)
        if all(len(set(row)) == 1 for row in rows):
            closed = fleet_metrics(model, dist, [row[0] for row in rows])
    for name, stat in (
        ("welfare", result.welfare),
        ("revenue", result.revenue),
        ("occupancy", result.occupancy),
    ):
        line = f"  {name:10s} {stat.mean:.8f} +- {_ci_half(stat):.8f}"
        if closed is not None:
            line += f"   closed form {getattr(closed, name):.8f}"
        print(line)
    if lp_opt is not None:
        ratio = result.welfare.mean / lp_opt if lp_opt > 0 else 1.0
        ok = result.welfare.mean >= 0.5 * lp_opt - 3.0 * result.welfare.se
        print(f"  lp opt {lp_opt:.8f}  price {lp_opt / 2:.8f}  "
              f"welfare/opt {ratio:.4f}  >=1/2 within 3se: {'yes' if ok else 'NO'}")
        if not ok:
            return 1
    return 0


def cmd_offline(args) -> int:
    cfg = load_config(args.config)
    if args.dump_config:
        print(dump_config(cfg), end="")
        return 0
    model = cfg.model
    if not isinstance(model, CorrelatedClassList):
        raise ConfigError("model", "offline needs a correlated model")
    sol = expected_lp(model)
    print(f"expected LP opt per step: {sol.opt:.10f}")
    print(f"acceptance rates x: {tuple(round(x, 10) for x in sol.x)}")
    print(f"half-opt flat price: {half_opt_price(model):.10f}")
    if args.traces:
        rng = np.random.default_rng(args.seed or 0)
        horizon = args.horizon or 10 ** 5
        vals = [
            offline_dp_oracle(sample_trace(model, horizon, rng), horizon)
            for _ in range(args.traces)
        ]
        mean = float(np.mean(vals))
        print(f"sampled DP optimum per step (mean of {args.traces} traces, "
              f"T={horizon}): {mean:.10f}  (LP bound {sol.opt:.10f})")
    return 0


def _paper_checks():
    """Every concrete number the closed forms should reproduce."""
    mix = JobMix((1, 2), (0.5, 0.5))
    uni = UniformDistribution(0.0, 1.0)
    s15 = 3.0 - math.sqrt(15.0 / 2.0)
    s47 = 3.0 - math.sqrt(47.0 / 8.0)

    def cw(prices):
        return single_server_metrics(mix, uni, prices).welfare

    def cr(prices):
        return single_server_metrics(mix, uni, prices).revenue

    checks = [
        ("cw-two-price-opt", cw((0.0, s15)), 6.0 - math.sqrt(30.0), 1e-9),
        ("cw-flat-opt", cw((3 - 2 * math.sqrt(2),) * 2), 9.0 - 6.0 * math.sqrt(2), 1e-9),
        ("cw-flat-zero", cw((0.0, 0.0)), 0.5, 1e-9),
        ("cw-single-p2", cw((s15, s15)), 0.510, 1e-3),
        ("cr-two-price-opt", cr((0.5, s47)), 10.0 - math.sqrt(94.0), 1e-9),
        ("cr-flat-opt", cr((3 - math.sqrt(6),) * 2), 15.0 - 6.0 * math.sqrt(6), 1e-9),
        ("cr-flat-half", cr((0.5, 0.5)), 0.3, 1e-12),
        ("cr-single-p2", cr((s47, s47)), 0.302, 1e-3),
        ("rho-1-2", bounds_mod.rho(1, 2, 0.5, 0.5), 6.0 / 7.0, 1e-12),
        ("rho-1-3", bounds_mod.rho(1, 3, 0.5, 0.5), 4.0 / 5.0, 1e-12),
        ("rho-2-3", bounds_mod.rho(2, 3, 0.5, 0.5), 15.0 / 16.0, 1e-12),
        ("rho-2-inf", bounds_mod.rho(2, math.inf, 0.5, 0.5), 3.0 / 4.0, 1e-12),
        ("rho-fixed-prob", bounds_mod.rho(1, math.inf, 0.3, 0.2), 1.0 / 1.3, 1e-12),
    ]
    third = 1.0 / 3.0
    for a3, expected, wit in ((6, 44.0 / 49.0, (0.0, 1.0, 1.0)),
                              (7, 8.0 / 9.0, None),
                              (8, 78.0 / 89.0, (0.0, 0.0, 1.0))):
        hb = bounds_mod.h_corner_min(JobMix((2, 3, a3), (third, third, third)))
        checks.append((f"h-min-a3-{a3}", hb.value, expected, 1e-12))
        if wit is not None:
            checks.append(
                (f"h-witness-a3-{a3}", 0.0 if hb.witness == wit else 1.0, 0.0, 0.5)
            )
    m7 = JobMix((2, 3, 7), (third, third, third))
    checks.append(
        (
            "h-indifference-a3-7",
            bounds_mod.h_eval(m7, (0, 0, 1)) - bounds_mod.h_eval(m7, (0, 1, 1)),
            0.0,
            1e-12,
        )
    )
    res_w = optimize_flat(mix, uni, lam=1.0)
    res_r = optimize_flat(mix, uni, lam=0.0)
    checks.append(("opt-flat-welfare", res_w.value, 9.0 - 6.0 * math.sqrt(2), 1e-9))
    checks.append(("opt-flat-revenue", res_r.value, 15.0 - 6.0 * math.sqrt(6), 1e-9))
    multi_w = optimize_multi(mix, uni, lam=1.0)
    checks.append(("opt-multi-welfare", multi_w.value, 6.0 - math.sqrt(30.0), 1e-7))
    c = 1000.0
    for n in (2, 3, 4):
        j = np.arange(1, n + 1)
        h0 = bounds_mod.h0_equal_load(
            c ** (-2.0 * j), one_minus_b=c ** (-2.0 * j + 1), arrival_prob=1.0
        )
        checks.append((f"h0-equal-load-n{n}", h0, bounds_mod.harmonic(n), 1e-2))
        length = c ** (2 * n)
        h0b = bounds_mod.h0_shared_length(
            c ** (2.0 * (n - j)),
            length + 1.0,
            one_minus_b=c ** (2.0 * (n - j) + 1) / length,
        )
        checks.append((f"h0-one-length-n{n}", h0b, bounds_mod.harmonic(n), 1e-2))
    return checks


def _sim_checks():
    mix = JobMix((1, 2), (0.5, 0.5))
    uni = UniformDistribution(0.0, 1.0)
    cfg = SimConfig(horizon=200_000, replications=10, seed=7)
    res = simulate((mix, uni), PriceSchedule("flat", 0.0), cfg)
    return [("sim-flat-zero-welfare", res.welfare.mean, 0.5, 3.0 * res.welfare.se)]


def cmd_paper_suite(args) -> int:
    checks = _paper_checks() + _sim_checks()
    if args.filter:
        checks = [c for c in checks if args.filter in c[0]]
    failures = 0
    for name, got, expected, tol in checks:
        ok = abs(got - expected) <= tol
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: got {got:.12g} expected {expected:.12g} (tol {tol:g})")
        if not ok:
            failures += 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudprice",
        description="Posted-price admission control: closed forms, bounds, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("config", help="YAML instance config")
            p.add_argument("--dump-config", action="store_true",
                           help="print the normalized config and exit")
        p.add_argument("--lambda", dest="objective_weight", type=float, default=None,
                       help="objective weight: 1 welfare, 0 revenue")

    p = sub.add_parser("evaluate", help="closed-form metrics for a schedule")
    add_common(p)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="search for optimal prices")
    add_common(p)
    p.add_argument("--scheme", default="flat",
                   choices=["flat", "multi", "per-server", "per-server-per-length"])
    p.add_argument("--grid", type=int, default=1024,
                   help="grid size for continuous distributions")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("bounds", help="approximation-ratio bounds for the instance")
    add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="Monte Carlo estimate with CIs")
    add_common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--price", default=None,
                   help="flat price override; 'half-opt' for correlated models")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("offline", help="expected LP, half-opt price, DP oracle")
    add_common(p)
    p.add_argument("--traces", type=int, default=0)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_offline)

    p = sub.add_parser("paper-suite", help="verify all reference values")
    p.add_argument("--filter", default=None, help="only run checks matching substring")
    p.set_defaults(func=cmd_paper_suite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(str(exc), 2)
    except (ValueError, TypeError) as exc:
        return _fail(str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
