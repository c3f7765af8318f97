"""YAML instance configs for the CLI.

A config file has sections mirroring the library types:

    model:         jobmix / fleet / correlated parameters
    distribution:  the value-per-step law
    schedule:      optional price schedule
    objective_weight:  lambda in [0, 1] (1 = welfare, 0 = revenue)
    sim:           optional horizon / replications / seed / warmup

Validation errors carry the dotted key path of the offending field.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import yaml

from .distributions import (
    DiscreteDistribution,
    PiecewiseLinearDistribution,
    UniformDistribution,
    ValueDistribution,
)
from .offline import CorrelatedClassList
from .optimize import PriceSchedule
from .sim import SimConfig
from .steady import Fleet, JobMix

__all__ = ["ConfigError", "InstanceConfig", "load_config", "parse_config", "dump_config"]


class ConfigError(Exception):
    """Invalid config; message starts with the offending key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass(frozen=True)
class InstanceConfig:
    model: object  # JobMix | Fleet | CorrelatedClassList
    dist: Optional[ValueDistribution]
    schedule: Optional[PriceSchedule]
    lam: float
    sim: Optional[SimConfig]
    raw: dict


def _require(section: dict, key: str, path: str):
    if key not in section:
        raise ConfigError(f"{path}.{key}", "missing required field")
    return section[key]


def _wrap(path: str, fn, *args):
    try:
        return fn(*args)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_mix(section: dict, path: str) -> JobMix:
    lengths = _require(section, "lengths", path)
    probs = _require(section, "probs", path)
    return _wrap(path, JobMix, tuple(lengths), tuple(probs))


def _parse_model(section, path="model"):
    if not isinstance(section, dict):
        raise ConfigError(path, "must be a mapping")
    kind = _require(section, "type", path)
    if kind == "jobmix":
        return _parse_mix(section, path)
    if kind == "fleet":
        servers = _require(section, "servers", path)
        mode = section.get("mode", "equal-r")
        mixes = [
            _parse_mix(s, f"{path}.servers[{i}]") for i, s in enumerate(servers)
        ]
        return _wrap(f"{path}.servers", Fleet, tuple(mixes), mode)
    if kind == "correlated":
        rows = _require(section, "classes", path)
        triples = []
        for i, row in enumerate(rows):
            rpath = f"{path}.classes[{i}]"
            triples.append(
                (
                    _require(row, "rate", rpath),
                    _require(row, "length", rpath),
                    _require(row, "value", rpath),
                )
            )
        return _wrap(f"{path}.classes", CorrelatedClassList.from_tuples, triples)
    raise ConfigError(f"{path}.type", f"unknown model type {kind!r}")


def _parse_distribution(section, path="distribution"):
    if not isinstance(section, dict):
        raise ConfigError(path, "must be a mapping")
    kind = _require(section, "kind", path)
    if kind == "discrete":
        atoms = _require(section, "atoms", path)
        return _wrap(f"{path}.atoms", DiscreteDistribution, atoms)
    if kind == "uniform":
        lo = _require(section, "lo", path)
        hi = _require(section, "hi", path)
        return _wrap(path, UniformDistribution, lo, hi)
    if kind == "piecewise":
        pts = _require(section, "breakpoints", path)
        return _wrap(f"{path}.breakpoints", PiecewiseLinearDistribution, pts)
    raise ConfigError(f"{path}.kind", f"unknown distribution kind {kind!r}")


def _parse_schedule(section, path="schedule"):
    if not isinstance(section, dict):
        raise ConfigError(path, "must be a mapping")
    shape = _require(section, "shape", path)
    prices = _require(section, "prices", path)
    return _wrap(path, PriceSchedule, shape, prices)


def _parse_sim(section, path="sim"):
    if not isinstance(section, dict):
        raise ConfigError(path, "must be a mapping")
    known = {"horizon", "replications", "seed", "warmup"}
    for key in section:
        if key not in known:
            raise ConfigError(f"{path}.{key}", "unknown field")
    return _wrap(
        path,
        SimConfig,
        _require(section, "horizon", path),
        section.get("replications", 30),
        section.get("seed", 0),
        section.get("warmup", None),
    )


def parse_config(data: dict) -> InstanceConfig:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a mapping")
    model = _parse_model(_require(data, "model", "<root>"))
    needs_dist = not isinstance(model, CorrelatedClassList)
    dist = None
    if "distribution" in data:
        dist = _parse_distribution(data["distribution"])
    elif needs_dist:
        raise ConfigError("distribution", "missing required section for this model")
    schedule = _parse_schedule(data["schedule"]) if "schedule" in data else None
    lam = data.get("objective_weight", 1.0)
    if not isinstance(lam, (int, float)) or not 0.0 <= float(lam) <= 1.0:
        raise ConfigError("objective_weight", f"must lie in [0, 1], got {lam!r}")
    sim = _parse_sim(data["sim"]) if "sim" in data else None
    return InstanceConfig(model, dist, schedule, float(lam), sim, data)


def load_config(path: str) -> InstanceConfig:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from exc
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"invalid YAML: {exc}") from exc
    return parse_config(data)


def dump_config(cfg: InstanceConfig) -> str:
    """Re-emit the normalized config; reparsing yields an identical instance."""
    data = {}
    model = cfg.model
    if isinstance(model, JobMix):
        data["model"] = {
            "type": "jobmix",
            "lengths": list(model.lengths),
            "probs": list(model.probs),
        }
    elif isinstance(model, Fleet):
        data["model"] = {
            "type": "fleet",
            "mode": model.mode,
            "servers": [
                {"lengths": list(m.lengths), "probs": list(m.probs)}
                for m in model.servers
            ],
        }
    else:
        data["model"] = {
            "type": "correlated",
            "classes": [
                {"rate": r, "length": a, "value": v}
                for r, a, v in zip(model.rates, model.lengths, model.values)
            ],
        }
    dist = cfg.dist
    if isinstance(dist, DiscreteDistribution):
        data["distribution"] = {
            "kind": "discrete",
            "atoms": [[float(v), float(w)] for v, w in zip(dist.values, dist.weights)],
        }
    elif isinstance(dist, UniformDistribution):
        data["distribution"] = {"kind": "uniform", "lo": dist.lo, "hi": dist.hi}
    elif isinstance(dist, PiecewiseLinearDistribution):
        data["distribution"] = {
            "kind": "piecewise",
            "breakpoints": [[float(x), float(d)] for x, d in zip(dist.xs, dist.ds)],
        }
    if cfg.schedule is not None:
        prices = cfg.schedule.prices
        if isinstance(prices, tuple):
            prices = [list(p) if isinstance(p, tuple) else p for p in prices]
        data["schedule"] = {"shape": cfg.schedule.shape, "prices": prices}
    data["objective_weight"] = cfg.lam
    if cfg.sim is not None:
        data["sim"] = {
            "horizon": cfg.sim.horizon,
            "replications": cfg.sim.replications,
            "seed": cfg.sim.seed,
            "warmup": cfg.sim.warmup,
        }
    return yaml.safe_dump(data, sort_keys=False)
