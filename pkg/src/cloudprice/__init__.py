"""Posted-price admission control for jobs on servers.

Exact steady-state welfare/revenue closed forms, price optimization,
flat-vs-multi-price approximation bounds, an offline LP/DP benchmark, and
a Monte Carlo simulator that cross-validates the closed forms.
"""
from .distributions import (
    DiscreteDistribution,
    PiecewiseLinearDistribution,
    UniformDistribution,
    ValueDistribution,
    make_bimodal,
)
from .steady import (
    Fleet,
    JobMix,
    SteadyStateMetrics,
    fleet_metrics,
    single_server_flat_metrics,
    single_server_metrics,
)
from .optimize import (
    OptimizationResult,
    PriceSchedule,
    best_single_from_multi,
    golden_section_max,
    optimize_flat,
    optimize_fleet,
    optimize_multi,
)
from .bounds import (
    RatioBound,
    composed_bound,
    fleet_bound,
    h0_equal_load,
    h0_shared_length,
    h_corner_min,
    h_eval,
    harmonic,
    m_ratio_term,
    one_length_fleet_bound,
    rho,
    tight_bimodal_instance,
)
from .offline import (
    CorrelatedClassList,
    FleetPriceSelection,
    LpSolution,
    expected_lp,
    fleet_half_opt_prices,
    half_opt_price,
    load_trace,
    offline_dp_oracle,
    sample_trace,
    save_trace,
)
from .sim import (
    SimConfig,
    SimResult,
    StatSummary,
    result_to_csv,
    seeded_streams,
    simulate,
)
from .config import ConfigError, InstanceConfig, dump_config, load_config, parse_config

__version__ = "0.1.0"
