"""Reliability and scaling models for memristive 1T1R crossbar spike routers.

Submodules:
    types     shared domain types, validation, JSON config schema
    analytic  closed-form margins, design-rule inversions, Poisson error model
    solver    exact ladder-network channel solver and leakage accounting
    simulate  Poisson traffic, Monte Carlo estimation, routing emulation
    sweep     figure-data presets, parameter sweeps, design-rule chaining
"""

from .analytic import (ErrorModelParams, MarginReport, effective_onoff_ratio,
                       i_sl_single_on, i_sl_two_active, margin_sweep,
                       min_tolerance_for_perr, perr_analytic,
                       required_device_ratio)
from .simulate import (McEstimate, RoutingTrace, emulate, gen_poisson_trains,
                       max_concurrency, perr_monte_carlo, route_event)
from .solver import (ChannelInstance, LeakReport, calibrate_fet_leak,
                     dense_oracle_solve, i_cc_leak, ir_drop_profile,
                     make_instance, solve_channel)
from .sweep import (demo_fig2_setup, design_rules, error_fig3_setup,
                    run_preset)
from .types import (ChannelConfig, ChannelSolution, DeviceParams,
                    SpikeTrainSet, SwitchMatrix, TransistorParams,
                    default_config, validate_config)

__version__ = "0.1.0"
