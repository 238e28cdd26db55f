"""Multipair amplify-and-forward relaying with one-bit ADCs and DACs.

Simulation and analysis toolkit: LMMSE channel estimation through one-bit
converters, achievable-rate evaluation (Monte Carlo and closed form),
power-scaling laws, and successive power allocation.
"""
from .channel import (
    ChannelSet,
    SystemConfig,
    est_variances,
    generate_channels,
    large_scale_from_geometry,
    read_config,
    write_config,
)
from .estimation import (
    EstimationStats,
    build_pilot,
    compare_pilots,
    estimate_from_pilots,
    estimation_stats,
)
from .numerics import Rng, SingularMatrixError, complex_gaussian, hermitian_solve, make_rng
from .power_alloc import (
    AllocationResult,
    GpConvergenceError,
    GpInfeasibleError,
    GpProblem,
    GpSolution,
    Posynomial,
    sinr_coefficients,
    solve_gp,
    successive_approx,
    uniform_allocation,
)
from .quantizer import QuantizerStats, backend_name, one_bit_quantize, quantizer_stats
from .rate_closed import (
    ALL_CASES,
    IDEAL,
    ONE_BIT,
    ONE_BIT_ADC,
    ONE_BIT_DAC,
    HardwareCase,
    InfeasibleTargetError,
    RateReport,
    closed_form_rate,
    closed_form_sinr,
    rate_ordering_check,
    rate_ratios,
    required_antennas,
    required_power,
    scaling_limit,
)
from .relay_mc import approx_rate_mc, exact_rate_mc, relay_chain_once

__all__ = [
    "ALL_CASES",
    "AllocationResult",
    "ChannelSet",
    "EstimationStats",
    "GpConvergenceError",
    "GpInfeasibleError",
    "GpProblem",
    "GpSolution",
    "HardwareCase",
    "IDEAL",
    "InfeasibleTargetError",
    "ONE_BIT",
    "ONE_BIT_ADC",
    "ONE_BIT_DAC",
    "Posynomial",
    "QuantizerStats",
    "RateReport",
    "Rng",
    "SingularMatrixError",
    "SystemConfig",
    "approx_rate_mc",
    "backend_name",
    "build_pilot",
    "closed_form_rate",
    "closed_form_sinr",
    "compare_pilots",
    "complex_gaussian",
    "est_variances",
    "estimate_from_pilots",
    "estimation_stats",
    "exact_rate_mc",
    "generate_channels",
    "hermitian_solve",
    "large_scale_from_geometry",
    "make_rng",
    "one_bit_quantize",
    "quantizer_stats",
    "rate_ordering_check",
    "rate_ratios",
    "read_config",
    "relay_chain_once",
    "required_antennas",
    "required_power",
    "scaling_limit",
    "sinr_coefficients",
    "solve_gp",
    "successive_approx",
    "uniform_allocation",
    "write_config",
]

__version__ = "0.1.0"
