"""Spatial SIR epidemics: agent-based simulation, mean-field SIR, presets."""

from ._core import (
    ValidationError,
    alpha_response,
    default_config,
    final_size,
    normalize_config,
    peak_fraction,
    preset_ids,
    radius_for_contacts,
    reproduce,
    rho_from_growth,
    run,
    simulate_sir,
)

__all__ = [
    "ValidationError",
    "alpha_response",
    "default_config",
    "final_size",
    "normalize_config",
    "peak_fraction",
    "preset_ids",
    "radius_for_contacts",
    "reproduce",
    "rho_from_growth",
    "run",
    "simulate_sir",
]
