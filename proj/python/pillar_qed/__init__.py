"""Reflection spectra, fitting and design tools for quantum dots in pillar microcavities.

Energies and rates are in micro-electronvolts throughout.
"""

from ._core import (
    SystemParams,
    apply_background,
    conditional_phase,
    coupling_regime,
    dip_visibility,
    evaluate_design,
    extract_phase,
    fit_intensity,
    fitted_params,
    infer_background_fraction,
    max_conditional_phase,
    phase,
    polariton_eigenvalues,
    q_factor,
    rabi_splitting,
    reflection_amplitude,
    reflectivity,
    run_cli,
    simulate_channels,
    sweep_kappa,
)

__all__ = [
    "SystemParams",
    "apply_background",
    "conditional_phase",
    "coupling_regime",
    "dip_visibility",
    "evaluate_design",
    "extract_phase",
    "fit_intensity",
    "fitted_params",
    "infer_background_fraction",
    "max_conditional_phase",
    "phase",
    "polariton_eigenvalues",
    "q_factor",
    "rabi_splitting",
    "reflection_amplitude",
    "reflectivity",
    "run_cli",
    "simulate_channels",
    "sweep_kappa",
]

__version__ = "0.1.0"
