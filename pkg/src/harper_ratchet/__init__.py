"""Quantum ratchet acceleration in the generalized kicked Harper model."""
from .analysis import asymmetry, extended_curve_heuristic, fit_rate, hbar_sweep
from .classical import ClassicalEnsemble, classical_current_series, evolve_ensemble, kick_map_step, phase_portrait
from .model import HBAR_GOLDEN, ModelParams, is_ratchet_symmetric, potential, potential_derivative
from .noise import NoiseSpec, apply_phase_noise, noise_averaged_current, noisy_kick_strength
from .quantum import (
    LeakageError,
    MomentumGrid,
    QuantumState,
    apply_floquet,
    current,
    initial_state,
    momentum_distribution,
    quantum_current_series,
)
from .series import CurrentSeries

__version__ = "0.1.0"
