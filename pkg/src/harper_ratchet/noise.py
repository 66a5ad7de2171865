"""Amplitude and phase noise channels and noise-history averaging.

Amplitude noise rescales the kick strength once per kick,
``K -> K (1 + A (xi - 0.5))``. Phase noise multiplies every momentum
amplitude by ``exp(i 2 pi B xi_m)`` after each kick, with an independent
``xi_m`` per lattice site. ``xi`` is uniform on [0, 1) throughout.

Realization ``r`` of a run seeded with ``seed`` draws from
``PCG64(SeedSequence(seed, spawn_key=(r,)))``, the same stream that
``SeedSequence(seed).spawn(...)[r]`` yields. Realizations never share a
generator, so results do not depend on how realizations are batched or
scheduled.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams
from .quantum import (
    LEAKAGE_LIMIT,
    FloquetPropagator,
    LeakageError,
    MomentumGrid,
    QuantumState,
    edge_leakage,
    initial_state,
    mean_momentum,
    quantum_current_series,
)
from .series import CurrentSeries

NOISE_KINDS = ("none", "amplitude", "phase")
DEFAULT_REALIZATIONS = 1000
BATCH_SIZE = 16

AMPLITUDE_LADDER = (0.05, 0.1, 0.2)
PHASE_LADDER = (0.0125, 0.025, 0.05)


@dataclass(frozen=True)
class NoiseSpec:
    kind: str = "none"
    intensity: float = 0.0
    realizations: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"noise kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.kind == "none":
            object.__setattr__(self, "intensity", 0.0)
            object.__setattr__(self, "realizations", 1)
        if not self.intensity >= 0:
            raise ValueError(f"noise intensity must be >= 0, got {self.intensity!r}")
        if self.realizations < 1:
            raise ValueError(f"realizations must be >= 1, got {self.realizations}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def realization_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def noisy_kick_strength(K: float, A: float, xi):
    """``K (1 + A (xi - 0.5))``; mean over uniform ``xi`` is ``K``."""
    return K * (1.0 + A * (np.asarray(xi) - 0.5))


def apply_phase_noise(state: QuantumState, B: float, rng: np.random.Generator) -> QuantumState:
    """Dephase each momentum eigenstate by ``exp(i 2 pi B xi_m)``."""
    xi = rng.random(state.grid.size)
    c = state.amplitudes * np.exp(1j * (2.0 * np.pi * B) * xi)
    return QuantumState(state.grid, c, state.kick_count)


def _run_batch(prop: FloquetPropagator, spec: NoiseSpec, indices, n_kicks: int) -> np.ndarray:
    grid = prop.grid
    rngs = [realization_rng(spec.seed, r) for r in indices]
    c = np.tile(initial_state(grid).amplitudes, (len(rngs), 1))
    width = grid.edge_width
    out = np.empty((len(rngs), n_kicks))
    K = prop.params.K
    for n in range(n_kicks):
        if spec.kind == "amplitude":
            xi = np.array([rng.random() for rng in rngs])
            kicks = noisy_kick_strength(K, spec.intensity, xi)
            phase = np.exp(np.multiply.outer(-1j * kicks / grid.hbar, prop.potential_values))
            c = prop.step(c, phase)
        else:
            c = prop.step(c)
            xi = np.stack([rng.random(grid.size) for rng in rngs])
            c *= np.exp(1j * (2.0 * np.pi * spec.intensity) * xi)
        prob = np.abs(c) ** 2
        leak = edge_leakage(prob, width)
        bad = np.flatnonzero(leak > LEAKAGE_LIMIT)
        if bad.size:
            raise LeakageError(float(leak[bad[0]]), kick=n + 1, realization=int(indices[bad[0]]))
        out[:, n] = mean_momentum(prob, grid)
    return out


def realization_currents(params: ModelParams, grid: MomentumGrid, spec: NoiseSpec,
                         n_kicks: int, workers: int | None = None,
                         batch_size: int = BATCH_SIZE) -> np.ndarray:
    """Per-realization current series, shape ``(realizations, n_kicks)``."""
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    if spec.kind == "none":
        return quantum_current_series(params, grid, n_kicks, workers=workers).values[None, :]
    prop = FloquetPropagator(params, grid, workers=workers)
    out = np.empty((spec.realizations, n_kicks))
    for start in range(0, spec.realizations, batch_size):
        idx = np.arange(start, min(start + batch_size, spec.realizations))
        out[idx] = _run_batch(prop, spec, idx, n_kicks)
    return out


def noise_averaged_current(params: ModelParams, grid: MomentumGrid, spec: NoiseSpec,
                           n_kicks: int, workers: int | None = None) -> CurrentSeries:
    """Mean current over noise histories, with the standard error per kick."""
    runs = realization_currents(params, grid, spec, n_kicks, workers=workers)
    mean = runs.mean(axis=0)
    if runs.shape[0] > 1:
        stderr = runs.std(axis=0, ddof=1) / np.sqrt(runs.shape[0])
    else:
        stderr = np.zeros(n_kicks)
    return CurrentSeries(mean, "noise-averaged", stderr)
