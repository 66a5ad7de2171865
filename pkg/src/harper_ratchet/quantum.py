"""Split Floquet propagation on a truncated momentum lattice.

One period is ``U = exp(-i L cos(p)/hbar) exp(-i K V(q)/hbar)``: the kick is
applied in the position representation on ``q_j = 2 pi j / N``, the kinetic
phase on the lattice ``p = m hbar``. The two representations are connected by
unitary FFTs with ``<q|m> ~ exp(i m q)``.

The DFT wraps momentum modulo ``N``, so probability reaching the lattice
edges would silently alias. Every step therefore checks the edge leakage and
raises ``LeakageError`` instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .model import ModelParams, potential
from .series import CurrentSeries

DEFAULT_GRID_SIZE = 2**14
EDGE_FRACTION = 0.02
LEAKAGE_LIMIT = 1e-8


class LeakageError(RuntimeError):
    """Probability reached the lattice edges; results would alias."""

    def __init__(self, leakage: float, kick: int | None = None, realization: int | None = None):
        self.leakage = leakage
        self.kick = kick
        self.realization = realization
        where = []
        if realization is not None:
            where.append(f"realization {realization}")
        if kick is not None:
            where.append(f"kick {kick}")
        at = f" at {', '.join(where)}" if where else ""
        super().__init__(
            f"edge leakage {leakage:.3e} exceeds {LEAKAGE_LIMIT:.0e}{at}; "
            "enlarge the grid size N or re-center m_min on the wave packet"
        )


@dataclass(frozen=True)
class MomentumGrid:
    """Lattice indices ``m_min .. m_min + size - 1`` with momenta ``m * hbar``."""

    size: int
    hbar: float
    m_min: int | None = None

    def __post_init__(self):
        n = self.size
        if n < 32 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 32, got {n}")
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")
        if self.m_min is None:
            object.__setattr__(self, "m_min", -(n // 2))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_min + self.size)

    @property
    def momenta(self) -> np.ndarray:
        return self.indices * self.hbar

    @property
    def positions(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    def contains_zero(self) -> bool:
        return self.m_min <= 0 < self.m_min + self.size

    @property
    def edge_width(self) -> int:
        return max(1, math.ceil(EDGE_FRACTION * self.size))


@dataclass
class QuantumState:
    """Momentum amplitudes ``c_m`` in lattice order (``amplitudes[k]`` is ``m = m_min + k``)."""

    grid: MomentumGrid
    amplitudes: np.ndarray
    kick_count: int = 0

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.grid.size,):
            raise ValueError("amplitude vector length must equal the grid size")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def position_amplitudes(self) -> np.ndarray:
        """``psi(q_j)`` on the position grid (unit-norm over the N samples)."""
        g = self.grid
        shift = np.exp(1j * g.m_min * g.positions)
        return shift * sfft.ifft(self.amplitudes, norm="ortho")


def edge_leakage(probabilities: np.ndarray, width: int) -> np.ndarray | float:
    """Probability in the outer ``width`` lattice sites on each side (last axis)."""
    return (probabilities[..., :width].sum(axis=-1)
            + probabilities[..., -width:].sum(axis=-1))


def initial_state(grid: MomentumGrid) -> QuantumState:
    """The p = 0 eigenstate, uniform in q."""
    if not grid.contains_zero():
        raise ValueError(f"lattice [{grid.m_min}, {grid.m_min + grid.size}) does not contain m = 0")
    c = np.zeros(grid.size, dtype=complex)
    c[-grid.m_min] = 1.0
    return QuantumState(grid, c)


class FloquetPropagator:
    """Precomputed kick and kinetic phases for one (params, grid) pair.

    ``step`` works on a single amplitude vector or a batch along the last axis.
    Shifting the lattice by ``m_min`` only multiplies the position amplitudes by
    a phase that cancels between the two transforms, so the kick step is a
    plain FFT round trip for any ``m_min``.
    """

    def __init__(self, params: ModelParams, grid: MomentumGrid, workers: int | None = None):
        if params.hbar is not None and params.hbar != grid.hbar:
            raise ValueError(f"params.hbar={params.hbar} disagrees with grid.hbar={grid.hbar}")
        self.params = params
        self.grid = grid
        self.workers = workers
        hbar = grid.hbar
        self.potential_values = potential(params, grid.positions)
        self.kick_phase = self.kick_phase_for(params.K)
        # no reduction of m*hbar modulo 2pi: the lattice phase is aperiodic for irrational hbar/2pi
        self.kinetic_phase = np.exp(-1j * (params.L / hbar) * np.cos(grid.momenta))

    def kick_phase_for(self, K: float) -> np.ndarray:
        return np.exp(-1j * (K / self.grid.hbar) * self.potential_values)

    def step(self, amplitudes: np.ndarray, kick_phase: np.ndarray | None = None) -> np.ndarray:
        if kick_phase is None:
            kick_phase = self.kick_phase
        psi = sfft.ifft(amplitudes, norm="ortho", axis=-1, workers=self.workers)
        psi *= kick_phase
        out = sfft.fft(psi, norm="ortho", axis=-1, workers=self.workers, overwrite_x=True)
        out *= self.kinetic_phase
        return out

    def check_leakage(self, amplitudes: np.ndarray, kick: int) -> None:
        leak = float(edge_leakage(np.abs(amplitudes) ** 2, self.grid.edge_width))
        if leak > LEAKAGE_LIMIT:
            raise LeakageError(leak, kick=kick)


def apply_floquet(params: ModelParams, state: QuantumState) -> QuantumState:
    """Apply one kick period; raises ``LeakageError`` if the result touches the edges."""
    prop = FloquetPropagator(params, state.grid)
    out = prop.step(state.amplitudes)
    kick = state.kick_count + 1
    prop.check_leakage(out, kick)
    return QuantumState(state.grid, out, kick)


def current(state: QuantumState) -> float:
    """``<p> = hbar * sum m |c_m|^2``."""
    return float(mean_momentum(state.probabilities(), state.grid))


def mean_momentum(probabilities: np.ndarray, grid: MomentumGrid) -> np.ndarray | float:
    """``hbar * sum m P_m`` along the last axis; row results do not depend on batch shape."""
    return grid.hbar * (probabilities * grid.indices.astype(float)).sum(axis=-1)


def quantum_current_series(params: ModelParams, grid: MomentumGrid, n_kicks: int,
                           workers: int | None = None,
                           return_state: bool = False):
    """Evolve the p = 0 state for ``n_kicks`` kicks recording <p> after each.

    With ``return_state`` the final ``QuantumState`` is returned as well.
    """
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    prop = FloquetPropagator(params, grid, workers=workers)
    state = initial_state(grid)
    c = state.amplitudes
    width = grid.edge_width
    values = np.empty(n_kicks)
    for n in range(n_kicks):
        c = prop.step(c)
        prob = np.abs(c) ** 2
        leak = float(edge_leakage(prob, width))
        if leak > LEAKAGE_LIMIT:
            raise LeakageError(leak, kick=n + 1)
        values[n] = mean_momentum(prob, grid)
    series = CurrentSeries(values, "quantum")
    if return_state:
        return series, QuantumState(grid, c, n_kicks)
    return series


def momentum_distribution(state: QuantumState) -> tuple[np.ndarray, np.ndarray]:
    """``(p, probability)`` over the full lattice, ``p = m hbar``."""
    return state.grid.momenta, state.probabilities()


@dataclass
class GridPolicy:
    """Grid choice per hbar: start at ``size`` and double on leakage up to ``max_size``."""

    size: int = DEFAULT_GRID_SIZE
    max_size: int = 2**17

    def sizes(self):
        n = self.size
        while n <= self.max_size:
            yield n
            n *= 2
