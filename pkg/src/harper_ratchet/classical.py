"""Classical kick map, ensemble evolution and phase portraits.

One period of the map is the kick followed by free rotation::

    p' = p - K V'(q)
    q' = q - L sin(p')

Ensembles keep their positions relative to a center, ``u = q - center``. When
the potential is reflection symmetric about that center, the reflection
``q -> 2 center - q, p -> -p`` is plain negation of ``(u, p)``, which IEEE
arithmetic reproduces exactly, so a mirror-symmetric ensemble stays
mirror-symmetric bit for bit even under chaotic dynamics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    ModelParams,
    centered_force_derivative,
    potential_derivative,
    reflection_center,
)
from .series import CurrentSeries

TWO_PI = 2.0 * np.pi
HALF_PI = 0.5 * np.pi

DEFAULT_ENSEMBLE_SIZE = 100_000
PORTRAIT_SEEDS = 40
PORTRAIT_KICKS = 2000


@dataclass
class ClassicalEnsemble:
    """Phase-space points stored as ``u = q - center`` and momenta ``p``."""

    u: np.ndarray
    p: np.ndarray
    kick_count: int = 0
    center: float = HALF_PI

    def __post_init__(self):
        self.u = np.atleast_1d(np.asarray(self.u, dtype=float))
        self.p = np.atleast_1d(np.asarray(self.p, dtype=float))
        if self.u.size == 0:
            raise ValueError("ensemble must be non-empty")
        if self.u.shape != self.p.shape:
            raise ValueError("q and p arrays must have the same shape")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.p))):
            raise ValueError("ensemble coordinates must be finite")

    @classmethod
    def from_qp(cls, q, p, kick_count: int = 0, center: float = HALF_PI) -> ClassicalEnsemble:
        return cls(np.asarray(q, dtype=float) - center, p, kick_count, center)

    @classmethod
    def equally_spaced(cls, size: int, center: float = HALF_PI) -> ClassicalEnsemble:
        """``size`` points at p = 0 on a midpoint grid covering one period in q.

        Positions are ``q_j = center + (2j - size + 1) pi / size``, a set that
        maps onto itself under reflection about ``center``.
        """
        if size < 1:
            raise ValueError("ensemble_size must be >= 1")
        odd = 2 * np.arange(size, dtype=float) - (size - 1)
        return cls(odd * (np.pi / size), np.zeros(size), 0, center)

    @property
    def q(self) -> np.ndarray:
        return self.u + self.center

    def __len__(self):
        return self.u.size

    def mean_momentum(self) -> float:
        # extended precision, fixed pairwise order
        return float(self.p.astype(np.longdouble).sum() / self.p.size)


def kick_map_step(params: ModelParams, q, p):
    """One period of the map for scalars or arrays; returns ``(q', p')``."""
    p_new = p - params.K * potential_derivative(params, q)
    q_new = q - params.L * np.sin(p_new)
    return q_new, p_new


def inverse_kick_map_step(params: ModelParams, q, p):
    q_old = q + params.L * np.sin(p)
    p_old = p + params.K * potential_derivative(params, q_old)
    return q_old, p_old


def ensemble_center(params: ModelParams) -> float:
    """Reflection center of the potential, or pi/2 when there is none."""
    center = reflection_center(params)
    return HALF_PI if center is None else center


def _harmonics_for(params: ModelParams, center: float):
    symmetric = reflection_center(params) == center
    return params.centered_harmonics(center, symmetric=symmetric)


def _centered_step(params, harmonics, u, p):
    p = p - params.K * centered_force_derivative(harmonics, u)
    u = u - params.L * np.sin(p)
    return u, p


def evolve_ensemble(params: ModelParams, ensemble: ClassicalEnsemble,
                    n_kicks: int) -> ClassicalEnsemble:
    """Apply the map ``n_kicks`` times to every member (returns a new ensemble)."""
    if n_kicks < 0:
        raise ValueError("n_kicks must be >= 0")
    harmonics = _harmonics_for(params, ensemble.center)
    u, p = ensemble.u.copy(), ensemble.p.copy()
    for _ in range(n_kicks):
        u, p = _centered_step(params, harmonics, u, p)
    return ClassicalEnsemble(u, p, ensemble.kick_count + n_kicks, ensemble.center)


def classical_current_series(params: ModelParams, ensemble_size: int = DEFAULT_ENSEMBLE_SIZE,
                             n_kicks: int = 1000) -> CurrentSeries:
    """<p> after each of ``n_kicks`` kicks for the equally spaced p = 0 ensemble."""
    if n_kicks < 1:
        raise ValueError("n_kicks must be >= 1")
    center = ensemble_center(params)
    ensemble = ClassicalEnsemble.equally_spaced(ensemble_size, center)
    harmonics = _harmonics_for(params, center)
    u, p = ensemble.u, ensemble.p
    values = np.empty(n_kicks)
    for n in range(n_kicks):
        u, p = _centered_step(params, harmonics, u, p)
        values[n] = float(p.astype(np.longdouble).sum() / p.size)
    return CurrentSeries(values, "classical")


def diagonal_seeds(count: int = PORTRAIT_SEEDS) -> tuple[np.ndarray, np.ndarray]:
    """Seeds equally spaced along the q = p diagonal of the unit cell."""
    if count < 1:
        raise ValueError("need at least one seed")
    s = TWO_PI * (np.arange(count) + 0.5) / count
    return s, s.copy()


def orbits(params: ModelParams, q0, p0, n_kicks: int) -> tuple[np.ndarray, np.ndarray]:
    """Unwrapped orbits, shape ``(n_kicks + 1, n_seeds)``; row 0 holds the seeds."""
    q = np.atleast_1d(np.asarray(q0, dtype=float))
    p = np.atleast_1d(np.asarray(p0, dtype=float))
    if q.size == 0:
        raise ValueError("seeds must be non-empty")
    qs = np.empty((n_kicks + 1, q.size))
    ps = np.empty_like(qs)
    qs[0], ps[0] = q, p
    for n in range(1, n_kicks + 1):
        q, p = kick_map_step(params, q, p)
        qs[n], ps[n] = q, p
    return qs, ps


def phase_portrait(params: ModelParams, q0, p0, n_kicks: int = PORTRAIT_KICKS) -> np.ndarray:
    """Orbit points of all seeds reduced to the cell [0, 2pi) x [0, 2pi).

    Returns an ``(n_points, 2)`` array ordered seed by seed.
    """
    qs, ps = orbits(params, q0, p0, n_kicks)
    points = np.mod(np.column_stack([qs.T.ravel(), ps.T.ravel()]), TWO_PI)
    points[points >= TWO_PI] = 0.0  # mod of tiny negatives rounds up to 2pi
    return points
