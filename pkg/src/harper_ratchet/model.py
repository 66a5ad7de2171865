"""Model parameters and the two-harmonic kicking potential.

The Hamiltonian is ``L cos(p) + K V(q) sum_n delta(t - n)`` with

    V(q) = cos(q + phi1) + eta * sin(2 q + phi2)

and the effective Planck constant ``hbar`` entering only quantum runs.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

GOLDEN_SIGMA = (math.sqrt(5.0) - 1.0) / 2.0
#: hbar with hbar/2pi as irrational as possible, far from quantum resonance.
HBAR_GOLDEN = 2.0 * math.pi / (6.0 + GOLDEN_SIGMA)

SYMMETRY_GRID = 1024
SYMMETRY_TOL = 1e-10

_PARAM_KEYS = ("K", "L", "phi1", "phi2", "eta", "hbar")


@dataclass(frozen=True)
class ModelParams:
    """Kick strength ``K``, kinetic strength ``L``, potential shape and ``hbar``.

    ``hbar`` is ``None`` for purely classical runs.
    """

    K: float
    L: float
    phi1: float = 0.0
    phi2: float = 0.0
    eta: float = 1.0
    hbar: float | None = None

    def __post_init__(self):
        for name in ("K", "L", "phi1", "phi2", "eta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.K < 0 or self.L < 0:
            raise ValueError(f"K and L must be non-negative, got K={self.K}, L={self.L}")
        if self.hbar is not None and not (math.isfinite(self.hbar) and self.hbar > 0):
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")

    def with_hbar(self, hbar: float | None) -> ModelParams:
        return replace(self, hbar=hbar)

    def require_hbar(self) -> float:
        if self.hbar is None:
            raise ValueError("quantum run requires hbar")
        return self.hbar

    def to_text(self) -> str:
        """Flat ``key=value`` form, one parameter per line."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                lines.append(f"{f.name}={value!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ModelParams:
        return cls.from_mapping(parse_key_values(text))

    @classmethod
    def from_mapping(cls, mapping) -> ModelParams:
        unknown = set(mapping) - set(_PARAM_KEYS)
        if unknown:
            raise ValueError(f"unknown model keys: {sorted(unknown)}")
        if "K" not in mapping or "L" not in mapping:
            raise ValueError("model parameters need at least K and L")
        return cls(**{k: float(v) for k, v in mapping.items()})

    def as_dict(self) -> dict:
        return asdict(self)

    def centered_harmonics(self, center: float = math.pi / 2,
                           symmetric: bool = False) -> tuple[float, float, float, float]:
        """Coefficients ``(a1, b1, a2, b2)`` of ``W(u) = V(u + center)``.

        ``W(u) = a1 cos u + b1 sin u + a2 cos 2u + b2 sin 2u``. Reflection of q
        about ``center`` becomes ``u -> -u``, under which the potential is
        invariant exactly when ``b1 = b2 = 0``. With ``symmetric=True`` the odd
        coefficients, already below the symmetry tolerance, are set to zero.
        """
        c1, s1 = _cos_sin(center + self.phi1)
        c2, s2 = _cos_sin(2.0 * center + self.phi2)
        a1, b1, a2, b2 = c1, -s1, self.eta * s2, self.eta * c2
        if symmetric:
            b1 = b2 = 0.0
        return a1, b1, a2, b2


def parse_key_values(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ValueError(f"line {lineno}: empty key")
        out[key] = value
    return out


def _cos_sin(angle: float) -> tuple[float, float]:
    quarter = angle / (math.pi / 2)
    k = round(quarter)
    if abs(quarter - k) < 1e-12:
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[k % 4]
    return math.cos(angle), math.sin(angle)


def potential(params: ModelParams, q):
    """``V(q) = cos(q + phi1) + eta sin(2q + phi2)``; accepts scalars or arrays."""
    q = np.asarray(q, dtype=float)
    return np.cos(q + params.phi1) + params.eta * np.sin(2.0 * q + params.phi2)


def potential_derivative(params: ModelParams, q):
    q = np.asarray(q, dtype=float)
    return -np.sin(q + params.phi1) + 2.0 * params.eta * np.cos(2.0 * q + params.phi2)


def centered_force_derivative(harmonics, u):
    """``W'(u)`` for the centered potential, odd in ``u`` bit for bit when b1 = b2 = 0."""
    a1, b1, a2, b2 = harmonics
    s, c = np.sin(u), np.cos(u)
    sin2 = 2.0 * s * c
    cos2 = 1.0 - 2.0 * s * s
    return (-a1 * s - 2.0 * a2 * sin2) + (b1 * c + 2.0 * b2 * cos2)


def symmetry_defect(params: ModelParams, center: float = math.pi / 2,
                    n_grid: int = SYMMETRY_GRID) -> float:
    """Largest ``|V(2 center - q) - V(q)|`` over an equally spaced q grid."""
    q = 2.0 * np.pi * np.arange(n_grid) / n_grid
    return float(np.max(np.abs(potential(params, 2.0 * center - q) - potential(params, q))))


def reflection_center(params: ModelParams, tol: float = SYMMETRY_TOL,
                      n_grid: int = SYMMETRY_GRID) -> float | None:
    """Center ``c`` in [0, pi) with ``V(2c - q) = V(q)``, or None.

    The first harmonic is always present, so its phase fixes the only
    candidates ``c = -phi1 (mod pi)``; the second harmonic then either agrees
    or breaks the symmetry.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    center = (-params.phi1) % math.pi
    if symmetry_defect(params, center, n_grid) < tol:
        return center
    return None


def is_ratchet_symmetric(params: ModelParams, tol: float = SYMMETRY_TOL,
                         n_grid: int = SYMMETRY_GRID) -> bool:
    """True when the dynamics has a reflection symmetry that kills the current.

    ``L cos(p)`` is even in ``p``, so invariance under ``q -> 2c - q,
    p -> -p`` only requires ``V(2c - q) = V(q)``. For the ``sin q + cos 2q``
    potential ``c = pi/2`` (``q -> pi - q``); for a pure cosine ``c = 0``.
    Averaging over a reflection-symmetric ensemble then gives zero current.
    """
    return reflection_center(params, tol, n_grid) is not None
