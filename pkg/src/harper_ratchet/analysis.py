"""Acceleration-rate fits, hbar sweeps and transport diagnostics."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classical import diagonal_seeds, orbits
from .model import ModelParams
from .quantum import GridPolicy, LeakageError, MomentumGrid, quantum_current_series
from .series import CurrentSeries

FIT_WINDOW = (100, 1000)
MIN_FIT_POINTS = 10

# Default sweep: a coarse grid 0.90..1.20 and a fine one 1.001..1.009
DEFAULT_SWEEP_HBARS = tuple(sorted(
    [round(0.9 + j / 100, 12) for j in range(31)]
    + [round(1.0 + m / 1000, 12) for m in range(1, 10)]
))

HEURISTIC_SCALE = 0.4


@dataclass(frozen=True)
class RateEstimate:
    slope: float
    intercept: float
    fit_window: tuple[int, int]
    residual_rms: float


def fit_rate(series, n_min: int = FIT_WINDOW[0], n_max: int = FIT_WINDOW[1]) -> RateEstimate:
    """Least-squares line through <p>(n) for kicks ``n_min..n_max`` inclusive.

    The slope is the acceleration rate (current gained per kick). Kicks are
    counted from 1, as in ``CurrentSeries``.
    """
    values = series.values if isinstance(series, CurrentSeries) else np.asarray(series, float)
    if not 1 <= n_min < n_max <= len(values):
        raise ValueError(f"fit window [{n_min}, {n_max}] outside 1..{len(values)}")
    if n_max - n_min + 1 < MIN_FIT_POINTS:
        raise ValueError(f"fit window needs at least {MIN_FIT_POINTS} points")
    n = np.arange(n_min, n_max + 1, dtype=float)
    y = values[n_min - 1:n_max]
    dn = n - n.mean()
    slope = float(np.dot(dn, y - y.mean()) / np.dot(dn, dn))
    intercept = float(y.mean() - slope * n.mean())
    resid = y - (intercept + slope * n)
    return RateEstimate(slope, intercept, (n_min, n_max), float(np.sqrt(np.mean(resid**2))))


@dataclass
class SweepEntry:
    hbar: float
    rate: RateEstimate | None
    grid_size: int | None = None
    error: str | None = None


@dataclass
class SweepResult:
    entries: list[SweepEntry] = field(default_factory=list)

    @property
    def hbars(self) -> np.ndarray:
        return np.array([e.hbar for e in self.entries])

    @property
    def rates(self) -> np.ndarray:
        """Fitted slopes, NaN where the entry failed."""
        return np.array([e.rate.slope if e.rate else np.nan for e in self.entries])

    def sign_reversals(self) -> list[tuple[float, float]]:
        """Adjacent hbar pairs whose fitted rates have opposite signs."""
        out = []
        for a, b in zip(self.entries, self.entries[1:]):
            if a.rate and b.rate and a.rate.slope * b.rate.slope < 0:
                out.append((a.hbar, b.hbar))
        return out


def rate_at(params: ModelParams, hbar: float, n_kicks: int = 1000,
            policy: GridPolicy | None = None,
            window: tuple[int, int] | None = None) -> SweepEntry:
    """Run one hbar, doubling the grid on leakage as the policy allows."""
    policy = policy or GridPolicy()
    window = window or (min(FIT_WINDOW[0], n_kicks // 10 or 1), n_kicks)
    p = params.with_hbar(hbar)
    error = None
    for size in policy.sizes():
        try:
            series = quantum_current_series(p, MomentumGrid(size, hbar), n_kicks)
        except LeakageError as exc:
            error = str(exc)
            continue
        return SweepEntry(hbar, fit_rate(series, *window), size)
    return SweepEntry(hbar, None, None, error)


def _rate_job(args):
    return rate_at(*args)


def hbar_sweep(params: ModelParams, hbars, n_kicks: int = 1000,
               policy: GridPolicy | None = None,
               window: tuple[int, int] | None = None,
               max_workers: int | None = None) -> SweepResult:
    """Acceleration rate for each hbar (strictly increasing), in input order.

    A failed entry keeps ``rate=None`` and its error message; the sweep goes on.
    """
    hbars = [float(h) for h in hbars]
    if not hbars:
        raise ValueError("hbar list is empty")
    if any(h <= 0 for h in hbars):
        raise ValueError("hbar values must be positive")
    if any(b <= a for a, b in zip(hbars, hbars[1:])):
        raise ValueError("hbar values must be strictly increasing")
    jobs = [(params, h, n_kicks, policy, window) for h in hbars]
    if max_workers and max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            entries = list(pool.map(_rate_job, jobs))
    else:
        entries = [_rate_job(j) for j in jobs]
    return SweepResult(entries)


def asymmetry(distribution) -> float:
    """Probability at p > 0 minus probability at p < 0."""
    p, prob = (np.asarray(a, dtype=float) for a in distribution)
    total = prob.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"distribution is not normalized (sum = {total!r})")
    return float(prob[p > 0].sum() - prob[p < 0].sum())


@dataclass(frozen=True)
class ExtendedCurveReport:
    """Outcome of the extended-in-momentum orbit scan (a heuristic, not a proof)."""

    K: float
    L: float
    scaled_K: float
    scaled_L: float
    n_orbits: int
    n_extended: int

    @property
    def extended(self) -> bool:
        return self.n_extended > 0

    def text(self) -> str:
        verdict = ("extended-in-momentum curves present: quantum acceleration possible"
                   if self.extended else
                   "no extended-in-momentum curves: no quantum acceleration expected")
        return (f"K={self.K:g} L={self.L:g} scanned at K={self.scaled_K:g} L={self.scaled_L:g}\n"
                f"orbits extended in p: {self.n_extended}/{self.n_orbits}\n"
                f"heuristic: {verdict}\n")


def extended_curve_heuristic(params: ModelParams, scale: float = HEURISTIC_SCALE,
                             n_seeds: int = 40, n_kicks: int = 2000) -> ExtendedCurveReport:
    """Look for orbits that are extended in momentum at reduced (K, L).

    (K, L) keeps its ratio but is shrunk so ``max(K, L) <= scale``, where
    broken curves of the chaotic regime survive as invariant curves. An orbit
    counts as extended when its unwrapped momentum covers a full period while
    its position stays within one period.
    """
    peak = max(params.K, params.L)
    factor = scale / peak if peak > scale else 1.0
    reduced = ModelParams(params.K * factor, params.L * factor,
                          params.phi1, params.phi2, params.eta)
    q0, p0 = diagonal_seeds(n_seeds)
    qs, ps = orbits(reduced, q0, p0, n_kicks)
    p_span = ps.max(axis=0) - ps.min(axis=0)
    q_span = qs.max(axis=0) - qs.min(axis=0)
    n_ext = int(np.count_nonzero((p_span >= 2 * np.pi) & (q_span < 2 * np.pi)))
    return ExtendedCurveReport(params.K, params.L, reduced.K, reduced.L, n_seeds, n_ext)
