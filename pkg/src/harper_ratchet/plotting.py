"""Figure rendering for the CLI report path.

Figures are written with the non-interactive Agg backend next to the CSV
tables they visualize.
"""
from __future__ import annotations

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

style = {
    "axes.labelsize": 11,
    "font.size": 10,
    "font.family": "serif",
    "mathtext.fontset": "stix",
    "legend.fontsize": 9,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "lines.linewidth": 1.2,
    "figure.dpi": 150,
}


def _figure(height_ratio=golden_mean):
    with matplotlib.rc_context(style):
        fig, ax = plt.subplots(figsize=(fig_width, fig_width * height_ratio))
    return fig, ax


def _save(fig, path):
    with matplotlib.rc_context(style):
        fig.tight_layout()
        fig.savefig(path)
    plt.close(fig)


def plot_portrait(points, path, title=None):
    fig, ax = _figure(1.0)
    ax.plot(points[:, 0], points[:, 1], ",", color="k", alpha=0.6)
    ax.set_xlim(0, 2 * np.pi)
    ax.set_ylim(0, 2 * np.pi)
    ax.set_xlabel("$q$")
    ax.set_ylabel("$p$")
    if title:
        ax.set_title(title)
    _save(fig, path)


def plot_currents(series_by_label, path, distribution=None):
    """Current series on one axis; an optional momentum distribution as inset."""
    fig, ax = _figure()
    for label, series in series_by_label.items():
        style_ = ":" if series.kind == "classical" else "-"
        ax.plot(series.kicks, series.values, style_, label=label)
    ax.set_xlabel("kicks")
    ax.set_ylabel(r"$\langle p \rangle$")
    ax.legend(loc="lower left", frameon=False)
    if distribution is not None:
        p, prob = distribution
        inset = ax.inset_axes([0.6, 0.58, 0.37, 0.38])
        mask = prob > 1e-12 * prob.max()
        inset.plot(p[mask], prob[mask], lw=0.6)
        inset.set_xlabel("$p$", fontsize=7)
        inset.tick_params(labelsize=6)
    _save(fig, path)


def plot_sweep(result, path, fine=(1.0, 1.01)):
    fig, ax = _figure()
    h, r = result.hbars, result.rates
    ax.plot(h, r, "o-", ms=3)
    ax.axhline(0.0, color="0.6", lw=0.6)
    ax.set_xlabel(r"$\hbar$")
    ax.set_ylabel("acceleration rate")
    sel = (h > fine[0]) & (h < fine[1])
    if sel.sum() > 1:
        inset = ax.inset_axes([0.6, 0.6, 0.35, 0.33])
        inset.plot(h[sel], r[sel], "o-", ms=2, lw=0.8)
        inset.tick_params(labelsize=6)
    _save(fig, path)


def plot_noise(series_by_label, path, reference=None):
    """Noise-averaged series with standard-error bands; ``reference`` is the noiseless run."""
    fig, ax = _figure()
    if reference is not None:
        ax.plot(reference.kicks, reference.values, "k-", lw=0.8, label="noiseless")
    for label, series in series_by_label.items():
        line, = ax.plot(series.kicks, series.values, label=label)
        if series.stderr is not None:
            ax.fill_between(series.kicks, series.values - series.stderr,
                            series.values + series.stderr, color=line.get_color(), alpha=0.2)
    ax.set_xlabel("kicks")
    ax.set_ylabel(r"$\langle p \rangle$")
    ax.legend(loc="best", frameon=False)
    _save(fig, path)
