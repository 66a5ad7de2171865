"""CSV tables for portraits, current series, distributions and sweeps."""
from __future__ import annotations

import csv
import io
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .series import CurrentSeries

PORTRAIT_DIGITS = 9
DIGITS = 12


def fmt(x, digits: int = DIGITS) -> str:
    return f"{x:.{digits}g}"


@contextmanager
def _open_out(dest):
    if dest is None or dest == "-":
        yield sys.stdout
    elif isinstance(dest, io.TextIOBase):
        yield dest
    else:
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            yield fh


def write_table(dest, header, columns, digits: int = DIGITS, int_columns=()) -> None:
    """Write equal-length columns under ``header`` (a sequence of names)."""
    with _open_out(dest) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([str(int(v)) if i in int_columns else fmt(v, digits)
                             for i, v in enumerate(row)])


def write_portrait(points: np.ndarray, dest=None) -> None:
    write_table(dest, ("q", "p"), (points[:, 0], points[:, 1]), PORTRAIT_DIGITS)


def write_current(series: CurrentSeries, dest=None) -> None:
    """``kick,p_mean`` or, for noise-averaged series, ``kick,p_mean,stderr``."""
    if series.stderr is not None:
        write_table(dest, ("kick", "p_mean", "stderr"),
                    (series.kicks, series.values, series.stderr), int_columns=(0,))
    else:
        write_table(dest, ("kick", "p_mean"), (series.kicks, series.values), int_columns=(0,))


def write_distribution(distribution, dest=None) -> None:
    p, prob = distribution
    write_table(dest, ("p", "prob"), (p, prob))


def write_sweep(result, dest=None) -> None:
    """``hbar,rate,residual_rms``; failed entries carry ``nan``."""
    hbars, rates, rms = [], [], []
    for e in result.entries:
        hbars.append(e.hbar)
        rates.append(e.rate.slope if e.rate else float("nan"))
        rms.append(e.rate.residual_rms if e.rate else float("nan"))
    write_table(dest, ("hbar", "rate", "residual_rms"), (hbars, rates, rms))


def read_table(path) -> dict[str, np.ndarray]:
    """Read one of the tables above back into named float columns."""
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    data = np.array(body, dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}
