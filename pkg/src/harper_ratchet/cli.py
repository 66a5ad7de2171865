"""Command-line entry point: one subcommand per experiment plus utilities.

Settings resolve in the order built-in defaults < preset < config file <
flags. Exit codes: 0 success, 2 usage error, 3 numerical guard (lattice
leakage), 4 I/O failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import io as tables
from .analysis import DEFAULT_SWEEP_HBARS, extended_curve_heuristic, fit_rate, hbar_sweep
from .classical import (
    DEFAULT_ENSEMBLE_SIZE,
    PORTRAIT_KICKS,
    PORTRAIT_SEEDS,
    classical_current_series,
    diagonal_seeds,
    phase_portrait,
)
from .model import HBAR_GOLDEN, ModelParams, parse_key_values, reflection_center
from .noise import AMPLITUDE_LADDER, DEFAULT_REALIZATIONS, PHASE_LADDER, NoiseSpec, noise_averaged_current
from .quantum import (
    DEFAULT_GRID_SIZE,
    GridPolicy,
    LeakageError,
    MomentumGrid,
    momentum_distribution,
    quantum_current_series,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

QUICK_FACTOR = 10

_FIG1A = {"K": 3.0, "L": 1.5, "phi1": 0.0, "phi2": 0.0, "eta": 1.0}
_FIG1D = {"K": 1.0, "L": 0.5, "phi1": math.pi / 2, "phi2": math.pi / 2, "eta": 1.0}

PRESETS = {
    "fig1a": {"model": _FIG1A},
    "fig1b": {"model": {**_FIG1A, "K": 1.0, "L": 0.5}},
    "fig1c": {"model": {**_FIG1A, "K": 0.4, "L": 0.2}},
    "fig1d": {"model": _FIG1D},
    "fig2": {"model": {**_FIG1A, "hbar": HBAR_GOLDEN}, "kicks": 1000},
    "fig3": {"model": _FIG1A, "kicks": 1000, "hbars": DEFAULT_SWEEP_HBARS},
    "fig4a": {"model": {**_FIG1A, "hbar": HBAR_GOLDEN}, "kicks": 1000, "noise_kind": "amplitude",
              "noise_intensity": AMPLITUDE_LADDER, "realizations": DEFAULT_REALIZATIONS},
    "fig4b": {"model": {**_FIG1A, "hbar": HBAR_GOLDEN}, "kicks": 1000, "noise_kind": "phase",
              "noise_intensity": PHASE_LADDER, "realizations": DEFAULT_REALIZATIONS},
}

# --compare adds the mixed and near-integrable regimes at the same hbar
COMPARE_SCALES = ((1.0, 0.5), (0.4, 0.2))

_MODEL_KEYS = ("K", "L", "phi1", "phi2", "eta", "hbar")
_RUN_KEYS = ("grid_size", "kicks", "ensemble_size", "noise_kind", "noise_intensity",
             "realizations", "seed", "output", "hbars")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    model: ModelParams
    grid_size: int = DEFAULT_GRID_SIZE
    kicks: int | None = None
    ensemble_size: int = DEFAULT_ENSEMBLE_SIZE
    noise_kind: str = "none"
    noise_intensity: tuple = (0.0,)
    realizations: int = 1
    seed: int = 0
    output: str | None = None
    quick: bool = False
    plot: bool = False
    hbars: tuple = ()
    extra: dict = field(default_factory=dict)

    def kicks_or(self, default: int) -> int:
        n = default if self.kicks is None else self.kicks
        return max(1, n // QUICK_FACTOR) if self.quick else n

    @property
    def scaled_ensemble(self) -> int:
        return max(1, self.ensemble_size // QUICK_FACTOR) if self.quick else self.ensemble_size

    @property
    def scaled_realizations(self) -> int:
        return max(1, self.realizations // QUICK_FACTOR) if self.quick else self.realizations


def _float_list(text) -> tuple:
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    items = [s for s in str(text).replace(";", ",").split(",") if s.strip()]
    return tuple(float(s) for s in items)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    for name in ("K", "L", "phi1", "phi2", "eta", "hbar"):
        g.add_argument(f"--{name}", type=float, default=None)
    r = common.add_argument_group("run")
    r.add_argument("--grid-size", type=int, default=None, help="momentum lattice size (power of two)")
    r.add_argument("--kicks", type=int, default=None)
    r.add_argument("--ensemble-size", type=int, default=None)
    r.add_argument("--noise-kind", choices=("none", "amplitude", "phase"), default=None)
    r.add_argument("--noise-intensity", default=None,
                   help="A or B; a comma-separated list runs a ladder")
    r.add_argument("--realizations", type=int, default=None)
    r.add_argument("--seed", type=int, default=None, help="RNG seed for noise histories")
    r.add_argument("--preset", choices=sorted(PRESETS), default=None)
    r.add_argument("--config", default=None, help="key=value file supplying defaults")
    r.add_argument("--output", "-o", default=None, help="output CSV path ('-' for stdout)")
    r.add_argument("--quick", action="store_true", help="scale kicks, ensembles and realizations down 10x")
    r.add_argument("--plot", action="store_true", help="render a PNG figure next to the output")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="harper-ratchet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("portrait", parents=[common], help="classical phase portrait")
    p.add_argument("--n-seeds", type=int, default=None, help=f"seeds on the q=p diagonal (default {PORTRAIT_SEEDS})")
    p.add_argument("--seed-points", default=None, help="explicit seeds 'q:p,q:p,...'")

    p = sub.add_parser("current", parents=[common], help="quantum and classical current")
    p.add_argument("--series", choices=("quantum", "classical", "both"), default="both")
    p.add_argument("--distribution", action="store_true", help="also write the final momentum distribution")
    p.add_argument("--compare", action="store_true", help="add quantum currents for K=2L=1.0 and 0.4")

    p = sub.add_parser("sweep", parents=[common], help="acceleration rate versus hbar")
    p.add_argument("--hbars", default=None, help="comma-separated hbar values")
    p.add_argument("--workers", type=int, default=None, help="processes for sweep entries")

    sub.add_parser("noise", parents=[common], help="noise-averaged current")
    sub.add_parser("symmetry", parents=[common], help="ratchet symmetry verdict")
    sub.add_parser("heuristic", parents=[common], help="extended-curve scan of the classical map")
    return parser


def resolve_config(args) -> RunConfig:
    settings: dict = {}
    model: dict = {}

    def absorb(source: dict):
        for key, value in source.items():
            key = key.replace("-", "_")
            if key == "model":
                model.update(value)
            elif key in _MODEL_KEYS:
                model[key] = value
            elif key in _RUN_KEYS:
                settings[key] = value
            elif key == "preset":
                continue
            else:
                raise UsageError(f"unknown setting {key!r}")

    file_values = {}
    if args.config:
        try:
            file_values = parse_key_values(Path(args.config).read_text(encoding="utf-8"))
        except ValueError as exc:
            raise UsageError(f"{args.config}: {exc}") from exc
    preset = args.preset or file_values.get("preset")
    if preset:
        if preset not in PRESETS:
            raise UsageError(f"unknown preset {preset!r}")
        absorb(PRESETS[preset])
    absorb(file_values)
    absorb({k: v for k, v in vars(args).items()
            if v is not None and (k in _MODEL_KEYS or k in _RUN_KEYS)})

    if "K" not in model or "L" not in model:
        raise UsageError("model needs K and L (flags, --config or --preset)")
    try:
        params = ModelParams(**{k: float(v) for k, v in model.items()})
        cfg = RunConfig(
            model=params,
            grid_size=int(settings.get("grid_size", DEFAULT_GRID_SIZE)),
            kicks=int(settings["kicks"]) if "kicks" in settings else None,
            ensemble_size=int(settings.get("ensemble_size", DEFAULT_ENSEMBLE_SIZE)),
            noise_kind=str(settings.get("noise_kind", "none")),
            noise_intensity=_float_list(settings.get("noise_intensity", (0.0,))),
            realizations=int(settings.get("realizations", 1)),
            seed=int(settings.get("seed", 0)),
            output=settings.get("output"),
            quick=bool(args.quick),
            plot=bool(args.plot),
            hbars=_float_list(settings.get("hbars", ())),
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if cfg.kicks is not None and cfg.kicks < 1:
        raise UsageError("kicks must be >= 1")
    if cfg.ensemble_size < 1:
        raise UsageError("ensemble-size must be >= 1")
    if cfg.realizations < 1:
        raise UsageError("realizations must be >= 1")
    return cfg


def _sibling(output: str | None, suffix: str, ext: str = ".csv") -> str:
    if output is None or output == "-":
        raise UsageError("this command writes several files; give --output")
    path = Path(output)
    return str(path.with_name(f"{path.stem}_{suffix}{ext}"))


def _figure_path(cfg: RunConfig) -> str:
    if cfg.output is None or cfg.output == "-":
        raise UsageError("--plot needs --output to place the figure")
    return str(Path(cfg.output).with_suffix(".png"))


def _quantum_params(cfg: RunConfig) -> ModelParams:
    return cfg.model if cfg.model.hbar is not None else cfg.model.with_hbar(HBAR_GOLDEN)


def _grid(cfg: RunConfig, hbar: float) -> MomentumGrid:
    try:
        return MomentumGrid(cfg.grid_size, hbar)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_portrait(cfg: RunConfig, args) -> int:
    if args.seed_points is not None:
        pairs = [s for s in args.seed_points.split(",") if s.strip()]
        if not pairs:
            raise UsageError("seed list is empty")
        try:
            q0, p0 = zip(*(tuple(float(x) for x in s.split(":")) for s in pairs))
        except ValueError as exc:
            raise UsageError(f"bad --seed-points: {exc}") from exc
    else:
        n = PORTRAIT_SEEDS if args.n_seeds is None else args.n_seeds
        if n < 1:
            raise UsageError("seed list is empty")
        q0, p0 = diagonal_seeds(n)
    points = phase_portrait(cfg.model, q0, p0, cfg.kicks_or(PORTRAIT_KICKS))
    tables.write_portrait(points, cfg.output)
    if cfg.plot:
        from .plotting import plot_portrait
        m = cfg.model
        plot_portrait(points, _figure_path(cfg), f"K={m.K:g}, L={m.L:g}")
    return EXIT_OK


def cmd_current(cfg: RunConfig, args) -> int:
    n_kicks = cfg.kicks_or(1000)
    params = _quantum_params(cfg)
    outputs: dict[str, object] = {}
    labelled = {}
    final_state = None
    if args.series in ("quantum", "both"):
        series, final_state = quantum_current_series(params, _grid(cfg, params.hbar), n_kicks,
                                                     return_state=True)
        outputs["quantum"] = series
        labelled["quantum"] = series
    if args.series in ("classical", "both"):
        series = classical_current_series(cfg.model, cfg.scaled_ensemble, n_kicks)
        outputs["classical"] = series
        labelled["classical"] = series
    if args.compare:
        for K, L in COMPARE_SCALES:
            p = ModelParams(K, L, params.phi1, params.phi2, params.eta, params.hbar)
            series = quantum_current_series(p, _grid(cfg, params.hbar), n_kicks)
            outputs[f"quantum_K{K:g}"] = series
            labelled[f"quantum K=2L={K:g}"] = series
    dist = None
    if args.distribution:
        if final_state is None:
            raise UsageError("--distribution needs the quantum series")
        dist = momentum_distribution(final_state)
        outputs["distribution"] = dist

    if len(outputs) == 1:
        (name, obj), = outputs.items()
        _write(name, obj, cfg.output)
    else:
        for name, obj in outputs.items():
            _write(name, obj, _sibling(cfg.output, name))
    if "quantum" in outputs and len(outputs["quantum"]) >= 20:
        series = outputs["quantum"]
        rate = fit_rate(series, min(100, len(series) // 10), len(series))
        print(f"quantum acceleration rate {rate.slope:.6g} per kick", file=sys.stderr)
    if cfg.plot:
        from .plotting import plot_currents
        plot_currents(labelled, _figure_path(cfg), dist)
    return EXIT_OK


def _write(name, obj, dest):
    if name == "distribution":
        tables.write_distribution(obj, dest)
    else:
        tables.write_current(obj, dest)


def cmd_sweep(cfg: RunConfig, args) -> int:
    hbars = _float_list(args.hbars) if args.hbars is not None else cfg.hbars
    if not hbars:
        raise UsageError("hbar list is empty (use --hbars or --preset fig3)")
    hbars = sorted(hbars)
    if any(b == a for a, b in zip(hbars, hbars[1:])):
        raise UsageError("duplicate hbar values")
    if hbars[0] <= 0:
        raise UsageError("hbar values must be positive")
    result = hbar_sweep(cfg.model, hbars, cfg.kicks_or(1000),
                        policy=GridPolicy(size=cfg.grid_size), max_workers=args.workers)
    tables.write_sweep(result, cfg.output)
    for a, b in result.sign_reversals():
        print(f"current reversal between hbar={a:g} and hbar={b:g}", file=sys.stderr)
    failed = [e for e in result.entries if e.rate is None]
    for e in failed:
        print(f"hbar={e.hbar:g} failed: {e.error}", file=sys.stderr)
    if cfg.plot:
        from .plotting import plot_sweep
        plot_sweep(result, _figure_path(cfg))
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_noise(cfg: RunConfig, args) -> int:
    n_kicks = cfg.kicks_or(1000)
    params = _quantum_params(cfg)
    grid = _grid(cfg, params.hbar)
    intensities = cfg.noise_intensity
    if not intensities:
        raise UsageError("noise intensity list is empty")
    symbol = {"amplitude": "A", "phase": "B", "none": "none"}[cfg.noise_kind]
    results = {}
    for value in intensities:
        try:
            spec = NoiseSpec(cfg.noise_kind, value, cfg.scaled_realizations, cfg.seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        series = noise_averaged_current(params, grid, spec, n_kicks)
        label = f"{symbol}={spec.intensity:g}" if spec.kind != "none" else "noiseless"
        results[label] = series
        dest = cfg.output if len(intensities) == 1 else _sibling(cfg.output, f"{symbol}{value:g}")
        tables.write_current(series, dest)
    if cfg.plot:
        from .plotting import plot_noise
        reference = quantum_current_series(params, grid, n_kicks)
        plot_noise(results, _figure_path(cfg), reference)
    return EXIT_OK


def symmetry_verdict(params: ModelParams) -> str:
    center = reflection_center(params)
    if center is None:
        return "asymmetric: ratchet transport allowed"
    if math.isclose(center, math.pi / 2):
        image = "π−q"
    elif center == 0.0:
        image = "−q"
    else:
        image = f"{2 * center:.6g}−q"
    return f"symmetric under q→{image}, p→−p: currents vanish"


def cmd_symmetry(cfg: RunConfig, args) -> int:
    text = symmetry_verdict(cfg.model) + "\n"
    _emit_text(text, cfg.output)
    return EXIT_OK


def cmd_heuristic(cfg: RunConfig, args) -> int:
    _emit_text(extended_curve_heuristic(cfg.model).text(), cfg.output)
    return EXIT_OK


def _emit_text(text: str, dest):
    if dest is None or dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


COMMANDS = {
    "portrait": cmd_portrait,
    "current": cmd_current,
    "sweep": cmd_sweep,
    "noise": cmd_noise,
    "symmetry": cmd_symmetry,
    "heuristic": cmd_heuristic,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LeakageError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
