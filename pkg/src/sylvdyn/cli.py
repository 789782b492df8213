"""Command-line front end.

Subcommands::

    sylvdyn expm MATRIX [-o OUT] [--method M] [--verify] [--cluster-tol TOL]
    sylvdyn eig MATRIX [--cluster-tol TOL]
    sylvdyn simulate [CONFIG] [overrides...] [-o OUT]
    sylvdyn compare [CONFIG] [overrides...]

Exit codes: 0 success, 2 malformed input or configuration, 3 numerical
failure, 4 non-commuting pulses under ``--strict-commuting``.
"""

from __future__ import annotations

import argparse
import configparser
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import (
    DEFAULT_PANELS,
    MODEL_COUPLINGS,
    PULSE_KINDS,
    PulseShape,
    PulseSpec,
    TimeGrid,
    compare_constant,
    compare_solvers,
    propagate_commuting,
    propagate_constant,
)
from .exceptions import NonCommutingError, SylvdynError
from .formats import FormatError, fmt, format_matrix, format_trajectory, read_matrix, write_matrix
from .linalg import eigenvalues
from .matfunc import expm
from .models import CONVENTIONS, ground_state

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_NONCOMMUTING = 4

MODELS = ("two-level", "lambda", "raw-matrix")
METHODS = ("auto", "sylvester", "spectral", "oracle")
ALL_COUPLINGS = ("detuning", "rabi", "alpha", "beta")


class ConfigError(SylvdynError, ValueError):
    pass


@dataclass
class RunConfig:
    model: str = "two-level"
    amplitudes: dict = field(default_factory=dict)
    shapes: dict = field(default_factory=dict)
    duration: float = 1.0
    steps: int = 100
    panels: int = DEFAULT_PANELS
    method: str = "auto"
    convention: str = "w-plus"
    strict_commuting: bool = False
    initial: tuple | None = None
    matrix: str | None = None
    output: str | None = None

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if not self.duration > 0:
            raise ConfigError("duration must be positive")
        if self.steps < 1:
            raise ConfigError("steps must be a positive integer")
        if self.panels < 2:
            raise ConfigError("panels must be at least 2")
        allowed = MODEL_COUPLINGS.get(self.model, ())
        stray = sorted(k for k in set(self.amplitudes) | set(self.shapes) if k not in (*allowed, "*"))
        if stray:
            raise ConfigError(f"parameters {stray} do not apply to model {self.model!r}")
        if self.model == "raw-matrix":
            if self.matrix is None:
                raise ConfigError("model raw-matrix needs a matrix file")
            if self.initial is None:
                raise ConfigError("model raw-matrix needs an initial vector")

    def pulse_spec(self) -> PulseSpec:
        couplings = {}
        for name in MODEL_COUPLINGS[self.model]:
            opts = {"kind": "constant", "center": self.duration / 2, "width": self.duration / 4}
            opts.update(self.shapes.get("*", {}))
            opts.update(self.shapes.get(name, {}))
            couplings[name] = PulseShape(amplitude=self.amplitudes.get(name, 0.0), **opts)
        return PulseSpec(self.model, couplings, self.duration)

    def initial_state(self, dim: int | None = None) -> np.ndarray:
        if self.initial is not None:
            S0 = np.array(self.initial, dtype=float)
            if dim is not None and S0.shape[0] != dim:
                raise ConfigError(f"initial vector has {S0.shape[0]} entries, model needs {dim}")
            return S0
        return ground_state(self.model, self.convention)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(0.0, self.duration, self.steps)


def _as_float(key: str, value: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if not np.isfinite(x):
        raise ConfigError(f"{key}: value must be finite")
    return x


def _as_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def _as_vector(key: str, value: str) -> tuple:
    return tuple(_as_float(key, v) for v in value.replace(",", " ").split())


def apply_settings(cfg: RunConfig, settings: dict) -> RunConfig:
    """Apply ``key -> text`` settings (from a config file or flags) to ``cfg``."""
    for key, value in settings.items():
        if value is None:
            continue
        if key in ALL_COUPLINGS:
            cfg.amplitudes[key] = _as_float(key, value)
        elif "." in key:
            name, attr = key.split(".", 1)
            if name not in ALL_COUPLINGS or attr not in ("shape", "center", "width"):
                raise ConfigError(f"unknown key {key!r}")
            cfg.shapes.setdefault(name, {})[_shape_field(attr)] = _shape_value(key, attr, value)
        elif key in ("shape", "center", "width"):
            cfg.shapes.setdefault("*", {})[_shape_field(key)] = _shape_value(key, key, value)
        elif key == "model":
            cfg.model = value
        elif key == "duration":
            cfg.duration = _as_float(key, value)
        elif key == "steps":
            cfg.steps = _as_int(key, value)
        elif key == "panels":
            cfg.panels = _as_int(key, value)
        elif key == "method":
            cfg.method = value
        elif key == "convention":
            cfg.convention = value
        elif key in ("strict-commuting", "strict_commuting"):
            cfg.strict_commuting = str(value).lower() in ("1", "true", "yes", "on")
        elif key == "initial":
            cfg.initial = _as_vector(key, value)
        elif key == "matrix":
            cfg.matrix = value
        elif key == "output":
            cfg.output = value
        else:
            raise ConfigError(f"unknown key {key!r}")
    return cfg


def _shape_field(attr: str) -> str:
    return "kind" if attr == "shape" else attr


def _shape_value(key: str, attr: str, value: str):
    if attr == "shape":
        if value not in PULSE_KINDS:
            raise ConfigError(f"{key}: pulse shape must be one of {PULSE_KINDS}, got {value!r}")
        return value
    return _as_float(key, value)


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` and ``;`` start comments."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        parser.read_string("[run]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"config {path}: {exc}") from None
    return dict(parser["run"])


def build_run_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        apply_settings(cfg, read_config_file(args.config))
    flags = {
        "model": args.model,
        "duration": args.duration,
        "steps": args.steps,
        "panels": args.panels,
        "method": args.method,
        "convention": args.convention,
        "initial": args.initial,
        "matrix": args.matrix,
        "output": getattr(args, "output", None),
        "shape": args.shape,
        "center": args.center,
        "width": args.width,
    }
    for name in ALL_COUPLINGS:
        flags[name] = getattr(args, name)
    if args.strict_commuting:
        flags["strict-commuting"] = "true"
    apply_settings(cfg, {k: (None if v is None else str(v)) for k, v in flags.items()})
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# subcommands


def _emit(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_expm(args) -> int:
    G = read_matrix(args.input)
    report = expm(G, method=args.method, verify=args.verify, cluster_tol=args.cluster_tol)
    summary = sys.stdout if args.output else sys.stderr
    if args.output:
        write_matrix(args.output, report.result)
    else:
        sys.stdout.write(format_matrix(report.result))
    print(f"method: {report.method}", file=summary)
    if report.spectrum is not None:
        print("clusters (re, im, multiplicity):", file=summary)
        for value, m in report.spectrum.clusters:
            print(f"  {fmt(value.real)}, {fmt(value.imag)}, {m}", file=summary)
    if report.residual_vs_oracle is not None:
        print(f"oracle residual: {report.residual_vs_oracle:.3e}", file=summary)
    return EXIT_OK


def cmd_eig(args) -> int:
    G = read_matrix(args.input)
    spectrum = eigenvalues(G, args.cluster_tol)
    print("re,im,multiplicity")
    for value, m in spectrum.clusters:
        print(f"{fmt(value.real)},{fmt(value.imag)},{m}")
    return EXIT_OK


def _labels(cfg: RunConfig, dim: int) -> tuple:
    if cfg.model == "raw-matrix":
        return tuple(f"s{k}" for k in range(1, dim + 1))
    return PulseSpec(cfg.model).labels


def cmd_simulate(args) -> int:
    cfg = build_run_config(args)
    if cfg.model == "raw-matrix":
        g = read_matrix(cfg.matrix)
        S0 = cfg.initial_state(g.shape[0])
        traj = propagate_constant(g, S0, cfg.grid, cfg.method)
    else:
        spec = cfg.pulse_spec()
        S0 = cfg.initial_state(spec.dim)
        traj = propagate_commuting(spec, S0, cfg.grid, cfg.method,
                                   strict=cfg.strict_commuting, panels=cfg.panels)
    _emit(format_trajectory(traj.times, traj.states, _labels(cfg, len(S0))), cfg.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = build_run_config(args)
    if cfg.model == "raw-matrix":
        g = read_matrix(cfg.matrix)
        report = compare_constant(g, cfg.initial_state(g.shape[0]), cfg.grid)
    else:
        spec = cfg.pulse_spec()
        if not spec.is_constant:
            raise ConfigError("compare needs constant pulses")
        report = compare_solvers(spec, cfg.initial_state(spec.dim), cfg.grid, panels=cfg.panels)
    print("method,max_deviation_vs_oracle")
    for method, dev in report.vs_oracle.items():
        print(f"{method},{dev:.3e}")
    print(f"max_pairwise,{report.max_deviation:.3e}")
    return EXIT_OK


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("config", nargs="?", help="key = value configuration file")
    p.add_argument("--model", choices=MODELS)
    for name in ALL_COUPLINGS:
        p.add_argument(f"--{name}", type=float, help=f"{name} amplitude (rad / time)")
    p.add_argument("--shape", choices=PULSE_KINDS, help="envelope kind for every coupling")
    p.add_argument("--center", type=float)
    p.add_argument("--width", type=float)
    p.add_argument("--duration", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--panels", type=int, help="Simpson panels for pulse integrals")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--convention", choices=CONVENTIONS, help="two-level ground-state sign")
    p.add_argument("--strict-commuting", action="store_true",
                   help="fail if coupling envelopes differ in shape")
    p.add_argument("--initial", help="initial vector, comma separated")
    p.add_argument("--matrix", help="generator file for model raw-matrix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sylvdyn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expm", help="matrix exponential of a matrix file")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--verify", action="store_true", help="report the residual against the oracle")
    p.add_argument("--cluster-tol", type=float)
    p.set_defaults(func=cmd_expm)

    p = sub.add_parser("eig", help="clustered eigenvalues of a matrix file")
    p.add_argument("input")
    p.add_argument("--cluster-tol", type=float)
    p.set_defaults(func=cmd_eig)

    p = sub.add_parser("simulate", help="propagate a coherence vector and write the trajectory")
    _add_run_options(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="max deviation of each solver from the oracle")
    _add_run_options(p)
    p.set_defaults(func=cmd_compare)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.showwarning = _show_warning
            return args.func(args)
    except NonCommutingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCOMMUTING
    except (FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SylvdynError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
