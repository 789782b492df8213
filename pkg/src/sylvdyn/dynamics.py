"""
Pulse-driven propagation of coherence vectors.

Every coupling of a model (two-level: detuning and Rabi frequency; Lambda:
alpha, beta and detuning) follows a parametric envelope. Because the
generators are linear in the couplings, ``G(t) = int_t0^t g(s) ds`` is the
same generator evaluated at the time-integrated couplings, and when all
nonzero couplings share one envelope shape ``S(t) = exp(G(t)) S0`` solves
``dS/dt = g(t) S`` exactly.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .exceptions import NonCommutingError, NonCommutingWarning
from .linalg import as_matrix, as_vector, eigenpairs, inverse
from .matfunc import expm
from .models import (
    LAMBDA_LABELS,
    TWO_LEVEL_LABELS,
    LambdaParams,
    TwoLevelParams,
    build_g_lambda,
    build_g_two_level,
)

PULSE_KINDS = ("constant", "gaussian", "sine-squared")
MODEL_COUPLINGS = {
    "two-level": ("detuning", "rabi"),
    "lambda": ("alpha", "beta", "detuning"),
}
DEFAULT_PANELS = 256
SOLVERS = ("sylvester", "spectral", "adiabatic", "oracle")


@dataclass(frozen=True)
class PulseShape:
    """Envelope of one coupling.

    ``gaussian`` is ``amplitude * exp(-((t - center) / width)^2)``;
    ``sine-squared`` is ``amplitude * cos^2(pi (t - center) / width)`` on
    ``|t - center| <= width / 2`` and zero outside.
    """

    kind: str = "constant"
    amplitude: float = 0.0
    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.kind not in PULSE_KINDS:
            raise ValueError(f"unknown pulse kind {self.kind!r}; expected one of {PULSE_KINDS}")
        if self.kind != "constant" and not self.width > 0:
            raise ValueError("pulse width must be positive")
        if not np.isfinite([self.amplitude, self.center, self.width]).all():
            raise ValueError("pulse parameters must be finite")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, self.amplitude)
        x = (t - self.center) / self.width
        if self.kind == "gaussian":
            return self.amplitude * np.exp(-x * x)
        return np.where(np.abs(x) <= 0.5, self.amplitude * np.cos(np.pi * x) ** 2, 0.0)

    @property
    def is_zero(self) -> bool:
        return self.amplitude == 0.0

    def envelope_key(self):
        # two shapes with equal keys are proportional in time
        if self.kind == "constant":
            return ("constant",)
        return (self.kind, self.center, self.width)


ZERO_PULSE = PulseShape()


@dataclass(frozen=True)
class PulseSpec:
    model: str
    couplings: Mapping[str, PulseShape] = field(default_factory=dict)
    duration: float = 1.0

    def __post_init__(self):
        if self.model not in MODEL_COUPLINGS:
            raise ValueError(f"unknown model {self.model!r}; expected one of {tuple(MODEL_COUPLINGS)}")
        unknown = set(self.couplings) - set(MODEL_COUPLINGS[self.model])
        if unknown:
            raise ValueError(f"couplings {sorted(unknown)} do not belong to the {self.model} model")
        if not self.duration > 0:
            raise ValueError("duration must be positive")

    @classmethod
    def constant(cls, model: str, duration: float = 1.0, **amplitudes) -> "PulseSpec":
        return cls(model, {k: PulseShape("constant", float(v)) for k, v in amplitudes.items()}, duration)

    def pulse(self, name: str) -> PulseShape:
        return self.couplings.get(name, ZERO_PULSE)

    @property
    def names(self) -> tuple:
        return MODEL_COUPLINGS[self.model]

    @property
    def dim(self) -> int:
        return 3 if self.model == "two-level" else 8

    @property
    def labels(self) -> tuple:
        return TWO_LEVEL_LABELS if self.model == "two-level" else LAMBDA_LABELS

    @property
    def is_constant(self) -> bool:
        return all(self.pulse(n).kind == "constant" for n in self.names)

    @property
    def is_commuting(self) -> bool:
        keys = {self.pulse(n).envelope_key() for n in self.names if not self.pulse(n).is_zero}
        return len(keys) <= 1

    def generator(self, values: Mapping[str, float]) -> np.ndarray:
        """Model generator with each coupling set to ``values[name]``."""
        if self.model == "two-level":
            return build_g_two_level(TwoLevelParams(values.get("detuning", 0.0), values.get("rabi", 0.0)))
        return build_g_lambda(
            LambdaParams(values.get("alpha", 0.0), values.get("beta", 0.0), values.get("detuning", 0.0))
        )

    def generator_at(self, t: float) -> np.ndarray:
        return self.generator({n: float(self.pulse(n)(t)) for n in self.names})


@dataclass(frozen=True)
class TimeGrid:
    """``steps + 1`` equally spaced points from ``t0`` to ``t1``."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise ValueError("t1 must exceed t0")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be a positive integer")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.steps + 1)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    solver: str
    commuting_approximation: bool = False

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise ValueError("times and states differ in length")

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    def max_distance(self, other: "Trajectory") -> float:
        return float(np.abs(np.asarray(self.states) - np.asarray(other.states)).max(initial=0.0))


def simpson(f, a: float, b: float, panels: int = DEFAULT_PANELS) -> float:
    """Composite Simpson rule; ``panels`` is rounded up to an even number."""
    if b == a:
        return 0.0
    panels = max(2, panels + (panels % 2))
    x = np.linspace(a, b, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float((b - a) / (3.0 * panels) * np.dot(w, f(x)))


def integrated_couplings(spec: PulseSpec, upto: float, *, start: float = 0.0,
                         panels: int = DEFAULT_PANELS) -> dict[str, float]:
    for t in (start, upto):
        if not 0.0 <= t <= spec.duration:
            raise ValueError(f"time {t} outside [0, {spec.duration}]")
    out = {}
    for name in spec.names:
        pulse = spec.pulse(name)
        if pulse.is_zero:
            out[name] = 0.0
        elif pulse.kind == "constant":
            out[name] = pulse.amplitude * (upto - start)
        else:
            out[name] = simpson(pulse, start, upto, panels)
    return out


def integrate_g(spec: PulseSpec, upto: float, *, start: float = 0.0,
                panels: int = DEFAULT_PANELS) -> np.ndarray:
    """``G = int_start^upto g(t) dt``, built from the integrated couplings."""
    return spec.generator(integrated_couplings(spec, upto, start=start, panels=panels))


def _realify(states: np.ndarray, real: bool) -> np.ndarray:
    return states.real.copy() if real else states


def _check_commuting(spec: PulseSpec, strict: bool) -> bool:
    if spec.is_commuting:
        return False
    msg = ("nonzero couplings have different envelope shapes, so g(t) need not commute "
           "with itself at different times")
    if strict:
        raise NonCommutingError(msg)
    warnings.warn(msg + "; using exp(int g) as an approximation", NonCommutingWarning, stacklevel=3)
    return True


def propagate_commuting(
    spec: PulseSpec,
    S0,
    grid: TimeGrid,
    method: str = "sylvester",
    *,
    strict: bool = False,
    panels: int = DEFAULT_PANELS,
    workers: int | None = None,
) -> Trajectory:
    """``S(t) = exp(G(t)) S0`` at every grid point, ``G`` integrated from ``grid.t0``.

    Each point is evaluated independently; ``workers > 1`` spreads them over
    a thread pool. ``method`` is passed to :func:`sylvdyn.matfunc.expm`.
    """
    approx = _check_commuting(spec, strict)
    S0 = as_vector(S0, spec.dim, "S0")
    real = not np.any(S0.imag)

    def point(t):
        if t == grid.t0:
            return S0.copy()
        G = integrate_g(spec, t, start=grid.t0, panels=panels)
        return expm(G, method=method).result @ S0

    times = grid.times
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            states = list(pool.map(point, times))
    else:
        states = [point(t) for t in times]
    solver = "sylvester" if method == "auto" else method
    return Trajectory(times, _realify(np.array(states), real), solver, approx)


def adiabatic_solve(g, S0, grid: TimeGrid) -> Trajectory:
    """Constant-generator solution ``S(t) = U exp(L (t - t0)) U^-1 S0``.

    ``U`` holds the eigenvectors of ``g`` and ``L`` its eigenvalues;
    raises :class:`~sylvdyn.exceptions.DefectiveMatrixError` if ``g`` is not
    diagonalizable.
    """
    g = as_matrix(g, "g")
    S0 = as_vector(S0, g.shape[0], "S0")
    pairs = eigenpairs(g)
    U = pairs.vectors
    coeffs = inverse(U) @ S0
    times = grid.times
    phases = np.exp(np.outer(times - grid.t0, pairs.values))
    states = (phases * coeffs[None, :]) @ U.T
    states[0] = S0
    real = not np.any(g.imag) and not np.any(S0.imag)
    return Trajectory(times, _realify(states, real), "adiabatic")


def propagate_constant(g, S0, grid: TimeGrid, method: str = "sylvester") -> Trajectory:
    """``S(t) = exp(g (t - t0)) S0`` for a time-independent generator."""
    g = as_matrix(g, "g")
    S0 = as_vector(S0, g.shape[0], "S0")
    if method == "adiabatic":
        return adiabatic_solve(g, S0, grid)
    times = grid.times
    states = [S0.copy()] + [expm(g * (t - grid.t0), method=method).result @ S0 for t in times[1:]]
    real = not np.any(g.imag) and not np.any(S0.imag)
    solver = "sylvester" if method == "auto" else method
    return Trajectory(times, _realify(np.array(states), real), solver)


@dataclass
class SolverComparison:
    trajectories: dict
    vs_oracle: dict
    pairwise: dict

    @property
    def max_deviation(self) -> float:
        return max(self.pairwise.values(), default=0.0)


def _summarize(trajectories: dict) -> SolverComparison:
    trajectories = {m: trajectories[m] for m in SOLVERS}
    pairwise = {
        (a, b): trajectories[a].max_distance(trajectories[b])
        for a, b in itertools.combinations(SOLVERS, 2)
    }
    vs_oracle = {m: trajectories[m].max_distance(trajectories["oracle"]) for m in SOLVERS}
    return SolverComparison(trajectories, vs_oracle, pairwise)


def compare_solvers(spec: PulseSpec, S0, grid: TimeGrid, *, panels: int = DEFAULT_PANELS) -> SolverComparison:
    """Run all four solvers on a constant-pulse spec and measure disagreement."""
    if not spec.is_constant:
        raise ValueError("solver comparison needs constant pulses; adiabatic_solve assumes a constant g")
    trajectories = {
        m: propagate_commuting(spec, S0, grid, m, panels=panels) for m in ("sylvester", "spectral", "oracle")
    }
    g = spec.generator({n: spec.pulse(n).amplitude for n in spec.names})
    trajectories["adiabatic"] = adiabatic_solve(g, S0, grid)
    return _summarize(trajectories)


def compare_constant(g, S0, grid: TimeGrid) -> SolverComparison:
    return _summarize({m: propagate_constant(g, S0, grid, m) for m in SOLVERS})
