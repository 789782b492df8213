"""
Coherence-vector generators for a driven two-level atom (SU(2), Bloch
vector) and a three-level Lambda system (SU(3), eight components).

The two-level vector is ordered ``(u01, v01, w1)`` and evolves under

    g = [[0,  D, 0],
         [-D, 0, -W],
         [0,  W, 0]]

with detuning ``D`` and Rabi frequency ``W``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import UnsupportedInitialStateError
from .linalg import EigenSpectrum, cluster_eigenvalues, default_cluster_tol

SQRT3 = np.sqrt(3.0)
SMALL_ZETA = 1e-6

TWO_LEVEL_LABELS = ("u01", "v01", "w1")
LAMBDA_LABELS = tuple(f"s{k}" for k in range(1, 9))
CONVENTIONS = ("w-plus", "w-minus")


@dataclass(frozen=True)
class TwoLevelParams:
    detuning: float = 0.0
    rabi: float = 0.0


@dataclass(frozen=True)
class LambdaParams:
    """Half Rabi frequencies of pump (``alpha``) and Stokes (``beta``) light."""

    alpha: float = 0.0
    beta: float = 0.0
    detuning: float = 0.0


@dataclass(frozen=True)
class IntegratedCouplings:
    """Time-integrated detuning and Rabi frequency (dimensionless)."""

    detuning: float = 0.0
    rabi: float = 0.0

    @property
    def zeta(self) -> float:
        return float(np.hypot(self.detuning, self.rabi))


def build_g_two_level(p: TwoLevelParams) -> np.ndarray:
    d, w = p.detuning, p.rabi
    return np.array(
        [[0.0, d, 0.0],
         [-d, 0.0, -w],
         [0.0, w, 0.0]],
        dtype=complex,
    )


def build_g_lambda(p: LambdaParams) -> np.ndarray:
    a, b, d = p.alpha, p.beta, p.detuning
    g = np.zeros((8, 8))
    # upper triangle; rows/cols are 0-based here
    g[0, 3], g[0, 5] = d, b
    g[1, 4], g[1, 5] = -d, -a
    g[2, 3], g[2, 4] = b, -a
    g[3, 6] = 2 * a
    g[4, 6], g[4, 7] = -b, SQRT3 * b
    g = g - g.T
    return g.astype(complex)


def two_level_generator(ic: IntegratedCouplings) -> np.ndarray:
    return build_g_two_level(TwoLevelParams(ic.detuning, ic.rabi))


def ground_state(system: str, convention: str = "w-plus") -> np.ndarray:
    """Initial coherence vector for the atom prepared in its ground state.

    ``convention`` only affects the two-level system: ``"w-plus"`` gives
    ``w1 = +1`` (``|0><0| - |1><1|`` on ``|0>``) and ``"w-minus"`` gives
    ``w1 = -1``.
    """
    if system in ("two-level", "two_level"):
        if convention == "w-plus":
            return np.array([0.0, 0.0, 1.0])
        if convention == "w-minus":
            return np.array([0.0, 0.0, -1.0])
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    if system == "lambda":
        return np.array([0, 0, 0, 0, 0, 0, -1.0, -1.0 / SQRT3])
    raise ValueError(f"unknown system {system!r}")


def closed_form_two_level(ic: IntegratedCouplings, S0=(0.0, 0.0, -1.0)) -> np.ndarray:
    """Analytic Bloch vector after integrated couplings ``ic``, from
    ``S0 = (0, 0, -1)``.

    Uses ``(1 - cos z) / z^2`` and ``sin z / z`` with Taylor fallbacks below
    ``z = 1e-6`` so the ``z -> 0`` limit returns ``S0``.
    """
    if not np.allclose(np.asarray(S0, dtype=float), [0.0, 0.0, -1.0], rtol=0, atol=1e-15):
        raise UnsupportedInitialStateError("closed form is only available for S0 = (0, 0, -1)")
    d, w = ic.detuning, ic.rabi
    z = ic.zeta
    if z < SMALL_ZETA:
        one_minus_cos = 0.5 - z * z / 24.0
        sinc = 1.0 - z * z / 6.0
    else:
        one_minus_cos = (1.0 - np.cos(z)) / (z * z)
        sinc = np.sin(z) / z
    # third component: -(d^2 + w^2 cos z) / z^2 = -1 + w^2 (1 - cos z) / z^2
    return np.array([
        d * w * one_minus_cos,
        w * sinc,
        -1.0 + w * w * one_minus_cos,
    ])


def pulse_area_conditions(target, ic: IntegratedCouplings) -> float:
    """Distance between the closed-form state for ``ic`` and ``target``."""
    return float(np.linalg.norm(closed_form_two_level(ic) - np.asarray(target, dtype=float)))


def lambda_eigenvalues(p: LambdaParams, *, inner_sign: int = 1, cluster_tol: float | None = None) -> EigenSpectrum:
    """Closed-form spectrum of :func:`build_g_lambda`.

    The characteristic polynomial factors as

        x^2 (x^2 + 4a^2 + 4b^2 + D^2) (x^4 + (2a^2 + 2b^2 + D^2) x^2 + (a^2 + b^2)^2)

    so the quartic roots are
    ``x = +-sqrt(-2a^2 - 2b^2 - D^2 -+ D sqrt(4a^2 + 4b^2 + D^2)) / sqrt(2)``.
    ``inner_sign=-1`` puts ``4a^2 + 4b^2 - D^2`` under the inner root; that
    variant agrees with the generator only at ``D = 0`` and is kept for
    comparison.
    """
    a2, b2, d = p.alpha ** 2, p.beta ** 2, p.detuning
    inner = np.sqrt(complex(4 * a2 + 4 * b2 + inner_sign * d * d))
    outer = np.sqrt(complex(-4 * a2 - 4 * b2 - d * d))
    vals = [0.0, 0.0, outer, -outer]
    for sign in (1.0, -1.0):
        x = np.sqrt(-2 * a2 - 2 * b2 - d * d - sign * d * inner) / np.sqrt(2.0)
        vals += [x, -x]
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(build_g_lambda(p))
    return cluster_eigenvalues(np.array(vals, dtype=complex), cluster_tol)
