"""
Matrix exponential by Sylvester's formula.

Two interpolation routes are provided:

* distinct eigenvalues, the Lagrange form
  ``exp(G) = sum_j e^{g_j} prod_{k != j} (G - g_k I) / (g_j - g_k)``;
* repeated eigenvalues, the Hermite (confluent) form
  ``exp(G) = sum_j [sum_{k<m_j} b_k(g_j) (G - g_j I)^k] prod_{i != j} (G - g_i I)^{m_i}``
  where ``b_k`` are Taylor coefficients of ``e^x / prod_{i != j} (x - g_i)^{m_i}``
  about ``g_j``. Clusters that nearly coincide are interpolated as one group.

``oracle_expm`` is a scaling-and-squaring Taylor exponential that shares no
code with either route and is used to verify them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import ceil, factorial, log2

import numpy as np

from .exceptions import (
    DefectiveMatrixError,
    DegenerateSpectrumError,
    ExpmOverflowError,
    IllConditionedWarning,
    SingularMatrixError,
)
from .linalg import (
    EigenPairs,
    EigenSpectrum,
    as_matrix,
    eigenpairs,
    eigenvalues,
    frobenius_norm,
    inverse,
)

METHODS = ("sylvester-distinct", "sylvester-confluent", "spectral", "oracle")
GAP_RTOL = 1e-6
GROUP_RTOL = 0.1
GROUP_ATOL = 2.0
SERIES_MAX_EXTRA = 400
ORACLE_DEGREE = 13
ORACLE_TARGET_NORM = 0.5
ORACLE_MAX_SQUARINGS = 1100


def oracle_expm(G) -> np.ndarray:
    """Reference exponential: scale to ``||G||_1 / 2^s <= 0.5``, degree-13
    Taylor polynomial, then ``s`` squarings."""
    G = as_matrix(G, "G")
    n = G.shape[0]
    norm = float(np.abs(G).sum(axis=0).max())
    s = 0
    if norm > ORACLE_TARGET_NORM:
        s = int(ceil(log2(norm / ORACLE_TARGET_NORM)))
    if s > ORACLE_MAX_SQUARINGS:
        raise ExpmOverflowError(f"||G||_1 = {norm:.3e} exceeds the scaling budget")
    A = G / 2.0**s
    identity = np.eye(n, dtype=complex)
    E = identity / factorial(ORACLE_DEGREE)
    for k in range(ORACLE_DEGREE - 1, -1, -1):
        E = A @ E + identity / factorial(k)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            E = E @ E
    if not np.all(np.isfinite(E)):
        raise ExpmOverflowError("exponential overflowed during squaring")
    return E


def _spectrum(G, spectrum):
    return eigenvalues(G) if spectrum is None else spectrum


def _check_distinct(spectrum: EigenSpectrum, G) -> None:
    if not spectrum.is_distinct:
        raise DegenerateSpectrumError(
            f"repeated eigenvalues (multiplicities {spectrum.multiplicities}); use the confluent form"
        )
    if len(spectrum) > 1 and spectrum.min_gap() < GAP_RTOL * frobenius_norm(G):
        warnings.warn(
            f"eigenvalue gap {spectrum.min_gap():.3e} is small relative to ||G||_F; "
            "Lagrange denominators lose accuracy",
            IllConditionedWarning,
            stacklevel=3,
        )


def frobenius_covariant(G, spectrum: EigenSpectrum | None, j: int, *, semisimple: bool = False) -> np.ndarray:
    """Spectral projector ``Q_j = prod_{k != j} (G - g_k I) / (g_j - g_k)``.

    The product runs over distinct cluster values. By default every
    eigenvalue must be simple. With ``semisimple=True`` repeated clusters are
    accepted on the caller's word that ``G`` is diagonalizable (e.g. real
    skew-symmetric); ``Q_j`` then projects onto the whole eigenspace.
    """
    G = as_matrix(G, "G")
    spectrum = _spectrum(G, spectrum)
    if not semisimple:
        _check_distinct(spectrum, G)
    values = spectrum.values
    n = G.shape[0]
    Q = np.eye(n, dtype=complex)
    for k, gk in enumerate(values):
        if k != j:
            Q = Q @ (G - gk * np.eye(n)) / (values[j] - gk)
    return Q


def frobenius_covariants(G, spectrum: EigenSpectrum | None = None, *, semisimple: bool = False) -> list[np.ndarray]:
    G = as_matrix(G, "G")
    spectrum = _spectrum(G, spectrum)
    return [frobenius_covariant(G, spectrum, j, semisimple=semisimple) for j in range(len(spectrum))]


def sylvester_expm_distinct(G, spectrum: EigenSpectrum | None = None) -> np.ndarray:
    """Lagrange-Sylvester exponential; every eigenvalue must be simple."""
    G = as_matrix(G, "G")
    spectrum = _spectrum(G, spectrum)
    _check_distinct(spectrum, G)
    values = spectrum.values
    n = G.shape[0]
    result = np.zeros((n, n), dtype=complex)
    for j, gj in enumerate(values):
        term = np.exp(gj) * np.eye(n, dtype=complex)
        for k, gk in enumerate(values):
            if k != j:
                term = term @ (G - gk * np.eye(n)) / (gj - gk)
        result += term
    return result


def spectral_expm(G, pairs: EigenPairs | None = None) -> np.ndarray:
    """``P diag(e^gamma) P^-1`` from an eigenvector basis."""
    G = as_matrix(G, "G")
    if pairs is None:
        pairs = eigenpairs(G)
    P = pairs.vectors
    try:
        Pinv = inverse(P)
    except SingularMatrixError as exc:
        raise DefectiveMatrixError("eigenvector matrix is numerically singular") from exc
    return (P * np.exp(pairs.values)[None, :]) @ Pinv


@dataclass(frozen=True)
class ConfluentCoeffs:
    eigenvalue: complex
    coeffs: tuple

    @property
    def multiplicity(self) -> int:
        return len(self.coeffs)


def _taylor_coeffs(center: complex, others, mults, order: int) -> np.ndarray:
    """Taylor coefficients of ``e^x / prod_i (x - others_i)^{m_i}`` about ``center``.

    The denominator is expanded in ``y = x - center`` and inverted as a power
    series, then multiplied by the series of ``e^{center + y}``.
    """
    denom = np.zeros(order + 1, dtype=complex)
    denom[0] = 1.0
    for g, m in zip(others, mults):
        for _ in range(m):
            # multiply by (y + center - g), dropping terms above ``order``
            nxt = denom * (center - g)
            nxt[1:] += denom[:-1]
            denom = nxt
    recip = np.zeros(order + 1, dtype=complex)
    recip[0] = 1.0 / denom[0]
    for k in range(1, order + 1):
        recip[k] = -np.dot(denom[1:k + 1], recip[k - 1::-1][:k]) / denom[0]
    exp_series = np.exp(center) * np.array([1.0 / factorial(k) for k in range(order + 1)])
    return np.convolve(exp_series, recip)[:order + 1]


def confluent_coeffs(spectrum: EigenSpectrum, j: int) -> ConfluentCoeffs:
    """Coefficients ``b_0 .. b_{m_j - 1}`` for cluster ``j``.

    Works in the local variable ``x = gamma - g_j``: the Taylor series of
    ``e^gamma`` times the reciprocal series of
    ``prod_{i != j} (x + g_j - g_i)^{m_i}``, truncated at order ``m_j - 1``.
    """
    values = spectrum.values
    mults = spectrum.multiplicities
    others = [i for i in range(len(values)) if i != j]
    b = _taylor_coeffs(values[j], values[others], [mults[i] for i in others], mults[j] - 1)
    return ConfluentCoeffs(complex(values[j]), tuple(complex(x) for x in b))


def _divided_differences(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Divided differences ``f[y_0..y_k]`` of the power series ``f(y) = sum_j a_j y^j``.

    Uses ``f[y_0..y_k] = sum_{j>=k} a_j h_{j-k}(y_0..y_k)`` with ``h_d`` the
    complete homogeneous symmetric polynomials, which stays accurate when
    the nodes nearly coincide (a plain difference table would cancel).
    """
    K = len(a) - 1
    h = y[0] ** np.arange(K + 1)
    dd = np.empty(len(y), dtype=complex)
    dd[0] = np.dot(a, h)
    for k in range(1, len(y)):
        # h_d(y_0..y_k) = h_d(y_0..y_{k-1}) + y_k h_{d-1}(y_0..y_k)
        nxt = np.empty(K + 1 - k, dtype=complex)
        nxt[0] = 1.0
        for d in range(1, K + 1 - k):
            nxt[d] = h[d] + y[k] * nxt[d - 1]
        h = nxt
        dd[k] = np.dot(a[k:], h)
    return dd


def _link(values, idx, tol) -> list[list[int]]:
    # single-linkage components of ``values[idx]`` at distance ``tol``
    parent = {i: i for i in idx}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, i in enumerate(idx):
        for k in idx[a + 1:]:
            if abs(values[i] - values[k]) <= tol:
                parent[find(i)] = find(k)
    comps: dict[int, list[int]] = {}
    for i in idx:
        comps.setdefault(find(i), []).append(i)
    return list(comps.values())


@dataclass(frozen=True)
class ClusterGroup:
    """Clusters interpolated together about ``center``.

    ``radius`` is the farthest member from the centre and ``reach`` the
    distance to the nearest eigenvalue outside the group.
    """

    members: tuple
    center: complex
    radius: float
    reach: float


def group_clusters(spectrum: EigenSpectrum, tol: float) -> list[ClusterGroup]:
    """Group clusters lying within ``tol`` of each other (single linkage).

    A group is kept only if its members sit well inside the convergence disc
    of the local series (``radius <= reach / 2``) and ``radius <= GROUP_ATOL``;
    otherwise it is split again at half the distance.
    """
    values = spectrum.values
    mults = np.array(spectrum.multiplicities, dtype=float)
    pending = [(list(range(len(values))), tol)]
    out = []
    while pending:
        idx, t = pending.pop()
        for comp in _link(values, idx, t):
            if len(comp) == 1:
                j = comp[0]
                others = np.delete(values, j)
                reach = float(np.abs(others - values[j]).min(initial=np.inf))
                out.append(ClusterGroup((j,), complex(values[j]), 0.0, reach))
                continue
            w = mults[comp]
            center = complex(np.dot(w, values[comp]) / w.sum())
            radius = float(np.abs(values[comp] - center).max())
            others = np.delete(values, comp)
            reach = float(np.abs(others - center).min(initial=np.inf))
            if radius <= 0.5 * reach and radius <= GROUP_ATOL:
                out.append(ClusterGroup(tuple(comp), center, radius, reach))
            else:
                pending.append((comp, 0.5 * t))
    return sorted(out, key=lambda g: g.members)


def _series_order(nodes: int, radius: float, reach: float) -> int:
    """Series terms needed beyond ``nodes - 1`` for the group divided differences.

    The local series mixes the exponential (terms ``~ radius^e / e!``) and
    the reciprocal of the outside factors (``~ (radius / reach)^e``); stop
    once ``C(e + nodes, nodes)`` times either falls below ``1e-18``.
    """
    if radius == 0.0:
        return 0
    ratio = radius / reach
    binom, expo, geo, e = 1.0, 1.0, 1.0, 0
    while binom * max(expo, geo) > 1e-18 and e < SERIES_MAX_EXTRA:
        e += 1
        binom *= (e + nodes) / e
        expo *= radius / e
        geo *= ratio
    return e


def default_group_tol(G) -> float:
    return min(GROUP_RTOL * frobenius_norm(G), GROUP_ATOL)


def sylvester_expm_confluent(G, spectrum: EigenSpectrum | None = None, *,
                             group_tol: float | None = None) -> np.ndarray:
    """Hermite-Sylvester exponential for spectra with repeated eigenvalues.

    Each cluster ``j`` contributes ``[sum_k b_k (G - g_j I)^k] prod_{i != j} (G - g_i I)^{m_i}``.
    Clusters closer than ``group_tol`` (default ``min(0.1 ||G||_F, 2)``) are
    interpolated jointly: the local factor becomes the Newton interpolant of
    ``e^x / prod_{outside} (x - g_i)^{m_i}`` through all their nodes, with
    divided differences taken from its Taylor series about the group centre.
    This is the same interpolating polynomial without the ``1 / gap``
    cancellation. ``group_tol=0`` gives the plain per-cluster form.
    """
    G = as_matrix(G, "G")
    spectrum = _spectrum(G, spectrum)
    if group_tol is None:
        group_tol = default_group_tol(G)
    groups = group_clusters(spectrum, group_tol)
    if spectrum.is_distinct and all(len(g.members) == 1 for g in groups):
        return sylvester_expm_distinct(G, spectrum)
    n = G.shape[0]
    identity = np.eye(n, dtype=complex)
    values = spectrum.values
    mults = spectrum.multiplicities
    shifted = [G - g * identity for g in values]
    result = np.zeros((n, n), dtype=complex)
    for grp in groups:
        nodes = np.concatenate([[values[i] - grp.center] * mults[i] for i in grp.members])
        outside = [i for i in range(len(values)) if i not in grp.members]
        extra = _series_order(len(nodes), grp.radius, grp.reach)
        a = _taylor_coeffs(grp.center, values[outside], [mults[i] for i in outside], len(nodes) - 1 + extra)
        dd = _divided_differences(a, nodes)
        # Newton-Horner in (G - x_k I); a single cluster reduces to Horner in (G - g_j I)
        local = dd[-1] * identity
        for k in range(len(nodes) - 2, -1, -1):
            local = (G - (grp.center + nodes[k]) * identity) @ local + dd[k] * identity
        for i in outside:
            for _ in range(mults[i]):
                local = local @ shifted[i]
        result += local
    return result


@dataclass(frozen=True)
class ExpmReport:
    result: np.ndarray
    method: str
    spectrum: EigenSpectrum | None
    residual_vs_oracle: float | None = None


def oracle_residual(result, G) -> float:
    """Relative Frobenius distance ``||result - oracle|| / ||oracle||``."""
    ref = oracle_expm(G)
    return frobenius_norm(np.asarray(result) - ref) / frobenius_norm(ref)


def expm(
    G,
    *,
    method: str = "sylvester",
    verify: bool = False,
    cluster_tol: float | None = None,
    gap_tol: float | None = None,
) -> ExpmReport:
    """Exponential of ``G`` with branch selection and an optional oracle check.

    ``method`` is ``"sylvester"`` (alias ``"auto"``), ``"spectral"`` or
    ``"oracle"``. The Sylvester route picks the confluent form when a cluster
    has multiplicity above one, or when two clusters lie closer than
    ``gap_tol`` (default ``1e-6 * ||G||_F``); in the latter case the raw
    eigenvalues are regrouped with ``gap_tol`` before interpolation. Simple
    eigenvalues that are close but not merged (within
    :func:`default_group_tol`) also take the confluent route, where they are
    interpolated jointly instead of through ill-conditioned Lagrange factors.
    """
    G = as_matrix(G, "G")
    if method == "auto":
        method = "sylvester"
    if method == "oracle":
        res = oracle_expm(G)
        return ExpmReport(res, "oracle", None, 0.0 if verify else None)
    spectrum = eigenvalues(G, cluster_tol)
    if method == "spectral":
        res = spectral_expm(G, eigenpairs(G, spectrum))
        label = "spectral"
    elif method == "sylvester":
        if gap_tol is None:
            gap_tol = GAP_RTOL * frobenius_norm(G)
        if spectrum.is_distinct and spectrum.min_gap() < gap_tol:
            spectrum = spectrum.recluster(max(gap_tol, spectrum.cluster_tol))
        group_tol = default_group_tol(G)
        grouped = any(len(g.members) > 1 for g in group_clusters(spectrum, group_tol))
        if spectrum.is_distinct and not grouped:
            res = sylvester_expm_distinct(G, spectrum)
            label = "sylvester-distinct"
        else:
            res = sylvester_expm_confluent(G, spectrum, group_tol=group_tol)
            label = "sylvester-confluent"
    else:
        raise ValueError(f"unknown method {method!r}")
    residual = oracle_residual(res, G) if verify else None
    return ExpmReport(res, label, spectrum, residual)
