"""
Dense complex linear algebra for small matrices (n <= 16).

Matrices and vectors are plain ``numpy`` complex arrays. This module owns the
eigensolver used by the Sylvester machinery: Householder reduction to upper
Hessenberg form followed by Wilkinson-shifted QR iteration with deflation.
Eigenvalues are grouped into clusters by single-linkage clustering, and
eigenvectors come from (block) inverse iteration seeded at each cluster.

A Faddeev-LeVerrier characteristic polynomial plus companion-matrix root
finding is provided as an independent cross-check of the QR eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    ConvergenceError,
    DefectiveMatrixError,
    DimensionError,
    NonFiniteError,
    SingularMatrixError,
)

MAX_DIM = 16
EPS = np.finfo(float).eps
SINGULAR_PIVOT_RTOL = 1e-12
QR_ITERATIONS_PER_EIGENVALUE = 30


def as_matrix(A, name="matrix") -> np.ndarray:
    """Return ``A`` as a square, finite complex128 array (a copy)."""
    M = np.array(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise DimensionError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return M


def as_vector(v, n=None, name="vector") -> np.ndarray:
    x = np.array(v, dtype=complex)
    if x.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise DimensionError(f"{name} has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"{name} contains NaN or Inf entries")
    return x


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(np.asarray(A), "fro"))


def matmul(A, B) -> np.ndarray:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise DimensionError(f"dimension mismatch: {A.shape} @ {B.shape}")
    return A @ B


def matvec(A, x) -> np.ndarray:
    A = as_matrix(A, "A")
    return A @ as_vector(x, A.shape[0], "x")


def _eliminate(A: np.ndarray, B: np.ndarray, pivot_floor: float | None) -> np.ndarray:
    """Gauss-Jordan elimination with partial pivoting, solving ``A X = B``.

    With ``pivot_floor`` set, a pivot below it raises; otherwise tiny pivots
    are nudged to ``eps * ||A||`` (wanted by inverse iteration).
    """
    n = A.shape[0]
    M = np.concatenate([A.copy(), B.copy()], axis=1)
    nudge = EPS * max(frobenius_norm(A), 1.0)
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if p != k:
            M[[k, p]] = M[[p, k]]
        piv = M[k, k]
        if pivot_floor is not None:
            if abs(piv) < pivot_floor:
                raise SingularMatrixError(
                    f"pivot {abs(piv):.3e} in column {k} below threshold {pivot_floor:.3e}"
                )
        elif abs(piv) < nudge:
            piv = M[k, k] = nudge
        M[k] /= piv
        col = M[:, k].copy()
        col[k] = 0.0
        M -= np.outer(col, M[k])
    return M[:, n:]


def inverse(A) -> np.ndarray:
    """Inverse by Gauss-Jordan elimination with partial pivoting.

    Raises :class:`SingularMatrixError` when a pivot falls below
    ``1e-12 * ||A||_F``.
    """
    A = as_matrix(A)
    n = A.shape[0]
    floor = SINGULAR_PIVOT_RTOL * frobenius_norm(A)
    if floor == 0.0:
        raise SingularMatrixError("zero matrix is singular")
    return _eliminate(A, np.eye(n, dtype=complex), floor)


def solve(A, B) -> np.ndarray:
    A = as_matrix(A)
    B = np.asarray(B, dtype=complex)
    vec = B.ndim == 1
    X = _eliminate(A, B.reshape(A.shape[0], -1), SINGULAR_PIVOT_RTOL * frobenius_norm(A))
    return X[:, 0] if vec else X


# ---------------------------------------------------------------------------
# Eigenvalues


def _norm2(x) -> float:
    # scaled 2-norm; plain sum of squares underflows for entries near 1e-160
    m = np.abs(x).max(initial=0.0)
    if m == 0.0:
        return 0.0
    return float(m * np.linalg.norm(_rdiv(x, m)))


def _rdiv(x, r):
    # complex / real without numpy's complex division, which overflows for subnormal r
    return x.real / r + 1j * (x.imag / r)


def hessenberg(A) -> np.ndarray:
    """Reduce ``A`` to upper Hessenberg form by Householder similarity."""
    H = as_matrix(A)
    n = H.shape[0]
    negligible = EPS * EPS * frobenius_norm(H)
    for k in range(n - 2):
        x = H[k + 1:, k].copy()
        nx = _norm2(x)
        if nx <= negligible:
            H[k + 2:, k] = 0.0
            continue
        phase = np.exp(1j * np.angle(x[0]))
        v = x
        v[0] += phase * nx
        v = _rdiv(v, _norm2(v))
        H[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H


def _wilkinson_shift(a, b, c, d):
    # eigenvalue of [[a, b], [c, d]] closest to d
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mu1 = 0.5 * (a + d) + disc
    mu2 = 0.5 * (a + d) - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _givens(a, b):
    # angle form avoids complex division overflow for subnormal entries
    r = np.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0, 0.0
    return abs(a) / r * np.exp(1j * np.angle(a)), abs(b) / r * np.exp(1j * np.angle(b))


def _qr_step(W: np.ndarray, mu) -> None:
    """One explicit shifted QR step, in place, on the Hessenberg window ``W``."""
    m = W.shape[0]
    W[np.diag_indices(m)] -= mu
    rots = []
    for k in range(m - 1):
        c, s = _givens(W[k, k], W[k + 1, k])
        # unitary [[c*, s*], [-s, c]] zeroes W[k+1, k]
        rk = W[k, k:].copy()
        rk1 = W[k + 1, k:].copy()
        W[k, k:] = np.conj(c) * rk + np.conj(s) * rk1
        W[k + 1, k:] = -s * rk + c * rk1
        W[k + 1, k] = 0.0
        rots.append((c, s))
    for k, (c, s) in enumerate(rots):
        hi = min(k + 2, m - 1) + 1
        ck = W[:hi, k].copy()
        ck1 = W[:hi, k + 1].copy()
        W[:hi, k] = c * ck + s * ck1
        W[:hi, k + 1] = -np.conj(s) * ck + np.conj(c) * ck1
    W[np.diag_indices(m)] += mu


def raw_eigenvalues(G) -> np.ndarray:
    """All ``n`` eigenvalues of ``G`` (unclustered), via Hessenberg QR."""
    G = as_matrix(G, "G")
    n = G.shape[0]
    if n > MAX_DIM:
        raise DimensionError(f"eigensolver supports n <= {MAX_DIM}, got {n}")
    norm = frobenius_norm(G)
    if norm == 0.0:
        return np.zeros(n, dtype=complex)
    # power-of-two scaling is exact and keeps the iteration away from over/underflow
    factor = 2.0 ** np.round(np.log2(norm))
    H = hessenberg(G / factor)
    scale = frobenius_norm(H)
    eig = np.zeros(n, dtype=complex)
    budget = QR_ITERATIONS_PER_EIGENVALUE * n
    hi = n - 1
    its = 0
    while hi >= 0:
        if hi == 0:
            eig[0] = H[0, 0]
            break
        lo = hi
        while lo > 0:
            s = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if abs(H[lo, lo - 1]) <= EPS * (s if s > 0.0 else scale):
                H[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eig[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if lo == hi - 1:
            # closed-form 2x2 block
            a, b, c, d = H[lo, lo], H[lo, hi], H[hi, lo], H[hi, hi]
            mu = _wilkinson_shift(a, b, c, d)
            eig[hi] = mu
            eig[lo] = a + d - mu
            hi -= 2
            its = 0
            continue
        budget -= 1
        if budget < 0:
            raise ConvergenceError("QR iteration did not converge within the iteration budget")
        its += 1
        if its % 10 == 0:
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1]) * np.exp(0.5j * its)
        else:
            mu = _wilkinson_shift(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        window = H[lo:hi + 1, lo:hi + 1]
        _qr_step(window, mu)
    return eig * factor


@dataclass(frozen=True)
class EigenSpectrum:
    """Clustered eigenvalues with multiplicities.

    ``clusters`` holds ``(value, multiplicity)`` pairs; each value is the mean
    of its raw members. ``raw`` keeps the unclustered eigenvalues so the
    spectrum can be regrouped with a coarser tolerance.
    """

    clusters: tuple
    cluster_tol: float
    raw: tuple = field(default=(), repr=False, compare=False)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.clusters], dtype=complex)

    @property
    def multiplicities(self) -> list[int]:
        return [m for _, m in self.clusters]

    @property
    def n(self) -> int:
        return sum(self.multiplicities)

    @property
    def is_distinct(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    def repeated(self) -> np.ndarray:
        """Cluster values repeated by multiplicity (length ``n``)."""
        return np.repeat(self.values, self.multiplicities)

    def min_gap(self) -> float:
        vals = self.values
        if len(vals) < 2:
            return float("inf")
        d = np.abs(vals[:, None] - vals[None, :])
        d[np.diag_indices(len(vals))] = np.inf
        return float(d.min())

    def recluster(self, tol: float) -> "EigenSpectrum":
        return cluster_eigenvalues(np.array(self.raw), tol)

    def __len__(self):
        return len(self.clusters)


def cluster_eigenvalues(raw, tol: float) -> EigenSpectrum:
    """Single-linkage clustering of ``raw`` with linkage threshold ``tol``."""
    raw = np.asarray(raw, dtype=complex)
    n = raw.shape[0]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(raw[i] - raw[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(raw[i])
    clusters = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    clusters.sort(key=lambda c: (round(c[0].real, 12), c[0].imag))
    return EigenSpectrum(tuple(clusters), float(tol), tuple(complex(x) for x in raw))


def default_cluster_tol(G) -> float:
    return 1e-8 * max(1.0, frobenius_norm(G))


def eigenvalues(G, cluster_tol: float | None = None) -> EigenSpectrum:
    """Clustered spectrum of ``G``.

    ``cluster_tol`` defaults to ``1e-8 * max(1, ||G||_F)``.
    """
    G = as_matrix(G, "G")
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(G)
    if cluster_tol < 0:
        raise ValueError("cluster_tol must be non-negative")
    return cluster_eigenvalues(raw_eigenvalues(G), cluster_tol)


# ---------------------------------------------------------------------------
# Eigenvectors


@dataclass(frozen=True)
class EigenPairs:
    """Eigenvalues (repeated by multiplicity) and unit eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray

    def residual(self, G) -> float:
        G = np.asarray(G, dtype=complex)
        R = G @ self.vectors - self.vectors * self.values[None, :]
        return float(np.linalg.norm(R, axis=0).max())


def eigenpairs(G, spectrum: EigenSpectrum | None = None, *, iterations: int = 3, seed: int = 0) -> EigenPairs:
    """Eigenvectors by inverse iteration, one block per eigenvalue cluster.

    A cluster of multiplicity ``m`` gets ``m`` orthonormal vectors from
    subspace inverse iteration. The cluster is accepted only if the Rayleigh
    block ``X^H G X`` is ``gamma * I`` to within tolerance; a Jordan-like
    cluster fails this and raises :class:`DefectiveMatrixError`.
    """
    G = as_matrix(G, "G")
    n = G.shape[0]
    if spectrum is None:
        spectrum = eigenvalues(G)
    normG = max(frobenius_norm(G), 1.0)
    tol = 1e-8 * normG
    rng = np.random.default_rng(seed)
    cols, vals = [], []
    for gamma, m in spectrum.clusters:
        if m == n:
            # one cluster fills the space: any basis will do, take the exact one
            X = np.eye(n, dtype=complex)
        else:
            shift = gamma + 1e-10 * normG * (1 + 1j) / np.sqrt(2)
            A = G - shift * np.eye(n)
            X = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
            X, _ = np.linalg.qr(X)
            for _ in range(iterations):
                X = _eliminate(A, X, None)
                X, _ = np.linalg.qr(X)
        # refine the representative from the block itself
        rayleigh = X.conj().T @ G @ X
        lam = np.trace(rayleigh) / m
        # a single-linkage cluster of m values may span (m - 1) * cluster_tol
        block_tol = max(tol, np.sqrt(m) * (m - 1) * spectrum.cluster_tol)
        if np.linalg.norm(rayleigh - lam * np.eye(m)) > block_tol or \
                np.linalg.norm(G @ X - X @ rayleigh) > tol:
            raise DefectiveMatrixError(
                f"eigenvalue {gamma:.6g} (multiplicity {m}) lacks {m} independent eigenvectors"
            )
        cols.append(X)
        vals.extend([gamma] * m)
    P = np.concatenate(cols, axis=1)
    try:
        inverse(P)
    except SingularMatrixError as exc:
        raise DefectiveMatrixError("eigenvector matrix is numerically singular") from exc
    return EigenPairs(np.array(vals, dtype=complex), P / np.linalg.norm(P, axis=0))


# ---------------------------------------------------------------------------
# Characteristic polynomial (independent cross-check)


def charpoly(G) -> np.ndarray:
    """Monic characteristic polynomial coefficients by Faddeev-LeVerrier.

    Returned highest degree first, ready for :func:`numpy.roots`.
    """
    G = as_matrix(G, "G")
    n = G.shape[0]
    coeffs = [1.0 + 0j]
    M = np.zeros_like(G)
    identity = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        M = G @ M + coeffs[-1] * identity
        coeffs.append(-np.trace(G @ M) / k)
    return np.array(coeffs)


def companion_eigenvalues(G) -> np.ndarray:
    """Roots of the characteristic polynomial via its companion matrix."""
    return np.roots(charpoly(G))
