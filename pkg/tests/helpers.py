import numpy as np
from scipy.optimize import linear_sum_assignment

ACCEPTANCE_LINES = []


def multiset_distance(a, b):
    """Largest gap under the optimal matching of two equal-size sets."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    i, j = linear_sum_assignment(cost)
    return float(cost[i, j].max())


def random_complex(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))


def random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_skew(rng, n, scale=1.0):
    A = scale * rng.standard_normal((n, n))
    return A - A.T


def fro(A):
    return float(np.linalg.norm(A, "fro"))
