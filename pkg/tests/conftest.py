import itertools

import numpy as np
import pytest

from elasticc3 import BinaryMatrix


def random_binary(rng, n, k, density=0.3):
    """Dense 0/1 array with at least one 1."""
    a = (rng.random((n, k)) < density).astype(np.int8)
    if not a.any():
        a[rng.integers(n), rng.integers(k)] = 1
    return a


def random_matrix(rng, n, k, density=0.3):
    return BinaryMatrix.from_dense(random_binary(rng, n, k, density))


def dense_mi(P):
    """Mutual information of a dense joint by a plain double loop."""
    P = np.asarray(P, dtype=float)
    pr, pc = P.sum(axis=1), P.sum(axis=0)
    total = 0.0
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            if P[i, j] > 0:
                total += P[i, j] * np.log(P[i, j] / (pr[i] * pc[j]))
    return total


def dense_loss(A, r, c, N, K):
    """Co-clustering loss computed from scratch on a dense array."""
    P = np.asarray(A, dtype=float)
    P = P / P.sum()
    Q = np.zeros((N, K))
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            Q[r[i], c[j]] += P[i, j]
    return dense_mi(P) - dense_mi(Q)


def brute_force_minimum(A, N, K):
    """Exhaustive minimum of the loss over all labelings (first label pinned to 0)."""
    n, k = A.shape
    rows = [(0,) + t for t in itertools.product(range(N), repeat=n - 1)]
    cols = [(0,) + t for t in itertools.product(range(K), repeat=k - 1)]
    P = A / A.sum()
    mi = dense_mi(P)
    best = np.inf
    for r in rows:
        R = np.zeros((N, n))
        R[list(r), np.arange(n)] = 1
        PR = R @ P
        for c in cols:
            C = np.zeros((k, K))
            C[np.arange(k), list(c)] = 1
            best = min(best, mi - dense_mi(PR @ C))
    return best


BLOCK = np.array([[1, 1, 0, 0],
                  [1, 1, 0, 0],
                  [0, 0, 1, 1],
                  [0, 0, 1, 1]], dtype=np.int8)


@pytest.fixture
def block():
    return BinaryMatrix.from_dense(BLOCK)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one pass/fail line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    def log(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return log


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
