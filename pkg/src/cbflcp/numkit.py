"""Small dense linear algebra used by the solvers.

Matrices and vectors are plain float64 numpy arrays. The routines here are
written for the tiny systems this package deals with (m, n of a few dozen at
most) and favour determinism over speed.
"""
import numpy as np

from .errors import DegenerateRow, DimensionMismatch, SingularSystem

EPS_RANK = 1e-12


def as_matrix(A, name="A"):
    A = np.array(A, dtype=float, copy=True)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    A.setflags(write=False)
    return A


def as_vector(v, name="v", length=None):
    v = np.array(v, dtype=float, copy=True).reshape(-1)
    if length is not None and v.shape[0] != length:
        raise DimensionMismatch(f"{name} has length {v.shape[0]}, expected {length}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    v.setflags(write=False)
    return v


def row_pinv(row, eps=EPS_RANK, index=0):
    """Moore-Penrose inverse of a single row: ``row.T / ||row||**2``."""
    row = np.asarray(row, dtype=float).reshape(-1)
    sq = float(row @ row)
    if np.sqrt(sq) <= eps:
        raise DegenerateRow(index, np.sqrt(sq))
    return row / sq


def g_operator(A, eps=EPS_RANK):
    """Stack the row-wise pseudo-inverses of ``A`` (m x n) as columns of an n x m matrix."""
    A = np.asarray(A, dtype=float)
    H = np.empty((A.shape[1], A.shape[0]))
    for i in range(A.shape[0]):
        H[:, i] = row_pinv(A[i], eps, index=i)
    return H


def lu_factor(M, eps=EPS_RANK):
    """Partial-pivot LU. Returns (LU, perm) with L unit-lower stored below the diagonal."""
    LU = np.array(M, dtype=float, copy=True)
    n = LU.shape[0]
    if LU.ndim != 2 or LU.shape[1] != n:
        raise DimensionMismatch(f"expected a square matrix, got shape {LU.shape}")
    perm = np.arange(n)
    scale = max(1.0, float(np.max(np.abs(LU)))) if n else 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        if abs(LU[p, k]) <= eps * scale:
            raise SingularSystem(f"pivot {k} below tolerance ({abs(LU[p, k]):.3e})")
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm


def lu_solve(factors, rhs):
    LU, perm = factors
    n = LU.shape[0]
    y = np.array(rhs, dtype=float)[perm]
    for i in range(1, n):
        y[i] -= LU[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - LU[i, i + 1:] @ y[i + 1:]) / LU[i, i]
    return y


def solve_linear(M, rhs, eps=EPS_RANK):
    """Solve ``M y = rhs`` for square ``M``; raises SingularSystem on a tiny pivot."""
    M = np.asarray(M, dtype=float)
    rhs = np.asarray(rhs, dtype=float).reshape(-1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] != rhs.shape[0]:
        raise DimensionMismatch(f"cannot solve {M.shape} system with rhs of length {rhs.shape[0]}")
    factors = lu_factor(M, eps)
    y = lu_solve(factors, rhs)
    # one step of iterative refinement keeps residuals near machine precision
    r = rhs - M @ y
    return y + lu_solve(factors, r)


def solve_triangular(R, rhs, lower=False):
    """Back/forward substitution with a triangular ``R``; no pivoting, no rank checks."""
    R = np.asarray(R, dtype=float)
    y = np.array(rhs, dtype=float)
    n = R.shape[0]
    order = range(n) if lower else range(n - 1, -1, -1)
    for i in order:
        acc = R[i, :i] @ y[:i] if lower else R[i, i + 1:] @ y[i + 1:]
        y[i] = (y[i] - acc) / R[i, i]
    return y


def qr_mgs(C):
    """Thin QR of an n x k matrix by modified Gram-Schmidt with one reorthogonalization pass."""
    C = np.asarray(C, dtype=float)
    n, k = C.shape
    Q = np.zeros((n, k))
    R = np.zeros((k, k))
    for j in range(k):
        v = C[:, j].copy()
        for _ in range(2):
            for i in range(j):
                c = Q[:, i] @ v
                R[i, j] += c
                v -= c * Q[:, i]
        R[j, j] = np.linalg.norm(v)
        if R[j, j] == 0.0:
            raise SingularSystem(f"column {j} is linearly dependent")
        Q[:, j] = v / R[j, j]
    return Q, R


def sym_eigvals(S, tol=1e-15, max_sweeps=64):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending."""
    a = [list(map(float, r)) for r in np.asarray(S, dtype=float)]
    n = len(a)
    for _ in range(max_sweeps):
        off = sum(a[i][j] * a[i][j] for i in range(n) for j in range(i + 1, n))
        diag = sum(a[i][i] * a[i][i] for i in range(n))
        if off <= tol * tol * max(diag, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + (theta * theta + 1.0) ** 0.5)
                c = 1.0 / (t * t + 1.0) ** 0.5
                s = t * c
                for k in range(n):
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = c * akp - s * akq
                    a[k][q] = s * akp + c * akq
                for k in range(n):
                    apk, aqk = a[p][k], a[q][k]
                    a[p][k] = c * apk - s * aqk
                    a[q][k] = s * apk + c * aqk
    return np.sort(np.array([a[i][i] for i in range(n)]))


def symmetrized_form(A, eps=EPS_RANK):
    """``D^1/2 A A^T D^1/2`` with ``D = diag(1/||a_i||^2)``: the symmetric matrix similar to ``A G(A)``."""
    A = np.asarray(A, dtype=float)
    norms = np.linalg.norm(A, axis=1)
    for i, nrm in enumerate(norms):
        if nrm <= eps:
            raise DegenerateRow(i, nrm)
    U = A / norms[:, None]
    S = U @ U.T
    return 0.5 * (S + S.T)


def similar_psd_check(A, tol=1e-9, eps=EPS_RANK):
    """True iff ``A G(A)`` is similar to a PSD matrix up to ``-tol`` in its smallest eigenvalue."""
    return bool(sym_eigvals(symmetrized_form(A, eps))[0] >= -tol)
