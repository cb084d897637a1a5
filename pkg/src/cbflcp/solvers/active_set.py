"""Minimum-norm projection onto ``{x : A x >= b}`` by a dual active-set method.

Starts at the unconstrained minimizer ``x = 0`` and repeatedly adds the most
violated constraint, dropping active constraints whose multipliers would turn
negative (Goldfarb-Idnani with identity Hessian). If a violated constraint
lies in the span of the active normals and no active multiplier can be
reduced, the constraint system has no solution.

The active normals are kept as a thin QR factorization ``A_S^T = Q R`` so
that conditioning enters linearly rather than squared through ``A_S A_S^T``.
"""
import numpy as np

from ..errors import IterationLimit
from ..numkit import qr_mgs, solve_triangular
from .base import SafeSolve, Status


def _factor(A, active):
    if not active:
        return None
    return qr_mgs(A[active].T)


def _null_step(A, qr, p):
    """Split row ``p`` into its part orthogonal to the active rows and its active coefficients."""
    n_p = A[p]
    if qr is None:
        return n_p.copy(), np.zeros(0)
    Q, R = qr
    c = Q.T @ n_p
    return n_p - Q @ c, solve_triangular(R, c)


def _tight_point(A, b, active, qr):
    """Min-norm x with the active rows tight: ``x = Q R^-T b_S``, multipliers ``R^-1 R^-T b_S``."""
    if not active:
        return np.zeros(A.shape[1]), np.zeros(0)
    Q, R = qr
    bs = b[active]
    y = solve_triangular(R.T, bs, lower=True)
    x = Q @ y
    y = y + solve_triangular(R.T, bs - A[active] @ x, lower=True)
    return Q @ y, solve_triangular(R, y)


def qp_min_norm(problem, max_iter=None, feas_tol=1e-12, dep_tol=1e-10):
    A, b = problem.A, problem.b
    m, n = A.shape
    max_iter = 100 * m if max_iter is None else max_iter
    b_scale = 1.0 + float(np.max(np.abs(b)))

    x = np.zeros(n)
    active = []
    u = np.zeros(0)
    qr = None
    it = 0
    while True:
        s = A @ x - b
        p = int(np.argmin(s))
        if s[p] >= -feas_tol * b_scale:
            break
        u_p = 0.0
        while True:
            it += 1
            if it > max_iter:
                raise IterationLimit(f"active-set QP exceeded {max_iter} iterations")
            z, r = _null_step(A, qr, p)
            pos = np.flatnonzero(r > 0)
            if pos.size:
                ratios = u[pos] / r[pos]
                k = int(pos[np.argmin(ratios)])
                t1 = float(np.min(ratios))
            else:
                k, t1 = -1, np.inf
            if np.linalg.norm(z) <= dep_tol * np.linalg.norm(A[p]):
                if k < 0:
                    lam = np.zeros(m)
                    lam[active] = u
                    return SafeSolve(x, lam, tuple(sorted(active)), Status.INFEASIBLE, it)
                # partial step: shift weight from constraint k onto p, then drop k
                u = u - t1 * r
                u_p += t1
            else:
                t2 = -(A[p] @ x - b[p]) / (z @ A[p])
                t = min(t1, t2)
                x = x + t * z
                u = u - t * r
                u_p += t
                if t2 <= t1:
                    active.append(p)
                    u = np.append(u, u_p)
                    qr = _factor(A, active)
                    break
            del active[k]
            u = np.delete(u, k)
            qr = _factor(A, active)

    x, w = _tight_point(A, b, active, qr)
    lam = np.zeros(m)
    lam[active] = w
    return SafeSolve(x, lam, tuple(sorted(active)), Status.OPTIMAL, it)
