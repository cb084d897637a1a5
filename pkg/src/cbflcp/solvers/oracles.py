"""Brute-force reference solvers that enumerate every active/complementary set."""
from itertools import combinations

import numpy as np

from ..errors import SingularSystem, TooManyConstraints
from ..numkit import solve_linear
from .base import SafeSolve, Status

MAX_ENUM = 12


def _subsets(m):
    for k in range(m + 1):
        yield from combinations(range(m), k)


def _tight_min_norm(A, b, S):
    """Min-norm ``x`` with ``A_S x = b_S``, restricted to ``span(A_S)``: ``x = A_S^T w``."""
    if not S:
        return np.zeros(A.shape[1]), np.zeros(0)
    idx = list(S)
    AS = A[idx]
    G = AS @ AS.T
    w = solve_linear(G, b[idx])
    x = AS.T @ w
    dw = solve_linear(G, b[idx] - AS @ x)
    x, w = x + AS.T @ dw, w + dw
    # reject numerically dependent subsets whose solve did not actually satisfy the tight rows
    if np.max(np.abs(AS @ x - b[idx])) > 1e-9 * (1.0 + np.max(np.abs(b[idx]))):
        raise SingularSystem("tight system not satisfied")
    return x, w


def oracle_qp_enumerate(problem, feas_tol=1e-9, dual_tol=1e-10):
    A, b = problem.A, problem.b
    m = A.shape[0]
    if m > MAX_ENUM:
        raise TooManyConstraints(f"{m} constraints exceed the enumeration bound {MAX_ENUM}")
    ftol = feas_tol * (1.0 + float(np.max(np.abs(b))))
    best = None
    any_feasible = False
    for S in _subsets(m):
        try:
            x, w = _tight_min_norm(A, b, S)
        except SingularSystem:
            continue
        if np.min(A @ x - b) < -ftol:
            continue
        any_feasible = True
        if w.size and np.min(w) < -dual_tol * (1.0 + np.max(np.abs(w))):
            continue
        if best is None or x @ x < best[0] @ best[0]:
            best = (x, w, S)
    if best is None:
        status = Status.DEGENERATE if any_feasible else Status.INFEASIBLE
        return SafeSolve(np.full(A.shape[1], np.nan), np.full(m, np.nan), (), status, 0)
    x, w, S = best
    lam = np.zeros(m)
    lam[list(S)] = w
    return SafeSolve(x, lam, tuple(S), Status.OPTIMAL, 0)


def oracle_lcp_enumerate(lcp, tol=1e-10):
    """Every complementary-pivot solution of the LCP: one candidate per support set."""
    M, q = lcp.M, lcp.q_vec
    m = lcp.m
    if m > MAX_ENUM:
        raise TooManyConstraints(f"{m} constraints exceed the enumeration bound {MAX_ENUM}")
    found = []
    for S in _subsets(m):
        lam = np.zeros(m)
        if S:
            idx = list(S)
            try:
                lam[idx] = solve_linear(M[np.ix_(idx, idx)], -q[idx])
            except SingularSystem:
                continue
        w = M @ lam + q
        if np.min(lam) >= -tol and np.min(w) >= -tol:
            found.append(lam)
    return found
