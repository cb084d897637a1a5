"""Lemke's complementary pivoting and the complementarity-form safety solver."""
import numpy as np

from ..errors import IterationLimit, PivotBreakdown, SingularSystem
from ..numkit import EPS_RANK, g_operator, solve_linear, symmetrized_form
from .base import LcpProblem, LcpResult, LcpStatus, SafeSolve, Status


def _lexmin_row(T, rows, d, cols, tol):
    """Among ``rows``, keep those minimizing ``T[i, col] / d[i]`` column by column."""
    cand = np.asarray(rows)
    for c in cols:
        ratios = T[cand, c] / d[cand]
        best = ratios.min()
        cand = cand[ratios <= best + tol * (1.0 + abs(best))]
        if cand.size == 1:
            return int(cand[0])
    raise PivotBreakdown("lexicographic ratio test left a tie")


def lcp_lemke(lcp, max_iter=None, pivot_tol=1e-12, tie_tol=1e-12):
    """Solve ``0 <= lam  _|_  M lam + q >= 0`` with covering vector of ones.

    Ties in the ratio test are broken lexicographically on the rows of the
    current basis inverse, which rules out cycling. On a ray the method stops
    with ``RayTermination``; for a positive semidefinite ``M`` that certifies
    the LCP has no feasible point.
    """
    M, q = lcp.M, lcp.q_vec
    m = lcp.m
    max_iter = 200 * m if max_iter is None else max_iter
    if np.all(q >= 0):
        return LcpResult(np.zeros(m), LcpStatus.SOLVED, 0, tuple(range(m)))

    # columns: w_0..w_{m-1}, z_0..z_{m-1}, z0 (artificial), rhs
    Z0, RHS = 2 * m, 2 * m + 1
    T = np.zeros((m, 2 * m + 2))
    T[:, :m] = np.eye(m)
    T[:, m:2 * m] = -M
    T[:, Z0] = -1.0
    T[:, RHS] = q
    basis = list(range(m))
    binv_cols = list(range(m))

    def pivot(r, c):
        T[r] /= T[r, c]
        for i in range(m):
            if i != r and T[i, c] != 0.0:
                T[i] -= T[i, c] * T[r]
        leaving = basis[r]
        basis[r] = c
        return leaving

    # the first pivot is on a negative column, so flip the sign for the ratio rule
    qmin = q.min()
    rows = np.flatnonzero(q <= qmin + tie_tol * (1.0 + abs(qmin)))
    r = _lexmin_row(T, rows, np.ones(m), [RHS] + binv_cols, tie_tol) if rows.size > 1 else int(rows[0])
    leaving = pivot(r, Z0)

    it = 1
    while True:
        if it > max_iter:
            raise IterationLimit(f"Lemke exceeded {max_iter} pivots")
        entering = leaving + m if leaving < m else leaving - m
        d = T[:, entering]
        rows = np.flatnonzero(d > pivot_tol)
        if rows.size == 0:
            return LcpResult(_extract(T, basis, m, RHS), LcpStatus.RAY_TERMINATION, it, tuple(basis))
        # prefer the artificial variable leaving whenever it ties for the minimum ratio
        ratios = T[rows, RHS] / d[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tie_tol * (1.0 + abs(best))]
        z0_row = [i for i in ties if basis[i] == Z0]
        if z0_row:
            r = int(z0_row[0])
        elif ties.size == 1:
            r = int(ties[0])
        else:
            r = _lexmin_row(T, ties, d, binv_cols, tie_tol)
        leaving = pivot(r, entering)
        it += 1
        if leaving == Z0:
            break

    lam = _extract(T, basis, m, RHS)
    z_basic = sorted(c - m for c in basis if m <= c < 2 * m)
    if z_basic:
        # re-solve the final principal system for full accuracy
        try:
            S = np.array(z_basic)
            lam_s = solve_linear(M[np.ix_(S, S)], -q[S])
            refined = np.zeros(m)
            refined[S] = lam_s
            lam = refined
        except SingularSystem:
            pass
    return LcpResult(lam, LcpStatus.SOLVED, it, tuple(basis))


def _extract(T, basis, m, rhs_col):
    lam = np.zeros(m)
    for i, c in enumerate(basis):
        if m <= c < 2 * m:
            lam[c - m] = T[i, rhs_col]
    return lam


def lc_solve(problem, eps=EPS_RANK, **lemke_kw):
    """Safe input through the complementarity form: ``x = G(A) lam`` with lam from an LCP.

    The LCP ``0 <= lam _|_ A G(A) lam - b >= 0`` is diagonally rescaled to the
    symmetric PSD problem ``0 <= mu _|_ U U^T mu - D^1/2 b >= 0`` where ``U``
    holds the unit rows of ``A``; then ``lam = D^-1/2 mu``.
    """
    A, b = problem.A, problem.b
    H = g_operator(A, eps)
    norms = np.linalg.norm(A, axis=1)
    Msym = symmetrized_form(A, eps)
    lcp = LcpProblem(Msym, -b / norms)
    res = lcp_lemke(lcp, **lemke_kw)
    mu = np.maximum(res.lam, 0.0)
    lam_lcp = norms * mu
    if res.status is LcpStatus.RAY_TERMINATION:
        return SafeSolve(H @ lam_lcp, mu / norms, (), Status.INFEASIBLE, res.iterations, lam_lcp)
    active = tuple(int(i) for i in np.flatnonzero(mu > 0))
    if not active:
        return SafeSolve(np.zeros(A.shape[1]), np.zeros_like(mu), (), Status.OPTIMAL, res.iterations, lam_lcp)
    x = H @ lam_lcp
    # one refinement of the tight complementarity rows, carried out in x-space
    S = list(active)
    resid = b[S] / norms[S] - (A[S] / norms[S, None]) @ x
    try:
        dmu = solve_linear(Msym[np.ix_(S, S)], resid)
    except SingularSystem:
        dmu = np.zeros(len(S))
    x = x + H[:, S] @ (norms[S] * dmu)
    mu = mu.copy()
    mu[S] += dmu
    lam_lcp = norms * mu
    return SafeSolve(x, mu / norms, active, Status.OPTIMAL, res.iterations, lam_lcp)
