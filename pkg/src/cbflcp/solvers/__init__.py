from .active_set import qp_min_norm
from .base import LcpProblem, LcpResult, LcpStatus, SafeSolve, Status, kkt_residuals
from .lemke import lc_solve, lcp_lemke
from .oracles import oracle_lcp_enumerate, oracle_qp_enumerate
from .single import Case, single_constraint_closed_form


def lcp_from_problem(problem):
    """The raw (unscaled) LCP ``M = A G(A)``, ``q = -b`` of the complementarity form."""
    from ..numkit import g_operator

    return LcpProblem(problem.A @ g_operator(problem.A), -problem.b)


__all__ = [
    "Case",
    "LcpProblem",
    "LcpResult",
    "LcpStatus",
    "SafeSolve",
    "Status",
    "kkt_residuals",
    "lc_solve",
    "lcp_from_problem",
    "lcp_lemke",
    "oracle_lcp_enumerate",
    "oracle_qp_enumerate",
    "qp_min_norm",
    "single_constraint_closed_form",
]
