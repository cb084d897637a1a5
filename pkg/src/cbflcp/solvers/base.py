from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from ..errors import DimensionMismatch
from ..numkit import as_matrix, as_vector


class Status(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    DEGENERATE = "Degenerate"


class LcpStatus(str, Enum):
    SOLVED = "Solved"
    RAY_TERMINATION = "RayTermination"


@dataclass(frozen=True)
class SafeSolve:
    """Solver output in shifted coordinates ``x = u - u_des``.

    ``lambda_star`` always holds the multipliers of the projection problem,
    so that ``x_star = A.T @ lambda_star`` at an optimum. The complementarity
    solver additionally reports its own multipliers in ``lcp_lambda``
    (``x_star = G(A) @ lcp_lambda``).
    """

    x_star: np.ndarray
    lambda_star: np.ndarray
    active_set: tuple
    status: Status
    iterations: int = 0
    lcp_lambda: Optional[np.ndarray] = None

    @property
    def ok(self):
        return self.status is Status.OPTIMAL


@dataclass(frozen=True)
class LcpProblem:
    """Find ``lam >= 0`` with ``M lam + q_vec >= 0`` and ``lam . (M lam + q_vec) = 0``."""

    M: np.ndarray
    q_vec: np.ndarray

    def __post_init__(self):
        M = as_matrix(self.M, "M")
        if M.shape[0] != M.shape[1]:
            raise DimensionMismatch(f"LCP matrix must be square, got {M.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "q_vec", as_vector(self.q_vec, "q_vec", M.shape[0]))

    @property
    def m(self):
        return self.M.shape[0]


class LcpResult(NamedTuple):
    lam: np.ndarray
    status: LcpStatus
    iterations: int = 0
    basis: tuple = ()


def kkt_residuals(problem, sol):
    """Largest violation of each KKT condition for ``min 1/2|x|^2 s.t. A x >= b``."""
    A, b = problem.A, problem.b
    x, lam = sol.x_star, sol.lambda_star
    slack = A @ x - b
    return {
        "stationarity": float(np.linalg.norm(x - A.T @ lam)),
        "complementarity": float(np.max(np.abs(lam * slack))),
        "dual": float(max(0.0, -np.min(lam))),
        "primal": float(max(0.0, -np.min(slack))),
    }
