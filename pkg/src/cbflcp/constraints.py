"""Assembly of the shared general-form problem ``A x >= b`` with ``x = u - u_des``.

Both safety formulations reduce to the same data. The complementarity form
uses ``b = (delta - h) / tau - A u_des``; the sampled-data barrier form uses
``b = gain * (delta - h) - A u_des``. With ``gain = 1/tau`` the two coincide
bit for bit because both scale ``delta - h`` by the same float.

The safe set is never materialized: a configuration is safe iff every
distance ``h_i`` is nonnegative (see :func:`in_safe_set`).
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateRow, DimensionMismatch
from .numkit import EPS_RANK, as_matrix, as_vector
from .planar_robot import contact_pairs


class Kind(str, Enum):
    LC = "LC"
    CBF = "CBF"


@dataclass(frozen=True)
class MarginSpec:
    delta: np.ndarray
    kind: Kind = Kind.CBF

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.delta, dtype=float))
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("margins must be finite and nonnegative")
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "kind", Kind(self.kind))

    def expanded(self, m):
        if self.delta.size == 1:
            return np.full(m, self.delta[0])
        if self.delta.size != m:
            raise DimensionMismatch(f"{self.delta.size} margins for {m} constraints")
        return self.delta.copy()


@dataclass(frozen=True)
class KappaMap:
    """Linear class-kappa function ``alpha(x) = gain * x``."""

    gain: float

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError(f"class-kappa gain must be positive, got {self.gain}")

    def __call__(self, x):
        return self.gain * x


@dataclass(frozen=True)
class GeneralFormProblem:
    A: np.ndarray
    b: np.ndarray
    tau: float = float("nan")
    u_des: np.ndarray = None
    h: np.ndarray = None
    delta: np.ndarray = None
    pairs: tuple = field(default=(), repr=False)

    def __post_init__(self):
        A = as_matrix(self.A)
        b = as_vector(self.b, "b", A.shape[0])
        norms = np.linalg.norm(A, axis=1)
        for i, nrm in enumerate(norms):
            if nrm <= EPS_RANK:
                raise DegenerateRow(i, nrm)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]


def general_form_b(A, h, delta, u_des, tau, kind, kappa=None):
    slack = delta - h
    if Kind(kind) is Kind.LC:
        scaled = (1.0 / tau) * slack
    else:
        if kappa is None:
            raise ValueError("the CBF form needs a class-kappa map")
        scaled = kappa(slack)
    return scaled - A @ u_des


def assemble(model, q, obstacles, u_des, tau, margins, kappa=None):
    """Build the general-form problem for the current state."""
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")
    u_des = as_vector(u_des, "u_des", model.n_links)
    pairs = contact_pairs(model, q, obstacles)
    if not pairs:
        raise DimensionMismatch("no link/obstacle pairs: need at least one obstacle")
    A = np.array([p.jac_row for p in pairs])
    for i, row in enumerate(A):
        nrm = float(np.linalg.norm(row))
        if nrm <= EPS_RANK:
            raise DegenerateRow(i, nrm)
    h = np.array([p.h for p in pairs])
    delta = margins.expanded(len(pairs))
    b = general_form_b(A, h, delta, u_des, tau, margins.kind, kappa)
    return GeneralFormProblem(A=A, b=b, tau=float(tau), u_des=u_des, h=h, delta=delta, pairs=tuple(pairs))


def feasibility_margin(problem, x):
    """``A x - b``; all entries >= 0 means ``x`` is admissible."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != problem.n:
        raise DimensionMismatch(f"x has length {x.shape[0]}, expected {problem.n}")
    return problem.A @ x - problem.b


def in_safe_set(h, tol=0.0):
    return bool(np.all(np.asarray(h) >= -tol))
