"""Closed-loop simulation of the velocity-controlled arm and the random equivalence fuzzer."""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constraints import GeneralFormProblem, KappaMap, Kind, MarginSpec, assemble
from .errors import DegenerateRow, SafeControlError, SingularJacobian, SingularSystem, SolverFailure
from .numkit import EPS_RANK, solve_linear
from .planar_robot import DiskObstacle, RobotModel, end_effector, end_effector_jacobian
from .solvers import (
    Status,
    kkt_residuals,
    lc_solve,
    oracle_qp_enumerate,
    qp_min_norm,
)

log = logging.getLogger(__name__)


class Controller(str, Enum):
    """Which solution drives the arm. Both are always evaluated; ``Both`` applies the CBF one."""

    CBF = "CBF"
    LC = "LC"
    BOTH = "Both"


class Termination(str, Enum):
    GOAL_REACHED = "GoalReached"
    MAX_STEPS = "MaxSteps"
    SOLVER_FAILURE = "SolverFailure"


@dataclass(frozen=True)
class SimConfig:
    model: RobotModel
    obstacles: tuple
    q0: tuple
    goal: tuple
    k_p: float = 0.05
    tau: float = 0.005
    delta: tuple = (0.01,)
    kappa_gain: float = None
    max_steps: int = 20000
    goal_tol: float = 1e-3
    controller: Controller = Controller.CBF

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if not self.goal_tol > 0:
            raise ValueError("goal_tol must be positive")
        if not self.k_p > 0:
            raise ValueError("k_p must be positive")
        if len(self.q0) != self.model.n_links:
            raise ValueError(f"q0 has {len(self.q0)} entries for {self.model.n_links} links")
        if not self.obstacles:
            raise ValueError("at least one obstacle is required")
        object.__setattr__(self, "q0", tuple(float(v) for v in self.q0))
        object.__setattr__(self, "goal", tuple(float(v) for v in self.goal))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        object.__setattr__(self, "delta", tuple(np.atleast_1d(np.asarray(self.delta, dtype=float))))
        if self.kappa_gain is None:
            object.__setattr__(self, "kappa_gain", 1.0 / self.tau)
        if not self.kappa_gain > 0:
            raise ValueError("kappa_gain must be positive")
        object.__setattr__(self, "controller", Controller(self.controller))

    @property
    def n_constraints(self):
        return self.model.n_links * len(self.obstacles)


@dataclass
class StepRecord:
    k: int
    q: np.ndarray
    u_des: np.ndarray
    u_cbf: np.ndarray
    u_lc: np.ndarray
    u: np.ndarray
    h: np.ndarray
    hprime: float
    e: float
    problem: GeneralFormProblem = field(default=None, repr=False)
    sol_cbf: object = field(default=None, repr=False)
    sol_lc: object = field(default=None, repr=False)


@dataclass
class TrajectoryLog:
    tau: float
    records: list = field(default_factory=list)
    termination: Termination = None
    final_q: np.ndarray = None
    message: str = ""

    def __len__(self):
        return len(self.records)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])


@dataclass(frozen=True)
class RunMetrics:
    e_min: float
    e_mean: float
    e_max: float
    hprime_min: float
    steps: int
    goal_error: float
    termination: str


def desired_velocity(model, q, goal, k_p, eps=EPS_RANK):
    """Unit-speed end-effector attraction mapped to joints by the Jacobian pseudo-inverse."""
    err = np.asarray(goal, dtype=float) - end_effector(model, q)
    dist = float(np.linalg.norm(err))
    if dist == 0.0:
        return np.zeros(model.n_links)
    v_des = k_p * err / dist
    J = end_effector_jacobian(model, q)
    try:
        y = solve_linear(J @ J.T, v_des, eps)
    except SingularSystem as exc:
        raise SingularJacobian(f"end-effector Jacobian lost rank at q={np.asarray(q)}") from exc
    return J.T @ y


def _problems(config, q, u_des):
    delta = np.asarray(config.delta)
    lc = assemble(config.model, q, config.obstacles, u_des, config.tau, MarginSpec(delta, Kind.LC))
    cbf = assemble(
        config.model, q, config.obstacles, u_des, config.tau,
        MarginSpec(delta, Kind.CBF), KappaMap(config.kappa_gain),
    )
    return lc, cbf


def step(config, q_k, k=0):
    """Advance one zero-order-hold interval. Both controllers are evaluated at ``q_k``."""
    q_k = np.asarray(q_k, dtype=float)
    if not np.all(np.isfinite(q_k)):
        raise ValueError("state is not finite")
    u_des = desired_velocity(config.model, q_k, config.goal, config.k_p)
    lc_prob, cbf_prob = _problems(config, q_k, u_des)
    sol_cbf = qp_min_norm(cbf_prob)
    sol_lc = lc_solve(lc_prob)
    if not (sol_cbf.ok and sol_lc.ok):
        raise SolverFailure(f"step {k}: CBF {sol_cbf.status.value}, LC {sol_lc.status.value}")
    u_cbf = u_des + sol_cbf.x_star
    u_lc = u_des + sol_lc.x_star
    u = u_lc if config.controller is Controller.LC else u_cbf
    h = cbf_prob.h
    rec = StepRecord(
        k=k,
        q=q_k.copy(),
        u_des=u_des,
        u_cbf=u_cbf,
        u_lc=u_lc,
        u=u,
        h=h,
        hprime=float(np.min(h - cbf_prob.delta)),
        e=float(np.linalg.norm(u_lc - u_cbf)),
        problem=cbf_prob,
        sol_cbf=sol_cbf,
        sol_lc=sol_lc,
    )
    return q_k + config.tau * u, rec


def run(config):
    traj = TrajectoryLog(tau=config.tau)
    q = np.asarray(config.q0, dtype=float)
    goal = np.asarray(config.goal)
    traj.termination = Termination.MAX_STEPS
    for k in range(config.max_steps):
        if np.linalg.norm(goal - end_effector(config.model, q)) <= config.goal_tol:
            traj.termination = Termination.GOAL_REACHED
            break
        try:
            q, rec = step(config, q, k)
        except (SafeControlError, ArithmeticError) as exc:
            log.warning("run stopped at step %d: %s", k, exc)
            traj.termination = Termination.SOLVER_FAILURE
            traj.message = str(exc)
            break
        traj.records.append(rec)
    else:
        if np.linalg.norm(goal - end_effector(config.model, q)) <= config.goal_tol:
            traj.termination = Termination.GOAL_REACHED
    traj.final_q = q
    return traj, metrics(config, traj)


def metrics(config, traj):
    e = traj.column("e")
    hp = traj.column("hprime")
    q_end = traj.final_q if traj.final_q is not None else np.asarray(config.q0)
    goal_error = float(np.linalg.norm(np.asarray(config.goal) - end_effector(config.model, q_end)))
    if len(traj) == 0:
        nan = float("nan")
        return RunMetrics(nan, nan, nan, nan, 0, goal_error, traj.termination.value)
    return RunMetrics(
        e_min=float(e.min()),
        e_mean=float(e.mean()),
        e_max=float(e.max()),
        hprime_min=float(hp.min()),
        steps=len(traj),
        goal_error=goal_error,
        termination=traj.termination.value,
    )


# ---------------------------------------------------------------------------
# randomized equivalence harness


def random_problem(rng, m_max, n_max, min_row_norm=0.1, b_mode="mixed", duplicate_rows=False,
                   zero_row_prob=0.0):
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(1, n_max + 1))
    A = rng.uniform(-1.0, 1.0, (m, n))
    for i in range(m):
        if zero_row_prob and rng.random() < zero_row_prob:
            A[i] = 0.0
            continue
        while np.linalg.norm(A[i]) < min_row_norm:
            A[i] = rng.uniform(-1.0, 1.0, n)
    if duplicate_rows and m >= 2:
        A[1] = A[0]
    if b_mode == "nonpositive":
        b = -rng.uniform(0.0, 1.0, m)
    else:
        # shifted up so that a fair share of the overdetermined instances are infeasible
        b = rng.uniform(-1.0, 1.0, m) + rng.choice([-0.5, 0.0, 0.5])
    if duplicate_rows and m >= 2:
        b[1] = b[0]
    return A, b


@dataclass
class FuzzReport:
    seed: int
    instances: int = 0
    optimal: int = 0
    infeasible: int = 0
    max_error: float = 0.0
    max_oracle_error: float = 0.0
    oracle_checked: int = 0
    status_disagreements: int = 0
    oracle_disagreements: int = 0
    max_kkt: dict = field(default_factory=lambda: {
        "stationarity": 0.0, "complementarity": 0.0, "dual": 0.0, "primal": 0.0})
    max_lambda_rescale_error: float = 0.0
    failures: list = field(default_factory=list)
    generator_violations: int = 0
    tol: float = 1e-8

    @property
    def success(self):
        return (
            self.generator_violations == 0
            and self.status_disagreements == 0
            and self.oracle_disagreements == 0
            and self.max_error <= self.tol
            and self.max_oracle_error <= self.tol
            and max(self.max_kkt.values()) <= self.tol
        )

    def as_dict(self):
        d = {k: v for k, v in self.__dict__.items()}
        d["success"] = self.success
        d["max_kkt"] = dict(self.max_kkt)
        return d


def check_instance(A, b, report, oracle_m_max=6):
    """Run both solvers (and the oracle when small enough) on one instance and fold results in."""
    report.instances += 1
    try:
        problem = GeneralFormProblem(A, b)
    except DegenerateRow as exc:
        report.generator_violations += 1
        report.failures.append({"instance": report.instances - 1, "reason": str(exc)})
        return
    qp = qp_min_norm(problem)
    lc = lc_solve(problem)
    idx = report.instances - 1
    if qp.status is not lc.status:
        report.status_disagreements += 1
        report.failures.append({"instance": idx, "reason": f"status {qp.status.value} vs {lc.status.value}"})
        return
    if problem.m <= oracle_m_max:
        oracle = oracle_qp_enumerate(problem)
        report.oracle_checked += 1
        if oracle.status is not qp.status:
            report.oracle_disagreements += 1
            report.failures.append({"instance": idx, "reason": f"oracle {oracle.status.value}"})
        elif qp.ok:
            for sol in (qp, lc):
                err = np.linalg.norm(oracle.x_star - sol.x_star) / (1.0 + np.linalg.norm(oracle.x_star))
                report.max_oracle_error = max(report.max_oracle_error, float(err))
    if not qp.ok:
        report.infeasible += 1
        return
    report.optimal += 1
    err = float(np.linalg.norm(lc.x_star - qp.x_star) / (1.0 + np.linalg.norm(qp.x_star)))
    if err > report.tol:
        report.failures.append({"instance": idx, "reason": f"x mismatch {err:.3e}"})
    report.max_error = max(report.max_error, err)
    for sol in (qp, lc):
        for key, val in kkt_residuals(problem, sol).items():
            report.max_kkt[key] = max(report.max_kkt[key], val)
    # lambda_lcp = |a_i|^2 lambda_qp holds wherever the multipliers are unique
    active = list(qp.active_set)
    if not active or np.linalg.matrix_rank(problem.A[active]) == len(active):
        sq = np.sum(problem.A ** 2, axis=1)
        resc = np.max(np.abs(lc.lcp_lambda - sq * qp.lambda_star)) / (1.0 + np.max(np.abs(lc.lcp_lambda)))
        report.max_lambda_rescale_error = max(report.max_lambda_rescale_error, float(resc))


def fuzz_equivalence(seed, n_instances, m_max=8, n_max=10, tol=1e-8, oracle_m_max=6, **gen_kw):
    if m_max > 12:
        raise ValueError("m_max is bounded by the enumeration oracle (12)")
    rng = np.random.default_rng(seed)
    report = FuzzReport(seed=seed, tol=tol)
    for _ in range(n_instances):
        A, b = random_problem(rng, m_max, n_max, **gen_kw)
        check_instance(A, b, report, oracle_m_max)
    return report
