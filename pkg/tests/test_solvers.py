import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cbflcp.constraints import GeneralFormProblem
from cbflcp.errors import TooManyConstraints
from cbflcp.numkit import g_operator
from cbflcp.solvers import (
    Case,
    LcpProblem,
    LcpStatus,
    Status,
    kkt_residuals,
    lc_solve,
    lcp_from_problem,
    lcp_lemke,
    oracle_lcp_enumerate,
    oracle_qp_enumerate,
    qp_min_norm,
    single_constraint_closed_form,
)

from conftest import random_rows


def problem(A, b):
    return GeneralFormProblem(np.array(A, float), np.array(b, float))


def assert_kkt(P, sol, tol=1e-8):
    # near-antiparallel rows give multipliers ~1e6; residuals are judged relative to the solution size
    scale = (1 + np.max(np.abs(sol.lambda_star))) * (1 + np.linalg.norm(sol.x_star))
    r = kkt_residuals(P, sol)
    assert r["stationarity"] <= tol * scale
    assert r["complementarity"] <= tol * scale
    assert np.min(sol.lambda_star) >= -1e-10 * scale
    assert r["primal"] <= tol * scale


# --- projection QP -----------------------------------------------------------

def test_qp_origin_feasible():
    s = qp_min_norm(problem([[1, 0]], [-1]))
    assert s.status is Status.OPTIMAL
    np.testing.assert_array_equal(s.x_star, [0, 0])
    np.testing.assert_array_equal(s.lambda_star, [0])
    assert s.active_set == ()


def test_qp_halfplane_projection():
    s = qp_min_norm(problem([[1, 1]], [4]))
    np.testing.assert_allclose(s.x_star, [2, 2], atol=1e-14)
    np.testing.assert_allclose(s.lambda_star, [2], atol=1e-14)


def test_qp_box_corner():
    s = qp_min_norm(problem([[1, 0], [0, 1]], [1, 1]))
    np.testing.assert_allclose(s.x_star, [1, 1], atol=1e-14)
    np.testing.assert_allclose(s.lambda_star, [1, 1], atol=1e-14)
    assert s.active_set == (0, 1)


def test_qp_infeasible_1d():
    P = problem([[1], [-1]], [1, 1])
    assert qp_min_norm(P).status is Status.INFEASIBLE
    assert lc_solve(P).status is Status.INFEASIBLE
    assert oracle_qp_enumerate(P).status is Status.INFEASIBLE


def test_qp_drops_constraint():
    # adding the second constraint makes the first one's multiplier go to zero
    P = problem([[1, 0], [1, 1]], [1, 4])
    s = qp_min_norm(P)
    np.testing.assert_allclose(s.x_star, [2, 2], atol=1e-13)
    assert s.active_set == (1,)
    assert_kkt(P, s)


# --- Lemke -------------------------------------------------------------------

def test_lemke_trivial():
    res = lcp_lemke(LcpProblem([[1.0, 2.0], [3.0, 4.0]], [0.5, 0.0]))
    assert res.status is LcpStatus.SOLVED
    np.testing.assert_array_equal(res.lam, [0, 0])


def test_lemke_scalar():
    res = lcp_lemke(LcpProblem([[1.0]], [-2.0]))
    np.testing.assert_allclose(res.lam, [2.0])


def test_lemke_2x2():
    M, q = np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([-1.0, -1.0])
    res = lcp_lemke(LcpProblem(M, q))
    # all-active system 2a + b = 1, a + 2b = 1
    np.testing.assert_allclose(res.lam, [1 / 3, 1 / 3], atol=1e-15)
    w = M @ res.lam + q
    assert np.all(w >= -1e-12) and np.all(res.lam >= 0)
    assert np.max(np.abs(res.lam * w)) <= 1e-12


def test_lemke_ray_termination_on_infeasible():
    # PSD matrix with no feasible point: lam1 - lam2 >= 1 and lam2 - lam1 >= 1
    res = lcp_lemke(LcpProblem([[1.0, -1.0], [-1.0, 1.0]], [-1.0, -1.0]))
    assert res.status is LcpStatus.RAY_TERMINATION


def test_lemke_degenerate_ties():
    # duplicated rows make the ratio test tie; the lexicographic rule must still finish
    M = np.ones((3, 3))
    res = lcp_lemke(LcpProblem(M, [-1.0, -1.0, -1.0]))
    assert res.status is LcpStatus.SOLVED
    w = M @ res.lam - 1.0
    assert np.all(res.lam >= -1e-12) and np.all(w >= -1e-12)
    assert np.max(np.abs(res.lam * w)) <= 1e-12


def test_lemke_random_psd(rng):
    for _ in range(300):
        m = rng.integers(1, 9)
        B = rng.normal(size=(m, rng.integers(1, 11)))
        M, q = B @ B.T, rng.normal(size=m)
        res = lcp_lemke(LcpProblem(M, q))
        if res.status is LcpStatus.SOLVED:
            w = M @ res.lam + q
            assert np.min(res.lam) >= 0 and np.min(w) >= -1e-9
            assert np.max(res.lam * w) <= 1e-9
        else:
            assert oracle_lcp_enumerate(LcpProblem(M, q)) == []


# --- complementarity solve -----------------------------------------------------

def test_lc_interior_case():
    s = lc_solve(problem([[1, 2], [-1, 0.5]], [-0.1, -2]))
    np.testing.assert_array_equal(s.x_star, [0, 0])
    np.testing.assert_array_equal(s.lcp_lambda, [0, 0])


def test_lc_single_halfplane():
    s = lc_solve(problem([[1, 1]], [4]))
    np.testing.assert_allclose(s.x_star, [2, 2], atol=1e-14)
    # lcp multiplier is |a|^2 times the projection multiplier
    np.testing.assert_allclose(s.lcp_lambda, [4.0], atol=1e-14)
    np.testing.assert_allclose(s.lambda_star, [2.0], atol=1e-14)


def test_lc_matches_qp_and_oracle(rng):
    n_opt = 0
    for _ in range(300):
        m, n = rng.integers(1, 7), rng.integers(1, 7)
        P = GeneralFormProblem(random_rows(rng, m, n), rng.uniform(-1, 1, m) + 0.3)
        qp, lc, orc = qp_min_norm(P), lc_solve(P), oracle_qp_enumerate(P)
        assert qp.status is lc.status is orc.status
        if qp.ok:
            n_opt += 1
            np.testing.assert_allclose(lc.x_star, qp.x_star, atol=1e-8 * (1 + np.linalg.norm(qp.x_star)))
            np.testing.assert_allclose(orc.x_star, qp.x_star, atol=1e-9 * (1 + np.linalg.norm(qp.x_star)))
            assert_kkt(P, qp)
            assert_kkt(P, lc)
    assert n_opt > 100


# --- properties --------------------------------------------------------------

@st.composite
def instances(draw, m_max=8, n_max=10):
    m = draw(st.integers(1, m_max))
    n = draw(st.integers(1, n_max))
    # entries on a 1/16 grid: exact duplicates and exact (anti)parallels are reachable,
    # rows parallel to within round-off are not
    A = draw(arrays(np.float64, (m, n), elements=st.integers(-16, 16).map(lambda k: k / 16)))
    assume(np.all(np.linalg.norm(A, axis=1) >= 0.1))
    b = draw(arrays(np.float64, m, elements=st.floats(-1.5, 1.5)))
    return GeneralFormProblem(A, b)


@settings(max_examples=300, deadline=None)
@given(instances())
def test_theorem_equivalence_property(P):
    qp, lc = qp_min_norm(P), lc_solve(P)
    assert qp.status is lc.status
    if qp.ok:
        assert np.linalg.norm(lc.x_star - qp.x_star) <= 1e-8 * (1 + np.linalg.norm(qp.x_star))


@settings(max_examples=200, deadline=None)
@given(instances())
def test_row_space_membership(P):
    s = qp_min_norm(P)
    assume(s.ok)
    # residual of x after projection onto the row space of A
    coef, *_ = np.linalg.lstsq(P.A.T, s.x_star, rcond=None)
    assert np.linalg.norm(P.A.T @ coef - s.x_star) <= 1e-9 * (1 + np.linalg.norm(s.x_star))


@settings(max_examples=100, deadline=None)
@given(instances())
def test_zero_feasible_shortcut(P):
    P = GeneralFormProblem(P.A, -np.abs(P.b))
    for s in (qp_min_norm(P), lc_solve(P)):
        assert np.array_equal(s.x_star, np.zeros(P.n))


@settings(max_examples=150, deadline=None)
@given(instances(m_max=6, n_max=6))
def test_lcp_solutions_lie_in_feasible_set(P):
    H = g_operator(P.A)
    for lam in oracle_lcp_enumerate(lcp_from_problem(P)):
        assert np.all(P.A @ (H @ lam) >= P.b - 1e-9)


@settings(max_examples=150, deadline=None)
@given(instances(m_max=6, n_max=6))
def test_multiplier_rescaling(P):
    qp, lc = qp_min_norm(P), lc_solve(P)
    assume(qp.ok and np.linalg.matrix_rank(P.A) == P.m)  # unique multipliers
    sq = np.sum(P.A ** 2, axis=1)
    np.testing.assert_allclose(lc.lcp_lambda, sq * qp.lambda_star, atol=1e-8 * (1 + np.max(lc.lcp_lambda)))


# --- oracles ----------------------------------------------------------------

def test_oracle_bound():
    with pytest.raises(TooManyConstraints):
        oracle_qp_enumerate(GeneralFormProblem(np.ones((13, 2)), np.zeros(13)))
    with pytest.raises(TooManyConstraints):
        oracle_lcp_enumerate(LcpProblem(np.eye(13), np.zeros(13)))


def test_lcp_enumerate_examples():
    sols = oracle_lcp_enumerate(LcpProblem([[1.0, 0.0], [0.0, 2.0]], [0.0, 1.0]))
    assert any(np.array_equal(s, [0, 0]) for s in sols)
    sols = oracle_lcp_enumerate(LcpProblem([[1.0]], [-2.0]))
    assert len(sols) == 1
    np.testing.assert_allclose(sols[0], [2.0])


def test_duplicated_rows_unique_x():
    A = np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 1.0]])
    P = GeneralFormProblem(A, [1.0, 1.0, -3.0])
    H = g_operator(A)
    lams = oracle_lcp_enumerate(lcp_from_problem(P))
    assert len(lams) >= 2
    xs = np.array([H @ lam for lam in lams])
    np.testing.assert_allclose(xs, np.tile(xs[0], (len(xs), 1)), atol=1e-12)
    np.testing.assert_allclose(qp_min_norm(P).x_star, xs[0], atol=1e-12)
    np.testing.assert_allclose(lc_solve(P).x_star, xs[0], atol=1e-12)


def test_oracle_single_constraint_matches_closed_form(rng):
    for _ in range(100):
        a = random_rows(rng, 1, 3)[0]
        h, adot, tau, delta = rng.uniform(0, 0.2), rng.normal(), 0.005, 0.01
        b = np.array([(delta - h) / tau - adot])
        lam, _ = single_constraint_closed_form(h, adot, tau, delta)
        orc = oracle_qp_enumerate(GeneralFormProblem(a[None, :], b))
        np.testing.assert_allclose(orc.x_star, a / (a @ a) * lam, atol=1e-10)


# --- single constraint closed form ------------------------------------------------

@pytest.mark.parametrize("h, adot, tau, delta, lam, case", [
    (0.5, 1.0, 0.05, 0.01, 0.0, Case.INACTIVE),
    (0.06, -1.0, 0.05, 0.01, 0.0, Case.BOUNDARY),
    (0.01, -1.0, 0.05, 0.02, 1.2, Case.ACTIVE),
])
def test_closed_form_cases(h, adot, tau, delta, lam, case):
    got, label = single_constraint_closed_form(h, adot, tau, delta)
    assert label is case
    assert got == pytest.approx(lam, abs=1e-12)
    assert got >= 0
