import math

import numpy as np
import pytest

from locdisc.blocks import sigma_dense
from locdisc.helstrom import collective_error
from locdisc.local import repeated_error_opt
from locdisc.qubit import make_pair
from locdisc.sdp import build_ppt_instance, default_tol, ppt_error, solve

cp = pytest.importorskip("cvxpy")


def dense_ppt_oracle(pair, n):
    """Generic conic solve over the full 2^N operator space, PT on every qubit subset."""
    dim = 2 ** n
    e = cp.Variable((dim, dim), symmetric=True)
    eye = np.eye(dim)
    cons = [e >> 0, eye - e >> 0]
    for mask in range(1, 2 ** (n - 1)):
        subset = [q for q in range(n) if mask >> q & 1]
        pt = e
        for q in subset:
            pt = cp.partial_transpose(pt, [2] * n, q)
        pt = (pt + pt.T) / 2
        cons += [pt >> 0, eye - pt >> 0]
    diff = sigma_dense(pair, 0, n) - sigma_dense(pair, 1, n)
    prob = cp.Problem(cp.Minimize(cp.trace(diff @ e)), cons)
    prob.solve(solver=cp.CVXOPT)
    assert prob.status == cp.OPTIMAL
    return 0.5 * (1 + prob.value)


def test_single_copy_equals_helstrom(fig1_pair):
    res = ppt_error(fig1_pair, 1, tol=1e-10)
    assert res.status == "converged"
    assert res.error == pytest.approx(0.217157287525381, abs=1e-9)


@pytest.mark.parametrize("seed", range(3))
def test_two_copies_match_generic_solver(seed):
    rng = np.random.default_rng(seed)
    pair = make_pair(*rng.uniform(0.2, 0.95, 2), rng.uniform(0.3, math.pi - 0.3))
    assert ppt_error(pair, 2).error == pytest.approx(dense_ppt_oracle(pair, 2), abs=1e-6)


def test_three_copies_match_generic_solver(fig1_pair):
    assert ppt_error(fig1_pair, 3).error == pytest.approx(dense_ppt_oracle(fig1_pair, 3),
                                                          abs=1e-6)


def test_identical_states_return_half():
    res = ppt_error(make_pair(0.5, 0.5, 0.0), 6)
    assert res.error == 0.5
    assert res.status == "converged"
    assert res.solution.value == 0.0


@pytest.mark.parametrize("n", [2, 5, 9])
def test_pure_states_match_collective(n):
    pair = make_pair(1.0, 1.0, 1.2)
    assert ppt_error(pair, n).error == pytest.approx(collective_error(pair, n), abs=1e-6)


def test_feasibility_certificate_and_monotone_history(fig1_pair):
    n = 8
    tol = default_tol(n)
    sol = ppt_error(fig1_pair, n).solution
    for block in sol.blocks:
        w = np.linalg.eigvalsh(block)
        assert w.min() >= -tol and w.max() <= 1 + tol
    inst = build_ppt_instance(fig1_pair, n)
    for tj, m in inst.block_maps.items():
        w = np.linalg.eigvalsh(inst.block(sol.params.values, tj))
        assert w.min() >= -1e-7 and w.max() <= 1 + 1e-7
    assert all(b <= a + 1e-12 for a, b in zip(sol.history, sol.history[1:]))
    assert sol.gap < tol


def test_n10_strictly_between_collective_and_repeated(fig1_pair):
    pe = ppt_error(fig1_pair, 10).error
    assert collective_error(fig1_pair, 10) < pe < repeated_error_opt(fig1_pair, 10)[0]


def test_solver_reports_iteration_cap(fig1_pair):
    sol = solve(build_ppt_instance(fig1_pair, 6), max_newton=3)
    assert sol.status == "max-iterations"
