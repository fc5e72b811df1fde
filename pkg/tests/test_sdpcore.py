import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycert.sdpcore import (DUAL_INFEASIBLE, OPTIMAL, PRIMAL_INFEASIBLE, SdpError, SdpProblem, psd_check,
                              sdp_solve, verify_ray)

TOL = 1e-8


def random_feasible(seed, sizes=(3, 2), m=4, nfree=1):
    """Constraints built around a strictly feasible X0; a negative definite cost keeps it bounded."""
    rng = np.random.default_rng(seed)
    X0 = []
    for s in sizes:
        R = rng.normal(size=(s, s))
        X0.append(R @ R.T + np.eye(s))
    w0 = rng.normal(size=nfree)
    p = SdpProblem(list(sizes), nfree=nfree)
    cost = []
    for s in sizes:
        R = rng.normal(size=(s, s))
        cost.append(-(R @ R.T + 0.5 * np.eye(s)))
    p.cost = cost
    p.cost_free = np.zeros(nfree)
    for _ in range(m):
        entries = {}
        for k, s in enumerate(sizes):
            for r in range(s):
                for c in range(r, s):
                    if rng.random() < 0.6:
                        entries[(k, r, c)] = float(rng.integers(-3, 4))
        free = {j: float(rng.integers(-2, 3)) for j in range(nfree)}
        # the free column must not leave the objective unbounded: cost_free = 0 keeps it neutral
        rhs = 0.0
        for (k, r, c), v in entries.items():
            rhs += v * X0[k][r, c]
        rhs += sum(v * w0[j] for j, v in free.items())
        p.add_constraint(entries, rhs, free)
    return p


def constraint_residual(p, X, w):
    return max(abs(sum(float(np.sum(A * Xk)) for A, Xk in zip(c.blocks, X)) + float(c.free @ w) - c.rhs)
               for c in p.constraints)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_optimal_certificates(seed):
    p = random_feasible(seed)
    r = sdp_solve(p)
    if r.status != OPTIMAL:
        pytest.skip(f"solver returned {r.status}")
    scale = 1 + max(abs(c.rhs) for c in p.constraints)
    assert constraint_residual(p, r.X, r.w) <= TOL * scale
    assert all(psd_check(X, TOL * scale) for X in r.X)
    assert all(psd_check(S, TOL * scale) for S in r.S)
    assert r.gap <= TOL
    dual = sum(yi * c.rhs for yi, c in zip(r.y, p.constraints))
    assert abs(dual - r.objective) <= 1e-6 * (1 + abs(dual))


def test_random_problems_mostly_optimal():
    statuses = [sdp_solve(random_feasible(s)).status for s in range(20)]
    assert statuses.count(OPTIMAL) >= 18


def test_simple_optimum():
    # maximize X01 subject to X00 = X11 = 1: optimum 1 at the all-ones matrix
    p = SdpProblem([2])
    p.cost = [np.array([[0, 0.5], [0.5, 0]])]
    p.add_constraint({(0, 0, 0): 1.0}, 1.0)
    p.add_constraint({(0, 1, 1): 1.0}, 1.0)
    r = sdp_solve(p)
    assert r.status == OPTIMAL and abs(r.objective - 1) < 1e-7
    assert np.allclose(r.X[0], np.ones((2, 2)), atol=1e-6)


def test_free_variable():
    # maximize -w0 - X00 subject to X00 - w0 = 2: optimum at X00 = 0, w0 = -2
    p = SdpProblem([1], nfree=1, cost=[np.array([[-1.0]])], cost_free=np.array([-1.0]))
    p.add_constraint({(0, 0, 0): 1.0}, 2.0, {0: -1.0})
    r = sdp_solve(p)
    assert r.status == OPTIMAL and np.allclose(r.w, [-2.0], atol=1e-6) and abs(r.objective - 2) < 1e-6


def test_infeasible_ray_checked_independently():
    p = SdpProblem([1], sense="feasibility")
    p.add_constraint({(0, 0, 0): 1.0}, -1.0)
    r = sdp_solve(p)
    assert r.status == PRIMAL_INFEASIBLE
    y = r.ray / sum(yi * c.rhs for yi, c in zip(r.ray, p.constraints))
    Z = -sum(yi * c.blocks[0] for yi, c in zip(y, p.constraints))
    assert np.linalg.eigvalsh(Z).min() >= -1e-7
    assert verify_ray(p, r.ray)
    assert not verify_ray(p, -r.ray)


def test_inconsistent_linear_constraints():
    p = SdpProblem([2])
    p.add_constraint({(0, 0, 0): 1.0}, 1.0)
    p.add_constraint({(0, 0, 0): 2.0}, 3.0)
    r = sdp_solve(p)
    assert r.status == PRIMAL_INFEASIBLE and verify_ray(p, r.ray)


def test_unbounded():
    p = SdpProblem([1], cost=[np.array([[1.0]])])
    r = sdp_solve(p)
    assert r.status == DUAL_INFEASIBLE


def test_deterministic():
    p = random_feasible(7)
    a, b = sdp_solve(p), sdp_solve(random_feasible(7))
    assert a.status == b.status
    assert all(np.array_equal(x, y) for x, y in zip(a.X, b.X))
    assert np.array_equal(a.y, b.y) and a.objective == b.objective


def test_validation_and_psd_check():
    bad = SdpProblem([2], cost=[np.array([[0.0, 1.0], [0.0, 0.0]])])
    bad.add_constraint({(0, 0, 0): 1.0}, 1.0)
    with pytest.raises(SdpError):
        sdp_solve(bad)
    assert psd_check(np.eye(3)).ok and not psd_check(-np.eye(2)).ok
    assert abs(psd_check(np.diag([2.0, -0.5])).min_eig + 0.5) < 1e-12


def test_dump_lists_entries():
    p = SdpProblem([2])
    p.add_constraint({(0, 0, 1): 2.0}, 1.0)
    text = p.dump()
    assert "1 1 1 2 1.0" in text and "b 1 1.0" in text
