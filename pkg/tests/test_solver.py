import logging

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leech.errors import NotSolvable
from leech.generators import solvable_instance
from leech.realization import LeechData, Realization, circle_points, evaluate_many
from leech.solver import (Branch, SolveOptions, build_F, inner_theta, partial_isometry,
                          solvability_check, solve)
from leech.spectral import build_symbol, factor_symbol
from leech.toeplitz import hankel_section

from conftest import random_unitary
from helpers import disc_points, op_norm, positive_instance

S2, S3 = np.sqrt(2), np.sqrt(3)
H = lambda X: np.conj(np.swapaxes(X, -1, -2))


def test_example_pipeline(ex6):
    sol = solve(ex6)
    assert sol.branch is Branch.STRICTLY_POSITIVE
    np.testing.assert_allclose(sol.Q, [[4 / 3]], atol=1e-12)
    np.testing.assert_allclose(sol.P3, [[0.75]], atol=1e-12)
    np.testing.assert_allclose(sol.Upsilon, [[1]], atol=1e-12)
    U = [[0, 0.5, S3 / 2], [1 / S2, 0, 0], [1 / S2, 0, 0]]
    np.testing.assert_allclose(sol.U, U, atol=1e-12)
    zs = circle_points(16)
    np.testing.assert_allclose(evaluate_many(sol.X, zs)[:, :, 0],
                               np.outer(zs, [1, 1]) / (2 * S2), atol=1e-12)
    np.testing.assert_allclose(evaluate_many(sol.Psi, zs)[:, :, 0],
                               np.outer(zs, [1, 1]) * S3 / (2 * S2), atol=1e-12)


def test_inner_theta_example():
    th = inner_theta([[0]], [[2 / S3]], [[4 / 3]])
    np.testing.assert_allclose(th.BTheta, [[S3 / 2]], atol=1e-14)
    np.testing.assert_allclose(th.DTheta, [[0]], atol=1e-14)


def test_inner_theta_no_state():
    th = inner_theta(np.zeros((0, 0)), np.zeros((2, 0)), np.zeros((0, 0)))
    np.testing.assert_allclose(th.DTheta, np.eye(2))
    assert th.BTheta.shape == (0, 2)


def test_inner_theta_identities(rng):
    data, _ = positive_instance(rng)
    sf = factor_symbol(build_symbol(data))
    th = inner_theta(data.A, sf.CPhi, sf.Q)
    B, D, Q = th.BTheta, th.DTheta, sf.Q
    assert np.abs(H(B) @ Q @ data.A + H(D) @ sf.CPhi).max() < 1e-10
    assert np.abs(H(B) @ Q @ B + H(D) @ D - np.eye(th.r)).max() < 1e-10
    T = evaluate_many(th.realization(data.A, sf.CPhi), circle_points(64))
    assert op_norm(T @ H(T) - np.eye(data.m)) < 1e-8


def test_build_F_example_and_random(ex6, rng):
    sol = solve(ex6)
    zs = circle_points(8)
    np.testing.assert_allclose(evaluate_many(sol.F, zs)[:, 0, 0], zs * S3 / 2, atol=1e-12)
    data, _ = positive_instance(rng)
    sym = build_symbol(data)
    sf = factor_symbol(sym)
    F = build_F(sf, inner_theta(data.A, sf.CPhi, sf.Q), data)
    zs = circle_points(64)
    Fv = evaluate_many(F, zs)
    assert op_norm(sym.evaluate_many(zs) - Fv @ H(Fv)) < 1e-8


def test_factorization_chain(rng):
    # F = Phi^* Theta on the circle
    data, _ = positive_instance(rng)
    sol = solve(data)
    zs = circle_points(64)
    Phi = evaluate_many(sol.factor.phi, zs)
    Th = evaluate_many(sol.theta.realization(data.A, sol.factor.CPhi), zs)
    assert op_norm(evaluate_many(sol.F, zs) - H(Phi) @ Th) < 1e-8


def test_solvability_examples():
    v = solvability_check([[0]], [[0.25]], [[0.75]])
    assert v.solvable and v.margin == pytest.approx(1.0)
    v = solvability_check(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, 0)))
    assert v.solvable and v.margin == np.inf
    assert not solvability_check([[2.0]], [[0.25]], [[0.75]]).solvable


def test_partial_isometry_equal_data(rng):
    DM = rng.standard_normal((2, 3))
    BM = rng.standard_normal((2, 3))
    Y = np.eye(2)
    U = partial_isometry(DM, BM, DM, BM, Y)
    T = DM.T @ DM + BM.T @ Y @ BM
    P = np.linalg.pinv(T) @ T
    np.testing.assert_allclose(U, P, atol=1e-10)


def test_partial_isometry_random(rng):
    data, _ = positive_instance(rng)
    sol = solve(data)
    U = sol.U
    assert np.linalg.norm(U @ H(U) @ U - U) < 1e-10
    n = data.n
    Ups = sol.Upsilon
    Lam = Realization(data.A, data.A @ Ups, data.C, data.C @ Ups)
    for z in disc_points(rng, 32):
        L = Lam(z)
        M = np.hstack([z * L, data.G(z)])
        N = np.hstack([L, data.K(z), sol.F(z)])
        assert np.abs(M @ U - N).max() < 1e-8


def test_K_equal_G_zero_branch(rng):
    G = Realization(*[np.asarray(x) for x in (
        [[0.3, 0.1], [0.0, -0.4]], [[1.0, 0.0], [0.5, 1.0]], [[1.0, 2.0]], [[1.0, 0.5]])])
    data = LeechData(G.A, G.B, G.B, G.C, G.D, G.D)
    sol = solve(data)
    assert sol.branch is Branch.R_IDENTICALLY_ZERO
    assert sol.F.shape[1] == 0
    assert sol.diagnostics["leech_residual"] < 1e-8
    assert sol.diagnostics["x_norm"] <= 1 + 1e-8


def test_zero_symbol_example(ex_zero_symbol):
    sol = solve(ex_zero_symbol)
    assert sol.branch is Branch.R_IDENTICALLY_ZERO
    np.testing.assert_allclose(sol.P2 - sol.P1, [[1]])
    zs = circle_points(8)
    np.testing.assert_allclose(evaluate_many(sol.X, zs)[:, :, 0], np.outer(zs, [1, 1]) / S2,
                               atol=1e-12)


def test_infeasible_raises(ex6):
    data = LeechData(ex6.A, ex6.B1, [[2.0]], ex6.C, ex6.D1, ex6.D2)
    with pytest.raises(NotSolvable) as info:
        solve(data)
    assert info.value.margin < 0


def test_nonminimal_warns_or_raises(caplog):
    A = np.diag([0.5, 0.2])
    data = LeechData(A, [[1, 0], [0, 0]], [[0.2], [0]], [[1, 0]], [[1, 0.5]], [[0]])
    with caplog.at_level(logging.WARNING, logger="leech"):
        sol = solve(data)
    assert "not minimal" in caplog.text
    assert sol.contract_ok
    assert sol.X.n == sol.data.n == 1
    with pytest.raises(ValueError):
        solve(data, SolveOptions(allow_nonminimal=False))


def test_random_instances_meet_contract(rng):
    for _ in range(10):
        data, _ = solvable_instance(rng)
        sol = solve(data)
        d = sol.diagnostics
        assert d["leech_residual"] < 1e-7 and d["psi_residual"] < 1e-7
        assert d["joint_norm"] <= 1 + 1e-7
        assert d["alpha_spectral_radius"] < 1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gauge_invariance(seed):
    rng = np.random.default_rng(seed)
    data, _ = positive_instance(rng)
    base = solve(data)
    V = random_unitary(rng, base.theta.r)
    rot = solve(data, theta_gauge=V)
    for name in ("A", "B", "C", "D"):
        assert np.abs(getattr(base.X, name) - getattr(rot.X, name)).max() < 1e-10
    zs = circle_points(32)
    Fv = evaluate_many(rot.F, zs)
    assert op_norm(Fv @ H(Fv) - evaluate_many(base.F, zs) @ H(evaluate_many(base.F, zs))) < 1e-8


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mcmillan_bound(seed):
    rng = np.random.default_rng(seed)
    data, _ = solvable_instance(rng)
    X = solve(data).X
    assert X.n == data.n
    if data.n:
        s = np.linalg.svd(hankel_section(X, 3 * data.n + 2).M, compute_uv=False)
        assert np.sum(s > 1e-8 * max(s[0], 1)) <= data.n
