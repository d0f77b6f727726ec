"""Contractive stable rational solutions of ``G X = K``.

The pipeline, for joint data ``[G K]`` with state matrix ``A``:

1. build the symbol ``R = G G^* - K K^*``;
2. if ``R`` is strictly positive on the circle, factor it (``Phi``), build
   the two-sided inner ``Theta`` and ``F = Phi^* Theta`` with
   ``P3 = Q^{-1}``; if ``R`` vanishes identically, ``F = 0`` and ``P3 = 0``;
3. test ``P3 + P2 - P1 >= 0``;
4. find the partial isometry ``U`` with ``[z Lambda  G] U = [Lambda  K  F]``
   and read ``X`` and ``Psi`` off its blocks.
"""
from dataclasses import dataclass, field
import enum
import logging

import numpy as np

from .errors import (DegenerateKernel, NoStabilizingSolution, NotSolvable,
                     SemidefiniteUnsupported)
from .linalg import fro, hermitian_part, min_hermitian_eig, pinv, psd_sqrt
from .realization import (DEFAULT_GRID, Realization, circle_points, ctrl_gramian,
                          evaluate_many, hinf_norm_grid, minimal_reduction, minimality_report,
                          obs_gramian)
from .spectral import build_symbol, outer_factor, riccati_residual, riccati_stabilizing

log = logging.getLogger(__name__)


class Branch(enum.Enum):
    STRICTLY_POSITIVE = "StrictlyPositive"
    R_IDENTICALLY_ZERO = "RIdenticallyZero"


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-9
    grid: int = DEFAULT_GRID
    max_iter: int = 50000
    riccati_tol: float = 1e-12
    allow_nonminimal: bool = True
    zero_tol: float = 1e-10


@dataclass(frozen=True, eq=False)
class ThetaFactor:
    """Input and feedthrough of ``Theta(z) = D_Theta + z C_Phi (I - zA)^{-1} B_Theta``."""

    BTheta: np.ndarray
    DTheta: np.ndarray

    @property
    def r(self):
        return self.DTheta.shape[1]

    def realization(self, A, CPhi):
        return Realization(A, self.BTheta, CPhi, self.DTheta)

    def rotated(self, V):
        """Same inner function up to the right unitary factor `V`."""
        return ThetaFactor(self.BTheta @ V, self.DTheta @ V)


def inner_theta(A, CPhi, Q, rtol=1e-9):
    """Complete ``[A; C_Phi]`` to a ``diag(Q, I)``-unitary system matrix.

    The columns of ``[B_Theta; D_Theta]`` span the null space of
    ``[A^* Q  C_Phi^*]`` and are orthonormal for the inner product
    weighted by ``diag(Q, I_r)``, so that

        B^* Q A + D^* C_Phi = 0   and   B^* Q B + D^* D = I_r.

    The basis is deterministic: right singular vectors belonging to the
    negligible singular values, in SVD order, then weighted Gram-Schmidt,
    then each column rotated so its largest entry is real and positive.
    """
    A = np.asarray(A, complex)
    CPhi = np.asarray(CPhi, complex)
    Q = np.asarray(Q, complex)
    n = A.shape[0]
    r = CPhi.shape[0]
    if n == 0:
        return ThetaFactor(np.zeros((0, r), complex), np.eye(r, dtype=complex))
    M = np.hstack([A.conj().T @ Q, CPhi.conj().T])
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > rtol * max(s[0], 1.0)))
    N = Vh[rank:].conj().T
    if N.shape[1] != r:
        raise DegenerateKernel(f"null space has dimension {N.shape[1]}, expected {r}")
    W = np.zeros((n + r, n + r), complex)
    W[:n, :n] = Q
    W[n:, n:] = np.eye(r)
    gram = hermitian_part(N.conj().T @ W @ N)
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise DegenerateKernel("null space is degenerate in the Q-weighted inner product")
    basis = np.linalg.solve(L, N.conj().T).conj().T
    # unimodular column scaling: largest entry of each column real positive
    lead = basis[np.argmax(np.abs(basis), axis=0), np.arange(r)]
    basis = basis * (np.abs(lead) / lead)
    return ThetaFactor(basis[:n], basis[n:])


def build_F(sf, theta, data):
    """``F = Phi^* Theta`` as ``D3 + z C (I - zA)^{-1} B3`` on the data's state."""
    Gamma = _gamma_of(data)
    D3 = sf.Phi0.conj().T @ theta.DTheta + Gamma.conj().T @ sf.Q @ theta.BTheta
    return Realization(data.A, theta.BTheta, data.C, D3)


def _gamma_of(data):
    return build_symbol(data).Gamma


@dataclass(frozen=True)
class Verdict:
    solvable: bool
    margin: float


def solvability_check(P1, P2, P3, tol=1e-9):
    """Smallest eigenvalue of ``P3 + P2 - P1`` and the resulting verdict."""
    margin = min_hermitian_eig(np.asarray(P3) + np.asarray(P2) - np.asarray(P1))
    return Verdict(margin >= -tol, margin)


def partial_isometry(DM, BM, DN, BN, Y, rcond=1e-11):
    """``U = (D_M^* D_M + B_M^* Y B_M)^+ (D_M^* D_N + B_M^* Y B_N)``.

    When ``M(l) M(z)^* = N(l) N(z)^*`` on the disc, ``U`` is a partial
    isometry with ``M(z) U = N(z)``. Singular values of the Gram matrix
    below ``rcond * s_max`` are treated as zero.
    """
    DM, BM, DN, BN, Y = (np.asarray(x, complex) for x in (DM, BM, DN, BN, Y))
    T = hermitian_part(DM.conj().T @ DM + BM.conj().T @ Y @ BM)
    V1 = DM.conj().T @ DN + BM.conj().T @ Y @ BN
    s_max = np.linalg.norm(T, 2) if T.size else 0.0
    return pinv(T, rcond * s_max) @ V1 if s_max > 0 else np.zeros(V1.shape, complex)


@dataclass(eq=False)
class LeechSolution:
    X: Realization
    Psi: Realization
    F: Realization
    U: np.ndarray
    Upsilon: np.ndarray
    Q: np.ndarray
    Y: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    P3: np.ndarray
    branch: Branch
    diagnostics: dict = field(default_factory=dict)
    theta: ThetaFactor = None
    factor: object = None
    symbol: object = None
    data: object = None

    @property
    def contract_ok(self):
        d = self.diagnostics
        return (d["leech_residual"] < 1e-7 and d["psi_residual"] < 1e-7
                and d["joint_norm"] <= 1 + 1e-7)


def _r_is_zero(sym, data, P1, P2, zero_tol):
    scale = 1 + fro(data.D1) ** 2 + fro(data.D2) ** 2 + fro(data.C) * (fro(P1) + fro(P2))
    return fro(sym.R0) + fro(sym.Gamma) < zero_tol * scale


def _circle_min_eig(sym, grid):
    vals = sym.evaluate_many(circle_points(grid))
    return float(np.min(np.linalg.eigvalsh(hermitian_part_batch(vals))))


def hermitian_part_batch(M):
    return (M + np.conj(np.swapaxes(M, -1, -2))) / 2


def solve(data, opts=None, theta_gauge=None):
    """Contractive stable rational solution of ``G X = K``.

    Parameters
    ----------
    data : LeechData
    opts : SolveOptions, optional
    theta_gauge : (r, r) unitary array, optional
        Right factor applied to ``(B_Theta, D_Theta)``. The extracted ``X``
        does not depend on it; ``Psi`` and ``F`` change accordingly.

    Returns
    -------
    LeechSolution
        Its ``data`` field holds the realization actually used, which is a
        minimal reduction of the input when the input is not minimal.

    Raises
    ------
    NotSolvable
        ``T_G T_G^* - T_K T_K^*`` is not nonnegative.
    SemidefiniteUnsupported
        ``R`` is nonnegative but singular somewhere on the circle without
        vanishing identically.
    """
    opts = opts or SolveOptions()
    minimality = minimality_report(data)
    if not minimality.minimal:
        if not opts.allow_nonminimal:
            raise ValueError("realization of [G K] is not minimal")
        log.warning("realization of [G K] is not minimal (obs rank %d, ctrl rank %d, n %d); "
                    "reducing", minimality.obs_rank, minimality.ctrl_rank, data.n)
        data = minimal_reduction(data)

    n, m = data.n, data.m
    P1 = ctrl_gramian(data.A, data.B1)
    P2 = ctrl_gramian(data.A, data.B2)
    sym = build_symbol(data)
    diag = {"minimality": minimality, "state_dimension": n}
    sf = theta = None

    if _r_is_zero(sym, data, P1, P2, opts.zero_tol):
        branch = Branch.R_IDENTICALLY_ZERO
        Q = np.zeros((n, n), complex)
        P3 = np.zeros((n, n), complex)
        F = Realization(data.A, np.zeros((n, 0)), data.C, np.zeros((m, 0)))
        diag["riccati_residual"] = 0.0
    else:
        branch = Branch.STRICTLY_POSITIVE
        try:
            Q = riccati_stabilizing(sym, opts.riccati_tol, opts.max_iter)
        except NoStabilizingSolution as exc:
            lo = _circle_min_eig(sym, opts.grid)
            diag["circle_min_eig"] = lo
            if lo < -opts.tol * (1 + fro(sym.R0)):
                raise NotSolvable(f"R is negative on the unit circle (min eigenvalue {lo:.6g})",
                                  margin=lo, diagnostics=diag) from exc
            raise SemidefiniteUnsupported(
                "R is nonnegative but not strictly positive on the unit circle "
                f"and not identically zero ({exc})", diagnostics=diag) from exc
        sf = outer_factor(sym, Q)
        theta = inner_theta(data.A, sf.CPhi, Q)
        if theta_gauge is not None:
            theta = theta.rotated(np.asarray(theta_gauge, complex))
        F = build_F(sf, theta, data)
        P3 = np.linalg.inv(Q) if n else Q
        P3 = hermitian_part(P3)
        diag["riccati_residual"] = riccati_residual(sym, Q) if n else 0.0

    verdict = solvability_check(P1, P2, P3, opts.tol)
    diag["solvability_margin"] = verdict.margin
    if not verdict.solvable:
        raise NotSolvable(f"P3 + P2 - P1 has eigenvalue {verdict.margin:.6g} < 0",
                          margin=verdict.margin, diagnostics=diag)

    Upsilon = psd_sqrt(P3 + P2 - P1, tol=max(opts.tol, 1e-12))
    Y = obs_gramian(data.A, data.C)
    r = F.shape[1]
    DM = np.hstack([np.zeros((m, n)), data.D1])
    BM = np.hstack([Upsilon, data.B1])
    DN = np.hstack([data.C @ Upsilon, data.D2, F.D])
    BN = np.hstack([data.A @ Upsilon, data.B2, F.B])
    U = partial_isometry(DM, BM, DN, BN, Y)

    p, q = data.p, data.q
    alpha, beta1, beta2 = U[:n, :n], U[:n, n:n + q], U[:n, n + q:]
    gamma, delta1, delta2 = U[n:, :n], U[n:, n:n + q], U[n:, n + q:]
    X = Realization(alpha, beta1, gamma, delta1)
    Psi = Realization(alpha, beta2, gamma, delta2)
    assert Psi.shape == (p, r)

    sol = LeechSolution(X, Psi, F, U, Upsilon, Q, Y, P1, P2, P3, branch, diag, theta, sf, sym,
                       data)
    diag.update(contract_diagnostics(data, X, Psi, F, opts.grid))
    diag["partial_isometry_residual"] = fro(U @ U.conj().T @ U - U)
    diag["alpha_spectral_radius"] = X.spectral_radius
    if not sol.contract_ok:
        log.warning("solution contract not met: %s", {k: diag[k] for k in
                    ("leech_residual", "psi_residual", "joint_norm")})
    return sol


def contract_diagnostics(data, X, Psi, F, grid=DEFAULT_GRID):
    """Circle-grid residuals of ``G X = K``, ``G Psi = F`` and the norm of ``[X Psi]``."""
    zs = circle_points(grid)
    Gv = evaluate_many(data.G, zs)
    res_x = np.linalg.norm(Gv @ evaluate_many(X, zs) - evaluate_many(data.K, zs), 2, axis=(1, 2))
    if F.shape[1]:
        res_psi = np.linalg.norm(Gv @ evaluate_many(Psi, zs) - evaluate_many(F, zs), 2,
                                 axis=(1, 2))
        psi_res = float(res_psi.max())
    else:
        psi_res = 0.0
    joint = X.hstack(Psi) if Psi.shape[1] else X
    norm = hinf_norm_grid(joint, grid)
    return {"leech_residual": float(res_x.max()), "psi_residual": psi_res,
            "joint_norm": norm, "contraction_margin": 1 - norm,
            "x_norm": hinf_norm_grid(X, grid)}
