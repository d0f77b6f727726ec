"""The Hermitian symbol ``R = G G^* - K K^*`` and its outer spectral factor.

``R`` is carried in two-sided form::

    R(z) = z C (I - zA)^{-1} Gamma + R0 + Gamma^* (zI - A^*)^{-1} C^*

When ``R`` is strictly positive on the unit circle, the Riccati equation

    Q = A^* Q A + (C - Gamma^* Q A)^* (R0 - Gamma^* Q Gamma)^{-1} (C - Gamma^* Q A)

has a unique stabilizing solution, and from it an invertible outer factor
``Phi`` with ``Phi^* Phi = R`` follows in closed form.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NoStabilizingSolution, NotHermitian, NotStabilizing, UnstableA
from .linalg import fro, hermitian_part, min_hermitian_eig, psd_sqrt, spectral_radius
from .realization import STAB_EPS, Realization, _mat, ctrl_gramian, evaluate_many, stein


@dataclass(frozen=True, eq=False)
class SymbolR:
    """Two-sided realization ``(A, C, Gamma, R0)`` of a Hermitian symbol."""

    A: np.ndarray
    C: np.ndarray
    Gamma: np.ndarray
    R0: np.ndarray

    def __post_init__(self):
        R0 = _mat(self.R0)
        m = R0.shape[0]
        if R0.shape != (m, m):
            raise ValueError("R0 must be square")
        A = _mat(self.A)
        n = A.shape[0]
        if fro(R0 - R0.conj().T) > 1e-9 * (1 + fro(R0)):
            raise NotHermitian("R0 is not Hermitian")
        object.__setattr__(self, "A", _mat(A, (n, n)))
        object.__setattr__(self, "C", _mat(self.C, (m, n)))
        object.__setattr__(self, "Gamma", _mat(self.Gamma, (n, m)))
        object.__setattr__(self, "R0", hermitian_part(R0))
        if n and spectral_radius(self.A) >= 1 - STAB_EPS:
            raise UnstableA("state matrix of the symbol is not stable")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.R0.shape[0]

    @property
    def causal(self):
        """The analytic half ``z C (I - zA)^{-1} Gamma`` as a realization."""
        return Realization(self.A, self.Gamma, self.C, np.zeros((self.m, self.m)))

    def coefficient(self, j):
        """Fourier coefficient ``R_j`` (``R_{-j} = R_j^*``)."""
        if j == 0:
            return self.R0.copy()
        k = abs(j)
        Rj = self.C @ np.linalg.matrix_power(self.A, k - 1) @ self.Gamma if self.n else \
            np.zeros((self.m, self.m), complex)
        return Rj if j > 0 else Rj.conj().T

    def evaluate_many(self, zs):
        """Values of ``R`` at points off the spectrum of ``A`` and ``1/A^*``."""
        zs = np.asarray(zs, dtype=complex).ravel()
        H = evaluate_many(self.causal, zs)
        out = H + self.R0[None]
        if self.n:
            M = zs[:, None, None] * np.eye(self.n)[None] - self.A.conj().T[None]
            rhs = np.broadcast_to(self.C.conj().T, (zs.size, self.n, self.m))
            out += self.Gamma.conj().T[None] @ np.linalg.solve(M, rhs)
        return out

    def __call__(self, z):
        return self.evaluate_many([z])[0]


def build_symbol(data):
    """Two-sided realization of ``R = G G^* - K K^*`` from the joint data."""
    P1 = ctrl_gramian(data.A, data.B1)
    P2 = ctrl_gramian(data.A, data.B2)
    dP = P1 - P2
    R0 = data.D1 @ data.D1.conj().T - data.D2 @ data.D2.conj().T + data.C @ dP @ data.C.conj().T
    Gamma = (data.B1 @ data.D1.conj().T - data.B2 @ data.D2.conj().T
             + data.A @ dP @ data.C.conj().T)
    return SymbolR(data.A, data.C, Gamma, hermitian_part(R0))


def _riccati_terms(sym, Q):
    S = hermitian_part(sym.R0 - sym.Gamma.conj().T @ Q @ sym.Gamma)
    L = sym.C - sym.Gamma.conj().T @ Q @ sym.A
    return S, L


def riccati_map(sym, Q):
    """Right-hand side of the Riccati equation at ``Q``."""
    S, L = _riccati_terms(sym, Q)
    return hermitian_part(sym.A.conj().T @ Q @ sym.A + L.conj().T @ np.linalg.solve(S, L))


def riccati_residual(sym, Q):
    return fro(Q - riccati_map(sym, Q))


def closed_loop(sym, Q):
    """``A^x = A - Gamma (R0 - Gamma^* Q Gamma)^{-1} (C - Gamma^* Q A)``."""
    S, L = _riccati_terms(sym, Q)
    return sym.A - sym.Gamma @ np.linalg.solve(S, L)


def riccati_iterates(sym, max_iter=50000, tol=1e-12):
    """Yield the fixed-point iterates ``Q_1, Q_2, ...`` started from ``Q_0 = 0``.

    Each iterate equals the N-section Toeplitz formula ``W_N^* T_{R,N}^{-1} W_N``,
    so the sequence is nondecreasing. Raises :class:`NoStabilizingSolution`
    as soon as ``R0 - Gamma^* Q_k Gamma`` loses positive definiteness.
    """
    n = sym.n
    Q = np.zeros((n, n), complex)
    floor = tol * (1 + fro(sym.R0))
    for k in range(max_iter):
        S, L = _riccati_terms(sym, Q)
        lo = min_hermitian_eig(S)
        if lo < floor:
            raise NoStabilizingSolution(
                f"R0 - Gamma^* Q Gamma lost positivity at iteration {k} "
                f"(min eigenvalue {lo:.3e})")
        Q = hermitian_part(sym.A.conj().T @ Q @ sym.A + L.conj().T @ np.linalg.solve(S, L))
        if not np.all(np.isfinite(Q)):
            raise NoStabilizingSolution("Riccati iteration diverged")
        yield Q


def riccati_stabilizing(sym, tol=1e-12, max_iter=50000):
    """Stabilizing solution of the Riccati equation by monotone fixed-point iteration.

    Parameters
    ----------
    sym : SymbolR
    tol : float
        Relative step size ``||Q_{k+1} - Q_k||_F / (1 + ||Q_k||_F)`` at which
        the iteration stops.
    max_iter : int

    Returns
    -------
    Q : (n, n) ndarray
        Hermitian PSD; ``R0 - Gamma^* Q Gamma`` is positive definite and the
        closed-loop matrix has spectral radius below one.

    Raises
    ------
    NoStabilizingSolution
        ``R`` is not strictly positive on the unit circle (or ``max_iter``
        was too small to tell).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = sym.n
    if n == 0:
        if min_hermitian_eig(sym.R0) <= 0:
            raise NoStabilizingSolution("R0 is not positive definite")
        return np.zeros((0, 0), complex)
    prev = np.zeros((n, n), complex)
    converged = False
    for Q in riccati_iterates(sym, max_iter, tol):
        if fro(Q - prev) < tol * (1 + fro(prev)):
            converged = True
            break
        prev = Q
    if not converged:
        raise NoStabilizingSolution(f"no convergence in {max_iter} iterations")
    _check_stabilizing(sym, Q, tol, NoStabilizingSolution)
    return newton_polish(sym, Q)


def newton_polish(sym, Q, steps=3):
    """Newton steps ``Q += X`` with ``X = Ax^* X Ax + (map(Q) - Q)``.

    Starting next to the stabilizing solution this converges quadratically;
    a step is kept only if it lowers the residual.
    """
    res = riccati_residual(sym, Q)
    for _ in range(steps):
        Ax = closed_loop(sym, Q)
        if spectral_radius(Ax) >= 1 - STAB_EPS:
            break
        trial = hermitian_part(Q + stein(Ax.conj().T, riccati_map(sym, Q) - Q))
        if min_hermitian_eig(_riccati_terms(sym, trial)[0]) <= 0:
            break
        new_res = riccati_residual(sym, trial)
        if not new_res < res:
            break
        Q, res = trial, new_res
    return Q


def _check_stabilizing(sym, Q, tol, exc):
    S, _ = _riccati_terms(sym, Q)
    if min_hermitian_eig(S) <= tol * (1 + fro(sym.R0)):
        raise exc("R0 - Gamma^* Q Gamma is not positive definite")
    rho = spectral_radius(closed_loop(sym, Q))
    if rho >= 1 - STAB_EPS:
        raise exc(f"closed-loop spectral radius {rho:.12f} is not below one")


@dataclass(frozen=True, eq=False)
class SpectralFactor:
    """Invertible outer factor ``Phi(z) = Phi0 + z CPhi (I - zA)^{-1} Gamma``."""

    Q: np.ndarray
    Phi0: np.ndarray
    CPhi: np.ndarray
    Ax: np.ndarray
    phi: Realization
    phi_inv: Realization


def outer_factor(sym, Q, tol=1e-9):
    """Outer spectral factor built from the stabilizing Riccati solution `Q`.

    ``Phi(0)`` is normalized to the PSD square root of
    ``R0 - Gamma^* Q Gamma``, which fixes the left unitary freedom.
    """
    Q = _mat(Q, (sym.n, sym.n))
    if sym.n:
        res = riccati_residual(sym, Q)
        if res > tol * (1 + fro(Q)):
            raise NotStabilizing(f"Riccati residual {res:.3e} exceeds tolerance")
    _check_stabilizing(sym, Q, 1e-14, NotStabilizing)
    S, L = _riccati_terms(sym, Q)
    Phi0 = psd_sqrt(S)
    CPhi = Phi0 @ np.linalg.solve(S, L)
    Ax = closed_loop(sym, Q)
    Phi0_inv = np.linalg.inv(Phi0)
    phi = Realization(sym.A, sym.Gamma, CPhi, Phi0)
    phi_inv = Realization(Ax, sym.Gamma @ Phi0_inv, -Phi0_inv @ CPhi, Phi0_inv)
    return SpectralFactor(Q, Phi0, CPhi, Ax, phi, phi_inv)


def factor_symbol(sym, tol=1e-12, max_iter=50000):
    """Riccati solve followed by :func:`outer_factor`."""
    return outer_factor(sym, riccati_stabilizing(sym, tol, max_iter))
