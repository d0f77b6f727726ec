"""Discrete-time state-space realizations ``D + z C (I - zA)^{-1} B``.

Besides evaluation this module holds the Stein-equation solvers for the
controllability and observability Gramians, a Gramian-based minimality
test and a circle-grid estimate of the H-infinity norm.
"""
from dataclasses import dataclass

import numpy as np

from .errors import SingularResolvent, UnstableA
from .linalg import cmatrix, fro, hermitian_part, spectral_radius


STAB_EPS = 1e-9
DEFAULT_GRID = 4096
_KRON_MAX_N = 60


@dataclass(frozen=True, eq=False)
class Realization:
    """Transfer function ``Omega(z) = D + z C (I - zA)^{-1} B``.

    Shapes: A (n, n), B (n, p), C (m, n), D (m, p). ``n = 0`` is allowed
    and describes the constant function ``D``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        D = _mat(self.D)
        m, p = D.shape
        A = _mat(self.A)
        n = A.shape[0]
        object.__setattr__(self, "A", _mat(A, (n, n)))
        object.__setattr__(self, "B", _mat(self.B, (n, p)))
        object.__setattr__(self, "C", _mat(self.C, (m, n)))
        object.__setattr__(self, "D", D)

    @classmethod
    def constant(cls, D):
        D = _mat(D)
        m, p = D.shape
        return cls(np.zeros((0, 0)), np.zeros((0, p)), np.zeros((m, 0)), D)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def shape(self):
        """``(m, p)``: the size of the values ``Omega(z)``."""
        return self.D.shape

    @property
    def spectral_radius(self):
        return spectral_radius(self.A)

    @property
    def stable(self):
        return self.spectral_radius < 1 - STAB_EPS

    def __call__(self, z):
        return evaluate(self, z)

    def markov(self, count):
        """First `count` Fourier coefficients ``D, CB, CAB, ...``."""
        out = [self.D]
        X = self.B
        for _ in range(1, count):
            out.append(self.C @ X)
            X = self.A @ X
        return out[:count]

    def hstack(self, other):
        """``[self other]`` realized on the shared state (same A and C)."""
        return Realization(self.A, np.hstack([self.B, other.B]), self.C,
                           np.hstack([self.D, other.D]))


def _mat(x, shape=None):
    """:func:`cmatrix` that also accepts empty blocks of a known shape."""
    if np.size(x) == 0:
        if shape is None:
            shape = np.shape(x) if np.ndim(x) == 2 else (0, 0)
        return np.zeros(shape, complex)
    return cmatrix(x, shape)


def evaluate(R, z):
    """``D + z C (I - zA)^{-1} B`` at a single complex point."""
    z = complex(z)
    if R.n == 0 or z == 0:
        return R.D.copy()
    M = np.eye(R.n) - z * R.A
    lam = np.linalg.eigvals(R.A)
    if np.min(np.abs(1 - z * lam)) < 1e-13:
        raise SingularResolvent(f"I - zA is singular at z = {z}")
    return R.D + z * (R.C @ np.linalg.solve(M, R.B))


def evaluate_many(R, zs):
    """Vectorized :func:`evaluate`; returns an array of shape (len(zs), m, p)."""
    zs = np.asarray(zs, dtype=complex).ravel()
    m, p = R.shape
    out = np.broadcast_to(R.D, (zs.size, m, p)).copy()
    if R.n == 0 or zs.size == 0:
        return out
    lam = np.linalg.eigvals(R.A)
    if np.min(np.abs(1 - np.outer(zs, lam))) < 1e-13:
        raise SingularResolvent("I - zA is singular at one of the points")
    M = np.eye(R.n)[None] - zs[:, None, None] * R.A[None]
    X = np.linalg.solve(M, np.broadcast_to(R.B, (zs.size,) + R.B.shape))
    out += zs[:, None, None] * (R.C[None] @ X)
    return out


def circle_points(count):
    return np.exp(2j * np.pi * np.arange(count) / count)


def stein(A, W):
    """Solve ``P = A P A^* + W`` for stable `A`.

    Direct Kronecker solve up to n = 60, squared Smith iteration beyond.
    """
    A = _mat(A)
    n = A.shape[0]
    if n == 0:
        return np.zeros((0, 0), complex)
    W = hermitian_part(cmatrix(W, (n, n)))
    if spectral_radius(A) >= 1 - STAB_EPS:
        raise UnstableA("state matrix is not stable")
    if n <= _KRON_MAX_N:
        lhs = np.eye(n * n) - np.kron(A.conj(), A)
        P = np.linalg.solve(lhs, W.reshape(-1, order="F")).reshape(n, n, order="F")
    else:
        P, Ak = W.copy(), A.copy()
        for _ in range(200):
            step = Ak @ P @ Ak.conj().T
            P = P + step
            Ak = Ak @ Ak
            if fro(step) <= 1e-17 * (1 + fro(P)):
                break
    P = hermitian_part(P)
    # one refinement sweep absorbs solver rounding
    P = hermitian_part(A @ P @ A.conj().T + W)
    return P


def ctrl_gramian(A, B):
    """Controllability Gramian ``sum A^k B B^* A^{*k}``."""
    B = np.asarray(B, dtype=complex)
    return stein(A, B @ B.conj().T)


def obs_gramian(A, C):
    """Observability Gramian ``sum A^{*k} C^* C A^k``."""
    A = np.asarray(A, dtype=complex)
    C = np.asarray(C, dtype=complex)
    return stein(A.conj().T, C.conj().T @ C)


def stein_residual(A, W, P):
    return fro(P - A @ P @ A.conj().T - W)


@dataclass(frozen=True)
class MinimalityReport:
    observable: bool
    controllable: bool
    obs_rank: int
    ctrl_rank: int
    n: int

    @property
    def minimal(self):
        return self.observable and self.controllable


def _gramian_rank(P, tol):
    if P.size == 0:
        return 0
    w = np.linalg.eigvalsh(hermitian_part(P))
    top = w[-1]
    if top <= 0:
        return 0
    return int(np.sum(w > tol * top))


def minimality_report(data, tol=1e-10):
    """Rank test of both Gramians of the joint realization of ``[G K]``."""
    n = data.n
    Y = obs_gramian(data.A, data.C)
    P = ctrl_gramian(data.A, np.hstack([data.B1, data.B2]))
    ro, rc = _gramian_rank(Y, tol), _gramian_rank(P, tol)
    return MinimalityReport(ro == n, rc == n, ro, rc, n)


def _dominant_range(P, tol):
    w, V = np.linalg.eigh(hermitian_part(P))
    keep = w > tol * max(w[-1], 0.0) if w.size and w[-1] > 0 else np.zeros(w.size, bool)
    return V[:, keep]


def minimal_reduction(data, tol=1e-10):
    """Restrict to the controllable subspace, then quotient out the unobservable one.

    Both subspaces are read off the Gramians with the rank rule of
    :func:`minimality_report`; the transfer functions are unchanged.
    """
    B = np.hstack([data.B1, data.B2])
    V = _dominant_range(ctrl_gramian(data.A, B), tol)
    A, B1, B2, C = (V.conj().T @ data.A @ V, V.conj().T @ data.B1, V.conj().T @ data.B2,
                    data.C @ V)
    W = _dominant_range(obs_gramian(A, C), tol)
    return LeechData(W.conj().T @ A @ W, W.conj().T @ B1, W.conj().T @ B2, C @ W,
                     data.D1, data.D2)


def hinf_norm_grid(R, grid_points=DEFAULT_GRID):
    """Largest singular value of `R` over equispaced points of the unit circle.

    This is a lower bound on the true H-infinity norm.
    """
    if grid_points < 16:
        raise ValueError("grid_points must be at least 16")
    if 0 in R.shape:
        return 0.0
    best = 0.0
    zs = circle_points(grid_points)
    for chunk in np.array_split(zs, max(1, grid_points // 1024)):
        vals = evaluate_many(R, chunk)
        best = max(best, float(np.max(np.linalg.norm(vals, ord=2, axis=(1, 2)))))
    return best


@dataclass(frozen=True, eq=False)
class LeechData:
    """Joint realization ``[G K] = [D1 D2] + z C (I - zA)^{-1} [B1 B2]``.

    G is m x p and K is m x q; both share the state matrix A (n x n),
    which must be stable.
    """

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C: np.ndarray
    D1: np.ndarray
    D2: np.ndarray

    def __post_init__(self):
        G = Realization(self.A, self.B1, self.C, self.D1)
        K = Realization(G.A, self.B2, G.C, self.D2)
        if K.shape[0] != G.shape[0]:
            raise ValueError("G and K must have the same number of rows")
        for name, val in zip("A B1 B2 C D1 D2".split(), (G.A, G.B, K.B, G.C, G.D, K.D)):
            object.__setattr__(self, name, val)
        if G.n and not G.stable:
            raise UnstableA(f"spectral radius of A is {G.spectral_radius:.6g}")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.D1.shape[0]

    @property
    def p(self):
        return self.D1.shape[1]

    @property
    def q(self):
        return self.D2.shape[1]

    @property
    def G(self):
        return Realization(self.A, self.B1, self.C, self.D1)

    @property
    def K(self):
        return Realization(self.A, self.B2, self.C, self.D2)
