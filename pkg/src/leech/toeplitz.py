"""Finite-section oracles for the operator identities behind the solver.

Nothing here calls the Riccati solver or the Leech pipeline: sections are
assembled from Markov parameters, circle samples and explicit block
matrices, so they can be used to check those modules independently.
"""
from dataclasses import dataclass
import math

import numpy as np

from .errors import OracleInconsistency, PointOnBoundary, SectionNotPositive, UnstableA
from .linalg import fro, hermitian_part, min_hermitian_eig, spectral_radius
from .realization import STAB_EPS, Realization, circle_points, evaluate_many
from .spectral import SymbolR


@dataclass(frozen=True, eq=False)
class BlockSection:
    N: int
    block_rows: int
    block_cols: int
    M: np.ndarray

    def block(self, i, j):
        k, l = self.block_rows, self.block_cols
        return self.M[i * k:(i + 1) * k, j * l:(j + 1) * l]


def default_truncation(A, eps=1e-10, cap=400):
    """Smallest N with ``rho(A)^N < eps``, capped at `cap`."""
    rho = spectral_radius(A) if np.size(A) else 0.0
    if rho == 0:
        return 1
    return min(cap, max(1, math.floor(math.log(eps) / math.log(rho)) + 1))


def _check_stable(A):
    if np.size(A) and spectral_radius(A) >= 1 - STAB_EPS:
        raise UnstableA("state matrix is not stable")


def _coefficients(A, B, C, count):
    """``C A^{j-1} B`` for j = 1..count."""
    out, X = [], B
    for _ in range(count):
        out.append(C @ X)
        X = A @ X
    return out


def obs_section(C, A, N):
    """``W_N = [C; CA; ...; CA^{N-1}]``."""
    rows, X = [], np.asarray(C, complex)
    for _ in range(N):
        rows.append(X)
        X = X @ A
    return np.vstack(rows)


def toeplitz_section(omega, N):
    """N x N block section of the Toeplitz operator of `omega`.

    A :class:`Realization` gives the lower-triangular section with blocks
    ``Omega_{i-j}``; a :class:`SymbolR` gives the Hermitian section with
    ``R_{i-j}``, where ``R_{-j} = R_j^*``.
    """
    if N < 1:
        raise ValueError("N must be positive")
    _check_stable(omega.A)
    if isinstance(omega, SymbolR):
        m = omega.m
        coeffs = [omega.R0] + _coefficients(omega.A, omega.Gamma, omega.C, N - 1)
        M = np.zeros((N * m, N * m), complex)
        for i in range(N):
            for j in range(N):
                blk = coeffs[i - j] if i >= j else coeffs[j - i].conj().T
                M[i * m:(i + 1) * m, j * m:(j + 1) * m] = blk
        return BlockSection(N, m, m, M)
    k, l = omega.shape
    coeffs = [omega.D] + _coefficients(omega.A, omega.B, omega.C, N - 1)
    M = np.zeros((N * k, N * l), complex)
    for i in range(N):
        for j in range(i + 1):
            M[i * k:(i + 1) * k, j * l:(j + 1) * l] = coeffs[i - j]
    return BlockSection(N, k, l, M)


def hankel_section(omega, N, cols=None):
    """Block Hankel section with (i, j) block ``Omega_{i+j+1} = C A^{i+j} B``.

    `cols` defaults to `N` block columns; a larger value gives the wide
    section needed for ``H H^*``.
    """
    cols = N if cols is None else cols
    _check_stable(omega.A)
    k, l = omega.shape
    coeffs = _coefficients(omega.A, omega.B, omega.C, N + cols - 1)
    M = np.zeros((N * k, cols * l), complex)
    for i in range(N):
        for j in range(cols):
            M[i * k:(i + 1) * k, j * l:(j + 1) * l] = coeffs[i + j]
    return BlockSection(N, k, l, M)


def pick_kernel_matrix(data, points, F=None):
    """Block matrix ``[G(z_k)G(z_j)^* - K(z_k)K(z_j)^* (- F F^*)] / (1 - conj(z_j) z_k)``."""
    zs = np.asarray(points, dtype=complex).ravel()
    if np.any(np.abs(zs) >= 1 - 1e-12):
        raise PointOnBoundary("all points must lie strictly inside the unit disc")
    Gv = evaluate_many(data.G, zs)
    Kv = evaluate_many(data.K, zs)
    m, s = data.m, zs.size
    M = np.zeros((s * m, s * m), complex)
    Fv = evaluate_many(F, zs) if F is not None else None
    for k in range(s):
        for j in range(s):
            blk = Gv[k] @ Gv[j].conj().T - Kv[k] @ Kv[j].conj().T
            if Fv is not None:
                blk = blk - Fv[k] @ Fv[j].conj().T
            M[k * m:(k + 1) * m, j * m:(j + 1) * m] = blk / (1 - np.conj(zs[j]) * zs[k])
    return hermitian_part(M)


def q_toeplitz_oracle(sym, N):
    """``W_N^* T_{R,N}^{-1} W_N`` from the explicit N-block section of ``T_R``."""
    T = toeplitz_section(sym, N).M
    try:
        L = np.linalg.cholesky(hermitian_part(T))
    except np.linalg.LinAlgError:
        raise SectionNotPositive(f"T_R section of order {N} is not positive definite")
    if sym.n == 0:
        return np.zeros((0, 0), complex)
    Z = np.linalg.solve(L, obs_section(sym.C, sym.A, N))
    return hermitian_part(Z.conj().T @ Z)


def _gram_toeplitz(R, N, samples):
    """N-section of ``T_{Omega Omega^*}`` from FFT coefficients of circle samples."""
    vals = evaluate_many(R, circle_points(samples))
    S = vals @ np.conj(np.swapaxes(vals, 1, 2))
    c = np.fft.fft(S, axis=0) / samples  # c[j] is the coefficient of z^j
    k = R.shape[0]
    M = np.zeros((N * k, N * k), complex)
    for i in range(N):
        for j in range(N):
            M[i * k:(i + 1) * k, j * k:(j + 1) * k] = c[(i - j) % samples]
    return M


def _hankel_gram(R, N, tail):
    if R.n == 0 or 0 in R.shape:
        return np.zeros((N * R.shape[0],) * 2, complex)
    H = hankel_section(R, N, cols=tail).M
    return H @ H.conj().T


def _tail_length(A, N):
    rho = spectral_radius(A) if np.size(A) else 0.0
    if rho == 0:
        return N + 1
    return min(6000, N + math.ceil(math.log(1e-18) / math.log(rho)))


def positivity_section(data, N, F=None, check=True):
    """N-block section of ``T_G T_G^* - T_K T_K^* (- T_F T_F^*)``.

    Assembled as products of lower-triangular sections. With ``check`` the
    result is compared against the second route
    ``sum (T_{W W^*} - H_W H_W^*)`` and an :class:`OracleInconsistency`
    is raised on disagreement beyond ``1e-9``.
    """
    parts = [(data.G, 1.0), (data.K, -1.0)]
    if F is not None:
        parts.append((F, -1.0))
    m = data.m
    S1 = np.zeros((N * m, N * m), complex)
    for R, sign in parts:
        T = toeplitz_section(R, N).M
        S1 += sign * (T @ T.conj().T)
    S1 = hermitian_part(S1)
    if check:
        tail = _tail_length(data.A, N)
        samples = 1 << max(12, math.ceil(math.log2(4 * tail)))
        S2 = np.zeros_like(S1)
        for R, sign in parts:
            S2 += sign * (_gram_toeplitz(R, N, samples) - _hankel_gram(R, N, tail))
        gap = fro(S1 - S2)
        if gap > 1e-9 * (1 + fro(S1)):
            raise OracleInconsistency(f"Toeplitz and Toeplitz-Hankel routes differ by {gap:.3e}")
    return S1


def positivity_section_check(data, N, F=None):
    """Smallest eigenvalue of :func:`positivity_section`."""
    return min_hermitian_eig(positivity_section(data, N, F))


def _random_disc_points(rng, count, radius):
    r = radius * np.sqrt(rng.uniform(0, 1, count))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, count))


def fundamental_identity_residual(data, F, Upsilon, samples=10, seed=0, radius=0.9):
    """Largest residual of the kernel identity over random pairs in the disc.

    ``l conj(z) Lam(l) Lam(z)^* + G(l) G(z)^* - Lam(l) Lam(z)^* - K(l) K(z)^* - F(l) F(z)^*``
    with ``Lam(z) = C (I - zA)^{-1} Upsilon``.
    """
    rng = np.random.default_rng(seed)
    n = data.n
    Upsilon = np.asarray(Upsilon, complex).reshape(n, n)
    # Lam(z) = [C Upsilon] + z C (I - zA)^{-1} A Upsilon
    Lam = Realization(data.A, data.A @ Upsilon, data.C, data.C @ Upsilon)
    zs = _random_disc_points(rng, samples, radius)
    ls = _random_disc_points(rng, samples, radius)
    worst = 0.0
    fs = (data.G, data.K, F, Lam)
    vz = [evaluate_many(f, zs) for f in fs]
    vl = [evaluate_many(f, ls) for f in fs]
    for i in range(samples):
        z, lam = zs[i], ls[i]
        g, k, f, L = (v[i] @ w[i].conj().T for v, w in zip(vl, vz))
        res = lam * np.conj(z) * L + g - L - k - f
        worst = max(worst, float(np.linalg.norm(res, 2)))
    return worst


def kernel_points(seed, count, radius=0.9):
    """Seeded uniform points in the disc ``|z| <= radius``."""
    return _random_disc_points(np.random.default_rng(seed), count, radius)
