"""Dense complex matrix kernels.

Every matrix in the package is a 2-D ``numpy.ndarray`` of dtype
``complex128``; :func:`cmatrix` is the single validating constructor.
"""
import numpy as np

from .errors import NotHermitian, NotPSD

EPS = np.finfo(float).eps


def cmatrix(M, shape=None):
    """Coerce `M` to a finite 2-D complex128 array.

    Scalars become 1x1 matrices and 1-D input becomes a single row. If
    `shape` is given, the result must have exactly that shape.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(1, -1)
    elif M.ndim != 2:
        raise ValueError(f"expected a matrix, got an array with {M.ndim} dims")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if shape is not None and M.shape != tuple(shape):
        raise ValueError(f"expected shape {tuple(shape)}, got {M.shape}")
    return M


def hermitian_part(M):
    M = np.asarray(M, dtype=complex)
    return (M + M.conj().T) / 2


def fro(M):
    return float(np.linalg.norm(M)) if np.size(M) else 0.0


def default_rank_tol(M, s_max=None):
    if s_max is None:
        s_max = np.linalg.norm(M, 2) if M.size else 0.0
    return s_max * max(M.shape, default=0) * EPS


def pinv(M, tol=0.0):
    """Moore-Penrose pseudoinverse by SVD.

    Parameters
    ----------
    M : (r, c) array_like
    tol : float
        Absolute cutoff on singular values. ``0`` selects the relative
        default ``s_max * max(r, c) * eps``.
    """
    M = cmatrix(M)
    r, c = M.shape
    if M.size == 0:
        return np.zeros((c, r), dtype=complex)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    cutoff = tol if tol > 0 else default_rank_tol(M, s[0])
    keep = s > cutoff
    if not keep.any():
        return np.zeros((c, r), dtype=complex)
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def psd_sqrt(M, tol=1e-10):
    """Hermitian PSD square root.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything more
    negative raises :class:`NotPSD`.
    """
    M = cmatrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError("psd_sqrt needs a square matrix")
    if M.size == 0:
        return M.copy()
    if fro(M - M.conj().T) > tol * (1 + fro(M)):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, V = np.linalg.eigh(hermitian_part(M))
    if w[0] < -tol:
        raise NotPSD(f"smallest eigenvalue {w[0]:.3e} is below -{tol:g}")
    w = np.clip(w, 0.0, None)
    S = (V * np.sqrt(w)) @ V.conj().T
    return hermitian_part(S)


def min_hermitian_eig(M):
    """Smallest eigenvalue of ``(M + M^*)/2``; ``+inf`` for a 0x0 matrix."""
    M = cmatrix(M)
    if M.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(hermitian_part(M))[0])


def spectral_radius(A):
    A = cmatrix(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def numerical_rank(M, tol):
    """Number of singular values above ``tol * s_max``."""
    M = cmatrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
