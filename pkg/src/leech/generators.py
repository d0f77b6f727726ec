"""Seeded random problem instances for tests and benchmarks."""
import numpy as np

from .linalg import spectral_radius
from .realization import LeechData, Realization, hinf_norm_grid


def _cnormal(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_stable_matrix(rng, n, radius):
    """Complex n x n matrix with spectral radius exactly `radius`."""
    if n == 0:
        return np.zeros((0, 0), complex)
    A = _cnormal(rng, n, n)
    return A * (radius / spectral_radius(A))


def random_realization(rng, n, m, p, radius=0.7):
    A = random_stable_matrix(rng, n, radius)
    return Realization(A, _cnormal(rng, n, p), _cnormal(rng, m, n), _cnormal(rng, m, p))


def scaled_to_norm(rng, R, target, grid=16384):
    """Rescale `R` (through B and D) so its circle-grid norm equals `target`."""
    s = target / hinf_norm_grid(R, grid)
    return Realization(R.A, R.B * s, R.C, R.D * s)


def cascade_data(G, X0):
    """Joint realization of ``[G  G X0]`` on the cascade state."""
    ng, nx = G.n, X0.n
    A = np.block([[G.A, G.B @ X0.C], [np.zeros((nx, ng)), X0.A]])
    C = np.hstack([G.C, G.D @ X0.C])
    B1 = np.vstack([G.B, np.zeros((nx, G.shape[1]))])
    B2 = np.vstack([G.B @ X0.D, X0.B])
    return LeechData(A, B1, B2, C, G.D, G.D @ X0.D)


def solvable_instance(rng, n_g=None, n_x=None, m=None, p=None, q=None,
                      x_norm=0.9, radius=None):
    """A solvable problem ``K = G X0`` with ``||X0||_inf = x_norm``.

    ``m <= p`` so that ``D1`` has full row rank; with ``x_norm < 1`` the
    symbol ``R = G (I - X0 X0^*) G^*`` is then strictly positive on the
    circle for generic draws. Total state dimension ``n_g + n_x <= 6``.
    """
    m = m if m is not None else int(rng.integers(1, 4))
    p = p if p is not None else int(rng.integers(m, m + 2))
    q = q if q is not None else int(rng.integers(1, 3))
    n_g = n_g if n_g is not None else int(rng.integers(1, 4))
    n_x = n_x if n_x is not None else int(rng.integers(0, 7 - n_g))
    rg = radius if radius is not None else rng.uniform(0.3, 0.8)
    rx = radius if radius is not None else rng.uniform(0.3, 0.8)
    G = random_realization(rng, n_g, m, p, rg)
    X0 = scaled_to_norm(rng, random_realization(rng, n_x, p, q, rx), x_norm)
    return cascade_data(G, X0), X0
