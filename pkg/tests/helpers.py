import numpy as np

from leech.generators import solvable_instance


def positive_instance(rng, **kw):
    """Solvable instance with ``p = m + 1`` so the symbol stays well inside the positive cone."""
    m = int(rng.integers(1, 4))
    return solvable_instance(rng, m=m, p=m + 1, **kw)


def disc_points(rng, count, radius=0.9):
    r = radius * np.sqrt(rng.uniform(0, 1, count))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, count))


def op_norm(M):
    return np.linalg.norm(M, 2, axis=(-2, -1)).max()
