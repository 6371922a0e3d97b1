import itertools

import numpy as np
import pytest
from hypothesis import settings

from nullcore.field import GF

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def brute_force_classes(n, q):
    """Conjugation orbits of M_n(F_q), by applying every invertible matrix."""
    F = GF(q)
    entries = list(itertools.product(range(q), repeat=n * n))
    mats = [np.array(e, dtype=np.int64).reshape(n, n) for e in entries]
    from nullcore.linalg import inverse, is_invertible, matmul

    gl = [(P, inverse(F, P)) for P in mats if is_invertible(F, P)]
    seen = {}
    orbits = []
    for A in mats:
        key = A.tobytes()
        if key in seen:
            continue
        orbit = set()
        for P, Pi in gl:
            orbit.add(matmul(F, matmul(F, P, A), Pi).tobytes())
        for k in orbit:
            seen[k] = len(orbits)
        orbits.append(orbit)
    return orbits


@pytest.fixture(scope="session")
def orbits_2_2():
    return brute_force_classes(2, 2)
