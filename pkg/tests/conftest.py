import itertools

import numpy as np
import pytest

from svhj import Cone, make_base


def vertex_enum_min(normals, offsets, zeta, tol=1e-9):
    """min zeta.z over {normals_i . z >= offsets_i} by enumerating vertices.

    Only valid when the minimum is attained at a vertex (bounded problem
    whose normals span the space).
    """
    normals = np.asarray(normals, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    d = normals.shape[1]
    best = np.inf
    for idx in itertools.combinations(range(len(normals)), d):
        N = normals[list(idx)]
        if abs(np.linalg.det(N)) < 1e-12:
            continue
        z = np.linalg.solve(N, offsets[list(idx)])
        if np.all(normals @ z >= offsets - tol * (1 + np.abs(offsets))):
            best = min(best, float(zeta @ z))
    return best


def ex1_gamma(zeta1, t, x, A=np.diag([1.0, -1.0])):
    """Closed-form boundary point of the first worked example."""
    zeta = np.array([zeta1, 1.0 - zeta1])
    a = A.T @ zeta
    s = a @ a
    z = x - t * (zeta1 + (1.0 - zeta1) * s) * a
    return A @ z + t * np.array([0.5 * s, 0.75 * s**2])


def ex2_gamma(zeta1, t, x, p0=np.array([1.0, 0.0])):
    """Closed-form boundary point of the second worked example."""
    z = (np.asarray(x, dtype=float) - t * (1.0 - zeta1) * p0) / (1.0 + t)
    q = 0.5 * (z @ z) * (1.0 + t)
    return np.array([q, q - 0.5 * t * (p0 @ p0)])


@pytest.fixture
def orthant():
    return Cone.orthant(2)


@pytest.fixture
def base3(orthant):
    return make_base(orthant, [1.0, 1.0], 3)


@pytest.fixture
def base5(orthant):
    return make_base(orthant, [1.0, 1.0], 5)
