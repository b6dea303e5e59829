"""Cone geometry, half-spaces and finite intersections of half-spaces.

Elements of the lattice of closed convex sets ``A`` with ``A + C = A`` are
represented through their scalarizations ``inf {zeta . z : z in A}`` on a
finite sample of directions from a base of the dual cone ``C+``.  The two
building blocks are

* :class:`HalfSpace`, the set ``{z : normal . z >= offset}``.  An offset of
  ``-inf`` encodes the whole space and ``+inf`` the empty set.
* :class:`SupportedSet`, the intersection of one half-space per sampled
  base direction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, nnls

__all__ = [
    "Cone",
    "BaseSampling",
    "HalfSpace",
    "SupportedSet",
    "make_base",
    "zeta_difference",
    "s_function",
    "support_of_intersection",
    "dual_halfspace",
]

# Tolerance for identities that hold exactly in exact arithmetic
# (base normalization, parallelism of normals).
EXACT_TOL = 1e-12


def _vector(v, name="vector"):
    arr = np.array(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


def _perp(v):
    return np.array([-v[1], v[0]])


@dataclass(frozen=True, eq=False)
class Cone:
    """Ordering cone ``C`` given through generators of its dual ``C+``.

    Parameters
    ----------
    dual_generators : array_like, shape (k, d)
        Nonzero vectors whose conic hull is ``C+``.
    """

    dual_generators: np.ndarray

    def __post_init__(self):
        gens = np.array(self.dual_generators, dtype=float)
        if gens.ndim != 2 or gens.shape[0] == 0:
            raise ValueError("dual_generators must be a nonempty (k, d) array")
        if np.any(np.linalg.norm(gens, axis=1) == 0.0):
            raise ValueError("dual generators must be nonzero")
        if _positively_spans(gens):
            raise ValueError("dual cone is the whole space, so C = {0}")
        gens.setflags(write=False)
        object.__setattr__(self, "dual_generators", gens)

    @classmethod
    def orthant(cls, d=2):
        """The nonnegative orthant, which is self-dual."""
        return cls(np.eye(d))

    @property
    def dim(self):
        return self.dual_generators.shape[1]

    def contains_dual(self, zeta, tol=1e-10):
        """Whether ``zeta`` is a nonnegative combination of the generators."""
        zeta = np.asarray(zeta, dtype=float)
        if zeta.shape != (self.dim,):
            return False
        _, residual = nnls(self.dual_generators.T, zeta)
        return residual <= tol * max(1.0, float(np.linalg.norm(zeta)))


def _positively_spans(gens):
    """True when the conic hull of the rows of ``gens`` is all of R^d."""
    k, d = gens.shape
    if np.linalg.matrix_rank(gens) < d:
        return False
    # C = {z : gens @ z >= 0} is {0} iff max sum(gens @ z) over C and the
    # unit box is zero.
    res = linprog(
        -gens.sum(axis=0),
        A_ub=-gens,
        b_ub=np.zeros(k),
        bounds=[(-1.0, 1.0)] * d,
        method="highs",
    )
    return res.status == 0 and -res.fun <= 1e-12


@dataclass(frozen=True, eq=False)
class BaseSampling:
    """Finitely many directions on the base ``{zeta in C+ : zeta . z_hat = 1}``."""

    z_hat: np.ndarray
    directions: np.ndarray
    cone: Cone

    def __post_init__(self):
        z_hat = _vector(self.z_hat, "z_hat")
        dirs = np.array(self.directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != z_hat.shape[0]:
            raise ValueError("directions must be an (m, d) array matching z_hat")
        if dirs.shape[1] != self.cone.dim:
            raise ValueError("directions and cone have different dimensions")
        if np.any(np.abs(dirs @ z_hat - 1.0) > EXACT_TOL):
            raise ValueError("every direction must satisfy zeta . z_hat = 1")
        for zeta in dirs:
            if not self.cone.contains_dual(zeta):
                raise ValueError(f"direction {zeta} is not in the dual cone")
        for i, j in itertools.combinations(range(len(dirs)), 2):
            if np.array_equal(dirs[i], dirs[j]):
                raise ValueError("base directions must be pairwise distinct")
        dirs.setflags(write=False)
        object.__setattr__(self, "z_hat", z_hat)
        object.__setattr__(self, "directions", dirs)

    @property
    def m(self):
        return self.directions.shape[0]

    @property
    def dim(self):
        return self.directions.shape[1]

    def __len__(self):
        return self.m

    def __iter__(self):
        return iter(self.directions)


def make_base(cone, z_hat, m):
    """Sample ``m`` directions on the base of ``C+`` through ``z_hat``.

    The dual generators are rescaled onto the plane ``zeta . z_hat = 1``.
    In two dimensions the two extreme rescaled generators are joined by a
    uniform grid in the convex-combination weight; in higher dimensions a
    simplex lattice of weights over all rescaled generators is used, with
    the pure generators listed first.

    Examples
    --------
    >>> make_base(Cone.orthant(2), [1, 1], 3).directions
    array([[1. , 0. ],
           [0.5, 0.5],
           [0. , 1. ]])
    """
    z_hat = _vector(z_hat, "z_hat")
    if z_hat.shape[0] != cone.dim:
        raise ValueError("z_hat has the wrong dimension")
    m = int(m)
    scales = cone.dual_generators @ z_hat
    if np.any(scales <= 0.0):
        bad = cone.dual_generators[np.argmin(scales)]
        raise ValueError(
            f"no base through z_hat={z_hat.tolist()}: generator {bad.tolist()} "
            "has nonpositive inner product with it"
        )
    gens = cone.dual_generators / scales[:, None]
    gens = _unique_rows(gens)

    if cone.dim == 1:
        if m != 1:
            raise ValueError("in one dimension the base is a single point, m must be 1")
        return BaseSampling(z_hat, gens[:1], cone)

    if cone.dim == 2:
        e = _perp(z_hat) / np.linalg.norm(z_hat)
        coords = gens @ e
        a, b = gens[np.argmin(coords)], gens[np.argmax(coords)]
        if np.array_equal(a, b):
            raise ValueError("dual cone is a single ray; its base is one point")
        if m < 2:
            raise ValueError("m must be at least 2 so both extreme directions are kept")
        lam = np.arange(m) / (m - 1)
        dirs = (1.0 - lam)[:, None] * a + lam[:, None] * b
        dirs[-1] = b
        return BaseSampling(z_hat, dirs, cone)

    k = gens.shape[0]
    if m < k:
        raise ValueError(f"m={m} is smaller than the number of generators ({k})")
    r = 1
    while True:
        dirs = _simplex_lattice(gens, r)
        if len(dirs) >= m:
            return BaseSampling(z_hat, dirs[:m], cone)
        r += 1


def _unique_rows(a):
    out = []
    for row in a:
        if not any(np.allclose(row, other, rtol=0.0, atol=EXACT_TOL) for other in out):
            out.append(row)
    return np.array(out)


def _simplex_lattice(gens, r):
    k = gens.shape[0]
    weights = [
        np.array(w) / r
        for w in itertools.product(range(r, -1, -1), repeat=k)
        if sum(w) == r
    ]
    vertices = [w for w in weights if np.count_nonzero(w) == 1]
    vertices.sort(key=lambda w: int(np.argmax(w)))
    interior = [w for w in weights if np.count_nonzero(w) > 1]
    pts = [w @ gens for w in vertices + interior]
    return _unique_rows(np.array(pts))


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The closed set ``{z : normal . z >= offset}``.

    ``offset == -inf`` is the whole space and ``offset == +inf`` the empty
    set; both remain tagged with a normal so lattice operations stay typed.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = _vector(self.normal, "normal")
        if not np.any(normal):
            raise ValueError("half-space normal must be nonzero")
        offset = float(self.offset)
        if math.isnan(offset):
            raise ValueError("half-space offset must not be NaN")
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", offset)

    @property
    def is_whole(self):
        return self.offset == -math.inf

    @property
    def is_empty(self):
        return self.offset == math.inf

    def contains(self, z, tol=0.0):
        return float(self.normal @ np.asarray(z, dtype=float)) >= self.offset - tol

    def _ratio(self, zeta):
        """``lam`` with ``zeta = lam * normal``, or None if not parallel."""
        n = self.normal
        lam = float(zeta @ n) / float(n @ n)
        if np.linalg.norm(zeta - lam * n) > EXACT_TOL * max(1.0, np.linalg.norm(zeta)):
            return None
        return lam

    def support(self, zeta):
        """``inf {zeta . z : z in self}`` as an extended real."""
        zeta = np.asarray(zeta, dtype=float)
        if self.is_empty:
            return math.inf
        if not np.any(zeta):
            return 0.0
        if self.is_whole:
            return -math.inf
        lam = self._ratio(zeta)
        if lam is None or lam <= 0.0:
            return -math.inf
        return lam * self.offset

    def scale(self, lam):
        """The set ``lam * self`` for ``lam > 0``."""
        if lam <= 0:
            raise ValueError("only positive scaling keeps a half-space")
        return HalfSpace(self.normal, lam * self.offset)

    def __add__(self, other):
        """Minkowski sum. Non-parallel nonempty half-spaces add up to R^d."""
        if not isinstance(other, HalfSpace):
            return NotImplemented
        if self.is_empty or other.is_empty:
            return HalfSpace(self.normal, math.inf)
        mu = self._ratio(other.normal)
        if mu is None or mu <= 0.0:
            return HalfSpace(self.normal, -math.inf)
        return HalfSpace(self.normal, self.offset + other.offset / mu)

    def __repr__(self):
        return f"HalfSpace(normal={self.normal.tolist()}, offset={self.offset!r})"


def dual_halfspace(zeta):
    """``H+(zeta) = {z : zeta . z >= 0}``."""
    return HalfSpace(zeta, 0.0)


@dataclass(frozen=True, eq=False)
class SupportedSet:
    """Intersection of ``{z : zeta_i . z >= offsets[i]}`` over a base sample."""

    base: BaseSampling
    offsets: np.ndarray

    def __post_init__(self):
        offsets = np.array(self.offsets, dtype=float).reshape(-1)
        if offsets.shape[0] != self.base.m:
            raise ValueError("need exactly one offset per base direction")
        if np.any(np.isnan(offsets)):
            raise ValueError("offsets must not be NaN")
        offsets.setflags(write=False)
        object.__setattr__(self, "offsets", offsets)

    @property
    def directions(self):
        return self.base.directions

    def halfspaces(self):
        return [HalfSpace(z, c) for z, c in zip(self.base.directions, self.offsets)]

    def contains(self, z, tol=0.0):
        z = np.asarray(z, dtype=float)
        return bool(np.all(self.base.directions @ z >= self.offsets - tol))

    def support(self, zeta):
        return support_of_intersection(self, zeta)

    def boundary_polyline(self, ray=1.0):
        """Vertices of the boundary of a planar intersection, in base order.

        The two unbounded edges are represented by one extra point each at
        distance ``ray`` from the extreme vertices.
        """
        if self.base.dim != 2:
            raise ValueError("boundary polyline is only defined in two dimensions")
        if np.any(self.offsets == math.inf):
            return np.empty((0, 2))
        active = [i for i in _upper_hull_indices(self) if self.offsets[i] > -math.inf]
        if not active:
            return np.empty((0, 2))
        n = self.base.directions
        c = self.offsets
        if len(active) == 1:
            i = active[0]
            foot = c[i] * n[i] / (n[i] @ n[i])
            d = _perp(n[i]) / np.linalg.norm(n[i])
            return np.array([foot - ray * d, foot + ray * d])
        verts = [
            np.linalg.solve(np.array([n[i], n[j]]), np.array([c[i], c[j]]))
            for i, j in zip(active[:-1], active[1:])
        ]
        first, second = active[0], active[1]
        d0 = _perp(n[first])
        if n[second] @ d0 < 0:
            d0 = -d0
        last, before = active[-1], active[-2]
        d1 = _perp(n[last])
        if n[before] @ d1 < 0:
            d1 = -d1
        head = verts[0] + ray * d0 / np.linalg.norm(d0)
        tail = verts[-1] + ray * d1 / np.linalg.norm(d1)
        return np.array([head, *verts, tail])

    def __repr__(self):
        return f"SupportedSet(m={self.base.m}, offsets={self.offsets.tolist()})"


def _scalarize(A, zeta):
    if isinstance(A, HalfSpace):
        return A.support(zeta)
    if isinstance(A, SupportedSet):
        return support_of_intersection(A, zeta)
    raise TypeError(f"cannot scalarize {type(A).__name__}")


def zeta_difference(A, B, zeta, cone=None):
    """The zeta-difference ``A -_zeta B`` as a half-space with normal ``zeta``.

    It collects the shifts ``z`` with ``zeta . z + inf_B >= inf_A`` where
    ``inf_X = inf {zeta . x : x in X}``.  When ``cone`` is not given it is
    taken from whichever argument is a :class:`SupportedSet`.
    """
    zeta = _vector(zeta, "zeta")
    if not np.any(zeta):
        raise ValueError("zeta must be nonzero")
    if cone is None:
        for X in (A, B):
            if isinstance(X, SupportedSet):
                cone = X.base.cone
                break
    if cone is not None and not cone.contains_dual(zeta):
        raise ValueError(f"zeta={zeta.tolist()} is not in the dual cone")
    a = _scalarize(A, zeta)
    b = _scalarize(B, zeta)
    if a == -math.inf or b == math.inf:
        offset = -math.inf
    elif a == math.inf or b == -math.inf:
        offset = math.inf
    else:
        offset = a - b
    return HalfSpace(zeta, offset)


def s_function(eta, zeta, x, z_hat):
    """``S_(eta, zeta)(x) = (eta . x) z_hat + H+(zeta)`` for ``zeta . z_hat = 1``.

    ``eta`` and ``x`` may be scalars (the one-dimensional case).
    """
    zeta = _vector(zeta, "zeta")
    z_hat = _vector(z_hat, "z_hat")
    if abs(float(zeta @ z_hat) - 1.0) > EXACT_TOL:
        raise ValueError("s_function needs zeta . z_hat = 1")
    value = float(np.dot(np.asarray(eta, dtype=float), np.asarray(x, dtype=float)))
    return HalfSpace(zeta, value)


def support_of_intersection(S, zeta):
    """``inf {zeta . z : zeta_i . z >= c_i for all i}`` for a supported set.

    Returns ``-inf`` when ``zeta`` lies outside the cone spanned by the
    constraint normals and ``+inf`` when the intersection is empty.  Planar
    sets use an upper concave envelope of the normalized constraints;
    other dimensions solve the dual linear program.
    """
    zeta = _vector(zeta, "zeta")
    if zeta.shape[0] != S.base.dim:
        raise ValueError("zeta has the wrong dimension")
    c = S.offsets
    if np.any(c == math.inf):
        return math.inf
    keep = c > -math.inf
    normals, c = S.base.directions[keep], c[keep]
    if not np.any(zeta):
        return 0.0
    if normals.shape[0] == 0:
        return -math.inf
    if S.base.dim == 2:
        return _support_planar(normals, c, zeta, S.base.z_hat)
    return _support_lp(normals, c, zeta)


def _envelope(normals, c, z_hat):
    """Upper concave envelope of constraints rescaled onto the base line.

    Returns the base-line coordinates and values of the envelope vertices
    together with the indices of the constraints that attain them.
    """
    scale = normals @ z_hat
    e = _perp(z_hat) / np.linalg.norm(z_hat)
    lam = (normals / scale[:, None]) @ e
    val = c / scale
    order = np.lexsort((-val, lam))
    hull = []
    for i in order:
        if hull and lam[hull[-1]] == lam[i]:
            continue
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            cross = (lam[a] - lam[o]) * (val[i] - val[o]) - (val[a] - val[o]) * (lam[i] - lam[o])
            if cross >= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    idx = np.array(hull)
    return lam[idx], val[idx], idx


def _upper_hull_indices(S):
    keep = np.flatnonzero(S.offsets > -math.inf)
    if keep.size == 0:
        return []
    _, _, idx = _envelope(S.base.directions[keep], S.offsets[keep], S.base.z_hat)
    return [int(keep[i]) for i in idx]


def _support_planar(normals, c, zeta, z_hat):
    sigma = float(zeta @ z_hat)
    if sigma <= 0.0:
        return -math.inf
    lam_h, val_h, _ = _envelope(normals, c, z_hat)
    e = _perp(z_hat) / np.linalg.norm(z_hat)
    lam = float((zeta / sigma) @ e)
    slack = EXACT_TOL * max(1.0, abs(lam))
    if lam < lam_h[0] - slack or lam > lam_h[-1] + slack:
        return -math.inf
    if lam <= lam_h[0]:
        return sigma * float(val_h[0])
    if lam >= lam_h[-1]:
        return sigma * float(val_h[-1])
    j = int(np.searchsorted(lam_h, lam))
    if lam_h[j] == lam:
        return sigma * float(val_h[j])
    w = (lam - lam_h[j - 1]) / (lam_h[j] - lam_h[j - 1])
    return sigma * float(val_h[j - 1] + w * (val_h[j] - val_h[j - 1]))


def _support_lp(normals, c, zeta):
    # Dual: maximize c . y subject to normals^T y = zeta, y >= 0.
    res = linprog(
        -c,
        A_eq=normals.T,
        b_eq=zeta,
        bounds=[(0, None)] * normals.shape[0],
        method="highs",
    )
    if res.status == 0:
        return float(-res.fun)
    if res.status == 2:
        return -math.inf
    if res.status == 3:
        return math.inf
    raise RuntimeError(f"support LP failed: {res.message}")
