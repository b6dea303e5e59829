"""Built-in problem instances and their scalarizations.

Every built-in is an inf-extension ``F(p) + C`` of a vector-valued function
``F : R^n -> R^2`` ordered by the nonnegative orthant, so its
scalarization in direction ``zeta`` is ``zeta . F(p)``.  ``F`` is a
Hamiltonian for ``kind == "hamiltonian"`` and a Lagrangian (running cost of
the velocity) for ``kind == "lagrangian"``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .cone_lattice import EXACT_TOL, Cone

__all__ = [
    "VectorData",
    "ScalarizedProblem",
    "ProblemInstance",
    "BUILTIN_NAMES",
    "builtin",
    "scalarize",
    "as_lagrangian",
]

KINDS = ("hamiltonian", "lagrangian")


@dataclass(frozen=True, eq=False)
class VectorData:
    """Vector data of an inf-extension problem with first and second derivatives.

    ``jac_*`` return ``(d, n)`` Jacobians and ``hess_*`` return ``(d, n, n)``
    stacks of component Hessians.
    """

    f0: Callable
    jac_f0: Callable
    hess_f0: Callable
    u0: Callable
    jac_u0: Callable
    hess_u0: Callable


@dataclass(frozen=True, eq=False)
class ScalarizedProblem:
    """Scalar data for one direction ``zeta``.

    The ``H`` slot holds the Hamiltonian ``H_zeta`` for Hamiltonian-given
    problems and the Lagrangian ``L_zeta`` for Lagrangian-given ones; the
    ``L`` aliases exist for readability on the Lagrangian side.
    """

    zeta: np.ndarray
    H: Callable
    DH: Callable
    D2H: Callable
    U0: Callable
    DU0: Callable
    D2U0: Callable
    kind: str = "hamiltonian"

    @property
    def L(self):
        return self.H

    @property
    def DL(self):
        return self.DH

    @property
    def D2L(self):
        return self.D2H


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    name: str
    n: int
    d: int
    kind: str
    params: Mapping = field(default_factory=dict)
    data: Optional[VectorData] = None
    scalarizer: Optional[Callable] = None
    cone: Cone = field(default_factory=lambda: Cone.orthant(2))
    z_hat: np.ndarray = field(default_factory=lambda: np.ones(2))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.data is None and self.scalarizer is None:
            raise ValueError("a problem needs vector data or a scalarizer")

    @property
    def inf_extension(self):
        return self.data is not None

    def scalarize(self, zeta):
        return scalarize(self, zeta)


def scalarize(prob, zeta):
    """Scalar data of ``prob`` in a base direction ``zeta``."""
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (prob.d,):
        raise ValueError(f"zeta must have shape ({prob.d},)")
    if abs(float(zeta @ prob.z_hat) - 1.0) > EXACT_TOL or not prob.cone.contains_dual(zeta):
        raise ValueError(f"zeta={zeta.tolist()} is not on the base of the dual cone")
    if prob.scalarizer is not None:
        return prob.scalarizer(zeta)
    data = prob.data
    zeta = zeta.copy()
    zeta.setflags(write=False)
    return ScalarizedProblem(
        zeta=zeta,
        H=lambda p: float(zeta @ data.f0(p)),
        DH=lambda p: zeta @ data.jac_f0(p),
        D2H=lambda p: np.tensordot(zeta, data.hess_f0(p), axes=1),
        U0=lambda x: float(zeta @ data.u0(x)),
        DU0=lambda x: zeta @ data.jac_u0(x),
        D2U0=lambda x: np.tensordot(zeta, data.hess_u0(x), axes=1),
        kind=prob.kind,
    )


def as_lagrangian(prob):
    """Reinterpret the vector data of ``prob`` as a Lagrangian of the velocity."""
    return dataclasses.replace(prob, kind="lagrangian", name=f"{prob.name}-as-lagrangian")


# -- vector-valued building blocks -------------------------------------------


def _sq(p):
    p = np.asarray(p, dtype=float)
    return 0.5 * float(p @ p)


def _quadratic_pair(shift=None):
    """``(1/2 |p|^2, 1/2 |p + shift|^2)`` with derivatives."""

    def f(p):
        p = np.asarray(p, dtype=float)
        q = p if shift is None else p + shift
        return np.array([_sq(p), _sq(q)])

    def jac(p):
        p = np.asarray(p, dtype=float)
        q = p if shift is None else p + shift
        return np.array([p, q])

    def hess(p):
        eye = np.eye(np.asarray(p).shape[0])
        return np.array([eye, eye])

    return f, jac, hess


def _quadratic_quartic():
    """``(1/2 |p|^2, 1/4 |p|^4)``; the quartic Hessian is ``|p|^2 I + 2 p p^T``."""

    def f(p):
        p = np.asarray(p, dtype=float)
        r2 = float(p @ p)
        return np.array([0.5 * r2, 0.25 * r2 * r2])

    def jac(p):
        p = np.asarray(p, dtype=float)
        return np.array([p, float(p @ p) * p])

    def hess(p):
        p = np.asarray(p, dtype=float)
        eye = np.eye(p.shape[0])
        return np.array([eye, float(p @ p) * eye + 2.0 * np.outer(p, p)])

    return f, jac, hess


def _affine(A, b):
    n = A.shape[1]

    def u(x):
        return A @ np.asarray(x, dtype=float) + b

    def jac(x):
        return A.copy()

    def hess(x):
        return np.zeros((A.shape[0], n, n))

    return u, jac, hess


def _both_components(sign):
    """``sign * (1/2 |x|^2, 1/2 |x|^2)``."""

    def u(x):
        return sign * np.full(2, _sq(x))

    def jac(x):
        x = np.asarray(x, dtype=float)
        return sign * np.array([x, x])

    def hess(x):
        eye = np.eye(np.asarray(x).shape[0])
        return sign * np.array([eye, eye])

    return u, jac, hess


# -- registry -----------------------------------------------------------------


def _check_keys(name, params, allowed):
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise ValueError(f"unknown parameters for {name!r}: {unknown}; allowed: {sorted(allowed)}")


def _matrix_A(params):
    A = np.array(params.get("A", [[1.0, 0.0], [0.0, -1.0]]), dtype=float)
    if A.ndim != 2 or A.shape[0] != 2 or A.shape[1] < 1:
        raise ValueError(f"A must be a 2 x n matrix, got shape {A.shape}")
    b = np.array(params.get("b", [0.0, 0.0]), dtype=float)
    if b.shape != (2,):
        raise ValueError(f"b must have length 2, got shape {b.shape}")
    return A, b


def _linear_init(name, params, kind, build_f):
    _check_keys(name, params, {"A", "b"})
    A, b = _matrix_A(params)
    f, jf, hf = build_f()
    u, ju, hu = _affine(A, b)
    return ProblemInstance(
        name=name,
        n=A.shape[1],
        d=2,
        kind=kind,
        params={"A": A.tolist(), "b": b.tolist()},
        data=VectorData(f, jf, hf, u, ju, hu),
    )


def _ex1(params):
    return _linear_init("ex1", params, "hamiltonian", _quadratic_quartic)


def _quad_lagrangian(params):
    return _linear_init("quad-lagrangian", params, "lagrangian", _quadratic_pair)


def _ex2(params):
    _check_keys("ex2", params, {"p0"})
    p0 = np.array(params.get("p0", [1.0, 0.0]), dtype=float)
    if p0.ndim != 1 or p0.shape[0] < 1:
        raise ValueError(f"p0 must be a nonempty vector, got shape {p0.shape}")
    f, jf, hf = _quadratic_pair(shift=p0)
    u, ju, hu = _both_components(1.0)
    return ProblemInstance(
        name="ex2",
        n=p0.shape[0],
        d=2,
        kind="hamiltonian",
        params={"p0": p0.tolist()},
        data=VectorData(f, jf, hf, u, ju, hu),
    )


def _concave_init(params):
    _check_keys("concave-init", params, {"n"})
    n = params.get("n", 2)
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    f, jf, hf = _quadratic_pair()
    u, ju, hu = _both_components(-1.0)
    return ProblemInstance(
        name="concave-init",
        n=int(n),
        d=2,
        kind="hamiltonian",
        params={"n": int(n)},
        data=VectorData(f, jf, hf, u, ju, hu),
    )


_REGISTRY = {
    "ex1": _ex1,
    "ex2": _ex2,
    "quad-lagrangian": _quad_lagrangian,
    "concave-init": _concave_init,
}

BUILTIN_NAMES = tuple(_REGISTRY)


def builtin(name, params=None):
    """Construct a built-in problem.

    ``ex1``
        ``H0(p) = (|p|^2/2, |p|^4/4)``, ``U0(x) = A x + b`` with
        ``A = diag(1, -1)`` and ``b = 0`` by default.
    ``ex2``
        ``H0(p) = (|p|^2/2, |p + p0|^2/2)``, ``U0(x) = (|x|^2/2, |x|^2/2)``,
        ``p0 = (1, 0)`` by default.
    ``quad-lagrangian``
        ``L0(v) = (|v|^2/2, |v|^2/2)``, ``U0(x) = A x + b``.
    ``concave-init``
        ``H0(p) = (|p|^2/2, |p|^2/2)``, ``U0(x) = -(|x|^2/2, |x|^2/2)``; its
        characteristics cross at ``t = 1``.
    """
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown problem {name!r}; choose one of {list(BUILTIN_NAMES)}") from None
    return factory(dict(params or {}))
