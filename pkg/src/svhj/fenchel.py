"""Legendre-Fenchel conjugation of scalarized Lagrangians.

For a strictly convex, superlinear ``C^2`` function ``L`` the conjugate
``L*(p) = sup_x (p . x - L(x))`` is attained where ``DL(x) = p``; the
maximizer is found by Newton's method.  The classical identities

    DL*(p)  = (DL)^{-1}(p)
    D2L*(p) = [D2L(DL*(p))]^{-1}
    L*(p)   = p . DL*(p) - L(DL*(p))

carry over direction by direction to the set-valued conjugate, whose value
in direction ``zeta`` is the half-space ``{z : zeta . z >= L*_zeta(p)}``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .cone_lattice import SupportedSet, s_function
from .exceptions import ConvergenceError, SingularHessianError
from .problems import ScalarizedProblem

__all__ = [
    "ConjugateResult",
    "IdentityReport",
    "BiconjugateReport",
    "conjugate_scalar",
    "conjugate_halfspace",
    "conjugate_derivatives",
    "check_conjugate_identities",
    "biconjugate_check",
    "hamiltonian_from_lagrangian",
    "legendre_dual",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class ConjugateResult:
    value: float
    maximizer: np.ndarray
    newton_iters: int


def _solve_gradient(grad, hess, target, x0, tol, maxiter, objective=None):
    """Find ``x`` with ``grad(x) = target`` by damped Newton.

    ``objective`` (if given) is the function whose gradient is ``grad``;
    steps are halved until either it or the residual norm decreases.
    """
    x = np.array(x0, dtype=float)
    floor = 8 * _EPS * (1.0 + np.linalg.norm(target))
    tol = max(tol, floor)

    def phi(y):
        return objective(y) - float(target @ y)

    r = np.asarray(grad(x), dtype=float) - target
    for it in range(maxiter):
        if np.linalg.norm(r) <= tol:
            return x, it
        H = np.asarray(hess(x), dtype=float)
        if not np.all(np.isfinite(H)) or np.linalg.cond(H) > 1e14:
            raise SingularHessianError(f"Hessian singular at x={x.tolist()}")
        step = -np.linalg.solve(H, r)
        alpha = 1.0
        base_res = np.linalg.norm(r)
        base_phi = phi(x) if objective is not None else None
        while True:
            y = x + alpha * step
            ry = np.asarray(grad(y), dtype=float) - target
            if np.all(np.isfinite(ry)) and (
                np.linalg.norm(ry) < base_res
                or (objective is not None and phi(y) < base_phi)
            ):
                break
            alpha *= 0.5
            if alpha < 1e-12:
                raise ConvergenceError("Newton line search stalled")
        x, r = y, ry
    if np.linalg.norm(r) <= tol:
        return x, maxiter
    raise ConvergenceError(f"Newton did not reach |DL(x) - p| <= {tol} in {maxiter} iterations")


def conjugate_scalar(sp, p, tol=1e-12, maxiter=100):
    """``L*(p)`` and its maximizer, by Newton on ``DL(x) = p`` from ``x = p``."""
    p = np.asarray(p, dtype=float)
    x, iters = _solve_gradient(sp.DL, sp.D2L, p, p, tol, maxiter, objective=sp.L)
    return ConjugateResult(value=float(p @ x) - sp.L(x), maximizer=x, newton_iters=iters)


def conjugate_halfspace(prob, zeta, p, z_hat=None):
    """Set-valued conjugate ``L*(p, zeta) = S_(1, zeta)(L*_zeta(p))``."""
    z_hat = prob.z_hat if z_hat is None else np.asarray(z_hat, dtype=float)
    res = conjugate_scalar(prob.scalarize(zeta), p)
    return s_function(1.0, zeta, res.value, z_hat)


def conjugate_derivatives(sp, p, tol=1e-12):
    """Gradient ``(DL)^{-1}(p)`` and Hessian ``[D2L(grad)]^{-1}`` of ``L*``."""
    grad = conjugate_scalar(sp, p, tol).maximizer
    H = np.asarray(sp.D2L(grad), dtype=float)
    if np.linalg.cond(H) > 1e14:
        raise SingularHessianError(f"D2L singular at {grad.tolist()}")
    hess = np.linalg.solve(H, np.eye(H.shape[0]))
    return grad, 0.5 * (hess + hess.T)


@dataclass(frozen=True, eq=False)
class IdentityReport:
    """Residuals of the conjugate identities at each sample ``p``.

    ``r1`` is the value identity, ``r2`` the inverse-gradient identity and
    ``r3`` the inverse-Hessian identity.
    """

    p_samples: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    tol: float

    @property
    def max_residual(self):
        return float(max(self.r1.max(), self.r2.max(), self.r3.max()))

    @property
    def ok(self):
        return self.max_residual <= self.tol

    def rows(self):
        return [
            (*p.tolist(), a, b, c)
            for p, a, b, c in zip(self.p_samples, self.r1, self.r2, self.r3)
        ]


def check_conjugate_identities(sp, p_samples, tol=1e-8):
    ps = np.atleast_2d(np.asarray(p_samples, dtype=float))
    r1, r2, r3 = [], [], []
    for p in ps:
        value = conjugate_scalar(sp, p).value
        grad, hess = conjugate_derivatives(sp, p)
        r1.append(abs(value - (float(p @ grad) - sp.L(grad))))
        r2.append(float(np.linalg.norm(sp.DL(grad) - p)))
        eye = np.eye(p.shape[0])
        r3.append(float(np.linalg.norm(hess @ sp.D2L(grad) - eye)))
    return IdentityReport(ps, np.array(r1), np.array(r2), np.array(r3), float(tol))


def hamiltonian_from_lagrangian(sp):
    """Scalarized Hamiltonian ``H = L*`` evaluated through Newton conjugation."""
    if sp.kind != "lagrangian":
        raise ValueError("expected a Lagrangian-given scalarization")

    def H(q):
        return conjugate_scalar(sp, q).value

    def DH(q):
        return conjugate_scalar(sp, q).maximizer

    def D2H(q):
        return conjugate_derivatives(sp, q)[1]

    return ScalarizedProblem(
        zeta=sp.zeta, H=H, DH=DH, D2H=D2H, U0=sp.U0, DU0=sp.DU0, D2U0=sp.D2U0,
        kind="hamiltonian",
    )


def legendre_dual(prob):
    """Hamiltonian problem whose scalarizations are the conjugates of ``prob``'s."""
    if prob.kind != "lagrangian":
        raise ValueError(f"{prob.name!r} is not Lagrangian-given")
    lag = dataclasses.replace(prob, scalarizer=None)
    return dataclasses.replace(
        prob,
        name=f"{prob.name}*",
        kind="hamiltonian",
        data=None,
        scalarizer=lambda zeta: hamiltonian_from_lagrangian(lag.scalarize(zeta)),
    )


@dataclass(frozen=True, eq=False)
class BiconjugateReport:
    p_samples: np.ndarray
    directions: np.ndarray
    biconjugate: np.ndarray  # shape (len(p), m)
    target: np.ndarray
    set_error: np.ndarray  # per p: max offset mismatch of the intersection
    tol: float

    @property
    def max_error(self):
        return float(np.max(np.abs(self.biconjugate - self.target)))

    @property
    def ok(self):
        return self.max_error <= self.tol and float(self.set_error.max()) <= self.tol


def _biconjugate_value(sp, p, tol):
    # L**(p) = sup_q (p . q - L*(q)); stationarity DL*(q) = p solved by Newton
    # with Jacobian D2L*(q).
    def grad(q):
        return conjugate_scalar(sp, q, tol).maximizer

    def hess(q):
        return conjugate_derivatives(sp, q, tol)[1]

    q, _ = _solve_gradient(grad, hess, p, p, tol, 100)
    return float(p @ q) - conjugate_scalar(sp, q, tol).value


def biconjugate_check(prob, base, p_samples, tol=1e-6):
    """Check ``L** = L`` per sampled direction and for the intersection.

    The intersection over the base of the biconjugate half-spaces must
    reproduce the sampled representation of ``L(p) + C``, whose offsets are
    ``zeta_i . L(p)``.
    """
    if prob.kind != "lagrangian" or not prob.inf_extension:
        raise ValueError("biconjugate check needs a Lagrangian-given inf-extension problem")
    ps = np.atleast_2d(np.asarray(p_samples, dtype=float))
    sps = [prob.scalarize(z) for z in base.directions]
    for sp in sps:
        for p in ps:
            if np.linalg.eigvalsh(sp.D2L(p)).min() < -1e-12:
                raise ValueError(f"L_zeta is not convex at p={p.tolist()}")
    inner = 1e-13
    bic = np.array([[_biconjugate_value(sp, p, inner) for sp in sps] for p in ps])
    target = np.array([[sp.L(p) for sp in sps] for p in ps])
    set_err = []
    for row, p in zip(bic, ps):
        assembled = SupportedSet(base, row)
        exact = base.directions @ prob.data.f0(p)
        set_err.append(
            max(abs(assembled.support(z) - c) for z, c in zip(base.directions, exact))
        )
    return BiconjugateReport(ps, base.directions, bic, target, np.array(set_err), float(tol))
