"""Set-valued solution ``U(t, x)`` as an intersection of half-spaces.

For every sampled base direction ``zeta`` the scalar solution ``u_zeta``
defines the half-space ``U_zeta(t, x) = u_zeta(t, x) z_hat + H+(zeta)``.
The candidate solution is their intersection.  It solves the set-valued
equation when every half-space actually supports the intersection; that
condition is checked by :func:`check_hyp_u`, and the sufficient pairwise
condition for inf-extension Hamiltonians by :func:`check_hyp_u2`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._parallel import pmap
from .characteristics import invert_flow, u_scalar
from .cone_lattice import EXACT_TOL, HalfSpace, SupportedSet, s_function, zeta_difference
from .exceptions import ConvergenceError, HorizonExceededError

__all__ = [
    "HypUReport",
    "HypU2Report",
    "u_zeta_halfspace",
    "v_zeta_halfspace",
    "assemble_U",
    "solution_point",
    "check_hyp_u",
    "check_hyp_u2",
    "set_derivative_time",
    "set_derivative_space",
    "assembled_time_derivative",
    "hj_residual",
]


def _on_base(zeta, z_hat):
    if abs(float(np.dot(zeta, z_hat)) - 1.0) > EXACT_TOL:
        raise ValueError("zeta must satisfy zeta . z_hat = 1")


def u_zeta_halfspace(sp, t, x, z_hat):
    """``U_zeta(t, x) = {z : zeta . z >= u_zeta(t, x)}``."""
    _on_base(sp.zeta, z_hat)
    return HalfSpace(sp.zeta, u_scalar(sp, t, x))


def v_zeta_halfspace(sp, t, x, z_hat):
    """The same half-space built from the characteristic value at ``Z(t, x)``.

    Offset ``U0(w) + t (DH(P) . P - H(P))`` with ``w = Z(t, x)`` and
    ``P = DU0(w)``; equal to :func:`u_zeta_halfspace` by construction of
    the characteristics, so it serves as a cross-check.
    """
    _on_base(sp.zeta, z_hat)
    w = invert_flow(sp, t, x)
    p = np.asarray(sp.DU0(w), dtype=float)
    dh = np.asarray(sp.DH(p), dtype=float)
    return HalfSpace(sp.zeta, sp.U0(w) + t * (float(dh @ p) - sp.H(p)))


def assemble_U(prob, base, t, x):
    """Intersection of ``U_zeta(t, x)`` over the sampled base directions."""
    x = np.asarray(x, dtype=float)

    def offset(zeta):
        try:
            return u_scalar(prob.scalarize(zeta), t, x)
        except (HorizonExceededError, ConvergenceError) as exc:
            exc.direction = np.asarray(zeta)
            exc.args = (f"direction zeta={np.asarray(zeta).tolist()}: {exc.args[0]}",)
            raise

    return SupportedSet(base, pmap(offset, list(base.directions)))


def solution_point(prob, zeta, t, x):
    """Point ``gamma_zeta(t, x)`` of ``R^d`` on the boundary of ``U_zeta(t, x)``.

    For an inf-extension Hamiltonian ``H0 + C`` this is
    ``U0(w) + t (DH0(P) P - H0(P))`` with ``w = Z_zeta(t, x)`` and
    ``P = DU0_zeta(w)``; its inner product with ``zeta`` is ``u_zeta(t, x)``.
    """
    if not prob.inf_extension or prob.kind != "hamiltonian":
        raise ValueError("solution points need an inf-extension Hamiltonian problem")
    sp = prob.scalarize(zeta)
    w = invert_flow(sp, t, x)
    p = np.asarray(sp.DU0(w), dtype=float)
    data = prob.data
    return data.u0(w) + t * (data.jac_f0(p) @ p - data.f0(p))


@dataclass(frozen=True, eq=False)
class HypUReport:
    """Per-direction support gaps of an assembled intersection."""

    directions: np.ndarray
    u: np.ndarray
    support: np.ndarray
    gap: np.ndarray
    tol: float

    @property
    def holds(self):
        return bool(np.all(self.gap <= self.tol))

    @property
    def verdict(self):
        return "holds" if self.holds else "fails"

    @property
    def worst(self):
        """Index of the direction with the largest gap."""
        return int(np.argmax(self.gap))

    def to_dict(self):
        i = self.worst
        return {
            "verdict": self.verdict,
            "tol": self.tol,
            "worst_zeta": self.directions[i].tolist(),
            "worst_gap": float(self.gap[i]),
            "records": [
                {"zeta": z.tolist(), "u": float(u), "support": float(s), "gap": float(g)}
                for z, u, s, g in zip(self.directions, self.u, self.support, self.gap)
            ],
        }


def check_hyp_u(S, tol=1e-6):
    """Compare the support of ``S`` at each ``zeta_i`` with its own offset."""
    s = np.array([S.support(z) for z in S.directions])
    c = np.asarray(S.offsets, dtype=float)
    with np.errstate(invalid="ignore"):
        gap = np.where(s == c, 0.0, s - c)
    return HypUReport(S.directions, c, s, gap, float(tol))


@dataclass(frozen=True, eq=False)
class HypU2Report:
    """Pairwise slacks ``zeta . gamma_xi - zeta . gamma_zeta``.

    ``slack[i, j]`` uses ``zeta = directions[i]`` and ``xi = directions[j]``.
    """

    directions: np.ndarray
    slack: np.ndarray
    tol: float

    @property
    def min_slack(self):
        return float(self.slack.min())

    @property
    def worst_pair(self):
        i, j = np.unravel_index(np.argmin(self.slack), self.slack.shape)
        return self.directions[i], self.directions[j]

    @property
    def holds(self):
        return self.min_slack >= -self.tol

    def __bool__(self):
        return self.holds

    def to_dict(self):
        z, xi = self.worst_pair
        return {
            "holds": self.holds,
            "min_slack": self.min_slack,
            "worst_zeta": z.tolist(),
            "worst_xi": xi.tolist(),
            "tol": self.tol,
        }


def check_hyp_u2(prob, base, t, x, tol=1e-9):
    """Pairwise sufficient condition for inf-extension Hamiltonians.

    For every ordered pair ``(zeta, xi)`` the point ``gamma_xi`` must lie in
    the half-space ``U_zeta``.  Written out, the left-hand side is
    ``U0_zeta(Z_xi) + t [-H0_zeta(P_xi) + zeta . DH0(P_xi) P_xi]`` with
    ``P_xi = DU0_xi(Z_xi)`` and the right-hand side the same with ``xi``
    replaced by ``zeta``.
    """
    if not prob.inf_extension or prob.kind != "hamiltonian":
        raise ValueError("the pairwise condition needs an inf-extension Hamiltonian problem")
    dirs = base.directions
    gammas = np.array(pmap(lambda z: solution_point(prob, z, t, x), list(dirs)))
    vals = dirs @ gammas.T  # vals[i, j] = zeta_i . gamma_j
    slack = vals - np.diag(vals)[:, None]
    np.fill_diagonal(slack, 0.0)
    return HypU2Report(dirs, slack, float(tol))


def _central(f, h):
    return (f(h) - f(-h)) / (2.0 * h)


def _check_step(t, h):
    if not h > 0:
        raise ValueError("h must be positive")
    if t - h < 0:
        raise ValueError(f"central difference needs t - h >= 0 (t={t}, h={h})")


def set_derivative_time(prob, zeta, t, x, h=1e-4, z_hat=None):
    """``D_{zeta,t} U(t, x) = S_(du/dt, zeta)(1)`` with a central difference."""
    _check_step(t, h)
    sp = prob.scalarize(zeta)
    z_hat = prob.z_hat if z_hat is None else z_hat
    dudt = _central(lambda s: u_scalar(sp, t + s, x), h)
    return s_function(dudt, zeta, 1.0, z_hat)


def set_derivative_space(prob, zeta, t, x, q, h=1e-4, z_hat=None):
    """``D_{zeta,x} U(t, x)(q) = S_(Du, zeta)(q)`` with a central difference along ``q``."""
    if not h > 0:
        raise ValueError("h must be positive")
    sp = prob.scalarize(zeta)
    z_hat = prob.z_hat if z_hat is None else z_hat
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    slope = _central(lambda s: u_scalar(sp, t, x + s * q), h)
    return s_function(slope, zeta, 1.0, z_hat)


def assembled_time_derivative(prob, base, zeta, t, x, h=1e-4):
    """Time derivative of the assembled set ``U`` itself, in direction ``zeta``.

    ``[U(t + h, x) -_zeta U(t - h, x)] / (2h)``.  Whenever every half-space
    supports the intersection this agrees with the derivative of the single
    half-space ``U_zeta``.
    """
    _check_step(t, h)
    upper = assemble_U(prob, base, t + h, x)
    lower = assemble_U(prob, base, t - h, x)
    return zeta_difference(upper, lower, zeta).scale(1.0 / (2.0 * h))


def _gradient(sp, t, x, h):
    x = np.asarray(x, dtype=float)
    eye = np.eye(x.shape[0])
    return np.array([_central(lambda s: u_scalar(sp, t, x + s * e), h) for e in eye])


def hj_residual(prob, zeta, t, x, h=1e-4):
    """``|du/dt + H_zeta(Du)|`` with central differences of step ``h``.

    Equivalently the offset distance between ``D_{zeta,t}U + H(Du, zeta)``
    and ``H+(zeta)``.
    """
    _check_step(t, h)
    sp = prob.scalarize(zeta)
    dudt = _central(lambda s: u_scalar(sp, t + s, x), h)
    du = _gradient(sp, t, x, h)
    return abs(dudt + sp.H(du))
