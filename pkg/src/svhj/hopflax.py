"""Hopf-Lax value function of the multicriteria variational problem.

With running cost ``L(v) + C`` and initial cost ``U0(y(0))`` the value
function is ``U(t, x) = inf_w [t L((x - w)/t) + U0(w)]`` in the lattice of
``C``-invariant closed convex sets.  Per base direction ``zeta`` the scalar
problem has a minimizer ``w_zeta``; the straight arcs from ``w_zeta`` to
``x`` form a scalarization solution and the value is the intersection of
the half-spaces ``{zeta . z >= t L_zeta((x - w_zeta)/t) + U0_zeta(w_zeta)}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from ._parallel import pmap
from .characteristics import char_closed_form
from .cone_lattice import SupportedSet
from .exceptions import ConvergenceError, SingularHessianError
from .fenchel import hamiltonian_from_lagrangian

__all__ = [
    "Arc",
    "ScalarizationSolution",
    "zeta_minimizer",
    "hopflax_value",
    "anchor_costs",
    "scalarization_solution",
    "cost_functional",
    "verify_characteristic_link",
    "value_point",
]

_EPS = np.finfo(float).eps
_GOLDEN = 0.5 * (np.sqrt(5.0) - 1.0)


@dataclass(frozen=True, eq=False)
class Arc:
    """Straight arc ``y(s) = w + (s / t)(x - w)`` on ``[0, t]``."""

    t_end: float
    start: np.ndarray
    end: np.ndarray

    def __call__(self, s):
        return self.start + (s / self.t_end) * (self.end - self.start)

    def velocity(self, s=None):
        return (self.end - self.start) / self.t_end


def _lagrangian(prob, zeta):
    sp = prob.scalarize(zeta)
    if sp.kind != "lagrangian":
        raise ValueError(f"{prob.name!r} is not Lagrangian-given")
    return sp


def _golden(f, a, b, iters=80):
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def zeta_minimizer(prob, zeta, t, x, tol=1e-12, maxiter=100):
    """Minimizer of ``w -> t L_zeta((x - w)/t) + U0_zeta(w)``.

    Newton on ``-DL((x - w)/t) + DU0(w) = 0`` started at ``w = x``.  When
    the Hessian sum ``D2L((x - w)/t)/t + D2U0(w)`` is nearly singular, or
    the Newton step does not decrease the objective, a golden-section
    search along the (pseudo-)Newton direction is used instead.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("the Hopf-Lax minimization needs t > 0")
    sp = _lagrangian(prob, zeta)
    x = np.asarray(x, dtype=float)

    def phi(w):
        return t * sp.L((x - w) / t) + sp.U0(w)

    def grad(w):
        return -np.asarray(sp.DL((x - w) / t)) + np.asarray(sp.DU0(w))

    def hess(w):
        return np.asarray(sp.D2L((x - w) / t)) / t + np.asarray(sp.D2U0(w))

    w = x.copy()
    for _ in range(maxiter):
        g = grad(w)
        floor = 8 * _EPS * (1.0 + np.linalg.norm(sp.DU0(w)) + np.linalg.norm(x) / t)
        if np.linalg.norm(g) <= max(tol, floor):
            if np.linalg.cond(hess(w)) > 1e14:
                raise SingularHessianError(
                    f"Hessian sum singular at the minimizer w={w.tolist()}"
                )
            return w
        Hm = hess(w)
        if np.linalg.cond(Hm) > 1e12:
            step = np.linalg.lstsq(Hm, -g, rcond=None)[0]
            if not g @ step < 0:
                step = -g
            w = w + _golden(lambda a: phi(w + a * step), 0.0, 2.0) * step
            continue
        step = np.linalg.solve(Hm, -g)
        trial = w + step
        if phi(trial) <= phi(w) or np.linalg.norm(grad(trial)) < np.linalg.norm(g):
            w = trial
        else:
            w = w + _golden(lambda a: phi(w + a * step), 0.0, 1.0) * step
    raise ConvergenceError(f"zeta-minimizer did not converge for zeta={np.asarray(zeta).tolist()}")


def _value(sp, t, x, w):
    return t * sp.L((x - w) / t) + sp.U0(w)


def hopflax_value(prob, base, t, x):
    """Sampled Hopf-Lax value: offsets ``t L_i((x - w_i)/t) + U0_i(w_i)``."""
    x = np.asarray(x, dtype=float)
    if float(t) == 0.0:
        return SupportedSet(base, [_lagrangian(prob, z).U0(x) for z in base.directions])

    def offset(zeta):
        sp = _lagrangian(prob, zeta)
        return _value(sp, t, x, zeta_minimizer(prob, zeta, t, x))

    return SupportedSet(base, pmap(offset, list(base.directions)))


def value_point(prob, zeta, t, x):
    """Vector cost ``t L((x - w)/t) + U0(w)`` of the optimal arc for ``zeta``.

    Its inner product with ``zeta`` is the Hopf-Lax offset in that direction.
    """
    if not prob.inf_extension:
        raise ValueError("value points need vector data")
    x = np.asarray(x, dtype=float)
    if float(t) == 0.0:
        return prob.data.u0(x)
    w = zeta_minimizer(prob, zeta, t, x)
    return t * prob.data.f0((x - w) / t) + prob.data.u0(w)


def anchor_costs(prob, base, t, x):
    """``costs[i, j] = t L_i((x - w_j)/t) + U0_i(w_j)`` over all anchor pairs.

    Row ``i`` scalarizes with ``zeta_i``; column ``j`` uses the minimizer of
    direction ``zeta_j``.
    """
    x = np.asarray(x, dtype=float)
    anchors = [zeta_minimizer(prob, z, t, x) for z in base.directions]
    sps = [_lagrangian(prob, z) for z in base.directions]
    return np.array([[_value(sp, t, x, w) for w in anchors] for sp in sps])


@dataclass(frozen=True, eq=False)
class ScalarizationSolution:
    directions: np.ndarray
    minimizers: np.ndarray
    arcs: list
    values: np.ndarray
    value: SupportedSet

    def records(self):
        return list(zip(self.directions, self.minimizers, self.arcs, self.values))


def scalarization_solution(prob, base, t, x):
    """One straight arc per sampled direction, from ``w_zeta`` to ``x``."""
    x = np.asarray(x, dtype=float)
    ws = np.array(pmap(lambda z: zeta_minimizer(prob, z, t, x), list(base.directions)))
    arcs = [Arc(float(t), w, x) for w in ws]
    values = np.array(
        [_value(_lagrangian(prob, z), t, x, w) for z, w in zip(base.directions, ws)]
    )
    return ScalarizationSolution(base.directions, ws, arcs, values, SupportedSet(base, values))


def cost_functional(prob, arc, zeta, quad_steps=100):
    """Scalarized cost ``int_0^t L_zeta(y'(s)) ds + U0_zeta(y(0))``, Simpson rule."""
    sp = _lagrangian(prob, zeta)
    s = np.linspace(0.0, arc.t_end, int(quad_steps) + 1)
    running = np.array([sp.L(arc.velocity(si)) for si in s])
    return float(simpson(running, x=s)) + sp.U0(arc(0.0))


def verify_characteristic_link(prob, zeta, t, x, s_samples):
    """Largest distance between the optimal arc and the characteristic from ``w_zeta``.

    The characteristic uses the Hamiltonian ``H_zeta = L*_zeta`` obtained by
    Newton conjugation.
    """
    x = np.asarray(x, dtype=float)
    w = zeta_minimizer(prob, zeta, t, x)
    arc = Arc(float(t), w, x)
    hsp = hamiltonian_from_lagrangian(_lagrangian(prob, zeta))
    return max(
        float(np.linalg.norm(arc(s) - char_closed_form(hsp, s, w).X)) for s in s_samples
    )
