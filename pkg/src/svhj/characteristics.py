"""Characteristic curves of the scalarized Hamilton-Jacobi equations.

For ``u_t + H(Du) = 0`` with ``u(0, .) = U0`` and a Hamiltonian that does
not depend on the state, the momentum is constant along characteristics
and the curves are straight lines::

    X(t, x) = x + t DH(DU0(x))
    V(t, x) = U0(x) + t (DH(DU0(x)) . DU0(x) - H(DU0(x)))
    P(t, x) = DU0(x)

The solution is ``u(t, x) = V(t, Z(t, x))`` where ``Z(t, .)`` inverts
``X(t, .)``, which is possible while ``I + t D2H(DU0) D2U0`` stays
invertible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceError, HorizonExceededError

__all__ = [
    "CharTriple",
    "HorizonReport",
    "char_closed_form",
    "char_integrate",
    "flow_jacobian",
    "invert_flow",
    "u_scalar",
    "tstar_estimate",
    "horizon_constants",
    "horizon_bound",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class CharTriple:
    X: np.ndarray
    V: float
    P: np.ndarray
    t: float


@dataclass(frozen=True, eq=False)
class HorizonReport:
    """Estimated existence horizon ``T*`` for one direction.

    The estimate only covers ``x`` on the scanned grid and ``t <= t_max``.
    """

    t_star: float
    witness_x: np.ndarray | None
    t_max: float
    t_steps: int
    grid_size: int
    zeta: np.ndarray | None = None
    near_singular_t: float | None = field(default=None)

    def to_dict(self):
        return {
            "t_star": self.t_star,
            "witness_x": None if self.witness_x is None else self.witness_x.tolist(),
            "t_max": self.t_max,
            "t_steps": self.t_steps,
            "grid_size": self.grid_size,
            "zeta": None if self.zeta is None else self.zeta.tolist(),
            "near_singular_t": self.near_singular_t,
        }


def _hamiltonian(sp):
    if sp.kind != "hamiltonian":
        raise ValueError(
            "characteristics need a Hamiltonian; conjugate the Lagrangian first "
            "(svhj.fenchel.legendre_dual)"
        )
    return sp


def _check_time(t):
    t = float(t)
    if not t >= 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return t


def char_closed_form(sp, t, x):
    """Characteristic triple ``(X, V, P)`` issued from ``x`` at time ``t``."""
    _hamiltonian(sp)
    t = _check_time(t)
    x = np.asarray(x, dtype=float)
    p = np.asarray(sp.DU0(x), dtype=float)
    dh = np.asarray(sp.DH(p), dtype=float)
    X = x + t * dh
    V = sp.U0(x) + t * (float(dh @ p) - sp.H(p))
    return CharTriple(X=X, V=float(V), P=p, t=t)


def char_integrate(sp, t, x, steps=100, return_path=False):
    """Integrate the characteristic system with classical RK4.

    Independent of :func:`char_closed_form`: it only uses the right-hand
    side ``X' = DH(P)``, ``V' = DH(P) . P - H(P)``, ``P' = 0``.  With
    ``return_path=True`` the momenta at every step are returned as well.
    """
    _hamiltonian(sp)
    t = _check_time(t)
    steps = int(steps)
    if steps < 1:
        raise ValueError("steps must be at least 1")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]

    def rhs(y):
        p = y[n + 1 :]
        dh = np.asarray(sp.DH(p), dtype=float)
        return np.concatenate([dh, [float(dh @ p) - sp.H(p)], np.zeros(n)])

    y = np.concatenate([x, [sp.U0(x)], np.asarray(sp.DU0(x), dtype=float)])
    h = t / steps
    path = [y[n + 1 :].copy()]
    for _ in range(steps):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        path.append(y[n + 1 :].copy())
    triple = CharTriple(X=y[:n], V=float(y[n]), P=y[n + 1 :], t=t)
    if return_path:
        return triple, np.array(path)
    return triple


def flow_jacobian(sp, t, w):
    """Jacobian ``I + t D2H(DU0(w)) D2U0(w)`` of ``w -> X(t, w)``."""
    w = np.asarray(w, dtype=float)
    B = np.asarray(sp.D2H(sp.DU0(w)), dtype=float) @ np.asarray(sp.D2U0(w), dtype=float)
    return np.eye(w.shape[0]) + t * B


def _singular(M):
    n = M.shape[0]
    return abs(np.linalg.det(M)) < 1e-10 * (1.0 + np.linalg.norm(M, 2) ** n)


def _newton_flow(sp, t, x, w, tol, maxiter):
    floor = 8 * _EPS * (1.0 + np.linalg.norm(x))
    for _ in range(maxiter):
        F = w + t * np.asarray(sp.DH(sp.DU0(w)), dtype=float) - x
        res = np.linalg.norm(F)
        if res <= max(tol, floor):
            return w
        J = flow_jacobian(sp, t, w)
        if _singular(J):
            raise HorizonExceededError(
                f"flow map not invertible at t={t}: singular Jacobian at w={w.tolist()}",
                direction=sp.zeta,
            )
        w = w - np.linalg.solve(J, F)
        if not np.all(np.isfinite(w)):
            break
    raise ConvergenceError(f"Newton inversion of the flow map did not converge at t={t}")


def invert_flow(sp, t, x, tol=1e-12, maxiter=50, _depth=0):
    """Solve ``X(t, w) = x`` for ``w`` by Newton's method from ``w = x``.

    When plain Newton fails the problem is first solved at ``t / 2`` and
    the result used as starting point (continuation in time).
    """
    _hamiltonian(sp)
    t = _check_time(t)
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(x, dtype=float)
    if t == 0.0:
        return x.copy()
    try:
        return _newton_flow(sp, t, x, x.copy(), tol, maxiter)
    except ConvergenceError:
        if _depth >= 30:
            raise
    w_half = invert_flow(sp, 0.5 * t, x, tol, maxiter, _depth + 1)
    return _newton_flow(sp, t, x, w_half, tol, maxiter)


def u_scalar(sp, t, x, tol=1e-12):
    """Scalar solution ``u(t, x) = V(t, Z(t, x))``."""
    w = invert_flow(sp, t, x, tol)
    return char_closed_form(sp, t, w).V


def _smallest_real_eig(lams, t):
    """Smallest real eigenvalue of ``I + t B`` given the spectrum of ``B``."""
    mu = 1.0 + t * lams
    real = np.abs(mu.imag) <= 1e-9 * (1.0 + np.abs(mu))
    return float(mu.real[real].min()) if np.any(real) else math.inf


def tstar_estimate(sp, x_grid, t_max, t_steps=1000):
    """Estimate ``T* = sup{t : I + t D2H(DU0(x)) D2U0(x) invertible}`` on a grid.

    The times ``k t_max / t_steps`` are scanned.  The first time the
    determinant falls below ``1e-10 (1 + |M|^n)`` is reported as
    ``near_singular_t``.  A real eigenvalue crossing zero ends the scan;
    the crossing is then located by bisection on the smallest real
    eigenvalue.  A determinant that only touches zero (as for
    ``(1 - t)^2``) is caught by the eigenvalue test as well.  Returns ``t_star = inf`` when nothing
    is found up to ``t_max``.
    """
    _hamiltonian(sp)
    grid = [np.asarray(x, dtype=float) for x in x_grid]
    if not grid:
        raise ValueError("x_grid must be nonempty")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    t_steps = int(t_steps)
    n = grid[0].shape[0]
    eye = np.eye(n)
    Bs = np.array([flow_jacobian(sp, 1.0, x) - eye for x in grid])
    spectra = np.linalg.eigvals(Bs)
    times = np.linspace(0.0, float(t_max), t_steps + 1)

    def crosses(j, t):
        return _smallest_real_eig(spectra[j], t) <= 0.0

    def flag_table(ts):
        # (len(ts), grid) booleans: near-singular determinant or a crossed eigenvalue
        M = eye + ts[:, None, None, None] * Bs[None]
        norms = np.sqrt(np.linalg.eigvalsh(np.swapaxes(M, 2, 3) @ M)[..., -1])
        singular = np.abs(np.linalg.det(M)) < 1e-10 * (1.0 + norms**n)
        mu = 1.0 + ts[:, None, None] * spectra[None]
        real = np.abs(mu.imag) <= 1e-9 * (1.0 + np.abs(mu))
        crossed = np.any(real & (mu.real <= 0.0), axis=2)
        return singular | crossed, crossed

    chunk = max(1, 200_000 // (len(grid) * n * n))
    best, witness, warned = math.inf, None, None
    for start in range(1, t_steps + 1, chunk):
        ks = np.arange(start, min(start + chunk, t_steps + 1))
        flagged, crossed = flag_table(times[ks])
        if warned is None and flagged.any():
            warned = float(times[ks[np.argmax(flagged.any(axis=1))]])
        hit = crossed.any(axis=0)
        for j in np.flatnonzero(hit):
            hi_k = ks[np.argmax(crossed[:, j])]
            lo, hi = times[hi_k - 1], times[hi_k]
            while hi - lo > 4 * _EPS * max(1.0, hi):
                mid = 0.5 * (lo + hi)
                if crosses(j, mid):
                    hi = mid
                else:
                    lo = mid
            if hi < best:
                best, witness = float(hi), grid[j]
        if witness is not None:
            break
    return HorizonReport(
        t_star=best,
        witness_x=witness,
        t_max=float(t_max),
        t_steps=t_steps,
        grid_size=len(grid),
        zeta=np.asarray(sp.zeta, dtype=float),
        near_singular_t=warned,
    )


def horizon_constants(prob, base, x_grid, p_grid):
    """Sampled ``(M0, M1, M2)``: bounds on ``|DU0|``, ``|D2U0|`` and ``|D2H|``.

    ``M2`` is taken over momenta of norm at most ``M0``: the points of
    ``p_grid`` inside that ball together with every sampled ``DU0(x)``.
    Operator 2-norms throughout.
    """
    xs = [np.asarray(x, dtype=float) for x in x_grid]
    ps = [np.asarray(p, dtype=float) for p in p_grid]
    if not xs or not ps:
        raise ValueError("grids must be nonempty")
    sps = [prob.scalarize(z) for z in base.directions]
    for sp in sps:
        _hamiltonian(sp)
    m0 = max(np.linalg.norm(sp.DU0(x)) for sp in sps for x in xs)
    m1 = max(np.linalg.norm(sp.D2U0(x), 2) for sp in sps for x in xs)
    ball = [p for p in ps if np.linalg.norm(p) <= m0]
    m2 = 0.0
    for sp in sps:
        moments = ball + [np.asarray(sp.DU0(x), dtype=float) for x in xs]
        m2 = max(m2, max(np.linalg.norm(sp.D2H(p), 2) for p in moments))
    return float(m0), float(m1), float(m2)


def horizon_bound(prob, base, x_grid, p_grid):
    """Guaranteed existence time ``1 / (M1 M2)``; ``inf`` if either vanishes."""
    _, m1, m2 = horizon_constants(prob, base, x_grid, p_grid)
    if m1 == 0.0 or m2 == 0.0:
        return math.inf
    return 1.0 / (m1 * m2)
