import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svhj import as_lagrangian, builtin, make_base
from svhj.exceptions import SingularHessianError
from svhj.fenchel import (
    biconjugate_check,
    check_conjugate_identities,
    conjugate_derivatives,
    conjugate_halfspace,
    conjugate_scalar,
    hamiltonian_from_lagrangian,
    legendre_dual,
)
from svhj.problems import ProblemInstance, VectorData

rng = np.random.default_rng(5)


def quad_sp(zeta=(1.0, 0.0)):
    return builtin("quad-lagrangian").scalarize(list(zeta))


def quartic_sp():
    # ex1 read as a Lagrangian; zeta = (0, 1) picks |x|^4 / 4
    return as_lagrangian(builtin("ex1")).scalarize([0.0, 1.0])


def quartic_conjugate(p):
    # 1-D reduction: sup_r (|p| r - r^4/4) at r = |p|^(1/3)
    return 0.75 * np.linalg.norm(p) ** (4.0 / 3.0)


def grid_conjugate(L, p, radius=3.0, k=601):
    ax = np.linspace(-radius, radius, k)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    vals = pts @ p - np.array([L(x) for x in pts])
    return vals.max()


# -- scalar conjugate --------------------------------------------------------------------


def test_quadratic_self_conjugate():
    r = conjugate_scalar(quad_sp(), [3.0, 4.0])
    assert r.value == pytest.approx(12.5, abs=1e-12)
    np.testing.assert_allclose(r.maximizer, [3.0, 4.0], atol=1e-12)


def test_quadratic_at_origin():
    r = conjugate_scalar(quad_sp(), [0.0, 0.0])
    assert r.value == 0.0
    np.testing.assert_array_equal(r.maximizer, [0.0, 0.0])


def test_quartic_spot_value():
    r = conjugate_scalar(quartic_sp(), [1.0, 0.0])
    assert r.value == pytest.approx(0.75, abs=1e-12)
    np.testing.assert_allclose(r.maximizer, [1.0, 0.0], atol=1e-12)


def test_quartic_matches_one_dimensional_reduction():
    sp = quartic_sp()
    for _ in range(20):
        p = rng.uniform(-2, 2, 2)
        assert conjugate_scalar(sp, p).value == pytest.approx(quartic_conjugate(p), rel=1e-11)


def test_conjugate_matches_grid_maximum():
    sp = as_lagrangian(builtin("ex1")).scalarize([0.4, 0.6])
    for p in ([1.0, 0.5], [-0.7, 1.2]):
        p = np.array(p)
        assert conjugate_scalar(sp, p).value == pytest.approx(grid_conjugate(sp.L, p), abs=1e-3)


def test_first_order_condition():
    sp = as_lagrangian(builtin("ex1")).scalarize([0.3, 0.7])
    for _ in range(10):
        p = rng.uniform(-2, 2, 2)
        r = conjugate_scalar(sp, p)
        assert np.linalg.norm(sp.DL(r.maximizer) - p) <= 1e-12 * (1 + np.linalg.norm(p))
        assert r.value == pytest.approx(p @ r.maximizer - sp.L(r.maximizer), abs=1e-15)


def test_singular_hessian_raises():
    # the pure quartic has D2L(0) = 0; the Newton start x0 = p = 0 is singular
    with pytest.raises(SingularHessianError):
        conjugate_derivatives(quartic_sp(), [0.0, 0.0])


# -- half-space form --------------------------------------------------------------------


def test_conjugate_halfspace_values():
    H = conjugate_halfspace(builtin("quad-lagrangian"), [1.0, 0.0], [3.0, 4.0])
    assert H.offset == pytest.approx(12.5)
    H0 = conjugate_halfspace(builtin("quad-lagrangian"), [0.5, 0.5], [0.0, 0.0])
    assert H0.offset == 0.0
    Hq = conjugate_halfspace(as_lagrangian(builtin("ex1")), [0.0, 1.0], [1.0, 0.0])
    np.testing.assert_array_equal(Hq.normal, [0.0, 1.0])
    assert Hq.offset == pytest.approx(0.75)


def test_conjugate_halfspace_continuous_along_base():
    prob = as_lagrangian(builtin("ex1"))
    base = make_base(prob.cone, prob.z_hat, 21)
    p = np.array([1.2, -0.4])
    offs = np.array([conjugate_halfspace(prob, z, p).offset for z in base.directions[:-1]])
    assert np.max(np.abs(np.diff(offs))) < 0.2


# -- derivatives ---------------------------------------------------------------------------


def test_derivatives_quadratic():
    g, H = conjugate_derivatives(quad_sp(), [3.0, 4.0])
    np.testing.assert_allclose(g, [3.0, 4.0])
    np.testing.assert_allclose(H, np.eye(2), atol=1e-14)


def test_derivatives_quartic():
    g, H = conjugate_derivatives(quartic_sp(), [1.0, 0.0])
    np.testing.assert_allclose(g, [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(H, [[1.0 / 3.0, 0.0], [0.0, 1.0]], atol=1e-12)


def test_gradient_matches_finite_differences():
    sp = as_lagrangian(builtin("ex1")).scalarize([0.2, 0.8])
    h = 1e-5
    for _ in range(10):
        p = rng.uniform(-2, 2, 2)
        g, H = conjugate_derivatives(sp, p)
        fd = [
            (conjugate_scalar(sp, p + h * e).value - conjugate_scalar(sp, p - h * e).value) / (2 * h)
            for e in np.eye(2)
        ]
        np.testing.assert_allclose(g, fd, atol=1e-6)
        assert np.allclose(H, H.T)
        assert np.all(np.linalg.eigvalsh(H) > 0)
        np.testing.assert_array_equal(g, conjugate_scalar(sp, p).maximizer)


# -- identity report -----------------------------------------------------------------------


def test_identities_quadratic():
    ps = rng.uniform(-2, 2, (20, 2))
    rep = check_conjugate_identities(quad_sp((0.5, 0.5)), ps, tol=1e-10)
    assert rep.ok
    assert rep.max_residual <= 1e-10
    assert len(rep.rows()) == 20


def test_identities_quartic():
    rep = check_conjugate_identities(quartic_sp(), [[1.0, 0.0]], tol=1e-8)
    assert rep.r1[0] <= 1e-8


def test_identities_quartic_random():
    ps = rng.uniform(-2, 2, (20, 2))
    assert check_conjugate_identities(quartic_sp(), ps, tol=1e-8).ok


@settings(max_examples=100, deadline=None)
@given(
    z1=st.floats(0, 1),
    p=st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    x=st.lists(st.floats(-3, 3), min_size=2, max_size=2),
)
def test_young_fenchel_inequality(z1, p, x):
    for prob in (builtin("quad-lagrangian"), as_lagrangian(builtin("ex1"))):
        sp = prob.scalarize([z1, 1 - z1])
        p_, x_ = np.array(p), np.array(x)
        if np.linalg.norm(p_) < 1e-6:
            continue
        assert p_ @ x_ <= sp.L(x_) + conjugate_scalar(sp, p_).value + 1e-9


# -- Hamiltonian from Lagrangian -----------------------------------------------------------


def test_hamiltonian_from_quadratic_lagrangian():
    hsp = hamiltonian_from_lagrangian(quad_sp((0.5, 0.5)))
    q = np.array([0.3, -1.1])
    assert hsp.H(q) == pytest.approx(0.5 * q @ q)
    np.testing.assert_allclose(hsp.DH(q), q)
    np.testing.assert_allclose(hsp.D2H(q), np.eye(2), atol=1e-14)


def test_legendre_dual_kind():
    dual = legendre_dual(builtin("quad-lagrangian"))
    assert dual.kind == "hamiltonian"
    assert dual.scalarize([1.0, 0.0]).kind == "hamiltonian"
    with pytest.raises(ValueError):
        legendre_dual(builtin("ex1"))


# -- biconjugate -----------------------------------------------------------------------------


def test_biconjugate_quadratic():
    prob = builtin("quad-lagrangian")
    base = make_base(prob.cone, prob.z_hat, 5)
    rep = biconjugate_check(prob, base, [[1.0, 1.0], [0.0, 0.0]])
    assert rep.ok
    np.testing.assert_allclose(rep.biconjugate[0], 1.0, atol=1e-12)
    np.testing.assert_allclose(rep.biconjugate[1], 0.0, atol=1e-15)


def test_biconjugate_quartic_direction():
    prob = as_lagrangian(builtin("ex1"))
    base = make_base(prob.cone, prob.z_hat, 5)
    rep = biconjugate_check(prob, base, [[1.0, 0.0], [0.5, -1.5]])
    assert rep.ok
    assert rep.biconjugate[0, -1] == pytest.approx(0.25, abs=1e-6)


def _nonconvex_problem():
    def f(p):
        s = 0.5 * float(p @ p)
        return np.array([-s, s])

    def jf(p):
        return np.array([-p, p])

    def hf(p):
        return np.array([-np.eye(2), np.eye(2)])

    def u(x):
        return np.zeros(2)

    def ju(x):
        return np.zeros((2, 2))

    def hu(x):
        return np.zeros((2, 2, 2))

    return ProblemInstance("nonconvex", 2, 2, "lagrangian", {}, data=VectorData(f, jf, hf, u, ju, hu))


def test_biconjugate_rejects_nonconvex():
    prob = _nonconvex_problem()
    with pytest.raises(ValueError):
        biconjugate_check(prob, make_base(prob.cone, prob.z_hat, 3), [[1.0, 0.0]])


def test_biconjugate_rejects_hamiltonian():
    prob = builtin("ex1")
    with pytest.raises(ValueError):
        biconjugate_check(prob, make_base(prob.cone, prob.z_hat, 3), [[1.0, 0.0]])
