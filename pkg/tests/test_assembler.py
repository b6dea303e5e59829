import numpy as np
import pytest

from conftest import ex1_gamma, ex2_gamma
from svhj import SupportedSet, builtin, make_base
from svhj.assembler import (
    assemble_U,
    assembled_time_derivative,
    check_hyp_u,
    check_hyp_u2,
    hj_residual,
    set_derivative_space,
    set_derivative_time,
    solution_point,
    u_zeta_halfspace,
    v_zeta_halfspace,
)
from svhj.exceptions import HorizonExceededError

Z_HAT = np.array([1.0, 1.0])
X1 = np.array([1.0, 2.0])
X2 = np.array([1.0, 0.0])
rng = np.random.default_rng(11)


# -- half-spaces per direction ------------------------------------------------------


@pytest.mark.parametrize(
    "name,zeta,x,offset",
    [
        ("ex1", [1.0, 0.0], X1, 0.5),
        ("ex1", [0.0, 1.0], X1, -2.25),
        ("ex2", [0.0, 1.0], X2, -0.5),
    ],
)
def test_u_zeta_halfspace(name, zeta, x, offset):
    H = u_zeta_halfspace(builtin(name).scalarize(zeta), 1.0, x, Z_HAT)
    np.testing.assert_array_equal(H.normal, zeta)
    assert H.offset == pytest.approx(offset, abs=1e-14)


@pytest.mark.parametrize("name", ["ex1", "ex2", "concave-init"])
def test_characteristic_value_halfspace_agrees(name):
    prob = builtin(name)
    for _ in range(10):
        z1 = rng.uniform()
        sp = prob.scalarize([z1, 1 - z1])
        t, x = rng.uniform(0, 0.9), rng.uniform(-2, 2, 2)
        a = u_zeta_halfspace(sp, t, x, Z_HAT)
        b = v_zeta_halfspace(sp, t, x, Z_HAT)
        assert a.offset == pytest.approx(b.offset, abs=1e-12)


def test_halfspace_rejects_off_base_z_hat():
    with pytest.raises(ValueError):
        u_zeta_halfspace(builtin("ex1").scalarize([1, 0]), 1.0, X1, [2.0, 1.0])


# -- assembly -----------------------------------------------------------------------


def test_assemble_ex1_m3(base3):
    U = assemble_U(builtin("ex1"), base3, 1.0, X1)
    np.testing.assert_allclose(U.offsets, [0.5, -0.65625, -2.25], atol=1e-14)


def test_assemble_ex2_m3(base3):
    U = assemble_U(builtin("ex2"), base3, 1.0, X2)
    np.testing.assert_allclose(U.offsets, [0.25, -0.1875, -0.5], atol=1e-14)


@pytest.mark.parametrize("name", ["ex1", "ex2", "concave-init"])
def test_assemble_at_time_zero(name, base5):
    prob = builtin(name)
    x = np.array([0.7, -1.3])
    U = assemble_U(prob, base5, 0.0, x)
    np.testing.assert_array_equal(U.offsets, [float(z @ prob.data.u0(x)) for z in base5.directions])


def test_assemble_identifies_failing_direction(base3):
    with pytest.raises(HorizonExceededError) as info:
        assemble_U(builtin("concave-init"), base3, 1.0, [0.5, 0.5])
    assert info.value.direction is not None
    assert "zeta=" in str(info.value)


@pytest.mark.parametrize("z1", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_solution_point_ex1(z1):
    g = solution_point(builtin("ex1"), [z1, 1 - z1], 1.0, X1)
    np.testing.assert_allclose(g, ex1_gamma(z1, 1.0, X1), atol=1e-13)


@pytest.mark.parametrize("z1", [0.0, 0.5, 1.0])
def test_solution_point_ex2(z1):
    g = solution_point(builtin("ex2"), [z1, 1 - z1], 1.0, X2)
    np.testing.assert_allclose(g, ex2_gamma(z1, 1.0, X2), atol=1e-14)


def test_solution_point_spot_values():
    prob = builtin("ex1")
    np.testing.assert_allclose(solution_point(prob, [1, 0], 1.0, X1), [0.5, -1.25], atol=1e-14)
    np.testing.assert_allclose(solution_point(prob, [0.5, 0.5], 1.0, X1), [0.875, -2.1875], atol=1e-14)
    np.testing.assert_allclose(solution_point(prob, [0, 1], 1.0, X1), [1.5, -2.25], atol=1e-14)


# -- hypothesis checks ----------------------------------------------------------------


def test_hyp_u_holds_ex1(base3):
    rep = check_hyp_u(assemble_U(builtin("ex1"), base3, 1.0, X1), 1e-6)
    assert rep.verdict == "holds"
    assert np.all(np.abs(rep.gap) < 1e-12)


def test_hyp_u_fails_ex2(base3):
    rep = check_hyp_u(assemble_U(builtin("ex2"), base3, 1.0, X2), 1e-6)
    assert rep.verdict == "fails"
    np.testing.assert_array_equal(rep.directions[rep.worst], [0.5, 0.5])
    assert rep.gap[rep.worst] == pytest.approx(0.0625, abs=1e-12)
    assert rep.support[rep.worst] == pytest.approx(-0.125, abs=1e-12)


def test_hyp_u_single_constraint(orthant):
    B = make_base(orthant, [1, 1], 2)
    S = SupportedSet(B, [0.3, -np.inf])
    assert check_hyp_u(S).holds


def test_hyp_u_gaps_never_negative():
    prob = builtin("ex2")
    base = make_base(prob.cone, prob.z_hat, 21)
    for _ in range(5):
        t, x = rng.uniform(0.1, 2), rng.uniform(-2, 2, 2)
        rep = check_hyp_u(assemble_U(prob, base, t, x))
        assert rep.gap.min() >= -1e-12


def test_hyp_u_ex1_on_grid():
    prob = builtin("ex1")
    base = make_base(prob.cone, prob.z_hat, 41)
    for t in np.linspace(0, 2, 5):
        for a in np.linspace(-2, 2, 5):
            for b in np.linspace(-2, 2, 5):
                assert check_hyp_u(assemble_U(prob, base, t, [a, b]), 1e-6).holds


def test_hyp_u_report_dict(base3):
    d = check_hyp_u(assemble_U(builtin("ex2"), base3, 1.0, X2)).to_dict()
    assert d["verdict"] == "fails"
    assert d["worst_zeta"] == [0.5, 0.5]
    assert len(d["records"]) == 3


def test_hyp_u2_diagonal_zero(base5):
    rep = check_hyp_u2(builtin("ex1"), base5, 1.0, X1)
    np.testing.assert_array_equal(np.diag(rep.slack), 0.0)


def test_hyp_u2_ex2_fails(base3):
    rep = check_hyp_u2(builtin("ex2"), base3, 1.0, X2)
    assert not rep.holds
    # closed-form points (1/2, 0), (1/16, -7/16), (0, -1/2): zeta=(1,0) at gamma_(0,1)
    assert rep.min_slack == pytest.approx(-0.25, abs=1e-14)
    z, xi = rep.worst_pair
    np.testing.assert_array_equal(z, [1.0, 0.0])
    np.testing.assert_array_equal(xi, [0.0, 1.0])


def test_hyp_u2_matches_closed_form_slacks(base5):
    gam = np.array([ex1_gamma(z[0], 1.0, X1) for z in base5.directions])
    vals = base5.directions @ gam.T
    expected = vals - np.diag(vals)[:, None]
    rep = check_hyp_u2(builtin("ex1"), base5, 1.0, X1)
    np.testing.assert_allclose(rep.slack, expected, atol=1e-13)


def test_hyp_u2_ex1_is_only_sufficient(base5):
    # the pairwise condition is violated although hyp_U holds for the example
    rep = check_hyp_u2(builtin("ex1"), base5, 1.0, X1)
    assert not rep.holds
    assert rep.min_slack == pytest.approx(-0.0205078125, abs=1e-14)
    z, xi = rep.worst_pair
    np.testing.assert_array_equal(z, [0.25, 0.75])
    np.testing.assert_array_equal(xi, [0.5, 0.5])
    assert check_hyp_u(assemble_U(builtin("ex1"), base5, 1.0, X1)).holds


def test_hyp_u2_rejects_lagrangian(base3):
    with pytest.raises(ValueError):
        check_hyp_u2(builtin("quad-lagrangian"), base3, 1.0, X1)


# -- derivatives and residuals ------------------------------------------------------


def test_set_derivative_time_ex1():
    D = set_derivative_time(builtin("ex1"), [1.0, 0.0], 1.0, X1, h=1e-4)
    assert D.offset == pytest.approx(-0.5, abs=1e-10)


def test_set_derivative_space_ex1():
    D = set_derivative_space(builtin("ex1"), [1.0, 0.0], 1.0, X1, [1.0, 0.0], h=1e-4)
    assert D.offset == pytest.approx(1.0, abs=1e-10)


def test_set_derivative_refinement():
    prob = builtin("ex2")
    a = set_derivative_time(prob, [0.3, 0.7], 0.5, [2.0, 1.0], h=1e-3).offset
    b = set_derivative_time(prob, [0.3, 0.7], 0.5, [2.0, 1.0], h=1e-4).offset
    assert abs(a - b) <= 1e-5


def test_set_derivative_needs_room():
    with pytest.raises(ValueError):
        set_derivative_time(builtin("ex1"), [1, 0], 1e-5, X1, h=1e-4)


def test_hj_residual_ex1():
    assert hj_residual(builtin("ex1"), [1.0, 0.0], 1.0, X1, 1e-4) <= 1e-7


def test_hj_residual_ex2():
    assert hj_residual(builtin("ex2"), [0.0, 1.0], 0.5, [2.0, 1.0], 1e-4) <= 1e-7


def test_hj_residual_second_order_ex2():
    prob = builtin("ex2")
    r2 = hj_residual(prob, [0.0, 1.0], 0.5, [2.0, 1.0], 1e-2)
    r3 = hj_residual(prob, [0.0, 1.0], 0.5, [2.0, 1.0], 1e-3)
    assert 50 <= r2 / r3 <= 200


def test_hj_residual_second_order_concave():
    prob = builtin("concave-init")
    r2 = hj_residual(prob, [0.4, 0.6], 0.3, [0.5, -0.2], 1e-2)
    r3 = hj_residual(prob, [0.4, 0.6], 0.3, [0.5, -0.2], 1e-3)
    assert 50 <= r2 / r3 <= 200


def test_hj_residual_exact_for_affine_ex1():
    # u is affine in (t, x) for the first example, so central differences
    # are exact and only roundoff remains at every step size
    prob = builtin("ex1")
    for h in (1e-2, 1e-3, 1e-4):
        assert hj_residual(prob, [0.3, 0.7], 1.0, X1, h) <= 1e-11


def test_assembled_time_derivative_matches_halfspace():
    prob = builtin("ex1")
    base = make_base(prob.cone, prob.z_hat, 11)
    for zeta in base.directions[[0, 4, 10]]:
        a = assembled_time_derivative(prob, base, zeta, 1.0, X1, 1e-4)
        b = set_derivative_time(prob, zeta, 1.0, X1, 1e-4)
        assert a.offset == pytest.approx(b.offset, abs=1e-7)
