import numpy as np
import pytest

from tradeoff.errors import (
    BadWeights,
    DegenerateEvaluation,
    DuplicateNodes,
    NodeCoincidence,
    OutOfCell,
    RankDeficientConstraints,
    SingularVandermonde,
)
from tradeoff import expansion as ex
from tradeoff.functionals import CoeffEval, FunctionalSet, PointEval, apply
from tradeoff.weights import parse_weight_rule, weight_array


# ---- polynomial interpolation ----

def test_poly_power_values():
    assert ex.poly_power([-1.0, 1.0], 0.0) == 0.5
    assert ex.poly_power([-1.0, 0.0, 1.0], 0.5) == pytest.approx(0.0625, rel=1e-15)
    assert ex.poly_power([-1.0, 0.0, 1.0], 0.0) == 0.0


def test_poly_seminorm_values():
    assert ex.poly_lagrangian_seminorm([-1.0, 1.0], 0.0) == 2.0
    assert ex.poly_lagrangian_seminorm([-1.0, 0.0, 1.0], 0.5) == pytest.approx(16.0, rel=1e-15)


def test_poly_identity_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(1, 11))
        nodes = np.sort(rng.uniform(-1, 1, n + 1))
        x = float(rng.uniform(-1, 1))
        if np.min(np.abs(x - nodes)) < 1e-9:
            continue
        prod = ex.poly_power(nodes, x) * ex.poly_lagrangian_seminorm(nodes, x)
        assert prod == pytest.approx(1.0, rel=1e-12)


def test_poly_errors():
    with pytest.raises(DuplicateNodes):
        ex.poly_power([0.0, 0.0, 1.0], 0.5)
    with pytest.raises(NodeCoincidence):
        ex.poly_lagrangian_seminorm([-1.0, 0.0, 1.0], 0.0)


# ---- connect-the-dots ----

def test_ctd_values():
    assert ex.ctd_power(0.0, 1.0, 0.5) == 0.5
    assert ex.ctd_lagrangian_norm(0.0, 1.0, 0.5) == 2.0
    assert ex.ctd_power(0.0, 2.0, 0.5) == 0.75
    assert ex.ctd_lagrangian_norm(0.0, 1.0, 0.25) == 4.0
    prod = ex.ctd_power(0.0, 1.0, 0.25) * ex.ctd_lagrangian_norm(0.0, 1.0, 0.25)
    assert prod == pytest.approx(1.5, rel=1e-15)


def test_ctd_band_and_midpoint():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        xk = rng.uniform(-1, 1)
        xk1 = xk + rng.uniform(1e-3, 2)
        x = xk + rng.uniform(0.01, 0.99) * (xk1 - xk)
        prod = ex.ctd_power(xk, xk1, x) * ex.ctd_lagrangian_norm(xk, xk1, x)
        assert 1.0 - 1e-12 <= prod <= 2.0 + 1e-12
    assert ex.ctd_power(0.2, 0.8, 0.5) * ex.ctd_lagrangian_norm(0.2, 0.8, 0.5) \
        == pytest.approx(1.0, abs=1e-12)


def test_ctd_boundary_limit():
    # product -> 2 as x approaches a cell endpoint
    prod = ex.ctd_power(0.0, 1.0, 0.999999) * ex.ctd_lagrangian_norm(0.0, 1.0, 0.999999)
    assert prod == pytest.approx(2.0, rel=1e-5)


def test_ctd_out_of_cell():
    with pytest.raises(OutOfCell):
        ex.ctd_power(0.0, 1.0, 1.0)
    with pytest.raises(OutOfCell):
        ex.ctd_lagrangian_norm(0.0, 1.0, -0.5)


# ---- Taylor data ----

def test_taylor_values():
    assert ex.taylor_power("1", 3) == pytest.approx(1.0 / 6.0, rel=1e-15)
    assert ex.taylor_lagrangian_norm("1", 3) == pytest.approx(6.0, rel=1e-15)
    assert ex.taylor_power("1", 0) == 1.0
    assert ex.taylor_power("factorial_sq_over:2^j", 2) == pytest.approx(0.5, rel=1e-14)


def test_taylor_product_one():
    for rule in ["1", "(j+1)^2", "factorial_sq_over:2^j"]:
        for k in [0, 1, 5, 20]:
            prod = ex.taylor_power(rule, k) * ex.taylor_lagrangian_norm(rule, k)
            assert prod == pytest.approx(1.0, abs=1e-14)


def test_taylor_bad_weights():
    with pytest.raises(BadWeights):
        ex.taylor_power(lambda j: -1.0, 2, probe=0)


def test_taylor_divergence_warning():
    # rho_j = (j!)^2 2^j makes rho_j/(j!)^2 blow up
    with pytest.warns(UserWarning):
        ex.taylor_power("factorial_sq_over:0.5^j", 1)


# ---- orthogonal series ----

def test_ortho_single_term():
    power, bump, norm = ex.ortho_power_and_bump([2.0])
    assert power == 2.0 and norm == 0.5
    assert bump.tolist() == [0.5]


def test_ortho_345():
    power, bump, norm = ex.ortho_power_and_bump([3.0, 4.0])
    assert power == 5.0
    assert bump.tolist() == [0.12, 0.16]
    assert norm == pytest.approx(0.2, rel=1e-15)
    assert power * norm == pytest.approx(1.0, abs=1e-15)


def test_ortho_degenerate():
    with pytest.raises(DegenerateEvaluation):
        ex.ortho_power_and_bump([0.0, 0.0])


# ---- weighted Chebyshev spaces ----

def test_cheb_lagrangians_linear():
    fs = FunctionalSet([PointEval(-1.0), PointEval(1.0)])
    u = ex.cheb_lagrangians(fs, "1", 1)
    assert np.allclose(u[0].coeffs, [0.5, -0.5])  # (T0 - T1)/2 = (1-x)/2
    assert np.allclose(u[1].coeffs, [0.5, 0.5])


def test_cheb_lagrangians_coeff_data():
    fs = FunctionalSet([CoeffEval(j) for j in range(4)])
    u = ex.cheb_lagrangians(fs, "1", 3)
    assert np.allclose([f.coeffs for f in u], np.eye(4))


def test_cheb_lagrangians_kronecker():
    n = 10
    nodes = np.sort(np.cos(np.arange(n + 1) * np.pi / n))
    fs = FunctionalSet([PointEval(x) for x in nodes])
    us = ex.cheb_lagrangians(fs, "(j+1)^2", n)
    vals = np.array([[apply(lam, u) for u in us] for lam in fs])
    assert np.max(np.abs(vals - np.eye(n + 1))) <= 1e-9


def test_cheb_lagrangians_errors():
    from tradeoff.functionals import DerivEval
    # structurally distinct functionals with identical action: singular rows
    fs = FunctionalSet([PointEval(0.5), DerivEval(0.5, 0)])
    with pytest.raises(SingularVandermonde):
        ex.cheb_lagrangians(fs, "1", 1)
    with pytest.raises(SingularVandermonde):
        ex.cheb_lagrangians(FunctionalSet([PointEval(0.0)]), "1", 3)


def test_cheb_power_zero_for_data_functional():
    nodes = np.linspace(-1, 1, 6)
    fs = FunctionalSet([PointEval(x) for x in nodes])
    p = ex.cheb_power_addone(fs, "(j+1)^2", 5, 40, PointEval(nodes[2]))
    assert p <= 1e-12


def test_cheb_power_single_tail_term():
    nodes = np.linspace(-1, 1, 4)
    fs = FunctionalSet([PointEval(x) for x in nodes])
    mu = PointEval(0.1)
    # with K = n+1 the sum has one term |mu(eps_{n+1})| / sqrt(w_{n+1})
    p = ex.cheb_power_addone(fs, "(j+1)^2", 3, 4, mu)
    assert p == pytest.approx(ex.cheb_power_one_term(fs, "(j+1)^2", 3, mu), rel=1e-14)


def test_cheb_power_monotone_in_tail_order():
    nodes = np.linspace(-1, 1, 6)
    fs = FunctionalSet([PointEval(x) for x in nodes])
    mu = PointEval(-0.37)
    prev = 0.0
    for K in [6, 10, 20, 40, 80]:
        p = ex.cheb_power_addone(fs, "(j+1)^2", 5, K, mu)
        assert p >= prev - 1e-15
        prev = p


def test_cheb_bump_examples():
    bump = ex.cheb_bump_min(None, "1", 3, CoeffEval(0))
    assert np.allclose(bump.coeffs, [1, 0, 0, 0])
    assert bump.norm() == pytest.approx(1.0)
    bump2 = ex.cheb_bump_min(FunctionalSet([PointEval(0.0)]), "1", 1, CoeffEval(1))
    assert np.allclose(bump2.coeffs, [0.0, 1.0])
    assert bump2.norm() == pytest.approx(1.0)


def test_cheb_bump_constraints_and_tradeoff():
    nodes = np.linspace(-1, 1, 8)
    fs = FunctionalSet([PointEval(x) for x in nodes])
    mu = PointEval(0.63)
    bump = ex.cheb_bump_min(fs, "(j+1)^2", 60, mu)
    assert abs(apply(mu, bump) - 1.0) <= 1e-8
    for lam in fs:
        assert abs(apply(lam, bump)) <= 1e-8
    power = ex.cheb_power_addone(fs, "(j+1)^2", 7, 60, mu)
    assert power * bump.norm() >= 1.0 - 1e-8


def test_cheb_bump_rank_deficient():
    with pytest.raises(RankDeficientConstraints):
        # more constraints than basis functions
        fs = FunctionalSet([PointEval(x) for x in np.linspace(-1, 1, 5)])
        ex.cheb_bump_min(fs, "1", 3, PointEval(0.123))


# ---- weight rules ----

def test_weight_rule_grammar():
    assert parse_weight_rule("1")(5) == 1.0
    assert parse_weight_rule("(j+1)^2")(3) == 16.0
    assert parse_weight_rule("factorial_sq_over:2^j")(2) == 1.0
    assert np.allclose(weight_array("(j+1)^2", 3), [1, 4, 9, 16])
    with pytest.raises(BadWeights):
        parse_weight_rule("j^2 + bogus")
    with pytest.raises(BadWeights):
        parse_weight_rule("-3")


def test_expansion_norm():
    f = ex.ExpansionFunction("chebyshev", [1.0, 2.0], parse_weight_rule("(j+1)^2"))
    assert f.norm_squared() == pytest.approx(1.0 + 4.0 * 4.0)
