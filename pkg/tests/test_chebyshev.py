import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import chebyshev as npcheb

from clifflat import chebyshev as cb
from clifflat import clifford as cl
from clifflat import lattice as lf
from clifflat.chebyshev import ChebyshevError, ChebyshevParams, Convention
from clifflat.clifford import Multivector
from clifflat.lattice import LatticeBox, MassTerm


def exact_T(k, lam):
    lam = Fraction(lam)
    t0, t1 = Fraction(1), lam
    if k == 0:
        return t0
    for _ in range(k - 1):
        t0, t1 = t1, 2 * lam * t1 - t0
    return t1


def test_examples():
    assert cb.cheb_T(0, 0.37) == 1
    assert cb.cheb_T(1, -0.7) == pytest.approx(-0.7, abs=1e-15)
    assert cb.cheb_T(3, 2) == 26
    assert [cb.cheb_T(k, 2.0) for k in range(4)] == [1, 2, 7, 26]


@pytest.mark.parametrize("lam", [-3, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 3])
def test_against_exact_recurrence(lam):
    for k in range(51):
        ref = float(exact_T(k, lam))
        assert abs(cb.cheb_T(k, lam) - ref) <= 1e-9 * max(1.0, abs(ref))


@given(st.integers(0, 30), st.floats(-3, 3))
@settings(max_examples=300, deadline=None)
def test_against_numpy_series(k, lam):
    ref = npcheb.chebval(lam, [0] * k + [1])
    assert abs(cb.cheb_T(k, lam) - ref) <= 1e-9 * max(1.0, abs(ref))


@given(st.integers(-40, 40), st.floats(-4, 4))
@settings(max_examples=200, deadline=None)
def test_negative_index_symmetry(k, lam):
    assert cb.cheb_T(-k, lam) == cb.cheb_T(k, lam)


def test_hypergeometric_cross_check():
    for lam in np.linspace(-1, 3, 33):
        for k in range(9):
            ref = cb.cheb_T(k, lam)
            assert abs(cb.hyp2f1_terminating(k, (1 - lam) / 2) - ref) <= 1e-9 * max(1, abs(ref))


def test_conjugate_root_power():
    assert cb.conjugate_root_power(0, 0.3, 1) == 1
    assert cb.conjugate_root_power(1, 2.0, 1) == pytest.approx(2 + math.sqrt(3), abs=1e-12)
    rng = np.random.default_rng(3)
    for _ in range(20):
        k, lam = int(rng.integers(-10, 10)), float(rng.uniform(1, 3)) * rng.choice([-1, 1])
        prod = cb.conjugate_root_power(k, lam, 1) * cb.conjugate_root_power(k, lam, -1)
        assert prod == pytest.approx(1.0, rel=1e-9)
        lhs = cb.conjugate_root_power(k + 1, lam, 1) + cb.conjugate_root_power(k - 1, lam, 1)
        assert lhs == pytest.approx(2 * lam * cb.conjugate_root_power(k, lam, 1), rel=1e-9)
    with pytest.raises(ChebyshevError):
        cb.conjugate_root_power(1, 2.0, 0)


def test_multivariable_examples():
    sig1, sig2 = cl.cl0n(1), cl.cl0n(2)
    p1 = ChebyshevParams(1, 1.0, 0.0, (2.0,), (0.0,), Multivector.scalar(sig1))
    assert cb.cheb_T0_multi(p1, (2,)) == Multivector.scalar(sig1, 7)
    p2 = ChebyshevParams(2, 1.0, 0.0, (2.0, 1.0), (0.0, 0.0), Multivector.blade(sig2, 1))
    assert cb.cheb_T0_multi(p2, (1, 5)) == 2 * Multivector.blade(sig2, 1)
    flat = ChebyshevParams(2, 1.0, 0.0, (1.0, 1.0), (0.0, 0.0), Multivector.blade(sig2, 1, 2))
    assert cb.cheb_T0_multi(flat, (-3, 4)) == Multivector.blade(sig2, 1, 2)


def test_conjugate_roots_closed_form(rng):
    for n in (1, 2, 3):
        params = ChebyshevParams.dirac_split(n, 1.0, 1.3, Multivector.random(cl.cl0n(n), rng))
        for x in LatticeBox.cube(n, 1.0, -3, 3).sites():
            a, b = cb.cheb_T0_multi(params, x), cb.cheb_T0_conjugate_roots(params, x)
            assert a.allclose(b, rtol=1e-12, atol=1e-12)


def test_projected_examples(rng):
    sig = cl.cl0n(1)
    p = ChebyshevParams(1, 1.0, 0.0, (1.0,), (0.5,), Multivector.scalar(sig))
    assert cb.cheb_projected(p, 1, (0,)) == Multivector.scalar(sig)
    params = ChebyshevParams.dirac_split(2, 1.0, 1.0, Multivector.random(cl.cl0n(2), rng))
    for x in LatticeBox.cube(2, 1.0, -2, 2).sites():
        plus, minus = cb.cheb_projected(params, 1, x), cb.cheb_projected(params, -1, x)
        assert (plus + minus).allclose(cb.cheb_T0_multi(params, x))
        sigma = (-1) ** (sum(x) % 2)
        assert (sigma * cl.involution_operator_K(plus)).allclose(plus)
    zero_alpha = ChebyshevParams(1, 1.0, 0.0, (2.0,), (0.0,), Multivector.scalar(sig))
    with pytest.raises(ChebyshevError):
        cb.cheb_projected(zero_alpha, 1, (0,))


@pytest.mark.parametrize("conv", list(Convention))
def test_projector_sum_both_conventions(conv, rng):
    params = ChebyshevParams.dirac_split(2, 0.5, 1.0, Multivector.random(cl.cl0n(2), rng))
    g = cb.cheb_T0_field(params, LatticeBox.cube(2, 0.5, -3, 3))
    ident = lambda f: f  # noqa: E731
    total = cb.projected_apply(ident, g, 1, conv) + cb.projected_apply(ident, g, -1, conv)
    assert (total - g).max_norm() == 0


def test_binomial_projection_identity(rng):
    n = 2
    for sign in (1, -1):
        p = (np.eye(4) + sign * cl.k_matrix(n)) / 2
        for _ in range(10):
            lam, mu, s = rng.uniform(-1, 3), rng.uniform(-1, 1), int(rng.integers(0, 7))
            c = (1 - lam) / 2
            a = rng.standard_normal(4)
            direct = np.linalg.matrix_power(c * np.eye(4) + mu * p, s) @ a
            assert np.allclose(cb.operator_power_split(c, mu, s, p) @ a, direct, atol=1e-12)
        k = 5
        series = sum(
            math.prod((-k + i) * (k + i) / ((0.5 + i) * (i + 1)) for i in range(t))
            * np.linalg.matrix_power(0.2 * np.eye(4) + 0.3 * p, t) for t in range(k + 1))
        assert np.allclose(cb.hyp2f1_operator(k, 0.2, 0.3, p), series, atol=1e-12)


def test_params_validation():
    sig = cl.cl0n(2)
    with pytest.raises(ChebyshevError):
        ChebyshevParams(2, 1.0, 0.0, (1.0,), (0.0, 0.0), Multivector.scalar(sig))
    with pytest.raises(ChebyshevError):
        ChebyshevParams(2, 1.0, 0.0, (1.0, 1.0), (0.0, 0.0), Multivector.scalar(cl.cl0n(3)))
    p = ChebyshevParams.dirac_split(3, 0.5, 2.0)
    assert sum(p.y) == pytest.approx((2.0 * 0.5) ** 2 / 2)
    assert sum(p.alpha) == pytest.approx(1.5)
    assert p.satisfies_kg_constraint()


def test_kg_builder_examples():
    s = cb.build_kg_solution(1, 1.0, math.sqrt(2), (1.0,), box=LatticeBox.cube(1, 1.0, -4, 4))
    vals = [s.field.at((k,)).scalar_part().real for k in range(4)]
    assert vals == pytest.approx([1, 2, 7, 26], abs=1e-12)
    assert lf.kg_residual(s.field, math.sqrt(2))[1] < 1e-12
    flat = cb.build_kg_solution(2, 1.0, 0.0)
    assert (flat.field - lf.Field.constant(flat.field.box, 1.0)).max_norm() == 0
    s2 = cb.build_kg_solution(2, 1.0, 1.0, (0.5, 0.5), box=LatticeBox.cube(2, 1.0, 0, 7))
    assert s2.params.lam == (1.25, 1.25)
    assert lf.kg_residual(s2.field, 1.0)[1] < 1e-10
    with pytest.raises(ChebyshevError):
        cb.build_kg_solution(2, 1.0, 1.0, (0.5, 0.6))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("h", [1.0, 0.5])
@pytest.mark.parametrize("m", [0.0, 1.0, math.sqrt(2)])
def test_kg_builder_residual(n, h, m, rng):
    w = rng.dirichlet(np.ones(n))
    w[-1] = 1.0 - w[:-1].sum()
    a = Multivector.random(cl.cl0n(n), rng)
    s = cb.build_kg_solution(n, h, m, w, a, LatticeBox.cube(n, h, -4, 4))
    assert lf.kg_residual(s.field, m)[1] < 1e-9
    assert s.params.kg_constraint_defect() < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_k_variant_dirac_solutions(n, rng):
    a = Multivector.random(cl.cl0n(n), rng)
    fp, fm, rep = cb.build_dirac_solutions(n, 1.0, math.sqrt(2), a, LatticeBox.cube(n, 1.0, -4, 4),
                                           mass_term=MassTerm.K)
    form = rep["x_mass_form"]
    assert max(form["cross"]) < 1e-9 and form["full"] < 1e-9
    assert max(form["eigen"]) == 0
    assert fp.builder == "dirac_plus" and fm.params is fp.params


def test_massless_constant_dirac_solution():
    fp, fm, rep = cb.build_dirac_solutions(2, 1.0, 0.0, box=LatticeBox.cube(2, 1.0, -3, 3))
    assert max(rep["x_mass_form"]["literal"]) == 0
    assert fp.field.max_norm() == 0


def test_chi_variant_is_reported_not_asserted():
    for conv in Convention:
        _, _, rep = cb.build_dirac_solutions(1, 1.0, math.sqrt(2), mass_term=MassTerm.CHI,
                                             convention=conv)
        assert rep["convention"] == conv.value
        for form in ("x_mass_form", "scalar_mass_form", "spinor_form"):
            assert set(rep[form]) == {"literal", "cross", "full", "eigen"}


def test_recurrence_examples():
    p = ChebyshevParams(1, 1.0, 0.0, (2.0,), (0.0,), Multivector.scalar(cl.cl0n(1)))
    rep = cb.check_recurrence(p, LatticeBox.cube(1, 1.0, -4, 4))
    assert rep["verdicts"] == {"unprojected": True}
    flat = ChebyshevParams(2, 1.0, 0.0, (1.0, 1.0), (0.0, 0.0), Multivector.scalar(cl.cl0n(2)))
    assert cb.check_recurrence(flat, LatticeBox.cube(2, 1.0, -2, 2))["verdicts"]["unprojected"]
    with pytest.raises(ChebyshevError):
        cb.check_recurrence(flat, LatticeBox.cube(2, 1.0, 0, 1))


def test_projected_recurrence_depends_on_convention():
    p = ChebyshevParams.dirac_split(2, 1.0, math.sqrt(2))
    v = cb.check_recurrence(p, LatticeBox.cube(2, 1.0, -4, 4))["verdicts"]
    assert v == {"unprojected": True, "static": True, "shifted": False}
