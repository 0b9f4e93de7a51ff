from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifflat import lattice as lf
from clifflat import opcalc as oc
from clifflat.lattice import Field, LatticeBox
from clifflat.opcalc import LOWER, RAISE, FunFactor, OperatorExpr, compose


def witt(n, j, kind):
    return OperatorExpr.witt(n, j, kind)


def test_compose_moves_letter_past_function():
    out = compose(witt(1, 1, LOWER), OperatorExpr.fun(1, "f"))
    assert out == compose(OperatorExpr.fun(1, FunFactor("f", (-1,), 1)), witt(1, 1, LOWER))
    assert str(out) == "(+ (* 1 f[-1]' e1+))"


def test_compose_witt_relations():
    n = 2
    assert compose(witt(n, 1, LOWER), witt(n, 1, RAISE)) == OperatorExpr.one(n) - compose(
        witt(n, 1, RAISE), witt(n, 1, LOWER))
    anti = compose(witt(n, 1, RAISE), witt(n, 2, RAISE)) + compose(witt(n, 2, RAISE), witt(n, 1, RAISE))
    assert anti.is_zero()
    assert compose(witt(n, 2, LOWER), witt(n, 2, LOWER)).is_zero()
    mixed = compose(witt(n, 2, LOWER), witt(n, 1, RAISE)) + compose(witt(n, 1, RAISE), witt(n, 2, LOWER))
    assert mixed.is_zero()


def test_normal_order_canonical():
    word = ((2, LOWER), (1, LOWER), (1, RAISE))
    out = dict(oc.normal_order(word))
    # e2+ e1+ e1- = e1+ e1- e2+ = e2+ - e1- e1+ e2+
    assert all(list(w) == sorted(w) for w in out)
    assert out == {((2, LOWER),): 1, ((1, RAISE), (1, LOWER), (2, LOWER)): -1}


def test_diff_expand_examples():
    n = 1
    f = OperatorExpr.fun(n, "f")
    expected = (OperatorExpr.fun(n, FunFactor("f", (1,), 0)) - f).scale(1, 1)
    assert oc.diff_expand(1, 1, ["f"], n) == expected
    assert oc.diff_expand(1, -1, [], n).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("direction", [1, -1])
def test_diff_expand_agrees_with_direct_shift(n, direction):
    for word in (["f", "g"], ["f", "g", "f"]):
        for j in range(1, n + 1):
            direct = oc.diff(OperatorExpr.fun(n, *word), j, direction)
            assert oc.diff_expand(j, direction, word, n) == direct


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("direction", [1, -1])
def test_leibniz(n, direction):
    assert oc.check_leibniz(n, direction).equal
    mutated = oc.check_leibniz(n, direction, mutate=True)
    assert not mutated.equal
    assert mutated.to_json()["lhs"] != mutated.to_json()["rhs"]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("direction", [1, -1])
def test_nilpotent(n, direction):
    assert oc.check_nilpotent(n, direction).label == "zero"
    assert oc.check_nilpotent(n, direction, single_axis=True).equal


@pytest.mark.parametrize("n", [1, 2, 3])
def test_laplacian_factorization(n):
    assert oc.check_laplacian_factorization(n).label == "equal"
    assert oc.check_laplacian_factorization(n, half_only=True).label == "not equal"


def test_involution_parity_bookkeeping():
    f = FunFactor("f", (0, 0), 0)
    twice = oc.move_witt_past((1, LOWER), oc.move_witt_past((1, LOWER), f))
    assert twice == FunFactor("f", (-2, 0), 0)
    once = oc.move_witt_past((2, RAISE), f)
    assert once == FunFactor("f", (0, 1), 1)


def test_involute_distributes_without_reversal():
    e = OperatorExpr.fun(1, "f", "g").involute()
    assert e == OperatorExpr.fun(1, FunFactor("f", (0,), 1), FunFactor("g", (0,), 1))


def test_function_symbols_do_not_commute():
    assert OperatorExpr.fun(1, "f", "g") != OperatorExpr.fun(1, "g", "f")


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        compose(OperatorExpr.one(1), OperatorExpr.one(2))
    with pytest.raises(ValueError):
        oc.check_leibniz(0)


N = 2
letters = st.tuples(st.integers(1, N), st.sampled_from([RAISE, LOWER]))
factors = st.builds(
    FunFactor, st.sampled_from(["f", "g"]),
    st.tuples(*[st.integers(-1, 1)] * N), st.integers(0, 1))
terms = st.tuples(st.lists(factors, max_size=2), st.lists(letters, max_size=2),
                  st.integers(-2, 2).filter(bool), st.integers(0, 1))


@st.composite
def expressions(draw):
    out = OperatorExpr.zero(N)
    for fw, ww, c, p in draw(st.lists(terms, min_size=1, max_size=2)):
        e = OperatorExpr.fun(N, *fw) if fw else OperatorExpr.one(N)
        for letter in ww:
            e = compose(e, witt(N, *letter))
        out = out + e.scale(Fraction(c), p)
    return out


@given(expressions(), expressions(), expressions())
@settings(max_examples=200, deadline=None)
def test_composition_is_associative(a, b, c):
    assert compose(a, compose(b, c)) == compose(compose(a, b), c)


@given(expressions())
@settings(max_examples=50, deadline=None)
def test_normal_form_is_idempotent(a):
    assert compose(OperatorExpr.one(N), a) == a == compose(a, OperatorExpr.one(N))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_symbolic_verdicts_agree_with_fields(n, rng):
    box = LatticeBox.cube(n, 0.5, 0, 7)
    f = Field.random(box, rng)
    lap = lf.star_laplacian(f)
    fac = lf.dirac_plus(lf.dirac_minus(f)) + lf.dirac_minus(lf.dirac_plus(f))
    assert oc.check_laplacian_factorization(n).equal == ((fac - lap).max_norm() < 1e-10)
    assert oc.check_nilpotent(n, 1).equal == (lf.dirac_plus(lf.dirac_plus(f)).max_norm() < 1e-10)
    assert oc.check_nilpotent(n, -1).equal == (lf.dirac_minus(lf.dirac_minus(f)).max_norm() < 1e-10)
