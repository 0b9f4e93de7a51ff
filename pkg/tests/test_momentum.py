import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifflat import clifford as cl
from clifflat import momentum as mo
from clifflat.clifford import Multivector
from clifflat.lattice import LatticeBox
from clifflat.momentum import BrillouinGrid, MomentumError, SymbolKind

PI = math.pi


def test_symbol_examples():
    assert mo.central_symbol((PI / 2,), 1.0, 1).magnitude == pytest.approx(1.0, abs=1e-15)
    assert mo.central_symbol((0.0, 0.0), 1.0, 2).magnitude_sq == 0
    assert mo.dh_symbol((PI,), 1.0, 1).magnitude_sq == pytest.approx(4.0, abs=1e-12)
    assert mo.dh_symbol((2 * PI, 0.0), 0.5, 2).magnitude_sq == pytest.approx(16.0, abs=1e-12)
    assert mo.kg_dispersion((0.0,), 1.0, 1, 1.0) == -1.0
    assert mo.kg_dispersion((PI,), 1.0, 1, 0.0) == pytest.approx(4.0)
    assert mo.kg_dispersion((PI, PI), 1.0, 2, 2.0) == pytest.approx(4.0)


@given(st.integers(1, 3), st.floats(0.25, 2.0), st.lists(st.floats(-PI, PI), min_size=3, max_size=3))
@settings(max_examples=100, deadline=None)
def test_closed_forms_match_geometric_square(n, h, raw):
    xi = np.array(raw[:n]) / h
    for kind in (SymbolKind.CENTRAL, SymbolKind.DH):
        via_product = mo.symbol_value(kind, xi, h, n).magnitude_sq
        closed = float(mo.magnitude_sq(kind, xi[None, :], h)[0])
        assert via_product == pytest.approx(closed, rel=1e-12, abs=1e-12)


def test_dh_square_is_scalar_dispersion(rng):
    for n in (1, 2, 3):
        xi = rng.uniform(-PI, PI, n)
        s = mo.dh_symbol(xi, 1.0, n).value
        sq = s * s
        target = mo.kg_dispersion(xi, 1.0, n, 0.0)
        assert (sq - Multivector.scalar(s.sig, target)).max_abs() < 1e-12


def test_gamma_mass_square(rng):
    for n in (1, 2, 3):
        xi = rng.uniform(-PI, PI, n)
        s = mo.dh_symbol(xi, 1.0, n).value
        assert mo.gamma_anticommutator(s) < 1e-14
        m = float(rng.uniform(0, 2))
        assert mo.massive_square_defect(s, m, mo.kg_dispersion(xi, 1.0, n, 0.0)) < 1e-12
        wrong = mo.massive_square_defect(s, m, mo.kg_dispersion(xi, 1.0, n, m))
        assert wrong == pytest.approx(m * m, rel=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_zero_counts(n):
    grid = BrillouinGrid(n, 1.0, 16)
    central = mo.zero_scan(grid, "central")
    assert central.torus_count == 2 ** n
    assert central.closed_count == 3 ** n
    dh = mo.zero_scan(grid, "dh")
    assert dh.torus_count == 1 and dh.torus_locations == ((0.0,) * n,)
    kg = mo.zero_scan(grid, "kg", m=1.0)
    assert kg.torus_count == 0
    assert central.to_json()["claimed_count"] == 2 * n + 1


def test_zero_scan_requires_fine_grid():
    with pytest.raises(MomentumError):
        mo.zero_scan(BrillouinGrid(1, 1.0, 8), "dh")
    with pytest.raises(MomentumError):
        BrillouinGrid(1, 1.0, 7)
    with pytest.raises(MomentumError):
        BrillouinGrid(0, 1.0, 16)


def test_grid_nodes():
    g = BrillouinGrid(2, 0.5, 4)
    assert g.count == 16 and g.nodes().shape == (16, 2)
    assert g.axis_nodes()[0] == pytest.approx(-2 * PI)
    assert g.closed_axis_nodes()[-1] == pytest.approx(2 * PI)
    rows = mo.dispersion_rows(g, "dh")
    assert len(rows) == 16 and len(rows[0]) == 3


@pytest.mark.parametrize("kind", list(SymbolKind))
@pytest.mark.parametrize("n", [1, 2])
def test_plane_waves_diagonalize(kind, n, rng):
    box = LatticeBox.cube(n, 1.0, 0, 7, periodic=True)
    for _ in range(5):
        xi = tuple(2 * PI * int(rng.integers(0, 8)) / 8 for _ in range(n))
        assert mo.plane_wave_check(xi, kind, box, m=0.7, rng=rng) < 1e-12


def test_plane_wave_rejects_bad_input():
    box = LatticeBox.cube(1, 1.0, 0, 7, periodic=True)
    with pytest.raises(MomentumError):
        mo.plane_wave_check((0.3,), "dh", box)
    with pytest.raises(MomentumError):
        mo.plane_wave_check((0.0,), "dh", LatticeBox.cube(1, 1.0, 0, 7))
    with pytest.raises(MomentumError):
        mo.plane_wave_check((0.0, 0.0), "dh", box)


def test_wrap_momentum():
    assert mo.wrap_momentum((PI,), 1.0) == pytest.approx((-PI,))
    assert mo.wrap_momentum((0.5,), 1.0) == pytest.approx((0.5,))


@pytest.mark.parametrize("n", [1, 2])
def test_chi_momentum_shift(n, rng):
    box = LatticeBox.cube(n, 1.0, 0, 7, periodic=True)
    xi = tuple(2 * PI * int(rng.integers(0, 8)) / 8 for _ in range(n))
    a = Multivector.random(box.sig, rng, complex_=True)
    r, shifted = mo.chi_momentum_shift_check(box, xi, a)
    assert r < 1e-12
    r2, back = mo.chi_momentum_shift_check(box, shifted, a)
    assert r2 < 1e-12
    assert mo.wrap_momentum(back, 1.0) == pytest.approx(mo.wrap_momentum(xi, 1.0))
    with pytest.raises(MomentumError):
        mo.chi_momentum_shift_check(LatticeBox.cube(n, 1.0, 0, 6, periodic=True))


def test_symbols_live_in_doubled_algebra():
    assert mo.dh_symbol((0.1, 0.2), 1.0, 2).value.sig == cl.clnn(2)
