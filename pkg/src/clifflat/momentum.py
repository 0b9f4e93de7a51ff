"""Momentum-space symbols of the lattice Dirac and Klein-Gordon operators.

Symbols live in Cl(n,n): e_1..e_n square to -1 and act on Cl(0,n) by left
multiplication, e_{n+1}..e_{2n} square to +1 and act by a -> a' e_j.
A plane wave exp(i<xi, x>) w is mapped by each lattice operator to the same
plane wave with amplitude (symbol acting on w).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import clifford as cl
from . import lattice as lf
from .clifford import Multivector
from .lattice import Field, LatticeBox

ZERO_EPS = 1e-9


class MomentumError(ValueError):
    pass


class SymbolKind(str, enum.Enum):
    CENTRAL = "central"
    DH = "dh"
    KG = "kg"


@dataclass(frozen=True)
class BrillouinGrid:
    """Uniform nodes xi_j = -pi/h + 2 pi i / (h N), i = 0..N-1, on the torus [-pi/h, pi/h)^n."""

    n: int
    h: float
    N: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise MomentumError(f"dimension must be >= 1, got {self.n}")
        if not self.h > 0:
            raise MomentumError(f"mesh width must be positive, got {self.h}")
        if self.N < 4 or self.N % 2:
            raise MomentumError(f"grid size must be even and >= 4, got {self.N}")

    def axis_nodes(self) -> np.ndarray:
        return -math.pi / self.h + 2.0 * math.pi * np.arange(self.N) / (self.h * self.N)

    def closed_axis_nodes(self) -> np.ndarray:
        """Nodes including the identified endpoint +pi/h."""
        return -math.pi / self.h + 2.0 * math.pi * np.arange(self.N + 1) / (self.h * self.N)

    def nodes(self, closed: bool = False) -> np.ndarray:
        """All nodes, shape (count, n), in lexicographic order."""
        ax = self.closed_axis_nodes() if closed else self.axis_nodes()
        mesh = np.meshgrid(*([ax] * self.n), indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.n)

    @property
    def count(self) -> int:
        return self.N ** self.n


@dataclass(frozen=True)
class SymbolValue:
    value: Multivector
    magnitude_sq: float

    @property
    def magnitude(self) -> float:
        return math.sqrt(max(self.magnitude_sq, 0.0))


def _symbol(value: Multivector) -> SymbolValue:
    sq = cl.geometric_product(value, value).scalar_part()
    return SymbolValue(value, float(sq.real))


def central_symbol(xi: Sequence[float], h: float, n: int) -> SymbolValue:
    """sum_j i e_j sin(h xi_j) / h."""
    sig = cl.clnn(n)
    coeffs = np.zeros(sig.size, dtype=np.complex128)
    for j in range(n):
        coeffs[1 << j] = 1j * math.sin(h * xi[j]) / h
    return _symbol(Multivector(sig, coeffs))


def dh_symbol(xi: Sequence[float], h: float, n: int) -> SymbolValue:
    """sum_j i e_j sin(h xi_j)/h + e_{j+n} (2/h) sin^2(h xi_j / 2)."""
    sig = cl.clnn(n)
    coeffs = np.zeros(sig.size, dtype=np.complex128)
    for j in range(n):
        coeffs[1 << j] = 1j * math.sin(h * xi[j]) / h
        coeffs[1 << (j + n)] = (2.0 / h) * math.sin(h * xi[j] / 2.0) ** 2
    return _symbol(Multivector(sig, coeffs))


def kg_dispersion(xi: Sequence[float] | np.ndarray, h: float, n: int, m: float) -> float | np.ndarray:
    """sum_j (4/h^2) sin^2(h xi_j / 2) - m^2; accepts a single node or an (count, n) array."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != n:
        raise MomentumError(f"expected {n} momentum components, got {xi.shape[-1]}")
    out = (4.0 / h ** 2) * np.sum(np.sin(h * xi / 2.0) ** 2, axis=-1) - m * m
    return float(out) if out.ndim == 0 else out


def magnitude_sq(kind: SymbolKind | str, nodes: np.ndarray, h: float, m: float = 0.0) -> np.ndarray:
    """Closed-form squared magnitudes on an array of nodes; for kg the squared dispersion."""
    kind = SymbolKind(kind)
    if kind is SymbolKind.CENTRAL:
        return np.sum(np.sin(h * nodes) ** 2, axis=-1) / h ** 2
    if kind is SymbolKind.DH:
        return (4.0 / h ** 2) * np.sum(np.sin(h * nodes / 2.0) ** 2, axis=-1)
    return kg_dispersion(nodes, h, nodes.shape[-1], m) ** 2


def symbol_value(kind: SymbolKind | str, xi: Sequence[float], h: float, n: int,
                 m: float = 0.0) -> SymbolValue:
    kind = SymbolKind(kind)
    if kind is SymbolKind.CENTRAL:
        return central_symbol(xi, h, n)
    if kind is SymbolKind.DH:
        return dh_symbol(xi, h, n)
    d = kg_dispersion(xi, h, n, m)
    return SymbolValue(Multivector.scalar(cl.clnn(n), d), d * d)


def gamma_anticommutator(symbol: Multivector) -> float:
    g = cl.gamma(symbol.sig.p)
    return (symbol * g + g * symbol).max_abs()


def massive_square_defect(symbol: Multivector, m: float, target: float) -> float:
    """| (symbol - m gamma)^2 - (target + m^2) |, largest coefficient."""
    s = symbol - m * cl.gamma(symbol.sig.p)
    return (s * s - Multivector.scalar(symbol.sig, target + m * m)).max_abs()


@dataclass(frozen=True)
class ZeroScan:
    kind: SymbolKind
    grid: BrillouinGrid
    mass: float
    torus_locations: tuple[tuple[float, ...], ...]
    closed_count: int

    @property
    def torus_count(self) -> int:
        return len(self.torus_locations)

    def to_json(self) -> dict:
        return {"operator": self.kind.value, "n": self.grid.n, "h": self.grid.h,
                "grid": self.grid.N, "mass": self.mass, "epsilon": ZERO_EPS,
                "torus_count": self.torus_count,
                "torus_locations": [list(x) for x in self.torus_locations],
                "closed_cube_count": self.closed_count,
                "claimed_count": 2 * self.grid.n + 1}


def zero_scan(grid: BrillouinGrid, kind: SymbolKind | str, m: float = 0.0) -> ZeroScan:
    """Nodes where the symbol magnitude drops below ZERO_EPS.

    The torus count uses the N^n identified nodes; the closed count also
    includes the +pi/h faces, so each boundary zero is seen from both sides.
    """
    kind = SymbolKind(kind)
    if grid.N < 16:
        raise MomentumError(f"zero scan needs N >= 16, got {grid.N}")
    nodes = grid.nodes()
    mag = np.sqrt(magnitude_sq(kind, nodes, grid.h, m))
    hits = nodes[mag < ZERO_EPS]
    closed = grid.nodes(closed=True)
    closed_mag = np.sqrt(magnitude_sq(kind, closed, grid.h, m))
    return ZeroScan(kind, grid, float(m), tuple(tuple(float(v) for v in x) for x in hits),
                    int(np.count_nonzero(closed_mag < ZERO_EPS)))


def dispersion_rows(grid: BrillouinGrid, kind: SymbolKind | str, m: float = 0.0) -> list[list[float]]:
    nodes = grid.nodes()
    mag = np.sqrt(magnitude_sq(kind, nodes, grid.h, m))
    return [[*map(float, x), float(v)] for x, v in zip(nodes, mag)]


def _check_commensurate(xi: Sequence[float], box: LatticeBox) -> None:
    if not box.periodic:
        raise MomentumError("plane-wave checks need a periodic box")
    if len(xi) != box.n:
        raise MomentumError(f"expected {box.n} momentum components, got {len(xi)}")
    for xj, nj in zip(xi, box.shape):
        t = xj * box.h * nj / (2.0 * math.pi)
        if abs(t - round(t)) > 1e-9:
            raise MomentumError(f"momentum {xj} is not commensurate with a period of {nj} sites")


def apply_operator(kind: SymbolKind | str, f: Field, m: float = 0.0) -> Field:
    """The lattice operator whose symbol is :func:`symbol_value` (S1 semantics)."""
    kind = SymbolKind(kind)
    if kind is SymbolKind.CENTRAL:
        return lf.central_dirac(f)
    if kind is SymbolKind.DH:
        return lf.dirac_dh(f, lf.Semantics.S1)
    return -lf.star_laplacian(f) - (m * m) * f


def plane_wave_check(xi: Sequence[float], kind: SymbolKind | str, box: LatticeBox,
                     amplitude: Multivector | None = None, m: float = 0.0,
                     rng: np.random.Generator | None = None) -> float:
    """max | L(e^{i<xi,x>} w) - e^{i<xi,x>} (symbol acting on w) | over the box."""
    _check_commensurate(xi, box)
    if amplitude is None:
        rng = np.random.default_rng(0) if rng is None else rng
        amplitude = Multivector.random(box.sig, rng, complex_=True)
    symbol = symbol_value(kind, xi, box.h, box.n, m).value
    image = Multivector(box.sig, cl.endomorphism_matrix(symbol) @ amplitude.coeffs)
    lhs = apply_operator(kind, Field.plane_wave(box, xi, amplitude), m)
    rhs = Field.plane_wave(box, xi, image)
    return (lhs - rhs).max_norm()


def wrap_momentum(xi: Sequence[float], h: float) -> tuple[float, ...]:
    """Representative of xi in [-pi/h, pi/h)."""
    period = 2.0 * math.pi / h
    return tuple(float((x + math.pi / h) % period - math.pi / h) for x in xi)


def chi_momentum_shift_check(box: LatticeBox, xi: Sequence[float] | None = None,
                             amplitude: Multivector | None = None) -> tuple[float, tuple[float, ...]]:
    """sigma(x) e^{i<xi,x>} w against the plane wave at xi + (pi/h)(1,...,1).

    Returns the largest coefficient deviation and the shifted momentum.
    """
    if any(s % 2 for s in box.shape):
        raise MomentumError(f"staggered shift needs even extents, got {box.shape}")
    xi = (0.0,) * box.n if xi is None else tuple(xi)
    _check_commensurate(xi, box)
    if amplitude is None:
        amplitude = Multivector.random(box.sig, np.random.default_rng(0), complex_=True)
    shifted = wrap_momentum([x + math.pi / box.h for x in xi], box.h)
    lhs = Field.plane_wave(box, xi, amplitude).scale_sites(box.sigma())
    rhs = Field.plane_wave(box, shifted, amplitude)
    return (lhs - rhs).max_norm(), shifted
