"""Cl(0,n)-valued lattice functions on finite boxes of hZ^n and their operators.

A :class:`Field` stores one coefficient vector per site in a dense array of
shape ``box.shape + (2**n,)``.  Every operator that needs a neighbour
shrinks the field's valid region by one layer on the affected side (or
wraps, for periodic boxes); entries outside the valid region are NaN and
never reach a residual.

Witt symbols compose with lattice functions under one of two semantics:

* ``S1`` -- the Witt symbols act pointwise on the value at each site.
* ``S2`` -- applying e_j^+ (resp. e_j^-) first shifts the argument by -h
  (resp. +h) along axis j and takes the main involution of the value,
  then acts pointwise.
"""
from __future__ import annotations

import csv
import enum
import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import clifford as cl
from .clifford import Multivector


class LatticeError(ValueError):
    pass


class Semantics(str, enum.Enum):
    S1 = "s1"
    S2 = "s2"


class MassTerm(str, enum.Enum):
    CHI = "chi"
    K = "k"


@dataclass(frozen=True)
class LatticeBox:
    n: int
    h: float
    lo: tuple[int, ...]
    hi: tuple[int, ...]
    periodic: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise LatticeError(f"dimension must be >= 1, got {self.n}")
        if not self.h > 0:
            raise LatticeError(f"mesh width must be positive, got {self.h}")
        if len(self.lo) != self.n or len(self.hi) != self.n:
            raise LatticeError("lo/hi need one bound per axis")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise LatticeError(f"empty box {self.lo}..{self.hi}")

    @classmethod
    def cube(cls, n: int, h: float, lo: int, hi: int, periodic: bool = False) -> LatticeBox:
        return cls(n, float(h), (lo,) * n, (hi,) * n, periodic)

    @cached_property
    def shape(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def sig(self) -> cl.Signature:
        return cl.cl0n(self.n)

    @cached_property
    def full_region(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.lo, self.hi))

    def coords(self) -> np.ndarray:
        """Integer site labels k (x = k h), shape ``shape + (n,)``."""
        axes = [np.arange(a, b + 1) for a, b in zip(self.lo, self.hi)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def sigma(self) -> np.ndarray:
        """Staggered sign prod_j (-1)^(x_j/h) per site."""
        return np.where(self.coords().sum(axis=-1) % 2 == 0, 1.0, -1.0)

    def sites(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def to_json(self) -> dict:
        return {"n": self.n, "h": self.h, "lo": list(self.lo), "hi": list(self.hi),
                "periodic": self.periodic}


def _intersect(r1, r2):
    out = tuple((max(a1, a2), min(b1, b2)) for (a1, b1), (a2, b2) in zip(r1, r2))
    if any(a > b for a, b in out):
        raise LatticeError("valid regions do not overlap")
    return out


@lru_cache(maxsize=4096)
def _outside_mask(box: LatticeBox, valid: tuple[tuple[int, int], ...]) -> np.ndarray | None:
    if valid == box.full_region:
        return None
    mask = np.ones(box.shape, dtype=bool)
    for axis, ((a, b), lo) in enumerate(zip(valid, box.lo)):
        idx = np.arange(box.shape[axis]) + lo
        inside = (idx >= a) & (idx <= b)
        shape = [1] * box.n
        shape[axis] = -1
        mask &= inside.reshape(shape)
    mask = ~mask
    mask.setflags(write=False)
    return mask


class Field:
    """Immutable lattice function hZ^n -> Cl(0,n) on a finite box."""

    __slots__ = ("box", "values", "valid")

    def __init__(self, box: LatticeBox, values: np.ndarray,
                 valid: Sequence[tuple[int, int]] | None = None) -> None:
        values = np.array(values, dtype=np.complex128)
        if values.shape != box.shape + (1 << box.n,):
            raise LatticeError(f"values shape {values.shape} does not fit box {box.shape}")
        valid = box.full_region if valid is None else tuple((int(a), int(b)) for a, b in valid)
        if any(a > b for a, b in valid):
            raise LatticeError("empty valid region")
        outside = _outside_mask(box, valid)
        if outside is not None:
            values[outside] = np.nan
        values.setflags(write=False)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid", valid)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    # constructors

    @classmethod
    def zeros(cls, box: LatticeBox) -> Field:
        return cls(box, np.zeros(box.shape + (1 << box.n,)))

    @classmethod
    def constant(cls, box: LatticeBox, value: Multivector | complex) -> Field:
        if not isinstance(value, Multivector):
            value = Multivector.scalar(box.sig, value)
        return cls(box, np.broadcast_to(value.coeffs, box.shape + (1 << box.n,)))

    @classmethod
    def from_function(cls, box: LatticeBox,
                      fn: Callable[[tuple[int, ...]], Multivector | complex]) -> Field:
        vals = np.zeros(box.shape + (1 << box.n,), dtype=np.complex128)
        for k in box.sites():
            v = fn(k)
            idx = tuple(ki - a for ki, a in zip(k, box.lo))
            if isinstance(v, Multivector):
                vals[idx] = v.coeffs
            else:
                vals[idx][0] = v
        return cls(box, vals)

    @classmethod
    def random(cls, box: LatticeBox, rng: np.random.Generator, complex_: bool = False) -> Field:
        shape = box.shape + (1 << box.n,)
        vals = rng.standard_normal(shape)
        if complex_:
            vals = vals + 1j * rng.standard_normal(shape)
        return cls(box, vals)

    @classmethod
    def plane_wave(cls, box: LatticeBox, xi: Sequence[float], amplitude: Multivector) -> Field:
        phase = np.exp(1j * box.h * (box.coords() @ np.asarray(xi, dtype=float)))
        return cls(box, phase[..., None] * amplitude.coeffs)

    # access

    def _index(self, k: Sequence[int]) -> tuple[int, ...]:
        return tuple(ki - a for ki, a in zip(k, self.box.lo))

    def at(self, k: Sequence[int]) -> Multivector:
        if not all(a <= ki <= b for ki, (a, b) in zip(k, self.valid)):
            raise LatticeError(f"site {tuple(k)} outside valid region {self.valid}")
        return Multivector(self.box.sig, self.values[self._index(k)])

    def region_slices(self) -> tuple[slice, ...]:
        return tuple(slice(a - lo, b - lo + 1) for (a, b), lo in zip(self.valid, self.box.lo))

    def interior_values(self) -> np.ndarray:
        return self.values[self.region_slices()]

    def max_norm(self) -> float:
        """Largest coefficient magnitude over the valid region."""
        v = self.interior_values()
        return float(np.max(np.abs(v))) if v.size else 0.0

    def with_valid(self, valid: Sequence[tuple[int, int]]) -> Field:
        return Field(self.box, self.values, _intersect(self.valid, valid))

    # arithmetic

    def _binary(self, other: Field, op) -> Field:
        if other.box != self.box:
            raise LatticeError("fields live on different boxes")
        valid = _intersect(self.valid, other.valid)
        return Field(self.box, op(self.values, other.values), valid)

    def __add__(self, other):
        if isinstance(other, Field):
            return self._binary(other, np.add)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Field):
            return self._binary(other, np.subtract)
        return NotImplemented

    def __neg__(self) -> Field:
        return Field(self.box, -self.values, self.valid)

    def __mul__(self, other):
        if np.isscalar(other):
            return Field(self.box, self.values * other, self.valid)
        if isinstance(other, Field):
            return self.gp(other)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Field(self.box, self.values * other, self.valid)
        return NotImplemented

    def gp(self, other: Field) -> Field:
        """Pointwise geometric product."""
        size = self.box.sig.size
        table = cl.cayley_tensor(self.box.sig).reshape(size, size * size)

        def product(a, b):
            left = (a @ table).reshape(a.shape[:-1] + (size, size))
            return np.einsum("...j,...jk->...k", b, left)

        return self._binary(other, product)

    def apply(self, matrix: np.ndarray) -> Field:
        """Pointwise linear map on coefficient vectors."""
        return Field(self.box, self.values @ np.asarray(matrix).T, self.valid)

    def scale_sites(self, weights: np.ndarray) -> Field:
        return Field(self.box, self.values * weights[..., None], self.valid)

    def involute(self) -> Field:
        return self.apply(cl.involution_matrix(self.box.n))

    def allclose(self, other: Field, atol: float = 1e-12) -> bool:
        return (self - other).max_norm() <= atol

    # CSV dump: k1..kn, blade_mask, re, im -- one row per nonzero (site, blade)

    def to_csv(self, path: str | Path) -> None:
        n = self.box.n
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"k{j + 1}" for j in range(n)] + ["blade_mask", "re", "im"])
            for row in self.csv_rows():
                w.writerow(row)

    def csv_rows(self) -> list[list]:
        rows = []
        region = [range(a, b + 1) for a, b in self.valid]
        for k in itertools.product(*region):
            for mask, c in enumerate(self.values[self._index(k)]):
                if c != 0:
                    rows.append(list(k) + [mask, repr(float(c.real)), repr(float(c.imag))])
        return rows

    @classmethod
    def from_csv(cls, path: str | Path, h: float = 1.0, box: LatticeBox | None = None) -> Field:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            n = len(header) - 3
            if n < 1 or header[-3:] != ["blade_mask", "re", "im"]:
                raise LatticeError(f"unrecognized field CSV header {header}")
            rows = [r for r in reader if r]
        sites = [tuple(int(v) for v in r[:n]) for r in rows]
        if box is None:
            if not sites:
                raise LatticeError("cannot infer a box from an empty field CSV")
            lo = tuple(min(s[j] for s in sites) for j in range(n))
            hi = tuple(max(s[j] for s in sites) for j in range(n))
            box = LatticeBox(n, h, lo, hi)
        elif box.n != n:
            raise LatticeError("CSV dimension does not match the given box")
        vals = np.zeros(box.shape + (1 << n,), dtype=np.complex128)
        for k, r in zip(sites, rows):
            idx = tuple(ki - a for ki, a in zip(k, box.lo))
            vals[idx + (int(r[n]),)] += complex(float(r[n + 1]), float(r[n + 2]))
        return cls(box, vals)


def _axis(f: Field, j: int) -> None:
    if not 1 <= j <= f.box.n:
        raise LatticeError(f"axis {j} out of range 1..{f.box.n}")


def shift(f: Field, j: int, s: int) -> Field:
    """g(k) = f(k + s e_j)."""
    _axis(f, j)
    if s not in (1, -1):
        raise LatticeError("shift direction must be +1 or -1")
    values = np.roll(f.values, -s, axis=j - 1)
    if f.box.periodic:
        return Field(f.box, values, f.valid)
    valid = list(f.valid)
    a, b = valid[j - 1]
    lo, hi = f.box.lo[j - 1], f.box.hi[j - 1]
    valid[j - 1] = (max(a - s, lo), min(b - s, hi))
    if valid[j - 1][0] > valid[j - 1][1]:
        raise LatticeError("shift leaves an empty valid region")
    return Field(f.box, values, valid)


def forward_diff(f: Field, j: int) -> Field:
    return (shift(f, j, 1) - f) * (1.0 / f.box.h)


def backward_diff(f: Field, j: int) -> Field:
    return (f - shift(f, j, -1)) * (1.0 / f.box.h)


def _sum(fields: Iterable[Field]) -> Field:
    it = iter(fields)
    out = next(it)
    for g in it:
        out = out + g
    return out


def star_laplacian(f: Field) -> Field:
    h2 = f.box.h ** 2
    return _sum(
        (shift(f, j, 1) + shift(f, j, -1) - 2.0 * f) * (1.0 / h2) for j in range(1, f.box.n + 1)
    )


def dirac_plus(f: Field, sem: Semantics = Semantics.S1) -> Field:
    """sum_j e_j^+ d^{+j} f."""
    n = f.box.n
    terms = []
    for j in range(1, n + 1):
        d = forward_diff(f, j)
        if Semantics(sem) is Semantics.S2:
            d = shift(d, j, -1).involute()
        terms.append(d.apply(cl.witt_lower_matrix(n, j)))
    return _sum(terms)


def dirac_minus(f: Field, sem: Semantics = Semantics.S1) -> Field:
    """sum_j e_j^- d^{-j} f."""
    n = f.box.n
    terms = []
    for j in range(1, n + 1):
        d = backward_diff(f, j)
        if Semantics(sem) is Semantics.S2:
            d = shift(d, j, 1).involute()
        terms.append(d.apply(cl.witt_raise_matrix(n, j)))
    return _sum(terms)


def dirac_dh(f: Field, sem: Semantics = Semantics.S1) -> Field:
    return dirac_minus(f, sem) - dirac_plus(f, sem)


def left_dirac(f: Field, direction: int) -> Field:
    """D_h^{+-} = sum_j e_j d^{+-j} f with e_j acting by left multiplication."""
    diff = forward_diff if direction > 0 else backward_diff
    n = f.box.n
    return _sum(diff(f, j).apply(cl.left_generator_matrix(n, j)) for j in range(1, n + 1))


def central_dirac(f: Field) -> Field:
    return 0.5 * (left_dirac(f, -1) + left_dirac(f, 1))


def dalembert(f: Field) -> Field:
    """-sum_j E_{j+n} d^{-j} d^{+j} f, with E_{j+n}: a -> a' e_j."""
    n = f.box.n
    return -_sum(
        backward_diff(forward_diff(f, j), j).apply(cl.right_generator_matrix(n, j))
        for j in range(1, n + 1)
    )


def k_action(f: Field) -> Field:
    return f.apply(cl.k_matrix(f.box.n))


def chi_action(f: Field) -> Field:
    """chi_h f at each site: staggered sign times K."""
    return k_action(f).scale_sites(f.box.sigma())


def mass_operator(mass_term: MassTerm) -> Callable[[Field], Field]:
    return chi_action if MassTerm(mass_term) is MassTerm.CHI else k_action


def project_chiral(f: Field, sign: int, mass_term: MassTerm = MassTerm.CHI) -> Field:
    """(f +- X f)/2 with X = chi_h (default) or K."""
    x = mass_operator(mass_term)(f)
    return 0.5 * (f + x) if sign > 0 else 0.5 * (f - x)


def kg_residual(f: Field, m: float) -> tuple[Field, float]:
    r = star_laplacian(f) - (m * m) * f
    return r, r.max_norm()


def kg_mean_value_residual(f: Field, m: float) -> tuple[Field, float]:
    """sum_j f(x+he_j) + f(x-he_j) - ((mh)^2 + 2n) f(x)."""
    n, h = f.box.n, f.box.h
    s = _sum(shift(f, j, 1) + shift(f, j, -1) for j in range(1, n + 1))
    r = s - ((m * h) ** 2 + 2 * n) * f
    return r, r.max_norm()


def dirac_residual(f: Field, m: float, sem: Semantics = Semantics.S1,
                   mass_term: MassTerm = MassTerm.CHI) -> tuple[Field, float]:
    r = dirac_dh(f, sem) - m * mass_operator(mass_term)(f)
    return r, r.max_norm()


@dataclass(frozen=True)
class CoupledResiduals:
    """Residual norms for a chiral/achiral pair (f_+, f_-).

    ``literal`` measures D f_+ - m f_+ and D f_- + m f_-.  ``cross`` measures
    the two eigen-components of (D - mX)(f_+ + f_-) for eigenvectors f_+-
    of X, namely D f_- - m f_+ and D f_+ + m f_-.  ``full`` is the Dirac
    residual of f_+ + f_- and ``eigen`` the defect |X f_+- -+ f_+-|.
    """

    literal: tuple[float, float]
    cross: tuple[float, float]
    full: float
    eigen: tuple[float, float]

    def to_json(self) -> dict:
        return {"literal": list(self.literal), "cross": list(self.cross),
                "full": self.full, "eigen": list(self.eigen)}


def coupled_residuals(f_plus: Field, f_minus: Field, m: float,
                      sem: Semantics = Semantics.S1,
                      mass_term: MassTerm = MassTerm.CHI) -> CoupledResiduals:
    if f_plus.box != f_minus.box:
        raise LatticeError("f_plus and f_minus live on different boxes")
    d_plus = dirac_dh(f_plus, sem)
    d_minus = dirac_dh(f_minus, sem)
    x = mass_operator(mass_term)
    return CoupledResiduals(
        literal=((d_plus - m * f_plus).max_norm(), (d_minus + m * f_minus).max_norm()),
        cross=((d_minus - m * f_plus).max_norm(), (d_plus + m * f_minus).max_norm()),
        full=dirac_residual(f_plus + f_minus, m, sem, mass_term)[1],
        eigen=((x(f_plus) - f_plus).max_norm(), (x(f_minus) + f_minus).max_norm()),
    )
